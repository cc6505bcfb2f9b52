//! Dense density matrices of an L-spin register.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::pauli::CMatrix;

/// Hermiticity drift above which a state is rejected.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Drift above which a state is re-symmetrized.
pub const HERMITICITY_RESYMMETRIZE: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-8;
pub const POSITIVITY_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    sites: usize,
    matrix: CMatrix,
}

/// Cheap O(4^L) integrity figures of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrity {
    pub trace_error: f64,
    pub hermiticity_error: f64,
}

impl DensityMatrix {
    /// Validates dimension, Hermiticity, trace and positivity (the last costs an
    /// eigendecomposition).
    pub fn new(sites: usize, matrix: CMatrix) -> Result<Self> {
        let mut rho = Self::from_matrix_unchecked(sites, matrix)?;
        rho.check_cheap()?;
        let min = rho.min_eigenvalue();
        if min < -POSITIVITY_TOL {
            return Err(Error::NumericalIntegrity(format!("minimum eigenvalue {min:e} below -{POSITIVITY_TOL:e}")));
        }
        Ok(rho)
    }

    /// Only the shape is checked.
    pub fn from_matrix_unchecked(sites: usize, matrix: CMatrix) -> Result<Self> {
        let dim = 1usize << sites;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Shape {
                expected: format!("{dim}x{dim}"),
                found: format!("{}x{}", matrix.nrows(), matrix.ncols()),
            });
        }
        Ok(Self { sites, matrix })
    }

    pub fn maximally_mixed(sites: usize) -> Self {
        let dim = 1usize << sites;
        let matrix = CMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0);
        Self { sites, matrix }
    }

    /// `|index⟩⟨index|`; index 0 is all spins up.
    pub fn basis_state(sites: usize, index: usize) -> Result<Self> {
        let dim = 1usize << sites;
        if index >= dim {
            return Err(Error::Input(format!("basis index {index} out of range for dimension {dim}")));
        }
        let mut matrix = CMatrix::zeros(dim, dim);
        matrix[(index, index)] = Complex64::new(1.0, 0.0);
        Ok(Self { sites, matrix })
    }

    /// `|ψ⟩⟨ψ|/⟨ψ|ψ⟩`.
    pub fn from_pure(sites: usize, psi: &[Complex64]) -> Result<Self> {
        let dim = 1usize << sites;
        if psi.len() != dim {
            return Err(Error::Shape { expected: format!("{dim}"), found: format!("{}", psi.len()) });
        }
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::Input("state vector has no norm".into()));
        }
        let matrix = CMatrix::from_fn(dim, dim, |r, c| psi[r] * psi[c].conj() / norm);
        Ok(Self { sites, matrix })
    }

    /// Tensor product of single-site 2×2 states, site 1 first.
    pub fn product(site_states: &[CMatrix]) -> Result<Self> {
        let mut acc = CMatrix::identity(1, 1);
        for s in site_states {
            if s.nrows() != 2 || s.ncols() != 2 {
                return Err(Error::Shape { expected: "2x2".into(), found: format!("{}x{}", s.nrows(), s.ncols()) });
            }
            acc = acc.kronecker(s);
        }
        Self::new(site_states.len(), acc)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        linalg::trace(&self.matrix)
    }

    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn integrity(&self) -> Integrity {
        Integrity {
            trace_error: (self.trace() - Complex64::new(1.0, 0.0)).norm(),
            hermiticity_error: linalg::hermiticity_error(&self.matrix),
        }
    }

    /// Trace and Hermiticity checks; re-symmetrizes small drift in place.
    pub fn check_cheap(&mut self) -> Result<Integrity> {
        let report = self.integrity();
        if report.hermiticity_error > HERMITICITY_TOL {
            return Err(Error::NumericalIntegrity(format!(
                "Hermiticity drift {:e} exceeds {HERMITICITY_TOL:e}",
                report.hermiticity_error
            )));
        }
        if report.hermiticity_error > HERMITICITY_RESYMMETRIZE {
            linalg::hermitize(&mut self.matrix);
        }
        if report.trace_error > TRACE_TOL {
            return Err(Error::NumericalIntegrity(format!("trace deviates from 1 by {:e}", report.trace_error)));
        }
        Ok(report)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::eigvalsh(&self.matrix).first().copied().unwrap_or(0.0)
    }

    /// `true` iff every eigenvalue exceeds `-tol`, decided by a Cholesky
    /// factorization of `ρ + tol·I` (a fraction of the cost of an eigensolve).
    pub fn is_positive_within(&self, tol: f64) -> bool {
        linalg::is_positive_definite_shifted(&self.matrix, tol)
    }

    /// Single-site reduced state of `site` (1-based).
    pub fn single_site(&self, site: usize) -> Result<CMatrix> {
        if site == 0 || site > self.sites {
            return Err(Error::SiteOutOfRange { site, sites: self.sites });
        }
        let bit = 1usize << (self.sites - site);
        let mut out = CMatrix::zeros(2, 2);
        for r in 0..self.dim() {
            let a = usize::from(r & bit != 0);
            for b in 0..2 {
                let c = if b == 1 { r | bit } else { r & !bit };
                out[(a, b)] += self.matrix[(r, c)];
            }
        }
        Ok(out)
    }
}
