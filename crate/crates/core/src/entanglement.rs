//! Two-spin reduced states, logarithmic negativity and spin-spin correlations.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{site_bit, Axis};
use crate::state::{DensityMatrix, HERMITICITY_TOL, POSITIVITY_TOL, TRACE_TOL};

/// Partial-transpose eigenvalues above `-PPT_TOL` count as non-negative.
pub const PPT_TOL: f64 = 1e-10;

/// Reduced state of a spin pair; slot order is `(first site, second site)`
/// and index `2a + b` labels `|a⟩|b⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    entries: Matrix4<Complex64>,
}

impl TwoQubitState {
    pub fn new(entries: Matrix4<Complex64>) -> Result<Self> {
        let s = Self { entries };
        s.validate()?;
        Ok(s)
    }

    pub fn entries(&self) -> &Matrix4<Complex64> {
        &self.entries
    }

    fn validate(&self) -> Result<()> {
        let m = &self.entries;
        let herm = (0..4)
            .flat_map(|r| (0..4).map(move |c| (r, c)))
            .map(|(r, c)| (m[(r, c)] - m[(c, r)].conj()).norm())
            .fold(0.0, f64::max);
        if herm > HERMITICITY_TOL {
            return Err(Error::Contract(format!("two-qubit state not Hermitian (drift {herm:e})")));
        }
        let tr: Complex64 = (0..4).map(|i| m[(i, i)]).sum();
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::Contract(format!("two-qubit state has trace {tr}")));
        }
        let min = hermitian_eigenvalues(m).into_iter().fold(f64::INFINITY, f64::min);
        if min < -POSITIVITY_TOL {
            return Err(Error::Contract(format!("two-qubit state has eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// Partial transpose on the second slot.
    pub fn partial_transpose(&self) -> Matrix4<Complex64> {
        let m = &self.entries;
        Matrix4::from_fn(|r, c| {
            let (a1, b1) = (r >> 1, r & 1);
            let (a2, b2) = (c >> 1, c & 1);
            m[((a1 << 1) | b2, (a2 << 1) | b1)]
        })
    }

    /// `tr(σ · (A ⊗ B))` for single-site axes (`None` is the identity).
    pub fn local_expectation(&self, first: Option<Axis>, second: Option<Axis>) -> Complex64 {
        let id = [
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ];
        let a = first.map_or(id, Axis::matrix);
        let b = second.map_or(id, Axis::matrix);
        let mut acc = Complex64::new(0.0, 0.0);
        // tr(σ O) = Σ σ[r, c] O[c, r]
        for r in 0..4 {
            for c in 0..4 {
                let o = a[c >> 1][r >> 1] * b[c & 1][r & 1];
                acc += self.entries[(r, c)] * o;
            }
        }
        acc
    }
}

fn hermitian_eigenvalues(m: &Matrix4<Complex64>) -> Vec<f64> {
    m.symmetric_eigenvalues().iter().copied().collect()
}

fn check_pair(rho: &DensityMatrix, i: usize, j: usize) -> Result<()> {
    let l = rho.sites();
    if i == j {
        return Err(Error::Input(format!("pair ({i}, {j}) repeats a site")));
    }
    for s in [i, j] {
        if s == 0 || s > l {
            return Err(Error::SiteOutOfRange { site: s, sites: l });
        }
    }
    Ok(())
}

/// Partial trace over every site except `i` and `j`; site `i` takes the first slot.
pub fn reduced_two_qubit_state(rho: &DensityMatrix, i: usize, j: usize) -> Result<TwoQubitState> {
    check_pair(rho, i, j)?;
    Ok(TwoQubitState { entries: reduce_pair(rho, i, j) })
}

fn reduce_pair(rho: &DensityMatrix, i: usize, j: usize) -> Matrix4<Complex64> {
    let l = rho.sites();
    let bi = 1usize << site_bit(l, i);
    let bj = 1usize << site_bit(l, j);
    let m = rho.matrix();
    let dim = rho.dim();
    let mut out = Matrix4::<Complex64>::zeros();
    for r in 0..dim {
        let a = (usize::from(r & bi != 0) << 1) | usize::from(r & bj != 0);
        let rest = r & !(bi | bj);
        for b in 0..4 {
            let mut c = rest;
            if b & 2 != 0 {
                c |= bi;
            }
            if b & 1 != 0 {
                c |= bj;
            }
            out[(a, b)] += m[(r, c)];
        }
    }
    out
}

/// `log2 ‖σ^{T_B}‖₁`, zero when the partial transpose is positive semidefinite
/// within [`PPT_TOL`].
pub fn logarithmic_negativity(state: &TwoQubitState) -> Result<f64> {
    state.validate()?;
    Ok(ln_unchecked(state))
}

fn ln_unchecked(state: &TwoQubitState) -> f64 {
    let eig = hermitian_eigenvalues(&state.partial_transpose());
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    if min >= -PPT_TOL {
        return 0.0;
    }
    let norm: f64 = eig.iter().map(|x| x.abs()).sum();
    norm.log2().max(0.0)
}

/// Logarithmic negativity of the pair `(i, j)` of `rho`.
pub fn pair_log_negativity(rho: &DensityMatrix, i: usize, j: usize) -> Result<f64> {
    let state = reduced_two_qubit_state(rho, i, j)?;
    logarithmic_negativity(&state)
}

/// `C_ij = Σ_α ⟨σ_α^i σ_α^j⟩ − Σ_α ⟨σ_α^i⟩⟨σ_α^j⟩`.
pub fn pair_correlation(rho: &DensityMatrix, i: usize, j: usize) -> Result<f64> {
    check_pair(rho, i, j)?;
    let state = TwoQubitState { entries: reduce_pair(rho, i, j) };
    let mut corr = 0.0;
    for axis in [Axis::X, Axis::Y, Axis::Z] {
        let both = state.local_expectation(Some(axis), Some(axis)).re;
        let a = state.local_expectation(Some(axis), None).re;
        let b = state.local_expectation(None, Some(axis)).re;
        corr += both - a * b;
    }
    Ok(corr)
}
