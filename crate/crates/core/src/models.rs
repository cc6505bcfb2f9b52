//! Spin-chain Hamiltonians, ATXY phase labels and quenched-disorder sampling.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Axis, OperatorSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Atxy,
    Txy,
    Txxz,
    Txyz,
    Heisenberg,
    J1j2,
}

/// Parameters of one chain. Energies are in units of the exchange `j`;
/// per-site fields `h1`, `h2` are given as multiples of `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    pub sites: usize,
    pub j: f64,
    pub gamma: f64,
    pub delta: f64,
    pub h1: Vec<f64>,
    pub h2: Vec<f64>,
    pub boundary: Boundary,
    pub variant: Variant,
    /// Next-nearest-neighbour coupling, used only by [`Variant::J1j2`] (where `j` plays `J1`).
    #[serde(default)]
    pub j2: f64,
}

impl ChainSpec {
    /// Uniform-field ATXY chain with `J = 1` and open boundaries.
    pub fn atxy(sites: usize, h1: f64, h2: f64, gamma: f64) -> Self {
        Self {
            sites,
            j: 1.0,
            gamma,
            delta: 0.0,
            h1: vec![h1; sites],
            h2: vec![h2; sites],
            boundary: Boundary::Open,
            variant: Variant::Atxy,
            j2: 0.0,
        }
    }

    /// XXZ chain in a uniform field (`γ = 0`, `h2 = 0`) with `J = 1`.
    pub fn txxz(sites: usize, delta: f64, h1: f64) -> Self {
        Self {
            sites,
            j: 1.0,
            gamma: 0.0,
            delta,
            h1: vec![h1; sites],
            h2: vec![0.0; sites],
            boundary: Boundary::Open,
            variant: Variant::Txxz,
            j2: 0.0,
        }
    }

    pub fn j1j2(sites: usize, j1: f64, j2: f64, boundary: Boundary) -> Self {
        Self {
            sites,
            j: j1,
            gamma: 0.0,
            delta: 0.0,
            h1: vec![0.0; sites],
            h2: vec![0.0; sites],
            boundary,
            variant: Variant::J1j2,
            j2,
        }
    }

    /// Every violated constraint, empty when the spec is valid.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.sites == 0 {
            v.push("chain.sites must be at least 1".to_string());
        }
        if self.sites > 16 {
            v.push(format!("chain.sites = {} exceeds the dense-state limit of 16", self.sites));
        }
        if !(self.j.is_finite() && self.j > 0.0) {
            v.push(format!("chain.j must be positive, got {}", self.j));
        }
        for (name, x) in [("gamma", self.gamma), ("delta", self.delta), ("j2", self.j2)] {
            if !x.is_finite() {
                v.push(format!("chain.{name} must be finite"));
            }
        }
        if self.h1.len() != self.sites {
            v.push(format!("chain.h1 has {} entries for {} sites", self.h1.len(), self.sites));
        }
        if self.h2.len() != self.sites {
            v.push(format!("chain.h2 has {} entries for {} sites", self.h2.len(), self.sites));
        }
        if self.h1.iter().chain(&self.h2).any(|x| !x.is_finite()) {
            v.push("chain fields must be finite".to_string());
        }
        let h1_zero = self.h1.iter().all(|&x| x == 0.0);
        let h2_zero = self.h2.iter().all(|&x| x == 0.0);
        match self.variant {
            Variant::Txy => {
                if !h2_zero {
                    v.push("txy requires h2 = 0".into());
                }
                if self.delta != 0.0 {
                    v.push("txy requires delta = 0".into());
                }
            }
            Variant::Txxz => {
                if self.gamma != 0.0 {
                    v.push("txxz requires gamma = 0".into());
                }
                if !h2_zero {
                    v.push("txxz requires h2 = 0".into());
                }
            }
            Variant::Txyz => {
                if !h2_zero {
                    v.push("txyz requires h2 = 0".into());
                }
            }
            Variant::Heisenberg => {
                if self.gamma != 0.0 || self.delta != 1.0 || !h2_zero {
                    v.push("heisenberg requires gamma = 0, delta = 1, h2 = 0".into());
                }
            }
            Variant::J1j2 => {
                if !h1_zero || !h2_zero {
                    v.push("j1j2 takes no transverse fields".into());
                }
                if self.sites < 3 {
                    v.push("j1j2 requires at least 3 sites".into());
                }
            }
            Variant::Atxy => {}
        }
        if self.variant != Variant::J1j2 && self.j2 != 0.0 {
            v.push("j2 is only meaningful for the j1j2 variant".into());
        }
        if self.boundary == Boundary::Periodic && self.sites < 3 {
            v.push("periodic boundary requires at least 3 sites".into());
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidSpec(v.join("; ")))
        }
    }

    fn bonds(&self, range: usize) -> Vec<(usize, usize)> {
        bonds(self.sites, range, self.boundary)
    }
}

fn bonds(sites: usize, range: usize, boundary: Boundary) -> Vec<(usize, usize)> {
    match boundary {
        Boundary::Open => (1..=sites.saturating_sub(range)).map(|i| (i, i + range)).collect(),
        Boundary::Periodic => (1..=sites).map(|i| (i, (i + range - 1) % sites + 1)).collect(),
    }
}

/// `H = Σ (J/4)[(1+γ)XX + (1−γ)YY] + (JΔ/4)ZZ + Σ_i (J/2)[h1_i + (−1)^i h2_i] Z_i`.
///
/// Bonds run `i = 1..L−1` for open chains and wrap around for periodic ones.
/// The alternating field gives site 1 the sign `−1`. Zero coefficients are omitted.
pub fn build_hamiltonian(spec: &ChainSpec) -> Result<OperatorSum> {
    spec.validate()?;
    if spec.variant == Variant::J1j2 {
        return build_j1j2(spec.sites, spec.j, spec.j2, spec.boundary);
    }
    let mut h = OperatorSum::new(spec.sites);
    let j = spec.j;
    for (a, b) in spec.bonds(1) {
        h.add(&[(a, Axis::X), (b, Axis::X)], j / 4.0 * (1.0 + spec.gamma))?;
        h.add(&[(a, Axis::Y), (b, Axis::Y)], j / 4.0 * (1.0 - spec.gamma))?;
        h.add(&[(a, Axis::Z), (b, Axis::Z)], j * spec.delta / 4.0)?;
    }
    for i in 1..=spec.sites {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let field = 0.5 * j * (spec.h1[i - 1] + sign * spec.h2[i - 1]);
        h.add(&[(i, Axis::Z)], field)?;
    }
    Ok(h)
}

/// `H = J1 Σ σ⃗_i·σ⃗_{i+1} + J2 Σ σ⃗_i·σ⃗_{i+2}`; open chains drop bonds leaving the chain.
pub fn build_j1j2(sites: usize, j1: f64, j2: f64, boundary: Boundary) -> Result<OperatorSum> {
    if sites < 3 {
        return Err(Error::InvalidSpec(format!("j1j2 requires at least 3 sites, got {sites}")));
    }
    if !j1.is_finite() || !j2.is_finite() {
        return Err(Error::InvalidSpec("j1j2 couplings must be finite".into()));
    }
    let mut h = OperatorSum::new(sites);
    for (range, coupling) in [(1, j1), (2, j2)] {
        for (a, b) in bonds(sites, range, boundary) {
            for axis in [Axis::X, Axis::Y, Axis::Z] {
                h.add(&[(a, axis), (b, axis)], coupling)?;
            }
        }
    }
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    #[serde(rename = "PM-I")]
    PmI,
    #[serde(rename = "PM-II")]
    PmII,
    #[serde(rename = "AFM")]
    Afm,
    #[serde(rename = "boundary")]
    Boundary,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::PmI => "PM-I",
            Phase::PmII => "PM-II",
            Phase::Afm => "AFM",
            Phase::Boundary => "boundary",
        })
    }
}

/// Thermodynamic-limit ATXY phase of `(h1/J, h2/J)` at anisotropy `γ ≠ 0`.
///
/// Points within `1e-12` (relative to the largest squared field) of
/// `(h1/J)² = (h2/J)² + 1` or `(h2/J)² = (h1/J)² + γ²` are labelled boundary.
pub fn classify_phase(h1: f64, h2: f64, gamma: f64) -> Result<Phase> {
    if gamma == 0.0 || !gamma.is_finite() {
        return Err(Error::Parameter("phase classification needs a finite gamma != 0".into()));
    }
    if !h1.is_finite() || !h2.is_finite() {
        return Err(Error::Parameter("fields must be finite".into()));
    }
    let (a, b, g) = (h1 * h1, h2 * h2, gamma * gamma);
    let tol = 1e-12 * 1f64.max(a).max(b);
    let pm1 = a - b - 1.0;
    let pm2 = b - a - g;
    if pm1.abs() <= tol || pm2.abs() <= tol {
        return Ok(Phase::Boundary);
    }
    match (pm1 > 0.0, pm2 > 0.0) {
        (true, true) => {
            Err(Error::Classification(format!("({h1}, {h2}, {gamma}) satisfies both paramagnetic conditions")))
        }
        (true, false) => Ok(Phase::PmI),
        (false, true) => Ok(Phase::PmII),
        (false, false) => Ok(Phase::Afm),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DisorderTarget {
    H1,
    H2,
}

/// Quenched i.i.d. Gaussian disorder on one of the transverse-field profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderSpec {
    pub target: DisorderTarget,
    pub mean: f64,
    pub std: f64,
    pub realizations: usize,
    pub base_seed: u64,
}

impl DisorderSpec {
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.std.is_finite() && self.std >= 0.0) {
            v.push(format!("disorder.std must be non-negative, got {}", self.std));
        }
        if !self.mean.is_finite() {
            v.push("disorder.mean must be finite".into());
        }
        if self.realizations == 0 {
            v.push("disorder.realizations must be at least 1".into());
        }
        v
    }
}

/// A copy of `spec` whose targeted field profile is redrawn for one realization.
///
/// The generator is ChaCha8 seeded with `base_seed` on stream
/// `realization_index`, so a realization does not depend on which others ran.
pub fn sample_disorder(spec: &ChainSpec, disorder: &DisorderSpec, realization_index: usize) -> Result<ChainSpec> {
    let problems = disorder.violations();
    if !problems.is_empty() {
        return Err(Error::Parameter(problems.join("; ")));
    }
    if realization_index >= disorder.realizations {
        return Err(Error::Parameter(format!(
            "realization {realization_index} out of range (0..{})",
            disorder.realizations
        )));
    }
    let fields = if disorder.std == 0.0 {
        vec![disorder.mean; spec.sites]
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(disorder.base_seed);
        rng.set_stream(realization_index as u64);
        let normal =
            Normal::new(disorder.mean, disorder.std).map_err(|e| Error::Parameter(format!("gaussian: {e}")))?;
        (0..spec.sites).map(|_| normal.sample(&mut rng)).collect()
    };
    let mut out = spec.clone();
    match disorder.target {
        DisorderTarget::H1 => out.h1 = fields,
        DisorderTarget::H2 => out.h2 = fields,
    }
    out.validate()?;
    Ok(out)
}
