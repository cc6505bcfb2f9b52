//! Local dissipators, the full Lindblad right-hand side, and a repeated-interaction
//! (collision model) simulator used to validate the amplitude-damping generator.
//!
//! Units are dimensionless: ħ = J = 1, times are `Jt/ħ`, the coupling `k` is
//! `k/(ħJ)` and the bath enters only through the product `Bβ_E`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::linalg;
use crate::pauli::{site_bit, Axis, CMatrix, CompiledOperator, OperatorSum, PauliString};
use crate::state::DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Lrqi,
    Dephasing,
    None,
}

/// A door spin and the number of independent environments attached to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Door {
    pub site: usize,
    #[serde(default = "one")]
    pub multiplicity: usize,
}

fn one() -> usize {
    1
}

impl Door {
    pub fn single(site: usize) -> Self {
        Self { site, multiplicity: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub doors: Vec<Door>,
    /// Collision coupling `k/(ħJ)`.
    #[serde(default = "default_k")]
    pub k: f64,
    /// Bath field times inverse bath temperature, `Bβ_E`.
    #[serde(default = "default_beta_e_b")]
    pub beta_e_b: f64,
    /// Dephasing spectral cutoff.
    #[serde(default = "default_omega_c")]
    pub omega_c: f64,
    /// Ohmicity of the dephasing bath, `0 < s ≤ 2`.
    #[serde(default = "default_s")]
    pub s: f64,
}

fn default_k() -> f64 {
    1.0
}
fn default_beta_e_b() -> f64 {
    10.0
}
fn default_omega_c() -> f64 {
    1.0
}
fn default_s() -> f64 {
    1.0
}

impl NoiseSpec {
    pub fn lrqi(doors: Vec<Door>, k: f64, beta_e_b: f64) -> Self {
        Self { kind: NoiseKind::Lrqi, doors, k, beta_e_b, omega_c: 1.0, s: 1.0 }
    }

    pub fn dephasing(doors: Vec<Door>, s: f64, omega_c: f64) -> Self {
        Self { kind: NoiseKind::Dephasing, doors, k: 1.0, beta_e_b: 10.0, omega_c, s }
    }

    pub fn none() -> Self {
        Self { kind: NoiseKind::None, doors: Vec::new(), k: 1.0, beta_e_b: 10.0, omega_c: 1.0, s: 1.0 }
    }

    /// Bath populations `(p0, p1)` of `diag(p0, p1)`, `p0 = e^{−Bβ_E}/Z`.
    pub fn populations(&self) -> (f64, f64) {
        bath_populations(self.beta_e_b)
    }

    pub fn door_sites(&self) -> Vec<usize> {
        self.doors.iter().map(|d| d.site).collect()
    }

    pub fn violations(&self, sites: usize) -> Vec<String> {
        let mut v = Vec::new();
        let mut seen = Vec::new();
        for d in &self.doors {
            if d.site == 0 || d.site > sites {
                v.push(format!("noise door {} outside 1..={sites}", d.site));
            }
            if seen.contains(&d.site) {
                v.push(format!("noise door {} listed twice", d.site));
            }
            if d.multiplicity == 0 {
                v.push(format!("noise door {} has multiplicity 0", d.site));
            }
            seen.push(d.site);
        }
        if !(self.k.is_finite() && self.k > 0.0) {
            v.push(format!("noise.k must be positive, got {}", self.k));
        }
        if !self.beta_e_b.is_finite() {
            v.push("noise.beta_e_b must be finite".into());
        }
        if self.kind == NoiseKind::Dephasing {
            if !(self.s > 0.0 && self.s <= 2.0) {
                v.push(format!("noise.s must lie in (0, 2], got {}", self.s));
            }
            if !(self.omega_c.is_finite() && self.omega_c > 0.0) {
                v.push(format!("noise.omega_c must be positive, got {}", self.omega_c));
            }
        }
        v
    }

    pub fn validate(&self, sites: usize) -> Result<()> {
        let v = self.violations(sites);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Parameter(v.join("; ")))
        }
    }
}

/// `(p0, p1) = (e^{−x}, e^{x}) / (e^{−x} + e^{x})` for `x = Bβ_E`, computed without overflow.
pub fn bath_populations(beta_e_b: f64) -> (f64, f64) {
    let p0 = 1.0 / (1.0 + (2.0 * beta_e_b).exp());
    let p1 = 1.0 / (1.0 + (-2.0 * beta_e_b).exp());
    (p0, p1)
}

fn check_populations(p0: f64, p1: f64) -> Result<()> {
    if !(p0 >= 0.0 && p1 >= 0.0) || (p0 + p1 - 1.0).abs() > 1e-12 {
        return Err(Error::Parameter(format!("invalid bath populations ({p0}, {p1})")));
    }
    Ok(())
}

fn check_door(door: usize, sites: usize) -> Result<()> {
    if door == 0 || door > sites {
        return Err(Error::SiteOutOfRange { site: door, sites });
    }
    Ok(())
}

/// Accumulates `scale · 2k[p0(2σ+ρσ- − {σ-σ+, ρ}) + p1(2σ-ρσ+ − {σ+σ-, ρ})]` on bit `bit`.
///
/// With σ+ = |0⟩⟨1|: σ-σ+ projects on bit 1, σ+σ- on bit 0,
/// `(σ+ρσ-)[r, c] = ρ[r|b, c|b]` for r, c with bit cleared, and
/// `(σ-ρσ+)[r, c] = ρ[r&!b, c&!b]` for r, c with bit set.
#[allow(clippy::too_many_arguments)]
fn lrqi_into(rho: &[Complex64], out: &mut [Complex64], dim: usize, bit: usize, k: f64, p0: f64, p1: f64, scale: f64) {
    let b = 1usize << bit;
    let pref = 2.0 * k * scale;
    for c in 0..dim {
        let cb = c & b != 0;
        let col = c * dim;
        for r in 0..dim {
            let rb = r & b != 0;
            let x = rho[col + r];
            let v = match (rb, cb) {
                (false, false) => 2.0 * p0 * rho[(c | b) * dim + (r | b)] - 2.0 * p1 * x,
                (true, true) => 2.0 * p1 * rho[(c & !b) * dim + (r & !b)] - 2.0 * p0 * x,
                _ => -(p0 + p1) * x,
            };
            out[col + r] += v * pref;
        }
    }
}

/// Accumulates `scale · rate · (σz ρ σz − ρ)` on bit `bit`.
fn dephasing_into(rho: &[Complex64], out: &mut [Complex64], dim: usize, bit: usize, rate: f64, scale: f64) {
    let b = 1usize << bit;
    let f = -2.0 * rate * scale;
    for c in 0..dim {
        let cb = c & b;
        let col = c * dim;
        for r in 0..dim {
            if (r & b) != cb {
                out[col + r] += rho[col + r] * f;
            }
        }
    }
}

fn square_dim(m: &CMatrix) -> Result<(usize, usize)> {
    let dim = m.nrows();
    if m.ncols() != dim || !dim.is_power_of_two() || dim < 2 {
        return Err(Error::Shape { expected: "2^L x 2^L".into(), found: format!("{}x{}", m.nrows(), m.ncols()) });
    }
    Ok((dim, dim.trailing_zeros() as usize))
}

/// LRQI (amplitude-damping type) dissipator of one door.
pub fn lrqi_dissipator(rho: &DensityMatrix, door: usize, k: f64, p0: f64, p1: f64) -> Result<CMatrix> {
    check_populations(p0, p1)?;
    check_door(door, rho.sites())?;
    let dim = rho.dim();
    let mut out = CMatrix::zeros(dim, dim);
    lrqi_into(rho.matrix().as_slice(), out.as_mut_slice(), dim, site_bit(rho.sites(), door), k, p0, p1, 1.0);
    Ok(out)
}

/// Zero-temperature dephasing rate
/// `ω_c [1 + (ω_c t)²]^{−s/2} sin(s·atan(ω_c t)) Γ(s)`.
pub fn dephasing_rate(t: f64, s: f64, omega_c: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Parameter(format!("ohmicity must be positive, got {s}")));
    }
    if !(t >= 0.0) {
        return Err(Error::Parameter(format!("time must be non-negative, got {t}")));
    }
    if !(omega_c > 0.0) || !omega_c.is_finite() {
        return Err(Error::Parameter(format!("cutoff must be positive, got {omega_c}")));
    }
    let x = omega_c * t;
    Ok(omega_c * (1.0 + x * x).powf(-s / 2.0) * (s * x.atan()).sin() * gamma(s))
}

/// Pure dephasing dissipator `rate·(σz ρ σz − ρ)` of one door.
pub fn dephasing_dissipator(rho: &DensityMatrix, door: usize, rate: f64) -> Result<CMatrix> {
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(Error::Parameter(format!("dephasing rate must be non-negative, got {rate}")));
    }
    check_door(door, rho.sites())?;
    let dim = rho.dim();
    let mut out = CMatrix::zeros(dim, dim);
    dephasing_into(rho.matrix().as_slice(), out.as_mut_slice(), dim, site_bit(rho.sites(), door), rate, 1.0);
    Ok(out)
}

/// Compiled generator `ρ ↦ −i[H, ρ] + Σ_d r_d D_d(ρ)`.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    sites: usize,
    hamiltonian: CompiledOperator,
    noise: NoiseSpec,
    populations: (f64, f64),
}

impl Liouvillian {
    pub fn new(h: &OperatorSum, noise: &NoiseSpec) -> Result<Self> {
        if !h.is_hermitian() {
            return Err(Error::Contract("Hamiltonian is not Hermitian".into()));
        }
        noise.validate(h.sites())?;
        Ok(Self { sites: h.sites(), hamiltonian: h.compile(), noise: noise.clone(), populations: noise.populations() })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        1 << self.sites
    }

    pub fn noise(&self) -> &NoiseSpec {
        &self.noise
    }

    /// Writes the generator applied to `rho` into `out`; `scratch` is workspace.
    /// All three are column-major `dim × dim`. `rho` must be Hermitian.
    pub fn apply_into(
        &self,
        t: f64,
        rho: &[Complex64],
        scratch: &mut [Complex64],
        out: &mut [Complex64],
    ) -> Result<()> {
        self.hamiltonian.commutator_into(rho, scratch, out);
        self.dissipate_into(t, rho, out)
    }

    /// Adds only the dissipative part.
    pub fn dissipate_into(&self, t: f64, rho: &[Complex64], out: &mut [Complex64]) -> Result<()> {
        let dim = self.dim();
        match self.noise.kind {
            NoiseKind::None => {}
            NoiseKind::Lrqi => {
                let (p0, p1) = self.populations;
                for d in &self.noise.doors {
                    let bit = site_bit(self.sites, d.site);
                    lrqi_into(rho, out, dim, bit, self.noise.k, p0, p1, d.multiplicity as f64);
                }
            }
            NoiseKind::Dephasing => {
                let rate = dephasing_rate(t, self.noise.s, self.noise.omega_c)?;
                for d in &self.noise.doors {
                    let bit = site_bit(self.sites, d.site);
                    dephasing_into(rho, out, dim, bit, rate, d.multiplicity as f64);
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, t: f64, rho: &CMatrix) -> Result<CMatrix> {
        let (dim, _) = square_dim(rho)?;
        if dim != self.dim() {
            return Err(Error::Shape { expected: format!("{0}x{0}", self.dim()), found: format!("{dim}x{dim}") });
        }
        let mut scratch = CMatrix::zeros(dim, dim);
        let mut out = CMatrix::zeros(dim, dim);
        self.apply_into(t, rho.as_slice(), scratch.as_mut_slice(), out.as_mut_slice())?;
        Ok(out)
    }
}

/// `−i[H, ρ] + Σ_d r_d D_d(ρ)` evaluated at time `t`.
pub fn liouvillian(rho: &DensityMatrix, t: f64, h: &OperatorSum, noise: &NoiseSpec) -> Result<CMatrix> {
    if h.sites() != rho.sites() {
        return Err(Error::Shape {
            expected: format!("{}-site Hamiltonian", rho.sites()),
            found: format!("{}-site Hamiltonian", h.sites()),
        });
    }
    if !(t >= 0.0) {
        return Err(Error::Parameter(format!("time must be non-negative, got {t}")));
    }
    Liouvillian::new(h, noise)?.apply(t, rho.matrix())
}

/// Largest system register accepted by [`CollisionModel`].
pub const COLLISION_MAX_SITES: usize = 7;

/// Explicit repeated-interaction simulation of one door coupled to a stream of
/// fresh bath qubits prepared in `diag(p0, p1)`.
///
/// Each collision evolves system ⊗ bath for `delta_t` under
/// `H_S ⊗ I + I ⊗ B σz_E + √(k/δt)(σx_d σx_E + σy_d σy_E)` and traces the bath out.
#[derive(Debug, Clone)]
pub struct CollisionModel {
    pub door: usize,
    pub k: f64,
    pub beta_e_b: f64,
    /// Bath level splitting `B` (only `Bβ_E` enters the continuum limit).
    pub bath_field: f64,
    pub delta_t: f64,
}

impl CollisionModel {
    pub fn new(door: usize, k: f64, beta_e_b: f64, delta_t: f64) -> Self {
        Self { door, k, beta_e_b, bath_field: 1.0, delta_t }
    }

    /// One-collision unitary on the `(L+1)`-qubit register, bath as the last qubit.
    pub fn collision_unitary(&self, h_s: &OperatorSum) -> Result<CMatrix> {
        let sites = h_s.sites();
        if sites > COLLISION_MAX_SITES {
            return Err(Error::Resource(format!(
                "collision model supports at most {COLLISION_MAX_SITES} system sites, got {sites}"
            )));
        }
        check_door(self.door, sites)?;
        if !(self.delta_t > 0.0) {
            return Err(Error::Parameter(format!("delta_t must be positive, got {}", self.delta_t)));
        }
        if !(self.k >= 0.0) {
            return Err(Error::Parameter(format!("k must be non-negative, got {}", self.k)));
        }
        let total = sites + 1;
        let mut h = OperatorSum::new(total);
        for t in h_s.terms() {
            h.push(PauliString::new(t.factors(), t.coefficient(), total)?)?;
        }
        let env = total;
        h.add(&[(env, Axis::Z)], self.bath_field)?;
        let g = (self.k / self.delta_t).sqrt();
        h.add(&[(self.door, Axis::X), (env, Axis::X)], g)?;
        h.add(&[(self.door, Axis::Y), (env, Axis::Y)], g)?;
        let (vals, vecs) = linalg::eigh(&h.to_matrix());
        let dt = self.delta_t;
        Ok(linalg::spectral_apply(&vals, &vecs, |e| Complex64::from_polar(1.0, -e * dt)))
    }

    /// Runs `n_steps` collisions from `rho0` and returns the system state.
    pub fn run(&self, h_s: &OperatorSum, rho0: &DensityMatrix, n_steps: usize) -> Result<DensityMatrix> {
        if h_s.sites() != rho0.sites() {
            return Err(Error::Shape {
                expected: format!("{}-site Hamiltonian", rho0.sites()),
                found: format!("{}-site Hamiltonian", h_s.sites()),
            });
        }
        let u = self.collision_unitary(h_s)?;
        let u_dag = u.adjoint();
        let (p0, p1) = bath_populations(self.beta_e_b);
        let mut bath = CMatrix::zeros(2, 2);
        bath[(0, 0)] = Complex64::new(p0, 0.0);
        bath[(1, 1)] = Complex64::new(p1, 0.0);
        let dim = rho0.dim();
        let mut rho = rho0.matrix().clone();
        for _ in 0..n_steps {
            let joint = rho.kronecker(&bath);
            let evolved = &u * joint * &u_dag;
            rho = CMatrix::from_fn(dim, dim, |r, c| evolved[(2 * r, 2 * c)] + evolved[(2 * r + 1, 2 * c + 1)]);
        }
        linalg::hermitize(&mut rho);
        DensityMatrix::new(rho0.sites(), rho)
    }
}

/// Repeated-interaction evolution of `rho0` for `n_steps` collisions of length `delta_t`
/// (bath splitting `B = 1`).
pub fn collision_model_oracle(
    h_s: &OperatorSum,
    door: usize,
    k: f64,
    beta_e_b: f64,
    delta_t: f64,
    n_steps: usize,
    rho0: &DensityMatrix,
) -> Result<DensityMatrix> {
    CollisionModel::new(door, k, beta_e_b, delta_t).run(h_s, rho0, n_steps)
}
