//! Thermal initial states and fixed-step RK4 integration of the master equation.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analysis::INITIAL_LN_FLOOR;
use crate::entanglement::{pair_correlation, pair_log_negativity};
use crate::error::{Error, Result};
use crate::linalg;
use crate::models::{build_hamiltonian, ChainSpec};
use crate::open_system::{Liouvillian, NoiseSpec};
use crate::pauli::{CMatrix, OperatorSum};
use crate::state::{DensityMatrix, HERMITICITY_TOL, POSITIVITY_TOL, TRACE_TOL};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `e^{−βH}/tr e^{−βH}` from a full eigendecomposition, with energies shifted
/// by the ground-state energy.
pub fn thermal_state(h: &OperatorSum, beta: f64) -> Result<DensityMatrix> {
    if !h.is_hermitian() {
        return Err(Error::Contract("Hamiltonian is not Hermitian".into()));
    }
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::Parameter(format!("inverse temperature must be finite and non-negative, got {beta}")));
    }
    let sites = h.sites();
    if beta == 0.0 {
        return Ok(DensityMatrix::maximally_mixed(sites));
    }
    let (vals, vecs) = linalg::eigh(&h.to_matrix());
    let e0 = vals[0];
    let z: f64 = vals.iter().map(|e| (-beta * (e - e0)).exp()).sum();
    let mut m = linalg::spectral_apply_real(&vals, &vecs, |e| (-beta * (e - e0)).exp() / z);
    linalg::hermitize(&mut m);
    let mut rho = DensityMatrix::from_matrix_unchecked(sites, m)?;
    rho.check_cheap()?;
    Ok(rho)
}

fn axpy(y: &mut [Complex64], a: f64, x: &[Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += xi * a;
    }
}

fn set_axpy(out: &mut [Complex64], base: &[Complex64], a: f64, x: &[Complex64]) {
    for ((o, b), xi) in out.iter_mut().zip(base).zip(x) {
        *o = b + xi * a;
    }
}

fn post_step(rho: &mut DensityMatrix, t: f64) -> Result<f64> {
    let drift = linalg::hermiticity_error(rho.matrix());
    rho.check_cheap().map_err(|e| Error::NumericalIntegrity(format!("at t = {t}: {e}")))?;
    Ok(drift)
}

/// One classical RK4 step with a generic right-hand side `rhs(t, ρ)`.
pub fn rk4_step<F>(rho: &DensityMatrix, t: f64, dt: f64, mut rhs: F) -> Result<DensityMatrix>
where
    F: FnMut(f64, &CMatrix) -> Result<CMatrix>,
{
    if !(dt > 0.0) {
        return Err(Error::Parameter(format!("time step must be positive, got {dt}")));
    }
    let y = rho.matrix();
    let k1 = rhs(t, y)?;
    let k2 = rhs(t + dt / 2.0, &(y + &k1 * Complex64::from(dt / 2.0)))?;
    let k3 = rhs(t + dt / 2.0, &(y + &k2 * Complex64::from(dt / 2.0)))?;
    let k4 = rhs(t + dt, &(y + &k3 * Complex64::from(dt)))?;
    let incr = (k1 + k2 * Complex64::from(2.0) + k3 * Complex64::from(2.0) + k4) * Complex64::from(dt / 6.0);
    let mut next = DensityMatrix::from_matrix_unchecked(rho.sites(), y + incr)?;
    post_step(&mut next, t + dt)?;
    Ok(next)
}

/// RK4 integrator bound to one generator, reusing its stage buffers.
#[derive(Debug)]
pub struct Integrator {
    generator: Liouvillian,
    acc: Vec<Complex64>,
    stage: Vec<Complex64>,
    slope: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Integrator {
    pub fn new(generator: Liouvillian) -> Self {
        let n = generator.dim() * generator.dim();
        Self { generator, acc: vec![ZERO; n], stage: vec![ZERO; n], slope: vec![ZERO; n], scratch: vec![ZERO; n] }
    }

    pub fn generator(&self) -> &Liouvillian {
        &self.generator
    }

    /// Advances `rho` from `t` to `t + dt` in place and returns the Hermiticity
    /// drift seen before re-symmetrization.
    pub fn step(&mut self, rho: &mut DensityMatrix, t: f64, dt: f64) -> Result<f64> {
        if !(dt > 0.0) {
            return Err(Error::Parameter(format!("time step must be positive, got {dt}")));
        }
        if rho.dim() != self.generator.dim() {
            return Err(Error::Shape {
                expected: format!("{0}x{0}", self.generator.dim()),
                found: format!("{0}x{0}", rho.dim()),
            });
        }
        let g = &self.generator;
        let y = rho.matrix().as_slice();
        self.acc.copy_from_slice(y);

        g.apply_into(t, y, &mut self.scratch, &mut self.slope)?;
        axpy(&mut self.acc, dt / 6.0, &self.slope);
        set_axpy(&mut self.stage, y, dt / 2.0, &self.slope);

        g.apply_into(t + dt / 2.0, &self.stage, &mut self.scratch, &mut self.slope)?;
        axpy(&mut self.acc, dt / 3.0, &self.slope);
        set_axpy(&mut self.stage, y, dt / 2.0, &self.slope);

        g.apply_into(t + dt / 2.0, &self.stage, &mut self.scratch, &mut self.slope)?;
        axpy(&mut self.acc, dt / 3.0, &self.slope);
        set_axpy(&mut self.stage, y, dt, &self.slope);

        g.apply_into(t + dt, &self.stage, &mut self.scratch, &mut self.slope)?;
        axpy(&mut self.acc, dt / 6.0, &self.slope);

        let sites = rho.sites();
        let next = CMatrix::from_column_slice(rho.dim(), rho.dim(), &self.acc);
        *rho = DensityMatrix::from_matrix_unchecked(sites, next)?;
        post_step(rho, t + dt)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSeries {
    pub i: usize,
    pub j: usize,
    pub values: Vec<f64>,
}

/// Integrity figures at a recorded sample. `max_hermiticity_drift` is the
/// largest pre-symmetrization drift over the steps since the previous sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegritySample {
    pub trace_error: f64,
    pub max_hermiticity_drift: f64,
    /// `None` when positivity was not checked at this sample.
    pub positive_within_tolerance: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMetadata {
    pub chain: ChainSpec,
    pub noise: NoiseSpec,
    pub beta_s_j: f64,
    pub dt: f64,
    pub stride: usize,
    pub seed: Option<u64>,
    pub realizations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub pair_ln: Vec<PairSeries>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correlations: Option<Vec<PairSeries>>,
    #[serde(default)]
    pub integrity: Vec<IntegritySample>,
    pub metadata: TrajectoryMetadata,
}

impl Trajectory {
    pub fn series(&self, i: usize, j: usize) -> Option<&[f64]> {
        self.pair_ln.iter().find(|p| p.i == i && p.j == j).map(|p| p.values.as_slice())
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.pair_ln.iter().map(|p| (p.i, p.j)).collect()
    }

    /// Checks that every series matches the time grid and LN values are non-negative.
    pub fn validate(&self) -> Result<()> {
        let n = self.times.len();
        let all = self.pair_ln.iter().chain(self.correlations.iter().flatten());
        for p in all {
            if p.values.len() != n {
                return Err(Error::Input(format!(
                    "series for pair ({}, {}) has {} samples, time grid has {n}",
                    p.i,
                    p.j,
                    p.values.len()
                )));
            }
        }
        if let Some(p) = self.pair_ln.iter().find(|p| p.values.iter().any(|v| !(*v >= 0.0))) {
            return Err(Error::Input(format!("negative or NaN LN in pair ({}, {})", p.i, p.j)));
        }
        Ok(())
    }

    /// Long-format CSV with columns `t,pair_i,pair_j,ln_value`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,pair_i,pair_j,ln_value")?;
        for p in &self.pair_ln {
            for (t, v) in self.times.iter().zip(&p.values) {
                writeln!(w, "{t:.16e},{},{},{v:.16e}", p.i, p.j)?;
            }
        }
        Ok(())
    }

    pub fn write_json<W: Write>(&self, w: W) -> serde_json::Result<()> {
        serde_json::to_writer_pretty(w, self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let t: Self = serde_json::from_str(text).map_err(|e| Error::Input(format!("trajectory JSON: {e}")))?;
        t.validate()?;
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOptions {
    /// Record every `stride`-th step.
    pub stride: usize,
    pub record_correlations: bool,
    /// Positivity is checked at every `positivity_every`-th recorded sample and
    /// at the last one; 0 disables the check.
    pub positivity_every: usize,
    pub seed: Option<u64>,
    /// Stop early once every pair has moved more than this far from its
    /// initial LN (pairs starting without entanglement count as moved).
    pub stop_when_thawed: Option<f64>,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { stride: 1, record_correlations: false, positivity_every: 10, seed: None, stop_when_thawed: None }
    }
}

/// Number of `dt` steps needed to reach `t_end`.
pub fn step_count(dt: f64, t_end: f64) -> usize {
    (t_end / dt - 1e-9).ceil().max(0.0) as usize
}

/// Evolves the thermal state of `spec` at inverse temperature `beta_s_j` under
/// `noise` up to `t_end`, recording pair observables on the grid `n·stride·dt`.
pub fn evolve_trajectory(
    spec: &ChainSpec,
    noise: &NoiseSpec,
    beta_s_j: f64,
    dt: f64,
    t_end: f64,
    pairs: &[(usize, usize)],
    options: &EvolveOptions,
) -> Result<Trajectory> {
    spec.validate()?;
    if !(dt > 0.0) || !(t_end > 0.0) {
        return Err(Error::Parameter(format!("dt and t_end must be positive, got dt = {dt}, t_end = {t_end}")));
    }
    if options.stride == 0 {
        return Err(Error::Parameter("stride must be at least 1".into()));
    }
    for &(i, j) in pairs {
        if i == 0 || j == 0 || i > spec.sites || j > spec.sites || i == j {
            return Err(Error::Input(format!("pair ({i}, {j}) is not a valid site pair for L = {}", spec.sites)));
        }
    }
    let h = build_hamiltonian(spec)?;
    let mut rho = thermal_state(&h, beta_s_j)?;
    let mut integrator = Integrator::new(Liouvillian::new(&h, noise)?);

    let n_steps = step_count(dt, t_end);
    let n_samples = n_steps / options.stride + 1;
    let mut traj = Trajectory {
        times: Vec::with_capacity(n_samples),
        pair_ln: pairs.iter().map(|&(i, j)| PairSeries { i, j, values: Vec::with_capacity(n_samples) }).collect(),
        correlations: options
            .record_correlations
            .then(|| pairs.iter().map(|&(i, j)| PairSeries { i, j, values: Vec::with_capacity(n_samples) }).collect()),
        integrity: Vec::with_capacity(n_samples),
        metadata: TrajectoryMetadata {
            chain: spec.clone(),
            noise: noise.clone(),
            beta_s_j,
            dt,
            stride: options.stride,
            seed: options.seed,
            realizations: 1,
        },
    };

    let mut drift = 0.0f64;
    let mut sample_index = 0usize;
    let mut thawed = vec![false; pairs.len()];
    for n in 0..=n_steps {
        if n > 0 {
            let t = (n - 1) as f64 * dt;
            drift = drift.max(integrator.step(&mut rho, t, dt)?);
        }
        if !n.is_multiple_of(options.stride) {
            continue;
        }
        let t = n as f64 * dt;
        let check_positive = options.positivity_every > 0 && sample_index.is_multiple_of(options.positivity_every);
        let positive = check_positive.then(|| rho.is_positive_within(POSITIVITY_TOL));
        if positive == Some(false) {
            return Err(Error::NumericalIntegrity(format!(
                "at t = {t}: state has an eigenvalue below -{POSITIVITY_TOL:e}"
            )));
        }
        traj.times.push(t);
        for p in &mut traj.pair_ln {
            let v = pair_log_negativity(&rho, p.i, p.j)
                .map_err(|e| Error::NumericalIntegrity(format!("at t = {t}: {e}")))?;
            p.values.push(v);
        }
        if let Some(corr) = traj.correlations.as_mut() {
            for p in corr {
                p.values.push(pair_correlation(&rho, p.i, p.j)?);
            }
        }
        traj.integrity.push(IntegritySample {
            trace_error: rho.integrity().trace_error,
            max_hermiticity_drift: drift,
            positive_within_tolerance: positive,
        });
        drift = 0.0;
        sample_index += 1;
        if let Some(delta) = options.stop_when_thawed {
            for (flag, p) in thawed.iter_mut().zip(&traj.pair_ln) {
                let v0 = p.values[0];
                let v = p.values[p.values.len() - 1];
                *flag |= v0 <= INITIAL_LN_FLOOR || (v - v0).abs() > delta;
            }
            if thawed.iter().all(|&f| f) {
                break;
            }
        }
    }
    if let Some(last) = traj.integrity.last_mut() {
        if options.positivity_every > 0 && last.positive_within_tolerance.is_none() {
            let ok = rho.is_positive_within(POSITIVITY_TOL);
            if !ok {
                let t = traj.times.last().copied().unwrap_or(0.0);
                return Err(Error::NumericalIntegrity(format!(
                    "at t = {t}: state has an eigenvalue below -{POSITIVITY_TOL:e}"
                )));
            }
            last.positive_within_tolerance = Some(true);
        }
    }
    Ok(traj)
}

/// Worst integrity figures over a trajectory, compared against the state tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegritySummary {
    pub max_trace_error: f64,
    pub max_hermiticity_drift: f64,
    pub positivity_checks: usize,
    pub positivity_failures: usize,
}

impl IntegritySummary {
    pub fn of(traj: &Trajectory) -> Self {
        let mut s =
            Self { max_trace_error: 0.0, max_hermiticity_drift: 0.0, positivity_checks: 0, positivity_failures: 0 };
        for x in &traj.integrity {
            s.max_trace_error = s.max_trace_error.max(x.trace_error);
            s.max_hermiticity_drift = s.max_hermiticity_drift.max(x.max_hermiticity_drift);
            if let Some(ok) = x.positive_within_tolerance {
                s.positivity_checks += 1;
                s.positivity_failures += usize::from(!ok);
            }
        }
        s
    }

    pub fn within_tolerances(&self) -> bool {
        self.max_trace_error <= TRACE_TOL
            && self.max_hermiticity_drift <= HERMITICITY_TOL
            && self.positivity_failures == 0
    }
}
