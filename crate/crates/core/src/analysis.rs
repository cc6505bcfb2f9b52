//! Post-processing of LN trajectories: freezing terminals, cross-size
//! comparisons, parabolic fits of the terminal against the pair index,
//! Lieb-Robinson estimates and disorder averages.

use std::collections::BTreeMap;
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{IntegritySample, PairSeries, Trajectory};

/// Initial LN at or below this value leaves freezing undefined.
pub const INITIAL_LN_FLOOR: f64 = 1e-9;
pub const DEFAULT_DELTA: f64 = 1e-5;
pub const DEFAULT_I_MIN: usize = 5;
/// Relative slack when rounding the inverted parabola up to a site index.
const CEIL_SLACK: f64 = 1e-9;

/// Largest sampled time `τ ≤ t_l` with `|v(t) − v(0)| ≤ delta` for every
/// sample up to `τ`. `None` when `v(0)` is not positive. `Some(0.0)` means the
/// first sample after `t = 0` already violates the bound.
pub fn freezing_terminal(times: &[f64], values: &[f64], delta: f64, t_l: f64) -> Result<Option<f64>> {
    if times.is_empty() || values.is_empty() {
        return Err(Error::Input("empty series".into()));
    }
    if times.len() != values.len() {
        return Err(Error::Input(format!("{} times but {} values", times.len(), values.len())));
    }
    if times[0].abs() > 1e-12 {
        return Err(Error::Input(format!("series must start at t = 0, starts at {}", times[0])));
    }
    if !(delta > 0.0) {
        return Err(Error::Parameter(format!("delta must be positive, got {delta}")));
    }
    let v0 = values[0];
    if v0 <= INITIAL_LN_FLOOR {
        return Ok(None);
    }
    let tau = times
        .iter()
        .zip(values)
        .take_while(|(t, v)| **t <= t_l && (**v - v0).abs() <= delta)
        .last()
        .map_or(0.0, |(t, _)| *t);
    Ok(Some(tau))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairFreeze {
    pub i: usize,
    pub j: usize,
    pub initial_ln: f64,
    pub tau_f: Option<f64>,
    pub frozen: bool,
    /// The bound still held at the last sample, so `tau_f` is limited by the
    /// recorded window rather than by the dynamics.
    pub censored: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreezeReport {
    pub sites: usize,
    pub delta: f64,
    pub t_l: f64,
    /// Spacing of the sampling grid.
    pub grid: f64,
    pub doors: Vec<usize>,
    pub pairs: Vec<PairFreeze>,
}

impl FreezeReport {
    pub fn from_trajectory(traj: &Trajectory, delta: f64, t_l: f64) -> Result<Self> {
        traj.validate()?;
        let mut pairs = Vec::with_capacity(traj.pair_ln.len());
        for p in &traj.pair_ln {
            let tau_f = freezing_terminal(&traj.times, &p.values, delta, t_l)?;
            let last = traj.times.iter().rposition(|t| *t <= t_l).unwrap_or(0);
            let censored = tau_f.is_some_and(|tau| tau >= traj.times[last] && last > 0);
            pairs.push(PairFreeze {
                i: p.i,
                j: p.j,
                initial_ln: p.values[0],
                tau_f,
                frozen: tau_f.is_some_and(|tau| tau > 0.0),
                censored,
            });
        }
        let meta = &traj.metadata;
        Ok(Self {
            sites: meta.chain.sites,
            delta,
            t_l,
            grid: meta.dt * meta.stride as f64,
            doors: meta.noise.door_sites(),
            pairs,
        })
    }

    pub fn pair(&self, i: usize, j: usize) -> Option<&PairFreeze> {
        self.pairs.iter().find(|p| p.i == i && p.j == j)
    }

    /// `tau_f` of the nearest-neighbor pair `(i, i + 1)`.
    pub fn nn_tau(&self, i: usize) -> Option<f64> {
        self.pair(i, i + 1).and_then(|p| p.tau_f)
    }

    /// Rows `L,i,tau_F,frozen,initial_ln` for the nearest-neighbor pairs.
    pub fn write_csv_rows<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for p in self.pairs.iter().filter(|p| p.j == p.i + 1) {
            let tau = p.tau_f.map(|t| format!("{t:.16e}")).unwrap_or_default();
            writeln!(w, "{},{},{tau},{},{:.16e}", self.sites, p.i, p.frozen, p.initial_ln)?;
        }
        Ok(())
    }

    pub fn csv_header() -> &'static str {
        "L,i,tau_F,frozen,initial_ln"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreezeFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// OLS standard errors of `(a, b, c)`; absent when the fit has no residual
    /// degrees of freedom.
    pub std_errors: Option<[f64; 3]>,
    pub domain: Vec<f64>,
    pub residual_sum_squares: f64,
}

impl FreezeFit {
    pub fn from_coefficients(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c, std_errors: None, domain: Vec::new(), residual_sum_squares: 0.0 }
    }

    pub fn eval(&self, i: f64) -> f64 {
        (self.a * i + self.b) * i + self.c
    }
}

/// Ordinary least-squares fit of `τ = a·i² + b·i + c` over the points with `i ≥ i_min`.
pub fn fit_freeze_parabola(points: &[(f64, f64)], i_min: f64) -> Result<FreezeFit> {
    let used: Vec<(f64, f64)> = points.iter().copied().filter(|(i, _)| *i >= i_min).collect();
    let mut distinct: Vec<f64> = used.iter().map(|p| p.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 distinct i ≥ {i_min}, got {}", distinct.len())));
    }
    if used.iter().any(|(i, t)| !i.is_finite() || !t.is_finite()) {
        return Err(Error::Fit("non-finite point".into()));
    }
    let n = used.len();
    let x = DMatrix::from_fn(n, 3, |r, c| used[r].0.powi(2 - c as i32));
    let y = DVector::from_iterator(n, used.iter().map(|p| p.1));
    let xtx = x.transpose() * &x;
    let inv = xtx.try_inverse().ok_or_else(|| Error::Fit("singular design matrix".into()))?;
    let coef = x.clone().svd(true, true).solve(&y, 1e-14).map_err(|e| Error::Fit(e.to_string()))?;
    let resid = &y - &x * &coef;
    let rss = resid.norm_squared();
    let std_errors = (n > 3).then(|| {
        let s2 = rss / (n - 3) as f64;
        [(s2 * inv[(0, 0)]).sqrt(), (s2 * inv[(1, 1)]).sqrt(), (s2 * inv[(2, 2)]).sqrt()]
    });
    Ok(FreezeFit { a: coef[0], b: coef[1], c: coef[2], std_errors, domain: distinct, residual_sum_squares: rss })
}

/// Smallest chain length `L_m = ⌈i_m⌉ + 1` whose pair `(i_m, i_m + 1)` stays
/// frozen for `tau_required`, where `i_m` is the larger root of the fit.
pub fn minimum_chain_length(tau_required: f64, fit: &FreezeFit) -> Result<usize> {
    if !(fit.a > 0.0) {
        return Err(Error::Infeasible(format!("fit curvature must be positive, got a = {}", fit.a)));
    }
    let disc = fit.b * fit.b - 4.0 * fit.a * (fit.c - tau_required);
    if !(disc >= 0.0) {
        return Err(Error::Infeasible(format!("τ = {tau_required} is below the minimum of the fitted parabola")));
    }
    let i_m = ((-fit.b + disc.sqrt()) / (2.0 * fit.a)).max(2.0);
    Ok((i_m - CEIL_SLACK).ceil() as usize + 1)
}

/// `|i − 2| / v`.
pub fn lr_freezing_bound(i: usize, v: f64) -> Result<f64> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Parameter(format!("velocity must be positive, got {v}")));
    }
    Ok((i as f64 - 2.0).abs() / v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Invariant,
    NonInvariant,
    Undefined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairVerdict {
    pub i: usize,
    pub j: usize,
    pub verdict: Verdict,
    /// `max − min` of the terminal across sizes, when defined.
    pub spread: Option<f64>,
    pub taus: Vec<(usize, f64)>,
}

/// Per-pair verdict on whether the freezing terminal of `(i, i + 1)` is the
/// same for every supplied chain length.
pub fn scale_invariance_report(reports: &BTreeMap<usize, FreezeReport>, tolerance: f64) -> Result<Vec<PairVerdict>> {
    if reports.len() < 2 {
        return Err(Error::Comparison(format!("need at least 2 system sizes, got {}", reports.len())));
    }
    let first = reports.values().next().expect("non-empty");
    for r in reports.values() {
        if r.delta != first.delta || (r.grid - first.grid).abs() > 1e-12 * first.grid.max(1.0) {
            return Err(Error::Comparison(format!(
                "reports differ in delta or grid (L = {}: δ = {}, grid = {}; L = {}: δ = {}, grid = {})",
                first.sites, first.delta, first.grid, r.sites, r.delta, r.grid
            )));
        }
    }
    if !(tolerance >= first.grid * (1.0 - 1e-9)) {
        return Err(Error::Parameter(format!("tolerance {tolerance} is finer than the grid {}", first.grid)));
    }
    let common: Vec<usize> = first
        .pairs
        .iter()
        .filter(|p| p.j == p.i + 1)
        .map(|p| p.i)
        .filter(|&i| reports.values().all(|r| r.pair(i, i + 1).is_some()))
        .collect();
    let mut out = Vec::with_capacity(common.len());
    for i in common {
        let near_door = reports.values().any(|r| r.doors.contains(&i) || r.doors.contains(&(i + 1)));
        let taus: Vec<(usize, Option<f64>)> = reports.iter().map(|(&l, r)| (l, r.nn_tau(i))).collect();
        let defined = !near_door && taus.iter().all(|(_, t)| t.is_some());
        let taus: Vec<(usize, f64)> = taus.into_iter().filter_map(|(l, t)| t.map(|t| (l, t))).collect();
        let (verdict, spread) = if defined {
            let max = taus.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
            let min = taus.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
            let spread = max - min;
            let v = if spread <= tolerance { Verdict::Invariant } else { Verdict::NonInvariant };
            (v, Some(spread))
        } else {
            (Verdict::Undefined, None)
        };
        out.push(PairVerdict { i, j: i + 1, verdict, spread, taus });
    }
    Ok(out)
}

/// Pointwise mean over realizations of every pair series.
pub fn quenched_average(trajectories: &[Trajectory]) -> Result<Trajectory> {
    let first = trajectories.first().ok_or_else(|| Error::Input("no trajectories to average".into()))?;
    let pairs = first.pairs();
    for t in trajectories {
        if t.times != first.times {
            return Err(Error::Comparison("trajectories do not share a time grid".into()));
        }
        if t.pairs() != pairs {
            return Err(Error::Comparison("trajectories do not share a pair set".into()));
        }
        t.validate()?;
    }
    let with_corr = trajectories.iter().all(|t| t.correlations.is_some());
    let mut avg = first.clone();
    avg.correlations = if with_corr { first.correlations.clone() } else { None };
    let mut realizations = first.metadata.realizations;
    for (k, t) in trajectories.iter().enumerate().skip(1) {
        let w = 1.0 / (k + 1) as f64;
        fold_mean(&mut avg.pair_ln, &t.pair_ln, w);
        if let (Some(acc), Some(next)) = (avg.correlations.as_mut(), t.correlations.as_ref()) {
            fold_mean(acc, next, w);
        }
        avg.integrity = avg.integrity.iter().zip(&t.integrity).map(|(a, b)| worst(a, b)).collect();
        realizations += t.metadata.realizations;
    }
    avg.metadata.realizations = realizations;
    Ok(avg)
}

fn fold_mean(acc: &mut [PairSeries], next: &[PairSeries], w: f64) {
    for (a, b) in acc.iter_mut().zip(next) {
        for (m, x) in a.values.iter_mut().zip(&b.values) {
            *m += (x - *m) * w;
        }
    }
}

fn worst(a: &IntegritySample, b: &IntegritySample) -> IntegritySample {
    let positive = match (a.positive_within_tolerance, b.positive_within_tolerance) {
        (Some(x), Some(y)) => Some(x && y),
        (x, None) => x,
        (None, y) => y,
    };
    IntegritySample {
        trace_error: a.trace_error.max(b.trace_error),
        max_hermiticity_drift: a.max_hermiticity_drift.max(b.max_hermiticity_drift),
        positive_within_tolerance: positive,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hierarchy {
    pub holds: bool,
    /// First `(j, i)` with `j < i` and `τ(j, j+1) > τ(i, i+1)`.
    pub violation: Option<(usize, usize)>,
}

/// Checks that `τ(i, i+1)` is non-decreasing over `i = 2..L−1`.
pub fn hierarchy_check(report: &FreezeReport) -> Result<Hierarchy> {
    if report.sites < 3 {
        return Err(Error::Input(format!("hierarchy needs L ≥ 3, got {}", report.sites)));
    }
    let mut taus = Vec::with_capacity(report.sites);
    for i in 2..report.sites {
        let p = report.pair(i, i + 1).ok_or_else(|| Error::Input(format!("report lacks pair ({i}, {})", i + 1)))?;
        let tau = p.tau_f.ok_or_else(|| Error::Input(format!("freezing undefined for pair ({i}, {})", i + 1)))?;
        taus.push((i, tau));
    }
    let violation = taus.windows(2).find(|w| w[1].1 < w[0].1).map(|w| (w[0].0, w[1].0));
    Ok(Hierarchy { holds: violation.is_none(), violation })
}
