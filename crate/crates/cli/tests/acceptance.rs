//! Acceptance suite: one PASS/FAIL/SKIP line per criterion.
//!
//! Criteria marked extended (L = 11 sweeps, t = 10³) only run with
//! `ENTFREEZE_EXTENDED=1`; otherwise they print SKIP. The process exits
//! non-zero when any evaluated criterion fails.

use std::collections::BTreeMap;
use std::time::Instant;

use entfreeze::analysis::{fit_freeze_parabola, lr_freezing_bound, Verdict, INITIAL_LN_FLOOR};
use entfreeze::evolution::{Integrator, IntegritySummary};
use entfreeze::linalg::{eigh, max_abs_diff, spectral_apply};
use entfreeze::models::{build_hamiltonian, ChainSpec};
use entfreeze::open_system::{bath_populations, collision_model_oracle, Liouvillian, NoiseSpec};
use entfreeze::{DensityMatrix, OperatorSum};
use entfreeze_cli::config::{ExperimentConfig, PairSelection, ALL_NNN};
use entfreeze_cli::presets::{preset_experiment, PM_II};
use entfreeze_cli::runner::{run_experiment, AnalysisSummary, GroupAnalysis, SeriesKind};
use num_complex::Complex64;

const EXTENDED_ENV: &str = "ENTFREEZE_EXTENDED";

// 1: state integrity
const TRACE_TOL: f64 = 1e-8;
const HERMITICITY_TOL: f64 = 1e-10;
// positivity is the library's shifted Cholesky test at 1e-7
// 2: RK4 order
const RK4_RATIO: (f64, f64) = (12.0, 20.0);
// 3: LRQI populations
const LRQI_POP_TOL: f64 = 1e-6;
const LRQI_P0_APPROX: f64 = 2.061e-9;
// 4: collision model first order
const COLLISION_RATIO: (f64, f64) = (7.0, 13.0);
// 5, 6: pair (1,2) thaws by this time
const DOOR_PAIR_THAW_BY: f64 = 1.0;
// 8: cross-size agreement, in grid steps
const SCALE_GRID_STEPS: f64 = 2.0;
// 10: fitted curvature windows (centre, half-width)
const FIT_A_PM_I: (f64, f64) = (1.77e-2, 3.6e-3);
const FIT_A_PM_II: (f64, f64) = (2.41e-2, 4.5e-3);
// 11: door-count quadratic and pointwise tolerance
const DOOR_REF: (f64, f64, f64) = (0.033_571_4, -1.186_43, 7.28);
const DOOR_REL_TOL: f64 = 0.15;
const DOOR_MAX_COMPARED: usize = 8;
// 12: saturation of LN(1,2)
const SATURATION: (f64, f64) = (0.017, 0.005);
const SATURATION_T_END: f64 = 1000.0;
const SATURATION_WINDOW_SPREAD: f64 = 1e-3;
// 14: curvature significance
const CURVATURE_SIGMAS: f64 = 3.0;
const LR_LINEAR_TOL: f64 = 1e-12;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Pass,
    Fail,
    Skip,
}

struct Outcome {
    status: Status,
    detail: String,
}

impl Outcome {
    fn check(pass: bool, detail: impl Into<String>) -> Self {
        Self { status: if pass { Status::Pass } else { Status::Fail }, detail: detail.into() }
    }

    fn skip(detail: impl Into<String>) -> Self {
        Self { status: Status::Skip, detail: detail.into() }
    }

    fn fail(detail: impl Into<String>) -> Self {
        Self { status: Status::Fail, detail: detail.into() }
    }
}

/// Every run of the session, kept for the integrity criterion.
struct Session {
    root: tempfile::TempDir,
    integrity: Vec<(String, IntegritySummary, usize)>,
    failed_jobs: Vec<String>,
}

impl Session {
    fn run(&mut self, tag: &str, mut cfg: ExperimentConfig) -> Result<AnalysisSummary, String> {
        cfg.output_dir = self.root.path().join(tag);
        let start = Instant::now();
        let outcome = run_experiment(&cfg).map_err(|e| format!("{tag}: {e}"))?;
        eprintln!("  ran {tag} in {:.1} s", start.elapsed().as_secs_f64());
        for g in &outcome.summary.groups {
            let label = format!("{tag}/L{}{}", g.sites, g.door_count.map(|n| format!("_nd{n}")).unwrap_or_default());
            self.integrity.push((label, g.integrity, cfg.positivity_every));
        }
        self.failed_jobs.extend(
            outcome
                .manifest
                .jobs
                .iter()
                .filter(|j| !j.ok)
                .map(|j| format!("{tag}/{}: {}", j.label, j.error.clone().unwrap_or_default())),
        );
        if outcome.manifest.failed_jobs.is_empty() {
            Ok(outcome.summary)
        } else {
            Err(format!("{tag}: failed jobs {:?}", outcome.manifest.failed_jobs))
        }
    }
}

fn preset(name: &str, extended: bool) -> ExperimentConfig {
    let mut cfg = preset_experiment(name, extended).expect("known preset");
    // every recorded sample gets the eigenvalue check at desk scale
    if cfg.sizes().iter().all(|&l| l <= 8) {
        cfg.positivity_every = 1;
    }
    cfg
}

fn group(summary: &AnalysisSummary, sites: usize) -> Result<&GroupAnalysis, String> {
    summary.group(sites, None, SeriesKind::Ordered).ok_or_else(|| format!("no analysis for L = {sites}"))
}

fn fmt_tau(t: Option<f64>) -> String {
    t.map(|t| format!("{t:.2}")).unwrap_or_else(|| "undef".into())
}

fn nn_taus(g: &GroupAnalysis) -> String {
    (1..g.sites).map(|i| fmt_tau(g.report.nn_tau(i))).collect::<Vec<_>>().join(", ")
}

fn criterion_2() -> Outcome {
    let h = build_hamiltonian(&ChainSpec::atxy(4, PM_II.0, PM_II.1, PM_II.2)).expect("valid chain");
    let plus = Complex64::new(0.25, 0.0);
    let rho0 = DensityMatrix::from_pure(4, &[plus; 16]).expect("normalized");
    let (vals, vecs) = eigh(&h.to_matrix());
    let u = spectral_apply(&vals, &vecs, |e| Complex64::new(0.0, -e).exp());
    let exact = &u * rho0.matrix() * u.adjoint();
    let generator = Liouvillian::new(&h, &NoiseSpec::none()).expect("closed generator");
    let err = |dt: f64| -> Result<f64, entfreeze::Error> {
        let mut rho = rho0.clone();
        let mut it = Integrator::new(generator.clone());
        let n = (1.0 / dt).round() as usize;
        for k in 0..n {
            it.step(&mut rho, k as f64 * dt, dt)?;
        }
        Ok(max_abs_diff(rho.matrix(), &exact))
    };
    match (err(0.02), err(0.01)) {
        (Ok(e1), Ok(e2)) => {
            let ratio = e1 / e2;
            Outcome::check(
                (RK4_RATIO.0..=RK4_RATIO.1).contains(&ratio),
                format!("err(0.02) = {e1:.3e}, err(0.01) = {e2:.3e}, ratio {ratio:.2}"),
            )
        }
        (Err(e), _) | (_, Err(e)) => Outcome::fail(e.to_string()),
    }
}

fn criterion_3() -> Outcome {
    let h = OperatorSum::new(1);
    let noise = NoiseSpec::lrqi(vec![entfreeze::open_system::Door::single(1)], 1.0, 10.0);
    let (p0, p1) = bath_populations(10.0);
    let mut rho = DensityMatrix::basis_state(1, 0).expect("basis state");
    let mut it = Integrator::new(Liouvillian::new(&h, &noise).expect("generator"));
    let dt = 0.01;
    for k in 0..1000 {
        if let Err(e) = it.step(&mut rho, k as f64 * dt, dt) {
            return Outcome::fail(e.to_string());
        }
    }
    let up = rho.matrix()[(0, 0)].re;
    let down = rho.matrix()[(1, 1)].re;
    let dev = (up - p0).abs().max((down - p1).abs());
    let p0_close = (p0 - LRQI_P0_APPROX).abs() < 1e-12;
    Outcome::check(
        dev <= LRQI_POP_TOL && p0_close,
        format!("p0 = {p0:.6e}, populations at t = 10: ({up:.6e}, {down:.12}), max deviation {dev:.2e}"),
    )
}

fn criterion_4() -> Outcome {
    let h = OperatorSum::new(1);
    let up = DensityMatrix::basis_state(1, 0).expect("basis state");
    let (p0, _) = bath_populations(10.0);
    let t: f64 = 2.0;
    let exact = p0 + (1.0 - p0) * (-4.0 * t).exp();
    let err = |dt: f64| -> Result<f64, entfreeze::Error> {
        let n = (t / dt).round() as usize;
        let rho = collision_model_oracle(&h, 1, 1.0, 10.0, dt, n, &up)?;
        Ok((rho.matrix()[(0, 0)].re - exact).abs())
    };
    match (err(1e-2), err(1e-3)) {
        (Ok(e2), Ok(e3)) => {
            let ratio = e2 / e3;
            Outcome::check(
                (COLLISION_RATIO.0..=COLLISION_RATIO.1).contains(&ratio),
                format!("population error at t = {t}: {e2:.3e} (δt = 1e-2), {e3:.3e} (δt = 1e-3), ratio {ratio:.2}"),
            )
        }
        (Err(e), _) | (_, Err(e)) => Outcome::fail(e.to_string()),
    }
}

/// Pairs `i ≥ 2` freeze for a nonzero interval and `(1, 2)` thaws early.
fn door_pattern(g: &GroupAnalysis, grid: f64, strict_door_pair: bool) -> Outcome {
    let inner_frozen = (2..g.sites).all(|i| g.report.nn_tau(i).is_some_and(|t| t >= grid));
    let door_tau = g.report.nn_tau(1);
    let door_ok = if strict_door_pair {
        door_tau.is_some_and(|t| t <= DOOR_PAIR_THAW_BY)
    } else {
        door_tau.is_some_and(|t| t < grid)
    };
    Outcome::check(inner_frozen && door_ok, format!("tau_F(i,i+1), i = 1..{}: [{}]", g.sites - 1, nn_taus(g)))
}

fn criterion_5_13(session: &mut Session) -> (Outcome, Outcome) {
    let mut cfg = preset("fig2a", false);
    cfg.pairs = PairSelection::Named(ALL_NNN.into());
    let summary = match session.run("fig2a", cfg) {
        Ok(s) => s,
        Err(e) => return (Outcome::fail(e.clone()), Outcome::fail(e)),
    };
    let g = match group(&summary, 8) {
        Ok(g) => g,
        Err(e) => return (Outcome::fail(e.clone()), Outcome::fail(e)),
    };
    let c5 = door_pattern(g, g.report.grid, true);

    let l = g.sites;
    let entangled: Vec<usize> =
        (1..=l - 2).filter(|&i| g.report.pair(i, i + 2).is_some_and(|p| p.initial_ln > INITIAL_LN_FLOOR)).collect();
    let far = g.report.pair(l - 2, l).and_then(|p| p.tau_f);
    let (a, b) = (g.report.nn_tau(l - 2), g.report.nn_tau(l - 1));
    let between = match (far, a, b) {
        (Some(t), Some(a), Some(b)) => t > a.min(b) && t < a.max(b),
        _ => false,
    };
    let lns: Vec<String> = (1..=l - 2)
        .map(|i| format!("{:.1e}", g.report.pair(i, i + 2).map(|p| p.initial_ln).unwrap_or(f64::NAN)))
        .collect();
    let c13 = Outcome::check(
        entangled == vec![1, l - 2] && between,
        format!(
            "LN0(i,i+2) = [{}]; tau_F({},{}) = {}, tau_F({},{}) = {}, tau_F({},{}) = {}",
            lns.join(", "),
            l - 2,
            l,
            fmt_tau(far),
            l - 2,
            l - 1,
            fmt_tau(a),
            l - 1,
            l,
            fmt_tau(b)
        ),
    );
    (c5, c13)
}

fn criterion_6(session: &mut Session) -> Outcome {
    match session
        .run("fig2b", preset("fig2b", false))
        .and_then(|s| group(&s, 8).map(|g| door_pattern(g, g.report.grid, false)))
    {
        Ok(o) => o,
        Err(e) => Outcome::fail(e),
    }
}

fn criterion_7(session: &mut Session) -> Outcome {
    let afm = match session.run("fig2c", preset("fig2c", false)) {
        Ok(s) => s,
        Err(e) => return Outcome::fail(e),
    };
    let mut fm_cfg = preset("fig2c", false);
    fm_cfg.chain.delta = -1.5;
    fm_cfg.t_end = 1.0;
    let fm = match session.run("fig2c_fm", fm_cfg) {
        Ok(s) => s,
        Err(e) => return Outcome::fail(e),
    };
    let (g_afm, g_fm) = match (group(&afm, 8), group(&fm, 8)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Outcome::fail(e),
    };
    let afm_frozen = (2..8).all(|i| g_afm.report.nn_tau(i).is_some_and(|t| t >= g_afm.report.grid));
    let fm_max_ln = g_fm.report.pairs.iter().map(|p| p.initial_ln).fold(0.0, f64::max);
    let fm_undefined = g_fm.report.pairs.iter().all(|p| p.tau_f.is_none());
    Outcome::check(
        afm_frozen && fm_max_ln <= INITIAL_LN_FLOOR && fm_undefined,
        format!(
            "Δ = 1.5 tau_F: [{}]; Δ = −1.5 max LN0 = {fm_max_ln:.1e}, all undefined: {fm_undefined}",
            nn_taus(g_afm)
        ),
    )
}

/// Hierarchy at each size and cross-size agreement of the terminals away from the door.
fn scale_study(summary: &AnalysisSummary, sizes: &[usize], grid: f64) -> (bool, String) {
    let mut ok = true;
    let mut notes = Vec::new();
    for &l in sizes {
        match group(summary, l) {
            Ok(g) => {
                let holds = g.hierarchy.as_ref().is_some_and(|h| h.holds);
                ok &= holds;
                notes.push(format!("L={l} hierarchy {}", if holds { "holds" } else { "fails" }));
            }
            Err(e) => {
                ok = false;
                notes.push(e);
            }
        }
    }
    let tol = SCALE_GRID_STEPS * grid;
    match summary.scale_invariance.iter().find(|s| s.door_count.is_none() && s.kind == SeriesKind::Ordered) {
        Some(study) => {
            for v in study.verdicts.iter().filter(|v| v.i >= 2) {
                let spread = v.spread.map(|s| format!("{s:.2}")).unwrap_or_else(|| "-".into());
                let pass = v.verdict == Verdict::Invariant && v.spread.is_some_and(|s| s <= tol + 1e-9);
                if !pass {
                    ok = false;
                    notes.push(format!("({},{}) {:?} spread {spread}", v.i, v.j, v.verdict));
                }
            }
            notes.push(format!(
                "{} common pairs compared at tolerance {tol:.2}",
                study.verdicts.iter().filter(|v| v.i >= 2).count()
            ));
        }
        None => {
            ok = false;
            notes.push("no cross-size comparison".into());
        }
    }
    (ok, notes.join("; "))
}

fn criterion_8(session: &mut Session, extended: bool) -> (Outcome, BTreeMap<&'static str, AnalysisSummary>) {
    let mut kept = BTreeMap::new();
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, phase) in [("fig3a", "PM-I"), ("fig3b", "PM-II")] {
        let cfg = preset(name, extended);
        let sizes = cfg.sizes();
        let grid = cfg.grid();
        match session.run(name, cfg) {
            Ok(summary) => {
                let (pass, note) = scale_study(&summary, &sizes, grid);
                ok &= pass;
                notes.push(format!("{phase}: {note}"));
                kept.insert(name, summary);
            }
            Err(e) => {
                ok = false;
                notes.push(e);
            }
        }
    }
    let sizes = if extended { "6..=11" } else { "6..=8" };
    (Outcome::check(ok, format!("L in {sizes}; {}", notes.join(" | "))), kept)
}

fn criterion_9(session: &mut Session) -> Outcome {
    let summary = match session.run("fig3c", preset("fig3c", false)) {
        Ok(s) => s,
        Err(e) => return Outcome::fail(e),
    };
    match group(&summary, 8) {
        Ok(g) => {
            let h = g.hierarchy.as_ref();
            let violation = h.and_then(|h| h.violation);
            let consistent = g.report.nn_tau(5).zip(g.report.nn_tau(6)).is_some_and(|(a, b)| a > b);
            Outcome::check(
                h.is_some_and(|h| !h.holds) && violation == Some((5, 6)) && consistent,
                format!("tau_F: [{}]; violation {violation:?}", nn_taus(g)),
            )
        }
        Err(e) => Outcome::fail(e),
    }
}

fn l11_fit(summary: Option<&AnalysisSummary>) -> Result<entfreeze::analysis::FreezeFit, String> {
    let g = group(summary.ok_or("L = 11 sweep did not run")?, 11)?;
    let points: Vec<(f64, f64)> = (1..11).filter_map(|i| g.report.nn_tau(i).map(|t| (i as f64, t))).collect();
    fit_freeze_parabola(&points, entfreeze::analysis::DEFAULT_I_MIN as f64).map_err(|e| e.to_string())
}

fn criterion_10(sweeps: &BTreeMap<&'static str, AnalysisSummary>) -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, phase, (centre, half)) in [("fig3a", "PM-I", FIT_A_PM_I), ("fig3b", "PM-II", FIT_A_PM_II)] {
        match l11_fit(sweeps.get(name)) {
            Ok(fit) => {
                let pass = (fit.a - centre).abs() <= half;
                ok &= pass;
                notes.push(format!(
                    "{phase}: a = {:.4e} (b = {:.3}, c = {:.3}), window {centre:.3e} ± {half:.1e}",
                    fit.a, fit.b, fit.c
                ));
            }
            Err(e) => {
                ok = false;
                notes.push(format!("{phase}: {e}"));
            }
        }
    }
    Outcome::check(ok, notes.join("; "))
}

fn criterion_11(session: &mut Session) -> Outcome {
    let summary = match session.run("fig5", preset("fig5", true)) {
        Ok(s) => s,
        Err(e) => return Outcome::fail(e),
    };
    let mut all_doors = preset("fig5", true);
    all_doors.sweep.door_counts = vec![11];
    let everything = match session.run("fig5_all_doors", all_doors) {
        Ok(s) => s,
        Err(e) => return Outcome::fail(e),
    };
    let Some(sweep) = summary.door_sweeps.iter().find(|s| s.kind == SeriesKind::Ordered) else {
        return Outcome::fail("no door sweep in the analysis");
    };
    let Some(fit) = sweep.fit.as_ref() else {
        return Outcome::fail("door-count fit failed");
    };
    let reference = |n: f64| DOOR_REF.0 * n * n + DOOR_REF.1 * n + DOOR_REF.2;
    let mut ok = true;
    let mut points = Vec::new();
    for n in 1..=DOOR_MAX_COMPARED {
        let (got, want) = (fit.eval(n as f64), reference(n as f64));
        let pass = (got - want).abs() <= DOOR_REL_TOL * want.abs();
        ok &= pass;
        points.push(format!("{n}:{got:.2}/{want:.2}{}", if pass { "" } else { "!" }));
    }
    let tau_all =
        everything.group(11, Some(11), SeriesKind::Ordered).and_then(|g| g.report.pair(10, 11)).and_then(|p| p.tau_f);
    let vanishes = tau_all.is_some_and(|t| t < everything.groups[0].report.grid);
    let measured: Vec<String> = sweep.points.iter().map(|(n, t)| format!("{n}:{}", fmt_tau(*t))).collect();
    Outcome::check(
        ok && vanishes,
        format!(
            "measured tau_F(10,11) [{}]; fit {:.4}·N² {:+.4}·N {:+.3}; fit/ref [{}]; all 11 doors tau_F = {}",
            measured.join(", "),
            fit.a,
            fit.b,
            fit.c,
            points.join(", "),
            fmt_tau(tau_all)
        ),
    )
}

fn criterion_12(session: &mut Session) -> Outcome {
    let mut cfg = preset("fig2a", false);
    cfg.t_end = SATURATION_T_END;
    cfg.stride = 100;
    cfg.pairs = PairSelection::List(vec![[1, 2]]);
    let tag = "saturation";
    if let Err(e) = session.run(tag, cfg) {
        return Outcome::fail(e);
    }
    let path = session.root.path().join(tag).join("trajectories").join("L08_ordered.json");
    let traj = match std::fs::read_to_string(&path)
        .map_err(|e| e.to_string())
        .and_then(|s| entfreeze::evolution::Trajectory::from_json(&s).map_err(|e| e.to_string()))
    {
        Ok(t) => t,
        Err(e) => return Outcome::fail(e),
    };
    let Some(values) = traj.series(1, 2) else {
        return Outcome::fail("pair (1,2) not recorded");
    };
    let last = *values.last().expect("non-empty");
    let tail: Vec<f64> =
        traj.times.iter().zip(values).filter(|(t, _)| **t >= 0.9 * SATURATION_T_END).map(|(_, v)| *v).collect();
    let spread =
        tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - tail.iter().cloned().fold(f64::INFINITY, f64::min);
    Outcome::check(
        (last - SATURATION.0).abs() <= SATURATION.1 && spread <= SATURATION_WINDOW_SPREAD,
        format!("LN(1,2) at t = {SATURATION_T_END}: {last:.4e}; spread over last 10%: {spread:.1e}"),
    )
}

fn criterion_14(sweeps: Option<&BTreeMap<&'static str, AnalysisSummary>>) -> Outcome {
    let mut linear = true;
    for v in [0.25, 1.0, 2.0, 3.7] {
        let seq: Vec<f64> = (2..=11).map(|i| lr_freezing_bound(i, v).expect("v > 0")).collect();
        linear &= seq.windows(3).all(|w| (w[2] - 2.0 * w[1] + w[0]).abs() <= LR_LINEAR_TOL);
    }
    let Some(sweeps) = sweeps else {
        return Outcome::skip(format!("LR bound linear in i: {linear}; L = 11 curvature needs {EXTENDED_ENV}=1"));
    };
    let mut ok = linear;
    let mut notes = vec![format!("LR bound linear in i: {linear}")];
    for (name, phase) in [("fig3a", "PM-I"), ("fig3b", "PM-II")] {
        match l11_fit(sweeps.get(name)) {
            Ok(fit) => {
                let sigma = fit.std_errors.map(|s| s[0]);
                let pass = sigma.is_some_and(|s| fit.a > 0.0 && fit.a >= CURVATURE_SIGMAS * s);
                ok &= pass;
                notes.push(format!(
                    "{phase}: a = {:.4e}, σ_a = {}",
                    fit.a,
                    sigma.map(|s| format!("{s:.1e}")).unwrap_or("-".into())
                ));
            }
            Err(e) => {
                ok = false;
                notes.push(format!("{phase}: {e}"));
            }
        }
    }
    Outcome::check(ok, notes.join("; "))
}

fn criterion_1(session: &Session) -> Outcome {
    let mut worst_trace: f64 = 0.0;
    let mut worst_herm: f64 = 0.0;
    let mut checks = 0;
    let mut failures = 0;
    let mut strides: Vec<usize> = session.integrity.iter().map(|x| x.2).collect();
    strides.sort_unstable();
    strides.dedup();
    for (_, s, _) in &session.integrity {
        worst_trace = worst_trace.max(s.max_trace_error);
        worst_herm = worst_herm.max(s.max_hermiticity_drift);
        checks += s.positivity_checks;
        failures += s.positivity_failures;
    }
    let integrity_jobs: Vec<&String> = session.failed_jobs.iter().filter(|j| j.contains("integrity")).collect();
    Outcome::check(
        !session.integrity.is_empty()
            && worst_trace <= TRACE_TOL
            && worst_herm <= HERMITICITY_TOL
            && failures == 0
            && checks > 0
            && integrity_jobs.is_empty(),
        format!(
            "{} series: max |tr−1| = {worst_trace:.1e}, max Hermiticity drift = {worst_herm:.1e}, {checks} eigenvalue checks (every {strides:?} samples), {failures} failed, {} integrity job failures",
            session.integrity.len(),
            integrity_jobs.len()
        ),
    )
}

fn print(results: &BTreeMap<u8, Outcome>) -> bool {
    let mut any_fail = false;
    for (id, o) in results {
        let tag = match o.status {
            Status::Pass => "PASS",
            Status::Fail => {
                any_fail = true;
                "FAIL"
            }
            Status::Skip => "SKIP",
        };
        println!("criterion {id:>2}: {tag}  {}", o.detail);
    }
    any_fail
}

fn main() {
    let extended = std::env::var(EXTENDED_ENV).is_ok_and(|v| v == "1");
    let mut session = Session {
        root: tempfile::tempdir().expect("temporary directory"),
        integrity: Vec::new(),
        failed_jobs: Vec::new(),
    };
    let start = Instant::now();
    let mut results = BTreeMap::new();
    results.insert(2, criterion_2());
    results.insert(3, criterion_3());
    results.insert(4, criterion_4());
    let (c5, c13) = criterion_5_13(&mut session);
    results.insert(5, c5);
    results.insert(13, c13);
    results.insert(6, criterion_6(&mut session));
    results.insert(7, criterion_7(&mut session));
    let (c8, sweeps) = criterion_8(&mut session, extended);
    results.insert(8, c8);
    results.insert(9, criterion_9(&mut session));
    if extended {
        results.insert(10, criterion_10(&sweeps));
        results.insert(11, criterion_11(&mut session));
        results.insert(12, criterion_12(&mut session));
        results.insert(14, criterion_14(Some(&sweeps)));
    } else {
        let why = format!("extended; set {EXTENDED_ENV}=1");
        results.insert(10, Outcome::skip(why.clone()));
        results.insert(11, Outcome::skip(why.clone()));
        results.insert(12, Outcome::skip(why));
        results.insert(14, criterion_14(None));
    }
    results.insert(1, criterion_1(&session));

    let any_fail = print(&results);
    println!("acceptance finished in {:.0} s (extended: {extended})", start.elapsed().as_secs_f64());
    if any_fail {
        std::process::exit(1);
    }
}
