//! Job planning, parallel execution, analysis and artifact output.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use entfreeze::analysis::{
    fit_freeze_parabola, hierarchy_check, lr_freezing_bound, quenched_average, scale_invariance_report, FreezeFit,
    FreezeReport, Hierarchy, PairVerdict,
};
use entfreeze::evolution::{evolve_trajectory, EvolveOptions, IntegritySummary, Trajectory};
use entfreeze::models::sample_disorder;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::CliError;

pub const CONFIG_FILE: &str = "config.toml";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const ANALYSIS_FILE: &str = "analysis.json";
pub const TRAJECTORY_DIR: &str = "trajectories";
pub const REPORT_DIR: &str = "reports";

/// One independent trajectory: a chain length, door set and field realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Job {
    pub index: usize,
    pub sites: usize,
    /// `None` keeps the configured door list.
    pub door_count: Option<usize>,
    /// Disorder realization; `None` is the clean chain.
    pub realization: Option<usize>,
}

impl Job {
    fn group(&self) -> GroupKey {
        GroupKey { sites: self.sites, door_count: self.door_count }
    }

    pub fn label(&self) -> String {
        let r = match self.realization {
            Some(r) => format!("r{r:04}"),
            None => "ordered".into(),
        };
        format!("{}_{r}", self.group().label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct GroupKey {
    sites: usize,
    door_count: Option<usize>,
}

impl GroupKey {
    fn label(&self) -> String {
        match self.door_count {
            Some(n) => format!("L{:02}_nd{n:02}", self.sites),
            None => format!("L{:02}", self.sites),
        }
    }
}

/// Jobs in a fixed order: sizes, then door counts, then realizations.
pub fn plan_jobs(cfg: &ExperimentConfig) -> Vec<Job> {
    let mut jobs = Vec::new();
    for sites in cfg.sizes() {
        for door_count in cfg.door_counts() {
            let mut realizations: Vec<Option<usize>> = Vec::new();
            match &cfg.disorder {
                Some(d) => {
                    if d.include_ordered {
                        realizations.push(None);
                    }
                    realizations.extend((0..d.realizations).map(Some));
                }
                None => realizations.push(None),
            }
            for realization in realizations {
                jobs.push(Job { index: jobs.len(), sites, door_count, realization });
            }
        }
    }
    jobs
}

pub fn run_job(cfg: &ExperimentConfig, job: &Job) -> Result<Trajectory, entfreeze::Error> {
    let mut spec = cfg.chain.spec(job.sites);
    if let (Some(r), Some(d)) = (job.realization, &cfg.disorder) {
        spec = sample_disorder(&spec, &d.spec(cfg.base_seed), r)?;
    }
    let noise = cfg.noise_for(job.door_count);
    let pairs = cfg.pairs.resolve(job.sites).map_err(entfreeze::Error::Input)?;
    let options = EvolveOptions {
        stride: cfg.stride,
        record_correlations: cfg.record_correlations,
        positivity_every: cfg.positivity_every,
        seed: Some(cfg.base_seed),
        stop_when_thawed: cfg.stop_when_thawed.then_some(cfg.analysis.delta),
    };
    evolve_trajectory(&spec, &noise, cfg.beta_s_j, cfg.dt, cfg.t_end, &pairs, &options)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobRecord {
    #[serde(flatten)]
    pub job: Job,
    pub label: String,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrity_failure: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub software: String,
    pub version: String,
    pub config_sha256: String,
    pub config: ExperimentConfig,
    pub max_jobs: usize,
    pub jobs: Vec<JobRecord>,
    pub failed_jobs: Vec<String>,
    pub created_unix: u64,
}

impl Manifest {
    pub fn has_integrity_failure(&self) -> bool {
        self.jobs.iter().any(|j| j.integrity_failure == Some(true))
    }
}

pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let digest = Sha256::digest(cfg.to_toml().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    Ordered,
    Quenched,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupAnalysis {
    pub sites: usize,
    pub door_count: Option<usize>,
    pub kind: SeriesKind,
    pub realizations: usize,
    pub report: FreezeReport,
    pub hierarchy: Option<Hierarchy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hierarchy_error: Option<String>,
    pub fit: Option<FreezeFit>,
    pub integrity: IntegritySummary,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lr_bound: Vec<LrRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LrRow {
    pub i: usize,
    pub tau_lr: f64,
    pub tau_f: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleStudy {
    pub door_count: Option<usize>,
    pub kind: SeriesKind,
    pub tolerance: f64,
    pub verdicts: Vec<PairVerdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoorSweep {
    pub sites: usize,
    pub kind: SeriesKind,
    pub pair: [usize; 2],
    /// `(N_d, τ_F)`; `τ_F` is absent when the pair starts unentangled.
    pub points: Vec<(usize, Option<f64>)>,
    pub fit: Option<FreezeFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSummary {
    pub groups: Vec<GroupAnalysis>,
    pub scale_invariance: Vec<ScaleStudy>,
    pub door_sweeps: Vec<DoorSweep>,
}

impl AnalysisSummary {
    pub fn group(&self, sites: usize, door_count: Option<usize>, kind: SeriesKind) -> Option<&GroupAnalysis> {
        self.groups.iter().find(|g| g.sites == sites && g.door_count == door_count && g.kind == kind)
    }
}

/// Analysis targets per group: the clean trajectory and, with disorder, the
/// quenched average over the realizations.
fn group_series(
    cfg: &ExperimentConfig,
    done: &[(Job, Trajectory)],
) -> Result<Vec<(GroupKey, SeriesKind, Trajectory)>, CliError> {
    let mut groups: BTreeMap<GroupKey, (Option<&Trajectory>, Vec<&Trajectory>)> = BTreeMap::new();
    for (job, traj) in done {
        let entry = groups.entry(job.group()).or_default();
        match job.realization {
            None => entry.0 = Some(traj),
            Some(_) => entry.1.push(traj),
        }
    }
    let mut out = Vec::new();
    for (key, (ordered, realizations)) in groups {
        if let Some(t) = ordered {
            out.push((key, SeriesKind::Ordered, t.clone()));
        }
        if cfg.disorder.is_some() && !realizations.is_empty() {
            let owned: Vec<Trajectory> = realizations.into_iter().cloned().collect();
            out.push((key, SeriesKind::Quenched, quenched_average(&owned)?));
        }
    }
    Ok(out)
}

fn analyze_group(
    cfg: &ExperimentConfig,
    key: GroupKey,
    kind: SeriesKind,
    traj: &Trajectory,
) -> Result<GroupAnalysis, CliError> {
    let report = FreezeReport::from_trajectory(traj, cfg.analysis.delta, cfg.t_l())?;
    let has_nn_range = (2..key.sites).all(|i| report.pair(i, i + 1).is_some());
    let (hierarchy, hierarchy_error) = if key.sites >= 3 && has_nn_range {
        match hierarchy_check(&report) {
            Ok(h) => (Some(h), None),
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, None)
    };
    let points: Vec<(f64, f64)> =
        report.pairs.iter().filter(|p| p.j == p.i + 1).filter_map(|p| p.tau_f.map(|t| (p.i as f64, t))).collect();
    let fit = fit_freeze_parabola(&points, cfg.analysis.i_min as f64).ok();
    let lr_bound = match cfg.analysis.lr_velocity {
        Some(v) => report
            .pairs
            .iter()
            .filter(|p| p.j == p.i + 1)
            .map(|p| Ok(LrRow { i: p.i, tau_lr: lr_freezing_bound(p.i, v)?, tau_f: p.tau_f }))
            .collect::<Result<Vec<_>, entfreeze::Error>>()?,
        None => Vec::new(),
    };
    Ok(GroupAnalysis {
        sites: key.sites,
        door_count: key.door_count,
        kind,
        realizations: traj.metadata.realizations,
        report,
        hierarchy,
        hierarchy_error,
        fit,
        integrity: IntegritySummary::of(traj),
        lr_bound,
    })
}

/// Freezing reports, hierarchy, fits, cross-size verdicts and door sweeps.
pub fn analyze(
    cfg: &ExperimentConfig,
    done: &[(Job, Trajectory)],
) -> Result<(AnalysisSummary, Vec<(String, Trajectory)>), CliError> {
    let series = group_series(cfg, done)?;
    let mut groups = Vec::with_capacity(series.len());
    let mut averaged = Vec::new();
    for (key, kind, traj) in &series {
        groups.push(analyze_group(cfg, *key, *kind, traj)?);
        if *kind == SeriesKind::Quenched {
            averaged.push((format!("{}_quenched", key.label()), traj.clone()));
        }
    }

    let mut scale_invariance = Vec::new();
    if cfg.sizes().len() > 1 {
        for door_count in cfg.door_counts() {
            for kind in [SeriesKind::Ordered, SeriesKind::Quenched] {
                let reports: BTreeMap<usize, FreezeReport> = groups
                    .iter()
                    .filter(|g| g.door_count == door_count && g.kind == kind)
                    .map(|g| (g.sites, g.report.clone()))
                    .collect();
                if reports.len() > 1 {
                    let tolerance = cfg.scale_tolerance();
                    let verdicts = scale_invariance_report(&reports, tolerance)?;
                    scale_invariance.push(ScaleStudy { door_count, kind, tolerance, verdicts });
                }
            }
        }
    }

    let mut door_sweeps = Vec::new();
    if let (Some([i, j]), false) = (cfg.analysis.track_pair, cfg.sweep.door_counts.is_empty()) {
        for sites in cfg.sizes() {
            for kind in [SeriesKind::Ordered, SeriesKind::Quenched] {
                let points: Vec<(usize, Option<f64>)> = groups
                    .iter()
                    .filter(|g| g.sites == sites && g.kind == kind)
                    .filter_map(|g| Some((g.door_count?, g.report.pair(i, j)?.tau_f)))
                    .collect();
                if points.is_empty() {
                    continue;
                }
                let xy: Vec<(f64, f64)> = points.iter().filter_map(|(n, t)| t.map(|t| (*n as f64, t))).collect();
                let fit = fit_freeze_parabola(&xy, 1.0).ok();
                door_sweeps.push(DoorSweep { sites, kind, pair: [i, j], points, fit });
            }
        }
    }
    Ok((AnalysisSummary { groups, scale_invariance, door_sweeps }, averaged))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Artifact(e.to_string()))?;
    write(path, text.as_bytes())
}

fn write_trajectory(dir: &Path, label: &str, traj: &Trajectory) -> Result<(), CliError> {
    let mut csv = Vec::new();
    traj.write_csv(&mut csv).map_err(|e| CliError::Artifact(e.to_string()))?;
    write(&dir.join(TRAJECTORY_DIR).join(format!("{label}.csv")), &csv)?;
    write_json(&dir.join(TRAJECTORY_DIR).join(format!("{label}.json")), traj)
}

fn table_name(door_count: Option<usize>, kind: SeriesKind, disorder: bool) -> String {
    let mut name = String::from("freeze_table");
    if let Some(n) = door_count {
        name.push_str(&format!("_nd{n:02}"));
    }
    if disorder && kind == SeriesKind::Ordered {
        name.push_str("_ordered");
    }
    name + ".csv"
}

fn write_analysis(
    dir: &Path,
    cfg: &ExperimentConfig,
    summary: &AnalysisSummary,
    averaged: &[(String, Trajectory)],
) -> Result<(), CliError> {
    for (label, traj) in averaged {
        write_trajectory(dir, label, traj)?;
    }
    let mut tables: BTreeMap<String, Vec<u8>> = BTreeMap::new();
    for g in &summary.groups {
        let key = GroupKey { sites: g.sites, door_count: g.door_count };
        let kind = match g.kind {
            SeriesKind::Ordered => "ordered",
            SeriesKind::Quenched => "quenched",
        };
        write_json(&dir.join(REPORT_DIR).join(format!("{}_{kind}.json", key.label())), &g.report)?;
        if let Some(fit) = &g.fit {
            write_json(&dir.join(REPORT_DIR).join(format!("{}_{kind}_fit.json", key.label())), fit)?;
        }
        let table = tables
            .entry(table_name(g.door_count, g.kind, cfg.disorder.is_some()))
            .or_insert_with(|| format!("{}\n", FreezeReport::csv_header()).into_bytes());
        g.report.write_csv_rows(&mut *table).map_err(|e| CliError::Artifact(e.to_string()))?;
    }
    for (name, body) in tables {
        write(&dir.join(name), &body)?;
    }
    write_json(&dir.join(ANALYSIS_FILE), summary)
}

#[derive(Debug)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub manifest: Manifest,
    pub summary: AnalysisSummary,
}

/// Runs every job of `cfg` on at most `max_jobs` workers and writes all
/// artifacts under `cfg.output_dir`. Failed jobs are listed in the manifest.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutcome, CliError> {
    cfg.validate()?;
    let dir = cfg.output_dir.clone();
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    write(&dir.join(CONFIG_FILE), cfg.to_toml().as_bytes())?;

    let jobs = plan_jobs(cfg);
    let max_jobs = cfg.max_jobs();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(max_jobs)
        .build()
        .map_err(|e| CliError::Artifact(format!("worker pool: {e}")))?;
    let results: Vec<Result<Trajectory, entfreeze::Error>> =
        pool.install(|| jobs.par_iter().map(|j| run_job(cfg, j)).collect());

    let mut records = Vec::with_capacity(jobs.len());
    let mut done = Vec::with_capacity(jobs.len());
    for (job, result) in jobs.iter().zip(results) {
        let label = job.label();
        match result {
            Ok(traj) => {
                write_trajectory(&dir, &label, &traj)?;
                records.push(JobRecord { job: *job, label, ok: true, error: None, integrity_failure: None });
                done.push((*job, traj));
            }
            Err(e) => {
                let integrity = matches!(e, entfreeze::Error::NumericalIntegrity(_));
                records.push(JobRecord {
                    job: *job,
                    label,
                    ok: false,
                    error: Some(e.to_string()),
                    integrity_failure: Some(integrity),
                });
            }
        }
    }
    let manifest = Manifest {
        software: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config_sha256: config_hash(cfg),
        config: cfg.clone(),
        max_jobs,
        failed_jobs: records.iter().filter(|r| !r.ok).map(|r| r.label.clone()).collect(),
        jobs: records,
        created_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    write_json(&dir.join(MANIFEST_FILE), &manifest)?;
    let (summary, averaged) = analyze(cfg, &done)?;
    write_analysis(&dir, cfg, &summary, &averaged)?;
    Ok(RunOutcome { dir, manifest, summary })
}

/// Re-runs the analysis of a finished run from its stored trajectories.
pub fn analyze_run(dir: &Path) -> Result<AnalysisSummary, CliError> {
    let cfg = ExperimentConfig::load(&dir.join(CONFIG_FILE))?;
    let manifest_path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&manifest_path).map_err(|e| CliError::io(&manifest_path, e))?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| CliError::Artifact(format!("{}: {e}", manifest_path.display())))?;
    let mut done = Vec::new();
    for rec in manifest.jobs.iter().filter(|r| r.ok) {
        let path = dir.join(TRAJECTORY_DIR).join(format!("{}.json", rec.label));
        let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        done.push((rec.job, Trajectory::from_json(&text)?));
    }
    let (summary, averaged) = analyze(&cfg, &done)?;
    write_analysis(dir, &cfg, &summary, &averaged)?;
    Ok(summary)
}
