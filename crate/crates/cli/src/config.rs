//! Experiment configuration as read from TOML.

use std::path::{Path, PathBuf};

use entfreeze::models::{Boundary, ChainSpec, DisorderSpec, DisorderTarget, Variant};
use entfreeze::open_system::{Door, NoiseKind, NoiseSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Environment variable consulted when a config leaves `max_jobs` unset.
pub const JOBS_ENV: &str = "ENTFREEZE_JOBS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldProfile {
    Uniform(f64),
    PerSite(Vec<f64>),
}

impl FieldProfile {
    fn is_uniform(&self) -> bool {
        match self {
            Self::Uniform(_) => true,
            Self::PerSite(v) => v.windows(2).all(|w| w[0] == w[1]),
        }
    }

    fn resolve(&self, sites: usize) -> Vec<f64> {
        match self {
            Self::Uniform(x) => vec![*x; sites],
            Self::PerSite(v) if v.len() == sites => v.clone(),
            Self::PerSite(v) => vec![v.first().copied().unwrap_or(0.0); sites],
        }
    }
}

impl Default for FieldProfile {
    fn default() -> Self {
        Self::Uniform(0.0)
    }
}

/// Chain parameters; fields may be a single number applied to every site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub sites: usize,
    pub variant: Variant,
    #[serde(default = "one")]
    pub j: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub h1: FieldProfile,
    #[serde(default)]
    pub h2: FieldProfile,
    #[serde(default = "open")]
    pub boundary: Boundary,
    #[serde(default)]
    pub j2: f64,
}

fn one() -> f64 {
    1.0
}

fn open() -> Boundary {
    Boundary::Open
}

impl ChainConfig {
    /// The chain at `sites` spins; uniform profiles are stretched to length.
    pub fn spec(&self, sites: usize) -> ChainSpec {
        ChainSpec {
            sites,
            j: self.j,
            gamma: self.gamma,
            delta: self.delta,
            h1: self.h1.resolve(sites),
            h2: self.h2.resolve(sites),
            boundary: self.boundary,
            variant: self.variant,
            j2: self.j2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PairSelection {
    /// `"all-nearest-neighbor"` or `"all-up-to-next-nearest"`.
    Named(String),
    List(Vec<[usize; 2]>),
}

pub const ALL_NN: &str = "all-nearest-neighbor";
pub const ALL_NNN: &str = "all-up-to-next-nearest";

impl PairSelection {
    pub fn resolve(&self, sites: usize) -> Result<Vec<(usize, usize)>, String> {
        match self {
            Self::Named(n) if n == ALL_NN => Ok((1..sites).map(|i| (i, i + 1)).collect()),
            Self::Named(n) if n == ALL_NNN => {
                let mut v: Vec<(usize, usize)> = (1..sites).map(|i| (i, i + 1)).collect();
                v.extend((1..sites.saturating_sub(1)).map(|i| (i, i + 2)));
                Ok(v)
            }
            Self::Named(n) => Err(format!("pairs = \"{n}\" is not one of \"{ALL_NN}\", \"{ALL_NNN}\"")),
            Self::List(list) => {
                let mut out = Vec::with_capacity(list.len());
                for &[i, j] in list {
                    if i == 0 || j == 0 || i > sites || j > sites || i >= j {
                        return Err(format!("pair ({i}, {j}) is not 1 ≤ i < j ≤ {sites}"));
                    }
                    out.push((i, j));
                }
                Ok(out)
            }
        }
    }
}

impl Default for PairSelection {
    fn default() -> Self {
        Self::Named(ALL_NN.into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderConfig {
    pub target: DisorderTarget,
    pub mean: f64,
    pub std: f64,
    pub realizations: usize,
    /// Also run the clean chain (fields at their configured values).
    #[serde(default)]
    pub include_ordered: bool,
}

impl DisorderConfig {
    pub fn spec(&self, base_seed: u64) -> DisorderSpec {
        DisorderSpec { target: self.target, mean: self.mean, std: self.std, realizations: self.realizations, base_seed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Freezing window; defaults to `t_end`.
    #[serde(default)]
    pub t_l: Option<f64>,
    #[serde(default = "default_i_min")]
    pub i_min: usize,
    #[serde(default)]
    pub lr_velocity: Option<f64>,
    /// Cross-size tolerance on the terminal; defaults to two grid steps.
    #[serde(default)]
    pub scale_tolerance: Option<f64>,
    /// Pair followed across a door-count sweep.
    #[serde(default)]
    pub track_pair: Option<[usize; 2]>,
}

fn default_delta() -> f64 {
    entfreeze::analysis::DEFAULT_DELTA
}

fn default_i_min() -> usize {
    entfreeze::analysis::DEFAULT_I_MIN
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            delta: default_delta(),
            t_l: None,
            i_min: default_i_min(),
            lr_velocity: None,
            scale_tolerance: None,
            track_pair: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Chain lengths to run; empty means `chain.sites` only.
    #[serde(default)]
    pub sizes: Vec<usize>,
    /// Door counts `N_d`; doors are sites `1..=N_d`. Empty means `noise.doors` as given.
    #[serde(default)]
    pub door_counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub chain: ChainConfig,
    pub noise: NoiseSpec,
    /// `Jβ_S` of the initial thermal state.
    pub beta_s_j: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default)]
    pub pairs: PairSelection,
    #[serde(default)]
    pub record_correlations: bool,
    /// Positivity is checked every this many recorded samples (and at the last one).
    #[serde(default = "default_positivity_every")]
    pub positivity_every: usize,
    /// End each run once every recorded pair has left its freezing band.
    #[serde(default)]
    pub stop_when_thawed: bool,
    #[serde(default)]
    pub disorder: Option<DisorderConfig>,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub max_jobs: Option<usize>,
}

fn default_dt() -> f64 {
    0.01
}

fn default_stride() -> usize {
    1
}

fn default_positivity_every() -> usize {
    10
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Validation(vec![format!("config: {}", e.message().trim())]))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn sizes(&self) -> Vec<usize> {
        if self.sweep.sizes.is_empty() {
            vec![self.chain.sites]
        } else {
            self.sweep.sizes.clone()
        }
    }

    /// `None` stands for the configured door list.
    pub fn door_counts(&self) -> Vec<Option<usize>> {
        if self.sweep.door_counts.is_empty() {
            vec![None]
        } else {
            self.sweep.door_counts.iter().map(|&n| Some(n)).collect()
        }
    }

    pub fn noise_for(&self, door_count: Option<usize>) -> NoiseSpec {
        let mut noise = self.noise.clone();
        if let Some(n) = door_count {
            noise.doors = (1..=n).map(Door::single).collect();
        }
        noise
    }

    pub fn t_l(&self) -> f64 {
        self.analysis.t_l.unwrap_or(self.t_end)
    }

    pub fn grid(&self) -> f64 {
        self.dt * self.stride as f64
    }

    pub fn scale_tolerance(&self) -> f64 {
        self.analysis.scale_tolerance.unwrap_or(2.0 * self.grid())
    }

    pub fn max_jobs(&self) -> usize {
        self.max_jobs.or_else(|| std::env::var(JOBS_ENV).ok().and_then(|v| v.parse().ok())).unwrap_or(1).max(1)
    }

    /// Every violated constraint; empty when the config is runnable.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.chain.sites < 2 {
            v.push(format!("chain.sites (L) must be at least 2, got {}", self.chain.sites));
        }
        let sizes = self.sizes();
        if sizes.iter().any(|&l| l < 2) {
            v.push(format!("sweep.sizes must all be at least 2, got {sizes:?}"));
        }
        if sizes.len() > 1 && !(self.chain.h1.is_uniform() && self.chain.h2.is_uniform()) {
            v.push("sweep.sizes needs uniform chain.h1 and chain.h2".into());
        }
        for &l in sizes.iter().filter(|&&l| l >= 2) {
            if sizes.len() == 1 {
                for (name, f) in [("h1", &self.chain.h1), ("h2", &self.chain.h2)] {
                    if let FieldProfile::PerSite(list) = f {
                        if list.len() != l {
                            v.push(format!("chain.{name} has {} entries for L = {l}", list.len()));
                        }
                    }
                }
            }
            v.extend(self.chain.spec(l).violations().into_iter().map(|m| format!("L = {l}: {m}")));
            for nd in self.door_counts() {
                if let Some(n) = nd {
                    if n == 0 || n > l {
                        v.push(format!("sweep.door_counts entry {n} outside 1..={l}"));
                        continue;
                    }
                }
                v.extend(self.noise_for(nd).violations(l).into_iter().map(|m| format!("L = {l}: {m}")));
            }
            if let Err(m) = self.pairs.resolve(l) {
                v.push(format!("L = {l}: {m}"));
            }
            if let Some([i, j]) = self.analysis.track_pair {
                if !(i >= 1 && i < j && j <= l) {
                    v.push(format!("analysis.track_pair ({i}, {j}) is not a pair of the L = {l} chain"));
                }
            }
        }
        if !self.sweep.door_counts.is_empty() && self.noise.kind == NoiseKind::None {
            v.push("sweep.door_counts needs a noise kind other than none".into());
        }
        if !(self.beta_s_j.is_finite() && self.beta_s_j >= 0.0) {
            v.push(format!("beta_s_j must be finite and non-negative, got {}", self.beta_s_j));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            v.push(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            v.push(format!("t_end must be positive, got {}", self.t_end));
        }
        if self.stride == 0 {
            v.push("stride must be at least 1".into());
        }
        if let Some(d) = &self.disorder {
            v.extend(d.spec(self.base_seed).violations());
        }
        let a = &self.analysis;
        if !(a.delta.is_finite() && a.delta > 0.0) {
            v.push(format!("analysis.delta must be positive, got {}", a.delta));
        }
        if let Some(t_l) = a.t_l {
            if !(t_l > 0.0 && t_l <= self.t_end) {
                v.push(format!("analysis.t_l must lie in (0, t_end], got {t_l}"));
            }
        }
        if let Some(vel) = a.lr_velocity {
            if !(vel.is_finite() && vel > 0.0) {
                v.push(format!("analysis.lr_velocity must be positive, got {vel}"));
            }
        }
        if let Some(tol) = a.scale_tolerance {
            if tol.is_nan() || tol < self.grid() {
                v.push(format!("analysis.scale_tolerance {tol} is finer than the grid {}", self.grid()));
            }
        }
        if self.max_jobs == Some(0) {
            v.push("max_jobs must be at least 1".into());
        }
        if self.output_dir.as_os_str().is_empty() {
            v.push("output_dir must not be empty".into());
        }
        v
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(CliError::Validation(v))
        }
    }
}
