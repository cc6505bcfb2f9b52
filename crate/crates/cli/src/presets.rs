//! Built-in experiments.

use std::path::PathBuf;

use entfreeze::models::{Boundary, DisorderTarget, Variant};
use entfreeze::open_system::{Door, NoiseSpec};

use crate::config::{
    AnalysisConfig, ChainConfig, DisorderConfig, ExperimentConfig, FieldProfile, PairSelection, SweepConfig, ALL_NN,
};
use crate::error::CliError;

pub const PRESETS: [&str; 8] = ["fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig3c", "fig4", "fig5"];

/// `(h1/J, h2/J, γ)` of the three reference ATXY phase points.
pub const PM_I: (f64, f64, f64) = (1.2, 0.0, 0.8);
pub const PM_II: (f64, f64, f64) = (0.0, 1.2, 0.8);
pub const AFM: (f64, f64, f64) = (0.2, 0.2, 0.8);

pub const BETA_S_J: f64 = 20.0;
pub const BETA_E_B: f64 = 10.0;

pub fn atxy_chain(sites: usize, (h1, h2, gamma): (f64, f64, f64)) -> ChainConfig {
    ChainConfig {
        sites,
        variant: Variant::Atxy,
        j: 1.0,
        gamma,
        delta: 0.0,
        h1: FieldProfile::Uniform(h1),
        h2: FieldProfile::Uniform(h2),
        boundary: Boundary::Open,
        j2: 0.0,
    }
}

fn lrqi_door_one() -> NoiseSpec {
    NoiseSpec::lrqi(vec![Door::single(1)], 1.0, BETA_E_B)
}

fn base(name: &str, chain: ChainConfig, noise: NoiseSpec, t_end: f64) -> ExperimentConfig {
    ExperimentConfig {
        chain,
        noise,
        beta_s_j: BETA_S_J,
        dt: 0.01,
        t_end,
        stride: 1,
        pairs: PairSelection::Named(ALL_NN.into()),
        record_correlations: false,
        positivity_every: 10,
        stop_when_thawed: false,
        disorder: None,
        analysis: AnalysisConfig::default(),
        sweep: SweepConfig::default(),
        output_dir: PathBuf::from("runs").join(name),
        base_seed: 0,
        max_jobs: None,
    }
}

/// Configuration of the named preset. `extended` widens the size sweeps
/// of the `fig3*` presets from `6..=8` to `6..=11`.
pub fn preset_experiment(name: &str, extended: bool) -> Result<ExperimentConfig, CliError> {
    let sizes: Vec<usize> = if extended { (6..=11).collect() } else { (6..=8).collect() };
    let size_sweep = |point, t_end| {
        let mut c = base(name, atxy_chain(8, point), lrqi_door_one(), t_end);
        c.sweep.sizes = sizes.clone();
        c.stop_when_thawed = true;
        c
    };
    let cfg = match name {
        "fig2a" => base(name, atxy_chain(8, PM_II), lrqi_door_one(), 20.0),
        "fig2b" => base(name, atxy_chain(8, PM_II), NoiseSpec::dephasing(vec![Door::single(1)], 1.0, 1.0), 20.0),
        "fig2c" => {
            let chain = ChainConfig {
                sites: 8,
                variant: Variant::Txxz,
                j: 1.0,
                gamma: 0.0,
                delta: 1.5,
                h1: FieldProfile::Uniform(0.1),
                h2: FieldProfile::Uniform(0.0),
                boundary: Boundary::Open,
                j2: 0.0,
            };
            base(name, chain, lrqi_door_one(), 20.0)
        }
        "fig3a" => size_sweep(PM_I, 10.0),
        "fig3b" => size_sweep(PM_II, 10.0),
        "fig3c" => size_sweep(AFM, 10.0),
        "fig4" => {
            let mut c = base(name, atxy_chain(8, PM_II), lrqi_door_one(), 20.0);
            c.disorder = Some(DisorderConfig {
                target: DisorderTarget::H2,
                mean: 1.2,
                std: 0.3,
                realizations: 50,
                include_ordered: true,
            });
            c.base_seed = 2024;
            c.positivity_every = 100;
            c
        }
        "fig5" => {
            let mut c = base(name, atxy_chain(11, PM_I), lrqi_door_one(), 10.0);
            c.sweep.door_counts = (1..=10).collect();
            c.pairs = PairSelection::List(vec![[10, 11]]);
            c.analysis.track_pair = Some([10, 11]);
            c.stop_when_thawed = true;
            c.positivity_every = 100;
            c
        }
        other => {
            return Err(CliError::UnknownPreset { name: other.to_string(), available: PRESETS.to_vec() });
        }
    };
    Ok(cfg)
}
