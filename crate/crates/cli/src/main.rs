use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use entfreeze_cli::config::ExperimentConfig;
use entfreeze_cli::error::CliError;
use entfreeze_cli::presets::preset_experiment;
use entfreeze_cli::runner::{analyze_run, run_experiment, AnalysisSummary};

#[derive(Parser)]
#[command(name = "entfreeze", version, about = "Entanglement freezing in noisy spin chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run { config: PathBuf },
    /// Run a built-in experiment, or print its config.
    Preset {
        name: String,
        /// Print the resolved config as TOML instead of running it.
        #[arg(long)]
        emit_config: bool,
        /// Use the wider size sweeps.
        #[arg(long)]
        extended: bool,
        /// Override the output directory.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Recompute the analysis artifacts of a finished run.
    Analyze { run_dir: PathBuf },
    /// Check a config without running it.
    Validate { config: PathBuf },
}

fn print_summary(summary: &AnalysisSummary) {
    for g in &summary.groups {
        let doors = g.door_count.map(|n| format!(" N_d={n}")).unwrap_or_default();
        println!("L={}{doors} {:?}", g.sites, g.kind);
        for p in g.report.pairs.iter().filter(|p| p.j == p.i + 1) {
            let tau = p.tau_f.map(|t| format!("{t:.2}")).unwrap_or_else(|| "-".into());
            println!("  ({},{}) tau_F={tau} initial_ln={:.4e}", p.i, p.j, p.initial_ln);
        }
        if let Some(h) = &g.hierarchy {
            match h.violation {
                None => println!("  hierarchy holds"),
                Some((i, j)) => println!("  hierarchy violated at ({i},{j})"),
            }
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            finish_run(&cfg)
        }
        Command::Preset { name, emit_config, extended, output_dir } => {
            let mut cfg = preset_experiment(&name, extended)?;
            if let Some(dir) = output_dir {
                cfg.output_dir = dir;
            }
            if emit_config {
                print!("{}", cfg.to_toml());
                return Ok(());
            }
            finish_run(&cfg)
        }
        Command::Analyze { run_dir } => {
            print_summary(&analyze_run(&run_dir)?);
            Ok(())
        }
        Command::Validate { config } => {
            ExperimentConfig::load(&config)?.validate()?;
            println!("{}: ok", config.display());
            Ok(())
        }
    }
}

fn finish_run(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let outcome = run_experiment(cfg)?;
    print_summary(&outcome.summary);
    println!("artifacts in {}", outcome.dir.display());
    let failed = &outcome.manifest.failed_jobs;
    if failed.is_empty() {
        return Ok(());
    }
    let msg = format!("{} job(s) failed: {}", failed.len(), failed.join(", "));
    if outcome.manifest.has_integrity_failure() {
        Err(CliError::Integrity(msg))
    } else {
        Err(CliError::Artifact(msg))
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
