//! Command-line interface for running variational time evolution scenarios.
//!
//! Exit codes: 0 on success, 1 on numerical failure during a run, 2 on
//! configuration or validation errors. Errors are printed to stderr as JSON.
//! Thread count is controlled by the `RAYON_NUM_THREADS` environment
//! variable.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qvte_cli::config::{parse_estimator, Scenario};
use qvte_cli::error::{HarnessError, Result};
use qvte_cli::presets::{list_presets, preset_source};
use qvte_cli::report::{density_csv, density_report, width_csv, width_spread_report};
use qvte_cli::run::{resolve_theta0, run_scenario};

#[derive(Parser)]
#[command(name = "qvte", version, about = "Grid-based variational quantum time evolution harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario (a preset name or a TOML file path) and write its
    /// artifacts.
    Run {
        /// Preset name or path to a scenario TOML file.
        config: String,
        /// Output directory (default: `out/<scenario name>`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the evolution seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the estimator: `exact` or `shots:<count>`.
        #[arg(long)]
        estimator: Option<String>,
    },
    /// List the built-in presets.
    Presets,
    /// Report Hamiltonian matrix densities under threshold cuts.
    Density {
        /// Preset name or path to a scenario TOML file (1-dimensional).
        config: String,
        /// Comma-separated threshold cuts, e.g. `0,0.1,1.0`.
        #[arg(long, required = true)]
        cuts: String,
    },
    /// Report exact-propagator width spreading for one or more scenarios.
    Widths {
        /// Preset names or scenario TOML file paths.
        #[arg(required = true)]
        configs: Vec<String>,
    },
    /// Fit initial parameters for a scenario and print the scenario TOML
    /// with the fitted vector embedded.
    Fit {
        /// Preset name or path to a scenario TOML file.
        config: String,
    },
}

/// Loads a scenario from a file path or, failing that, a preset name.
fn load_scenario(reference: &str) -> Result<Scenario> {
    let path = Path::new(reference);
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| {
            HarnessError::validation("config", format!("reading {}: {e}", path.display()))
        })?;
        return Scenario::from_toml(&text);
    }
    if let Some(source) = preset_source(reference) {
        return Scenario::from_toml(source);
    }
    Err(HarnessError::validation(
        "config",
        format!("`{reference}` is neither a readable file nor a known preset"),
    ))
}

fn parse_cuts(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|part| {
            part.trim().parse::<f64>().map_err(|_| {
                HarnessError::validation("cuts", format!("invalid cut `{part}`"))
            })
        })
        .collect()
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run { config, out, seed, estimator } => {
            let mut scenario = load_scenario(&config)?;
            if let Some(seed) = seed {
                scenario.evolution.seed = seed;
            }
            if let Some(estimator) = estimator {
                parse_estimator(&estimator)?;
                scenario.evolution.estimator = estimator;
            }
            let out_dir =
                out.unwrap_or_else(|| PathBuf::from("out").join(&scenario.name));
            let artifacts = run_scenario(&scenario, &out_dir)?;
            let min_fidelity = artifacts
                .record
                .fidelities
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            println!(
                "{}: {} record points, min fidelity {:.6}, artifacts in {}",
                scenario.name,
                artifacts.record.times.len(),
                min_fidelity,
                out_dir.display()
            );
            Ok(())
        }
        Command::Presets => {
            for (name, description) in list_presets() {
                println!("{name:<28} {description}");
            }
            Ok(())
        }
        Command::Density { config, cuts } => {
            let scenario = load_scenario(&config)?;
            let cuts = parse_cuts(&cuts)?;
            let rows = density_report(&scenario, &cuts)?;
            print!("{}", density_csv(&rows));
            Ok(())
        }
        Command::Widths { configs } => {
            let scenarios = configs
                .iter()
                .map(|c| load_scenario(c))
                .collect::<Result<Vec<_>>>()?;
            let rows = width_spread_report(&scenarios)?;
            print!("{}", width_csv(&rows));
            Ok(())
        }
        Command::Fit { config } => {
            let mut scenario = load_scenario(&config)?;
            scenario.validate()?;
            let ham = scenario.hamiltonian()?;
            let target = scenario.wavepacket_state()?;
            let ansatz = scenario.build_ansatz(&ham)?;
            scenario.initial.theta0 = None;
            let (theta0, source) = resolve_theta0(&scenario, &ansatz, &target)?;
            if let qvte_cli::run::Theta0Source::Fit { fidelity, reached_threshold, .. } = source {
                eprintln!(
                    "fit fidelity {fidelity:.6} (threshold reached: {reached_threshold})"
                );
            }
            scenario.initial.theta0 = Some(theta0);
            print!("{}", scenario.to_toml()?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
