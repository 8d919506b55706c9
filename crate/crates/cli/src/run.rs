//! Scenario execution: initial-parameter resolution, evolution, and artifact
//! emission (trajectory CSV, run manifest JSON, density snapshots).

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use qvte_core::ansatz::{full_hilbert_space_params, prepare_state, Ansatz};
use qvte_core::engine::{evolve, fit_initial_params, TrajectoryRecord};
use qvte_core::hamiltonian::GridHamiltonian;
use qvte_core::state::Statevector;

use crate::config::Scenario;
use crate::error::{HarnessError, Result};

/// Formats a value with 17 significant digits, `.` decimal separator.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `contents` to `path` atomically (temp file + rename) so concurrent
/// readers never observe a partial artifact.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)
        .map_err(|e| HarnessError::numerical(format!("writing {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path)
        .map_err(|e| HarnessError::numerical(format!("renaming {}: {e}", path.display())))
}

/// How the initial parameters were obtained.
#[derive(Debug, Clone)]
pub enum Theta0Source {
    Embedded,
    Fit { fidelity: f64, seed: u64, reached_threshold: bool },
}

/// Resolves the scenario's initial parameters: embedded vector if present,
/// otherwise a fidelity fit against the configured wavepacket.
pub fn resolve_theta0(
    scenario: &Scenario,
    ansatz: &Ansatz,
    target: &Statevector,
) -> Result<(Vec<f64>, Theta0Source)> {
    if let Some(theta0) = &scenario.initial.theta0 {
        return Ok((theta0.clone(), Theta0Source::Embedded));
    }
    let fit = fit_initial_params(
        ansatz,
        target,
        scenario.initial.fit_threshold,
        scenario.initial.fit_restarts,
        scenario.initial.fit_seed,
    )
    .map_err(|e| HarnessError::numerical(format!("initial-parameter fit: {e}")))?;
    let source = Theta0Source::Fit {
        fidelity: fit.fidelity,
        seed: scenario.initial.fit_seed,
        reached_threshold: fit.reached_threshold,
    };
    Ok((fit.theta, source))
}

/// Everything produced by one scenario run.
pub struct RunArtifacts {
    pub trajectory_path: PathBuf,
    pub manifest_path: PathBuf,
    pub snapshot_paths: Vec<PathBuf>,
    pub record: TrajectoryRecord,
}

/// Runs a validated scenario and writes its artifacts into `out_dir`.
pub fn run_scenario(scenario: &Scenario, out_dir: &Path) -> Result<RunArtifacts> {
    scenario.validate()?;
    fs::create_dir_all(out_dir)
        .map_err(|e| HarnessError::numerical(format!("creating {}: {e}", out_dir.display())))?;

    let started = Instant::now();
    let ham = scenario.hamiltonian()?;
    let wavepacket = scenario.wavepacket_state()?;
    let ansatz = scenario.build_ansatz(&ham)?;
    let config = scenario.evolution_config()?;
    let (theta0, theta0_source) = resolve_theta0(scenario, &ansatz, &wavepacket)?;

    let reference = match scenario.initial.reference.as_str() {
        "wavepacket" => Some(&wavepacket),
        _ => None,
    };
    let record = evolve(&ansatz, &ham, &theta0, reference, &config)
        .map_err(|e| HarnessError::numerical(e.to_string()))?;

    let trajectory_path = out_dir.join("trajectory.csv");
    write_atomic(&trajectory_path, &trajectory_csv(&record))?;

    let reference_state = match reference {
        Some(state) => state.clone(),
        None => prepare_state(&ansatz, &theta0)
            .map_err(|e| HarnessError::numerical(e.to_string()))?,
    };
    let mut snapshot_paths = Vec::new();
    let mut snapshot_meta = Vec::new();
    for (index, &requested) in scenario.snapshot_times().iter().enumerate() {
        let nearest = nearest_record_index(&record.times, requested);
        let time = record.times[nearest];
        let path = out_dir.join(format!("snapshot_{index:03}.csv"));
        let csv = snapshot_csv(&ham, &ansatz, &record.thetas[nearest], &reference_state, time)?;
        write_atomic(&path, &csv)?;
        snapshot_meta.push(serde_json::json!({
            "index": index,
            "requested_time": requested,
            "time": time,
            "file": path.file_name().unwrap().to_string_lossy(),
        }));
        snapshot_paths.push(path);
    }

    let manifest_path = out_dir.join("manifest.json");
    let manifest = manifest_json(
        scenario,
        &ansatz,
        &theta0,
        &theta0_source,
        &record,
        snapshot_meta,
        started.elapsed().as_secs_f64(),
    )?;
    write_atomic(&manifest_path, &manifest)?;

    Ok(RunArtifacts { trajectory_path, manifest_path, snapshot_paths, record })
}

/// Index of the recorded time closest to `requested`.
fn nearest_record_index(times: &[f64], requested: f64) -> usize {
    let mut best = 0;
    let mut best_gap = f64::INFINITY;
    for (i, &t) in times.iter().enumerate() {
        let gap = (t - requested).abs();
        if gap < best_gap {
            best = i;
            best_gap = gap;
        }
    }
    best
}

/// Trajectory CSV body: `t, fidelity, energy, norm, theta_0…theta_{n−1}`.
pub fn trajectory_csv(record: &TrajectoryRecord) -> String {
    let n_params = record.thetas.first().map_or(0, Vec::len);
    let mut out = String::from("t,fidelity,energy,norm");
    for k in 0..n_params {
        out.push_str(&format!(",theta_{k}"));
    }
    out.push('\n');
    for i in 0..record.times.len() {
        out.push_str(&fmt_float(record.times[i]));
        for v in [record.fidelities[i], record.energies[i], record.norms[i]] {
            out.push(',');
            out.push_str(&fmt_float(v));
        }
        for v in &record.thetas[i] {
            out.push(',');
            out.push_str(&fmt_float(*v));
        }
        out.push('\n');
    }
    out
}

/// Snapshot CSV: grid coordinates, exact-propagation density, variational
/// density at one time.
fn snapshot_csv(
    ham: &GridHamiltonian,
    ansatz: &Ansatz,
    theta: &[f64],
    reference: &Statevector,
    time: f64,
) -> Result<String> {
    let exact = ham
        .exact_evolve(reference, time)
        .map_err(|e| HarnessError::numerical(e.to_string()))?;
    let vte = prepare_state(ansatz, theta)
        .map_err(|e| HarnessError::numerical(e.to_string()))?;
    let spec = ham.grid();
    let grids = qvte_core::grid::build_grids(spec)
        .map_err(|e| HarnessError::numerical(e.to_string()))?;

    let mut out = String::new();
    for dim in 0..spec.num_dims {
        out.push_str(&format!("x{dim},"));
    }
    out.push_str("prob_exact,prob_vte\n");
    let exact_probs = exact.probabilities();
    let vte_probs = vte.probabilities();
    for index in 0..spec.total_points() {
        for (dim, &point) in spec.split_index(index).iter().enumerate() {
            out.push_str(&fmt_float(grids.positions[dim][point]));
            out.push(',');
        }
        out.push_str(&fmt_float(exact_probs[index]));
        out.push(',');
        out.push_str(&fmt_float(vte_probs[index]));
        out.push('\n');
    }
    Ok(out)
}

/// Run manifest: everything needed to reproduce the run.
#[allow(clippy::too_many_arguments)]
fn manifest_json(
    scenario: &Scenario,
    ansatz: &Ansatz,
    theta0: &[f64],
    theta0_source: &Theta0Source,
    record: &TrajectoryRecord,
    snapshots: Vec<serde_json::Value>,
    wall_time_seconds: f64,
) -> Result<String> {
    let config_echo = serde_json::to_value(scenario)
        .map_err(|e| HarnessError::numerical(format!("serializing config: {e}")))?;
    let (source, fit) = match theta0_source {
        Theta0Source::Embedded => ("embedded", serde_json::Value::Null),
        Theta0Source::Fit { fidelity, seed, reached_threshold } => (
            "fit",
            serde_json::json!({
                "fidelity": fidelity,
                "seed": seed,
                "reached_threshold": reached_threshold,
            }),
        ),
    };
    let manifest = serde_json::json!({
        "name": scenario.name,
        "version": env!("CARGO_PKG_VERSION"),
        "config": config_echo,
        "resolved": {
            "n_params": ansatz.num_params(),
            "full_hilbert_space_params": full_hilbert_space_params(ansatz.num_qubits()),
            "theta0": theta0,
            "theta0_source": source,
            "fit": fit,
            "evolution_seed": scenario.evolution.seed,
            "record_points": record.times.len(),
            "snapshots": snapshots,
        },
        "results": {
            "wall_time_seconds": wall_time_seconds,
            "solver_stats": {
                "accepted_steps": record.solver_stats.accepted_steps,
                "rejected_steps": record.solver_stats.rejected_steps,
                "rhs_evaluations": record.solver_stats.rhs_evaluations,
            },
            "final_fidelity": record.fidelities.last(),
            "min_fidelity": record.fidelities.iter().cloned().fold(f64::INFINITY, f64::min),
        },
    });
    serde_json::to_string_pretty(&manifest)
        .map_err(|e| HarnessError::numerical(format!("serializing manifest: {e}")))
}
