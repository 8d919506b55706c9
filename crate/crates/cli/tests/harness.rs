//! Configuration parsing, validation classification, artifact formats, and
//! reproducibility of the scenario harness.

use qvte_cli::config::{parse_estimator, Scenario};
use qvte_cli::error::HarnessError;
use qvte_cli::presets::{list_presets, preset_scenario, PRESETS};
use qvte_cli::report::{density_csv, density_report, width_spread_report};
use qvte_cli::run::{fmt_float, run_scenario};

use qvte_core::engine::EstimatorMode;

fn small_scenario() -> Scenario {
    Scenario::from_toml(
        r#"
name = "small-free"
description = "tiny smoke scenario"

[grid]
num_dims = 1
qubits_per_dim = 3
lengths = [14.0]
origins = [-7.0]

[potential]
kind = "free"

[wavepacket]
x0 = [-2.0]
p0 = [1.0]
width = [1.0]

[ansatz]
form = "vf1"
depth = 1
space = "position"

[evolution]
t_total = 0.2
solver = "fixed-rk4"
step = 0.01
record_points = 11

[initial]
fit_threshold = 0.5
fit_restarts = 2
fit_seed = 3
"#,
    )
    .unwrap()
}

fn temp_dir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("qvte-harness-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn scenario_round_trips_through_toml() {
    let scenario = small_scenario();
    let text = scenario.to_toml().unwrap();
    let reparsed = Scenario::from_toml(&text).unwrap();
    assert_eq!(reparsed.name, scenario.name);
    assert_eq!(reparsed.evolution.record_points, 11);
    assert_eq!(reparsed.initial.fit_seed, 3);
}

#[test]
fn unknown_form_is_a_validation_error_naming_the_field() {
    let mut scenario = small_scenario();
    scenario.ansatz.form = "vf99".into();
    match scenario.validate() {
        Err(HarnessError::Validation { field, .. }) => assert_eq!(field, "ansatz.form"),
        other => panic!("expected a validation error, got {other:?}"),
    }
}

#[test]
fn validation_errors_carry_exit_code_two() {
    let err = HarnessError::validation("ansatz.form", "bad");
    assert_eq!(err.exit_code(), 2);
    assert_eq!(err.to_json()["error"]["kind"], "validation");
    assert_eq!(err.to_json()["error"]["field"], "ansatz.form");
    let err = HarnessError::numerical("solver exploded");
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn theta0_length_mismatch_is_rejected() {
    let mut scenario = small_scenario();
    scenario.initial.theta0 = Some(vec![0.0; 3]);
    match scenario.validate() {
        Err(HarnessError::Validation { field, .. }) => assert_eq!(field, "initial.theta0"),
        other => panic!("expected a validation error, got {other:?}"),
    }
}

#[test]
fn unknown_keys_are_rejected() {
    let text = small_scenario().to_toml().unwrap() + "\nnot_a_real_key = 1\n";
    assert!(Scenario::from_toml(&text).is_err());
}

#[test]
fn estimator_strings_parse() {
    assert_eq!(parse_estimator("exact").unwrap(), EstimatorMode::ExactStatevector);
    assert_eq!(
        parse_estimator("shots:5000").unwrap(),
        EstimatorMode::ShotBased { shots_per_expectation: 5000 }
    );
    assert!(parse_estimator("shots:0").is_err());
    assert!(parse_estimator("approximate").is_err());
}

#[test]
fn float_formatting_uses_full_precision_and_dot_separator() {
    let text = fmt_float(std::f64::consts::PI);
    assert!(text.contains('.'));
    let back: f64 = text.parse().unwrap();
    assert_eq!(back, std::f64::consts::PI);
}

#[test]
fn all_presets_parse_and_validate() {
    assert_eq!(PRESETS.len(), 23);
    for (name, _) in PRESETS {
        let scenario = preset_scenario(name).unwrap();
        assert_eq!(&scenario.name, name, "preset name must match its file");
        scenario.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn preset_listing_includes_required_scenario_families() {
    let names: Vec<String> = list_presets().into_iter().map(|(n, _)| n).collect();
    for required in [
        "fp-6q-vf1d2-momentum",
        "ho-6q-vf1d5-position",
        "eb-6q-vf2d5-ld-cut0",
        "eb-6q-vf2d5-ld-cut0p1",
        "eb-6q-vf2d5-ld-cut1",
        "ho-6q-b06-vf1d5-position",
        "mh-8q-vf1d25-ld",
        "width-study-b3",
        "mesh-study-ho-8q",
    ] {
        assert!(names.iter().any(|n| n == required), "missing preset {required}");
    }
}

#[test]
fn evolution_presets_embed_initial_parameters() {
    // Embedded θ0 keeps preset runs deterministic and fit-free.
    for (name, _) in PRESETS {
        let scenario = preset_scenario(name).unwrap();
        assert!(
            scenario.initial.theta0.is_some(),
            "preset {name} is missing embedded initial parameters"
        );
    }
}

#[test]
fn density_report_rejects_multidimensional_scenarios() {
    let scenario = preset_scenario("mh-8q-vf1d20-position").unwrap();
    match density_report(&scenario, &[0.1]) {
        Err(HarnessError::Validation { field, .. }) => assert_eq!(field, "grid.num_dims"),
        other => panic!("expected a validation error, got {other:?}"),
    }
    match width_spread_report(std::slice::from_ref(&scenario)) {
        Err(HarnessError::Validation { field, .. }) => assert_eq!(field, "grid.num_dims"),
        other => panic!("expected a validation error, got {other:?}"),
    }
}

#[test]
fn density_csv_has_header_and_unix_line_endings() {
    let scenario = preset_scenario("eb-6q-vf1d5-position").unwrap();
    let rows = density_report(&scenario, &[0.0, 0.1]).unwrap();
    let csv = density_csv(&rows);
    assert!(csv.starts_with("cut,density\n"));
    assert_eq!(csv.lines().count(), 3);
    assert!(!csv.contains('\r'));
}

#[test]
fn run_emits_trajectory_manifest_and_snapshots() {
    let scenario = small_scenario();
    let dir = temp_dir("artifacts");
    let artifacts = run_scenario(&scenario, &dir).unwrap();
    let trajectory = std::fs::read_to_string(&artifacts.trajectory_path).unwrap();
    let header = trajectory.lines().next().unwrap();
    assert!(header.starts_with("t,fidelity,energy,norm,theta_0"));
    assert_eq!(trajectory.lines().count(), 12, "header plus 11 record rows");

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&artifacts.manifest_path).unwrap()).unwrap();
    assert_eq!(manifest["name"], "small-free");
    assert_eq!(manifest["resolved"]["theta0_source"], "fit");
    assert_eq!(manifest["resolved"]["full_hilbert_space_params"], 14);
    assert!(manifest["resolved"]["theta0"].as_array().unwrap().len() > 0);
    assert!(manifest["results"]["solver_stats"]["rhs_evaluations"].as_u64().unwrap() > 0);

    // Default snapshots at t = 0 and t = t_total.
    assert_eq!(artifacts.snapshot_paths.len(), 2);
    let snapshot = std::fs::read_to_string(&artifacts.snapshot_paths[0]).unwrap();
    assert!(snapshot.starts_with("x0,prob_exact,prob_vte\n"));
    assert_eq!(snapshot.lines().count(), 9, "header plus 8 grid points");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn reruns_are_byte_identical() {
    let scenario = small_scenario();
    let dir_a = temp_dir("rerun-a");
    let dir_b = temp_dir("rerun-b");
    let a = run_scenario(&scenario, &dir_a).unwrap();
    let b = run_scenario(&scenario, &dir_b).unwrap();
    let csv_a = std::fs::read(&a.trajectory_path).unwrap();
    let csv_b = std::fs::read(&b.trajectory_path).unwrap();
    assert_eq!(csv_a, csv_b);
    for (pa, pb) in a.snapshot_paths.iter().zip(&b.snapshot_paths) {
        assert_eq!(std::fs::read(pa).unwrap(), std::fs::read(pb).unwrap());
    }
    std::fs::remove_dir_all(&dir_a).ok();
    std::fs::remove_dir_all(&dir_b).ok();
}

#[test]
fn snapshot_times_snap_to_recorded_grid() {
    let mut scenario = small_scenario();
    scenario.outputs.snapshot_times = Some(vec![0.103]);
    let dir = temp_dir("snap");
    let artifacts = run_scenario(&scenario, &dir).unwrap();
    assert_eq!(artifacts.snapshot_paths.len(), 1);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&artifacts.manifest_path).unwrap()).unwrap();
    let snap = &manifest["resolved"]["snapshots"][0];
    assert_eq!(snap["requested_time"], 0.103);
    // Record grid is 11 points over [0, 0.2]; nearest is 0.10.
    assert!((snap["time"].as_f64().unwrap() - 0.10).abs() < 1e-12);
    std::fs::remove_dir_all(&dir).ok();
}
