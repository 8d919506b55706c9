//! Scenario configuration: the TOML schema and its translation into core
//! simulation objects.
//!
//! A scenario file describes one complete experiment: the spatial grid, the
//! potential, the initial wavepacket, the variational ansatz and its basis
//! space, the numerical evolution settings, the initial-parameter policy, and
//! the requested output artifacts. See `docs/config-schema.md` for the full
//! field reference.

use serde::{Deserialize, Serialize};

use qvte_core::ansatz::{build_ansatz, Ansatz, RegisterLayout, SpaceWrapper, VariationalFormId};
use qvte_core::diag::per_dimension_diagonalizers_with_cut;
use qvte_core::engine::{
    uniform_record_times, EstimatorMode, EvolutionConfig, SolverKind,
};
use qvte_core::grid::GridSpec;
use qvte_core::hamiltonian::GridHamiltonian;
use qvte_core::potential::PotentialSpec;
use qvte_core::state::Statevector;
use qvte_core::wavepacket::{gaussian_wavepacket, WavepacketParams};

use crate::error::{HarnessError, Result};

/// Spatial grid section.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub num_dims: usize,
    pub qubits_per_dim: usize,
    pub lengths: Vec<f64>,
    pub origins: Vec<f64>,
}

/// Potential section, tagged by `kind`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PotentialConfig {
    Free,
    Harmonic { c1: f64 },
    Eckart { c2: f64, c3: f64 },
    MexicanHat { c4: f64, c5: f64 },
    Tabulated { values: Vec<f64> },
}

/// Initial Gaussian wavepacket section (one entry per dimension).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WavepacketConfig {
    pub x0: Vec<f64>,
    pub p0: Vec<f64>,
    pub width: Vec<f64>,
}

/// Variational-form section.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzConfig {
    /// Form identifier, `vf1` through `vf8`.
    pub form: String,
    #[serde(default)]
    pub depth: usize,
    /// Basis space: `position`, `momentum`, `local-diagonal`, or `mixed`.
    #[serde(default = "default_space")]
    pub space: String,
    /// Threshold for the partial diagonalizers (`local-diagonal` only).
    #[serde(default)]
    pub cut: f64,
    /// Depth of the position-space part (`mixed` only).
    #[serde(default)]
    pub position_depth: usize,
    /// Depth of the momentum-space part (`mixed` only).
    #[serde(default)]
    pub momentum_depth: usize,
}

fn default_space() -> String {
    "position".into()
}

/// Numerical evolution section.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionSection {
    pub t_total: f64,
    /// `adaptive-rk45`, `explicit-rk8`, or `fixed-rk4`.
    #[serde(default = "default_solver")]
    pub solver: String,
    /// Step size (`fixed-rk4` only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default = "default_rcond")]
    pub rcond: f64,
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    #[serde(default = "default_atol")]
    pub atol: f64,
    /// Forward-difference step used when `analytic_derivatives` is off.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_step: Option<f64>,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    /// Number of uniformly spaced record times over `[0, t_total]`.
    #[serde(default = "default_record_points")]
    pub record_points: usize,
    /// Seed for shot-based estimators.
    #[serde(default)]
    pub seed: u64,
    /// `exact` or `shots:<count>`.
    #[serde(default = "default_estimator")]
    pub estimator: String,
    #[serde(default = "default_true")]
    pub analytic_derivatives: bool,
}

fn default_solver() -> String {
    "adaptive-rk45".into()
}
fn default_rcond() -> f64 {
    1e-6
}
fn default_rtol() -> f64 {
    1e-6
}
fn default_atol() -> f64 {
    1e-8
}
fn default_epsilon() -> f64 {
    1e-8
}
fn default_max_steps() -> usize {
    10_000_000
}
fn default_record_points() -> usize {
    151
}
fn default_estimator() -> String {
    "exact".into()
}
fn default_true() -> bool {
    true
}

/// Initial-parameter policy: either an embedded vector (the default for
/// reproducible preset runs) or an on-the-fly fidelity fit.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    /// Pre-fit parameter vector; when absent, a fit is run at load time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta0: Option<Vec<f64>>,
    #[serde(default = "default_fit_threshold")]
    pub fit_threshold: f64,
    #[serde(default = "default_fit_restarts")]
    pub fit_restarts: usize,
    #[serde(default)]
    pub fit_seed: u64,
    /// Fidelity reference: `wavepacket` (exact evolution of the configured
    /// Gaussian) or `ansatz` (exact evolution of the prepared trial state).
    #[serde(default = "default_reference")]
    pub reference: String,
}

fn default_fit_threshold() -> f64 {
    0.99
}
fn default_fit_restarts() -> usize {
    10
}
fn default_reference() -> String {
    "wavepacket".into()
}

impl Default for InitialSection {
    fn default() -> Self {
        Self {
            theta0: None,
            fit_threshold: default_fit_threshold(),
            fit_restarts: default_fit_restarts(),
            fit_seed: 0,
            reference: default_reference(),
        }
    }
}

/// Requested artifacts beyond the always-written trajectory and manifest.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsSection {
    /// Times at which probability-density snapshots are written; defaults to
    /// the endpoints `{0, t_total}`. Each requested time snaps to the nearest
    /// recorded trajectory time.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_times: Option<Vec<f64>>,
}

/// One complete experiment description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub grid: GridConfig,
    #[serde(default = "default_mass")]
    pub mass: f64,
    pub potential: PotentialConfig,
    pub wavepacket: WavepacketConfig,
    pub ansatz: AnsatzConfig,
    pub evolution: EvolutionSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub outputs: OutputsSection,
}

fn default_mass() -> f64 {
    1.0
}

impl Scenario {
    /// Parses a scenario from TOML text.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text)
            .map_err(|e| HarnessError::validation("config", e.to_string()))
    }

    /// Serializes the scenario back to TOML (used by the `fit` command to
    /// emit preset files with embedded parameters).
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self)
            .map_err(|e| HarnessError::numerical(format!("serializing config: {e}")))
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        GridSpec::new(
            self.grid.num_dims,
            self.grid.qubits_per_dim,
            self.grid.lengths.clone(),
            self.grid.origins.clone(),
        )
        .map_err(|e| HarnessError::validation("grid", e.to_string()))
    }

    pub fn potential_spec(&self) -> PotentialSpec {
        match &self.potential {
            PotentialConfig::Free => PotentialSpec::Free,
            PotentialConfig::Harmonic { c1 } => PotentialSpec::Harmonic { c1: *c1 },
            PotentialConfig::Eckart { c2, c3 } => PotentialSpec::Eckart { c2: *c2, c3: *c3 },
            PotentialConfig::MexicanHat { c4, c5 } => {
                PotentialSpec::MexicanHat { c4: *c4, c5: *c5 }
            }
            PotentialConfig::Tabulated { values } => {
                PotentialSpec::Tabulated { values: values.clone() }
            }
        }
    }

    pub fn hamiltonian(&self) -> Result<GridHamiltonian> {
        let spec = self.grid_spec()?;
        GridHamiltonian::new(spec, self.mass, &self.potential_spec())
            .map_err(|e| HarnessError::validation("potential", e.to_string()))
    }

    pub fn wavepacket_state(&self) -> Result<Statevector> {
        let spec = self.grid_spec()?;
        let wp = WavepacketParams {
            x0: self.wavepacket.x0.clone(),
            p0: self.wavepacket.p0.clone(),
            width: self.wavepacket.width.clone(),
        };
        gaussian_wavepacket(&spec, &wp)
            .map_err(|e| HarnessError::validation("wavepacket", e.to_string()))
    }

    pub fn form_id(&self) -> Result<VariationalFormId> {
        self.ansatz
            .form
            .parse()
            .map_err(|_| {
                HarnessError::validation(
                    "ansatz.form",
                    format!("unknown variational form `{}`", self.ansatz.form),
                )
            })
    }

    /// Builds the configured ansatz; the Hamiltonian is needed for the
    /// local-diagonal wrapper's per-dimension eigenbases.
    pub fn build_ansatz(&self, ham: &GridHamiltonian) -> Result<Ansatz> {
        let form = self.form_id()?;
        let layout = RegisterLayout {
            num_dims: self.grid.num_dims,
            qubits_per_dim: self.grid.qubits_per_dim,
        };
        let wrapper = match self.ansatz.space.as_str() {
            "position" => SpaceWrapper::Position,
            "momentum" => SpaceWrapper::Momentum,
            "local-diagonal" => {
                if !(self.ansatz.cut >= 0.0) {
                    return Err(HarnessError::validation(
                        "ansatz.cut",
                        "cut must be nonnegative",
                    ));
                }
                let diags = per_dimension_diagonalizers_with_cut(ham, self.ansatz.cut)
                    .map_err(|e| HarnessError::validation("ansatz.cut", e.to_string()))?;
                let blocks = diags
                    .iter()
                    .enumerate()
                    .map(|(dim, d)| d.to_register_unitary(dim * layout.qubits_per_dim))
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| HarnessError::validation("ansatz", e.to_string()))?;
                SpaceWrapper::LocalDiagonal(blocks)
            }
            "mixed" => SpaceWrapper::Mixed {
                position_depth: self.ansatz.position_depth,
                momentum_depth: self.ansatz.momentum_depth,
            },
            other => {
                return Err(HarnessError::validation(
                    "ansatz.space",
                    format!("unknown basis space `{other}`"),
                ))
            }
        };
        build_ansatz(form, layout, self.ansatz.depth, wrapper)
            .map_err(|e| HarnessError::validation("ansatz", e.to_string()))
    }

    pub fn solver_kind(&self) -> Result<SolverKind> {
        match self.evolution.solver.as_str() {
            "adaptive-rk45" => Ok(SolverKind::AdaptiveRK45),
            "explicit-rk8" => Ok(SolverKind::ExplicitRK8),
            "fixed-rk4" => {
                let step = self.evolution.step.ok_or_else(|| {
                    HarnessError::validation(
                        "evolution.step",
                        "fixed-rk4 requires an explicit step size",
                    )
                })?;
                Ok(SolverKind::FixedRK4 { step })
            }
            other => Err(HarnessError::validation(
                "evolution.solver",
                format!("unknown solver `{other}`"),
            )),
        }
    }

    pub fn estimator_mode(&self) -> Result<EstimatorMode> {
        parse_estimator(&self.evolution.estimator)
    }

    /// Assembles the engine-level evolution config.
    pub fn evolution_config(&self) -> Result<EvolutionConfig> {
        let e = &self.evolution;
        let mut config = EvolutionConfig::new(e.t_total);
        config.solver = self.solver_kind()?;
        config.rcond = e.rcond;
        config.rtol = e.rtol;
        config.atol = e.atol;
        config.epsilon = e.epsilon;
        config.max_step = e.max_step;
        config.max_steps = e.max_steps;
        config.record_times = uniform_record_times(e.t_total, e.record_points);
        config.estimator = self.estimator_mode()?;
        config.rng_seed = e.seed;
        config.analytic_derivatives = e.analytic_derivatives;
        config
            .validate()
            .map_err(|err| HarnessError::validation("evolution", err.to_string()))?;
        Ok(config)
    }

    /// Requested snapshot times, defaulting to the interval endpoints.
    pub fn snapshot_times(&self) -> Vec<f64> {
        match &self.outputs.snapshot_times {
            Some(times) => times.clone(),
            None => {
                if self.evolution.t_total == 0.0 {
                    vec![0.0]
                } else {
                    vec![0.0, self.evolution.t_total]
                }
            }
        }
    }

    /// Cross-field validation beyond what the typed schema enforces. Builds
    /// every component once so errors surface before any files are written.
    pub fn validate(&self) -> Result<()> {
        let ham = self.hamiltonian()?;
        self.wavepacket_state()?;
        let ansatz = self.build_ansatz(&ham)?;
        self.evolution_config()?;
        if let Some(theta0) = &self.initial.theta0 {
            if theta0.len() != ansatz.num_params() {
                return Err(HarnessError::validation(
                    "initial.theta0",
                    format!(
                        "expected {} parameters, found {}",
                        ansatz.num_params(),
                        theta0.len()
                    ),
                ));
            }
        }
        if !(self.initial.fit_threshold > 0.0 && self.initial.fit_threshold <= 1.0) {
            return Err(HarnessError::validation(
                "initial.fit_threshold",
                "threshold must lie in (0, 1]",
            ));
        }
        match self.initial.reference.as_str() {
            "wavepacket" | "ansatz" => {}
            other => {
                return Err(HarnessError::validation(
                    "initial.reference",
                    format!("unknown reference `{other}`"),
                ))
            }
        }
        for &t in &self.snapshot_times() {
            if !(0.0..=self.evolution.t_total).contains(&t) && self.evolution.t_total > 0.0 {
                return Err(HarnessError::validation(
                    "outputs.snapshot_times",
                    format!("snapshot time {t} outside [0, t_total]"),
                ));
            }
        }
        Ok(())
    }
}

/// Parses `exact` or `shots:<count>` into an estimator mode.
pub fn parse_estimator(text: &str) -> Result<EstimatorMode> {
    if text == "exact" {
        return Ok(EstimatorMode::ExactStatevector);
    }
    if let Some(count) = text.strip_prefix("shots:") {
        let shots: u64 = count.parse().map_err(|_| {
            HarnessError::validation(
                "evolution.estimator",
                format!("invalid shot count `{count}`"),
            )
        })?;
        if shots == 0 {
            return Err(HarnessError::validation(
                "evolution.estimator",
                "shot count must be positive",
            ));
        }
        return Ok(EstimatorMode::ShotBased { shots_per_expectation: shots });
    }
    Err(HarnessError::validation(
        "evolution.estimator",
        format!("expected `exact` or `shots:<count>`, found `{text}`"),
    ))
}
