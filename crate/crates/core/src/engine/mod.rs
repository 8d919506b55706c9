//! The equation-of-motion engine: metric/force assembly, least-squares
//! parameter velocities, ODE integration of `M·θ̇ = V`, initial-parameter
//! fitting, and shot-based estimators for every measured quantity.

mod assemble;
mod evolve;
mod fit;
mod shots;
mod solve;

pub use assemble::{assemble_force, assemble_metric, assemble_metric_and_force};
pub use evolve::{evolve, fidelity};
pub use fit::{expressivity_probe, fit_from_start, fit_initial_params, FitResult};
pub use shots::{
    assemble_metric_and_force_shots, shot_energy, shot_overlap, shot_overlap_states,
    shot_force_entry,
};
pub use solve::solve_thetadot;

use nalgebra::{DMatrix, DVector};

use crate::circuit::DerivativeMode;
use crate::error::{CoreError, Result};

/// How expectation values are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorMode {
    /// Exact matrix-vector emulation (the default).
    ExactStatevector,
    /// One-ancilla measurement protocols with finite sampling. This mode is a
    /// validation facility; using it inside `evolve` is supported but
    /// experimental.
    ShotBased { shots_per_expectation: u64 },
}

/// ODE solver selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolverKind {
    /// Adaptive Runge-Kutta of order 5(4) (Dormand-Prince).
    AdaptiveRK45,
    /// Explicit Runge-Kutta of order 8 (DOP853-style).
    ExplicitRK8,
    /// Classical fixed-step fourth-order Runge-Kutta.
    FixedRK4 { step: f64 },
}

/// Numerical-method knobs for one evolution run.
#[derive(Debug, Clone)]
pub struct EvolutionConfig {
    /// Forward finite-difference step for wavefunction derivatives.
    pub epsilon: f64,
    /// Relative singular-value cutoff when pseudo-inverting the metric.
    pub rcond: f64,
    pub solver: SolverKind,
    pub rtol: f64,
    pub atol: f64,
    /// Optional cap on the solver step size.
    pub max_step: Option<f64>,
    /// Cap on the number of solver steps before giving up.
    pub max_steps: usize,
    pub t_total: f64,
    /// Sorted times in `[0, t_total]` at which the trajectory is recorded
    /// (dense-output interpolation, so the grid is solver-independent).
    pub record_times: Vec<f64>,
    pub estimator: EstimatorMode,
    pub rng_seed: u64,
    /// Whether derivative states use the finite-difference default or the
    /// analytic construction (the recommended production mode).
    pub analytic_derivatives: bool,
}

impl EvolutionConfig {
    /// Defaults mirroring the reference emulation setup: forward differences
    /// with step 1e-8, `rcond` 1e-6, adaptive RK 5(4) with `rtol` 1e-6 /
    /// `atol` 1e-8, exact estimator, and 151 uniform record times.
    pub fn new(t_total: f64) -> Self {
        Self {
            epsilon: 1e-8,
            rcond: 1e-6,
            solver: SolverKind::AdaptiveRK45,
            rtol: 1e-6,
            atol: 1e-8,
            max_step: None,
            max_steps: 10_000_000,
            t_total,
            record_times: uniform_record_times(t_total, 151),
            estimator: EstimatorMode::ExactStatevector,
            rng_seed: 0,
            analytic_derivatives: false,
        }
    }

    /// The derivative mode implied by the config.
    pub fn derivative_mode(&self) -> DerivativeMode {
        if self.analytic_derivatives {
            DerivativeMode::Analytic
        } else {
            DerivativeMode::ForwardDifference(self.epsilon)
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("epsilon", self.epsilon),
            ("rcond", self.rcond),
            ("rtol", self.rtol),
            ("atol", self.atol),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(CoreError::InvalidSpec(format!("{name} must be positive and finite")));
            }
        }
        if self.t_total < 0.0 || !self.t_total.is_finite() {
            return Err(CoreError::InvalidSpec("t_total must be nonnegative and finite".into()));
        }
        if let Some(h) = self.max_step {
            if !(h > 0.0) {
                return Err(CoreError::InvalidSpec("max_step must be positive".into()));
            }
        }
        if self.max_steps == 0 {
            return Err(CoreError::InvalidSpec("max_steps must be positive".into()));
        }
        if let SolverKind::FixedRK4 { step } = self.solver {
            if !(step > 0.0) {
                return Err(CoreError::InvalidSpec("fixed RK4 step must be positive".into()));
            }
        }
        if self.record_times.is_empty() {
            return Err(CoreError::InvalidSpec("record_times must not be empty".into()));
        }
        if self.record_times.windows(2).any(|w| w[0] > w[1]) {
            return Err(CoreError::InvalidSpec("record_times must be sorted".into()));
        }
        let tolerance = 1e-12 * self.t_total.max(1.0);
        if self.record_times[0] < -tolerance
            || *self.record_times.last().unwrap() > self.t_total + tolerance
        {
            return Err(CoreError::InvalidSpec("record_times must lie in [0, t_total]".into()));
        }
        if let EstimatorMode::ShotBased { shots_per_expectation } = self.estimator {
            if shots_per_expectation < 1 {
                return Err(CoreError::InvalidShotCount);
            }
        }
        Ok(())
    }
}

/// `count` uniform record times over `[0, t_total]`.
pub fn uniform_record_times(t_total: f64, count: usize) -> Vec<f64> {
    if count <= 1 || t_total == 0.0 {
        return vec![0.0];
    }
    (0..count).map(|i| t_total * i as f64 / (count - 1) as f64).collect()
}

/// Step counters reported by the ODE solver.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evaluations: usize,
}

/// Full time-series output of one evolution run.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    /// Parameter vectors, one row per recorded time.
    pub thetas: Vec<Vec<f64>>,
    pub fidelities: Vec<f64>,
    pub energies: Vec<f64>,
    pub norms: Vec<f64>,
    pub solver_stats: SolverStats,
}

/// The assembled equation-of-motion data at one parameter point.
#[derive(Debug, Clone)]
pub struct MetricAndForce {
    /// Symmetric positive-semidefinite Fubini-Study metric.
    pub metric: DMatrix<f64>,
    /// Projection of the exact time derivative onto the manifold.
    pub force: DVector<f64>,
}
