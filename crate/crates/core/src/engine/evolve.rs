//! Time integration of the equations of motion and fidelity evaluation.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use differential_equations::methods::ExplicitRungeKutta;
use differential_equations::ode::ODE;
use differential_equations::ivp::IVP;
use differential_equations::status::Status;

use crate::ansatz::{prepare_state, Ansatz};
use crate::error::{CoreError, Result};
use crate::hamiltonian::GridHamiltonian;
use crate::state::{inner_product, Statevector};

use super::assemble::assemble_metric_and_force;
use super::shots::assemble_metric_and_force_shots;
use super::solve::solve_thetadot;
use super::{EstimatorMode, EvolutionConfig, SolverKind, SolverStats, TrajectoryRecord};

/// Fidelity of the trial state against exact propagation:
/// `|⟨exact_evolve(ψ0, t)|ψ(θ)⟩|²`.
pub fn fidelity(
    ansatz: &Ansatz,
    theta: &[f64],
    ham: &GridHamiltonian,
    psi0: &Statevector,
    t: f64,
) -> Result<f64> {
    let exact = ham.exact_evolve(psi0, t)?;
    let trial = prepare_state(ansatz, theta)?;
    Ok(inner_product(&exact, &trial)?.norm_sqr())
}

/// The right-hand side `θ̇ = M⁺V` evaluated through the ODE solver's
/// callback, which cannot return errors: failures are parked in a slot and
/// surfaced after the solver stops on the poisoned (NaN) derivative.
struct EquationOfMotion<'a> {
    ansatz: &'a Ansatz,
    ham: &'a GridHamiltonian,
    config: &'a EvolutionConfig,
    evals: AtomicU64,
    failure: Mutex<Option<(f64, CoreError)>>,
}

impl EquationOfMotion<'_> {
    fn rhs(&self, theta: &[f64]) -> Result<Vec<f64>> {
        let mf = match self.config.estimator {
            EstimatorMode::ExactStatevector => assemble_metric_and_force(
                self.ansatz,
                theta,
                self.ham,
                self.config.derivative_mode(),
            )?,
            EstimatorMode::ShotBased { shots_per_expectation } => {
                // A fresh seed per evaluation keeps samples independent along
                // the trajectory while staying deterministic for fixed config.
                let eval = self.evals.fetch_add(1, Ordering::Relaxed);
                let seed = splitmix64(self.config.rng_seed ^ splitmix64(eval));
                assemble_metric_and_force_shots(
                    self.ansatz,
                    theta,
                    self.ham,
                    shots_per_expectation,
                    seed,
                )?
            }
        };
        let thetadot = solve_thetadot(&mf.metric, &mf.force, self.config.rcond)?;
        Ok(thetadot.iter().copied().collect())
    }

    fn record_failure(&self, t: f64, error: CoreError) {
        let mut slot = self.failure.lock().expect("failure slot poisoned");
        if slot.is_none() {
            *slot = Some((t, error));
        }
    }
}

impl ODE<f64, Vec<f64>> for EquationOfMotion<'_> {
    fn diff(&self, t: f64, theta: &Vec<f64>, thetadot: &mut Vec<f64>) {
        match self.rhs(theta) {
            Ok(v) if v.iter().all(|x| x.is_finite()) => thetadot.copy_from_slice(&v),
            Ok(_) => {
                self.record_failure(t, CoreError::NonFiniteVelocity { t });
                thetadot.fill(f64::NAN);
            }
            Err(error) => {
                self.record_failure(t, error);
                thetadot.fill(f64::NAN);
            }
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Integrates `M·θ̇ = V` from `θ0` over `[0, t_total]` and records parameters,
/// fidelity (against exact propagation of `reference`, or of `|ψ(θ0)⟩` when
/// `reference` is `None`), energy, and norm at the configured record times
/// via dense-output interpolation.
pub fn evolve(
    ansatz: &Ansatz,
    ham: &GridHamiltonian,
    theta0: &[f64],
    reference: Option<&Statevector>,
    config: &EvolutionConfig,
) -> Result<TrajectoryRecord> {
    config.validate()?;
    if theta0.len() != ansatz.num_params() {
        return Err(CoreError::ParamCountMismatch {
            expected: ansatz.num_params(),
            got: theta0.len(),
        });
    }
    if ansatz.num_qubits() != ham.grid().total_qubits() {
        return Err(CoreError::SizeMismatch {
            left: ansatz.num_qubits(),
            right: ham.grid().total_qubits(),
        });
    }
    let psi0 = match reference {
        Some(state) => state.clone(),
        None => prepare_state(ansatz, theta0)?,
    };
    if psi0.num_qubits() != ansatz.num_qubits() {
        return Err(CoreError::SizeMismatch {
            left: psi0.num_qubits(),
            right: ansatz.num_qubits(),
        });
    }

    if config.t_total == 0.0 {
        let thetas = vec![theta0.to_vec(); config.record_times.len()];
        return finish_record(
            ansatz,
            ham,
            &psi0,
            config.record_times.clone(),
            thetas,
            SolverStats::default(),
        );
    }

    let system = EquationOfMotion {
        ansatz,
        ham,
        config,
        evals: AtomicU64::new(0),
        failure: Mutex::new(None),
    };
    let y0 = theta0.to_vec();
    // The solver may stop a few ulps short of t_total (its termination test is
    // |t_total - t| ≤ 10·ε), and evaluation points beyond the stopping time
    // are silently dropped. Pull end-of-interval record times just inside the
    // reachable range so they are always interpolated, and restore the
    // requested values afterwards.
    let end_margin = 1e-13 * config.t_total.abs().max(1.0);
    let eval_times: Vec<f64> = config
        .record_times
        .iter()
        .map(|&t| t.min(config.t_total - end_margin).max(0.0))
        .collect();
    let solved = match config.solver {
        SolverKind::AdaptiveRK45 => {
            let mut method = ExplicitRungeKutta::dopri5()
                .rtol(config.rtol)
                .atol(config.atol)
                .max_steps(config.max_steps);
            if let Some(h) = config.max_step {
                method = method.h_max(h);
            }
            IVP::ode(&system, 0.0, config.t_total, y0)
                .t_eval(&eval_times)
                .method(method)
                .solve()
        }
        SolverKind::ExplicitRK8 => {
            let mut method = ExplicitRungeKutta::dop853()
                .rtol(config.rtol)
                .atol(config.atol)
                .max_steps(config.max_steps);
            if let Some(h) = config.max_step {
                method = method.h_max(h);
            }
            IVP::ode(&system, 0.0, config.t_total, y0)
                .t_eval(&eval_times)
                .method(method)
                .solve()
        }
        SolverKind::FixedRK4 { step } => IVP::ode(&system, 0.0, config.t_total, y0)
            .t_eval(&eval_times)
            .method(ExplicitRungeKutta::rk4(step).max_steps(config.max_steps))
            .solve(),
    };

    // An assembly failure takes precedence over the solver's own diagnostic,
    // which only ever sees the poisoned derivative.
    if let Some((t, error)) = system.failure.lock().expect("failure slot poisoned").take() {
        return Err(match error {
            CoreError::SolverFailure { message, .. } => {
                CoreError::SolverFailure { message, t_reached: t }
            }
            other => other,
        });
    }
    let solution = solved.map_err(|e| CoreError::SolverFailure {
        message: format!("{e:?}"),
        t_reached: f64::NAN,
    })?;
    if let Status::Error(e) = &solution.status {
        return Err(CoreError::SolverFailure {
            message: format!("{e:?}"),
            t_reached: solution.t.last().copied().unwrap_or(f64::NAN),
        });
    }

    let stats = SolverStats {
        accepted_steps: solution.steps.accepted,
        rejected_steps: solution.steps.rejected,
        rhs_evaluations: solution.evals.function,
    };
    let times = if solution.t.len() == config.record_times.len() {
        config.record_times.clone()
    } else {
        solution.t
    };
    finish_record(ansatz, ham, &psi0, times, solution.y, stats)
}

/// Computes the derived per-time observables and packs the record.
fn finish_record(
    ansatz: &Ansatz,
    ham: &GridHamiltonian,
    psi0: &Statevector,
    times: Vec<f64>,
    thetas: Vec<Vec<f64>>,
    solver_stats: SolverStats,
) -> Result<TrajectoryRecord> {
    let mut fidelities = Vec::with_capacity(times.len());
    let mut energies = Vec::with_capacity(times.len());
    let mut norms = Vec::with_capacity(times.len());
    for (&t, theta) in times.iter().zip(&thetas) {
        let trial = prepare_state(ansatz, theta)?;
        let exact = ham.exact_evolve(psi0, t)?;
        fidelities.push(inner_product(&exact, &trial)?.norm_sqr());
        energies.push(ham.energy_expectation(&trial)?);
        norms.push(trial.norm());
    }
    Ok(TrajectoryRecord { times, thetas, fidelities, energies, norms, solver_stats })
}
