//! Fidelity-maximizing parameter fits: initial-state preparation and the
//! per-time expressivity probe.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;

use crate::ansatz::{derivative_states, prepare_state, Ansatz};
use crate::circuit::DerivativeMode;
use crate::error::{CoreError, Result};
use crate::hamiltonian::GridHamiltonian;
use crate::state::{inner_product, Statevector};

use super::shots::stream_rng;
use super::TrajectoryRecord;

/// Iteration cap of one gradient-ascent run.
const MAX_ITERS: usize = 500;
/// Armijo sufficient-increase constant for the backtracking line search.
const ARMIJO: f64 = 1e-4;

/// Outcome of a fidelity fit.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub theta: Vec<f64>,
    pub fidelity: f64,
    /// False when no restart reached the requested threshold (best-effort:
    /// the best parameters found are still returned).
    pub reached_threshold: bool,
}

/// Maximizes `|⟨target|ψ(θ)⟩|²` by gradient ascent from uniform-random starts
/// in `[−π, π]^num_params`, returning the first fit reaching `threshold` or
/// the best below-threshold result after `restarts` attempts.
pub fn fit_initial_params(
    ansatz: &Ansatz,
    target: &Statevector,
    threshold: f64,
    restarts: usize,
    seed: u64,
) -> Result<FitResult> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(CoreError::InvalidSpec("fit threshold must lie in (0, 1]".into()));
    }
    if target.num_qubits() != ansatz.num_qubits() {
        return Err(CoreError::SizeMismatch {
            left: target.num_qubits(),
            right: ansatz.num_qubits(),
        });
    }
    let np = ansatz.num_params();
    let mut best: Option<FitResult> = None;
    for restart in 0..restarts.max(1) {
        let mut rng = stream_rng(seed, restart as u64);
        let start: Vec<f64> = (0..np).map(|_| rng.random_range(-PI..PI)).collect();
        let (theta, fidelity) = fit_from_start(ansatz, target, &start, MAX_ITERS)?;
        if fidelity >= threshold {
            return Ok(FitResult { theta, fidelity, reached_threshold: true });
        }
        if best.as_ref().is_none_or(|b| fidelity > b.fidelity) {
            best = Some(FitResult { theta, fidelity, reached_threshold: false });
        }
    }
    Ok(best.expect("at least one restart ran"))
}

/// One gradient-ascent run from an explicit start, using the analytic
/// gradient `∂_k F = 2·Re(⟨target|∂_kψ⟩·⟨ψ|target⟩)` and a backtracking line
/// search. Returns the reached parameters and fidelity (never worse than the
/// start).
pub fn fit_from_start(
    ansatz: &Ansatz,
    target: &Statevector,
    start: &[f64],
    max_iters: usize,
) -> Result<(Vec<f64>, f64)> {
    let mut theta = start.to_vec();
    let mut fidelity = overlap_fidelity(ansatz, &theta, target)?;
    let mut step = 1.0;
    for _ in 0..max_iters {
        if fidelity >= 1.0 - 1e-14 {
            break;
        }
        let psi = prepare_state(ansatz, &theta)?;
        let overlap = inner_product(target, &psi)?;
        let derivs = derivative_states(ansatz, &theta, DerivativeMode::Analytic)?;
        let grad: Vec<f64> = derivs
            .par_iter()
            .map(|d| Ok(2.0 * (inner_product(target, d)? * overlap.conj()).re))
            .collect::<Result<_>>()?;
        let grad_sq: f64 = grad.iter().map(|g| g * g).sum();
        if grad_sq < 1e-20 {
            break;
        }
        let mut accepted = false;
        let mut trial = step;
        for _ in 0..45 {
            let candidate: Vec<f64> =
                theta.iter().zip(&grad).map(|(t, g)| t + trial * g).collect();
            let value = overlap_fidelity(ansatz, &candidate, target)?;
            if value >= fidelity + ARMIJO * trial * grad_sq {
                theta = candidate;
                fidelity = value;
                step = trial * 2.0;
                accepted = true;
                break;
            }
            trial *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok((theta, fidelity))
}

fn overlap_fidelity(ansatz: &Ansatz, theta: &[f64], target: &Statevector) -> Result<f64> {
    let psi = prepare_state(ansatz, theta)?;
    Ok(inner_product(target, &psi)?.norm_sqr())
}

/// Best attainable fidelity at every recorded time of a trajectory:
/// a warm-started fit from the trajectory's own parameters, topped up with
/// random restarts when still below `threshold`.
///
/// The result dominates the trajectory's fidelity curve pointwise, so the gap
/// separates ansatz-expressivity losses from propagation-inherent ones.
pub fn expressivity_probe(
    ansatz: &Ansatz,
    ham: &GridHamiltonian,
    psi0: &Statevector,
    trajectory: &TrajectoryRecord,
    threshold: f64,
    restarts: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if trajectory.times.is_empty() {
        return Err(CoreError::InvalidSpec("trajectory has no recorded times".into()));
    }
    let mut probe = Vec::with_capacity(trajectory.times.len());
    for (i, &t) in trajectory.times.iter().enumerate() {
        let exact = ham.exact_evolve(psi0, t)?;
        let (_, warm) = fit_from_start(ansatz, &exact, &trajectory.thetas[i], MAX_ITERS)?;
        let mut best = warm.max(trajectory.fidelities[i]);
        if best < threshold && restarts > 0 {
            let cold = fit_initial_params(
                ansatz,
                &exact,
                threshold,
                restarts,
                seed.wrapping_add(i as u64),
            )?;
            best = best.max(cold.fidelity);
        }
        probe.push(best);
    }
    Ok(probe)
}
