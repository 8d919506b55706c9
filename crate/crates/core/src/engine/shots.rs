//! Finite-sampling estimators for every quantity entering the equations of
//! motion, emulating the one-ancilla measurement protocols.
//!
//! Each estimated entry draws from its own counter-based RNG stream derived
//! from `(seed, entry id)`, so results are independent of thread scheduling.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ansatz::{derivative_states, prepare_state, Ansatz};
use crate::circuit::{apply_circuit, Circuit, DerivativeMode};
use crate::error::{CoreError, Result};
use crate::hamiltonian::GridHamiltonian;
use crate::state::Statevector;
use crate::C64;

use super::MetricAndForce;

/// RNG for one estimator entry: a fixed seed with a per-entry stream.
pub(super) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Estimates `⟨0|W1†·W2|0⟩` with the one-ancilla interference circuit
/// (Hadamard, controlled branches, ancilla X/Y readout), splitting `shots`
/// between the real and imaginary parts.
pub fn shot_overlap(
    circuit1: &Circuit,
    params1: &[f64],
    circuit2: &Circuit,
    params2: &[f64],
    shots: u64,
    seed: u64,
) -> Result<C64> {
    if circuit1.num_qubits() != circuit2.num_qubits() {
        return Err(CoreError::SizeMismatch {
            left: circuit1.num_qubits(),
            right: circuit2.num_qubits(),
        });
    }
    let zero = Statevector::zero_state(circuit1.num_qubits());
    let w1 = apply_circuit(circuit1, params1, &zero)?;
    let w2 = apply_circuit(circuit2, params2, &zero)?;
    shot_overlap_states(&w1, &w2, shots, &mut stream_rng(seed, 0))
}

/// Overlap estimator on already-prepared branch states: after the ancilla
/// Hadamard the register holds `(|0⟩w1 + |1⟩w2)/√2`, so the ancilla
/// expectations are `⟨X⟩ = Re⟨w1|w2⟩` and `⟨Y⟩ = Im⟨w1|w2⟩`.
pub fn shot_overlap_states(
    w1: &Statevector,
    w2: &Statevector,
    shots: u64,
    rng: &mut ChaCha8Rng,
) -> Result<C64> {
    if shots < 1 {
        return Err(CoreError::InvalidShotCount);
    }
    if w1.len() != w2.len() {
        return Err(CoreError::SizeMismatch { left: w1.len(), right: w2.len() });
    }
    let overlap: C64 = w1
        .amplitudes()
        .iter()
        .zip(w2.amplitudes())
        .map(|(a, b)| a.conj() * b)
        .sum();
    let shots_x = shots / 2 + shots % 2;
    let shots_y = shots / 2;
    let re = sample_pm_one(0.5 * (1.0 + overlap.re), shots_x, rng);
    let im = if shots_y > 0 {
        sample_pm_one(0.5 * (1.0 + overlap.im), shots_y, rng)
    } else {
        0.0
    };
    Ok(C64::new(re, im))
}

/// Mean of `shots` ±1 outcomes with success probability `p_plus`.
fn sample_pm_one(p_plus: f64, shots: u64, rng: &mut ChaCha8Rng) -> f64 {
    let p = p_plus.clamp(0.0, 1.0);
    let mut plus = 0u64;
    for _ in 0..shots {
        if rng.random::<f64>() < p {
            plus += 1;
        }
    }
    (2 * plus) as f64 / shots as f64 - 1.0
}

/// Mean of `shots` draws of `values[j]` from the (unnormalized) distribution
/// `weights`, normalized internally.
fn sample_weighted_mean(
    weights: &[f64],
    values: impl Fn(usize) -> f64,
    shots: u64,
    rng: &mut ChaCha8Rng,
) -> f64 {
    let mut cumulative = Vec::with_capacity(weights.len());
    let mut total = 0.0;
    for &w in weights {
        total += w.max(0.0);
        cumulative.push(total);
    }
    if total <= 0.0 {
        return 0.0;
    }
    let mut acc = 0.0;
    for _ in 0..shots {
        let u = rng.random::<f64>() * total;
        let j = cumulative.partition_point(|&c| c <= u).min(weights.len() - 1);
        acc += values(j);
    }
    acc / shots as f64
}

/// Joint ancilla/register sampling of `Re⟨w|D|u⟩` for a real diagonal `D`:
/// outcome probabilities `p(s, j) = |u_j + (−1)^s·w_j|²/4`, sampled value
/// `(−1)^s·D(j)`.
fn sampled_diagonal_interference(
    u: &Statevector,
    w: &Statevector,
    diagonal: &[f64],
    shots: u64,
    rng: &mut ChaCha8Rng,
) -> f64 {
    let n = diagonal.len();
    let mut weights = vec![0.0; 2 * n];
    for j in 0..n {
        let uj = u.amplitudes()[j];
        let wj = w.amplitudes()[j];
        weights[j] = 0.25 * (uj + wj).norm_sqr();
        weights[n + j] = 0.25 * (uj - wj).norm_sqr();
    }
    sample_weighted_mean(
        &weights,
        |idx| if idx < n { diagonal[idx] } else { -diagonal[idx - n] },
        shots,
        rng,
    )
}

/// Estimates `Re⟨φ|W_k†·H·U|φ⟩` for parameter `k` from ancilla-interference
/// samples: the potential part in the position basis and the kinetic part
/// with a QFT appended before the register measurement (`shots` each).
pub fn shot_force_entry(
    ansatz: &Ansatz,
    theta: &[f64],
    k: usize,
    ham: &GridHamiltonian,
    shots: u64,
    seed: u64,
) -> Result<f64> {
    if k >= ansatz.num_params() {
        return Err(CoreError::ParamIndexOutOfRange { index: k, num_params: ansatz.num_params() });
    }
    if shots < 1 {
        return Err(CoreError::InvalidShotCount);
    }
    let u = prepare_state(ansatz, theta)?;
    let derivs = derivative_states(ansatz, theta, DerivativeMode::Analytic)?;
    let w = doubled_derivative(&derivs[k]);
    force_entry_core(&u, &w, ham, shots, &mut stream_rng(seed, 0))
}

/// The unit-norm branch state `w = 2i·|∂ψ⟩` of the derivative protocol.
fn doubled_derivative(deriv: &Statevector) -> Statevector {
    let mut w = deriv.clone();
    w.scale(C64::new(0.0, 2.0));
    w
}

fn force_entry_core(
    u: &Statevector,
    w: &Statevector,
    ham: &GridHamiltonian,
    shots: u64,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let potential = sampled_diagonal_interference(u, w, ham.potential_values(), shots, rng);
    let mu = ham.to_momentum_basis(u)?;
    let mw = ham.to_momentum_basis(w)?;
    let kinetic_diagonal: Vec<f64> =
        ham.psquared_values().iter().map(|&p2| p2 / (2.0 * ham.mass())).collect();
    let kinetic = sampled_diagonal_interference(&mu, &mw, &kinetic_diagonal, shots, rng);
    Ok(potential + kinetic)
}

/// Scalar energy estimate `⟨ψ|H|ψ⟩` from direct sampling of the register in
/// the position and momentum bases (`shots` each).
pub fn shot_energy(
    ansatz: &Ansatz,
    theta: &[f64],
    ham: &GridHamiltonian,
    shots: u64,
    seed: u64,
) -> Result<f64> {
    if shots < 1 {
        return Err(CoreError::InvalidShotCount);
    }
    let psi = prepare_state(ansatz, theta)?;
    energy_core(&psi, ham, shots, &mut stream_rng(seed, 0))
}

fn energy_core(
    psi: &Statevector,
    ham: &GridHamiltonian,
    shots: u64,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let pot_weights = psi.probabilities();
    let potential =
        sample_weighted_mean(&pot_weights, |j| ham.potential_values()[j], shots, rng);
    let momentum = ham.to_momentum_basis(psi)?;
    let kin_weights = momentum.probabilities();
    let mass = ham.mass();
    let kinetic = sample_weighted_mean(
        &kin_weights,
        |j| ham.psquared_values()[j] / (2.0 * mass),
        shots,
        rng,
    );
    Ok(potential + kinetic)
}

/// Shot-based assembly of both sides of `M·θ̇ = V` via the measurement
/// protocols, with `shots` per estimated expectation value.
///
/// Writing `w_k = 2i·|∂_kψ⟩` (unit norm), the estimated quantities combine as
/// `M_kj = ¼·Re(⟨w_k|w_j⟩ − ⟨w_k|ψ⟩⟨ψ|w_j⟩)` and
/// `V_k = ½·Re⟨w_k|H|ψ⟩ − ⟨H⟩·½·Re⟨w_k|ψ⟩`.
pub fn assemble_metric_and_force_shots(
    ansatz: &Ansatz,
    theta: &[f64],
    ham: &GridHamiltonian,
    shots: u64,
    seed: u64,
) -> Result<MetricAndForce> {
    if shots < 1 {
        return Err(CoreError::InvalidShotCount);
    }
    if ansatz.num_qubits() != ham.grid().total_qubits() {
        return Err(CoreError::SizeMismatch {
            left: ansatz.num_qubits(),
            right: ham.grid().total_qubits(),
        });
    }
    let np = ansatz.num_params();
    let u = prepare_state(ansatz, theta)?;
    let derivs = derivative_states(ansatz, theta, DerivativeMode::Analytic)?;
    let branches: Vec<Statevector> = derivs.iter().map(doubled_derivative).collect();
    let np_u64 = np as u64;

    // Stream layout: gram pairs, then state overlaps, then force entries,
    // then the scalar energy. Entry ids are positional, not order-of-launch.
    let gram_stream = |k: usize, j: usize| (k as u64) * np_u64 + j as u64;
    let overlap_stream = |k: usize| np_u64 * np_u64 + k as u64;
    let force_stream = |k: usize| np_u64 * (np_u64 + 1) + k as u64;
    let energy_stream = np_u64 * (np_u64 + 2);

    let pairs: Vec<(usize, usize)> =
        (0..np).flat_map(|k| (k..np).map(move |j| (k, j))).collect();
    let grams: Vec<C64> = pairs
        .par_iter()
        .map(|&(k, j)| {
            let mut rng = stream_rng(seed, gram_stream(k, j));
            shot_overlap_states(&branches[k], &branches[j], shots, &mut rng)
        })
        .collect::<Result<_>>()?;
    let overlaps: Vec<C64> = (0..np)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, overlap_stream(k));
            shot_overlap_states(&branches[k], &u, shots, &mut rng)
        })
        .collect::<Result<_>>()?;
    let drives: Vec<f64> = (0..np)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, force_stream(k));
            force_entry_core(&u, &branches[k], ham, shots, &mut rng)
        })
        .collect::<Result<_>>()?;
    let energy = energy_core(&u, ham, shots, &mut stream_rng(seed, energy_stream))?;

    let mut metric = DMatrix::zeros(np, np);
    for (&(k, j), &gram) in pairs.iter().zip(&grams) {
        let value = 0.25 * (gram - overlaps[k] * overlaps[j].conj()).re;
        metric[(k, j)] = value;
        metric[(j, k)] = value;
    }
    let force = DVector::from_iterator(
        np,
        (0..np).map(|k| 0.5 * drives[k] - energy * 0.5 * overlaps[k].re),
    );
    Ok(MetricAndForce { metric, force })
}
