//! Exact assembly of the equation-of-motion metric and force.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::ansatz::{derivative_states, prepare_state, Ansatz};
use crate::circuit::DerivativeMode;
use crate::error::{CoreError, Result};
use crate::hamiltonian::GridHamiltonian;
use crate::state::{inner_product, Statevector};

use super::MetricAndForce;

/// Metric `M_kj = Re(⟨∂_kψ|∂_jψ⟩ − ⟨∂_kψ|ψ⟩⟨ψ|∂_jψ⟩)`, with the second
/// (global-phase) term always included.
pub fn assemble_metric(
    ansatz: &Ansatz,
    theta: &[f64],
    mode: DerivativeMode,
) -> Result<DMatrix<f64>> {
    let psi = prepare_state(ansatz, theta)?;
    let derivs = derivative_states(ansatz, theta, mode)?;
    metric_from_states(&derivs, &psi)
}

/// Force `V_k = Im(⟨∂_kψ|H|ψ⟩ − ⟨∂_kψ|ψ⟩⟨ψ|H|ψ⟩)`, with `H|ψ⟩` applied via
/// the two-basis split (no dense matrix).
pub fn assemble_force(
    ansatz: &Ansatz,
    theta: &[f64],
    ham: &GridHamiltonian,
    mode: DerivativeMode,
) -> Result<DVector<f64>> {
    check_layout(ansatz, ham)?;
    let psi = prepare_state(ansatz, theta)?;
    let derivs = derivative_states(ansatz, theta, mode)?;
    force_from_states(&derivs, &psi, ham)
}

/// Both sides of `M·θ̇ = V` sharing one derivative-state evaluation.
pub fn assemble_metric_and_force(
    ansatz: &Ansatz,
    theta: &[f64],
    ham: &GridHamiltonian,
    mode: DerivativeMode,
) -> Result<MetricAndForce> {
    check_layout(ansatz, ham)?;
    let psi = prepare_state(ansatz, theta)?;
    let derivs = derivative_states(ansatz, theta, mode)?;
    Ok(MetricAndForce {
        metric: metric_from_states(&derivs, &psi)?,
        force: force_from_states(&derivs, &psi, ham)?,
    })
}

fn check_layout(ansatz: &Ansatz, ham: &GridHamiltonian) -> Result<()> {
    if ansatz.num_qubits() != ham.grid().total_qubits() {
        return Err(CoreError::SizeMismatch {
            left: ansatz.num_qubits(),
            right: ham.grid().total_qubits(),
        });
    }
    Ok(())
}

pub(super) fn metric_from_states(
    derivs: &[Statevector],
    psi: &Statevector,
) -> Result<DMatrix<f64>> {
    let np = derivs.len();
    let overlaps = derivs.iter().map(|d| inner_product(d, psi)).collect::<Result<Vec<_>>>()?;
    // Upper-triangle rows in parallel; the matrix is symmetric by construction.
    let rows: Vec<Vec<f64>> = (0..np)
        .into_par_iter()
        .map(|k| {
            (k..np)
                .map(|j| {
                    let gram = inner_product(&derivs[k], &derivs[j])?;
                    Ok((gram - overlaps[k] * overlaps[j].conj()).re)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut m = DMatrix::zeros(np, np);
    for (k, row) in rows.iter().enumerate() {
        for (offset, &value) in row.iter().enumerate() {
            let j = k + offset;
            m[(k, j)] = value;
            m[(j, k)] = value;
        }
    }
    Ok(m)
}

pub(super) fn force_from_states(
    derivs: &[Statevector],
    psi: &Statevector,
    ham: &GridHamiltonian,
) -> Result<DVector<f64>> {
    let hpsi = ham.apply(psi)?;
    let energy = inner_product(psi, &hpsi)?.re;
    let entries = derivs
        .par_iter()
        .map(|d| {
            let drive = inner_product(d, &hpsi)?;
            let overlap = inner_product(d, psi)?;
            Ok((drive - overlap * energy).im)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(DVector::from_vec(entries))
}
