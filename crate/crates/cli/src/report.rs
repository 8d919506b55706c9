//! Derived reports: Hamiltonian sparsity under thresholding and wavepacket
//! width spreading under exact propagation.

use qvte_core::diag::threshold_matrix;
use qvte_core::grid::build_grids;
use qvte_core::state::Statevector;

use crate::config::Scenario;
use crate::error::{HarnessError, Result};
use crate::run::fmt_float;

/// One row of the thresholding report.
#[derive(Debug, Clone, Copy)]
pub struct DensityRow {
    pub cut: f64,
    /// Fraction of matrix entries retained at this cut.
    pub density: f64,
}

/// Retained-entry densities of the scenario's dense Hamiltonian under each
/// threshold cut. Only defined for one-dimensional scenarios, where the
/// dense matrix is the object the local-diagonal construction thresholds.
pub fn density_report(scenario: &Scenario, cuts: &[f64]) -> Result<Vec<DensityRow>> {
    if scenario.grid.num_dims != 1 {
        return Err(HarnessError::validation(
            "grid.num_dims",
            "density report is defined for one-dimensional scenarios only",
        ));
    }
    let ham = scenario.hamiltonian()?;
    let dense = ham
        .dense_matrix()
        .map_err(|e| HarnessError::numerical(e.to_string()))?;
    cuts.iter()
        .map(|&cut| {
            let (_, density) = threshold_matrix(&dense, cut)
                .map_err(|e| HarnessError::validation("cuts", e.to_string()))?;
            Ok(DensityRow { cut, density })
        })
        .collect()
}

/// CSV body for a density report.
pub fn density_csv(rows: &[DensityRow]) -> String {
    let mut out = String::from("cut,density\n");
    for row in rows {
        out.push_str(&fmt_float(row.cut));
        out.push(',');
        out.push_str(&fmt_float(row.density));
        out.push('\n');
    }
    out
}

/// One row of the width-spread report.
#[derive(Debug, Clone, Copy)]
pub struct WidthRow {
    /// Configured initial width parameter B.
    pub width_b: f64,
    pub initial_width: f64,
    pub final_width: f64,
    pub difference: f64,
}

/// Position-density width `√(⟨x²⟩ − ⟨x⟩²)` on the periodic grid, with both
/// moments taken about the density maximum so a packet that wraps around the
/// box boundary is not artificially widened.
pub fn density_width(probabilities: &[f64], positions: &[f64], length: f64) -> f64 {
    let peak = probabilities
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| positions[i])
        .unwrap_or(0.0);
    let wrap = |x: f64| {
        let mut d = (x - peak) % length;
        if d > length / 2.0 {
            d -= length;
        }
        if d < -length / 2.0 {
            d += length;
        }
        d
    };
    let mut mean = 0.0;
    let mut second = 0.0;
    for (p, &x) in probabilities.iter().zip(positions) {
        let d = wrap(x);
        mean += p * d;
        second += p * d * d;
    }
    (second - mean * mean).max(0.0).sqrt()
}

/// Exact-propagator width spreading for a batch of one-dimensional
/// scenarios: width at `t = 0` versus width at `t_total`.
pub fn width_spread_report(scenarios: &[Scenario]) -> Result<Vec<WidthRow>> {
    scenarios
        .iter()
        .map(|scenario| {
            if scenario.grid.num_dims != 1 {
                return Err(HarnessError::validation(
                    "grid.num_dims",
                    "width report is defined for one-dimensional scenarios only",
                ));
            }
            let ham = scenario.hamiltonian()?;
            let psi0 = scenario.wavepacket_state()?;
            let grids = build_grids(ham.grid())
                .map_err(|e| HarnessError::numerical(e.to_string()))?;
            let length = scenario.grid.lengths[0];
            let width_of = |state: &Statevector| {
                density_width(&state.probabilities(), &grids.positions[0], length)
            };
            let initial_width = width_of(&psi0);
            let evolved = ham
                .exact_evolve(&psi0, scenario.evolution.t_total)
                .map_err(|e| HarnessError::numerical(e.to_string()))?;
            let final_width = width_of(&evolved);
            Ok(WidthRow {
                width_b: scenario.wavepacket.width[0],
                initial_width,
                final_width,
                difference: final_width - initial_width,
            })
        })
        .collect()
}

/// CSV body for a width-spread report.
pub fn width_csv(rows: &[WidthRow]) -> String {
    let mut out = String::from("width_b,initial_width,final_width,difference\n");
    for row in rows {
        for (i, v) in [row.width_b, row.initial_width, row.final_width, row.difference]
            .into_iter()
            .enumerate()
        {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&fmt_float(v));
        }
        out.push('\n');
    }
    out
}
