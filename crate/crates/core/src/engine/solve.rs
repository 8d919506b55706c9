//! Minimal-norm least-squares solution of the equation of motion.

use nalgebra::{DMatrix, DVector};

use crate::error::{CoreError, Result};

/// Solves `M·θ̇ = V` by singular value decomposition, discarding singular
/// values below `rcond·σ_max` and returning the minimal-norm solution.
///
/// The pseudoinverse is always defined: a zero metric yields `θ̇ = 0`.
pub fn solve_thetadot(
    metric: &DMatrix<f64>,
    force: &DVector<f64>,
    rcond: f64,
) -> Result<DVector<f64>> {
    if metric.nrows() != metric.ncols() || metric.nrows() != force.len() {
        return Err(CoreError::SizeMismatch { left: metric.nrows(), right: force.len() });
    }
    if !(rcond > 0.0) || !rcond.is_finite() {
        return Err(CoreError::InvalidSpec("rcond must be positive and finite".into()));
    }
    let svd = metric.clone().svd(true, true);
    let sigma_max = svd.singular_values.iter().copied().fold(0.0f64, f64::max);
    if sigma_max <= 0.0 {
        return Ok(DVector::zeros(force.len()));
    }
    svd.solve(force, rcond * sigma_max)
        .map_err(|message| CoreError::SolverFailure { message: message.into(), t_reached: f64::NAN })
}
