//! Gaussian wavepacket preparation on the position grid.

use crate::error::{CoreError, Result};
use crate::grid::{build_grids, GridSpec};
use crate::state::Statevector;
use crate::C64;

/// Initial Gaussian wavepacket: center, momentum, and width per dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct WavepacketParams {
    pub x0: Vec<f64>,
    pub p0: Vec<f64>,
    pub width: Vec<f64>,
}

impl WavepacketParams {
    pub fn validate(&self, spec: &GridSpec) -> Result<()> {
        if self.x0.len() != spec.num_dims
            || self.p0.len() != spec.num_dims
            || self.width.len() != spec.num_dims
        {
            return Err(CoreError::InvalidSpec(
                "wavepacket x0/p0/width must have one entry per dimension".into(),
            ));
        }
        if self.width.iter().any(|&b| !(b > 0.0)) {
            return Err(CoreError::InvalidSpec("wavepacket widths must be positive".into()));
        }
        for dim in 0..spec.num_dims {
            let lo = spec.origin_per_dim[dim];
            let hi = lo + spec.length_per_dim[dim];
            if !(lo..hi).contains(&self.x0[dim]) {
                return Err(CoreError::InvalidSpec(format!(
                    "wavepacket center {} outside box [{lo}, {hi}) in dimension {dim}",
                    self.x0[dim]
                )));
            }
        }
        Ok(())
    }
}

/// Prepares the normalized grid Gaussian
/// `ψ_j ∝ Π_d exp(−¼((x_d−x0_d)/B_d)²)·exp(i·p0_d·x_d)`.
///
/// Normalization is discrete (unit vector norm): fidelities are basis-vector
/// overlaps, so the continuum normalization constant never enters.
pub fn gaussian_wavepacket(spec: &GridSpec, wp: &WavepacketParams) -> Result<Statevector> {
    wp.validate(spec)?;
    let grids = build_grids(spec)?;
    let total = spec.total_points();
    let mut amplitudes = Vec::with_capacity(total);
    for idx in 0..total {
        let parts = spec.split_index(idx);
        let mut amp = C64::new(1.0, 0.0);
        for (dim, &j) in parts.iter().enumerate() {
            let x = grids.positions[dim][j];
            let envelope = (-0.25 * ((x - wp.x0[dim]) / wp.width[dim]).powi(2)).exp();
            amp *= C64::from_polar(envelope, wp.p0[dim] * x);
        }
        amplitudes.push(amp);
    }
    let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm <= f64::MIN_POSITIVE.sqrt() {
        return Err(CoreError::ZeroNorm);
    }
    for a in &mut amplitudes {
        *a /= norm;
    }
    Statevector::from_amplitudes(spec.total_qubits(), amplitudes)
}
