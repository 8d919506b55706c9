//! Discretized configuration space: position and momentum grids per dimension.

use crate::error::{CoreError, Result};

/// Discretization of an `num_dims`-dimensional box.
///
/// Each dimension carries `2^qubits_per_dim` uniformly spaced points over a
/// box of the given length starting at the given origin. Multi-dimensional
/// registers are laid out dimension-major: dimension 0 occupies the
/// lowest-order qubits of the basis-state index.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub num_dims: usize,
    pub qubits_per_dim: usize,
    pub length_per_dim: Vec<f64>,
    pub origin_per_dim: Vec<f64>,
}

impl GridSpec {
    pub fn new(
        num_dims: usize,
        qubits_per_dim: usize,
        length_per_dim: Vec<f64>,
        origin_per_dim: Vec<f64>,
    ) -> Result<Self> {
        let spec = Self { num_dims, qubits_per_dim, length_per_dim, origin_per_dim };
        spec.validate()?;
        Ok(spec)
    }

    /// A 1-dimensional grid.
    pub fn one_dim(qubits: usize, length: f64, origin: f64) -> Result<Self> {
        Self::new(1, qubits, vec![length], vec![origin])
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_dims == 0 || self.qubits_per_dim == 0 {
            return Err(CoreError::InvalidSpec(
                "grid needs at least one dimension and one qubit per dimension".into(),
            ));
        }
        if self.length_per_dim.len() != self.num_dims || self.origin_per_dim.len() != self.num_dims {
            return Err(CoreError::InvalidSpec(
                "length/origin vectors must have one entry per dimension".into(),
            ));
        }
        if self.length_per_dim.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return Err(CoreError::InvalidSpec("box lengths must be positive and finite".into()));
        }
        Ok(())
    }

    /// Points per dimension, `N = 2^qubits_per_dim`.
    pub fn points_per_dim(&self) -> usize {
        1 << self.qubits_per_dim
    }

    /// Total grid size `N^num_dims`.
    pub fn total_points(&self) -> usize {
        self.points_per_dim().pow(self.num_dims as u32)
    }

    /// Total qubit count `num_dims · qubits_per_dim`.
    pub fn total_qubits(&self) -> usize {
        self.num_dims * self.qubits_per_dim
    }

    /// Grid spacing `Δx = L/N` for one dimension.
    pub fn spacing(&self, dim: usize) -> f64 {
        self.length_per_dim[dim] / self.points_per_dim() as f64
    }

    /// Decomposes a total grid index into per-dimension indices
    /// (dimension 0 in the lowest-order bits).
    pub fn split_index(&self, index: usize) -> Vec<usize> {
        let n = self.points_per_dim();
        let mut rest = index;
        (0..self.num_dims)
            .map(|_| {
                let j = rest % n;
                rest /= n;
                j
            })
            .collect()
    }
}

/// Position and momentum grids, one vector per dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Grids {
    pub positions: Vec<Vec<f64>>,
    pub momenta: Vec<Vec<f64>>,
}

/// Builds the coordinate grids for a [`GridSpec`].
///
/// Positions are `x_j = x_min + j·Δx`. Momenta use FFT-frequency ordering,
/// `p_k = 2πk/L` for `k < N/2` and `p_k = 2π(k−N)/L` otherwise, so that
/// measuring index `k` after the QFT block assigns momentum `p_k`.
pub fn build_grids(spec: &GridSpec) -> Result<Grids> {
    spec.validate()?;
    let n = spec.points_per_dim();
    let mut positions = Vec::with_capacity(spec.num_dims);
    let mut momenta = Vec::with_capacity(spec.num_dims);
    for dim in 0..spec.num_dims {
        let dx = spec.spacing(dim);
        let x0 = spec.origin_per_dim[dim];
        positions.push((0..n).map(|j| x0 + j as f64 * dx).collect());
        let scale = 2.0 * std::f64::consts::PI / spec.length_per_dim[dim];
        momenta.push(
            (0..n)
                .map(|k| {
                    let signed = if k < n / 2 { k as isize } else { k as isize - n as isize };
                    scale * signed as f64
                })
                .collect(),
        );
    }
    Ok(Grids { positions, momenta })
}
