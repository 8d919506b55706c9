//! First-quantized grid Hamiltonians `H = F†·diag(p²/2m)·F + diag(V)` with
//! dense realization, exact propagation, and two-basis energy evaluation.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use crate::error::{CoreError, Result};
use crate::grid::{build_grids, GridSpec};
use crate::potential::PotentialSpec;
use crate::register::{apply_register_unitary_in_place, qft_block, RegisterUnitary};
use crate::state::Statevector;
use crate::C64;

/// Default cap on the dense-matrix realization (total grid points).
pub const DEFAULT_DENSE_CAP: usize = 4096;

/// A first-quantized Hamiltonian on a grid: kinetic term diagonal in the
/// momentum (QFT) basis, potential term diagonal in the position basis.
#[derive(Debug, Clone)]
pub struct GridHamiltonian {
    grid: GridSpec,
    mass: f64,
    potential_values: Vec<f64>,
    psquared_values: Vec<f64>,
    eigen_cache: OnceLock<EigenDecomposition>,
}

#[derive(Debug, Clone)]
struct EigenDecomposition {
    vectors: DMatrix<C64>,
    values: DVector<f64>,
}

impl GridHamiltonian {
    /// Builds the Hamiltonian from a potential family evaluated on the grid.
    pub fn new(grid: GridSpec, mass: f64, potential: &PotentialSpec) -> Result<Self> {
        let potential_values = potential.values_on_grid(&grid)?;
        Self::from_potential_values(grid, mass, potential_values)
    }

    /// Builds the Hamiltonian from explicit potential values in total-index
    /// order (`Σ_d p_d²` is always derived from the grid).
    pub fn from_potential_values(
        grid: GridSpec,
        mass: f64,
        potential_values: Vec<f64>,
    ) -> Result<Self> {
        grid.validate()?;
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(CoreError::InvalidSpec("mass must be positive and finite".into()));
        }
        if potential_values.len() != grid.total_points() {
            return Err(CoreError::InvalidSpec(format!(
                "potential has {} values but the grid has {} points",
                potential_values.len(),
                grid.total_points()
            )));
        }
        let grids = build_grids(&grid)?;
        let psquared_values = (0..grid.total_points())
            .map(|idx| {
                grid.split_index(idx)
                    .iter()
                    .enumerate()
                    .map(|(dim, &k)| grids.momenta[dim][k].powi(2))
                    .sum()
            })
            .collect();
        Ok(Self { grid, mass, potential_values, psquared_values, eigen_cache: OnceLock::new() })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Potential values over the position grid, total-index order.
    pub fn potential_values(&self) -> &[f64] {
        &self.potential_values
    }

    /// `Σ_d p_d²` over the momentum grid, total-index (FFT-frequency) order.
    pub fn psquared_values(&self) -> &[f64] {
        &self.psquared_values
    }

    /// Per-dimension QFT blocks, dimension `m` targeting its qubit register.
    fn qft_blocks(&self) -> Vec<RegisterUnitary> {
        let nq = self.grid.qubits_per_dim;
        (0..self.grid.num_dims)
            .map(|dim| qft_block(nq).on_register(dim * nq))
            .collect()
    }

    /// Transforms a state to the momentum basis by applying the QFT block on
    /// every dimension register.
    pub fn to_momentum_basis(&self, state: &Statevector) -> Result<Statevector> {
        self.check_state(state)?;
        let mut out = state.clone();
        for block in self.qft_blocks() {
            apply_register_unitary_in_place(&mut out, &block)?;
        }
        Ok(out)
    }

    /// Applies `H` to a state via `F†·diag(p²/2m)·F + diag(V)` without ever
    /// materializing the dense matrix.
    pub fn apply(&self, state: &Statevector) -> Result<Statevector> {
        self.check_state(state)?;
        let blocks = self.qft_blocks();
        let mut kin = state.clone();
        for block in &blocks {
            apply_register_unitary_in_place(&mut kin, block)?;
        }
        {
            let amps = kin.amplitudes_mut();
            for (a, &p2) in amps.iter_mut().zip(&self.psquared_values) {
                *a *= C64::new(p2 / (2.0 * self.mass), 0.0);
            }
        }
        for block in &blocks {
            apply_register_unitary_in_place(&mut kin, &block.adjoint())?;
        }
        let mut out = kin;
        let amps = out.amplitudes_mut();
        for ((a, src), &v) in amps.iter_mut().zip(state.amplitudes()).zip(&self.potential_values) {
            *a += src * C64::new(v, 0.0);
        }
        Ok(out)
    }

    /// Dense Hermitian matrix realization with the default size cap.
    pub fn dense_matrix(&self) -> Result<DMatrix<C64>> {
        self.dense_matrix_with_cap(DEFAULT_DENSE_CAP)
    }

    /// Dense Hermitian matrix realization, rejecting grids above `cap` points.
    ///
    /// The kinetic part is assembled from the per-dimension circulant
    /// `T[i][j] = (1/N)·Σ_k (p_k²/2m)·e^{2πik(j−i)/N}`, and the lower triangle
    /// is mirrored bitwise so the result is Hermitian exactly.
    pub fn dense_matrix_with_cap(&self, cap: usize) -> Result<DMatrix<C64>> {
        let size = self.grid.total_points();
        if size > cap {
            return Err(CoreError::DenseCapExceeded { size, cap });
        }
        let n = self.grid.points_per_dim();
        let grids = build_grids(&self.grid)?;
        let mut h = DMatrix::from_element(size, size, C64::new(0.0, 0.0));
        for dim in 0..self.grid.num_dims {
            let t = kinetic_circulant_offsets(&grids.momenta[dim], self.mass);
            // K_dim couples indices differing only in this dimension's digit.
            let stride = n.pow(dim as u32);
            for i in 0..size {
                let digit = (i / stride) % n;
                for b in 0..n {
                    let j = i - digit * stride + b * stride;
                    h[(i, j)] += t[(n + b - digit) % n];
                }
            }
        }
        for (i, &v) in self.potential_values.iter().enumerate() {
            h[(i, i)] += C64::new(v, 0.0);
        }
        // Mirror the strict upper triangle so Hermiticity holds bitwise.
        for i in 0..size {
            h[(i, i)] = C64::new(h[(i, i)].re, 0.0);
            for j in (i + 1)..size {
                h[(j, i)] = h[(i, j)].conj();
            }
        }
        Ok(h)
    }

    fn eigendecomposition(&self) -> Result<&EigenDecomposition> {
        if let Some(cached) = self.eigen_cache.get() {
            return Ok(cached);
        }
        let matrix = self.dense_matrix()?;
        let eigen = matrix.symmetric_eigen();
        let decomposition =
            EigenDecomposition { vectors: eigen.eigenvectors, values: eigen.eigenvalues };
        Ok(self.eigen_cache.get_or_init(|| decomposition))
    }

    /// Exact propagation `exp(−iHt)|ψ0⟩` via a cached eigendecomposition.
    pub fn exact_evolve(&self, psi0: &Statevector, t: f64) -> Result<Statevector> {
        self.check_state(psi0)?;
        let eigen = self.eigendecomposition()?;
        let amps = DVector::from_column_slice(psi0.amplitudes());
        let mut coeffs = eigen.vectors.adjoint() * amps;
        for (c, &e) in coeffs.iter_mut().zip(eigen.values.iter()) {
            *c *= C64::from_polar(1.0, -e * t);
        }
        let evolved = &eigen.vectors * coeffs;
        Statevector::from_amplitudes(psi0.num_qubits(), evolved.iter().copied().collect())
    }

    /// Energy from the two-basis measurement scheme, evaluated exactly:
    /// `Σ_j V(j)|ψ_j|² + (1/2m)·Σ_k p_k²|(Fψ)_k|²`.
    pub fn energy_expectation(&self, state: &Statevector) -> Result<f64> {
        let momentum = self.to_momentum_basis(state)?;
        let kinetic: f64 = momentum
            .amplitudes()
            .iter()
            .zip(&self.psquared_values)
            .map(|(a, &p2)| p2 / (2.0 * self.mass) * a.norm_sqr())
            .sum();
        let potential: f64 = state
            .amplitudes()
            .iter()
            .zip(&self.potential_values)
            .map(|(a, &v)| v * a.norm_sqr())
            .sum();
        Ok(kinetic + potential)
    }

    fn check_state(&self, state: &Statevector) -> Result<()> {
        if state.num_qubits() != self.grid.total_qubits() {
            return Err(CoreError::SizeMismatch {
                left: state.num_qubits(),
                right: self.grid.total_qubits(),
            });
        }
        Ok(())
    }
}

/// Circulant kinetic offsets `t_d` with `K[i][j] = t_{(j−i) mod N}`, built so
/// that `t_{N−d}` is the bitwise conjugate of `t_d`.
fn kinetic_circulant_offsets(momenta: &[f64], mass: f64) -> Vec<C64> {
    let n = momenta.len();
    let mut t = vec![C64::new(0.0, 0.0); n];
    for d in 0..=n / 2 {
        let mut acc = C64::new(0.0, 0.0);
        for (k, &p) in momenta.iter().enumerate() {
            let phase = 2.0 * std::f64::consts::PI * (k as f64) * (d as f64) / (n as f64);
            acc += C64::from_polar(p * p / (2.0 * mass) / n as f64, phase);
        }
        t[d] = acc;
        if d != 0 && d != n - d {
            t[n - d] = acc.conj();
        }
    }
    t
}
