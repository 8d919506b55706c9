//! Dense unitaries acting on contiguous qubit registers, including the
//! quantum Fourier transform block.

use nalgebra::DMatrix;

use crate::error::{CoreError, Result};
use crate::state::Statevector;
use crate::C64;

/// Maximum allowed deviation from unitarity for register blocks.
const UNITARITY_TOL: f64 = 1e-12;

/// A dense unitary applied to a contiguous register of qubits.
///
/// `target_register` is a half-open range of qubit indices; the matrix
/// dimension must equal `2^(register width)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegisterUnitary {
    matrix: DMatrix<C64>,
    target_start: usize,
    register_width: usize,
}

impl RegisterUnitary {
    /// Wraps a dense matrix, validating unitarity to 1e-12 and that the
    /// dimension is the power of two matching the register width.
    pub fn new(matrix: DMatrix<C64>, target_start: usize) -> Result<Self> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim || dim == 0 || !dim.is_power_of_two() {
            return Err(CoreError::RegisterMismatch(format!(
                "matrix must be square with power-of-two dimension, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let deviation = unitarity_deviation(&matrix);
        if deviation >= UNITARITY_TOL {
            return Err(CoreError::NotUnitary { deviation });
        }
        let register_width = dim.trailing_zeros() as usize;
        Ok(Self { matrix, target_start, register_width })
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn register_width(&self) -> usize {
        self.register_width
    }

    /// The half-open qubit index range the block acts on.
    pub fn target_register(&self) -> std::ops::Range<usize> {
        self.target_start..self.target_start + self.register_width
    }

    /// The same block re-targeted to start at qubit `start`.
    pub fn on_register(&self, start: usize) -> Self {
        Self { matrix: self.matrix.clone(), target_start: start, register_width: self.register_width }
    }

    /// The adjoint (inverse) block on the same register.
    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            target_start: self.target_start,
            register_width: self.register_width,
        }
    }
}

fn unitarity_deviation(matrix: &DMatrix<C64>) -> f64 {
    let product = matrix.adjoint() * matrix;
    let mut deviation: f64 = 0.0;
    for i in 0..product.nrows() {
        for j in 0..product.ncols() {
            let expected = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            deviation = deviation.max((product[(i, j)] - expected).norm());
        }
    }
    deviation
}

/// The QFT block on `num_qubits` qubits: `F[k][j] = exp(+2πi·jk/N)/√N`.
///
/// The sign convention is fixed so that momentum-grid assignment is
/// unambiguous: the `k`-th column of `F` synthesizes the grid plane wave of
/// momentum index `k`. The block targets register `0..num_qubits`; use
/// [`RegisterUnitary::on_register`] to shift it.
pub fn qft_block(num_qubits: usize) -> RegisterUnitary {
    assert!(num_qubits >= 1);
    let n = 1usize << num_qubits;
    let scale = 1.0 / (n as f64).sqrt();
    let matrix = DMatrix::from_fn(n, n, |k, j| {
        let phase = 2.0 * std::f64::consts::PI * (j as f64) * (k as f64) / (n as f64);
        C64::from_polar(scale, phase)
    });
    RegisterUnitary::new(matrix, 0).expect("QFT matrix is unitary by construction")
}

/// Applies the dense block to its register's tensor factor, leaving the other
/// qubits untouched.
pub fn apply_register_unitary(state: &Statevector, block: &RegisterUnitary) -> Result<Statevector> {
    let mut out = state.clone();
    apply_register_unitary_in_place(&mut out, block)?;
    Ok(out)
}

/// In-place variant of [`apply_register_unitary`].
pub fn apply_register_unitary_in_place(
    state: &mut Statevector,
    block: &RegisterUnitary,
) -> Result<()> {
    let n = state.num_qubits();
    let start = block.target_start;
    let width = block.register_width;
    if start + width > n {
        return Err(CoreError::RegisterMismatch(format!(
            "register {:?} does not fit in a {}-qubit state",
            block.target_register(),
            n
        )));
    }
    let dim = block.dimension();
    let low_count = 1usize << start;
    let high_count = 1usize << (n - start - width);
    let amps = state.amplitudes_mut();
    let mut scratch = vec![C64::new(0.0, 0.0); dim];
    for high in 0..high_count {
        let high_base = high << (start + width);
        for low in 0..low_count {
            let base = high_base | low;
            for (j, s) in scratch.iter_mut().enumerate() {
                *s = amps[base | (j << start)];
            }
            for k in 0..dim {
                let mut acc = C64::new(0.0, 0.0);
                for (j, s) in scratch.iter().enumerate() {
                    acc += block.matrix[(k, j)] * s;
                }
                amps[base | (k << start)] = acc;
            }
        }
    }
    Ok(())
}
