//! Dense statevector over the computational basis.

use crate::error::{CoreError, Result};
use crate::C64;

/// Dense complex amplitude vector over the `2^num_qubits` computational basis
/// states.
///
/// Qubit 0 is the least-significant bit of the basis-state index. Amplitudes
/// are dimensionless; states produced by unitary circuits from a normalized
/// input stay normalized to within 1e-12. Derivative states deliberately break
/// this invariant (analytic derivative states have norm exactly 1/2).
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    num_qubits: usize,
    amplitudes: Vec<C64>,
}

impl Statevector {
    /// Creates a statevector from raw amplitudes. The length must be a power
    /// of two matching `num_qubits`.
    pub fn from_amplitudes(num_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if num_qubits == 0 || amplitudes.len() != 1usize << num_qubits {
            return Err(CoreError::InvalidSpec(format!(
                "amplitude vector of length {} does not match {} qubits",
                amplitudes.len(),
                num_qubits
            )));
        }
        Ok(Self { num_qubits, amplitudes })
    }

    /// The all-zeros computational basis state `|0…0⟩`.
    pub fn zero_state(num_qubits: usize) -> Self {
        assert!(num_qubits >= 1, "a statevector needs at least one qubit");
        let mut amplitudes = vec![C64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = C64::new(1.0, 0.0);
        Self { num_qubits, amplitudes }
    }

    /// The computational basis state `|index⟩`.
    pub fn basis_state(num_qubits: usize, index: usize) -> Self {
        let mut state = Self::zero_state(num_qubits);
        state.amplitudes[0] = C64::new(0.0, 0.0);
        state.amplitudes[index] = C64::new(1.0, 0.0);
        state
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    /// Euclidean norm of the amplitude vector.
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Multiplies every amplitude by a complex scalar.
    pub fn scale(&mut self, factor: C64) {
        for a in &mut self.amplitudes {
            *a *= factor;
        }
    }

    /// Returns `self - other` as a raw (unnormalized) amplitude vector.
    pub fn sub(&self, other: &Statevector) -> Result<Statevector> {
        check_same_size(self, other)?;
        let amplitudes = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Statevector { num_qubits: self.num_qubits, amplitudes })
    }

    /// Probability weights `|amplitude|²` per basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Hermitian inner product `⟨a|b⟩ = Σ_i conj(a_i)·b_i`.
pub fn inner_product(a: &Statevector, b: &Statevector) -> Result<C64> {
    check_same_size(a, b)?;
    Ok(a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

fn check_same_size(a: &Statevector, b: &Statevector) -> Result<()> {
    if a.num_qubits != b.num_qubits {
        return Err(CoreError::SizeMismatch { left: a.num_qubits, right: b.num_qubits });
    }
    Ok(())
}
