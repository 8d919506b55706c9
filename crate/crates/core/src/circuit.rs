//! Ordered gate programs with independent parameter slots, and derivative
//! states of the circuit output with respect to single parameters.

use crate::error::{CoreError, Result};
use crate::gate::{apply_gate_in_place, apply_pauli_of, Gate};
use crate::state::Statevector;
use crate::C64;

/// An ordered gate program on `num_qubits` qubits.
///
/// Parameter slots are exactly `{0, …, num_params−1}` and each slot appears on
/// exactly one gate: every variational rotation carries an independent angle.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
    num_params: usize,
}

impl Circuit {
    /// Builds a circuit, validating target indices and parameter slots.
    pub fn new(num_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut slots: Vec<usize> = gates.iter().filter_map(|g| g.parameter_slot).collect();
        let num_params = slots.len();
        slots.sort_unstable();
        for (expected, &slot) in slots.iter().enumerate() {
            if slot != expected {
                return Err(CoreError::InvalidParameterSlots(format!(
                    "slots must be exactly 0..{num_params}, each appearing once; found slot {slot} where {expected} was expected"
                )));
            }
        }
        for gate in &gates {
            if gate.targets.len() != gate.kind.arity() {
                return Err(CoreError::InvalidSpec(format!(
                    "{} gate with {} targets",
                    gate.kind.name(),
                    gate.targets.len()
                )));
            }
            for &t in &gate.targets {
                if t >= num_qubits {
                    return Err(CoreError::TargetOutOfRange { index: t, num_qubits });
                }
            }
            if gate.parameter_slot.is_some() && !gate.kind.takes_angle() {
                return Err(CoreError::InvalidSpec(format!(
                    "non-rotation gate {} cannot be variational",
                    gate.kind.name()
                )));
            }
        }
        Ok(Self { num_qubits, gates, num_params })
    }

    /// A gate-free circuit (the identity).
    pub fn empty(num_qubits: usize) -> Self {
        Self { num_qubits, gates: Vec::new(), num_params: 0 }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.num_params {
            return Err(CoreError::ParamCountMismatch {
                expected: self.num_params,
                got: params.len(),
            });
        }
        Ok(())
    }
}

/// Applies the circuit's gates in program order to `input`.
pub fn apply_circuit(circuit: &Circuit, params: &[f64], input: &Statevector) -> Result<Statevector> {
    circuit.check_params(params)?;
    if input.num_qubits() != circuit.num_qubits {
        return Err(CoreError::SizeMismatch {
            left: input.num_qubits(),
            right: circuit.num_qubits,
        });
    }
    let mut state = input.clone();
    for gate in &circuit.gates {
        apply_gate_in_place(&mut state, gate, params)?;
    }
    Ok(state)
}

/// How parameter derivatives of the circuit output are computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeMode {
    /// Insert the Pauli generator of the k-th rotation before that rotation and
    /// scale by −i/2. Exact; the resulting state has norm exactly 1/2.
    Analytic,
    /// Forward finite difference `(ψ(θ+εe_k) − ψ(θ))/ε` with step `ε`.
    ForwardDifference(f64),
}

impl DerivativeMode {
    /// The forward-difference mode with the conventional step 1e-8.
    pub const DEFAULT_FORWARD: DerivativeMode = DerivativeMode::ForwardDifference(1e-8);
}

/// Derivative of the circuit output (from `|0…0⟩`) with respect to `θ_k`.
pub fn derivative_state(
    circuit: &Circuit,
    params: &[f64],
    k: usize,
    mode: DerivativeMode,
) -> Result<Statevector> {
    derivative_state_from(circuit, params, k, mode, &Statevector::zero_state(circuit.num_qubits))
}

/// Derivative of the circuit output applied to an arbitrary input state.
pub fn derivative_state_from(
    circuit: &Circuit,
    params: &[f64],
    k: usize,
    mode: DerivativeMode,
    input: &Statevector,
) -> Result<Statevector> {
    circuit.check_params(params)?;
    if k >= circuit.num_params {
        return Err(CoreError::ParamIndexOutOfRange { index: k, num_params: circuit.num_params });
    }
    match mode {
        DerivativeMode::ForwardDifference(eps) => {
            if eps <= 0.0 {
                return Err(CoreError::InvalidSpec("finite-difference step must be > 0".into()));
            }
            let base = apply_circuit(circuit, params, input)?;
            let mut shifted = params.to_vec();
            shifted[k] += eps;
            let bumped = apply_circuit(circuit, &shifted, input)?;
            let mut diff = bumped.sub(&base)?;
            diff.scale(C64::new(1.0 / eps, 0.0));
            Ok(diff)
        }
        DerivativeMode::Analytic => {
            let mut state = input.clone();
            let mut inserted = false;
            for gate in &circuit.gates {
                if gate.parameter_slot == Some(k) {
                    if !gate.kind.takes_angle() || gate.kind.arity() != 1 {
                        return Err(CoreError::NotARotationGate { slot: k });
                    }
                    apply_pauli_of(&mut state, gate.kind, gate.targets[0]);
                    state.scale(C64::new(0.0, -0.5));
                    inserted = true;
                }
                apply_gate_in_place(&mut state, gate, params)?;
            }
            debug_assert!(inserted);
            Ok(state)
        }
    }
}
