//! Elementary gates and the statevector kernels applying them.
//!
//! Rotation gates follow the convention `R_σ(θ) = exp(−iθσ/2)`; every
//! parameter count and closed-form example in the crate assumes it.

use crate::error::{CoreError, Result};
use crate::state::Statevector;
use crate::C64;

/// The gate alphabet used by the variational forms and wrappers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    RX,
    RY,
    RZ,
    H,
    X,
    Z,
    CX,
    CZ,
    ControlledPhase,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::RX => "RX",
            GateKind::RY => "RY",
            GateKind::RZ => "RZ",
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Z => "Z",
            GateKind::CX => "CX",
            GateKind::CZ => "CZ",
            GateKind::ControlledPhase => "ControlledPhase",
        }
    }

    /// Whether the gate carries a rotation/phase angle.
    pub fn takes_angle(self) -> bool {
        matches!(
            self,
            GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::ControlledPhase
        )
    }

    /// Number of qubits the gate acts on.
    pub fn arity(self) -> usize {
        match self {
            GateKind::CX | GateKind::CZ | GateKind::ControlledPhase => 2,
            _ => 1,
        }
    }
}

/// A gate instance: kind, target qubits, and either a fixed angle or a
/// parameter slot into the circuit's parameter vector.
///
/// For two-qubit gates `targets[0]` is the control and `targets[1]` the
/// target (irrelevant for the symmetric CZ / controlled-phase gates).
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub angle: Option<f64>,
    pub parameter_slot: Option<usize>,
}

impl Gate {
    /// A fixed (non-variational) gate; `angle` is required iff the kind takes one.
    pub fn fixed(kind: GateKind, targets: Vec<usize>, angle: Option<f64>) -> Self {
        Self { kind, targets, angle, parameter_slot: None }
    }

    /// A variational rotation bound to parameter slot `slot`.
    pub fn variational(kind: GateKind, target: usize, slot: usize) -> Self {
        debug_assert!(kind.takes_angle());
        Self { kind, targets: vec![target], angle: None, parameter_slot: Some(slot) }
    }

    /// Resolves the effective angle from the parameter vector or fixed field.
    pub fn resolve_angle(&self, angle_values: &[f64]) -> Result<Option<f64>> {
        if !self.kind.takes_angle() {
            return Ok(None);
        }
        if let Some(slot) = self.parameter_slot {
            return match angle_values.get(slot) {
                Some(v) => Ok(Some(*v)),
                None => Err(CoreError::MissingAngle { slot, provided: angle_values.len() }),
            };
        }
        self.angle
            .map(Some)
            .ok_or(CoreError::MissingFixedAngle { kind: self.kind.name() })
    }
}

/// Applies a gate to a state, reading any variational angle from `angle_values`.
pub fn apply_gate(state: &Statevector, gate: &Gate, angle_values: &[f64]) -> Result<Statevector> {
    let mut out = state.clone();
    apply_gate_in_place(&mut out, gate, angle_values)?;
    Ok(out)
}

/// In-place variant of [`apply_gate`], used by the circuit simulator.
pub fn apply_gate_in_place(
    state: &mut Statevector,
    gate: &Gate,
    angle_values: &[f64],
) -> Result<()> {
    let n = state.num_qubits();
    for &t in &gate.targets {
        if t >= n {
            return Err(CoreError::TargetOutOfRange { index: t, num_qubits: n });
        }
    }
    let angle = gate.resolve_angle(angle_values)?;
    match gate.kind {
        GateKind::RX => {
            let h = angle.unwrap() / 2.0;
            let (c, s) = (C64::new(h.cos(), 0.0), C64::new(0.0, -h.sin()));
            apply_1q(state, gate.targets[0], [c, s, s, c]);
        }
        GateKind::RY => {
            let h = angle.unwrap() / 2.0;
            let (c, s) = (C64::new(h.cos(), 0.0), C64::new(h.sin(), 0.0));
            apply_1q(state, gate.targets[0], [c, -s, s, c]);
        }
        GateKind::RZ => {
            let h = angle.unwrap() / 2.0;
            let (em, ep) = (C64::from_polar(1.0, -h), C64::from_polar(1.0, h));
            apply_1q_diag(state, gate.targets[0], em, ep);
        }
        GateKind::H => {
            let r = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            apply_1q(state, gate.targets[0], [r, r, r, -r]);
        }
        GateKind::X => {
            let (zero, one) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
            apply_1q(state, gate.targets[0], [zero, one, one, zero]);
        }
        GateKind::Z => {
            apply_1q_diag(state, gate.targets[0], C64::new(1.0, 0.0), C64::new(-1.0, 0.0));
        }
        GateKind::CX => {
            let (control, target) = (gate.targets[0], gate.targets[1]);
            check_distinct(control, target)?;
            let (cm, tm) = (1usize << control, 1usize << target);
            let amps = state.amplitudes_mut();
            for i in 0..amps.len() {
                // Swap |c=1,t=0⟩ with |c=1,t=1⟩ once per pair.
                if i & cm != 0 && i & tm == 0 {
                    amps.swap(i, i | tm);
                }
            }
        }
        GateKind::CZ => {
            let (a, b) = (gate.targets[0], gate.targets[1]);
            check_distinct(a, b)?;
            let mask = (1usize << a) | (1usize << b);
            let amps = state.amplitudes_mut();
            for (i, amp) in amps.iter_mut().enumerate() {
                if i & mask == mask {
                    *amp = -*amp;
                }
            }
        }
        GateKind::ControlledPhase => {
            let (a, b) = (gate.targets[0], gate.targets[1]);
            check_distinct(a, b)?;
            let mask = (1usize << a) | (1usize << b);
            let phase = C64::from_polar(1.0, angle.unwrap());
            let amps = state.amplitudes_mut();
            for (i, amp) in amps.iter_mut().enumerate() {
                if i & mask == mask {
                    *amp *= phase;
                }
            }
        }
    }
    Ok(())
}

/// Applies the bare Pauli matrix `σ` of a rotation kind to a qubit. Used to
/// build analytic derivative states.
pub(crate) fn apply_pauli_of(state: &mut Statevector, rotation: GateKind, qubit: usize) {
    match rotation {
        GateKind::RX => {
            let (zero, one) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
            apply_1q(state, qubit, [zero, one, one, zero]);
        }
        GateKind::RY => {
            let (zero, i) = (C64::new(0.0, 0.0), C64::new(0.0, 1.0));
            apply_1q(state, qubit, [zero, -i, i, zero]);
        }
        GateKind::RZ => {
            apply_1q_diag(state, qubit, C64::new(1.0, 0.0), C64::new(-1.0, 0.0));
        }
        _ => unreachable!("only rotation gates carry a Pauli generator"),
    }
}

fn check_distinct(a: usize, b: usize) -> Result<()> {
    if a == b {
        return Err(CoreError::InvalidSpec(
            "two-qubit gate with identical control and target".into(),
        ));
    }
    Ok(())
}

/// Applies a dense 2×2 matrix `[[m0,m1],[m2,m3]]` to one qubit.
fn apply_1q(state: &mut Statevector, qubit: usize, m: [C64; 4]) {
    let mask = 1usize << qubit;
    let amps = state.amplitudes_mut();
    for i in 0..amps.len() {
        if i & mask == 0 {
            let j = i | mask;
            let (x, y) = (amps[i], amps[j]);
            amps[i] = m[0] * x + m[1] * y;
            amps[j] = m[2] * x + m[3] * y;
        }
    }
}

/// Applies a diagonal 2×2 matrix `diag(d0, d1)` to one qubit.
fn apply_1q_diag(state: &mut Statevector, qubit: usize, d0: C64, d1: C64) {
    let mask = 1usize << qubit;
    let amps = state.amplitudes_mut();
    for (i, amp) in amps.iter_mut().enumerate() {
        *amp *= if i & mask == 0 { d0 } else { d1 };
    }
}
