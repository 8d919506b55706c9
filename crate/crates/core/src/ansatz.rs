//! The heuristic variational form library (vf1–vf8) and the basis-space
//! wrappers that select the representation the trial state lives in.
//!
//! Every form alternates layers of independent single-qubit rotations with
//! entangling blocks; depth `d` counts entangling layers, so plain forms carry
//! `d+1` rotation layers. Wrappers append fixed register unitaries after the
//! parameterized circuit: nothing (position), a QFT per dimension register
//! (momentum), a diagonalizer per dimension register (local-diagonal space),
//! or a position/momentum sandwich (mixed).

use rayon::prelude::*;

use crate::circuit::{
    apply_circuit, derivative_state_from, Circuit, DerivativeMode,
};
use crate::error::{CoreError, Result};
use crate::gate::{Gate, GateKind};
use crate::grid::GridSpec;
use crate::register::{
    apply_register_unitary_in_place, qft_block, RegisterUnitary,
};
use crate::state::Statevector;

/// Identifier of one of the eight heuristic variational forms.
///
/// | id  | rotations | entangler                         | coupling |
/// |-----|-----------|-----------------------------------|----------|
/// | vf1 | RY, RZ    | CZ                                | linear   |
/// | vf2 | RY, RZ    | CZ                                | full     |
/// | vf3 | RY, RZ    | CZ                                | circular |
/// | vf4 | RY, RZ    | CX                                | linear   |
/// | vf5 | RX, RZ    | CZ                                | linear   |
/// | vf6 | RY, RZ    | CX·RZ·CX sandwich                 | linear   |
/// | vf7 | RY, RZ    | sandwich + 3-qubit cascade        | linear   |
/// | vf8 | RY, RZ    | CZ layer + rotations + sandwich   | linear   |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VariationalFormId {
    Vf1,
    Vf2,
    Vf3,
    Vf4,
    Vf5,
    Vf6,
    Vf7,
    Vf8,
}

impl VariationalFormId {
    pub const ALL: [VariationalFormId; 8] = [
        VariationalFormId::Vf1,
        VariationalFormId::Vf2,
        VariationalFormId::Vf3,
        VariationalFormId::Vf4,
        VariationalFormId::Vf5,
        VariationalFormId::Vf6,
        VariationalFormId::Vf7,
        VariationalFormId::Vf8,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            VariationalFormId::Vf1 => "vf1",
            VariationalFormId::Vf2 => "vf2",
            VariationalFormId::Vf3 => "vf3",
            VariationalFormId::Vf4 => "vf4",
            VariationalFormId::Vf5 => "vf5",
            VariationalFormId::Vf6 => "vf6",
            VariationalFormId::Vf7 => "vf7",
            VariationalFormId::Vf8 => "vf8",
        }
    }

    /// Closed-form parameter count for `n` qubits at depth `d`.
    pub fn param_count(self, num_qubits: usize, depth: usize) -> usize {
        let n = num_qubits;
        let d = depth;
        match self {
            VariationalFormId::Vf1
            | VariationalFormId::Vf2
            | VariationalFormId::Vf3
            | VariationalFormId::Vf4
            | VariationalFormId::Vf5 => 2 * n * (d + 1),
            // Sandwich entanglers carry one RZ per linear pair, and the form
            // closes with one extra single-rotation layer.
            VariationalFormId::Vf6 => 2 * n * (d + 1) + d * (n - 1) + n,
            // As vf6, plus one RZ per 3-qubit cascade (n−2 per layer).
            VariationalFormId::Vf7 => 2 * n * (d + 1) + d * (2 * n - 3) + n,
            // One opening rotation layer, then per depth: a CZ layer, a
            // rotation layer, a sandwich layer, and another rotation layer.
            VariationalFormId::Vf8 => 2 * n + d * (5 * n - 1),
        }
    }
}

impl std::str::FromStr for VariationalFormId {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        VariationalFormId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| CoreError::InvalidSpec(format!("unknown variational form id '{s}'")))
    }
}

/// Number of real parameters needed to describe the full Hilbert space of an
/// `n`-qubit register (up to norm and global phase): `2(2^n − 1)`.
pub fn full_hilbert_space_params(num_qubits: usize) -> usize {
    2 * ((1usize << num_qubits) - 1)
}

/// How qubits are grouped into per-dimension registers
/// (dimension 0 occupies the lowest-order qubits).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegisterLayout {
    pub num_dims: usize,
    pub qubits_per_dim: usize,
}

impl RegisterLayout {
    pub fn total_qubits(&self) -> usize {
        self.num_dims * self.qubits_per_dim
    }

    pub fn from_grid(spec: &GridSpec) -> Self {
        Self { num_dims: spec.num_dims, qubits_per_dim: spec.qubits_per_dim }
    }
}

/// The basis-space wrapper appended after the parameterized circuit.
#[derive(Debug, Clone)]
pub enum SpaceWrapper {
    /// No suffix: the trial state lives in the position basis.
    Position,
    /// One QFT block per dimension register: momentum-space trial state.
    Momentum,
    /// One diagonalizer unitary per dimension register (any register
    /// targeting; blocks are re-targeted to their dimension's register).
    LocalDiagonal(Vec<RegisterUnitary>),
    /// Position part of depth `position_depth`, an inverse QFT, a momentum
    /// part of depth `momentum_depth`, and a closing QFT.
    Mixed { position_depth: usize, momentum_depth: usize },
}

impl SpaceWrapper {
    pub fn kind_name(&self) -> &'static str {
        match self {
            SpaceWrapper::Position => "position",
            SpaceWrapper::Momentum => "momentum",
            SpaceWrapper::LocalDiagonal(_) => "local-diagonal",
            SpaceWrapper::Mixed { .. } => "mixed",
        }
    }
}

/// One stage of the prepared program: a parameterized circuit slice or a
/// fixed register unitary.
#[derive(Debug, Clone)]
enum Segment {
    Parameterized { circuit: Circuit, param_offset: usize },
    Fixed(RegisterUnitary),
}

/// A built variational ansatz: form, depth, wrapper, and the executable
/// sequence of parameterized circuits and fixed blocks.
#[derive(Debug, Clone)]
pub struct Ansatz {
    form: VariationalFormId,
    depth: usize,
    layout: RegisterLayout,
    wrapper_kind: &'static str,
    num_params: usize,
    segments: Vec<Segment>,
}

impl Ansatz {
    pub fn form(&self) -> VariationalFormId {
        self.form
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn num_qubits(&self) -> usize {
        self.layout.total_qubits()
    }

    pub fn layout(&self) -> RegisterLayout {
        self.layout
    }

    pub fn wrapper_kind(&self) -> &'static str {
        self.wrapper_kind
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    fn check_params(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.num_params {
            return Err(CoreError::ParamCountMismatch {
                expected: self.num_params,
                got: theta.len(),
            });
        }
        Ok(())
    }
}

/// Builds an ansatz from a form, register layout, depth, and wrapper.
///
/// For the [`SpaceWrapper::Mixed`] wrapper the two parameterized parts take
/// their depths from the wrapper itself and `depth` is ignored (the reported
/// depth is their sum).
pub fn build_ansatz(
    form: VariationalFormId,
    layout: RegisterLayout,
    depth: usize,
    wrapper: SpaceWrapper,
) -> Result<Ansatz> {
    let n = layout.total_qubits();
    if n < 2 {
        return Err(CoreError::InvalidSpec(
            "entangling variational forms need at least 2 qubits".into(),
        ));
    }
    let nq = layout.qubits_per_dim;
    let wrapper_kind = wrapper.kind_name();
    let mut segments = Vec::new();
    let mut reported_depth = depth;
    match wrapper {
        SpaceWrapper::Position => {
            segments.push(parameterized(form_circuit(form, n, depth)?, 0));
        }
        SpaceWrapper::Momentum => {
            segments.push(parameterized(form_circuit(form, n, depth)?, 0));
            for dim in 0..layout.num_dims {
                segments.push(Segment::Fixed(qft_block(nq).on_register(dim * nq)));
            }
        }
        SpaceWrapper::LocalDiagonal(blocks) => {
            if blocks.len() != layout.num_dims {
                return Err(CoreError::RegisterMismatch(format!(
                    "{} diagonalizers for {} dimensions",
                    blocks.len(),
                    layout.num_dims
                )));
            }
            segments.push(parameterized(form_circuit(form, n, depth)?, 0));
            for (dim, block) in blocks.into_iter().enumerate() {
                if block.register_width() != nq {
                    return Err(CoreError::RegisterMismatch(format!(
                        "diagonalizer for dimension {dim} acts on {} qubits, register has {nq}",
                        block.register_width()
                    )));
                }
                segments.push(Segment::Fixed(block.on_register(dim * nq)));
            }
        }
        SpaceWrapper::Mixed { position_depth, momentum_depth } => {
            reported_depth = position_depth + momentum_depth;
            let position_part = form_circuit(form, n, position_depth)?;
            let offset = position_part.num_params();
            segments.push(parameterized(position_part, 0));
            for dim in 0..layout.num_dims {
                segments.push(Segment::Fixed(qft_block(nq).on_register(dim * nq).adjoint()));
            }
            segments.push(parameterized(form_circuit(form, n, momentum_depth)?, offset));
            for dim in 0..layout.num_dims {
                segments.push(Segment::Fixed(qft_block(nq).on_register(dim * nq)));
            }
        }
    }
    let num_params = segments
        .iter()
        .map(|s| match s {
            Segment::Parameterized { circuit, .. } => circuit.num_params(),
            Segment::Fixed(_) => 0,
        })
        .sum();
    Ok(Ansatz { form, depth: reported_depth, layout, wrapper_kind, num_params, segments })
}

fn parameterized(circuit: Circuit, param_offset: usize) -> Segment {
    Segment::Parameterized { circuit, param_offset }
}

/// Prepares `|ψ(θ)⟩`: the parameterized program applied to `|0…0⟩`, followed
/// by the wrapper's fixed unitaries.
pub fn prepare_state(ansatz: &Ansatz, theta: &[f64]) -> Result<Statevector> {
    ansatz.check_params(theta)?;
    let mut state = Statevector::zero_state(ansatz.num_qubits());
    for segment in &ansatz.segments {
        apply_segment(segment, theta, &mut state)?;
    }
    Ok(state)
}

fn apply_segment(segment: &Segment, theta: &[f64], state: &mut Statevector) -> Result<()> {
    match segment {
        Segment::Parameterized { circuit, param_offset } => {
            let slice = &theta[*param_offset..*param_offset + circuit.num_params()];
            *state = apply_circuit(circuit, slice, state)?;
        }
        Segment::Fixed(block) => apply_register_unitary_in_place(state, block)?,
    }
    Ok(())
}

/// All parameter derivatives `|∂_θk ψ⟩`, including the wrapper suffix.
///
/// Analytic entries have norm exactly 1/2; forward-difference entries are the
/// raw difference quotients. Entries are computed concurrently and returned
/// in parameter order.
pub fn derivative_states(
    ansatz: &Ansatz,
    theta: &[f64],
    mode: DerivativeMode,
) -> Result<Vec<Statevector>> {
    ansatz.check_params(theta)?;
    match mode {
        DerivativeMode::ForwardDifference(eps) => {
            if eps <= 0.0 {
                return Err(CoreError::InvalidSpec("finite-difference step must be > 0".into()));
            }
            let base = prepare_state(ansatz, theta)?;
            (0..ansatz.num_params)
                .into_par_iter()
                .map(|k| {
                    let mut shifted = theta.to_vec();
                    shifted[k] += eps;
                    let bumped = prepare_state(ansatz, &shifted)?;
                    let mut diff = bumped.sub(&base)?;
                    diff.scale(crate::C64::new(1.0 / eps, 0.0));
                    Ok(diff)
                })
                .collect()
        }
        DerivativeMode::Analytic => {
            // States entering each segment, shared by every derivative.
            let mut prefixes = Vec::with_capacity(ansatz.segments.len());
            let mut state = Statevector::zero_state(ansatz.num_qubits());
            for segment in &ansatz.segments {
                prefixes.push(state.clone());
                apply_segment(segment, theta, &mut state)?;
            }
            (0..ansatz.num_params)
                .into_par_iter()
                .map(|k| {
                    let (seg_index, circuit, offset) = ansatz
                        .segments
                        .iter()
                        .enumerate()
                        .find_map(|(i, s)| match s {
                            Segment::Parameterized { circuit, param_offset }
                                if (*param_offset..*param_offset + circuit.num_params())
                                    .contains(&k) =>
                            {
                                Some((i, circuit, *param_offset))
                            }
                            _ => None,
                        })
                        .expect("every parameter index belongs to a segment");
                    let slice = &theta[offset..offset + circuit.num_params()];
                    let mut d = derivative_state_from(
                        circuit,
                        slice,
                        k - offset,
                        DerivativeMode::Analytic,
                        &prefixes[seg_index],
                    )?;
                    for segment in &ansatz.segments[seg_index + 1..] {
                        apply_segment(segment, theta, &mut d)?;
                    }
                    Ok(d)
                })
                .collect()
        }
    }
}

/// Qubit pairs of a coupling map, in the fixed emission order: ascending
/// `(i, i+1)` for linear, linear plus `(last, first)` for circular, and
/// lexicographic `(i, j)` with `i < j` for full.
fn coupling_pairs(map: CouplingMap, n: usize) -> Vec<(usize, usize)> {
    match map {
        CouplingMap::Linear => (0..n - 1).map(|i| (i, i + 1)).collect(),
        CouplingMap::Circular => {
            let mut pairs: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
            pairs.push((n - 1, 0));
            pairs
        }
        CouplingMap::Full => {
            let mut pairs = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    pairs.push((i, j));
                }
            }
            pairs
        }
    }
}

#[derive(Clone, Copy)]
enum CouplingMap {
    Linear,
    Circular,
    Full,
}

/// Builds the parameterized circuit of a form (without any wrapper).
fn form_circuit(form: VariationalFormId, n: usize, depth: usize) -> Result<Circuit> {
    let mut gates = Vec::new();
    let mut slot = 0usize;

    let rotation_layer = |gates: &mut Vec<Gate>, slot: &mut usize, kinds: [GateKind; 2]| {
        for q in 0..n {
            for kind in kinds {
                gates.push(Gate::variational(kind, q, *slot));
                *slot += 1;
            }
        }
    };
    let single_rotation_layer = |gates: &mut Vec<Gate>, slot: &mut usize, kind: GateKind| {
        for q in 0..n {
            gates.push(Gate::variational(kind, q, *slot));
            *slot += 1;
        }
    };
    let pair_layer = |gates: &mut Vec<Gate>, kind: GateKind, pairs: &[(usize, usize)]| {
        for &(a, b) in pairs {
            gates.push(Gate::fixed(kind, vec![a, b], None));
        }
    };
    // CX·RZ(θ)·CX on each linear pair: a parameterized two-qubit interaction.
    let sandwich_layer = |gates: &mut Vec<Gate>, slot: &mut usize| {
        for i in 0..n - 1 {
            gates.push(Gate::fixed(GateKind::CX, vec![i, i + 1], None));
            gates.push(Gate::variational(GateKind::RZ, i + 1, *slot));
            *slot += 1;
            gates.push(Gate::fixed(GateKind::CX, vec![i, i + 1], None));
        }
    };
    // Three-qubit cascade: CX chains down, RZ(θ) on the last qubit, chains back.
    let cascade_layer = |gates: &mut Vec<Gate>, slot: &mut usize| {
        for i in 0..n.saturating_sub(2) {
            gates.push(Gate::fixed(GateKind::CX, vec![i, i + 1], None));
            gates.push(Gate::fixed(GateKind::CX, vec![i + 1, i + 2], None));
            gates.push(Gate::variational(GateKind::RZ, i + 2, *slot));
            *slot += 1;
            gates.push(Gate::fixed(GateKind::CX, vec![i + 1, i + 2], None));
            gates.push(Gate::fixed(GateKind::CX, vec![i, i + 1], None));
        }
    };

    use GateKind::{RX, RY, RZ};
    match form {
        VariationalFormId::Vf1
        | VariationalFormId::Vf2
        | VariationalFormId::Vf3
        | VariationalFormId::Vf4
        | VariationalFormId::Vf5 => {
            let (kinds, ent, map) = match form {
                VariationalFormId::Vf1 => ([RY, RZ], GateKind::CZ, CouplingMap::Linear),
                VariationalFormId::Vf2 => ([RY, RZ], GateKind::CZ, CouplingMap::Full),
                VariationalFormId::Vf3 => ([RY, RZ], GateKind::CZ, CouplingMap::Circular),
                VariationalFormId::Vf4 => ([RY, RZ], GateKind::CX, CouplingMap::Linear),
                VariationalFormId::Vf5 => ([RX, RZ], GateKind::CZ, CouplingMap::Linear),
                _ => unreachable!(),
            };
            let pairs = coupling_pairs(map, n);
            rotation_layer(&mut gates, &mut slot, kinds);
            for _ in 0..depth {
                pair_layer(&mut gates, ent, &pairs);
                rotation_layer(&mut gates, &mut slot, kinds);
            }
        }
        VariationalFormId::Vf6 => {
            rotation_layer(&mut gates, &mut slot, [RY, RZ]);
            for _ in 0..depth {
                sandwich_layer(&mut gates, &mut slot);
                rotation_layer(&mut gates, &mut slot, [RY, RZ]);
            }
            single_rotation_layer(&mut gates, &mut slot, RY);
        }
        VariationalFormId::Vf7 => {
            rotation_layer(&mut gates, &mut slot, [RY, RZ]);
            for _ in 0..depth {
                sandwich_layer(&mut gates, &mut slot);
                cascade_layer(&mut gates, &mut slot);
                rotation_layer(&mut gates, &mut slot, [RY, RZ]);
            }
            single_rotation_layer(&mut gates, &mut slot, RY);
        }
        VariationalFormId::Vf8 => {
            let pairs = coupling_pairs(CouplingMap::Linear, n);
            rotation_layer(&mut gates, &mut slot, [RY, RZ]);
            for _ in 0..depth {
                pair_layer(&mut gates, GateKind::CZ, &pairs);
                rotation_layer(&mut gates, &mut slot, [RY, RZ]);
                sandwich_layer(&mut gates, &mut slot);
                rotation_layer(&mut gates, &mut slot, [RY, RZ]);
            }
        }
    }
    debug_assert_eq!(slot, form.param_count(n, depth));
    Circuit::new(n, gates)
}
