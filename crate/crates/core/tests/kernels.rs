//! Gate-kernel, circuit, and register-unitary correctness against small dense
//! oracles and algebraic identities.

use num_complex::Complex64 as C64;
use proptest::prelude::*;

use qvte_core::circuit::{apply_circuit, Circuit};
use qvte_core::gate::{apply_gate, Gate, GateKind};
use qvte_core::register::{apply_register_unitary, qft_block};
use qvte_core::state::{inner_product, Statevector};

fn amp(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn random_state(num_qubits: usize, seed: u64) -> Statevector {
    // Simple deterministic pseudo-random amplitudes, normalized.
    let mut x = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(1);
    let mut next = move || {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let n = 1usize << num_qubits;
    let mut amps: Vec<C64> = (0..n).map(|_| amp(next(), next())).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    Statevector::from_amplitudes(num_qubits, amps).unwrap()
}

#[test]
fn hadamard_on_zero_gives_plus() {
    let state = Statevector::zero_state(1);
    let out = apply_gate(&state, &Gate::fixed(GateKind::H, vec![0], None), &[]).unwrap();
    let r = 1.0 / 2f64.sqrt();
    assert!((out.amplitudes()[0] - amp(r, 0.0)).norm() < 1e-15);
    assert!((out.amplitudes()[1] - amp(r, 0.0)).norm() < 1e-15);
}

#[test]
fn pauli_x_flips_target_bit_only() {
    let state = Statevector::basis_state(3, 0b010);
    let out = apply_gate(&state, &Gate::fixed(GateKind::X, vec![0], None), &[]).unwrap();
    assert!((out.amplitudes()[0b011] - amp(1.0, 0.0)).norm() < 1e-15);
}

#[test]
fn cx_flips_target_when_control_set() {
    // Gate targets are [control, target]; qubit 0 is the least-significant bit.
    let state = Statevector::basis_state(2, 0b01);
    let out = apply_gate(&state, &Gate::fixed(GateKind::CX, vec![0, 1], None), &[]).unwrap();
    assert!((out.amplitudes()[0b11] - amp(1.0, 0.0)).norm() < 1e-15);
    let state = Statevector::basis_state(2, 0b10);
    let out = apply_gate(&state, &Gate::fixed(GateKind::CX, vec![0, 1], None), &[]).unwrap();
    assert!((out.amplitudes()[0b10] - amp(1.0, 0.0)).norm() < 1e-15);
}

#[test]
fn cz_phases_only_the_doubly_excited_component() {
    let mut state = random_state(2, 7);
    let before = state.amplitudes().to_vec();
    state = apply_gate(&state, &Gate::fixed(GateKind::CZ, vec![0, 1], None), &[]).unwrap();
    for idx in 0..4 {
        let expected = if idx == 0b11 { -before[idx] } else { before[idx] };
        assert!((state.amplitudes()[idx] - expected).norm() < 1e-15);
    }
}

#[test]
fn rotation_convention_ry_half_angle() {
    // R_Y(θ)|0⟩ = cos(θ/2)|0⟩ + sin(θ/2)|1⟩.
    let theta = 0.7331;
    let state = Statevector::zero_state(1);
    let out = apply_gate(&state, &Gate::fixed(GateKind::RY, vec![0], Some(theta)), &[]).unwrap();
    assert!((out.amplitudes()[0] - amp((theta / 2.0).cos(), 0.0)).norm() < 1e-14);
    assert!((out.amplitudes()[1] - amp((theta / 2.0).sin(), 0.0)).norm() < 1e-14);
}

#[test]
fn rotation_convention_rz_phases() {
    // R_Z(θ) = diag(e^{−iθ/2}, e^{+iθ/2}).
    let theta = 1.234;
    let state = Statevector::from_amplitudes(1, vec![amp(0.6, 0.0), amp(0.0, 0.8)]).unwrap();
    let out = apply_gate(&state, &Gate::fixed(GateKind::RZ, vec![0], Some(theta)), &[]).unwrap();
    let phase = C64::from_polar(1.0, -theta / 2.0);
    assert!((out.amplitudes()[0] - amp(0.6, 0.0) * phase).norm() < 1e-14);
    assert!((out.amplitudes()[1] - amp(0.0, 0.8) * phase.conj()).norm() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn rotations_are_additive(theta1 in -3.0f64..3.0, theta2 in -3.0f64..3.0, seed in 0u64..1000) {
        for kind in [GateKind::RX, GateKind::RY, GateKind::RZ] {
            let state = random_state(2, seed);
            let once = apply_gate(
                &state,
                &Gate::fixed(kind, vec![1], Some(theta1 + theta2)),
                &[],
            ).unwrap();
            let mut twice = apply_gate(&state, &Gate::fixed(kind, vec![1], Some(theta1)), &[]).unwrap();
            twice = apply_gate(&twice, &Gate::fixed(kind, vec![1], Some(theta2)), &[]).unwrap();
            for (a, b) in once.amplitudes().iter().zip(twice.amplitudes()) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn gates_preserve_norm(seed in 0u64..1000, theta in -3.0f64..3.0) {
        let gates = [
            Gate::fixed(GateKind::RX, vec![0], Some(theta)),
            Gate::fixed(GateKind::H, vec![1], None),
            Gate::fixed(GateKind::CX, vec![0, 2], None),
            Gate::fixed(GateKind::CZ, vec![2, 1], None),
            Gate::fixed(GateKind::ControlledPhase, vec![1, 2], Some(theta)),
        ];
        let mut state = random_state(3, seed);
        for gate in &gates {
            state = apply_gate(&state, gate, &[]).unwrap();
            prop_assert!((state.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn qft_block_is_unitary_on_random_states(seed in 0u64..1000) {
        let f = qft_block(3);
        let state = random_state(3, seed);
        let transformed = apply_register_unitary(&state, &f).unwrap();
        prop_assert!((transformed.norm() - 1.0).abs() < 1e-12);
        let back = apply_register_unitary(&transformed, &f.adjoint()).unwrap();
        for (a, b) in back.amplitudes().iter().zip(state.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }
}

#[test]
fn qft_block_matches_dft_definition() {
    // F|j⟩ has amplitudes e^{+2πijk/N}/√N at |k⟩.
    let n = 3usize;
    let size = 1 << n;
    let f = qft_block(n);
    for j in 0..size {
        let state = Statevector::basis_state(n, j);
        let out = apply_register_unitary(&state, &f).unwrap();
        for k in 0..size {
            let expected = C64::from_polar(
                1.0 / (size as f64).sqrt(),
                2.0 * std::f64::consts::PI * (j * k) as f64 / size as f64,
            );
            assert!((out.amplitudes()[k] - expected).norm() < 1e-13);
        }
    }
}

#[test]
fn register_unitary_acts_on_selected_register_only() {
    // Apply a 1-qubit QFT (Hadamard) block on the middle register of 3 qubits
    // and compare with the gate kernel.
    let block = qft_block(1).on_register(1);
    let state = random_state(3, 99);
    let via_block = apply_register_unitary(&state, &block).unwrap();
    let via_gate = apply_gate(&state, &Gate::fixed(GateKind::H, vec![1], None), &[]).unwrap();
    for (a, b) in via_block.amplitudes().iter().zip(via_gate.amplitudes()) {
        assert!((a - b).norm() < 1e-13);
    }
}

#[test]
fn circuit_rejects_bad_parameter_slots() {
    // Slot 1 appears twice and slot 0 is missing.
    let gates = vec![
        Gate::variational(GateKind::RY, 0, 1),
        Gate::variational(GateKind::RZ, 1, 1),
    ];
    assert!(Circuit::new(2, gates).is_err());
}

#[test]
fn circuit_application_composes_gates_in_order() {
    let gates = vec![
        Gate::variational(GateKind::RY, 0, 0),
        Gate::fixed(GateKind::CX, vec![0, 1], None),
    ];
    let circuit = Circuit::new(2, gates).unwrap();
    let theta = std::f64::consts::PI;
    let out = apply_circuit(&circuit, &[theta], &Statevector::zero_state(2)).unwrap();
    // RY(π)|0⟩ = |1⟩, then CX sets the second qubit: |11⟩.
    assert!((out.amplitudes()[0b11].norm() - 1.0).abs() < 1e-12);
}

#[test]
fn inner_product_is_conjugate_symmetric() {
    let a = random_state(3, 1);
    let b = random_state(3, 2);
    let ab = inner_product(&a, &b).unwrap();
    let ba = inner_product(&b, &a).unwrap();
    assert!((ab - ba.conj()).norm() < 1e-14);
    assert!((inner_product(&a, &a).unwrap().re - 1.0).abs() < 1e-12);
}
