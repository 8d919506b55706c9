//! Simulation engine for grid-based variational quantum time evolution.
//!
//! The crate propagates parameterized-circuit trial states under first-quantized
//! grid Hamiltonians by integrating the McLachlan equations of motion
//! `M·θ̇ = V`, where `M` is the Fubini-Study metric of the variational manifold
//! and `V` is the projection of the exact time derivative onto it.
//!
//! The building blocks are organized bottom-up:
//!
//! - [`state`], [`gate`], [`circuit`], [`register`]: dense statevector
//!   simulation of parameterized circuits, register-level unitaries, and the
//!   quantum Fourier transform block.
//! - [`grid`], [`potential`], [`hamiltonian`], [`wavepacket`]: discretized
//!   configuration space, `H = F†·diag(p²/2m)·F + diag(V)` Hamiltonians, and
//!   Gaussian wavepacket preparation, plus the exact-propagator oracle.
//! - [`ansatz`]: the eight heuristic variational forms and the basis-space
//!   wrappers (position, momentum, local-diagonal, mixed).
//! - [`diag`]: sorted eigendecompositions producing the local-diagonal space
//!   unitaries, including cutoff-thresholded partial diagonalizers.
//! - [`engine`]: metric/force assembly, SVD least-squares parameter velocities,
//!   ODE integration, initial-parameter fitting, and shot-based estimators.

pub mod ansatz;
pub mod circuit;
pub mod diag;
pub mod engine;
pub mod error;
pub mod gate;
pub mod grid;
pub mod hamiltonian;
pub mod potential;
pub mod register;
pub mod state;
pub mod wavepacket;

pub use error::CoreError;

/// Complex amplitude type used throughout the crate.
pub type C64 = num_complex::Complex64;
