//! Quantum state transfer (QST) through spin-1/2 XX chains.
//!
//! The crate models an open XX chain
//!
//! ```text
//! H = -sum_i J_i (sx_i sx_{i+1} + sy_i sy_{i+1}) + sum_i h_i sz_i
//! ```
//!
//! in the magnetization-conserving sectors relevant for transferring one or
//! two qubits between the chain ends. The single-excitation sector is a real
//! symmetric tridiagonal matrix; everything dynamical (transition amplitudes,
//! two-particle determinants, average fidelities, transfer times) is built on
//! its spectral decomposition. A dense spin-basis propagator ([`ed_oracle`])
//! provides an independent cross-check at small sizes.
//!
//! Conventions used throughout:
//! - energies in units of the bulk coupling `J = 1`, times in units of `1/J`
//!   with `hbar = 1`;
//! - the all-down state is gauged to energy zero, so the one-excitation
//!   diagonal is `-2 h_n` and the hopping element is `-2 J_n`;
//! - site and eigenstate indices in the public API are 1-based, matching the
//!   usual spin-chain labelling `n = 1..N`.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the CLI live in
//! the companion `qst-cli` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod amplitudes;
pub mod analysis;
pub mod chain;
pub mod ed_oracle;
mod error;
pub mod fidelity;
pub mod spectral;

pub use error::Error;

/// Best average fidelity for two-qubit transfer achievable with local
/// operations and classical communication. A quantum channel is only useful
/// above this value.
pub const LOCC_FIDELITY_2Q: f64 = 2.0 / 5.0;

pub type Result<T> = core::result::Result<T, Error>;
