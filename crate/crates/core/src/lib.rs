//! Simulation and pulse optimization for excitation transfer between two
//! tunably coupled qubits through a multimode resonator channel.
//!
//! All frequencies and rates are ordinary frequencies in units of the free
//! spectral range, and all times are in units of its inverse. The factor 2π
//! is applied once, when the generator (Hamiltonian or dissipator) is
//! assembled, so a constant coupling `g` to a single resonant mode yields an
//! excited-state population period of exactly `1 / (2 g)`.
//!
//! The crate is `no_std` with `alloc`; IO, configuration and thread pools live
//! in the companion `qst` crate.
#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` style checks are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod dynamics;
pub mod error;
pub mod exec;
pub mod fit;
pub mod integrator;
mod math;
pub mod model;
pub mod optimize;
pub mod protocol;
pub mod robustness;
pub mod simplex;
pub mod statespace;

pub use num_complex::Complex64 as C64;

pub use error::Error;
pub use exec::{Executor, Sequential};
pub use model::{
    ChannelSpec, Levels, PulseParams, QubitSpec, Scheme, SystemSpec, TransferSchedule, Violation,
};
