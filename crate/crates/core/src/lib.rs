//! Physics core for a three-level quantum heat engine coupled to a hot and a
//! cold bath, plus a qubit-register emulation of its dynamics.
//!
//! * [`model`]: dressed-basis parameters, the rate equation and the full
//!   master equation.
//! * [`qsim`]: density-matrix simulation, noise and shot sampling.
//! * [`circuit`]: engine and calibration circuits.
//! * [`gem`]: readout calibration and mitigation.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod linalg;
pub mod model;
pub mod qsim;
pub mod circuit;
pub mod gem;
