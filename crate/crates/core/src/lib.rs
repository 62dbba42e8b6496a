//! Simulation and pulse design for controllable-dipole quantum memories.
//!
//! The memory is an ensemble of two-level emitters whose transition dipole,
//! and hence light-matter coupling `g(t)`, can be switched in time. The crate
//! integrates the cavity and free-space equations of motion, evaluates
//! storage and retrieval efficiencies, and designs input fields and coupling
//! schedules, checking each numerical route against closed-form results.
//!
//! * [`schedules`]: couplings, detunings, sampled fields, effective time.
//! * [`cavity`]: full and adiabatically eliminated cavity dynamics.
//! * [`control`]: optimal inputs, coupling synthesis, variational optimizer.
//! * [`freespace`]: Maxwell-Bloch propagation, Bessel-kernel solution, sweeps.
//! * [`scenarios`]: config files, runs, sweeps and the `dipmem` CLI.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cavity;
pub mod constants;
pub mod control;
mod error;
pub mod freespace;
pub(crate) mod integrate;
pub mod scenarios;
pub mod schedules;

pub use error::{Error, Result};

/// Crate version recorded in run records.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
