//! Free-space Maxwell-Bloch propagation in a thin-in-time medium.
//!
//! ```text
//! d sigma/dt = -(gamma + i Delta) sigma + i g E
//! dE/dz      = i (g / c) sigma
//! ```
//!
//! [`numeric_evolution`] integrates these directly; [`analytic_evolution`]
//! evaluates the Bessel-kernel Green's function solution. Both work in the
//! transformed variables of [`FreeSpaceTransform`] and return physical
//! fields. Retarded-time effects inside the medium are neglected.

pub mod bessel;
mod evolve;
mod medium;
mod sweep;
mod transform;

pub use bessel::{entire_bessel_kernel, BesselOrder};
pub use evolve::{
    analytic_evolution, numeric_evolution, numeric_trace, EvolutionTrace, FreeSpaceFields,
    FreeSpaceLedger, MAX_KERNEL_STEP,
};
pub use medium::{MediumParams, SpatialGrid, SpinWave};
pub use sweep::{
    gaussian_fwtm, storage_retrieval_sweep, FreeSpaceScenario, RetrievalRun, Solver, SweepRow,
    MIN_PULSE_SAMPLES,
};
pub use transform::FreeSpaceTransform;
