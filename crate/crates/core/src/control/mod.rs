//! Input-field and coupling design.
//!
//! Given a write coupling, the optimal input is the time reverse (in
//! effective time) of the free read-out pulse; [`optimal_write_input`] gives
//! it in closed form and [`variational_optimize`] finds it numerically for
//! any decay and detuning. Going the other way, [`synthesize_couplings`]
//! builds the write/read coupling pair that stores a given pulse and replays
//! it with the same shape.

mod bounds;
mod detuning;
mod functional;
mod synthesis;

pub use bounds::{cooperativity_from_depth, total_efficiency, CooperativityBound};
pub use detuning::{accumulated_phase, compensate_detuning};
pub use functional::{
    optimal_write_input, variational_optimize, write_efficiency_of, WriteFunctional,
    MAX_ITERATIONS, TOLERANCE,
};
pub use synthesis::{synthesize_couplings, verify_synthesis, SynthesisReport, INPUT_TOLERANCE};
