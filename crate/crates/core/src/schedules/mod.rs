//! Time-dependent controls, sampled fields and the effective-time map.

mod dipole;
mod effective;
mod envelope;
mod grid;
mod schedule;

pub use dipole::{coupling_from_dipole, coupling_per_dipole, DipolePhysical};
pub(crate) use effective::cumulative_square;
pub use effective::{effective_time, EffectiveEnvelope, EffectiveTime, FieldRole};
pub use envelope::{overlap, EnvelopeSteps, FieldEnvelope};
pub use grid::{cumulative_trapezoid, TimeGrid};
pub use schedule::{MonotoneCubic, Schedule, Segment, Shape, StepSamples, ZERO_COUPLING_FRACTION};
