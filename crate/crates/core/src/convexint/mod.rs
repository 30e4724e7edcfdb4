//! Constraint set geometry, localized plane waves and perturbation steps for the
//! linear system `∂ₜv + div u = 0`, `div v = 0`.

mod geometry;
mod jet;
mod operator;
mod step;
mod wave;

pub use geometry::{find_segment, hull_slacks, in_u, Membership, MembershipReport, SegmentOptions, SegmentReport, StateSegment};
pub use operator::{kernel_direction, potential_operator, PotentialOperator, ENTRIES};
pub use wave::{cutoff, localized_wave, minimal_frequency, wave_n_min, ComponentMeans, PlaneWave, SampledWaveField, WaveMetadata};
pub use step::{pack_cylinders, pairwise_disjoint, perturbation_step, run_steps, Cylinder, CylinderUpdate, StepOptions, StepReport, StepRun};
