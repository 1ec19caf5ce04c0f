//! Travelling-wave profiles: singular composites, collocation refinement,
//! continuation in the wave speed and classification.

mod bvp;
mod driver;
mod profile;
mod singular;

pub use bvp::{solve, BvpSolution, Phase, SolverConfig};
pub use driver::{classify_wave, compute_wave, continue_in_c, continue_with, phase_target, refine_wave, type_iii_bracket, WaveGuess};
pub use profile::{WaveProfile, WaveType, PROFILE_VERSION};
pub use singular::{build_singular_composite, JumpRecord, ReducedSegment, SingularComposite};
