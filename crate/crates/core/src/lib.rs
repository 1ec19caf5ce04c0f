//! Travelling waves of a haptotaxis model and their point spectrum via a
//! Riccati-Evans function on the Grassmannian of 2-planes in C^4.

pub mod analysis;
pub mod error;
pub mod exec;
pub mod grassmann;
pub mod io;
pub mod linalg;
pub mod linearization;
pub mod model;
pub mod ode;
pub mod wave;

pub use error::{Error, Result};
pub use exec::Exec;
pub use model::{ModelParams, SlowState};
pub use wave::{WaveProfile, WaveType};
