//! Simulation and verification toolkit for fractional Lévy-driven
//! Ornstein–Uhlenbeck processes and the state-space transforms built on them.

pub mod analytics;
pub mod error;
pub mod floup;
pub mod flp;
pub mod levy;
pub mod path;
pub mod quad;
pub mod special;
pub mod stats;
pub mod sst;
pub mod young;

pub use error::{FlevyError, Result};
pub use flp::{flp_covariance, flp_kernel, simulate_flp, FlpParams};
pub use levy::{sample_two_sided_levy, DriverKind, LevyDriverSpec};
pub use path::{GridFunction, SamplePath};
