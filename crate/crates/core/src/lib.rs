//! Parallel frames, curvature coefficient tensors and the Hasimoto
//! transformation for fourth-order dispersive curve flows on Kähler
//! manifolds, with integrators for both the geometric flow and the
//! transformed complex systems.

// Tolerance checks are written as `!(x <= tol)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ambient;
pub mod error;
pub mod geometry;
pub mod flow_geo;
pub mod flow_q;
pub mod frames;
pub mod grid;
pub mod linalg;
pub mod params;
pub mod profiles;
pub mod tensor;

pub use error::{Error, Result};

/// Crate version, embedded in experiment reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
