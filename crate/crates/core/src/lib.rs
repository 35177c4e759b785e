//! Planar dry friction on arbitrary contact pressure distributions.
//!
//! The crate provides a distributed planar LuGre / Elasto-Plastic model, a
//! reduced three-state model corrected by a pre-computed limit surface, and the
//! rigid-body simulations used to compare them.

pub mod analysis;
pub mod distributed;
pub mod error;
pub mod geometry;
pub mod limit_surface;
pub mod ode;
pub mod params;
pub mod reduced;
pub mod sim;
pub mod types;

pub use distributed::BristleField;
pub use error::{FrictionError, Result};
pub use geometry::{HertzExponent, PressureGrid, Shape, SurfaceSpec};
pub use limit_surface::LimitSurfaceTable;
pub use params::FrictionParams;
pub use reduced::{ReducedBristleState, ScalingMatrices};
pub use types::{FrictionWrench, VelocityTwist};
