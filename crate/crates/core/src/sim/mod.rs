//! Kinematic and rigid-body simulations driven by either friction model.

mod dynamic;
mod kinematic;
mod model;
mod profile;
pub mod scenarios;
mod trace;

pub use dynamic::{simulate_dynamic, ContactFrame, DynamicOptions, DynamicSample, LoadProfile, RigidBody2D};
pub use kinematic::{simulate_kinematic, KinematicSample};
pub use model::{FrictionModel, ModelKind, ModelOptions};
pub use profile::{Signal, VelocityProfile};
pub use trace::{write_dynamic_csv, write_kinematic_csv, DYNAMIC_HEADER, KINEMATIC_HEADER};

/// Output times `0, dt, 2 dt, ...` up to and including `duration` (within rounding).
pub fn output_times(duration: f64, dt: f64) -> Vec<f64> {
    let steps = (duration / dt + 1e-9).floor() as usize;
    (0..=steps).map(|k| k as f64 * dt).collect()
}
