use serde::{Deserialize, Serialize};

use crate::error::{ensure, FrictionError, Result};
use crate::ode::{IntegratorConfig, Solver};
use crate::types::{FrictionWrench, VelocityTwist};

use super::model::FrictionModel;
use super::output_times;
use super::profile::Signal;

/// Planar rigid body. `pose` and `twist` describe the CoM in the world frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidBody2D {
    pub mass: f64,
    pub inertia: f64,
    /// `(x, y, theta)` of the CoM.
    #[serde(default)]
    pub pose: [f64; 3],
    #[serde(default)]
    pub twist: VelocityTwist,
    /// CoM position relative to the contact-area center, in the body frame.
    #[serde(default)]
    pub com_offset: [f64; 2],
}

impl RigidBody2D {
    /// Uniform disc, `I = m R^2 / 2`.
    pub fn disc(mass: f64, radius: f64) -> Self {
        Self::new(mass, 0.5 * mass * radius * radius)
    }

    /// Uniform rectangle, `I = m (w^2 + h^2) / 12`.
    pub fn rectangle(mass: f64, width: f64, height: f64) -> Self {
        Self::new(mass, mass * (width * width + height * height) / 12.0)
    }

    pub fn new(mass: f64, inertia: f64) -> Self {
        Self { mass, inertia, pose: [0.0; 3], twist: VelocityTwist::ZERO, com_offset: [0.0; 2] }
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.mass > 0.0 && self.inertia > 0.0, || {
            format!("mass and inertia must be > 0, got {} and {}", self.mass, self.inertia)
        })?;
        ensure(
            self.pose.iter().chain(&self.com_offset).all(|v| v.is_finite()) && self.twist.is_finite(),
            || "non-finite body state".into(),
        )
    }
}

/// External loads acting at the CoM plus the normal force on each contact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadProfile {
    pub normal: Signal,
    #[serde(default)]
    pub force_x: Signal,
    #[serde(default)]
    pub force_y: Signal,
    #[serde(default)]
    pub torque: Signal,
    /// Rate in Hz at which the normal force is sampled and held.
    pub update_rate: f64,
}

impl LoadProfile {
    pub fn validate(&self) -> Result<()> {
        ensure(self.update_rate > 0.0, || format!("update_rate must be > 0, got {}", self.update_rate))?;
        for s in [&self.normal, &self.force_x, &self.force_y, &self.torque] {
            s.validate()?;
        }
        Ok(())
    }
}

/// Where the friction surface is attached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContactFrame {
    /// The pressure field moves with the body (object resting on a table).
    #[default]
    Body,
    /// The pressure field is fixed in the world with its CoA at the origin
    /// (object held between gripper fingers).
    World,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicOptions {
    pub integrator: IntegratorConfig,
    pub duration: f64,
    pub output_dt: f64,
    #[serde(default)]
    pub contact: ContactFrame,
    /// Number of identical contacts sharing the same normal force.
    #[serde(default = "one")]
    pub contact_count: usize,
    #[serde(default)]
    pub gravity: [f64; 2],
}

fn one() -> usize {
    1
}

impl DynamicOptions {
    pub fn new(integrator: IntegratorConfig, duration: f64, output_dt: f64) -> Self {
        Self { integrator, duration, output_dt, contact: ContactFrame::Body, contact_count: 1, gravity: [0.0; 2] }
    }

    pub fn validate(&self) -> Result<()> {
        self.integrator.validate()?;
        ensure(self.duration > 0.0, || format!("duration must be > 0, got {}", self.duration))?;
        ensure(self.output_dt > 0.0, || format!("output_dt must be > 0, got {}", self.output_dt))?;
        ensure(self.contact_count >= 1, || "contact_count must be >= 1".into())
    }
}

/// One output row. `friction` holds the total friction force in the world
/// frame and its torque about the CoM.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicSample {
    pub t: f64,
    pub pose: [f64; 3],
    pub twist: VelocityTwist,
    pub friction: FrictionWrench,
    pub f_n: f64,
}

struct Dynamics<'a> {
    model: &'a FrictionModel,
    loads: &'a LoadProfile,
    body: &'a RigidBody2D,
    opts: &'a DynamicOptions,
    cop: [f64; 2],
}

impl Dynamics<'_> {
    /// Writes the state rate and returns the CoM-referenced world friction wrench.
    #[inline]
    fn eval(&self, y: &[f64], dy: &mut [f64]) -> FrictionWrench {
        let (th, vx, vy, w) = (y[2], y[3], y[4], y[5]);
        let (s, c) = th.sin_cos();
        let rc = match self.opts.contact {
            ContactFrame::Body => {
                let b = [self.cop[0] - self.body.com_offset[0], self.cop[1] - self.body.com_offset[1]];
                [c * b[0] - s * b[1], s * b[0] + c * b[1]]
            }
            ContactFrame::World => [self.cop[0] - y[0], self.cop[1] - y[1]],
        };
        let vc = [vx - w * rc[1], vy + w * rc[0]];
        let twist = match self.opts.contact {
            ContactFrame::Body => VelocityTwist::new(c * vc[0] + s * vc[1], -s * vc[0] + c * vc[1], w),
            ContactFrame::World => VelocityTwist::new(vc[0], vc[1], w),
        };
        let local = self.model.rate_and_wrench(&twist, &y[6..], &mut dy[6..]);
        let k = self.opts.contact_count as f64;
        let f = match self.opts.contact {
            ContactFrame::Body => [c * local.f_x - s * local.f_y, s * local.f_x + c * local.f_y],
            ContactFrame::World => [local.f_x, local.f_y],
        };
        let f = [k * f[0], k * f[1]];
        let tau = k * local.tau + rc[0] * f[1] - rc[1] * f[0];
        FrictionWrench::new(f[0], f[1], tau)
    }

    #[inline]
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let fr = self.eval(y, dy);
        let m = self.body.mass;
        let g = self.opts.gravity;
        dy[0] = y[3];
        dy[1] = y[4];
        dy[2] = y[5];
        dy[3] = (fr.f_x + self.loads.force_x.at(t)) / m + g[0];
        dy[4] = (fr.f_y + self.loads.force_y.at(t)) / m + g[1];
        dy[5] = (fr.tau + self.loads.torque.at(t)) / self.body.inertia;
    }
}

/// Integrates the body coupled with the friction model's bristle states.
///
/// The normal force is sampled at `loads.update_rate` and held constant between
/// samples; integration restarts at every update instant.
pub fn simulate_dynamic(
    body: &RigidBody2D,
    loads: &LoadProfile,
    model: &mut FrictionModel,
    opts: &DynamicOptions,
) -> Result<Vec<DynamicSample>> {
    body.validate()?;
    loads.validate()?;
    opts.validate()?;
    let dim = 6 + model.state_len();
    let mut y = vec![0.0; dim];
    y[..3].copy_from_slice(&body.pose);
    y[3..6].copy_from_slice(&body.twist.to_array());
    let mut solver = Solver::new(opts.integrator, dim)?;
    let mut scratch = vec![0.0; dim];
    let times = output_times(opts.duration, opts.output_dt);
    let mut out = Vec::with_capacity(times.len());
    let period = 1.0 / loads.update_rate;
    let updates = (opts.duration / period).ceil() as usize;

    let mut t = 0.0;
    let mut next_output = 0;
    for k in 0..updates.max(1) {
        let t_k = k as f64 * period;
        model.set_normal_force(loads.normal.at(t_k), t_k)?;
        let f_n = model.normal_force();
        let dynamics = Dynamics { model: &*model, loads, body, opts, cop: model.grid().cop() };
        let mut record = |t: f64, y: &[f64]| -> Result<()> {
            let fr = dynamics.eval(y, &mut scratch);
            if !fr.is_finite() || y.iter().any(|v| !v.is_finite()) {
                return Err(FrictionError::NonFinite { time: t });
            }
            out.push(DynamicSample {
                t,
                pose: [y[0], y[1], y[2]],
                twist: VelocityTwist::new(y[3], y[4], y[5]),
                friction: fr,
                f_n,
            });
            Ok(())
        };
        if k == 0 {
            record(0.0, &y)?;
            next_output = 1;
        }
        let last = k + 1 >= updates;
        let mut seg_end = ((k + 1) as f64 * period).min(opts.duration);
        let first = next_output;
        while next_output < times.len() && (last || times[next_output] <= seg_end + 1e-12) {
            next_output += 1;
        }
        if next_output > first {
            seg_end = seg_end.max(times[next_output - 1]);
        }
        let mut rhs = |t: f64, y: &[f64], dy: &mut [f64]| dynamics.rhs(t, y, dy);
        solver.advance(&mut rhs, &mut t, &mut y, seg_end, &times[first..next_output], &mut record)?;
    }
    Ok(out)
}
