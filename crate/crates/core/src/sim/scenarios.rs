//! Scenario library: drift tests on a disc and the in-hand slip-stick gripper.

use std::f64::consts::FRAC_PI_2;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::distributed::steady_state_wrench;
use crate::error::Result;
use crate::geometry::{HertzExponent, PressureGrid, SurfaceSpec, HERTZ_COEFF_MM};
use crate::ode::IntegratorConfig;
use crate::params::FrictionParams;
use crate::types::VelocityTwist;

use super::dynamic::{simulate_dynamic, ContactFrame, DynamicOptions, DynamicSample, LoadProfile, RigidBody2D};
use super::model::{FrictionModel, ModelKind, ModelOptions};
use super::profile::Signal;

pub const GRAVITY: f64 = 9.81;

pub const DISC_MASS: f64 = 1.0;
pub const DISC_RADIUS: f64 = 0.05;

pub const GRIPPER_MASS: f64 = 0.2;
pub const GRIPPER_OBJECT_SIZE: [f64; 2] = [0.15, 0.08];

/// Tangential force and torque needed to start slipping, measured from the
/// steady-state wrench at a vanishing sliding speed.
pub fn breakaway(grid: &PressureGrid, params: &FrictionParams) -> (f64, f64) {
    let slow = 1e-9;
    let f = steady_state_wrench(&VelocityTwist::new(slow, 0.0, 0.0), grid, params).tangential_norm();
    let tau = steady_state_wrench(&VelocityTwist::new(0.0, 0.0, slow / grid.r()), grid, params).tau.abs();
    (f, tau)
}

/// Settings shared by the scenario runners.
#[derive(Debug, Clone)]
pub struct ScenarioOptions {
    pub params: FrictionParams,
    pub model: ModelOptions,
    pub integrator: IntegratorConfig,
    pub duration: f64,
    pub output_dt: f64,
}

/// Load pattern for the disc drift experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftLoad {
    /// Tangential load at 1/12 of breakaway, oscillating from 1 s, plus an
    /// oscillating torque at 1/6 of the breakaway torque from 3 s.
    Tangential,
    /// Constant `f_x = 1 N` and `tau = 0.03 N m` under a normal force oscillating by 1 N.
    NormalOscillation,
}

pub const DRIFT_LOAD_FREQUENCY: f64 = 25.0;
pub const DRIFT_NORMAL_FREQUENCY: f64 = 5.0;
pub const DRIFT_UPDATE_RATE: f64 = 1000.0;

impl DriftLoad {
    pub fn default_duration(&self) -> f64 {
        match self {
            DriftLoad::Tangential => 5.0,
            DriftLoad::NormalOscillation => 6.0,
        }
    }

    /// Loads for a disc with breakaway force `b` and breakaway torque `t_b`.
    pub fn loads(&self, b: f64, t_b: f64) -> LoadProfile {
        let weight = DISC_MASS * GRAVITY;
        match self {
            DriftLoad::Tangential => LoadProfile {
                normal: Signal::constant(weight),
                force_x: Signal::Sum {
                    terms: vec![Signal::constant(b / 12.0), Signal::sine(b / 12.0, DRIFT_LOAD_FREQUENCY, 1.0)],
                },
                force_y: Signal::default(),
                torque: Signal::sine(t_b / 6.0, DRIFT_LOAD_FREQUENCY, 3.0),
                update_rate: DRIFT_UPDATE_RATE,
            },
            DriftLoad::NormalOscillation => LoadProfile {
                normal: Signal::Sum {
                    terms: vec![Signal::constant(weight), Signal::sine(1.0, DRIFT_NORMAL_FREQUENCY, 0.0)],
                },
                force_x: Signal::constant(1.0),
                force_y: Signal::default(),
                torque: Signal::constant(0.03),
                update_rate: DRIFT_UPDATE_RATE,
            },
        }
    }
}

/// 1 kg disc of radius 0.05 m resting on its full face.
pub fn drift_scenario(load: DriftLoad, kind: ModelKind, opts: &ScenarioOptions) -> Result<Vec<DynamicSample>> {
    let spec = SurfaceSpec::circle(DISC_RADIUS);
    let weight = DISC_MASS * GRAVITY;
    let mut model = FrictionModel::new(kind, &spec, opts.params, weight, &opts.model)?;
    let (b, t_b) = breakaway(model.grid(), &opts.params);
    let loads = load.loads(b, t_b);
    let body = RigidBody2D::disc(DISC_MASS, DISC_RADIUS);
    let dyn_opts = DynamicOptions::new(opts.integrator, opts.duration, opts.output_dt);
    simulate_dynamic(&body, &loads, &mut model, &dyn_opts)
}

/// Mean CoM position over samples with `t >= from`.
pub fn mean_position(trace: &[DynamicSample], from: f64) -> [f64; 2] {
    let tail: Vec<_> = trace.iter().filter(|s| s.t >= from).collect();
    let k = tail.len().max(1) as f64;
    let sx: f64 = tail.iter().map(|s| s.pose[0]).sum();
    let sy: f64 = tail.iter().map(|s| s.pose[1]).sum();
    [sx / k, sy / k]
}

/// Distance of the CoM from its start, averaged over the final `window` seconds.
pub fn net_displacement(trace: &[DynamicSample], window: f64) -> f64 {
    let (Some(first), Some(last)) = (trace.first(), trace.last()) else {
        return 0.0;
    };
    let m = mean_position(trace, last.t - window);
    (m[0] - first.pose[0]).hypot(m[1] - first.pose[1])
}

/// Object placement in the gripper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GripperCase {
    /// CoM 25 mm from the CoA along x.
    Case1,
    /// CoM 2 mm from the CoA along x.
    Case2,
}

impl GripperCase {
    pub fn com_offset(&self) -> [f64; 2] {
        match self {
            GripperCase::Case1 => [0.025, 0.0],
            GripperCase::Case2 => [0.002, 0.0],
        }
    }
}

/// Grip force profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalProfile {
    /// Smooth oscillation `2.6 + 1.8 cos(2 pi 0.4 t)`.
    Profile1,
    /// Hold, release to a dip below the holding force, then re-grip.
    Profile2,
}

pub const GRIPPER_UPDATE_RATE: f64 = 100.0;
pub const GRIPPER_DURATION: f64 = 5.0;

impl NormalProfile {
    pub fn signal(&self) -> Signal {
        match self {
            NormalProfile::Profile1 => Signal::Sum {
                terms: vec![
                    Signal::constant(2.6),
                    Signal::Sine { amplitude: 1.8, frequency: 0.4, phase: FRAC_PI_2, start: 0.0 },
                ],
            },
            NormalProfile::Profile2 => Signal::Piecewise {
                knots: vec![[0.0, 4.4], [1.0, 4.4], [2.0, 0.92], [2.4, 0.92], [3.4, 4.4], [5.0, 4.4]],
            },
        }
    }
}

/// Finger pad surfaces used in the gripper experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GripperSurface {
    Circle,
    Square,
    GradientLine,
    HertzScaled,
    HertzReshaped,
}

impl GripperSurface {
    pub fn spec(&self) -> SurfaceSpec {
        match self {
            GripperSurface::Circle => SurfaceSpec::circle(0.01),
            GripperSurface::Square => SurfaceSpec::square(0.02),
            GripperSurface::GradientLine => SurfaceSpec::gradient_line(0.02).rotated(PI),
            GripperSurface::HertzScaled => SurfaceSpec::hertzian(HertzExponent::Constant { k: 2.0 }, HERTZ_COEFF_MM),
            GripperSurface::HertzReshaped => {
                SurfaceSpec::hertzian(HertzExponent::ForceProportional { c: 2.0 }, HERTZ_COEFF_MM)
            }
        }
    }
}

/// Object of 0.15 x 0.08 m and 0.2 kg hanging between two fingers under gravity.
/// The pose in the trace is the CoM in a frame with the CoA at the origin.
pub fn gripper_scenario(
    case: GripperCase,
    spec: &SurfaceSpec,
    normal: &Signal,
    kind: ModelKind,
    opts: &ScenarioOptions,
) -> Result<Vec<DynamicSample>> {
    let loads = LoadProfile {
        normal: normal.clone(),
        force_x: Signal::default(),
        force_y: Signal::default(),
        torque: Signal::default(),
        update_rate: GRIPPER_UPDATE_RATE,
    };
    let mut model = FrictionModel::new(kind, spec, opts.params, normal.at(0.0).max(1e-3), &opts.model)?;
    let mut body = RigidBody2D::rectangle(GRIPPER_MASS, GRIPPER_OBJECT_SIZE[0], GRIPPER_OBJECT_SIZE[1]);
    body.com_offset = case.com_offset();
    body.pose = [body.com_offset[0], body.com_offset[1], 0.0];
    let dyn_opts = DynamicOptions {
        integrator: opts.integrator,
        duration: opts.duration,
        output_dt: opts.output_dt,
        contact: ContactFrame::World,
        contact_count: 2,
        gravity: [0.0, -GRAVITY],
    };
    simulate_dynamic(&body, &loads, &mut model, &dyn_opts)
}

/// Whether a constant grip force `f_n` holds the object without slipping: over
/// the whole run the CoM stays within 1e-4 m of its start and `|theta|` below 1e-2 rad.
pub fn holds_under(case: GripperCase, spec: &SurfaceSpec, f_n: f64, kind: ModelKind, opts: &ScenarioOptions) -> Result<bool> {
    let trace = gripper_scenario(case, spec, &Signal::constant(f_n), kind, opts)?;
    let start = case.com_offset();
    Ok(trace
        .iter()
        .all(|s| (s.pose[0] - start[0]).hypot(s.pose[1] - start[1]) < 1e-4 && s.pose[2].abs() < 1e-2))
}

/// Smallest constant grip force that holds the object, by bisection on `[lo, hi]`.
pub fn stick_threshold(
    case: GripperCase,
    spec: &SurfaceSpec,
    kind: ModelKind,
    opts: &ScenarioOptions,
    mut lo: f64,
    mut hi: f64,
    iterations: usize,
) -> Result<f64> {
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        if holds_under(case, spec, mid, kind, opts)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
