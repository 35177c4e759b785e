use crate::error::{ensure, FrictionError, Result};
use crate::ode::{IntegratorConfig, Solver};
use crate::types::{FrictionWrench, VelocityTwist};

use super::model::FrictionModel;
use super::output_times;
use super::profile::VelocityProfile;

/// One output row of a kinematic run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicSample {
    pub t: f64,
    pub twist: VelocityTwist,
    pub wrench: FrictionWrench,
}

/// Integrates the bristle states along an imposed twist profile, starting from
/// zero deflection, and reports the CoP wrench every `output_dt`.
pub fn simulate_kinematic(
    profile: &VelocityProfile,
    model: &FrictionModel,
    integrator: IntegratorConfig,
    output_dt: f64,
) -> Result<Vec<KinematicSample>> {
    ensure(output_dt > 0.0, || format!("output_dt must be > 0, got {output_dt}"))?;
    let times = output_times(profile.duration(), output_dt);
    let t0 = profile.knots[0][0];
    let dim = model.state_len();
    let mut solver = Solver::new(integrator, dim)?;
    let mut z = vec![0.0; dim];
    let mut scratch = vec![0.0; dim];
    let mut out = Vec::with_capacity(times.len());

    let mut record = |t: f64, z: &[f64], scratch: &mut [f64]| -> Result<()> {
        let twist = profile.at(t);
        let wrench = model.rate_and_wrench(&twist, z, scratch);
        if !wrench.is_finite() {
            return Err(FrictionError::NonFinite { time: t });
        }
        out.push(KinematicSample { t, twist, wrench });
        Ok(())
    };
    record(t0, &z, &mut scratch)?;

    let outputs: Vec<f64> = times[1..].iter().map(|t| t + t0).collect();
    if let Some(&t_end) = outputs.last() {
        let mut t = t0;
        let mut rhs = |t: f64, y: &[f64], dy: &mut [f64]| model.rate(&profile.at(t), y, dy);
        solver.advance(&mut rhs, &mut t, &mut z, t_end, &outputs, &mut |t, y: &[f64]| {
            record(t, y, &mut scratch)
        })?;
    }
    for s in &mut out {
        s.t -= t0;
    }
    Ok(out)
}
