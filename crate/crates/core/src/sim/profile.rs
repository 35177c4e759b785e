//! Imposed velocity profiles and scalar load signals.

use std::f64::consts::TAU;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::types::VelocityTwist;

const CANONICAL_PROFILE: &str = include_str!("../../data/canonical_profile.csv");

/// Piecewise-linear twist profile; held at the end values outside its knots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocityProfile {
    /// `(t, v_x, v_y, omega)` knots with strictly increasing `t`.
    pub knots: Vec<[f64; 4]>,
}

impl VelocityProfile {
    pub fn new(knots: Vec<[f64; 4]>) -> Result<Self> {
        ensure(!knots.is_empty(), || "velocity profile has no knots".into())?;
        ensure(knots.windows(2).all(|w| w[1][0] > w[0][0]), || {
            "velocity profile times must be strictly increasing".into()
        })?;
        ensure(knots.iter().flatten().all(|v| v.is_finite()), || "non-finite profile value".into())?;
        Ok(Self { knots })
    }

    /// Bundled 5 s profile with translation, rotation and mixed phases.
    pub fn canonical() -> Self {
        Self::from_csv_reader(CANONICAL_PROFILE.as_bytes()).expect("bundled profile parses")
    }

    /// Reads `t,v_x,v_y,omega` rows; `#` starts a comment line.
    pub fn from_csv_reader<R: Read>(rdr: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(rdr);
        let mut knots = Vec::new();
        for rec in reader.deserialize() {
            let row: (f64, f64, f64, f64) = rec?;
            knots.push([row.0, row.1, row.2, row.3]);
        }
        Self::new(knots)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    /// Constant twist over `[0, duration]`.
    pub fn constant(twist: VelocityTwist, duration: f64) -> Self {
        let a = [twist.v_x, twist.v_y, twist.omega];
        Self { knots: vec![[0.0, a[0], a[1], a[2]], [duration, a[0], a[1], a[2]]] }
    }

    pub fn duration(&self) -> f64 {
        self.knots.last().map_or(0.0, |k| k[0]) - self.knots[0][0]
    }

    /// Same velocities on a time axis compressed or stretched to span `duration`.
    pub fn time_scaled(&self, duration: f64) -> Self {
        let t0 = self.knots[0][0];
        let s = duration / self.duration();
        let knots = self.knots.iter().map(|k| [(k[0] - t0) * s, k[1], k[2], k[3]]).collect();
        Self { knots }
    }

    pub fn at(&self, t: f64) -> VelocityTwist {
        let k = &self.knots;
        let i = k.partition_point(|p| p[0] <= t);
        let v = if i == 0 {
            [k[0][1], k[0][2], k[0][3]]
        } else if i == k.len() {
            let l = k[k.len() - 1];
            [l[1], l[2], l[3]]
        } else {
            let (a, b) = (k[i - 1], k[i]);
            let w = (t - a[0]) / (b[0] - a[0]);
            [
                a[1] + w * (b[1] - a[1]),
                a[2] + w * (b[2] - a[2]),
                a[3] + w * (b[3] - a[3]),
            ]
        };
        VelocityTwist::from_array(v)
    }
}

/// Scalar time signal used for normal forces and external loads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Signal {
    Constant { value: f64 },
    /// `amplitude sin(2 pi frequency (t - start) + phase)` for `t >= start`, zero before.
    Sine {
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        start: f64,
    },
    /// Linear interpolation between `[t, value]` knots, held outside.
    Piecewise { knots: Vec<[f64; 2]> },
    Sum { terms: Vec<Signal> },
}

impl Default for Signal {
    fn default() -> Self {
        Signal::Constant { value: 0.0 }
    }
}

impl Signal {
    pub fn constant(value: f64) -> Self {
        Signal::Constant { value }
    }

    pub fn sine(amplitude: f64, frequency: f64, start: f64) -> Self {
        Signal::Sine { amplitude, frequency, phase: 0.0, start }
    }

    pub fn at(&self, t: f64) -> f64 {
        match self {
            Signal::Constant { value } => *value,
            Signal::Sine { amplitude, frequency, phase, start } => {
                if t < *start {
                    0.0
                } else {
                    amplitude * (TAU * frequency * (t - start) + phase).sin()
                }
            }
            Signal::Piecewise { knots } => {
                if knots.is_empty() {
                    return 0.0;
                }
                let i = knots.partition_point(|k| k[0] <= t);
                if i == 0 {
                    knots[0][1]
                } else if i == knots.len() {
                    knots[knots.len() - 1][1]
                } else {
                    let (a, b) = (knots[i - 1], knots[i]);
                    a[1] + (t - a[0]) / (b[0] - a[0]) * (b[1] - a[1])
                }
            }
            Signal::Sum { terms } => terms.iter().map(|s| s.at(t)).sum(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Signal::Constant { value } => ensure(value.is_finite(), || "non-finite signal value".into()),
            Signal::Sine { amplitude, frequency, phase, start } => ensure(
                [amplitude, frequency, phase, start].iter().all(|v| v.is_finite()) && *frequency >= 0.0,
                || "sine signal needs finite values and frequency >= 0".into(),
            ),
            Signal::Piecewise { knots } => ensure(
                !knots.is_empty() && knots.windows(2).all(|w| w[1][0] > w[0][0]),
                || "piecewise signal needs strictly increasing knot times".into(),
            ),
            Signal::Sum { terms } => terms.iter().try_for_each(|s| s.validate()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_profile_shape() {
        let p = VelocityProfile::canonical();
        assert_eq!(p.duration(), 5.0);
        assert_eq!(p.at(0.4), VelocityTwist::new(0.01, 0.0, 0.0));
        assert_eq!(p.at(1.5).omega, 2.0);
        assert_eq!(p.at(10.0), VelocityTwist::ZERO);
        let short = p.time_scaled(1.0);
        assert_eq!(short.duration(), 1.0);
        assert_eq!(short.at(0.08), p.at(0.4));
    }

    #[test]
    fn profile_cor_passes_through_patch() {
        let p = VelocityProfile::canonical();
        let inside = (0..500)
            .map(|k| p.at(k as f64 * 0.01))
            .filter_map(|tw| tw.center_of_rotation(1e-3))
            .filter(|c| c[0].hypot(c[1]) < 0.01)
            .count();
        assert!(inside > 50);
    }

    #[test]
    fn signals() {
        assert_eq!(Signal::sine(2.0, 1.0, 1.0).at(0.5), 0.0);
        assert!((Signal::sine(2.0, 1.0, 1.0).at(1.25) - 2.0).abs() < 1e-12);
        let pw = Signal::Piecewise { knots: vec![[0.0, 1.0], [2.0, 3.0]] };
        assert_eq!(pw.at(1.0), 2.0);
        assert_eq!(pw.at(5.0), 3.0);
        let s = Signal::Sum { terms: vec![Signal::constant(1.0), pw] };
        assert_eq!(s.at(-1.0), 2.0);
        assert!(Signal::Piecewise { knots: vec![[1.0, 0.0], [1.0, 2.0]] }.validate().is_err());
    }

    #[test]
    fn bad_profiles_are_rejected() {
        assert!(VelocityProfile::new(vec![]).is_err());
        assert!(VelocityProfile::new(vec![[1.0, 0.0, 0.0, 0.0], [0.5, 0.0, 0.0, 0.0]]).is_err());
        assert!(VelocityProfile::from_csv_reader("t,v_x,v_y,omega\n0,1,2\n".as_bytes()).is_err());
    }
}
