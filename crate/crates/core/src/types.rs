//! Planar twist and wrench triples, both expressed at the centre of pressure.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Relative velocity of the sliding body at the CoP: `(v_x, v_y, omega)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VelocityTwist {
    pub v_x: f64,
    pub v_y: f64,
    pub omega: f64,
}

impl VelocityTwist {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0);

    pub const fn new(v_x: f64, v_y: f64, omega: f64) -> Self {
        Self { v_x, v_y, omega }
    }

    /// Pure rotation at `omega` about the point `center` (relative to CoP).
    pub fn rotation_about(center: [f64; 2], omega: f64) -> Self {
        Self::new(omega * center[1], -omega * center[0], omega)
    }

    pub fn tangential_speed(&self) -> f64 {
        self.v_x.hypot(self.v_y)
    }

    /// Instantaneous centre of rotation, `None` for (near) pure translation.
    pub fn center_of_rotation(&self, omega_eps: f64) -> Option<[f64; 2]> {
        (self.omega.abs() > omega_eps).then(|| [-self.v_y / self.omega, self.v_x / self.omega])
    }

    pub fn is_zero(&self) -> bool {
        self.v_x == 0.0 && self.v_y == 0.0 && self.omega == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.v_x.is_finite() && self.v_y.is_finite() && self.omega.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.v_x, self.v_y, self.omega]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.v_x * s, self.v_y * s, self.omega * s)
    }
}

impl Neg for VelocityTwist {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

/// Friction force and torque acting on the sliding body at the CoP: `(f_x, f_y, tau)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FrictionWrench {
    pub f_x: f64,
    pub f_y: f64,
    pub tau: f64,
}

impl FrictionWrench {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0);

    pub const fn new(f_x: f64, f_y: f64, tau: f64) -> Self {
        Self { f_x, f_y, tau }
    }

    pub fn tangential_norm(&self) -> f64 {
        self.f_x.hypot(self.f_y)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.f_x, self.f_y, self.tau]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn is_finite(&self) -> bool {
        self.f_x.is_finite() && self.f_y.is_finite() && self.tau.is_finite()
    }

    /// Mechanical power delivered by this wrench along `twist`.
    pub fn power(&self, twist: &VelocityTwist) -> f64 {
        self.f_x * twist.v_x + self.f_y * twist.v_y + self.tau * twist.omega
    }
}

impl Add for FrictionWrench {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.f_x + o.f_x, self.f_y + o.f_y, self.tau + o.tau)
    }
}

impl AddAssign for FrictionWrench {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for FrictionWrench {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.f_x - o.f_x, self.f_y - o.f_y, self.tau - o.tau)
    }
}

impl Mul<f64> for FrictionWrench {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.f_x * s, self.f_y * s, self.tau * s)
    }
}

impl Neg for FrictionWrench {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

/// Neumaier-compensated accumulator for the three wrench components.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct WrenchSum {
    sum: [f64; 3],
    comp: [f64; 3],
}

impl WrenchSum {
    #[inline(always)]
    pub(crate) fn add(&mut self, v: [f64; 3]) {
        for k in 0..3 {
            let s = self.sum[k];
            let t = s + v[k];
            if s.abs() >= v[k].abs() {
                self.comp[k] += (s - t) + v[k];
            } else {
                self.comp[k] += (v[k] - t) + s;
            }
            self.sum[k] = t;
        }
    }

    #[inline(always)]
    pub(crate) fn total(&self) -> [f64; 3] {
        [
            self.sum[0] + self.comp[0],
            self.sum[1] + self.comp[1],
            self.sum[2] + self.comp[2],
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn center_of_rotation_matches_definition() {
        let tw = VelocityTwist::rotation_about([0.003, -0.002], 2.0);
        let c = tw.center_of_rotation(1e-12).unwrap();
        assert!((c[0] - 0.003).abs() < 1e-15);
        assert!((c[1] + 0.002).abs() < 1e-15);
        assert!(VelocityTwist::new(1.0, 0.0, 0.0).center_of_rotation(1e-12).is_none());
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = WrenchSum::default();
        s.add([1e16, 0.0, 0.0]);
        for _ in 0..1000 {
            s.add([1.0, 0.0, 0.0]);
        }
        s.add([-1e16, 0.0, 0.0]);
        assert_eq!(s.total()[0], 1000.0);
    }
}
