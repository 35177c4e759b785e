//! LuGre / Elasto-Plastic coefficients and the Stribeck curve.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

/// Bristle friction coefficients shared by the distributed and reduced models.
///
/// Units follow the amended LuGre convention: forces are per unit normal load,
/// so `sigma0` is in 1/m and the damping terms in s/m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrictionParams {
    /// Bristle stiffness (1/m).
    pub sigma0: f64,
    /// Bristle damping (s/m).
    pub sigma1: f64,
    /// Viscous friction (s/m).
    pub sigma2: f64,
    pub mu_c: f64,
    pub mu_s: f64,
    /// Stribeck exponent.
    pub gamma: f64,
    /// Stribeck velocity (m/s).
    pub v_s: f64,
    /// Breakaway deflection as a fraction of the steady-state deflection.
    pub s_ba: f64,
    /// Use the Elasto-Plastic bristle law instead of plain LuGre.
    #[serde(default)]
    pub elasto_plastic: bool,
}

impl FrictionParams {
    /// Coulomb-like preset (`p = 0`): no viscous term, no Stribeck bump.
    pub const fn preset_p0() -> Self {
        Self {
            sigma0: 1e6,
            sigma1: 8e2,
            sigma2: 0.0,
            mu_c: 1.0,
            mu_s: 1.0,
            gamma: 2.0,
            v_s: 1e-3,
            s_ba: 0.9,
            elasto_plastic: false,
        }
    }

    /// Default simulation preset (`p = 1`): viscous friction and a 20 % static bump.
    pub const fn preset_p1() -> Self {
        Self {
            sigma2: 0.2,
            mu_s: 1.2,
            ..Self::preset_p0()
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "p0" => Some(Self::preset_p0()),
            "p1" => Some(Self::preset_p1()),
            _ => None,
        }
    }

    pub fn with_elasto_plastic(mut self, on: bool) -> Self {
        self.elasto_plastic = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.sigma0 > 0.0, || format!("sigma0 must be > 0, got {}", self.sigma0))?;
        ensure(self.sigma1 >= 0.0 && self.sigma2 >= 0.0, || {
            format!("sigma1, sigma2 must be >= 0, got {}, {}", self.sigma1, self.sigma2)
        })?;
        ensure(self.mu_c > 0.0 && self.mu_s >= self.mu_c, || {
            format!("need mu_s >= mu_c > 0, got mu_s={}, mu_c={}", self.mu_s, self.mu_c)
        })?;
        ensure(self.v_s > 0.0, || format!("v_s must be > 0, got {}", self.v_s))?;
        ensure(self.gamma > 0.0, || format!("gamma must be > 0, got {}", self.gamma))?;
        ensure((0.0..1.0).contains(&self.s_ba), || {
            format!("s_ba must lie in [0, 1), got {}", self.s_ba)
        })
    }

    /// Steady-state friction coefficient `g(v) = mu_C + (mu_S - mu_C) exp(-(v/v_s)^gamma)`.
    #[inline(always)]
    pub fn g(&self, speed: f64) -> f64 {
        if self.mu_s == self.mu_c {
            return self.mu_c;
        }
        let x = (speed / self.v_s).abs();
        let p = if self.gamma == 2.0 { x * x } else { x.powf(self.gamma) };
        // (mu_s - mu_c) exp(-p) is then below half an ulp of mu_c and the sum rounds to mu_c
        if p > 40.0 && self.mu_s - self.mu_c <= 10.0 * self.mu_c {
            return self.mu_c;
        }
        self.mu_c + (self.mu_s - self.mu_c) * (-p).exp()
    }

    /// Steady-state bristle deflection magnitude `g(v) / sigma0` at `speed`.
    #[inline(always)]
    pub fn z_max(&self, speed: f64) -> f64 {
        self.g(speed) / self.sigma0
    }
}

impl Default for FrictionParams {
    fn default() -> Self {
        Self::preset_p1()
    }
}
