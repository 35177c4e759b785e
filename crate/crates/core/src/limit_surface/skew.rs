//! Zero-tangential-force rotation centre, skew variables and the eigenvalue check.

use std::f64::consts::PI;

use super::LimitSurfaceTable;
use crate::distributed::steady_state_bilinear;
use crate::error::{ensure, FrictionError, Result};
use crate::geometry::PressureGrid;
use crate::params::FrictionParams;
use crate::types::VelocityTwist;

pub const SKEW_TOL: f64 = 1e-8;
pub const SKEW_MAX_ITER: usize = 100;

/// Rotation centre `p_s = (dx, dy)` with zero tangential friction, plus the radii it was scaled with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewParams {
    pub p_s: [f64; 2],
    pub r_a: f64,
    pub r_a_prime: f64,
}

/// Fixed-point search for the rotation centre with zero normalized tangential force.
///
/// `h` maps a twist to its normalized wrench for a surface of radius `r_prime`.
pub fn find_zero_tangential_cor_with(
    mut h: impl FnMut(&VelocityTwist) -> [f64; 3],
    r_prime: f64,
    tol: f64,
    max_iter: usize,
) -> Result<[f64; 2]> {
    ensure(tol > 0.0, || format!("tolerance must be > 0, got {tol}"))?;
    let omega = 1.0;
    let h0 = h(&VelocityTwist::new(0.0, 0.0, omega));
    let vx0 = r_prime * omega * h0[0];
    let vy0 = r_prime * omega * h0[1];
    let (mut vx, mut vy) = (vx0, vy0);
    let (mut hx, mut hy) = (h0[0], h0[1]);
    let mut iterations = 0;
    while hx.hypot(hy) > tol {
        if iterations == max_iter {
            return Err(FrictionError::SkewDiverged { iterations, residual: hx.hypot(hy) });
        }
        let hv = h(&VelocityTwist::new(vx, vy, omega));
        (hx, hy) = (hv[0], hv[1]);
        if vx0 != 0.0 {
            vx *= (r_prime * omega * hx + vx0) / vx0;
        }
        if vy0 != 0.0 {
            vy *= (r_prime * omega * hy + vy0) / vy0;
        }
        iterations += 1;
        if !(vx.is_finite() && vy.is_finite()) {
            return Err(FrictionError::SkewDiverged { iterations, residual: f64::INFINITY });
        }
    }
    Ok([-vy / omega, vx / omega])
}

/// Search against the Coulomb steady-state wrench of `grid`, normalized by
/// `(mu_C f_N, mu_C f_N, mu_C f_N r)`.
pub fn find_zero_tangential_cor(grid: &PressureGrid, params: &FrictionParams, tol: f64, max_iter: usize) -> Result<[f64; 2]> {
    let r = grid.r();
    ensure(r > 0.0, || "contact has zero equivalent radius".into())?;
    let coulomb = FrictionParams { sigma2: 0.0, mu_s: params.mu_c, elasto_plastic: false, ..*params };
    let scale = params.mu_c * grid.f_n();
    find_zero_tangential_cor_with(
        |tw| {
            let f = steady_state_bilinear(tw, grid, &coulomb);
            [f.f_x / scale, f.f_y / scale, f.tau / (scale * r)]
        },
        r,
        tol,
        max_iter,
    )
}

/// Search against a pre-computed table at its own radius `r'`.
pub fn find_zero_tangential_cor_table(table: &LimitSurfaceTable, tol: f64, max_iter: usize) -> Result<[f64; 2]> {
    let r = table.r_prime();
    find_zero_tangential_cor_with(|tw| table.lookup(r, tw), r, tol, max_iter)
}

/// Skew variables `(s_x, s_y)` for `twist`.
pub fn skew_variables(p_s: [f64; 2], r_a: f64, r_a_prime: f64, twist: &VelocityTwist) -> (f64, f64) {
    let [dx, dy] = p_s;
    let norm = dx.hypot(dy);
    if norm == 0.0 {
        return (0.0, 0.0);
    }
    let s_n = scaling_factor(p_s, r_a, twist);
    let k = r_a / r_a_prime * s_n;
    (-k * dy, k * dx)
}

/// `s_n = (2/pi) atan2(|omega| r_a, |(v_x dx, v_y dy)| / |p_s|)`; zero when `p_s = 0`.
pub fn scaling_factor(p_s: [f64; 2], r_a: f64, twist: &VelocityTwist) -> f64 {
    let norm = p_s[0].hypot(p_s[1]);
    if norm == 0.0 {
        return 0.0;
    }
    let a = twist.v_x * p_s[0] / norm;
    let b = twist.v_y * p_s[1] / norm;
    2.0 / PI * (twist.omega.abs() * r_a).atan2(a.hypot(b))
}

/// Eigenvalues of the symmetric part of the skewed ellipsoid matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenCheck {
    /// `1` followed by the `+` and `-` roots (real parts when complex).
    pub eigenvalues: [f64; 3],
    pub complex: bool,
    pub positive: bool,
    /// Whether `4 r_a^2 > s_x^2 + s_y^2` holds.
    pub condition_holds: bool,
}

pub fn check_positive_definite(r: f64, r_a: f64, s_x: f64, s_y: f64) -> EigenCheck {
    let m = (r * r + 1.0) / 2.0;
    let disc = m * m - (r_a * r_a - s_x * s_x / 4.0 - s_y * s_y / 4.0);
    let (l1, l2, complex) = if disc >= 0.0 {
        let s = disc.sqrt();
        (m + s, m - s, false)
    } else {
        (m, m, true)
    };
    EigenCheck {
        eigenvalues: [1.0, l1, l2],
        complex,
        positive: l1 > 0.0 && l2 > 0.0,
        condition_holds: 4.0 * r_a * r_a > s_x * s_x + s_y * s_y,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{discretize, SurfaceSpec};

    #[test]
    fn circle_has_centred_skew_point() {
        let grid = discretize(&SurfaceSpec::circle(0.01), 21, 1.0).unwrap();
        let p = find_zero_tangential_cor(&grid, &FrictionParams::preset_p0(), SKEW_TOL, SKEW_MAX_ITER).unwrap();
        assert!(p[0].hypot(p[1]) < 1e-6 * grid.r());
    }

    #[test]
    fn scaling_factor_limits() {
        let p_s = [1e-3, 2e-3];
        assert_eq!(scaling_factor(p_s, 0.01, &VelocityTwist::new(0.0, 0.0, 2.0)), 1.0);
        assert_eq!(scaling_factor(p_s, 0.01, &VelocityTwist::new(0.1, 0.2, 0.0)), 0.0);
        assert_eq!(skew_variables([0.0, 0.0], 0.01, 0.01, &VelocityTwist::new(0.0, 0.0, 1.0)), (0.0, 0.0));
        let (sx, sy) = skew_variables(p_s, 0.02, 0.01, &VelocityTwist::new(0.0, 0.0, 1.0));
        assert!((sx + 2.0 * 2e-3).abs() < 1e-15 && (sy - 2.0 * 1e-3).abs() < 1e-15);
    }

    #[test]
    fn eigen_closed_forms() {
        let e = check_positive_definite(1.0, 1.0, 0.0, 0.0);
        assert_eq!(e.eigenvalues, [1.0, 1.0, 1.0]);
        let e = check_positive_definite(2.0, 2.0, 0.0, 0.0);
        assert_eq!(e.eigenvalues, [1.0, 4.0, 1.0]);
        assert!(e.positive && e.condition_holds && !e.complex);
        let e = check_positive_definite(0.1, 5.0, 0.0, 0.0);
        assert!(e.complex && e.positive);
    }

    #[test]
    fn divergence_is_reported() {
        // an evaluator whose tangential force never decays
        let err = find_zero_tangential_cor_with(|_| [0.5, 0.0, -1.0], 0.01, 1e-8, 5).unwrap_err();
        assert!(matches!(err, FrictionError::SkewDiverged { iterations: 5, .. }));
        assert!(find_zero_tangential_cor_with(|_| [0.0; 3], 0.01, 0.0, 5).is_err());
    }
}
