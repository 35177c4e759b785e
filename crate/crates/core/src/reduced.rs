//! Reduced three-bristle model with ellipsoid or pre-computed limit-surface direction.

use crate::distributed::elasto_plastic_beta;
use crate::limit_surface::LimitSurfaceTable;
use crate::params::FrictionParams;
use crate::types::{FrictionWrench, VelocityTwist};

/// Bristle deflection `(z_x, z_y, z_tau)`; `z_tau` carries the `S` scaling and has length units.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReducedBristleState {
    pub z: [f64; 3],
}

impl ReducedBristleState {
    pub fn new(z: [f64; 3]) -> Self {
        Self { z }
    }

    pub fn is_finite(&self) -> bool {
        self.z.iter().all(|v| v.is_finite())
    }
}

/// `S = diag(1, 1, r)` and `U = diag(1, 1, u)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingMatrices {
    pub r: f64,
    pub u: f64,
}

impl ScalingMatrices {
    pub fn new(r: f64, u: f64) -> Self {
        Self { r, u }
    }

    #[inline(always)]
    pub fn s(&self, a: [f64; 3]) -> [f64; 3] {
        [a[0], a[1], self.r * a[2]]
    }

    #[inline(always)]
    pub fn s_inv(&self, a: [f64; 3]) -> [f64; 3] {
        [a[0], a[1], a[2] / self.r]
    }

    #[inline(always)]
    pub fn u(&self, a: [f64; 3]) -> [f64; 3] {
        [a[0], a[1], self.u * a[2]]
    }

    /// `v_S = S v`.
    #[inline(always)]
    pub fn scaled_twist(&self, twist: &VelocityTwist) -> [f64; 3] {
        self.s(twist.to_array())
    }
}

#[inline(always)]
fn norm3(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

/// Ellipsoid limit-surface wrench `-mu_C f_N S v_S / |v_S|`.
pub fn ellipsoid_wrench(twist: &VelocityTwist, r: f64, mu_c: f64, f_n: f64) -> FrictionWrench {
    let s = ScalingMatrices::new(r, 0.0);
    let vs = s.scaled_twist(twist);
    let n = norm3(vs);
    if n == 0.0 {
        return FrictionWrench::ZERO;
    }
    let d = s.s(vs);
    let k = -mu_c * f_n / n;
    FrictionWrench::new(k * d[0], k * d[1], k * d[2])
}

/// Normalized ellipsoid direction `-v_S / |v_S|`, the ellipsoid counterpart of a table lookup.
#[inline]
pub fn ellipsoid_direction(twist: &VelocityTwist, s: &ScalingMatrices) -> [f64; 3] {
    let vs = s.scaled_twist(twist);
    let n = norm3(vs);
    if n == 0.0 {
        return [0.0; 3];
    }
    [-vs[0] / n, -vs[1] / n, -vs[2] / n]
}

/// LuGre rate along a normalized direction `h`: `dz = -S h |v_S| - z sigma0 |v_S| / g(|v_S|)`.
#[inline]
pub fn rate_along(z: &ReducedBristleState, h: [f64; 3], vs_norm: f64, s: &ScalingMatrices, p: &FrictionParams) -> [f64; 3] {
    if vs_norm == 0.0 {
        return [0.0; 3];
    }
    let sh = s.s(h);
    let k = p.sigma0 * vs_norm / p.g(vs_norm);
    [
        -sh[0] * vs_norm - z.z[0] * k,
        -sh[1] * vs_norm - z.z[1] * k,
        -sh[2] * vs_norm - z.z[2] * k,
    ]
}

/// Elasto-Plastic rate along `h`: `dz = -[S h + z beta(S^-1 z, -h |v_S|) sigma0 / g] |v_S|`.
#[inline]
pub fn rate_along_elastoplastic(
    z: &ReducedBristleState,
    h: [f64; 3],
    vs_norm: f64,
    s: &ScalingMatrices,
    p: &FrictionParams,
) -> [f64; 3] {
    if vs_norm == 0.0 {
        return [0.0; 3];
    }
    let g = p.g(vs_norm);
    let zs = s.s_inv(z.z);
    let dir = [-h[0] * vs_norm, -h[1] * vs_norm, -h[2] * vs_norm];
    let beta = elasto_plastic_beta(&zs, &dir, g / p.sigma0, p.s_ba);
    let sh = s.s(h);
    let k = beta * p.sigma0 / g;
    [
        -(sh[0] + z.z[0] * k) * vs_norm,
        -(sh[1] + z.z[1] * k) * vs_norm,
        -(sh[2] + z.z[2] * k) * vs_norm,
    ]
}

/// Rate with either law, selected by `p.elasto_plastic`.
#[inline]
pub fn rate_for(z: &ReducedBristleState, h: [f64; 3], vs_norm: f64, s: &ScalingMatrices, p: &FrictionParams) -> [f64; 3] {
    if p.elasto_plastic {
        rate_along_elastoplastic(z, h, vs_norm, s, p)
    } else {
        rate_along(z, h, vs_norm, s, p)
    }
}

/// Ellipsoid-approximation rate `dz = S v_S - z sigma0 |v_S| / g(|v_S|)`.
pub fn reduced_rate_ellipsoid(
    z: &ReducedBristleState,
    twist: &VelocityTwist,
    s: &ScalingMatrices,
    p: &FrictionParams,
) -> [f64; 3] {
    let vs_norm = norm3(s.scaled_twist(twist));
    rate_for(z, ellipsoid_direction(twist, s), vs_norm, s, p)
}

/// Limit-surface corrected LuGre rate with `h = lookup(table, r, twist)`.
pub fn reduced_rate_ls(
    z: &ReducedBristleState,
    twist: &VelocityTwist,
    s: &ScalingMatrices,
    table: &LimitSurfaceTable,
    p: &FrictionParams,
) -> [f64; 3] {
    let vs_norm = norm3(s.scaled_twist(twist));
    rate_along(z, table.lookup(s.r, twist), vs_norm, s, p)
}

/// Limit-surface corrected Elasto-Plastic rate.
pub fn reduced_rate_ls_elastoplastic(
    z: &ReducedBristleState,
    twist: &VelocityTwist,
    s: &ScalingMatrices,
    table: &LimitSurfaceTable,
    p: &FrictionParams,
) -> [f64; 3] {
    let vs_norm = norm3(s.scaled_twist(twist));
    rate_along_elastoplastic(z, table.lookup(s.r, twist), vs_norm, s, p)
}

/// Wrench `-(sigma0 z + sigma1 dz + sigma2 U v) f_N`.
#[inline]
pub fn reduced_wrench(
    z: &ReducedBristleState,
    rate: [f64; 3],
    twist: &VelocityTwist,
    s: &ScalingMatrices,
    p: &FrictionParams,
    f_n: f64,
) -> FrictionWrench {
    let uv = s.u(twist.to_array());
    let c = |k: usize| -(p.sigma0 * z.z[k] + p.sigma1 * rate[k] + p.sigma2 * uv[k]) * f_n;
    FrictionWrench::new(c(0), c(1), c(2))
}

/// Steady-state deflection `-S h g(|v_S|) / sigma0` for direction `h`.
pub fn steady_state(h: [f64; 3], twist: &VelocityTwist, s: &ScalingMatrices, p: &FrictionParams) -> ReducedBristleState {
    let vs_norm = norm3(s.scaled_twist(twist));
    let k = -p.g(vs_norm) / p.sigma0;
    let sh = s.s(h);
    ReducedBristleState::new([sh[0] * k, sh[1] * k, sh[2] * k])
}
