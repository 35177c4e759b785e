//! Per-cell planar LuGre / Elasto-Plastic bristles summed into a CoP wrench.

use std::f64::consts::PI;
use std::io::Write;

use crate::error::{ensure, Result};
use crate::geometry::PressureGrid;
use crate::params::FrictionParams;
use crate::types::{FrictionWrench, VelocityTwist, WrenchSum};

/// Rotation rates at or below this are treated as pure translation.
pub const OMEGA_EPS: f64 = 1e-12;

/// Tangential bristle deflection of every cell, row-major like the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BristleField {
    z: Vec<[f64; 2]>,
}

impl BristleField {
    pub fn zeros(grid: &PressureGrid) -> Self {
        Self { z: vec![[0.0; 2]; grid.n() * grid.n()] }
    }

    pub fn from_vec(z: Vec<[f64; 2]>) -> Self {
        Self { z }
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn as_slice(&self) -> &[[f64; 2]] {
        &self.z
    }

    pub fn as_mut_slice(&mut self) -> &mut [[f64; 2]] {
        &mut self.z
    }

    pub fn is_finite(&self) -> bool {
        self.z.iter().all(|c| c[0].is_finite() && c[1].is_finite())
    }

    /// Steady-state deflection `g(|v_t|) v_t / (sigma0 |v_t|)` under a constant twist.
    pub fn steady_state(twist: &VelocityTwist, grid: &PressureGrid, params: &FrictionParams) -> Self {
        let z = grid
            .centers()
            .iter()
            .map(|c| steady_deflection(cell_velocity(twist, *c), params))
            .collect();
        Self { z }
    }

    /// Writes `x,y,z_x,z_y` rows (CoP-relative cell centres).
    pub fn write_csv<W: Write>(&self, grid: &PressureGrid, out: W) -> Result<()> {
        ensure(self.z.len() == grid.centers().len(), || "field does not match grid".into())?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "y", "z_x", "z_y"])?;
        for (c, z) in grid.centers().iter().zip(&self.z) {
            w.write_record([c[0], c[1], z[0], z[1]].map(|v| format!("{v:.17e}")))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Rigid-motion velocity `(v_x - omega y, v_y + omega x)` of the point `c`.
#[inline(always)]
pub fn cell_velocity(twist: &VelocityTwist, c: [f64; 2]) -> [f64; 2] {
    [twist.v_x - twist.omega * c[1], twist.v_y + twist.omega * c[0]]
}

#[inline(always)]
fn steady_deflection(v: [f64; 2], params: &FrictionParams) -> [f64; 2] {
    let speed = (v[0] * v[0] + v[1] * v[1]).sqrt();
    if speed == 0.0 {
        return [0.0; 2];
    }
    let s = params.g(speed) / (params.sigma0 * speed);
    [v[0] * s, v[1] * s]
}

/// Smooth elastic-to-plastic transition on `[z_ba, z_max]`.
#[inline(always)]
fn beta_bar(z_norm: f64, z_max: f64, z_ba: f64) -> f64 {
    if z_norm <= z_ba {
        0.0
    } else if z_norm >= z_max {
        1.0
    } else {
        0.5 * (PI * (z_norm - 0.5 * (z_max + z_ba)) / (z_max - z_ba)).sin() + 0.5
    }
}

/// Elasto-Plastic factor `beta = eps * beta_bar(|z|)` with `eps = (v^T z / (|v||z|) + 1) / 2`.
///
/// Works for 2- and 3-vectors. The alignment term is only evaluated once
/// `|z| > z_ba`, so `z = 0` never reaches the normalization.
pub fn elasto_plastic_beta<const D: usize>(z: &[f64; D], v: &[f64; D], z_max: f64, s_ba: f64) -> f64 {
    let z_norm = z.iter().map(|a| a * a).sum::<f64>().sqrt();
    let bar = beta_bar(z_norm, z_max, s_ba * z_max);
    if bar == 0.0 {
        return 0.0;
    }
    let v_norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if v_norm == 0.0 {
        return 0.0;
    }
    let dot: f64 = z.iter().zip(v).map(|(a, b)| a * b).sum();
    let eps = 0.5 * (dot / (v_norm * z_norm) + 1.0);
    eps.clamp(0.0, 1.0) * bar
}

/// Bristle rate of one cell with local velocity `v`.
#[inline(always)]
pub(crate) fn cell_rate(z: [f64; 2], v: [f64; 2], params: &FrictionParams) -> [f64; 2] {
    let speed = (v[0] * v[0] + v[1] * v[1]).sqrt();
    if speed == 0.0 {
        return v;
    }
    let g = params.g(speed);
    let mut k = params.sigma0 * speed / g;
    if params.elasto_plastic {
        let z_norm = (z[0] * z[0] + z[1] * z[1]).sqrt();
        let z_max = g / params.sigma0;
        let bar = beta_bar(z_norm, z_max, params.s_ba * z_max);
        if bar == 0.0 {
            return v;
        }
        let eps = 0.5 * ((z[0] * v[0] + z[1] * v[1]) / (speed * z_norm) + 1.0);
        k *= eps.clamp(0.0, 1.0) * bar;
    }
    [v[0] - z[0] * k, v[1] - z[1] * k]
}

/// Field rate `dz/dt` for every cell under `twist`.
pub fn bristle_rate(
    twist: &VelocityTwist,
    field: &BristleField,
    grid: &PressureGrid,
    params: &FrictionParams,
) -> BristleField {
    let mut out = vec![[0.0; 2]; field.len()];
    for (idx, (z, c)) in field.z.iter().zip(grid.centers()).enumerate() {
        out[idx] = cell_rate(*z, cell_velocity(twist, *c), params);
    }
    BristleField { z: out }
}

/// Wrench from a field and its rate: `f = -sum (sigma0 z + sigma1 dz + sigma2 v) p_n f_N A`.
pub fn wrench(
    twist: &VelocityTwist,
    field: &BristleField,
    rate: &BristleField,
    grid: &PressureGrid,
    params: &FrictionParams,
) -> FrictionWrench {
    let mut acc = WrenchSum::default();
    for cell in grid.active_cells() {
        let z = field.z[cell.index];
        let dz = rate.z[cell.index];
        let v = cell_velocity(twist, [cell.x, cell.y]);
        acc.add(cell_force(cell.x, cell.y, cell.weight, z, dz, v, params));
    }
    total(acc, grid.f_n())
}

/// Writes the field rate into `rate` and returns the wrench in one pass over the cells.
pub fn rate_and_wrench(
    twist: &VelocityTwist,
    field: &[[f64; 2]],
    rate: &mut [[f64; 2]],
    grid: &PressureGrid,
    params: &FrictionParams,
) -> FrictionWrench {
    let mut acc = WrenchSum::default();
    for cell in grid.active_cells() {
        let v = cell_velocity(twist, [cell.x, cell.y]);
        let z = field[cell.index];
        let dz = cell_rate(z, v, params);
        rate[cell.index] = dz;
        acc.add(cell_force(cell.x, cell.y, cell.weight, z, dz, v, params));
    }
    total(acc, grid.f_n())
}

#[inline(always)]
fn cell_force(
    x: f64,
    y: f64,
    weight: f64,
    z: [f64; 2],
    dz: [f64; 2],
    v: [f64; 2],
    p: &FrictionParams,
) -> [f64; 3] {
    let fx = (p.sigma0 * z[0] + p.sigma1 * dz[0] + p.sigma2 * v[0]) * weight;
    let fy = (p.sigma0 * z[1] + p.sigma1 * dz[1] + p.sigma2 * v[1]) * weight;
    [fx, fy, x * fy - y * fx]
}

#[inline(always)]
fn total(acc: WrenchSum, f_n: f64) -> FrictionWrench {
    let s = acc.total();
    FrictionWrench::new(-s[0] * f_n, -s[1] * f_n, -s[2] * f_n)
}

/// Steady-state wrench, evaluating every cell at its own steady deflection.
pub fn steady_state_wrench(twist: &VelocityTwist, grid: &PressureGrid, params: &FrictionParams) -> FrictionWrench {
    let mut acc = WrenchSum::default();
    for cell in grid.active_cells() {
        let v = cell_velocity(twist, [cell.x, cell.y]);
        let z = steady_deflection(v, params);
        acc.add(cell_force(cell.x, cell.y, cell.weight, z, [0.0; 2], v, params));
    }
    total(acc, grid.f_n())
}

/// Bilinear weights and corner twists used by [`steady_state_bilinear`], or `None`
/// when the plain evaluation applies.
pub fn bilinear_corners(twist: &VelocityTwist, grid: &PressureGrid) -> Option<[(f64, VelocityTwist); 4]> {
    let cor = twist.center_of_rotation(OMEGA_EPS)?;
    if !(cor[0].is_finite() && cor[1].is_finite()) {
        return None;
    }
    let h = grid.cell_size();
    let n = grid.n();
    let o = grid.lattice_origin();
    let u = (cor[0] - o[0]) / h;
    let w = (cor[1] - o[1]) / h;
    if !(0.0..=n as f64).contains(&u) || !(0.0..=n as f64).contains(&w) {
        return None;
    }
    let i = (u.floor() as usize).min(n - 1);
    let j = (w.floor() as usize).min(n - 1);
    let (dx, dy) = (u - i as f64, w - j as f64);
    let corner = |ci: usize, cj: usize| {
        VelocityTwist::rotation_about([o[0] + ci as f64 * h, o[1] + cj as f64 * h], twist.omega)
    };
    Some([
        ((1.0 - dx) * (1.0 - dy), corner(i, j)),
        ((1.0 - dx) * dy, corner(i, j + 1)),
        (dx * (1.0 - dy), corner(i + 1, j)),
        (dx * dy, corner(i + 1, j + 1)),
    ])
}

/// Steady-state wrench with the CoR bilinearly interpolated between the corners
/// of the grid cell containing it.
///
/// Falls back to [`steady_state_wrench`] for (near) pure translation and for a
/// CoR outside the grid.
pub fn steady_state_bilinear(twist: &VelocityTwist, grid: &PressureGrid, params: &FrictionParams) -> FrictionWrench {
    match bilinear_corners(twist, grid) {
        None => steady_state_wrench(twist, grid, params),
        Some(corners) => {
            let mut out = FrictionWrench::ZERO;
            for (w, tw) in corners {
                if w != 0.0 {
                    out += steady_state_wrench(&tw, grid, params) * w;
                }
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{discretize, SurfaceSpec};

    #[test]
    fn cell_velocity_examples() {
        assert_eq!(cell_velocity(&VelocityTwist::new(1.0, 0.0, 0.0), [0.3, -0.2]), [1.0, 0.0]);
        assert_eq!(cell_velocity(&VelocityTwist::new(0.0, 0.0, 1.0), [0.01, 0.0]), [0.0, 0.01]);
        let v = cell_velocity(&VelocityTwist::new(1.0, 0.0, 2.0), [0.005, 0.005]);
        assert!((v[0] - 0.99).abs() < 1e-15 && (v[1] - 0.01).abs() < 1e-15);
    }

    #[test]
    fn beta_examples() {
        let (z_max, s_ba) = (1e-6, 0.9);
        let z_ba = s_ba * z_max;
        assert_eq!(elasto_plastic_beta(&[0.5 * z_ba, 0.0], &[0.0, 1.0], z_max, s_ba), 0.0);
        assert_eq!(elasto_plastic_beta(&[z_max, 0.0], &[2.0, 0.0], z_max, s_ba), 1.0);
        let mid = 0.5 * (z_ba + z_max);
        let b = elasto_plastic_beta(&[0.0, mid, 0.0], &[0.0, 1.0, 0.0], z_max, s_ba);
        assert!((b - 0.5).abs() < 1e-12);
        assert_eq!(elasto_plastic_beta(&[z_max, 0.0], &[-1.0, 0.0], z_max, s_ba), 0.0);
        assert_eq!(elasto_plastic_beta(&[0.0, 0.0], &[1.0, 0.0], z_max, s_ba), 0.0);
    }

    #[test]
    fn rate_vanishes_at_rest_and_at_steady_state() {
        let grid = discretize(&SurfaceSpec::circle(0.01), 11, 1.0).unwrap();
        let p = FrictionParams::preset_p1();
        let field = BristleField::steady_state(&VelocityTwist::new(0.01, 0.0, 1.0), &grid, &p);
        let r = bristle_rate(&VelocityTwist::ZERO, &field, &grid, &p);
        assert!(r.as_slice().iter().all(|c| c == &[0.0, 0.0]));

        let tw = VelocityTwist::new(3e-3, -1e-3, 0.4);
        let ss = BristleField::steady_state(&tw, &grid, &p);
        let r = bristle_rate(&tw, &ss, &grid, &p);
        let max = r.as_slice().iter().map(|c| c[0].abs().max(c[1].abs())).fold(0.0, f64::max);
        assert!(max < 1e-15, "{max}");
    }

    #[test]
    fn elasto_plastic_is_elastic_below_breakaway() {
        let p = FrictionParams::preset_p1().with_elasto_plastic(true);
        let v: [f64; 2] = [2e-3, -1e-3];
        let z_ba = p.s_ba * p.z_max(v[0].hypot(v[1]));
        let z = [0.7 * z_ba, 0.0];
        assert_eq!(cell_rate(z, v, &p), v);
    }

    #[test]
    fn coulomb_limits_on_circle() {
        let p = FrictionParams::preset_p0();
        let grid = discretize(&SurfaceSpec::circle(0.01), 41, 2.0).unwrap();
        let f = steady_state_wrench(&VelocityTwist::new(1.0, 0.0, 0.0), &grid, &p);
        assert!((f.f_x + 2.0).abs() < 1e-12 && f.f_y.abs() < 1e-12 && f.tau.abs() < 1e-12);
        let f = steady_state_wrench(&VelocityTwist::new(0.0, 0.0, 1.0), &grid, &p);
        assert!(f.tangential_norm() < 1e-12);
        assert!((f.tau + 2.0 * grid.r()).abs() < 1e-12);
    }

    #[test]
    fn zero_field_gives_zero_wrench() {
        let grid = discretize(&SurfaceSpec::square(0.01), 7, 1.0).unwrap();
        let p = FrictionParams::preset_p0();
        let z = BristleField::zeros(&grid);
        let f = wrench(&VelocityTwist::new(1.0, 2.0, 3.0), &z, &z, &grid, &p);
        assert_eq!(f, FrictionWrench::ZERO);
    }

    #[test]
    fn bilinear_identity_at_corner_and_average_at_center() {
        let p = FrictionParams::preset_p0();
        let grid = discretize(&SurfaceSpec::square(0.01), 10, 1.0).unwrap();
        let h = grid.cell_size();
        let o = grid.lattice_origin();
        let omega = 1.3;

        let corner = [o[0] + 3.0 * h, o[1] + 6.0 * h];
        let tw = VelocityTwist::rotation_about(corner, omega);
        let a = steady_state_bilinear(&tw, &grid, &p);
        let b = steady_state_wrench(&tw, &grid, &p);
        assert!((a - b).to_array().iter().all(|d| d.abs() < 1e-12));

        let center = [o[0] + 3.5 * h, o[1] + 6.5 * h];
        let tw = VelocityTwist::rotation_about(center, omega);
        let a = steady_state_bilinear(&tw, &grid, &p);
        let mut avg = FrictionWrench::ZERO;
        for (di, dj) in [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)] {
            let c = [o[0] + (3.0 + di) * h, o[1] + (6.0 + dj) * h];
            avg += steady_state_wrench(&VelocityTwist::rotation_about(c, omega), &grid, &p) * 0.25;
        }
        assert!((a - avg).to_array().iter().all(|d| d.abs() < 1e-12));
    }

    #[test]
    fn bilinear_falls_back_outside_grid() {
        let p = FrictionParams::preset_p0();
        let grid = discretize(&SurfaceSpec::circle(0.01), 11, 1.0).unwrap();
        let tw = VelocityTwist::rotation_about([0.5, 0.0], 1.0);
        assert!(bilinear_corners(&tw, &grid).is_none());
        assert_eq!(steady_state_bilinear(&tw, &grid, &p), steady_state_wrench(&tw, &grid, &p));
        let tw = VelocityTwist::new(1.0, 0.0, 0.0);
        assert_eq!(steady_state_bilinear(&tw, &grid, &p), steady_state_wrench(&tw, &grid, &p));
    }

    #[test]
    fn field_csv_snapshot() {
        let grid = discretize(&SurfaceSpec::circle(0.01), 3, 1.0).unwrap();
        let field = BristleField::zeros(&grid);
        let mut buf = Vec::new();
        field.write_csv(&grid, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x,y,z_x,z_y\n"));
        assert_eq!(text.lines().count(), 10);
    }
}
