//! Pre-computed normalized limit surface `h(r, v)`.
//!
//! Twists are sampled on the upper half of a sphere,
//! `(r' cos(theta) sin(phi), r' sin(theta) sin(phi), cos(phi))`, with
//! `theta` in `[0, 2 pi)` and `phi` in `[0, pi/2]`, so `phi = 0` is a pure
//! rotation and `phi = pi/2` a pure translation. Each of the `4 n_ls x n_ls`
//! cells stores its four corner wrenches, normalized per component.

mod skew;

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::distributed::steady_state_bilinear;
use crate::error::{ensure, FrictionError, Result};
use crate::geometry::PressureGrid;
use crate::params::FrictionParams;
use crate::types::VelocityTwist;

pub use skew::{
    check_positive_definite, find_zero_tangential_cor, find_zero_tangential_cor_table,
    find_zero_tangential_cor_with, scaling_factor, skew_variables, EigenCheck, SkewParams, SKEW_MAX_ITER, SKEW_TOL,
};

const MAGIC: &[u8; 4] = b"PFLS";
const CACHE_VERSION: u32 = 1;

/// Snap distance (in cell units) used to land queries made exactly at a corner on that corner.
const INDEX_SNAP: f64 = 1e-9;

/// Normalized limit surface sampled on a spherical grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitSurfaceTable {
    n_ls: usize,
    r_prime: f64,
    max_f: [f64; 3],
    corners: Vec<[[f64; 3]; 4]>,
}

/// Sample twist at spherical angles `(theta, phi)` for a surface of radius `r_prime`.
pub fn sample_twist(theta: f64, phi: f64, r_prime: f64) -> VelocityTwist {
    let (st, ct) = theta.sin_cos();
    VelocityTwist::new(r_prime * ct * phi.sin(), r_prime * st * phi.sin(), phi.cos())
}

/// Cell index and residuals `(i_c, i_theta, i_phi, d_theta, d_phi)` for angles in range.
pub fn cell_index(theta: f64, phi: f64, n_ls: usize) -> (usize, usize, usize, f64, f64) {
    let scale = 2.0 * n_ls as f64 / PI;
    let snap = |x: f64| {
        let r = x.round();
        if (x - r).abs() < INDEX_SNAP { r } else { x }
    };
    let x = snap(theta * scale).rem_euclid(4.0 * n_ls as f64);
    let y = snap(phi * scale).clamp(0.0, n_ls as f64);
    let i_theta = (x.floor() as usize).min(4 * n_ls - 1);
    let i_phi = (y.floor() as usize).min(n_ls - 1);
    let d_theta = (x - i_theta as f64).clamp(0.0, 1.0);
    let d_phi = (y - i_phi as f64).clamp(0.0, 1.0);
    (n_ls * i_theta + i_phi, i_theta, i_phi, d_theta, d_phi)
}

/// Spherical angles `(theta, phi)` of `twist` on a surface of radius `r`, after
/// folding `omega < 0` onto the upper hemisphere.
pub fn twist_angles(twist: &VelocityTwist, r: f64) -> (f64, f64) {
    let mut theta = twist.v_y.atan2(twist.v_x);
    if twist.omega < 0.0 {
        theta += PI;
    }
    let theta = theta.rem_euclid(TAU);
    let phi = twist.tangential_speed().atan2(r * twist.omega.abs());
    (theta, phi)
}

impl LimitSurfaceTable {
    /// Samples the Coulomb (`p = 0`) steady-state wrench of `grid` on the sphere.
    pub fn precompute(grid: &PressureGrid, n_ls: usize) -> Result<Self> {
        ensure(n_ls >= 2, || format!("n_ls must be >= 2, got {n_ls}"))?;
        let r_prime = grid.r();
        if !(r_prime > 0.0) {
            return Err(FrictionError::InvalidParameter(
                "limit surface needs a contact with non-zero equivalent radius".into(),
            ));
        }
        let params = FrictionParams::preset_p0();
        let n_theta = 4 * n_ls;
        let n_phi = n_ls + 1;
        let step = FRAC_PI_2 / n_ls as f64;

        let samples: Vec<[f64; 3]> = (0..n_theta * n_phi)
            .into_par_iter()
            .map(|k| {
                let (it, ip) = (k / n_phi, k % n_phi);
                let mut tw = sample_twist(it as f64 * step, ip as f64 * step, r_prime);
                if ip == n_ls {
                    tw.omega = 0.0;
                }
                steady_state_bilinear(&tw, grid, &params).to_array()
            })
            .collect();

        let mut max_f = [0.0f64; 3];
        for s in &samples {
            for k in 0..3 {
                max_f[k] = max_f[k].max(s[k].abs());
            }
        }
        let norm = |s: [f64; 3]| {
            let mut h = [0.0; 3];
            for k in 0..3 {
                if max_f[k] > 0.0 {
                    h[k] = (s[k] / max_f[k]).clamp(-1.0, 1.0);
                }
            }
            h
        };
        let at = |it: usize, ip: usize| norm(samples[(it % n_theta) * n_phi + ip]);
        let mut corners = Vec::with_capacity(n_theta * n_ls);
        for it in 0..n_theta {
            for ip in 0..n_ls {
                corners.push([at(it, ip), at(it + 1, ip), at(it, ip + 1), at(it + 1, ip + 1)]);
            }
        }
        Ok(Self { n_ls, r_prime, max_f, corners })
    }

    pub fn n_ls(&self) -> usize {
        self.n_ls
    }

    /// Equivalent radius of the surface the table was computed for.
    pub fn r_prime(&self) -> f64 {
        self.r_prime
    }

    /// Per-component normalization constants `(max|f_x|, max|f_y|, max|tau|)`.
    pub fn max_f(&self) -> [f64; 3] {
        self.max_f
    }

    pub fn cell_count(&self) -> usize {
        self.corners.len()
    }

    /// Corner wrenches `f_c1..f_c4` of cell `i_c`.
    pub fn cell(&self, i_c: usize) -> &[[f64; 3]; 4] {
        &self.corners[i_c]
    }

    /// Normalized wrench for `twist` on a surface of equivalent radius `r`.
    ///
    /// A zero twist maps to a zero wrench.
    #[inline]
    pub fn lookup(&self, r: f64, twist: &VelocityTwist) -> [f64; 3] {
        if twist.is_zero() {
            return [0.0; 3];
        }
        let (theta, phi) = twist_angles(twist, r);
        let (i_c, _, _, dt, dp) = cell_index(theta, phi, self.n_ls);
        let c = &self.corners[i_c];
        let w = [(1.0 - dt) * (1.0 - dp), dt * (1.0 - dp), (1.0 - dt) * dp, dt * dp];
        let sign = if twist.omega >= 0.0 { 1.0 } else { -1.0 };
        let mut h = [0.0; 3];
        for k in 0..3 {
            h[k] = sign * (w[0] * c[0][k] + w[1] * c[1][k] + w[2] * c[2][k] + w[3] * c[3][k]);
        }
        h
    }

    pub fn write_cache<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(MAGIC)?;
        out.write_all(&CACHE_VERSION.to_le_bytes())?;
        out.write_all(&(self.n_ls as u32).to_le_bytes())?;
        out.write_all(&self.r_prime.to_le_bytes())?;
        for m in self.max_f {
            out.write_all(&m.to_le_bytes())?;
        }
        let mut buf = Vec::with_capacity(self.corners.len() * 96);
        for cell in &self.corners {
            for corner in cell {
                for v in corner {
                    buf.extend_from_slice(&v.to_le_bytes());
                }
            }
        }
        out.write_all(&buf)?;
        out.flush()?;
        Ok(())
    }

    pub fn read_cache<R: Read>(mut input: R) -> Result<Self> {
        let mut bytes = Vec::new();
        input.read_to_end(&mut bytes)?;
        let bad = |m: &str| FrictionError::Cache(m.to_string());
        if bytes.len() < 44 || &bytes[..4] != MAGIC {
            return Err(bad("not a limit surface cache (bad magic)"));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let version = u32_at(4);
        if version != CACHE_VERSION {
            return Err(FrictionError::Cache(format!(
                "unsupported cache version {version} (expected {CACHE_VERSION})"
            )));
        }
        let n_ls = u32_at(8) as usize;
        if n_ls < 2 {
            return Err(bad("n_ls in cache header must be >= 2"));
        }
        let r_prime = f64_at(12);
        let max_f = [f64_at(20), f64_at(28), f64_at(36)];
        let cells = 4 * n_ls * n_ls;
        let expected = 44 + cells * 96;
        if bytes.len() != expected {
            return Err(FrictionError::Cache(format!(
                "cache length {} does not match header (expected {expected})",
                bytes.len()
            )));
        }
        let mut corners = Vec::with_capacity(cells);
        let mut o = 44;
        for _ in 0..cells {
            let mut cell = [[0.0; 3]; 4];
            for corner in &mut cell {
                for v in corner.iter_mut() {
                    *v = f64_at(o);
                    o += 8;
                }
            }
            corners.push(cell);
        }
        let table = Self { n_ls, r_prime, max_f, corners };
        table.validate()?;
        Ok(table)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_cache(std::io::BufWriter::new(f))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_cache(std::fs::File::open(path)?)
    }

    fn validate(&self) -> Result<()> {
        if !(self.r_prime > 0.0 && self.r_prime.is_finite()) {
            return Err(FrictionError::Cache(format!("invalid r_prime {}", self.r_prime)));
        }
        let ok = self
            .corners
            .iter()
            .flatten()
            .flatten()
            .all(|v| v.is_finite() && v.abs() <= 1.0);
        if !ok {
            return Err(FrictionError::Cache("corner values outside [-1, 1]".into()));
        }
        Ok(())
    }

    /// Writes `i_theta,i_phi,corner,hx,hy,htau` rows in `i_c` order (corners numbered 1..4).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["i_theta", "i_phi", "corner", "hx", "hy", "htau"])?;
        for (i_c, cell) in self.corners.iter().enumerate() {
            let (it, ip) = (i_c / self.n_ls, i_c % self.n_ls);
            for (k, c) in cell.iter().enumerate() {
                w.write_record([
                    it.to_string(),
                    ip.to_string(),
                    (k + 1).to_string(),
                    format!("{:.17e}", c[0]),
                    format!("{:.17e}", c[1]),
                    format!("{:.17e}", c[2]),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
