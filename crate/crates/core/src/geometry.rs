//! Contact pressure distributions and their discretization.
//!
//! A [`SurfaceSpec`] describes the pressure field `p(x, y)` of a contact patch
//! in its native frame (origin at the centre of the bounding square). The
//! field is sampled at the centres of an `n x n` grid of square cells,
//! renormalized so that `sum(p_n * A) = 1`, and re-centred on the centre of
//! pressure (CoP). All downstream force and torque sums use the CoP-relative
//! cell positions stored in the resulting [`PressureGrid`].

use std::f64::consts::PI;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, FrictionError, Result};

/// Hertzian radius coefficient corresponding to `a = 6 f_N^(1/3)` with `a` in
/// millimetres, expressed in m N^(-1/3).
pub const HERTZ_COEFF_MM: f64 = 6e-3;

/// Peak-pressure factor of the Hertz-like contact profile.
pub const HERTZ_PEAK_FACTOR: f64 = 1.144;

/// Side length of the bundled non-convex masks (m).
pub const NONCONVEX_DEFAULT_SIZE: f64 = 0.02;

const NONCONVEX_MASKS: &str = include_str!("../data/nonconvex_masks.txt");

/// How the Hertzian exponent `k` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum HertzExponent {
    /// Fixed exponent; the field only scales with the normal force.
    Constant { k: f64 },
    /// `k = c * f_N`; the shape of the field changes with the normal force.
    ForceProportional { c: f64 },
}

impl HertzExponent {
    pub fn exponent(&self, f_n: f64) -> f64 {
        match *self {
            HertzExponent::Constant { k } => k,
            HertzExponent::ForceProportional { c } => c * f_n,
        }
    }
}

/// Scattered pressure samples, e.g. read from a CSV mask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PressureSamples {
    /// `(x, y, p)` triples in metres and arbitrary pressure units.
    pub points: Vec<[f64; 3]>,
}

impl PressureSamples {
    /// Reads `x,y,p` rows; the header line is required.
    pub fn from_csv_reader<R: Read>(rdr: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            x: f64,
            y: f64,
            p: f64,
        }
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(rdr);
        let headers = reader.headers()?.clone();
        for col in ["x", "y", "p"] {
            ensure(headers.iter().any(|h| h == col), || {
                format!("pressure CSV is missing the `{col}` column (header: {headers:?})")
            })?;
        }
        let mut points = Vec::new();
        for row in reader.deserialize() {
            let row: Row = row?;
            ensure(row.p >= 0.0 && row.p.is_finite(), || {
                format!("negative or non-finite pressure {} at ({}, {})", row.p, row.x, row.y)
            })?;
            points.push([row.x, row.y, row.p]);
        }
        ensure(!points.is_empty(), || "pressure CSV has no rows".to_string())?;
        Ok(Self { points })
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::from_csv_reader(std::io::BufReader::new(f))
    }

    /// Smallest non-zero spacing between distinct sample coordinates.
    fn spacing(&self) -> f64 {
        let min_gap = |axis: usize| {
            let mut v: Vec<f64> = self.points.iter().map(|p| p[axis]).collect();
            v.sort_by(f64::total_cmp);
            v.windows(2)
                .map(|w| w[1] - w[0])
                .filter(|d| *d > 1e-12)
                .fold(f64::INFINITY, f64::min)
        };
        let s = min_gap(0).min(min_gap(1));
        if s.is_finite() { s } else { 0.0 }
    }

    fn bounds(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &self.points {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    fn center(&self) -> [f64; 2] {
        let (lo, hi) = self.bounds();
        [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0]
    }

    fn extent(&self) -> f64 {
        let (lo, hi) = self.bounds();
        (hi[0] - lo[0]).max(hi[1] - lo[1]) + self.spacing()
    }

    /// Nearest-sample pressure; zero further than half a sample spacing (per axis) away.
    fn pressure_at(&self, x: f64, y: f64) -> f64 {
        let c = self.center();
        let (x, y) = (x + c[0], y + c[1]);
        let half = 0.5 * self.spacing().max(1e-15) * (1.0 + 1e-9);
        let mut best = (f64::INFINITY, 0.0);
        for p in &self.points {
            let (dx, dy) = (p[0] - x, p[1] - y);
            if dx.abs() > half || dy.abs() > half {
                continue;
            }
            let d2 = dx * dx + dy * dy;
            if d2 < best.0 {
                best = (d2, p[2]);
            }
        }
        best.1
    }
}

/// Contact pressure shape. Lengths are in metres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// Uniform disc.
    Circle { radius: f64 },
    /// Uniform square.
    Square { side: f64 },
    /// Uniform line along x.
    Line { length: f64 },
    /// Line along x with pressure rising linearly from zero at the left end.
    GradientLine { length: f64 },
    /// Bundled U-shaped mask with a left-to-right pressure gradient.
    NonConvex1 {
        #[serde(default = "default_nonconvex_size")]
        size: f64,
    },
    /// Bundled open-ring mask with uneven pressure.
    NonConvex2 {
        #[serde(default = "default_nonconvex_size")]
        size: f64,
    },
    /// Hertz-like profile `1.144 f_N/(pi a^2) [1 - (rho/a)^k]^(1/k)` with `a = coeff * f_N^(1/3)`.
    Hertzian { exponent: HertzExponent, radius_coeff: f64 },
    /// Sampled pressure function.
    Custom(PressureSamples),
}

fn default_nonconvex_size() -> f64 {
    NONCONVEX_DEFAULT_SIZE
}

/// A contact pressure distribution in its native frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub shape: Shape,
    /// In-plane rotation of the pressure field about the bounding-box centre (rad).
    #[serde(default)]
    pub rotation: f64,
}

impl From<Shape> for SurfaceSpec {
    fn from(shape: Shape) -> Self {
        Self { shape, rotation: 0.0 }
    }
}

impl SurfaceSpec {
    pub fn circle(radius: f64) -> Self {
        Shape::Circle { radius }.into()
    }

    pub fn square(side: f64) -> Self {
        Shape::Square { side }.into()
    }

    pub fn line(length: f64) -> Self {
        Shape::Line { length }.into()
    }

    pub fn gradient_line(length: f64) -> Self {
        Shape::GradientLine { length }.into()
    }

    pub fn hertzian(exponent: HertzExponent, radius_coeff: f64) -> Self {
        Shape::Hertzian { exponent, radius_coeff }.into()
    }

    pub fn rotated(mut self, angle: f64) -> Self {
        self.rotation = angle;
        self
    }

    /// True when changing `f_N` only rescales the field (no change of shape).
    pub fn is_shape_preserving_under_load(&self) -> bool {
        !matches!(
            self.shape,
            Shape::Hertzian { exponent: HertzExponent::ForceProportional { .. }, .. }
        )
    }

    /// True when the geometry depends on the normal force at all.
    pub fn depends_on_normal_force(&self) -> bool {
        matches!(self.shape, Shape::Hertzian { .. })
    }

    pub fn validate(&self, f_n: f64) -> Result<()> {
        let positive = |name: &str, v: f64| {
            ensure(v > 0.0 && v.is_finite(), || format!("{name} must be > 0, got {v}"))
        };
        match &self.shape {
            Shape::Circle { radius } => positive("radius", *radius),
            Shape::Square { side } => positive("side", *side),
            Shape::Line { length } | Shape::GradientLine { length } => positive("length", *length),
            Shape::NonConvex1 { size } | Shape::NonConvex2 { size } => positive("size", *size),
            Shape::Hertzian { exponent, radius_coeff } => {
                positive("radius_coeff", *radius_coeff)?;
                positive("f_N", f_n)?;
                positive("Hertzian exponent k", exponent.exponent(f_n))
            }
            Shape::Custom(s) => {
                ensure(!s.points.is_empty(), || "custom pressure has no samples".into())
            }
        }
    }

    /// Side length of the square bounding box at normal force `f_n` (m).
    pub fn extent(&self, f_n: f64) -> f64 {
        match &self.shape {
            Shape::Circle { radius } => 2.0 * radius,
            Shape::Square { side } => *side,
            Shape::Line { length } | Shape::GradientLine { length } => *length,
            Shape::NonConvex1 { size } | Shape::NonConvex2 { size } => *size,
            Shape::Hertzian { radius_coeff, .. } => 2.0 * radius_coeff * f_n.cbrt(),
            Shape::Custom(s) => s.extent(),
        }
    }

    /// Raw (un-normalized) pressure at native coordinates `(x, y)` for area shapes.
    ///
    /// Line shapes have no area density and return their linear density when
    /// `y == 0` within the line, zero elsewhere.
    pub fn pressure_at(&self, x: f64, y: f64, f_n: f64) -> f64 {
        let (c, s) = (self.rotation.cos(), self.rotation.sin());
        let (x, y) = (c * x + s * y, -s * x + c * y);
        match &self.shape {
            Shape::Circle { radius } => f64::from(x * x + y * y <= radius * radius),
            Shape::Square { side } => {
                let h = side / 2.0;
                f64::from(x.abs() <= h && y.abs() <= h)
            }
            Shape::Line { length } => f64::from(y == 0.0 && x.abs() <= length / 2.0),
            Shape::GradientLine { length } => {
                if y == 0.0 && x.abs() <= length / 2.0 {
                    x + length / 2.0
                } else {
                    0.0
                }
            }
            Shape::NonConvex1 { size } => mask_pressure(1, *size, x, y),
            Shape::NonConvex2 { size } => mask_pressure(2, *size, x, y),
            Shape::Hertzian { exponent, radius_coeff } => {
                let a = radius_coeff * f_n.cbrt();
                let k = exponent.exponent(f_n);
                hertz_pressure(x.hypot(y), a, k, f_n)
            }
            Shape::Custom(samples) => samples.pressure_at(x, y),
        }
    }

    fn line_density(&self) -> Option<(f64, bool)> {
        match self.shape {
            Shape::Line { length } => Some((length, false)),
            Shape::GradientLine { length } => Some((length, true)),
            _ => None,
        }
    }
}

/// Hertz-like pressure at distance `rho` from the centre.
pub fn hertz_pressure(rho: f64, a: f64, k: f64, f_n: f64) -> f64 {
    if rho > a {
        return 0.0;
    }
    let inner = (1.0 - (rho / a).powf(k)).max(0.0);
    HERTZ_PEAK_FACTOR * f_n / (PI * a * a) * inner.powf(1.0 / k)
}

/// Contact radius `a = radius_coeff * f_N^(1/3)`.
pub fn hertzian_radius(f_n: f64, radius_coeff: f64) -> Result<f64> {
    ensure(f_n > 0.0 && f_n.is_finite(), || format!("normal force must be > 0, got {f_n}"))?;
    Ok(radius_coeff * f_n.cbrt())
}

fn mask_rows(which: u8) -> Vec<&'static str> {
    let header = format!("[nonconvex{which}]");
    NONCONVEX_MASKS
        .lines()
        .skip_while(|l| l.trim() != header)
        .skip(1)
        .take_while(|l| !l.starts_with('['))
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .collect()
}

fn mask_pressure(which: u8, size: f64, x: f64, y: f64) -> f64 {
    // The masks are tiny; parsing per lookup keeps the table out of global state.
    let rows = mask_rows(which);
    let n_rows = rows.len();
    let n_cols = rows.first().map_or(0, |r| r.len());
    if n_rows == 0 || n_cols == 0 {
        return 0.0;
    }
    let u = (x / size + 0.5) * n_cols as f64;
    let v = (0.5 - y / size) * n_rows as f64;
    if !(0.0..n_cols as f64).contains(&u) || !(0.0..n_rows as f64).contains(&v) {
        return 0.0;
    }
    let ch = rows[v as usize].as_bytes()[u as usize];
    match ch {
        b'0'..=b'9' => f64::from(ch - b'0'),
        _ => 0.0,
    }
}

/// A contact cell with non-zero pressure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActiveCell {
    /// Row-major cell index `j * n + i`.
    pub index: usize,
    /// Cell centre relative to the CoP (m).
    pub x: f64,
    pub y: f64,
    /// `p_n * A` (dimensionless share of the normal force).
    pub weight: f64,
}

/// Discretized, normalized pressure field.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureGrid {
    n: usize,
    cell_size: f64,
    centers: Vec<[f64; 2]>,
    p_n: Vec<f64>,
    f_n: f64,
    cop: [f64; 2],
    r: f64,
    u: f64,
    active: Vec<ActiveCell>,
}

impl PressureGrid {
    /// Builds a grid from raw (un-normalized) cell pressures laid out row-major.
    ///
    /// `native_origin` is the centre of cell `(0, 0)` in the surface's native frame.
    pub fn from_cell_pressures(
        n: usize,
        cell_size: f64,
        native_origin: [f64; 2],
        raw: &[f64],
        f_n: f64,
    ) -> Result<Self> {
        ensure(n >= 1 && raw.len() == n * n, || {
            format!("expected {} cell pressures, got {}", n * n, raw.len())
        })?;
        ensure(cell_size > 0.0, || format!("cell size must be > 0, got {cell_size}"))?;
        ensure(raw.iter().all(|p| *p >= 0.0 && p.is_finite()), || {
            "cell pressures must be finite and non-negative".into()
        })?;
        let area = cell_size * cell_size;
        let total: f64 = raw.iter().sum::<f64>() * area;
        if total <= 0.0 {
            return Err(FrictionError::EmptyContact);
        }
        let p_n: Vec<f64> = raw.iter().map(|p| p / total).collect();

        let native = |idx: usize| {
            let (i, j) = (idx % n, idx / n);
            [
                native_origin[0] + i as f64 * cell_size,
                native_origin[1] + j as f64 * cell_size,
            ]
        };
        let mut cop = [0.0; 2];
        for (idx, p) in p_n.iter().enumerate() {
            let c = native(idx);
            cop[0] += p * area * c[0];
            cop[1] += p * area * c[1];
        }
        let centers: Vec<[f64; 2]> = (0..n * n)
            .map(|idx| {
                let c = native(idx);
                // a centre that coincides with the CoP up to rounding is put exactly on it
                let snap = |d: f64| if d.abs() < 1e-9 * cell_size { 0.0 } else { d };
                [snap(c[0] - cop[0]), snap(c[1] - cop[1])]
            })
            .collect();
        let active = p_n
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(index, p)| ActiveCell {
                index,
                x: centers[index][0],
                y: centers[index][1],
                weight: p * area,
            })
            .collect();

        let mut grid = Self { n, cell_size, centers, p_n, f_n, cop, r: 0.0, u: 0.0, active };
        grid.r = equivalent_radius(&grid);
        grid.u = viscous_scale(&grid);
        Ok(grid)
    }

    /// Single-cell contact concentrated at the CoP.
    pub fn point_contact(f_n: f64) -> Self {
        Self::from_cell_pressures(1, 1e-3, [0.0, 0.0], &[1.0], f_n)
            .expect("single positive cell is a valid grid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn cell_area(&self) -> f64 {
        self.cell_size * self.cell_size
    }

    /// Cell centres relative to the CoP, row-major.
    pub fn centers(&self) -> &[[f64; 2]] {
        &self.centers
    }

    /// Normalized pressure `p_n` per cell (1/m^2), row-major.
    pub fn p_n(&self) -> &[f64] {
        &self.p_n
    }

    pub fn f_n(&self) -> f64 {
        self.f_n
    }

    /// CoP in the surface's native frame.
    pub fn cop(&self) -> [f64; 2] {
        self.cop
    }

    /// Equivalent rim radius `r` (m).
    pub fn r(&self) -> f64 {
        self.r
    }

    /// Viscous torque scale `u` (m^2).
    pub fn u(&self) -> f64 {
        self.u
    }

    /// Cells with non-zero pressure, in row-major order.
    pub fn active_cells(&self) -> &[ActiveCell] {
        &self.active
    }

    /// Lower-left corner of the cell lattice relative to the CoP.
    pub fn lattice_origin(&self) -> [f64; 2] {
        let h = self.cell_size / 2.0;
        [self.centers[0][0] - h, self.centers[0][1] - h]
    }

    /// Same geometry under a different total normal force.
    pub fn with_normal_force(&self, f_n: f64) -> Self {
        Self { f_n, ..self.clone() }
    }

    pub fn set_normal_force(&mut self, f_n: f64) {
        self.f_n = f_n;
    }

    /// `sum(p_n * A)`, which is 1 up to rounding.
    pub fn total_weight(&self) -> f64 {
        self.active.iter().map(|c| c.weight).sum()
    }

    /// `p_n`-weighted mean of the (CoP-relative) cell centres.
    pub fn weighted_centroid(&self) -> [f64; 2] {
        let mut c = [0.0; 2];
        for cell in &self.active {
            c[0] += cell.weight * cell.x;
            c[1] += cell.weight * cell.y;
        }
        c
    }
}

/// Samples `spec` on an `n x n` grid at normal force `f_n`.
pub fn discretize(spec: &SurfaceSpec, n: usize, f_n: f64) -> Result<PressureGrid> {
    ensure(n >= 2, || format!("grid needs at least 2 cells per side, got {n}"))?;
    ensure(f_n > 0.0 && f_n.is_finite(), || format!("normal force must be > 0, got {f_n}"))?;
    spec.validate(f_n)?;

    let extent = spec.extent(f_n);
    let h = extent / n as f64;
    let first = -extent / 2.0 + h / 2.0;
    let mut raw = vec![0.0; n * n];

    if let Some((length, gradient)) = spec.line_density() {
        // Lines have no area; deposit midpoint sub-samples into the cell containing them.
        let per_cell = 8;
        let m = per_cell * n;
        let (c, s) = (spec.rotation.cos(), spec.rotation.sin());
        for k in 0..m {
            let t = -length / 2.0 + (k as f64 + 0.5) * length / m as f64;
            let density = if gradient { t + length / 2.0 } else { 1.0 };
            let (x, y) = (c * t, s * t);
            let i = (((x + extent / 2.0) / h).floor() as isize).clamp(0, n as isize - 1) as usize;
            let j = (((y + extent / 2.0) / h).floor() as isize).clamp(0, n as isize - 1) as usize;
            raw[j * n + i] += density / per_cell as f64;
        }
    } else {
        for j in 0..n {
            for i in 0..n {
                let x = first + i as f64 * h;
                let y = first + j as f64 * h;
                raw[j * n + i] = spec.pressure_at(x, y, f_n);
            }
        }
    }
    PressureGrid::from_cell_pressures(n, h, [first, first], &raw, f_n)
}

/// `r = |sum(rho x v_pr) p_n A|`, with `v_pr` the unit velocity of a pure rotation about the CoP.
pub fn equivalent_radius(grid: &PressureGrid) -> f64 {
    let mut acc = 0.0;
    for cell in grid.active_cells() {
        let rho = cell.x.hypot(cell.y);
        if rho > 0.0 {
            // rho x (-y, x)/|rho| = |rho|
            let (vx, vy) = (-cell.y / rho, cell.x / rho);
            acc += (cell.x * vy - cell.y * vx) * cell.weight;
        }
    }
    acc.abs()
}

/// `u = sum(|rho|^2 p_n A)`.
pub fn viscous_scale(grid: &PressureGrid) -> f64 {
    grid.active_cells()
        .iter()
        .map(|c| (c.x * c.x + c.y * c.y) * c.weight)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_is_normalized_and_centered() {
        let g = discretize(&SurfaceSpec::circle(0.01), 21, 1.0).unwrap();
        assert!((g.total_weight() - 1.0).abs() < 1e-9);
        let c = g.weighted_centroid();
        assert!(c[0].abs() < 1e-12 * 0.02 && c[1].abs() < 1e-12 * 0.02);
        assert!(g.cop()[0].abs() < 1e-12 * 0.02);
    }

    #[test]
    fn gradient_line_cop_matches_first_moment() {
        // Midpoint sampling of p ~ x on [0, L]: cop = L (2/3 - 1/(6 n^2)).
        let l = 0.02;
        for n in [5usize, 21, 101] {
            let g = discretize(&SurfaceSpec::gradient_line(l), n, 1.0).unwrap();
            let from_left = g.cop()[0] + l / 2.0;
            let exact_sampled = l * (2.0 / 3.0 - 1.0 / (6.0 * (n * n) as f64));
            assert!((from_left - exact_sampled).abs() < 1e-15, "n={n}");
            assert!((from_left - 2.0 * l / 3.0).abs() <= l / (6.0 * (n * n) as f64) + 1e-15);
        }
    }

    #[test]
    fn hertz_peak_pressure() {
        let a = hertzian_radius(1.0, HERTZ_COEFF_MM).unwrap();
        let spec = SurfaceSpec::hertzian(HertzExponent::Constant { k: 2.0 }, HERTZ_COEFF_MM);
        let peak = spec.pressure_at(0.0, 0.0, 1.0);
        assert!((peak - 1.144 / (PI * a * a)).abs() < 1e-9 * peak);
    }

    #[test]
    fn hertzian_radius_values() {
        assert_eq!(hertzian_radius(1.0, 6.0).unwrap(), 6.0);
        assert!((hertzian_radius(8.0, 6.0).unwrap() - 12.0).abs() < 1e-12);
        assert!(hertzian_radius(1e-30, 6.0).unwrap() < 1e-8);
        assert!(hertzian_radius(0.0, 6.0).is_err());
        assert!(hertzian_radius(-1.0, 6.0).is_err());
    }

    #[test]
    fn circle_radius_and_viscous_scale() {
        let rad = 0.01;
        let g = discretize(&SurfaceSpec::circle(rad), 101, 1.0).unwrap();
        assert!((g.r() / (2.0 * rad / 3.0) - 1.0).abs() < 5e-3);
        assert!((g.u() / (rad * rad / 2.0) - 1.0).abs() < 5e-3);
    }

    #[test]
    fn square_radius_matches_fine_quadrature() {
        // Oracle: midpoint quadrature of |rho| and |rho|^2 over the unit square on 1001x1001.
        let m = 1001;
        let (mut r, mut u) = (0.0, 0.0);
        for j in 0..m {
            for i in 0..m {
                let x = -0.5 + (i as f64 + 0.5) / m as f64;
                let y = -0.5 + (j as f64 + 0.5) / m as f64;
                r += x.hypot(y);
                u += x * x + y * y;
            }
        }
        let (r_unit, u_unit) = (r / (m * m) as f64, u / (m * m) as f64);
        // closed forms: r = (sqrt(2) + asinh(1)) / 6 = 0.38259..., u = 1/6
        assert!((r_unit - 0.382_597_858_232_106_2).abs() < 1e-6);
        assert!((u_unit - 1.0 / 6.0).abs() < 1e-6);

        let s = 0.02;
        let g = discretize(&SurfaceSpec::square(s), 101, 1.0).unwrap();
        assert!((g.r() / (r_unit * s) - 1.0).abs() < 1e-3);
        assert!((g.u() / (u_unit * s * s) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn rim_and_point_contacts() {
        // Rim: 64 equal samples on a circle of radius R.
        let rad = 0.01;
        let pts = (0..64)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / 64.0;
                (rad * a.cos(), rad * a.sin())
            })
            .collect::<Vec<_>>();
        let n = 4001;
        let h = 0.03 / n as f64;
        let first = -0.015 + h / 2.0;
        let mut raw = vec![0.0; n * n];
        for (x, y) in pts {
            let i = ((x + 0.015) / h) as usize;
            let j = ((y + 0.015) / h) as usize;
            raw[j * n + i] += 1.0;
        }
        let g = PressureGrid::from_cell_pressures(n, h, [first, first], &raw, 1.0).unwrap();
        assert!((g.r() / rad - 1.0).abs() < 1e-3);
        assert!((g.u() / (rad * rad) - 1.0).abs() < 2e-3);

        let p = PressureGrid::point_contact(1.0);
        assert_eq!(p.r(), 0.0);
        assert_eq!(p.u(), 0.0);
    }

    #[test]
    fn empty_contact_is_an_error() {
        let raw = vec![0.0; 4];
        let err = PressureGrid::from_cell_pressures(2, 1e-3, [0.0, 0.0], &raw, 1.0).unwrap_err();
        assert!(matches!(err, FrictionError::EmptyContact));
        let flat = PressureSamples { points: vec![[-1e-3, 0.0, 0.0], [1e-3, 0.0, 0.0]] };
        assert!(matches!(discretize(&Shape::Custom(flat).into(), 4, 1.0), Err(FrictionError::EmptyContact)));
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(discretize(&SurfaceSpec::circle(-1.0), 11, 1.0).is_err());
        assert!(discretize(&SurfaceSpec::circle(0.01), 1, 1.0).is_err());
        assert!(discretize(&SurfaceSpec::circle(0.01), 11, 0.0).is_err());
        let bad_k = SurfaceSpec::hertzian(HertzExponent::ForceProportional { c: -2.0 }, 1e-3);
        assert!(discretize(&bad_k, 11, 1.0).is_err());
    }

    #[test]
    fn nonconvex_masks_discretize() {
        for shape in [
            Shape::NonConvex1 { size: NONCONVEX_DEFAULT_SIZE },
            Shape::NonConvex2 { size: NONCONVEX_DEFAULT_SIZE },
        ] {
            let g = discretize(&shape.into(), 21, 1.0).unwrap();
            assert!((g.total_weight() - 1.0).abs() < 1e-9);
            assert!(g.r() > 0.0 && g.u() > 0.0);
            let active = g.active_cells().len();
            assert!(active > 50 && active < 441, "active cells {active}");
        }
    }

    #[test]
    fn custom_csv_mask() {
        let csv = "x,y,p\n-0.001,0,1\n0.001,0,3\n";
        let samples = PressureSamples::from_csv_reader(csv.as_bytes()).unwrap();
        let g = discretize(&Shape::Custom(samples).into(), 2, 1.0).unwrap();
        // the heavier sample pulls the CoP towards +x: (3*1 - 1*1)/4 mm
        assert!((g.cop()[0] - 0.0005).abs() < 1e-12);
        assert!(PressureSamples::from_csv_reader("a,b\n1,2\n".as_bytes()).is_err());
        assert!(PressureSamples::from_csv_reader("x,y,p\n0,0,-1\n".as_bytes()).is_err());
    }

    #[test]
    fn rotated_gradient_line_mirrors_cop() {
        let l = 0.02;
        let g = discretize(&SurfaceSpec::gradient_line(l), 21, 1.0).unwrap();
        let r = discretize(&SurfaceSpec::gradient_line(l).rotated(PI), 21, 1.0).unwrap();
        assert!((g.cop()[0] + r.cop()[0]).abs() < 1e-12);
        assert!((g.r() - r.r()).abs() < 1e-12);
    }

    #[test]
    fn shape_dependence_flags() {
        let k2 = SurfaceSpec::hertzian(HertzExponent::Constant { k: 2.0 }, HERTZ_COEFF_MM);
        let k2f = SurfaceSpec::hertzian(HertzExponent::ForceProportional { c: 2.0 }, HERTZ_COEFF_MM);
        assert!(k2.is_shape_preserving_under_load() && k2.depends_on_normal_force());
        assert!(!k2f.is_shape_preserving_under_load());
        assert!(!SurfaceSpec::circle(0.01).depends_on_normal_force());
    }
}
