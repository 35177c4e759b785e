//! Uniform interface over the distributed and reduced friction models.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::distributed::{cell_rate, cell_velocity, rate_and_wrench};
use crate::error::{ensure, FrictionError, Result};
use crate::geometry::{discretize, PressureGrid, SurfaceSpec};
use crate::limit_surface::LimitSurfaceTable;
use crate::params::FrictionParams;
use crate::reduced::{ellipsoid_direction, rate_for, reduced_wrench, ReducedBristleState, ScalingMatrices};
use crate::types::{FrictionWrench, VelocityTwist};

/// Which friction model a simulation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Distributed,
    ReducedEllipsoid,
    ReducedLs,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Distributed => "distributed",
            ModelKind::ReducedEllipsoid => "reduced_ellipsoid",
            ModelKind::ReducedLs => "reduced_ls",
        }
    }
}

/// Construction options for [`FrictionModel`].
#[derive(Debug, Clone)]
pub struct ModelOptions {
    /// Cells per side of the contact grid.
    pub n: usize,
    /// Limit-surface cells per quarter arc.
    pub n_ls: usize,
    /// Relative normal-force change that triggers a table re-computation for
    /// surfaces whose shape depends on the load.
    pub recompute_threshold: f64,
    /// Pre-computed table to reuse instead of computing one.
    pub table: Option<Arc<LimitSurfaceTable>>,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self { n: 21, n_ls: 20, recompute_threshold: 1e-3, table: None }
    }
}

/// A friction model bound to one contact surface and normal force.
#[derive(Debug, Clone)]
pub struct FrictionModel {
    kind: ModelKind,
    params: FrictionParams,
    spec: SurfaceSpec,
    n: usize,
    n_ls: usize,
    grid: PressureGrid,
    inactive: Vec<usize>,
    scaling: ScalingMatrices,
    table: Option<Arc<LimitSurfaceTable>>,
    table_f_n: f64,
    recompute_threshold: f64,
    table_recomputes: usize,
}

fn inactive_cells(grid: &PressureGrid) -> Vec<usize> {
    grid.p_n().iter().enumerate().filter(|(_, p)| **p == 0.0).map(|(i, _)| i).collect()
}

impl FrictionModel {
    pub fn new(kind: ModelKind, spec: &SurfaceSpec, params: FrictionParams, f_n: f64, opts: &ModelOptions) -> Result<Self> {
        params.validate()?;
        ensure(opts.recompute_threshold >= 0.0, || "recompute threshold must be >= 0".into())?;
        let grid = discretize(spec, opts.n, f_n)?;
        Self::from_grid(kind, spec.clone(), grid, params, opts)
    }

    /// Builds a model on an already discretized grid. `spec` is used for load-dependent updates.
    pub fn from_grid(
        kind: ModelKind,
        spec: SurfaceSpec,
        grid: PressureGrid,
        params: FrictionParams,
        opts: &ModelOptions,
    ) -> Result<Self> {
        params.validate()?;
        let scaling = ScalingMatrices::new(grid.r(), grid.u());
        if kind != ModelKind::Distributed {
            ensure(grid.r() > 0.0, || "reduced models need a contact with non-zero radius".into())?;
        }
        let table = match (kind, &opts.table) {
            (ModelKind::ReducedLs, Some(t)) => Some(t.clone()),
            (ModelKind::ReducedLs, None) => Some(Arc::new(LimitSurfaceTable::precompute(&grid, opts.n_ls)?)),
            _ => None,
        };
        Ok(Self {
            kind,
            params,
            spec,
            n: grid.n(),
            n_ls: opts.n_ls,
            inactive: inactive_cells(&grid),
            table_f_n: grid.f_n(),
            grid,
            scaling,
            table,
            recompute_threshold: opts.recompute_threshold,
            table_recomputes: 0,
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn params(&self) -> &FrictionParams {
        &self.params
    }

    pub fn grid(&self) -> &PressureGrid {
        &self.grid
    }

    pub fn scaling(&self) -> ScalingMatrices {
        self.scaling
    }

    pub fn table(&self) -> Option<&Arc<LimitSurfaceTable>> {
        self.table.as_ref()
    }

    pub fn table_recomputes(&self) -> usize {
        self.table_recomputes
    }

    pub fn normal_force(&self) -> f64 {
        self.grid.f_n()
    }

    /// Number of bristle state variables.
    pub fn state_len(&self) -> usize {
        match self.kind {
            ModelKind::Distributed => 2 * self.n * self.n,
            _ => 3,
        }
    }

    /// Updates the normal force, re-discretizing load-dependent surfaces and
    /// refreshing `r`, `u` and, when the shape changes, the limit-surface table.
    pub fn set_normal_force(&mut self, f_n: f64, time: f64) -> Result<()> {
        if !(f_n >= 0.0) || !f_n.is_finite() {
            return Err(FrictionError::NegativeNormalForce { time, value: f_n });
        }
        if f_n == self.grid.f_n() {
            return Ok(());
        }
        if !self.spec.depends_on_normal_force() || f_n == 0.0 {
            self.grid.set_normal_force(f_n);
            return Ok(());
        }
        self.grid = discretize(&self.spec, self.n, f_n)?;
        self.inactive = inactive_cells(&self.grid);
        self.scaling = ScalingMatrices::new(self.grid.r(), self.grid.u());
        if self.kind == ModelKind::ReducedLs
            && !self.spec.is_shape_preserving_under_load()
            && (f_n - self.table_f_n).abs() > self.recompute_threshold * self.table_f_n
        {
            self.table = Some(Arc::new(LimitSurfaceTable::precompute(&self.grid, self.n_ls)?));
            self.table_f_n = f_n;
            self.table_recomputes += 1;
        }
        Ok(())
    }

    /// Normalized wrench direction used by the reduced models.
    #[inline]
    pub fn direction(&self, twist: &VelocityTwist) -> [f64; 3] {
        match (&self.table, self.kind) {
            (Some(t), ModelKind::ReducedLs) => t.lookup(self.scaling.r, twist),
            _ => ellipsoid_direction(twist, &self.scaling),
        }
    }

    /// Bristle rate only, written to `dz`.
    #[inline]
    pub fn rate(&self, twist: &VelocityTwist, z: &[f64], dz: &mut [f64]) {
        match self.kind {
            ModelKind::Distributed => {
                let (zc, _) = z.as_chunks::<2>();
                let (dzc, _) = dz.as_chunks_mut::<2>();
                for cell in self.grid.active_cells() {
                    let v = cell_velocity(twist, [cell.x, cell.y]);
                    dzc[cell.index] = cell_rate(zc[cell.index], v, &self.params);
                }
                for &i in &self.inactive {
                    dzc[i] = [0.0; 2];
                }
            }
            _ => {
                let r = self.reduced_rate(twist, z);
                dz[..3].copy_from_slice(&r);
            }
        }
    }

    #[inline]
    fn reduced_rate(&self, twist: &VelocityTwist, z: &[f64]) -> [f64; 3] {
        let vs = self.scaling.scaled_twist(twist);
        let vs_norm = (vs[0] * vs[0] + vs[1] * vs[1] + vs[2] * vs[2]).sqrt();
        let state = ReducedBristleState::new([z[0], z[1], z[2]]);
        rate_for(&state, self.direction(twist), vs_norm, &self.scaling, &self.params)
    }

    /// Bristle rate written to `dz` and the friction wrench at the CoP.
    #[inline]
    pub fn rate_and_wrench(&self, twist: &VelocityTwist, z: &[f64], dz: &mut [f64]) -> FrictionWrench {
        match self.kind {
            ModelKind::Distributed => {
                let (zc, _) = z.as_chunks::<2>();
                let (dzc, _) = dz.as_chunks_mut::<2>();
                for &i in &self.inactive {
                    dzc[i] = [0.0; 2];
                }
                rate_and_wrench(twist, zc, dzc, &self.grid, &self.params)
            }
            _ => {
                let r = self.reduced_rate(twist, z);
                dz[..3].copy_from_slice(&r);
                let state = ReducedBristleState::new([z[0], z[1], z[2]]);
                reduced_wrench(&state, r, twist, &self.scaling, &self.params, self.grid.f_n())
            }
        }
    }

    /// Wrench for a state, computing the rate internally.
    pub fn wrench(&self, twist: &VelocityTwist, z: &[f64]) -> FrictionWrench {
        let mut dz = vec![0.0; z.len()];
        self.rate_and_wrench(twist, z, &mut dz)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::HertzExponent;

    #[test]
    fn state_sizes() {
        let spec = SurfaceSpec::circle(0.01);
        let p = FrictionParams::preset_p1();
        let o = ModelOptions { n: 21, n_ls: 4, ..Default::default() };
        assert_eq!(FrictionModel::new(ModelKind::Distributed, &spec, p, 1.0, &o).unwrap().state_len(), 882);
        assert_eq!(FrictionModel::new(ModelKind::ReducedLs, &spec, p, 1.0, &o).unwrap().state_len(), 3);
    }

    #[test]
    fn negative_normal_force_is_rejected() {
        let spec = SurfaceSpec::circle(0.01);
        let mut m = FrictionModel::new(ModelKind::ReducedEllipsoid, &spec, FrictionParams::preset_p1(), 1.0, &ModelOptions::default()).unwrap();
        assert!(matches!(m.set_normal_force(-1.0, 0.5), Err(FrictionError::NegativeNormalForce { .. })));
        m.set_normal_force(0.0, 0.5).unwrap();
        let w = m.wrench(&VelocityTwist::new(1.0, 0.0, 0.0), &[1e-6, 0.0, 0.0]);
        assert_eq!(w.f_x, 0.0);
    }

    #[test]
    fn load_dependent_surfaces_update() {
        let o = ModelOptions { n: 11, n_ls: 4, ..Default::default() };
        let p = FrictionParams::preset_p1();
        let scaled = SurfaceSpec::hertzian(HertzExponent::Constant { k: 2.0 }, 6e-3);
        let mut m = FrictionModel::new(ModelKind::ReducedLs, &scaled, p, 1.0, &o).unwrap();
        let r1 = m.scaling().r;
        m.set_normal_force(8.0, 0.0).unwrap();
        assert!((m.scaling().r / r1 - 2.0).abs() < 1e-9);
        assert_eq!(m.table_recomputes(), 0);

        let reshaped = SurfaceSpec::hertzian(HertzExponent::ForceProportional { c: 2.0 }, 6e-3);
        let mut m = FrictionModel::new(ModelKind::ReducedLs, &reshaped, p, 1.0, &o).unwrap();
        m.set_normal_force(1.0005, 0.0).unwrap();
        assert_eq!(m.table_recomputes(), 0);
        m.set_normal_force(2.0, 0.0).unwrap();
        assert_eq!(m.table_recomputes(), 1);
    }
}
