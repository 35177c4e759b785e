//! TOML run configuration.

use std::path::{Path, PathBuf};

use planar_friction::analysis::BenchConfig;
use planar_friction::geometry::PressureSamples;
use planar_friction::ode::IntegratorConfig;
use planar_friction::sim::scenarios::{DriftLoad, GripperCase, NormalProfile, DISC_MASS, DISC_RADIUS, GRAVITY};
use planar_friction::sim::{ModelKind, Signal};
use planar_friction::{FrictionParams, Shape, SurfaceSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// One experiment: surface, friction law, models and what to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    /// Models simulated by `simulate` and, without explicit candidates, compared by `compare`.
    #[serde(default = "default_models")]
    pub models: Vec<ModelKind>,
    /// Normal force for kinematic runs, comparisons and pre-computation (N).
    #[serde(default = "one")]
    pub normal_force: f64,
    /// Contact surface. Drift scenarios always use the disc face and reject this section.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceConfig>,
    #[serde(default)]
    pub friction: FrictionConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default = "default_integrator")]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<CompareConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bench: Option<BenchSection>,
}

fn one() -> f64 {
    1.0
}

fn default_models() -> Vec<ModelKind> {
    vec![ModelKind::ReducedLs]
}

fn default_integrator() -> IntegratorConfig {
    IntegratorConfig::FixedStep { dt: 1e-5 }
}

/// Either an inline shape or a CSV pressure mask with `x,y,p` columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SurfaceConfig {
    Csv {
        pressure_csv: PathBuf,
        #[serde(default)]
        rotation: f64,
    },
    Spec(SurfaceSpec),
}

/// A named preset with an optional Elasto-Plastic switch, or every coefficient spelled out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FrictionConfig {
    Preset {
        preset: String,
        #[serde(default)]
        elasto_plastic: bool,
    },
    Explicit(FrictionParams),
}

impl Default for FrictionConfig {
    fn default() -> Self {
        FrictionConfig::Preset { preset: "p1".into(), elasto_plastic: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_n_ls")]
    pub n_ls: usize,
    #[serde(default = "default_threshold")]
    pub recompute_threshold: f64,
}

fn default_n() -> usize {
    21
}

fn default_n_ls() -> usize {
    20
}

fn default_threshold() -> f64 {
    1e-3
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n: default_n(), n_ls: default_n_ls(), recompute_threshold: default_threshold() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    /// Limit-surface cache; defaults to `<dir>/<name>.lscache`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache: Option<PathBuf>,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: default_dir(), cache: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScenarioConfig {
    /// Imposed twist profile; bristle states only.
    Kinematic {
        /// CSV with `t,v_x,v_y,omega` columns; the canonical profile when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        profile: Option<PathBuf>,
        /// Time-scales the profile to this length.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        duration: Option<f64>,
        #[serde(default = "default_output_dt")]
        output_dt: f64,
    },
    /// 1 kg disc of radius 0.05 m under small oscillating loads.
    Drift {
        load: DriftLoad,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        duration: Option<f64>,
        #[serde(default = "default_output_dt")]
        output_dt: f64,
    },
    /// Object held between two fingers under gravity.
    Gripper {
        case: GripperCase,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        normal_profile: Option<NormalProfile>,
        /// Custom grip force signal, used instead of `normal_profile`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        normal: Option<Signal>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        duration: Option<f64>,
        #[serde(default = "default_output_dt")]
        output_dt: f64,
    },
}

fn default_output_dt() -> f64 {
    1e-3
}

/// One model compared against the oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Candidate {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub model: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_ls: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareConfig {
    /// Grid size of the oracle.
    #[serde(default = "default_n_oracle")]
    pub n_oracle: usize,
    /// Oracle model; a reduced-LS oracle uses `oracle_n_ls`.
    #[serde(default = "default_oracle_model")]
    pub oracle_model: ModelKind,
    #[serde(default = "default_oracle_n_ls")]
    pub oracle_n_ls: usize,
    #[serde(default = "default_compare_dt")]
    pub dt: f64,
    /// Time-scales the canonical profile to this length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,
    #[serde(default = "default_output_dt")]
    pub output_dt: f64,
    /// Empty means one candidate per entry of `models` at the grid settings.
    #[serde(default)]
    pub candidates: Vec<Candidate>,
}

fn default_n_oracle() -> usize {
    101
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            n_oracle: default_n_oracle(),
            oracle_model: default_oracle_model(),
            oracle_n_ls: default_oracle_n_ls(),
            dt: default_compare_dt(),
            duration: None,
            output_dt: default_output_dt(),
            candidates: Vec::new(),
        }
    }
}

fn default_oracle_model() -> ModelKind {
    ModelKind::Distributed
}

fn default_oracle_n_ls() -> usize {
    100
}

fn default_compare_dt() -> f64 {
    1e-5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSection {
    #[serde(default = "default_bench_ns")]
    pub ns: Vec<usize>,
    #[serde(default = "default_bench_models")]
    pub models: Vec<ModelKind>,
    /// Number of distinct twists cycled through, drawn at seeded random times on the canonical profile.
    #[serde(default = "default_twists")]
    pub twists: usize,
    #[serde(default = "default_warmup")]
    pub warmup: usize,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    /// Table resolutions whose pre-computation time is measured at the grid size `grid.n`.
    #[serde(default)]
    pub precompute_n_ls: Vec<usize>,
}

fn default_bench_ns() -> Vec<usize> {
    vec![5, 9, 13, 17, 21, 25, 29, 33]
}

fn default_bench_models() -> Vec<ModelKind> {
    vec![ModelKind::Distributed, ModelKind::ReducedLs]
}

fn default_twists() -> usize {
    1000
}

fn default_warmup() -> usize {
    BenchConfig::default().warmup
}

fn default_iterations() -> usize {
    BenchConfig::default().iterations
}

fn default_repetitions() -> usize {
    BenchConfig::default().repetitions
}

impl Default for BenchSection {
    fn default() -> Self {
        Self {
            ns: default_bench_ns(),
            models: default_bench_models(),
            twists: default_twists(),
            warmup: default_warmup(),
            iterations: default_iterations(),
            repetitions: default_repetitions(),
            precompute_n_ls: Vec::new(),
        }
    }
}

impl BenchSection {
    pub fn bench_config(&self) -> BenchConfig {
        BenchConfig { warmup: self.warmup, iterations: self.iterations, repetitions: self.repetitions }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Reads a config and resolves relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        cfg.validate()?;
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(SurfaceConfig::Csv { pressure_csv, .. }) = &mut self.surface {
            fix(pressure_csv);
        }
        if let Some(ScenarioConfig::Kinematic { profile: Some(p), .. }) = &mut self.scenario {
            fix(p);
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return bad(format!("name must be a non-empty file stem, got {:?}", self.name));
        }
        if self.models.is_empty() {
            return bad("models must list at least one model".into());
        }
        if !(self.normal_force > 0.0 && self.normal_force.is_finite()) {
            return bad(format!("normal_force must be > 0, got {}", self.normal_force));
        }
        self.params()?;
        if self.grid.n < 1 || self.grid.n_ls < 1 {
            return bad("grid.n and grid.n_ls must be >= 1".into());
        }
        self.integrator.validate()?;
        match &self.scenario {
            Some(ScenarioConfig::Drift { .. }) if self.surface.is_some() => {
                return bad("drift scenarios use the 0.05 m disc face; remove the [surface] section".into())
            }
            Some(ScenarioConfig::Gripper { normal_profile, normal, .. }) if normal_profile.is_some() == normal.is_some() => {
                return bad("gripper scenarios need exactly one of normal_profile or normal".into())
            }
            _ => {}
        }
        if let Some(c) = &self.compare {
            if c.n_oracle < 1 || c.oracle_n_ls < 1 || !(c.dt > 0.0) || !(c.output_dt > 0.0) {
                return bad("compare needs n_oracle >= 1 and positive dt and output_dt".into());
            }
        }
        if let Some(b) = &self.bench {
            if b.ns.is_empty() || b.models.is_empty() || b.twists == 0 || b.iterations == 0 || b.repetitions == 0 || b.precompute_n_ls.contains(&0) {
                return bad("bench needs non-empty ns and models and positive twists, iterations and repetitions".into());
            }
        }
        Ok(())
    }

    pub fn params(&self) -> Result<FrictionParams, CliError> {
        let p = match &self.friction {
            FrictionConfig::Preset { preset, elasto_plastic } => FrictionParams::preset(preset)
                .ok_or_else(|| CliError::Config(format!("unknown friction preset {preset:?}; expected p0 or p1")))?
                .with_elasto_plastic(*elasto_plastic),
            FrictionConfig::Explicit(p) => *p,
        };
        p.validate()?;
        Ok(p)
    }

    /// The contact surface the experiment runs on.
    pub fn surface_spec(&self) -> Result<SurfaceSpec, CliError> {
        if matches!(self.scenario, Some(ScenarioConfig::Drift { .. })) {
            return Ok(SurfaceSpec::circle(DISC_RADIUS));
        }
        match &self.surface {
            None => Err(CliError::Config("missing [surface] section".into())),
            Some(SurfaceConfig::Spec(s)) => Ok(s.clone()),
            Some(SurfaceConfig::Csv { pressure_csv, rotation }) => {
                let samples = PressureSamples::from_csv_path(pressure_csv)
                    .map_err(|e| CliError::Config(format!("{}: {e}", pressure_csv.display())))?;
                Ok(SurfaceSpec { shape: Shape::Custom(samples), rotation: *rotation })
            }
        }
    }

    /// Normal force at the start of the configured scenario.
    pub fn initial_normal_force(&self) -> f64 {
        match &self.scenario {
            Some(ScenarioConfig::Drift { .. }) => DISC_MASS * GRAVITY,
            Some(ScenarioConfig::Gripper { normal_profile, normal, .. }) => {
                let s = normal.clone().or(normal_profile.map(|p| p.signal())).unwrap_or_default();
                s.at(0.0).max(1e-3)
            }
            _ => self.normal_force,
        }
    }

    pub fn cache_path(&self) -> PathBuf {
        self.output.cache.clone().unwrap_or_else(|| self.output.dir.join(format!("{}.lscache", self.name)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
name = "sample"
models = ["distributed", "reduced_ls"]

[surface]
rotation = 0.5
[surface.shape]
kind = "gradient_line"
length = 0.02

[friction]
preset = "p1"
elasto_plastic = true

[integrator]
mode = "fixed_step"
dt = 1e-5

[scenario]
kind = "gripper"
case = "case1"
normal_profile = "profile2"

[compare]
n_oracle = 41
candidates = [{ model = "reduced_ls", n_ls = 5 }, { model = "distributed", n = 5 }]

[bench]
ns = [5, 21]
"#;

    #[test]
    fn round_trip() {
        let a = RunConfig::from_toml(SAMPLE).unwrap();
        a.validate().unwrap();
        let b = RunConfig::from_toml(&a.to_toml().unwrap()).unwrap();
        assert_eq!(a, b);
        assert_eq!(b.params().unwrap(), FrictionParams::preset_p1().with_elasto_plastic(true));
    }

    #[test]
    fn explicit_params_round_trip() {
        let mut a = RunConfig::from_toml(SAMPLE).unwrap();
        a.friction = FrictionConfig::Explicit(FrictionParams::preset_p0());
        let b = RunConfig::from_toml(&a.to_toml().unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn presets_match_table() {
        for (name, sigma2, mu_s) in [("p0", 0.0, 1.0), ("p1", 0.2, 1.2)] {
            let p = FrictionParams::preset(name).unwrap();
            assert_eq!((p.sigma0, p.sigma1, p.sigma2, p.mu_c, p.mu_s), (1e6, 8e2, sigma2, 1.0, mu_s));
            assert_eq!((p.gamma, p.v_s, p.s_ba), (2.0, 1e-3, 0.9));
        }
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(RunConfig::from_toml("name = \"x\"\nbogus = 1").is_err());
        let mut c = RunConfig::from_toml("name = \"x\"\n[friction]\npreset = \"p7\"").unwrap();
        assert!(c.validate().is_err());
        c.friction = FrictionConfig::default();
        c.validate().unwrap();
        c.scenario = Some(ScenarioConfig::Drift { load: DriftLoad::Tangential, duration: None, output_dt: 1e-3 });
        c.surface = Some(SurfaceConfig::Spec(SurfaceSpec::circle(0.01)));
        assert!(c.validate().is_err());
    }
}
