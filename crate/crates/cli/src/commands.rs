//! The four subcommands.

use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use planar_friction::analysis::{bench_twists, measure_throughput, ComparisonReport, Throughput};
use planar_friction::geometry::discretize;
use planar_friction::limit_surface::{
    check_positive_definite, find_zero_tangential_cor_table, skew_variables, EigenCheck, SKEW_MAX_ITER, SKEW_TOL,
};
use planar_friction::ode::IntegratorConfig;
use planar_friction::sim::scenarios::{drift_scenario, gripper_scenario, net_displacement, ScenarioOptions, GRIPPER_DURATION};
use planar_friction::sim::{
    simulate_kinematic, write_dynamic_csv, write_kinematic_csv, DynamicSample, FrictionModel, KinematicSample, ModelKind,
    ModelOptions, VelocityProfile,
};
use planar_friction::{FrictionError, FrictionWrench, LimitSurfaceTable, VelocityTwist};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::NamedTempFile;

use crate::config::{BenchSection, RunConfig, ScenarioConfig};
use crate::error::CliError;

/// Writes `path` through a temporary file in the same directory and renames it into place.
pub fn write_atomic(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<&mut NamedTempFile>) -> Result<(), CliError>,
) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let mut tmp = NamedTempFile::new_in(dir)?;
    {
        let mut w = BufWriter::new(&mut tmp);
        body(&mut w)?;
        w.flush()?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(format!("cannot write {}: {}", path.display(), e.error)))?;
    Ok(())
}

fn model_options(cfg: &RunConfig) -> ModelOptions {
    ModelOptions {
        n: cfg.grid.n,
        n_ls: cfg.grid.n_ls,
        recompute_threshold: cfg.grid.recompute_threshold,
        table: None,
    }
}

#[derive(Debug, Clone)]
pub struct PrecomputeSummary {
    pub r: f64,
    pub u: f64,
    /// `None` when the skew iteration diverged.
    pub p_s: Option<[f64; 2]>,
    pub eigen: EigenCheck,
    pub cells: usize,
    pub cache: PathBuf,
    pub seconds: f64,
}

pub fn precompute(cfg: &RunConfig) -> Result<PrecomputeSummary, CliError> {
    let spec = cfg.surface_spec()?;
    let grid = discretize(&spec, cfg.grid.n, cfg.initial_normal_force())?;
    let start = Instant::now();
    let table = LimitSurfaceTable::precompute(&grid, cfg.grid.n_ls)?;
    let seconds = start.elapsed().as_secs_f64();
    let r = grid.r();
    let p_s = match find_zero_tangential_cor_table(&table, SKEW_TOL, SKEW_MAX_ITER) {
        // offsets at rounding level are reported as exactly zero
        Ok(p) if p[0].hypot(p[1]) < 1e-9 * r => Some([0.0; 2]),
        Ok(p) => Some(p),
        Err(e @ FrictionError::SkewDiverged { .. }) => {
            eprintln!("warning: {e}; skew reported as unavailable");
            None
        }
        Err(e) => return Err(e.into()),
    };
    let (s_x, s_y) = skew_variables(p_s.unwrap_or([0.0; 2]), r, r, &VelocityTwist::new(0.0, 0.0, 1.0));
    let eigen = check_positive_definite(r, r, s_x, s_y);
    let cache = cfg.cache_path();
    write_atomic(&cache, |w| Ok(table.write_cache(w)?))?;

    println!("surface        r = {r:.9e} m, u = {:.9e} m^2", grid.u());
    match p_s {
        Some(p) => println!("skew           p_s = ({:.6e}, {:.6e}) m", p[0], p[1]),
        None => println!("skew           p_s = unavailable"),
    }
    println!(
        "eigenvalues    [{:.6e}, {:.6e}, {:.6e}]{} positive = {}",
        eigen.eigenvalues[0],
        eigen.eigenvalues[1],
        eigen.eigenvalues[2],
        if eigen.complex { " (real parts)" } else { "" },
        eigen.positive
    );
    println!("table          n_ls = {}, {} cells", table.n_ls(), table.cell_count());
    println!("cache          {}", cache.display());
    println!("wall time      {seconds:.3e} s");
    Ok(PrecomputeSummary { r, u: grid.u(), p_s, eigen, cells: table.cell_count(), cache, seconds })
}

/// Loads the cached table for reduced-LS runs and checks it belongs to this config.
fn load_cache(cfg: &RunConfig, config_path: &Path) -> Result<Arc<LimitSurfaceTable>, CliError> {
    let path = cfg.cache_path();
    if !path.exists() {
        return Err(CliError::Config(format!(
            "limit-surface cache {} not found; run `planar-friction precompute --config {}` first",
            path.display(),
            config_path.display()
        )));
    }
    let table = LimitSurfaceTable::load(&path)?;
    let grid = discretize(&cfg.surface_spec()?, cfg.grid.n, cfg.initial_normal_force())?;
    let stale = table.n_ls() != cfg.grid.n_ls || (table.r_prime() - grid.r()).abs() > 1e-9 * grid.r();
    if stale {
        return Err(CliError::Config(format!(
            "limit-surface cache {} does not match this config (n_ls {} vs {}, r {:e} vs {:e}); rerun `planar-friction precompute --config {}`",
            path.display(),
            table.n_ls(),
            cfg.grid.n_ls,
            table.r_prime(),
            grid.r(),
            config_path.display()
        )));
    }
    Ok(Arc::new(table))
}

pub enum Trace {
    Kinematic(Vec<KinematicSample>),
    Dynamic(Vec<DynamicSample>),
}

pub fn trace_path(cfg: &RunConfig, kind: ModelKind) -> PathBuf {
    cfg.output.dir.join(format!("{}_{}.csv", cfg.name, kind.name()))
}

pub fn simulate(cfg: &RunConfig, config_path: &Path) -> Result<Vec<(ModelKind, Trace)>, CliError> {
    let scenario = cfg
        .scenario
        .as_ref()
        .ok_or_else(|| CliError::Config("simulate needs a [scenario] section".into()))?;
    let params = cfg.params()?;
    let spec = cfg.surface_spec()?;
    let mut opts = model_options(cfg);
    if cfg.models.contains(&ModelKind::ReducedLs) {
        opts.table = Some(load_cache(cfg, config_path)?);
    }
    let mut traces = Vec::new();
    for &kind in &cfg.models {
        let start = Instant::now();
        let trace = match scenario {
            ScenarioConfig::Kinematic { profile, duration, output_dt } => {
                let mut p = match profile {
                    Some(path) => VelocityProfile::from_csv_path(path)
                        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?,
                    None => VelocityProfile::canonical(),
                };
                if let Some(d) = duration {
                    p = p.time_scaled(*d);
                }
                let model = FrictionModel::new(kind, &spec, params, cfg.normal_force, &opts)?;
                Trace::Kinematic(simulate_kinematic(&p, &model, cfg.integrator, *output_dt)?)
            }
            ScenarioConfig::Drift { load, duration, output_dt } => {
                let s = ScenarioOptions {
                    params,
                    model: opts.clone(),
                    integrator: cfg.integrator,
                    duration: duration.unwrap_or(load.default_duration()),
                    output_dt: *output_dt,
                };
                Trace::Dynamic(drift_scenario(*load, kind, &s)?)
            }
            ScenarioConfig::Gripper { case, normal_profile, normal, duration, output_dt } => {
                let signal = normal.clone().or(normal_profile.map(|p| p.signal())).unwrap_or_default();
                let s = ScenarioOptions {
                    params,
                    model: opts.clone(),
                    integrator: cfg.integrator,
                    duration: duration.unwrap_or(GRIPPER_DURATION),
                    output_dt: *output_dt,
                };
                Trace::Dynamic(gripper_scenario(*case, &spec, &signal, kind, &s)?)
            }
        };
        let path = trace_path(cfg, kind);
        write_atomic(&path, |w| match &trace {
            Trace::Kinematic(rows) => Ok(write_kinematic_csv(rows, w)?),
            Trace::Dynamic(rows) => Ok(write_dynamic_csv(rows, w)?),
        })?;
        print_summary(kind, &trace, start.elapsed().as_secs_f64(), &path);
        traces.push((kind, trace));
    }
    Ok(traces)
}

fn peaks<'a>(wrenches: impl Iterator<Item = &'a FrictionWrench>) -> (f64, f64) {
    wrenches.fold((0.0, 0.0), |(f, t), w| (f64::max(f, w.tangential_norm()), f64::max(t, w.tau.abs())))
}

fn print_summary(kind: ModelKind, trace: &Trace, seconds: f64, path: &Path) {
    match trace {
        Trace::Kinematic(rows) => {
            let (f, t) = peaks(rows.iter().map(|s| &s.wrench));
            let last = rows.last().map(|s| s.wrench).unwrap_or_default();
            println!(
                "{:<18} peak |f| = {f:.6e} N, peak |tau| = {t:.6e} N m, final wrench = ({:.6e}, {:.6e}, {:.6e})",
                kind.name(),
                last.f_x,
                last.f_y,
                last.tau
            );
        }
        Trace::Dynamic(rows) => {
            let (f, t) = peaks(rows.iter().map(|s| &s.friction));
            let pose = rows.last().map(|s| s.pose).unwrap_or_default();
            println!(
                "{:<18} final pose = ({:.6e} m, {:.6e} m, {:.6e} rad), net displacement = {:.6e} m, peak |f| = {f:.6e} N, peak |tau| = {t:.6e} N m",
                kind.name(),
                pose[0],
                pose[1],
                pose[2],
                net_displacement(rows, 0.2),
            );
        }
    }
    println!("{:<18} {seconds:.2} s, trace {}", "", path.display());
}

pub fn compare_path(cfg: &RunConfig) -> PathBuf {
    cfg.output.dir.join(format!("{}_compare.csv", cfg.name))
}

fn wrenches(profile: &VelocityProfile, model: &FrictionModel, dt: f64, output_dt: f64) -> Result<Vec<FrictionWrench>, CliError> {
    let rows = simulate_kinematic(profile, model, IntegratorConfig::FixedStep { dt }, output_dt)?;
    Ok(rows.into_iter().map(|s| s.wrench).collect())
}

pub fn compare(cfg: &RunConfig) -> Result<Vec<ComparisonReport>, CliError> {
    let c = cfg.compare.clone().unwrap_or_default();
    let params = cfg.params()?;
    let spec = cfg.surface_spec()?;
    let mut profile = VelocityProfile::canonical();
    if let Some(d) = c.duration {
        profile = profile.time_scaled(d);
    }
    let candidates = if c.candidates.is_empty() {
        cfg.models
            .iter()
            .map(|&model| crate::config::Candidate { label: None, model, n: None, n_ls: None })
            .collect()
    } else {
        c.candidates.clone()
    };

    let start = Instant::now();
    let oracle_opts = ModelOptions { n: c.n_oracle, n_ls: c.oracle_n_ls, ..model_options(cfg) };
    let oracle = FrictionModel::new(c.oracle_model, &spec, params, cfg.normal_force, &oracle_opts)?;
    let reference = wrenches(&profile, &oracle, c.dt, c.output_dt)?;
    let ls = if c.oracle_model == ModelKind::ReducedLs { format!(" n_ls={}", c.oracle_n_ls) } else { String::new() };
    println!(
        "oracle           {} n={}{ls} ({:.1} s)",
        c.oracle_model.name(),
        c.n_oracle,
        start.elapsed().as_secs_f64()
    );

    let mut reports = Vec::new();
    for cand in &candidates {
        let n = cand.n.unwrap_or(cfg.grid.n);
        let n_ls = cand.n_ls.unwrap_or(cfg.grid.n_ls);
        let label = cand.label.clone().unwrap_or_else(|| match cand.model {
            ModelKind::ReducedLs => format!("{} n={n} n_ls={n_ls}", cand.model.name()),
            _ => format!("{} n={n}", cand.model.name()),
        });
        let opts = ModelOptions { n, n_ls, ..model_options(cfg) };
        let model = FrictionModel::new(cand.model, &spec, params, cfg.normal_force, &opts)?;
        let report = ComparisonReport::new(label, &reference, &wrenches(&profile, &model, c.dt, c.output_dt)?)?;
        println!(
            "{:<32} nRMSE = [{:.3e}, {:.3e}, {:.3e}], median |err| = [{:.3e}, {:.3e}, {:.3e}]",
            report.label,
            report.nrmse[0],
            report.nrmse[1],
            report.nrmse[2],
            report.quantiles[0].median,
            report.quantiles[1].median,
            report.quantiles[2].median,
        );
        reports.push(report);
    }
    let path = compare_path(cfg);
    write_atomic(&path, |w| Ok(ComparisonReport::write_csv(&reports, w)?))?;
    println!("report           {}", path.display());
    Ok(reports)
}

pub const BENCH_HEADER: &str = "model,n,n_ls,precompute_s,mean_it_per_s,min_it_per_s,max_it_per_s,runs";
pub const PRECOMPUTE_HEADER: &str = "n,n_ls,cells,precompute_s";

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub model: ModelKind,
    pub n: usize,
    pub n_ls: usize,
    /// Table pre-computation time for reduced-LS rows, zero otherwise.
    pub precompute: f64,
    pub throughput: Throughput,
}

pub fn bench_path(cfg: &RunConfig) -> PathBuf {
    cfg.output.dir.join(format!("{}_bench.csv", cfg.name))
}

pub fn precompute_bench_path(cfg: &RunConfig) -> PathBuf {
    cfg.output.dir.join(format!("{}_precompute.csv", cfg.name))
}

/// Twists at seeded random times along the canonical profile.
pub fn seeded_twists(seed: u64, count: usize) -> Vec<VelocityTwist> {
    let profile = VelocityProfile::canonical();
    let t0 = profile.knots[0][0];
    let d = profile.duration();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let twists: Vec<_> = (0..count).map(|_| profile.at(t0 + d * rng.random::<f64>())).collect();
    if twists.iter().all(|t| *t == VelocityTwist::default()) {
        return bench_twists(&profile, count);
    }
    twists
}

pub fn bench(cfg: &RunConfig) -> Result<Vec<BenchRow>, CliError> {
    let b = cfg.bench.clone().unwrap_or_else(BenchSection::default);
    let params = cfg.params()?;
    let spec = cfg.surface_spec()?;
    let twists = seeded_twists(cfg.seed, b.twists);
    let bc = b.bench_config();
    let mut rows = Vec::new();
    println!(
        "{:<18} {:>4} {:>14} {:>14} {:>14} {:>14}",
        "model", "n", "pre-compute s", "mean it/s", "min it/s", "max it/s"
    );
    for &n in &b.ns {
        for &model in &b.models {
            let opts = ModelOptions { n, ..model_options(cfg) };
            let start = Instant::now();
            let m = FrictionModel::new(model, &spec, params, cfg.normal_force, &opts)?;
            let precompute = if model == ModelKind::ReducedLs { start.elapsed().as_secs_f64() } else { 0.0 };
            let throughput = measure_throughput(&m, &twists, &bc)?;
            let (lo, hi) = min_max(&throughput.runs);
            println!(
                "{:<18} {n:>4} {precompute:>14.3e} {:>14.4e} {lo:>14.4e} {hi:>14.4e}",
                model.name(),
                throughput.mean
            );
            rows.push(BenchRow { model, n, n_ls: cfg.grid.n_ls, precompute, throughput });
        }
        let dist = rows.iter().find(|r| r.n == n && r.model == ModelKind::Distributed);
        for red in rows.iter().filter(|r| r.n == n && r.model != ModelKind::Distributed) {
            if let Some(d) = dist {
                println!("{:<18} {n:>4} speedup {:.1}x", red.model.name(), red.throughput.mean / d.throughput.mean);
            }
        }
    }
    let path = bench_path(cfg);
    write_atomic(&path, |w| {
        writeln!(w, "{BENCH_HEADER}")?;
        for r in &rows {
            let (lo, hi) = min_max(&r.throughput.runs);
            let runs: Vec<String> = r.throughput.runs.iter().map(|v| format!("{v:.6e}")).collect();
            writeln!(
                w,
                "{},{},{},{:.6e},{:.6e},{lo:.6e},{hi:.6e},{}",
                r.model.name(),
                r.n,
                r.n_ls,
                r.precompute,
                r.throughput.mean,
                runs.join(";")
            )?;
        }
        Ok(())
    })?;
    println!("table              {}", path.display());

    if !b.precompute_n_ls.is_empty() {
        let grid = discretize(&spec, cfg.grid.n, cfg.normal_force)?;
        let mut times = Vec::new();
        for &n_ls in &b.precompute_n_ls {
            let start = Instant::now();
            let table = LimitSurfaceTable::precompute(&grid, n_ls)?;
            let secs = start.elapsed().as_secs_f64();
            println!("pre-compute        n_ls = {n_ls:>3}, {:>6} cells, {secs:.3e} s", table.cell_count());
            times.push((n_ls, table.cell_count(), secs));
        }
        let path = precompute_bench_path(cfg);
        write_atomic(&path, |w| {
            writeln!(w, "{PRECOMPUTE_HEADER}")?;
            for (n_ls, cells, secs) in &times {
                writeln!(w, "{},{n_ls},{cells},{secs:.6e}", cfg.grid.n)?;
            }
            Ok(())
        })?;
        println!("table              {}", path.display());
    }
    Ok(rows)
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)))
}
