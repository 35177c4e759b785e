use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use planar_friction::LimitSurfaceTable;
use planar_friction_cli::commands::seeded_twists;
use planar_friction_cli::RunConfig;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_planar-friction"))
}

fn run(args: &[&str], cwd: &Path) -> Output {
    bin().args(args).current_dir(cwd).env_remove("PLANAR_FRICTION_THREADS").output().unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const CIRCLE: &str = r#"
name = "circle"
models = ["reduced_ls"]
[surface.shape]
kind = "circle"
radius = 0.01
[grid]
n = 21
n_ls = 20
[scenario]
kind = "kinematic"
duration = 0.2
"#;

#[test]
fn shipped_configs_parse_and_round_trip() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/paper");
    let mut count = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("toml") {
            continue;
        }
        let cfg = RunConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(cfg.name, path.file_stem().unwrap().to_str().unwrap());
        let again = RunConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, again, "{}", path.display());
        cfg.surface_spec().unwrap();
        count += 1;
    }
    assert!(count >= 20, "only {count} configs");
}

#[test]
fn precompute_reports_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "c.toml", CIRCLE);
    let o = run(&["precompute", "--config", "c.toml"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("p_s = (0.000000e0, 0.000000e0)"), "{text}");
    assert!(text.contains("positive = true"), "{text}");
    assert!(text.contains("1600 cells"), "{text}");

    let cache = tmp.path().join("out/circle.lscache");
    let table = LimitSurfaceTable::load(&cache).unwrap();
    assert_eq!(table.n_ls(), 20);
    assert_eq!(table.cell_count(), 4 * 20 * 20);

    let first = std::fs::read(&cache).unwrap();
    let o = run(&["precompute", "--config", "c.toml", "--threads", "1"], tmp.path());
    assert!(o.status.success());
    assert_eq!(first, std::fs::read(&cache).unwrap());
}

#[test]
fn simulate_needs_cache_then_writes_trace() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "c.toml", CIRCLE);
    let o = run(&["simulate", "--config", "c.toml"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("planar-friction precompute --config c.toml"), "{}", stderr(&o));

    assert!(run(&["precompute", "--config", "c.toml", "--out", "res"], tmp.path()).status.success());
    let o = run(&["simulate", "--config", "c.toml", "--out", "res"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("peak |f|"));
    let trace = std::fs::read_to_string(tmp.path().join("res/circle_reduced_ls.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("t,v_x,v_y,omega,f_x,f_y,tau"));
    assert_eq!(lines.count(), 201);
}

#[test]
fn stale_cache_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "c.toml", CIRCLE);
    assert!(run(&["precompute", "--config", "c.toml"], tmp.path()).status.success());
    write(tmp.path(), "c.toml", &CIRCLE.replace("n_ls = 20", "n_ls = 10"));
    let o = run(&["simulate", "--config", "c.toml"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("does not match"), "{}", stderr(&o));
}

#[test]
fn drift_simulation_writes_dynamic_trace() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "d.toml",
        r#"
name = "d"
models = ["reduced_ellipsoid"]
[friction]
preset = "p1"
elasto_plastic = true
[integrator]
mode = "fixed_step"
dt = 1e-4
[scenario]
kind = "drift"
load = "tangential"
duration = 0.05
output_dt = 1e-2
"#,
    );
    let o = run(&["simulate", "--config", "d.toml"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("final pose"));
    let trace = std::fs::read_to_string(tmp.path().join("out/d_reduced_ellipsoid.csv")).unwrap();
    assert!(trace.starts_with("t,x,y,theta,vx,vy,omega,fx,fy,tau,fn\n"));
    assert_eq!(trace.lines().count(), 7);
}

const COMPARE: &str = r#"
name = "cmp"
[surface.shape]
kind = "square"
side = 0.02
[grid]
n = 9
n_ls = 8
[compare]
n_oracle = 9
duration = 0.2
candidates = [
  { label = "self", model = "distributed" },
  { model = "reduced_ls" },
  { model = "reduced_ellipsoid" },
]
"#;

#[test]
fn compare_self_is_zero_and_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "c.toml", COMPARE);
    let o = run(&["compare", "--config", "c.toml"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let path = tmp.path().join("out/cmp_compare.csv");
    let first = std::fs::read_to_string(&path).unwrap();
    let mut lines = first.lines();
    assert_eq!(lines.next(), Some("label,component,nrmse,whisker_low,q1,median,q3,whisker_high,throughput"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 9);
    for row in rows.iter().filter(|r| r[0] == "self") {
        assert_eq!(row[2].parse::<f64>().unwrap(), 0.0);
    }
    for row in &rows {
        let q: Vec<f64> = row[3..8].iter().map(|v| v.parse().unwrap()).collect();
        assert!(q.windows(2).all(|w| w[0] <= w[1]), "{row:?}");
    }
    assert!(run(&["compare", "--config", "c.toml", "--seed", "9"], tmp.path()).status.success());
    assert_eq!(first, std::fs::read_to_string(&path).unwrap());
}

#[test]
fn bench_writes_tables() {
    let tmp = tempfile::tempdir().unwrap();
    write(
        tmp.path(),
        "b.toml",
        r#"
name = "b"
[surface.shape]
kind = "circle"
radius = 0.01
[grid]
n_ls = 6
[bench]
ns = [5, 9]
twists = 50
warmup = 100
iterations = 1000
repetitions = 2
precompute_n_ls = [4, 6]
"#,
    );
    let o = bin()
        .args(["bench", "--config", "b.toml", "--threads", "4"])
        .env("PLANAR_FRICTION_THREADS", "1")
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("speedup"));
    let table = std::fs::read_to_string(tmp.path().join("out/b_bench.csv")).unwrap();
    assert_eq!(table.lines().count(), 5);
    assert!(table.starts_with("model,n,n_ls,precompute_s,mean_it_per_s"));
    let pre = std::fs::read_to_string(tmp.path().join("out/b_precompute.csv")).unwrap();
    assert_eq!(pre.lines().collect::<Vec<_>>()[1..].iter().map(|l| l.split(',').nth(2).unwrap()).collect::<Vec<_>>(), ["64", "144"]);
}

#[test]
fn bench_inputs_follow_seed() {
    assert_eq!(seeded_twists(7, 100), seeded_twists(7, 100));
    assert_ne!(seeded_twists(7, 100), seeded_twists(8, 100));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    write(tmp.path(), "bad.toml", "name = \"bad\"\n[friction]\npreset = \"p9\"\n");
    let o = run(&["compare", "--config", "bad.toml"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown friction preset"));

    let o = run(&["bench", "--config", "missing.toml"], tmp.path());
    assert_eq!(o.status.code(), Some(2));

    write(
        tmp.path(),
        "neg.toml",
        r#"
name = "neg"
models = ["reduced_ellipsoid"]
[surface.shape]
kind = "circle"
radius = 0.01
[scenario]
kind = "gripper"
case = "case2"
normal = { kind = "constant", value = -1.0 }
duration = 0.01
"#,
    );
    let o = run(&["simulate", "--config", "neg.toml"], tmp.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("negative normal force"));

    let o = bin().args(["bench", "--config", "neg.toml"]).env("PLANAR_FRICTION_THREADS", "lots").current_dir(tmp.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
