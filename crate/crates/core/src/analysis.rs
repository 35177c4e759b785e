//! Error statistics between wrench traces and rate-evaluation throughput.

use std::hint::black_box;
use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::sim::{FrictionModel, VelocityProfile};
use crate::types::{FrictionWrench, VelocityTwist};

/// Per-component RMSE divided by the largest absolute oracle value of that component.
pub fn nrmse(oracle: &[FrictionWrench], candidate: &[FrictionWrench]) -> Result<[f64; 3]> {
    ensure(oracle.len() == candidate.len() && !oracle.is_empty(), || {
        format!("trace lengths differ or are empty: {} vs {}", oracle.len(), candidate.len())
    })?;
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        let mut sq = 0.0;
        let mut peak = 0.0f64;
        for (a, b) in oracle.iter().zip(candidate) {
            let (a, b) = (a.to_array()[k], b.to_array()[k]);
            sq += (a - b) * (a - b);
            peak = peak.max(a.abs());
        }
        let rmse = (sq / oracle.len() as f64).sqrt();
        *o = if peak > 0.0 { rmse / peak } else { rmse };
    }
    Ok(out)
}

/// Absolute error per component and sample.
pub fn abs_errors(oracle: &[FrictionWrench], candidate: &[FrictionWrench]) -> [Vec<f64>; 3] {
    let comp = |k: usize| -> Vec<f64> {
        oracle.iter().zip(candidate).map(|(a, b)| (a.to_array()[k] - b.to_array()[k]).abs()).collect()
    };
    [comp(0), comp(1), comp(2)]
}

/// Box-plot summary. Whiskers are the most extreme samples inside the
/// `1.5 IQR` fences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub whisker_low: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub whisker_high: f64,
}

/// Linear-interpolation quantile (type 7) of sorted data.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl Quantiles {
    pub fn of(data: &[f64]) -> Result<Self> {
        ensure(!data.is_empty(), || "quantiles of empty data".into())?;
        ensure(data.iter().all(|v| !v.is_nan()), || "quantiles of NaN data".into())?;
        let mut s = data.to_vec();
        s.sort_by(f64::total_cmp);
        let (q1, median, q3) = (quantile_sorted(&s, 0.25), quantile_sorted(&s, 0.5), quantile_sorted(&s, 0.75));
        let iqr = q3 - q1;
        let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
        let whisker_low = s.iter().copied().find(|v| *v >= lo_fence).unwrap_or(q1).min(q1);
        let whisker_high = s.iter().rev().copied().find(|v| *v <= hi_fence).unwrap_or(q3).max(q3);
        Ok(Self { whisker_low, q1, median, q3, whisker_high })
    }
}

/// Comparison of one candidate trace against an oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub label: String,
    pub nrmse: [f64; 3],
    pub quantiles: [Quantiles; 3],
    #[serde(default)]
    pub throughput: Option<f64>,
}

pub const REPORT_HEADER: &str =
    "label,component,nrmse,whisker_low,q1,median,q3,whisker_high,throughput";

impl ComparisonReport {
    pub fn new(label: impl Into<String>, oracle: &[FrictionWrench], candidate: &[FrictionWrench]) -> Result<Self> {
        let nrmse = nrmse(oracle, candidate)?;
        let e = abs_errors(oracle, candidate);
        let quantiles = [Quantiles::of(&e[0])?, Quantiles::of(&e[1])?, Quantiles::of(&e[2])?];
        Ok(Self { label: label.into(), nrmse, quantiles, throughput: None })
    }

    /// Writes reports as CSV, one row per component (`f_x`, `f_y`, `tau`).
    pub fn write_csv<W: Write>(reports: &[ComparisonReport], mut out: W) -> Result<()> {
        writeln!(out, "{REPORT_HEADER}")?;
        for r in reports {
            for (k, name) in ["f_x", "f_y", "tau"].iter().enumerate() {
                let q = &r.quantiles[k];
                let tp = r.throughput.map(|v| format!("{v:.6e}")).unwrap_or_default();
                writeln!(
                    out,
                    "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                    r.label, name, r.nrmse[k], q.whisker_low, q.q1, q.median, q.q3, q.whisker_high, tp
                )?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

/// Benchmark settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub warmup: usize,
    pub iterations: usize,
    pub repetitions: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self { warmup: 10_000, iterations: 100_000, repetitions: 10 }
    }
}

/// Rate-evaluation throughput in iterations per second.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Throughput {
    pub runs: Vec<f64>,
    pub mean: f64,
}

/// Twists sampled uniformly in time along a profile, used as benchmark inputs.
pub fn bench_twists(profile: &VelocityProfile, count: usize) -> Vec<VelocityTwist> {
    let d = profile.duration();
    let t0 = profile.knots[0][0];
    (0..count).map(|k| profile.at(t0 + d * k as f64 / count as f64)).collect()
}

/// Times `rate_and_wrench` over `cfg.iterations` calls, cycling through `twists`.
pub fn measure_throughput(model: &FrictionModel, twists: &[VelocityTwist], cfg: &BenchConfig) -> Result<Throughput> {
    ensure(!twists.is_empty(), || "benchmark needs at least one twist".into())?;
    ensure(cfg.iterations > 0 && cfg.repetitions > 0, || "benchmark needs iterations and repetitions".into())?;
    let dim = model.state_len();
    let mut z = vec![0.0; dim];
    let mut dz = vec![0.0; dim];
    let mut run = |count: usize| {
        for k in 0..count {
            let tw = &twists[k % twists.len()];
            let w = model.rate_and_wrench(black_box(tw), black_box(&z), &mut dz);
            black_box(w);
            // feed a tiny fraction of the rate back so the state is not constant
            z[k % dim] += 1e-12 * dz[k % dim];
        }
    };
    run(cfg.warmup);
    let mut runs = Vec::with_capacity(cfg.repetitions);
    for _ in 0..cfg.repetitions {
        let start = Instant::now();
        run(cfg.iterations);
        runs.push(cfg.iterations as f64 / start.elapsed().as_secs_f64().max(1e-12));
    }
    let mean = runs.iter().sum::<f64>() / runs.len() as f64;
    Ok(Throughput { runs, mean })
}
