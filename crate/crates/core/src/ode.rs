//! Explicit ODE integration: classical RK4 and Dormand-Prince 5(4) with dense output.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, FrictionError, Result};

/// Integration mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum IntegratorConfig {
    FixedStep { dt: f64 },
    Adaptive { abs_tol: f64, rel_tol: f64, max_step: f64 },
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self::Adaptive { abs_tol: 1e-8, rel_tol: 1e-6, max_step: 1e-3 }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::FixedStep { dt } => ensure(dt > 0.0 && dt.is_finite(), || format!("dt must be > 0, got {dt}")),
            Self::Adaptive { abs_tol, rel_tol, max_step } => ensure(
                abs_tol > 0.0 && rel_tol > 0.0 && max_step > 0.0,
                || format!("tolerances and max_step must be > 0, got {abs_tol}, {rel_tol}, {max_step}"),
            ),
        }
    }
}

/// Step counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

// Dormand-Prince coefficients.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Stateful integrator that can be advanced segment by segment.
///
/// Piecewise-constant inputs are handled by advancing to each switching time
/// and changing the right-hand side between calls; the adaptive step size is
/// carried over.
#[derive(Debug, Clone)]
pub struct Solver {
    config: IntegratorConfig,
    h: Option<f64>,
    k: Vec<Vec<f64>>,
    y_tmp: Vec<f64>,
    y_new: Vec<f64>,
    pub stats: SolverStats,
}

impl Solver {
    pub fn new(config: IntegratorConfig, dim: usize) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            h: None,
            k: vec![vec![0.0; dim]; 7],
            y_tmp: vec![0.0; dim],
            y_new: vec![0.0; dim],
            stats: SolverStats::default(),
        })
    }

    pub fn config(&self) -> IntegratorConfig {
        self.config
    }

    /// Advances `(t, y)` to `t_end`, calling `observe` at every time in `outputs`
    /// that lies in `(t, t_end]` (sorted ascending).
    pub fn advance<F, O>(
        &mut self,
        rhs: &mut F,
        t: &mut f64,
        y: &mut [f64],
        t_end: f64,
        outputs: &[f64],
        observe: &mut O,
    ) -> Result<()>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
        O: FnMut(f64, &[f64]) -> Result<()>,
    {
        ensure(y.len() == self.y_tmp.len(), || "state dimension mismatch".into())?;
        if t_end <= *t {
            return Ok(());
        }
        match self.config {
            IntegratorConfig::FixedStep { dt } => self.advance_rk4(rhs, t, y, t_end, dt, outputs, observe),
            IntegratorConfig::Adaptive { abs_tol, rel_tol, max_step } => {
                self.advance_dopri(rhs, t, y, t_end, abs_tol, rel_tol, max_step, outputs, observe)
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn advance_rk4<F, O>(
        &mut self,
        rhs: &mut F,
        t: &mut f64,
        y: &mut [f64],
        t_end: f64,
        dt: f64,
        outputs: &[f64],
        observe: &mut O,
    ) -> Result<()>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
        O: FnMut(f64, &[f64]) -> Result<()>,
    {
        let t_start = *t;
        let mut out_iter = outputs.iter().copied().filter(move |&o| o > t_start && o <= t_end).peekable();
        let t0 = *t;
        let tiny = 1e-9 * dt;
        let mut s = 0usize;
        while *t < t_end - tiny {
            let mut grid_next = t0 + (s + 1) as f64 * dt;
            if grid_next > t_end - tiny {
                grid_next = t_end;
            }
            let target = match out_iter.peek() {
                Some(&o) if o < grid_next - tiny => o,
                _ => grid_next,
            };
            self.rk4_step(rhs, *t, target - *t, y);
            if !y.iter().all(|v| v.is_finite()) {
                return Err(FrictionError::NonFinite { time: target });
            }
            *t = target;
            if target == grid_next {
                s += 1;
            }
            while let Some(&o) = out_iter.peek() {
                if o <= *t + tiny {
                    observe(o, y)?;
                    out_iter.next();
                } else {
                    break;
                }
            }
        }
        *t = t_end;
        Ok(())
    }

    fn rk4_step<F>(&mut self, rhs: &mut F, t: f64, h: f64, y: &mut [f64])
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        let n = y.len();
        let [k1, k2, k3, k4, ..] = &mut self.k[..] else { unreachable!() };
        rhs(t, y, k1);
        for i in 0..n {
            self.y_tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        rhs(t + 0.5 * h, &self.y_tmp, k2);
        for i in 0..n {
            self.y_tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        rhs(t + 0.5 * h, &self.y_tmp, k3);
        for i in 0..n {
            self.y_tmp[i] = y[i] + h * k3[i];
        }
        rhs(t + h, &self.y_tmp, k4);
        for i in 0..n {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        self.stats.accepted += 1;
        self.stats.rhs_evals += 4;
    }

    #[allow(clippy::too_many_arguments)]
    fn advance_dopri<F, O>(
        &mut self,
        rhs: &mut F,
        t: &mut f64,
        y: &mut [f64],
        t_end: f64,
        atol: f64,
        rtol: f64,
        max_step: f64,
        outputs: &[f64],
        observe: &mut O,
    ) -> Result<()>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
        O: FnMut(f64, &[f64]) -> Result<()>,
    {
        let n = y.len();
        let t_start = *t;
        let mut out_iter = outputs.iter().copied().filter(move |&o| o > t_start && o <= t_end).peekable();
        let mut dense = vec![0.0; n];
        let mut k1 = std::mem::take(&mut self.k[0]);
        rhs(*t, y, &mut k1);
        self.stats.rhs_evals += 1;
        let mut h = match self.h {
            Some(h) => h,
            None => initial_step(y, &k1, atol, rtol, max_step),
        }
        .min(max_step);

        let result = loop {
            if *t >= t_end {
                break Ok(());
            }
            let remaining = t_end - *t;
            let last = h >= remaining * (1.0 - 1e-12);
            let h_try = if last { remaining } else { h };
            let min_step = 1e-14 * t.abs().max(1.0);
            if h_try < min_step && !last {
                break Err(FrictionError::StiffnessLimit { time: *t, step: h_try });
            }

            let (err, ok) = self.dopri_trial(rhs, *t, h_try, y, &k1, atol, rtol);
            if ok && err <= 1.0 {
                // dense output for requested times inside the step
                let t_old = *t;
                let t_new = if last { t_end } else { t_old + h_try };
                while let Some(&o) = out_iter.peek() {
                    if o <= t_new {
                        let theta = ((o - t_old) / h_try).clamp(0.0, 1.0);
                        self.interpolate(y, &k1, h_try, theta, &mut dense);
                        if let Err(e) = observe(o, &dense) {
                            self.k[0] = k1;
                            return Err(e);
                        }
                        out_iter.next();
                    } else {
                        break;
                    }
                }
                y.copy_from_slice(&self.y_new);
                k1.copy_from_slice(&self.k[6]);
                *t = t_new;
                self.stats.accepted += 1;
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last {
                    h = (h_try * fac).min(max_step);
                }
            } else {
                self.stats.rejected += 1;
                let fac = if ok { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.25 };
                h = h_try * fac;
                if h < min_step {
                    break if ok {
                        Err(FrictionError::StiffnessLimit { time: *t, step: h })
                    } else {
                        Err(FrictionError::NonFinite { time: *t })
                    };
                }
            }
        };
        self.h = Some(h);
        self.k[0] = k1;
        result
    }

    /// One Dormand-Prince trial step. Leaves stages in `self.k[1..7]` (`k[6]` = f(t+h, y_new))
    /// and the candidate in `self.y_new`; returns the scaled error norm and a finiteness flag.
    #[allow(clippy::too_many_arguments)]
    fn dopri_trial<F>(&mut self, rhs: &mut F, t: f64, h: f64, y: &[f64], k1: &[f64], atol: f64, rtol: f64) -> (f64, bool)
    where
        F: FnMut(f64, &[f64], &mut [f64]),
    {
        let n = y.len();
        let (_, ks) = self.k.split_at_mut(1);
        let [k2, k3, k4, k5, k6, k7] = ks else { unreachable!() };
        let yt = &mut self.y_tmp;
        for i in 0..n {
            yt[i] = y[i] + h * A21 * k1[i];
        }
        rhs(t + C2 * h, yt, k2);
        for i in 0..n {
            yt[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        rhs(t + C3 * h, yt, k3);
        for i in 0..n {
            yt[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        rhs(t + C4 * h, yt, k4);
        for i in 0..n {
            yt[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        rhs(t + C5 * h, yt, k5);
        for i in 0..n {
            yt[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        rhs(t + h, yt, k6);
        for i in 0..n {
            self.y_new[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        rhs(t + h, &self.y_new, k7);
        self.stats.rhs_evals += 6;

        let mut acc = 0.0;
        let mut finite = true;
        for i in 0..n {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = atol + rtol * y[i].abs().max(self.y_new[i].abs());
            let r = e / sc;
            acc += r * r;
            finite &= self.y_new[i].is_finite() && k7[i].is_finite();
        }
        let err = (acc / n.max(1) as f64).sqrt();
        (err, finite && err.is_finite())
    }

    /// Continuous extension of the accepted step at fraction `theta`.
    fn interpolate(&self, y: &[f64], k1: &[f64], h: f64, theta: f64, out: &mut [f64]) {
        let [_, _, k3, k4, k5, k6, k7] = &self.k[..] else { unreachable!() };
        let t1 = 1.0 - theta;
        for i in 0..y.len() {
            let ydiff = self.y_new[i] - y[i];
            let bspl = h * k1[i] - ydiff;
            let r4 = ydiff - h * k7[i] - bspl;
            let r5 = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            out[i] = y[i] + theta * (ydiff + t1 * (bspl + theta * (r4 + t1 * r5)));
        }
    }
}

fn initial_step(y: &[f64], f: &[f64], atol: f64, rtol: f64, max_step: f64) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..y.len() {
        let sc = atol + rtol * y[i].abs();
        d0 += (y[i] / sc).powi(2);
        d1 += (f[i] / sc).powi(2);
    }
    let n = y.len().max(1) as f64;
    let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(max_step).max(1e-10)
}

/// Integrates `y' = rhs(t, y)` from `t0` and returns the state at each time in `t_out` (ascending, > t0).
pub fn integrate<F>(mut rhs: F, t0: f64, y0: &[f64], t_out: &[f64], config: IntegratorConfig) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    ensure(t_out.windows(2).all(|w| w[0] < w[1]), || "output times must be increasing".into())?;
    let mut solver = Solver::new(config, y0.len())?;
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut out = Vec::with_capacity(t_out.len());
    if let Some(&t_end) = t_out.last() {
        solver.advance(&mut rhs, &mut t, &mut y, t_end, t_out, &mut |_, ys: &[f64]| {
            out.push(ys.to_vec());
            Ok(())
        })?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(_: f64, y: &[f64], dy: &mut [f64]) {
        dy[0] = -y[0];
    }

    #[test]
    fn exponential_decay_adaptive() {
        let cfg = IntegratorConfig::Adaptive { abs_tol: 1e-10, rel_tol: 1e-8, max_step: 0.1 };
        let ts: Vec<f64> = (1..=20).map(|k| k as f64 * 0.05).collect();
        let out = integrate(decay, 0.0, &[1.0], &ts, cfg).unwrap();
        for (t, y) in ts.iter().zip(&out) {
            assert!((y[0] - (-t).exp()).abs() < 1e-7 * (-t).exp(), "t={t}");
        }
    }

    #[test]
    fn exponential_decay_fixed() {
        let cfg = IntegratorConfig::FixedStep { dt: 1e-2 };
        let out = integrate(decay, 0.0, &[1.0], &[0.5, 1.0], cfg).unwrap();
        assert!((out[1][0] - (-1.0f64).exp()).abs() < 1e-9);
        // output between grid points is landed on exactly
        let out = integrate(decay, 0.0, &[1.0], &[0.333], cfg).unwrap();
        assert!((out[0][0] - (-0.333f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn rk4_order() {
        let err = |dt: f64| {
            let out = integrate(decay, 0.0, &[1.0], &[1.0], IntegratorConfig::FixedStep { dt }).unwrap();
            (out[0][0] - (-1.0f64).exp()).abs()
        };
        let ratio = err(0.1) / err(0.05);
        assert!(ratio > 12.0, "observed ratio {ratio}");
    }

    #[test]
    fn stiff_problem_hits_limit() {
        let blow = |_: f64, y: &[f64], dy: &mut [f64]| dy[0] = y[0] * y[0];
        let cfg = IntegratorConfig::Adaptive { abs_tol: 1e-8, rel_tol: 1e-6, max_step: 1.0 };
        let err = integrate(blow, 0.0, &[1.0], &[2.0], cfg).unwrap_err();
        assert!(matches!(err, FrictionError::StiffnessLimit { .. } | FrictionError::NonFinite { .. }));
    }

    #[test]
    fn invalid_config() {
        assert!(IntegratorConfig::FixedStep { dt: 0.0 }.validate().is_err());
        assert!(IntegratorConfig::Adaptive { abs_tol: 1e-8, rel_tol: -1.0, max_step: 1e-3 }.validate().is_err());
    }
}
