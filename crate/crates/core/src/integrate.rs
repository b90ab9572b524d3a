//! Explicit Runge–Kutta integrators for small fixed-size states.
//!
//! [`DormandPrince`] is the adaptive 5(4) pair with FSAL and a plain
//! I-controller; [`rk4_fixed`] is the classical fixed-step method used as an
//! independent reference.

use crate::quantum::Complex3x3;

/// Minimal vector-space interface the integrators need.
pub trait OdeState: Copy {
    /// `self + h·k`
    fn axpy(&self, h: f64, k: &Self) -> Self;
    /// Weighted RMS of `err` relative to `atol + rtol·max(|y0|, |y1|)`.
    fn error_norm(err: &Self, y0: &Self, y1: &Self, atol: f64, rtol: f64) -> f64;
    fn lincomb(terms: &[(f64, &Self)]) -> Self;
}

impl OdeState for Complex3x3 {
    #[inline]
    fn axpy(&self, h: f64, k: &Self) -> Self {
        let mut out = *self;
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] += k.0[i][j] * h;
            }
        }
        out
    }

    fn error_norm(err: &Self, y0: &Self, y1: &Self, atol: f64, rtol: f64) -> f64 {
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let e = err.0[i][j];
                let a = y0.0[i][j];
                let b = y1.0[i][j];
                let sre = atol + rtol * a.re.abs().max(b.re.abs());
                let sim = atol + rtol * a.im.abs().max(b.im.abs());
                acc += (e.re / sre).powi(2) + (e.im / sim).powi(2);
            }
        }
        (acc / 18.0).sqrt()
    }

    #[inline]
    fn lincomb(terms: &[(f64, &Self)]) -> Self {
        let mut out = Complex3x3::zeros();
        for (w, m) in terms {
            if *w == 0.0 {
                continue;
            }
            for i in 0..3 {
                for j in 0..3 {
                    out.0[i][j] += m.0[i][j] * *w;
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptiveConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Smallest step, relative to the interval length, before giving up.
    pub min_step_fraction: f64,
    pub max_steps: usize,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-9, abs_tol: 1e-12, max_step: f64::INFINITY, min_step_fraction: 1e-14, max_steps: 1_000_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepFailure {
    pub time: f64,
    pub reason: &'static str,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub last_step: f64,
}

// Dormand–Prince 5(4) tableau.
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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

pub struct DormandPrince {
    cfg: AdaptiveConfig,
}

impl DormandPrince {
    pub fn new(cfg: AdaptiveConfig) -> Self {
        Self { cfg }
    }

    /// Integrates `y' = f(t, y)` from `t0` to `t1`.
    ///
    /// `h_init` seeds the first trial step; pass the previous call's
    /// `stats.last_step` to continue smoothly across sampling points.
    pub fn integrate<S, F>(
        &self,
        mut f: F,
        t0: f64,
        t1: f64,
        y0: S,
        h_init: Option<f64>,
    ) -> Result<(S, IntegrationStats), StepFailure>
    where
        S: OdeState,
        F: FnMut(f64, &S) -> S,
    {
        let span = t1 - t0;
        let mut stats = IntegrationStats::default();
        if span <= 0.0 {
            return Ok((y0, stats));
        }
        let cfg = &self.cfg;
        let h_min = cfg.min_step_fraction * span.max(t0.abs()).max(f64::MIN_POSITIVE);
        let h_max = cfg.max_step.min(span);
        let mut h = h_init.unwrap_or(h_max * 0.01).min(h_max).max(h_min);

        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        while t < t1 {
            if stats.accepted + stats.rejected >= cfg.max_steps {
                return Err(StepFailure { time: t, reason: "maximum step count exceeded" });
            }
            let last = t + h >= t1 - 1e-14 * span;
            if last {
                h = t1 - t;
            }
            let k2 = f(t + C2 * h, &y.axpy(h * A21, &k1));
            let k3 = f(t + C3 * h, &S::lincomb(&[(1.0, &y), (h * A31, &k1), (h * A32, &k2)]));
            let k4 = f(t + C4 * h, &S::lincomb(&[(1.0, &y), (h * A41, &k1), (h * A42, &k2), (h * A43, &k3)]));
            let k5 = f(
                t + C5 * h,
                &S::lincomb(&[(1.0, &y), (h * A51, &k1), (h * A52, &k2), (h * A53, &k3), (h * A54, &k4)]),
            );
            let k6 = f(
                t + h,
                &S::lincomb(&[
                    (1.0, &y),
                    (h * A61, &k1),
                    (h * A62, &k2),
                    (h * A63, &k3),
                    (h * A64, &k4),
                    (h * A65, &k5),
                ]),
            );
            let y_new =
                S::lincomb(&[(1.0, &y), (h * B1, &k1), (h * B3, &k3), (h * B4, &k4), (h * B5, &k5), (h * B6, &k6)]);
            let k7 = f(t + h, &y_new);
            let err = S::lincomb(&[(h * E1, &k1), (h * E3, &k3), (h * E4, &k4), (h * E5, &k5), (h * E6, &k6), (h * E7, &k7)]);
            let en = S::error_norm(&err, &y, &y_new, cfg.abs_tol, cfg.rel_tol);
            if !en.is_finite() {
                return Err(StepFailure { time: t, reason: "non-finite state" });
            }
            let factor = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
            if en <= 1.0 {
                t = if last { t1 } else { t + h };
                y = y_new;
                k1 = k7;
                stats.accepted += 1;
                stats.last_step = h;
                h = (h * factor).min(h_max);
            } else {
                stats.rejected += 1;
                h *= factor.min(1.0);
                if h < h_min {
                    return Err(StepFailure { time: t, reason: "step size underflow" });
                }
            }
        }
        Ok((y, stats))
    }
}

/// Classical RK4 with `steps` equal steps over `[t0, t1]`.
pub fn rk4_fixed<S, F>(mut f: F, t0: f64, t1: f64, y0: S, steps: usize) -> S
where
    S: OdeState,
    F: FnMut(f64, &S) -> S,
{
    let h = (t1 - t0) / steps as f64;
    let mut y = y0;
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        let k1 = f(t, &y);
        let k2 = f(t + 0.5 * h, &y.axpy(0.5 * h, &k1));
        let k3 = f(t + 0.5 * h, &y.axpy(0.5 * h, &k2));
        let k4 = f(t + h, &y.axpy(h, &k3));
        y = S::lincomb(&[(1.0, &y), (h / 6.0, &k1), (h / 3.0, &k2), (h / 3.0, &k3), (h / 6.0, &k4)]);
    }
    y
}
