//! Harmonic pulse envelopes and the segment schedules of the single-loop
//! gate and its compensation pair.
//!
//! Each segment carries the envelope
//!
//! ```text
//! Ω(s) = 0.5π/τ + Σₙ αₙ (nπ/τ) cos(nπ s/τ),   0 ≤ s ≤ τ
//! ```
//!
//! evaluated in segment-local time `s`. The cosine terms integrate to zero
//! over `[0, τ]`, so every segment has area π/2 regardless of the weights.
//! The weights only shape the pulse; the endpoint conditions Ω(0) = Ω(τ) = 0
//! reduce to two linear constraints on the odd and even weights.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::GateParams;

/// Tolerance on the endpoint residuals; matches four-decimal published weights.
pub const CONSTRAINT_TOL: f64 = 1e-3;
pub const DEFAULT_HARMONICS: usize = 4;
pub const MAX_HARMONICS: usize = 16;

/// Harmonic weights `α₁…α_K` and the segment duration `τ` (seconds).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseCoefficients {
    alphas: Vec<f64>,
    tau: f64,
}

impl PulseCoefficients {
    /// Builds a coefficient set without checking the endpoint constraints.
    ///
    /// `K` must be even and in `2..=16`; `tau` must be positive.
    pub fn new(alphas: Vec<f64>, tau: f64) -> Result<Self> {
        let k = alphas.len();
        if k < 2 || !k.is_multiple_of(2) || k > MAX_HARMONICS {
            return Err(Error::InvalidArgument(format!(
                "harmonic count must be even and in 2..={MAX_HARMONICS}, got {k}"
            )));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidArgument(format!("segment duration must be positive, got {tau}")));
        }
        if alphas.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidArgument("harmonic weights must be finite".into()));
        }
        Ok(Self { alphas, tau })
    }

    /// Builds a coefficient set and rejects it if the constraints fail.
    pub fn new_valid(alphas: Vec<f64>, tau: f64) -> Result<Self> {
        let c = Self::new(alphas, tau)?;
        c.ensure_valid()?;
        Ok(c)
    }

    /// The constant-plus-second-harmonic pulse `(0, −0.25, 0, …)`.
    pub fn baseline(tau: f64) -> Self {
        Self { alphas: vec![0.0, -0.25, 0.0, 0.0], tau }
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn harmonics(&self) -> usize {
        self.alphas.len()
    }

    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        Self::new(self.alphas.clone(), tau)
    }

    /// Multiplies `α_k` (1-based) by `factor`, leaving the rest untouched.
    pub fn scaled(&self, k: usize, factor: f64) -> Result<Self> {
        if k == 0 || k > self.alphas.len() {
            return Err(Error::InvalidArgument(format!("weight index {k} out of 1..={}", self.alphas.len())));
        }
        let mut alphas = self.alphas.clone();
        alphas[k - 1] *= factor;
        Self::new(alphas, self.tau)
    }

    pub fn validate(&self) -> CoefficientCheck {
        validate_coefficients(self)
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let check = self.validate();
        if check.passed {
            Ok(())
        } else {
            Err(Error::InvalidCoefficients { odd: check.odd_residual, even: check.even_residual })
        }
    }

    /// Envelope times τ at scaled local time `s = t_local/τ`.
    #[inline]
    pub(crate) fn scaled_envelope(&self, s: f64) -> f64 {
        scaled_envelope(&self.alphas, s)
    }
}

#[inline]
fn scaled_envelope(alphas: &[f64], s: f64) -> f64 {
    let mut acc = 0.5 * PI;
    for (i, a) in alphas.iter().enumerate() {
        let n = (i + 1) as f64;
        acc += a * n * PI * (n * PI * s).cos();
    }
    acc
}

/// Envelope `Ω(t_local)` in rad/s.
///
/// Panics if `t_local` lies outside `[0, τ]`.
pub fn envelope(coeffs: &PulseCoefficients, t_local: f64) -> f64 {
    let tau = coeffs.tau;
    assert!(
        t_local >= -1e-12 * tau && t_local <= tau * (1.0 + 1e-12),
        "local time {t_local} outside [0, {tau}]"
    );
    coeffs.scaled_envelope(t_local / tau) / tau
}

/// Residuals of the endpoint constraints.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientCheck {
    /// `Σ (2k−1)·α_{2k−1}`
    pub odd_residual: f64,
    /// `Σ (2k)·α_{2k} + 0.5`
    pub even_residual: f64,
    pub passed: bool,
}

impl CoefficientCheck {
    pub fn max_residual(&self) -> f64 {
        self.odd_residual.abs().max(self.even_residual.abs())
    }
}

fn weighted_sums(alphas: &[f64]) -> (f64, f64) {
    alphas.iter().enumerate().fold((0.0, 0.0), |(odd, even), (i, a)| {
        let n = (i + 1) as f64;
        if (i + 1) % 2 == 1 {
            (odd + n * a, even)
        } else {
            (odd, even + n * a)
        }
    })
}

pub fn validate_coefficients(coeffs: &PulseCoefficients) -> CoefficientCheck {
    let (odd, even) = weighted_sums(&coeffs.alphas);
    let even_residual = even + 0.5;
    CoefficientCheck {
        odd_residual: odd,
        even_residual,
        passed: odd.abs() <= CONSTRAINT_TOL && even_residual.abs() <= CONSTRAINT_TOL,
    }
}

/// Even-weight constraint in the compensation-pulse form `Σ k·α_{2k} = −0.25`.
///
/// Returns the residual and whether it is within half the standard tolerance,
/// which makes it equivalent to the standard check.
pub fn compensation_even_check(alphas: &[f64]) -> (f64, bool) {
    let r: f64 = alphas
        .iter()
        .enumerate()
        .filter(|(i, _)| (i + 1) % 2 == 0)
        .map(|(i, a)| i.div_ceil(2) as f64 * a)
        .sum::<f64>()
        + 0.25;
    (r, r.abs() <= 0.5 * CONSTRAINT_TOL)
}

/// Completes `free = (α₁ … α_{K−2})` by solving the endpoint constraints for
/// `α_{K−1}` and `α_K`.
pub fn repair_coefficients(free: &[f64], harmonics: usize, tau: f64) -> Result<PulseCoefficients> {
    if harmonics < 4 || !harmonics.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "constraint repair needs an even harmonic count ≥ 4, got {harmonics}"
        )));
    }
    if free.len() != harmonics - 2 {
        return Err(Error::InvalidArgument(format!(
            "expected {} free weights for K = {harmonics}, got {}",
            harmonics - 2,
            free.len()
        )));
    }
    let (odd, even) = weighted_sums(free);
    let mut alphas = free.to_vec();
    alphas.push(-odd / (harmonics - 1) as f64);
    alphas.push((-0.5 - even) / harmonics as f64);
    PulseCoefficients::new(alphas, tau)
}

/// One pulse pair of the loop, active on `[start, start + duration]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: f64,
    pub duration: f64,
    pub mixing_theta: f64,
    pub phi0: f64,
    pub phi1: f64,
    pub coefficients: PulseCoefficients,
}

impl Segment {
    pub fn end(&self) -> f64 {
        self.start + self.duration
    }

    /// Rabi pair at segment-local time, in units of 1/τ.
    #[inline]
    pub(crate) fn scaled_rabi_pair(&self, s: f64) -> (C64, C64) {
        let env = self.coefficients.scaled_envelope(s);
        let (sin, cos) = (self.mixing_theta / 2.0).sin_cos();
        (
            C64::from_polar(1.0, self.phi0) * (2.0 * sin * env),
            C64::from_polar(1.0, self.phi1) * (-2.0 * cos * env),
        )
    }
}

/// Contiguous sequence of 2 (bare gate) or 4 (with compensation) segments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSchedule")]
pub struct PulseSchedule {
    segments: Vec<Segment>,
    total_duration: f64,
}

#[derive(Deserialize)]
struct RawSchedule {
    segments: Vec<Segment>,
    #[allow(dead_code)]
    total_duration: Option<f64>,
}

impl TryFrom<RawSchedule> for PulseSchedule {
    type Error = Error;
    fn try_from(raw: RawSchedule) -> Result<Self> {
        PulseSchedule::from_segments(raw.segments)
    }
}

impl PulseSchedule {
    /// Checks segment count, contiguity and `duration = τ` for every segment.
    pub fn from_segments(segments: Vec<Segment>) -> Result<Self> {
        if segments.len() != 2 && segments.len() != 4 {
            return Err(Error::InvalidArgument(format!("schedule needs 2 or 4 segments, got {}", segments.len())));
        }
        let mut cursor = segments[0].start;
        if cursor != 0.0 {
            return Err(Error::InvalidArgument("schedule must start at t = 0".into()));
        }
        for (i, seg) in segments.iter().enumerate() {
            let tol = 1e-12 * seg.duration.abs().max(cursor.abs());
            if (seg.start - cursor).abs() > tol {
                return Err(Error::InvalidArgument(format!("segment {i} is not contiguous")));
            }
            if (seg.duration - seg.coefficients.tau()).abs() > 1e-15 * seg.duration.abs() {
                return Err(Error::InvalidArgument(format!("segment {i} duration differs from its τ")));
            }
            cursor = seg.end();
        }
        let total_duration = segments.iter().map(|s| s.duration).sum();
        Ok(Self { segments, total_duration })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.total_duration
    }

    pub fn is_compensated(&self) -> bool {
        self.segments.len() == 4
    }

    /// Index of the segment that covers `t`; boundaries belong to the later segment.
    pub fn segment_index(&self, t: f64) -> Option<usize> {
        let tol = 1e-12 * self.total_duration;
        if t < -tol || t > self.total_duration + tol {
            return None;
        }
        let idx = self.segments.iter().rposition(|s| t >= s.start - tol).unwrap_or(0);
        Some(idx)
    }

    /// Largest `max(|Ω₀|, |Ω₁|)` over a uniform sampling of every segment, in rad/s.
    pub fn peak_rabi_magnitude(&self, samples_per_segment: usize) -> f64 {
        let n = samples_per_segment.max(2);
        self.segments
            .iter()
            .flat_map(|seg| {
                (0..=n).map(move |i| {
                    let (o0, o1) = seg.scaled_rabi_pair(i as f64 / n as f64);
                    o0.norm().max(o1.norm()) / seg.duration
                })
            })
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Drive phases `(φ₀, φ₁)` of the two gate segments.
fn gate_phases(gate: &GateParams) -> [(f64, f64); 2] {
    let GateParams { phi, beta, .. } = *gate;
    [(-phi, 0.0), (-phi + beta + PI, beta + PI)]
}

/// Drive phases of the two compensation segments.
fn compensation_phases(gate: &GateParams) -> [(f64, f64); 2] {
    [(-(PI + gate.phi), 0.0), (-gate.phi, PI)]
}

fn make_segments(
    theta: f64,
    phases: [(f64, f64); 2],
    coeffs: &PulseCoefficients,
    first_start: f64,
) -> [Segment; 2] {
    let tau = coeffs.tau();
    let mk = |k: usize| Segment {
        start: first_start + k as f64 * tau,
        duration: tau,
        mixing_theta: theta,
        phi0: phases[k].0,
        phi1: phases[k].1,
        coefficients: coeffs.clone(),
    };
    [mk(0), mk(1)]
}

/// The two gate segments over `[0, τ]` and `[τ, 2τ]`.
pub fn gate_schedule(gate: &GateParams, coeffs: &PulseCoefficients) -> Result<PulseSchedule> {
    coeffs.ensure_valid()?;
    Ok(build_schedule(gate, coeffs, None))
}

/// The compensation pair over `[2τ, 3τ]` and `[3τ, 4τ]`, with mixing angle
/// `π − θ` and weights `α′ₙ = αₙ`.
///
/// The returned schedule holds only the two compensation segments, starting
/// at `2τ`; use [`compensated_schedule`] for the full four-segment loop.
pub fn compensation_schedule(gate: &GateParams, coeffs: &PulseCoefficients) -> Result<Vec<Segment>> {
    coeffs.ensure_valid()?;
    Ok(make_segments(PI - gate.theta, compensation_phases(gate), coeffs, 2.0 * coeffs.tau()).to_vec())
}

/// Gate segments followed by the compensation pair.
///
/// `compensation_coeffs` overrides `α′ₙ`; it must share the gate's `τ`.
pub fn compensated_schedule(
    gate: &GateParams,
    coeffs: &PulseCoefficients,
    compensation_coeffs: Option<&PulseCoefficients>,
) -> Result<PulseSchedule> {
    coeffs.ensure_valid()?;
    let comp = compensation_coeffs.unwrap_or(coeffs);
    comp.ensure_valid()?;
    if comp.tau() != coeffs.tau() {
        return Err(Error::InvalidArgument("compensation pulses must share the gate's τ".into()));
    }
    Ok(build_schedule(gate, coeffs, Some(comp)))
}

/// Builds a 2- or 4-segment schedule without checking the endpoint
/// constraints (used to model amplitude miscalibration).
pub fn build_schedule(
    gate: &GateParams,
    coeffs: &PulseCoefficients,
    compensation: Option<&PulseCoefficients>,
) -> PulseSchedule {
    let mut segments = make_segments(gate.theta, gate_phases(gate), coeffs, 0.0).to_vec();
    if let Some(comp) = compensation {
        segments.extend(make_segments(PI - gate.theta, compensation_phases(gate), comp, 2.0 * coeffs.tau()));
    }
    let total_duration = segments.iter().map(|s| s.duration).sum();
    PulseSchedule { segments, total_duration }
}

/// Complex Rabi pair `(Ω₀, Ω₁)` at absolute time `t`, in rad/s.
pub fn rabi_pair(schedule: &PulseSchedule, t: f64) -> Result<(C64, C64)> {
    let idx = schedule
        .segment_index(t)
        .ok_or_else(|| Error::InvalidArgument(format!("t = {t} outside schedule")))?;
    let seg = &schedule.segments[idx];
    let s = ((t - seg.start) / seg.duration).clamp(0.0, 1.0);
    let (o0, o1) = seg.scaled_rabi_pair(s);
    Ok((o0 / seg.duration, o1 / seg.duration))
}
