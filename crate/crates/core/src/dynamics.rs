//! Lindblad evolution of the Λ system under a pulse schedule.
//!
//! Time is measured in units of the segment duration τ inside the
//! integrator, so microsecond REI pulses and nanosecond transmon pulses see
//! the same step-size scale. Each segment is integrated separately because the
//! drive phases jump at segment boundaries.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::{rk4_fixed, AdaptiveConfig, DormandPrince};
use crate::pulse::{PulseSchedule, Segment};
use crate::quantum::{
    gate_unitary, hamiltonian, Complex3x3, DensityMatrix, GateParams, PureState3, QubitState, IDX_0, IDX_1, IDX_E,
};

/// Form of the `σ₂` dephasing operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sigma2Variant {
    /// `|e⟩⟨e| − |0⟩⟨0| − |1⟩⟨1|` (Λ configuration)
    LambdaRei,
    /// `2|e⟩⟨e| − |0⟩⟨0| − |1⟩⟨1|` (transmon ladder)
    TransmonLadder,
}

/// Decoherence rates in rad/s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceProfile {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub sigma2_variant: Sigma2Variant,
}

impl DecoherenceProfile {
    pub fn new(gamma1: f64, gamma2: f64, sigma2_variant: Sigma2Variant) -> Result<Self> {
        let p = Self { gamma1, gamma2, gamma3: 0.0, sigma2_variant };
        p.check()?;
        Ok(p)
    }

    pub fn lossless(sigma2_variant: Sigma2Variant) -> Self {
        Self { gamma1: 0.0, gamma2: 0.0, gamma3: 0.0, sigma2_variant }
    }

    pub fn check(&self) -> Result<()> {
        for (name, g) in [("gamma1", self.gamma1), ("gamma2", self.gamma2), ("gamma3", self.gamma3)] {
            if !(g.is_finite() && g >= 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be finite and non-negative, got {g}")));
            }
        }
        Ok(())
    }

    pub fn is_lossless(&self) -> bool {
        self.gamma1 == 0.0 && self.gamma2 == 0.0 && self.gamma3 == 0.0
    }

    /// Jump operators `σ₁, σ₂, σ₃` paired with their rates.
    pub fn jump_operators(&self) -> [(f64, Complex3x3); 3] {
        let sigma1 = Complex3x3::unit(IDX_0, IDX_E) + Complex3x3::unit(IDX_1, IDX_E);
        let excited = match self.sigma2_variant {
            Sigma2Variant::LambdaRei => 1.0,
            Sigma2Variant::TransmonLadder => 2.0,
        };
        let mut diag = [0.0; 3];
        diag[IDX_0] = -1.0;
        diag[IDX_E] = excited;
        diag[IDX_1] = -1.0;
        let sigma2 = Complex3x3::from_real_diag(diag);
        let sigma3 = Complex3x3::unit(IDX_0, IDX_1);
        [(self.gamma1, sigma1), (self.gamma2, sigma2), (self.gamma3, sigma3)]
    }
}

/// Precomputed dissipator pieces: `(Γ/2, L, L†, L†L)` for every active channel.
#[derive(Clone, Debug)]
struct Dissipator {
    channels: Vec<(f64, Complex3x3, Complex3x3, Complex3x3)>,
}

impl Dissipator {
    fn new(profile: &DecoherenceProfile, rate_scale: f64) -> Self {
        let channels = profile
            .jump_operators()
            .into_iter()
            .filter(|(g, _)| *g > 0.0)
            .map(|(g, l)| {
                let ld = l.dagger();
                (0.5 * g * rate_scale, l, ld, ld * l)
            })
            .collect();
        Self { channels }
    }

    #[inline]
    fn apply(&self, rho: &Complex3x3, out: &mut Complex3x3) {
        for (half_g, l, ld, ldl) in &self.channels {
            let sandwich = *l * *rho * *ld;
            let anti = *ldl * *rho + *rho * *ldl;
            *out += (sandwich.scale_real(2.0) - anti).scale_real(*half_g);
        }
    }
}

#[inline]
fn rhs_unchecked(rho: &Complex3x3, h: &Complex3x3, diss: &Dissipator) -> Complex3x3 {
    let comm = h.commutator(rho);
    // −i·[H, ρ]
    let mut out = Complex3x3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let z = comm.0[i][j];
            out.0[i][j] = num_complex::Complex64::new(z.im, -z.re);
        }
    }
    diss.apply(rho, &mut out);
    out
}

/// Right-hand side `dρ/dt` of the master equation.
pub fn lindblad_rhs(rho: &DensityMatrix, h: &Complex3x3, profile: &DecoherenceProfile) -> Result<Complex3x3> {
    if !h.is_hermitian(1e-12 * h.max_abs().max(1.0)) {
        return Err(Error::InvalidArgument("Hamiltonian is not Hermitian".into()));
    }
    profile.check()?;
    Ok(rhs_unchecked(rho.matrix(), h, &Dissipator::new(profile, 1.0)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum IntegrationMethod {
    /// Dormand–Prince 5(4) with error control.
    Adaptive,
    /// Classical RK4 with a fixed number of steps per segment.
    FixedRk4 { steps_per_segment: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: IntegrationMethod,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Largest step as a fraction of τ.
    pub max_step_fraction: f64,
    /// Interior samples recorded per segment; boundaries are always recorded.
    pub samples_per_segment: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: IntegrationMethod::Adaptive,
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_step_fraction: 0.01,
            samples_per_segment: 0,
        }
    }
}

impl IntegratorConfig {
    pub fn with_samples(mut self, samples_per_segment: usize) -> Self {
        self.samples_per_segment = samples_per_segment;
        self
    }

    pub fn check(&self) -> Result<()> {
        let ok = self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.max_step_fraction > 0.0;
        if !ok {
            return Err(Error::InvalidArgument("integrator tolerances and max step must be positive".into()));
        }
        if let IntegrationMethod::FixedRk4 { steps_per_segment: 0 } = self.method {
            return Err(Error::InvalidArgument("RK4 needs at least one step per segment".into()));
        }
        Ok(())
    }
}

/// Sampled evolution. `populations` are `(P₀, P_e, P₁)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub populations: Vec<[f64; 3]>,
    pub fidelity_series: Option<Vec<f64>>,
}

impl Trajectory {
    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory holds at least the initial state")
    }

    pub fn final_populations(&self) -> [f64; 3] {
        *self.populations.last().expect("trajectory holds at least the initial state")
    }

    pub fn with_fidelity(mut self, target: &PureState3) -> Self {
        self.fidelity_series = Some(self.states.iter().map(|rho| state_fidelity(rho, target)).collect());
        self
    }

    /// CSV with `time_s,p0,pe,p1,fidelity` and optionally the real and
    /// imaginary parts of all nine density-matrix entries.
    pub fn write_csv<W: Write>(&self, mut w: W, include_matrix: bool) -> Result<()> {
        write!(w, "time_s,p0,pe,p1,fidelity")?;
        if include_matrix {
            for i in 0..3 {
                for j in 0..3 {
                    write!(w, ",re_rho{i}{j},im_rho{i}{j}")?;
                }
            }
        }
        writeln!(w)?;
        for (k, t) in self.times.iter().enumerate() {
            let [p0, pe, p1] = self.populations[k];
            let fid = self.fidelity_series.as_ref().map(|f| f[k]).unwrap_or(f64::NAN);
            write!(w, "{t:e},{p0},{pe},{p1},{fid}")?;
            if include_matrix {
                let m = self.states[k].matrix();
                for i in 0..3 {
                    for j in 0..3 {
                        write!(w, ",{},{}", m.0[i][j].re, m.0[i][j].im)?;
                    }
                }
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Evolves `rho0` through `schedule` at detuning `delta` (rad/s).
pub fn evolve(
    rho0: &DensityMatrix,
    schedule: &PulseSchedule,
    delta: f64,
    profile: &DecoherenceProfile,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    cfg.check()?;
    profile.check()?;
    if !delta.is_finite() {
        return Err(Error::InvalidArgument("detuning must be finite".into()));
    }
    let mut times = vec![0.0];
    let mut states = vec![*rho0];
    let mut rho = *rho0.matrix();
    for seg in schedule.segments() {
        let samples = evolve_segment(&mut rho, seg, delta, profile, cfg)?;
        for (s, m) in samples {
            times.push(seg.start + s * seg.duration);
            states.push(DensityMatrix::from_raw(m));
        }
    }
    let populations = states.iter().map(|s| s.populations()).collect();
    Ok(Trajectory { times, states, populations, fidelity_series: None })
}

/// Final state only; skips the sample bookkeeping.
pub fn evolve_final(
    rho0: &DensityMatrix,
    schedule: &PulseSchedule,
    delta: f64,
    profile: &DecoherenceProfile,
    cfg: &IntegratorConfig,
) -> Result<DensityMatrix> {
    let cfg = IntegratorConfig { samples_per_segment: 0, ..*cfg };
    cfg.check()?;
    profile.check()?;
    let mut rho = *rho0.matrix();
    for seg in schedule.segments() {
        evolve_segment(&mut rho, seg, delta, profile, &cfg)?;
    }
    Ok(DensityMatrix::from_raw(rho))
}

/// Integrates one segment in scaled time `s ∈ [0, 1]`; returns `(s, ρ)` at
/// every interior sample and at `s = 1`.
fn evolve_segment(
    rho: &mut Complex3x3,
    seg: &Segment,
    delta: f64,
    profile: &DecoherenceProfile,
    cfg: &IntegratorConfig,
) -> Result<Vec<(f64, Complex3x3)>> {
    let tau = seg.duration;
    let diss = Dissipator::new(profile, tau);
    let scaled_delta = delta * tau;
    let f = |s: f64, y: &Complex3x3| {
        let (o0, o1) = seg.scaled_rabi_pair(s);
        rhs_unchecked(y, &hamiltonian(o0, o1, scaled_delta), &diss)
    };
    let n = cfg.samples_per_segment + 1;
    let marks: Vec<f64> = (1..=n).map(|i| i as f64 / n as f64).collect();
    let mut out = Vec::with_capacity(n);
    let mut s0 = 0.0;
    match cfg.method {
        IntegrationMethod::Adaptive => {
            let dp = DormandPrince::new(AdaptiveConfig {
                rel_tol: cfg.rel_tol,
                abs_tol: cfg.abs_tol,
                max_step: cfg.max_step_fraction,
                ..Default::default()
            });
            let mut h = None;
            for &s1 in &marks {
                let (y, stats) = dp.integrate(f, s0, s1, *rho, h).map_err(|e| Error::Integrator {
                    time: seg.start + e.time * tau,
                    reason: e.reason.to_string(),
                })?;
                if stats.last_step > 0.0 {
                    h = Some(stats.last_step);
                }
                *rho = y;
                out.push((s1, y));
                s0 = s1;
            }
        }
        IntegrationMethod::FixedRk4 { steps_per_segment } => {
            let per = (steps_per_segment / n).max(1);
            for &s1 in &marks {
                *rho = rk4_fixed(f, s0, s1, *rho, per);
                out.push((s1, *rho));
                s0 = s1;
            }
        }
    }
    Ok(out)
}

/// `Re ⟨ψ|ρ|ψ⟩` clamped to `[0, 1]`.
pub fn state_fidelity(rho: &DensityMatrix, target: &PureState3) -> f64 {
    let a = target.amplitudes();
    rho.matrix().sandwich(a, a).re.clamp(0.0, 1.0)
}

pub fn qubit_state_fidelity(rho: &DensityMatrix, target: &QubitState) -> f64 {
    state_fidelity(rho, &PureState3::from_qubit(target))
}

/// Ideal output `U(θ, φ, β)·ψ_in` on the qubit subspace.
pub fn target_state(gate: &GateParams, psi_in: &QubitState) -> QubitState {
    gate_unitary(gate).apply(psi_in)
}
