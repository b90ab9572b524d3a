//! Figures of merit built on repeated evolutions: detuning sweeps,
//! spectator excitation, Bloch-sphere averages, robustness windows and
//! amplitude-error sensitivity.
//!
//! Every grid point is an independent evolution; results keep grid order no
//! matter how the points are scheduled.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve_final, qubit_state_fidelity, target_state, IntegratorConfig};
use crate::error::{Error, Result};
use crate::parallel::par_map;
use crate::pulse::{build_schedule, PulseCoefficients, PulseSchedule};
use crate::quantum::{Complex3x3, DensityMatrix, QubitState, IDX_0, IDX_1};
use crate::systems::{hz_to_angular, DetuningRange, GateName, GateSpec, SystemName, SystemPreset};

/// Schedule the preset applies: 4 segments with compensation, else 2.
///
/// The preset's τ overrides the coefficients' τ. Constraints are not checked
/// so deliberately perturbed weights can be simulated.
pub fn schedule_for(system: &SystemPreset, gate: &GateSpec, coeffs: &PulseCoefficients) -> Result<PulseSchedule> {
    let c = coeffs.with_tau(system.tau)?;
    Ok(build_schedule(&gate.params, &c, system.compensation.then_some(&c)))
}

fn final_state(
    system: &SystemPreset,
    schedule: &PulseSchedule,
    psi_in: &QubitState,
    delta_hz: f64,
    cfg: &IntegratorConfig,
) -> Result<DensityMatrix> {
    evolve_final(&DensityMatrix::from_qubit(psi_in), schedule, hz_to_angular(delta_hz), &system.profile, cfg)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub system: SystemName,
    pub gate: GateName,
    pub coefficients: Vec<f64>,
    pub tau: f64,
    pub compensation: bool,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointFailure {
    pub index: usize,
    pub delta_hz: f64,
    pub message: String,
}

/// Per-detuning final-time results. Failed points hold NaN and are listed in
/// `failures`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub detunings_hz: Vec<f64>,
    pub fidelity: Vec<f64>,
    pub populations: Vec<[f64; 3]>,
    pub p_off: Vec<f64>,
    pub failures: Vec<PointFailure>,
    pub metadata: SweepMetadata,
}

impl SweepResult {
    pub fn len(&self) -> usize {
        self.detunings_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detunings_hz.is_empty()
    }

    /// Mean fidelity over the points inside `window` (all points if `None`).
    pub fn mean_fidelity(&self, window: Option<DetuningRange>) -> f64 {
        mean(self.select(&self.fidelity, window))
    }

    pub fn mean_p_off(&self, window: Option<DetuningRange>) -> f64 {
        mean(self.select(&self.p_off, window))
    }

    pub fn max_p_off(&self) -> f64 {
        self.p_off.iter().copied().filter(|x| x.is_finite()).fold(0.0, f64::max)
    }

    fn select<'a>(&'a self, values: &'a [f64], window: Option<DetuningRange>) -> impl Iterator<Item = f64> + 'a {
        self.detunings_hz
            .iter()
            .zip(values)
            .filter(move |(d, _)| window.is_none_or(|w| **d >= w.lo_hz - 1e-9 && **d <= w.hi_hz + 1e-9))
            .map(|(_, v)| *v)
    }

    /// `delta_hz,fidelity,p0,pe,p1,p_off`
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "delta_hz,fidelity,p0,pe,p1,p_off")?;
        for i in 0..self.len() {
            let [p0, pe, p1] = self.populations[i];
            writeln!(w, "{},{},{},{},{},{}", self.detunings_hz[i], self.fidelity[i], p0, pe, p1, self.p_off[i])?;
        }
        Ok(())
    }
}

fn mean(it: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = it.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

/// Final-time fidelity against the ideal gate output and `P₀ + P_e` for each
/// detuning in `grid_hz`.
pub fn detuning_sweep(
    system: &SystemPreset,
    gate: &GateSpec,
    coeffs: &PulseCoefficients,
    grid_hz: &[f64],
    psi_in: &QubitState,
    cfg: &IntegratorConfig,
) -> Result<SweepResult> {
    let schedule = schedule_for(system, gate, coeffs)?;
    sweep_schedule(system, gate, &schedule, grid_hz, psi_in, cfg)
}

/// [`detuning_sweep`] for a prebuilt schedule, e.g. one with separate
/// compensation weights. The system supplies only the decoherence profile.
pub fn sweep_schedule(
    system: &SystemPreset,
    gate: &GateSpec,
    schedule: &PulseSchedule,
    grid_hz: &[f64],
    psi_in: &QubitState,
    cfg: &IntegratorConfig,
) -> Result<SweepResult> {
    if grid_hz.is_empty() {
        return Err(Error::InvalidArgument("detuning grid is empty".into()));
    }
    system.check()?;
    let target = target_state(&gate.params, psi_in);
    let points = par_map(grid_hz, |&d| final_state(system, schedule, psi_in, d, cfg));
    let first = &schedule.segments()[0];

    let mut out = SweepResult {
        detunings_hz: grid_hz.to_vec(),
        fidelity: Vec::with_capacity(grid_hz.len()),
        populations: Vec::with_capacity(grid_hz.len()),
        p_off: Vec::with_capacity(grid_hz.len()),
        failures: vec![],
        metadata: SweepMetadata {
            system: system.name,
            gate: gate.name,
            coefficients: first.coefficients.alphas().to_vec(),
            tau: first.duration,
            compensation: schedule.is_compensated(),
            seed: None,
        },
    };
    for (index, (res, &d)) in points.into_iter().zip(grid_hz).enumerate() {
        match res {
            Ok(rho) => {
                let p = rho.populations();
                out.fidelity.push(qubit_state_fidelity(&rho, &target));
                out.p_off.push((p[0] + p[1]).clamp(0.0, 1.0));
                out.populations.push(p);
            }
            Err(e) => {
                log::warn!("sweep point {index} (Δ = {d} Hz) failed: {e}");
                out.fidelity.push(f64::NAN);
                out.p_off.push(f64::NAN);
                out.populations.push([f64::NAN; 3]);
                out.failures.push(PointFailure { index, delta_hz: d, message: e.to_string() });
            }
        }
    }
    Ok(out)
}

/// `P₀ + P_e` at the end of the schedule for a spectator starting in `|1⟩`.
pub fn off_resonant_excitation(
    system: &SystemPreset,
    gate: &GateSpec,
    coeffs: &PulseCoefficients,
    delta_hz: f64,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let schedule = schedule_for(system, gate, coeffs)?;
    let rho = final_state(system, &schedule, &QubitState::one(), delta_hz, cfg)?;
    let p = rho.populations();
    Ok((p[0] + p[1]).clamp(0.0, 1.0))
}

/// Linear map from qubit-subspace inputs to final 3×3 states.
///
/// Holds the images of `|0⟩⟨0|`, `|0⟩⟨1|` and `|1⟩⟨1|`; the image of `|1⟩⟨0|`
/// is the adjoint of the `|0⟩⟨1|` image.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitChannel {
    e00: Complex3x3,
    e01: Complex3x3,
    e11: Complex3x3,
}

impl QubitChannel {
    pub fn compute(
        system: &SystemPreset,
        schedule: &PulseSchedule,
        delta_hz: f64,
        cfg: &IntegratorConfig,
    ) -> Result<Self> {
        let inputs = [(IDX_0, IDX_0), (IDX_0, IDX_1), (IDX_1, IDX_1)];
        let images = par_map(&inputs, |&(i, j)| {
            // |i⟩⟨j| is not a state, but the evolution is linear.
            let raw = DensityMatrix::from_raw(Complex3x3::unit(i, j));
            evolve_final(&raw, schedule, hz_to_angular(delta_hz), &system.profile, cfg).map(|r| *r.matrix())
        });
        let mut it = images.into_iter();
        let mut next = || it.next().expect("three images");
        Ok(Self { e00: next()?, e01: next()?, e11: next()? })
    }

    pub fn apply(&self, psi: &QubitState) -> DensityMatrix {
        let [a, b] = *psi.amplitudes();
        let m = self.e00.scale(a * a.conj())
            + self.e01.scale(a * b.conj())
            + self.e01.dagger().scale(b * a.conj())
            + self.e11.scale(b * b.conj());
        DensityMatrix::from_raw(m)
    }
}

/// Initial-state grid on the Bloch sphere: polar angles `linspace(0, π, n_polar)`
/// inclusive, azimuths `2πk/n_azimuth`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochGrid {
    pub n_polar: usize,
    pub n_azimuth: usize,
}

impl Default for BlochGrid {
    fn default() -> Self {
        Self { n_polar: 51, n_azimuth: 51 }
    }
}

impl BlochGrid {
    pub fn states(&self) -> Vec<QubitState> {
        let polar = crate::systems::uniform_grid(0.0, PI, self.n_polar);
        polar
            .iter()
            .flat_map(|&t| {
                (0..self.n_azimuth).map(move |k| QubitState::from_bloch(t, 2.0 * PI * k as f64 / self.n_azimuth as f64))
            })
            .collect()
    }
}

/// Mean fidelity over every initial state of `grid` at one detuning.
pub fn bloch_average_fidelity(
    system: &SystemPreset,
    gate: &GateSpec,
    coeffs: &PulseCoefficients,
    delta_hz: f64,
    grid: BlochGrid,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let states = grid.states();
    if states.is_empty() {
        return Err(Error::InvalidArgument("Bloch grid is empty".into()));
    }
    let schedule = schedule_for(system, gate, coeffs)?;
    let channel = QubitChannel::compute(system, &schedule, delta_hz, cfg)?;
    let total: f64 = states
        .iter()
        .map(|psi| qubit_state_fidelity(&channel.apply(psi), &target_state(&gate.params, psi)))
        .sum();
    Ok(total / states.len() as f64)
}

/// Largest interval around Δ = 0 on which the sweep stays at or above
/// `threshold`; edges are interpolated linearly between grid points.
///
/// Returns `None` when the point closest to zero already falls below the
/// threshold.
pub fn robustness_window(sweep: &SweepResult, threshold: f64) -> Option<DetuningRange> {
    let d = &sweep.detunings_hz;
    let f = &sweep.fidelity;
    if d.is_empty() {
        return None;
    }
    let centre = (0..d.len()).min_by(|&a, &b| d[a].abs().total_cmp(&d[b].abs()))?;
    let ok = |i: usize| f[i].is_finite() && f[i] >= threshold;
    if !ok(centre) {
        return None;
    }
    let edge = |inside: usize, outside: usize| {
        let (f0, f1) = (f[inside], f[outside]);
        if !f1.is_finite() || f0 == f1 {
            return d[inside];
        }
        let w = ((f0 - threshold) / (f0 - f1)).clamp(0.0, 1.0);
        d[inside] + w * (d[outside] - d[inside])
    };
    let mut lo = centre;
    while lo > 0 && ok(lo - 1) {
        lo -= 1;
    }
    let mut hi = centre;
    while hi + 1 < d.len() && ok(hi + 1) {
        hi += 1;
    }
    let lo_hz = if lo == 0 { d[0] } else { edge(lo, lo - 1) };
    let hi_hz = if hi + 1 == d.len() { d[hi] } else { edge(hi, hi + 1) };
    Some(DetuningRange { lo_hz, hi_hz })
}

/// Infidelity under multiplicative amplitude error on one weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensitivitySurface {
    pub eta_grid: Vec<f64>,
    pub delta_grid_hz: Vec<f64>,
    /// `infidelity[i][j]` for `eta_grid[i]`, `delta_grid_hz[j]`.
    pub infidelity: Vec<Vec<f64>>,
    /// 1-based index of the perturbed weight.
    pub perturbed_index: usize,
}

impl SensitivitySurface {
    /// Largest rise of `1 − F` over the `η = 0` row, over all `η` and the
    /// detunings selected by `at_delta`.
    pub fn max_increase(&self, at_delta: impl Fn(f64) -> bool) -> Option<f64> {
        let zero = self.eta_grid.iter().position(|e| *e == 0.0)?;
        let mut best = f64::NEG_INFINITY;
        for (j, &d) in self.delta_grid_hz.iter().enumerate() {
            if !at_delta(d) {
                continue;
            }
            for row in &self.infidelity {
                best = best.max(row[j] - self.infidelity[zero][j]);
            }
        }
        best.is_finite().then_some(best)
    }

    /// Long form `eta,delta_hz,infidelity`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "eta,delta_hz,infidelity")?;
        for (i, eta) in self.eta_grid.iter().enumerate() {
            for (j, d) in self.delta_grid_hz.iter().enumerate() {
                writeln!(w, "{eta},{d},{}", self.infidelity[i][j])?;
            }
        }
        Ok(())
    }
}

/// Scales `α_k` by `1 + η` (constraints left broken) and records `1 − F`
/// from `|1⟩` over the `(η, Δ)` grid.
pub fn sensitivity_scan(
    system: &SystemPreset,
    gate: &GateSpec,
    base: &PulseCoefficients,
    k: usize,
    eta_grid: &[f64],
    delta_grid_hz: &[f64],
    cfg: &IntegratorConfig,
) -> Result<SensitivitySurface> {
    let perturbed: Vec<PulseCoefficients> =
        eta_grid.iter().map(|eta| base.scaled(k, 1.0 + eta)).collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> =
        (0..eta_grid.len()).flat_map(|i| (0..delta_grid_hz.len()).map(move |j| (i, j))).collect();
    let psi = QubitState::one();
    let target = target_state(&gate.params, &psi);
    let values = par_map(&jobs, |&(i, j)| -> Result<f64> {
        let schedule = schedule_for(system, gate, &perturbed[i])?;
        let rho = final_state(system, &schedule, &psi, delta_grid_hz[j], cfg)?;
        Ok(1.0 - qubit_state_fidelity(&rho, &target))
    });
    let mut infidelity = vec![vec![0.0; delta_grid_hz.len()]; eta_grid.len()];
    for (&(i, j), v) in jobs.iter().zip(values) {
        infidelity[i][j] = v?;
    }
    Ok(SensitivitySurface {
        eta_grid: eta_grid.to_vec(),
        delta_grid_hz: delta_grid_hz.to_vec(),
        infidelity,
        perturbed_index: k,
    })
}
