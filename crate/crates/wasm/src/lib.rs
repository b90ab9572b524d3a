//! Browser bindings. Each exported function returns a flat row-major
//! `Float64Array`; the column layout is listed on the function.
//!
//! The `*_rows` functions hold the logic and run natively too, so they are
//! what the tests call.

use holopt::metrics::{detuning_sweep, schedule_for};
use holopt::systems::{table1_coefficients, uniform_grid};
use holopt::{
    evolve, gate_by_name, hz_to_angular, preset_by_name, rabi_pair, target_state, DensityMatrix, IntegratorConfig,
    PulseCoefficients, PureState3, QubitState, SystemPreset,
};
use wasm_bindgen::prelude::*;

const MAX_POINTS: usize = 2001;

type Rows = Result<Vec<f64>, String>;

fn system(name: &str, lossless: bool) -> Result<SystemPreset, String> {
    let sys = preset_by_name(name).map_err(|e| e.to_string())?;
    Ok(if lossless { sys.lossless() } else { sys })
}

/// `table1`, `baseline` or comma-separated weights.
fn weights(spec: &str, sys: &SystemPreset) -> Result<PulseCoefficients, String> {
    match spec.trim() {
        "" | "table1" => Ok(table1_coefficients(sys.name)),
        "baseline" => Ok(PulseCoefficients::baseline(sys.tau)),
        list => {
            let alphas = list
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| format!("bad weight `{}`", x.trim())))
                .collect::<Result<Vec<_>, _>>()?;
            PulseCoefficients::new(alphas, sys.tau).map_err(|e| e.to_string())
        }
    }
}

fn points(n: usize) -> Result<usize, String> {
    if (2..=MAX_POINTS).contains(&n) {
        Ok(n)
    } else {
        Err(format!("point count must lie in 2..={MAX_POINTS}"))
    }
}

/// Columns: time (µs), |Ω0|/2π (MHz), |Ω1|/2π (MHz).
pub fn rabi_rows(system_name: &str, gate: &str, coeffs: &str, n: usize) -> Rows {
    let sys = system(system_name, false)?;
    let gate = gate_by_name(gate).map_err(|e| e.to_string())?;
    let schedule = schedule_for(&sys, &gate, &weights(coeffs, &sys)?).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(3 * n);
    for t in uniform_grid(0.0, schedule.total_duration(), points(n)?) {
        let (a, b) = rabi_pair(&schedule, t).map_err(|e| e.to_string())?;
        out.extend([t * 1e6, a.norm() / std::f64::consts::TAU / 1e6, b.norm() / std::f64::consts::TAU / 1e6]);
    }
    Ok(out)
}

/// Starts from `|1⟩`. Columns: time (µs), P0, Pe, P1, fidelity to the ideal output.
pub fn population_rows(system_name: &str, gate: &str, coeffs: &str, delta_hz: f64, lossless: bool) -> Rows {
    let sys = system(system_name, lossless)?;
    let gate = gate_by_name(gate).map_err(|e| e.to_string())?;
    let schedule = schedule_for(&sys, &gate, &weights(coeffs, &sys)?).map_err(|e| e.to_string())?;
    let psi = QubitState::one();
    let target = PureState3::from_qubit(&target_state(&gate.params, &psi));
    let cfg = IntegratorConfig::default().with_samples(60);
    let traj = evolve(&DensityMatrix::from_qubit(&psi), &schedule, hz_to_angular(delta_hz), &sys.profile, &cfg)
        .map_err(|e| e.to_string())?
        .with_fidelity(&target);
    let fid = traj.fidelity_series.as_deref().unwrap_or_default();
    let mut out = Vec::with_capacity(5 * traj.times.len());
    for (k, t) in traj.times.iter().enumerate() {
        let [p0, pe, p1] = traj.populations[k];
        out.extend([t * 1e6, p0, pe, p1, fid[k]]);
    }
    Ok(out)
}

/// Starts from `|1⟩`. Columns: detuning (MHz), fidelity, P0 + Pe.
pub fn sweep_rows(system_name: &str, gate: &str, coeffs: &str, lo_hz: f64, hi_hz: f64, n: usize) -> Rows {
    if !(lo_hz.is_finite() && hi_hz.is_finite() && lo_hz <= hi_hz) {
        return Err("detuning range must be finite and ordered".into());
    }
    let sys = system(system_name, false)?;
    let gate = gate_by_name(gate).map_err(|e| e.to_string())?;
    let grid = uniform_grid(lo_hz, hi_hz, points(n)?);
    let s = detuning_sweep(&sys, &gate, &weights(coeffs, &sys)?, &grid, &QubitState::one(), &IntegratorConfig::default())
        .map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(3 * n);
    for i in 0..s.len() {
        out.extend([s.detunings_hz[i] / 1e6, s.fidelity[i], s.p_off[i]]);
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn rabi_trace(system: &str, gate: &str, coeffs: &str, n: usize) -> Result<Vec<f64>, JsError> {
    rabi_rows(system, gate, coeffs, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn populations(system: &str, gate: &str, coeffs: &str, delta_hz: f64, lossless: bool) -> Result<Vec<f64>, JsError> {
    population_rows(system, gate, coeffs, delta_hz, lossless).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn sweep(system: &str, gate: &str, coeffs: &str, lo_hz: f64, hi_hz: f64, n: usize) -> Result<Vec<f64>, JsError> {
    sweep_rows(system, gate, coeffs, lo_hz, hi_hz, n).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rabi_trace_layout() {
        let r = rabi_rows("single-rei", "not", "table1", 101).unwrap();
        assert_eq!(r.len(), 303);
        assert_eq!(r[0], 0.0);
        let peak = r.chunks(3).map(|c| c[1].max(c[2])).fold(0.0, f64::max);
        assert!((peak - 0.556).abs() < 0.01, "{peak}");
        // the published weights are rounded, so the edges are only nearly zero
        assert!(r[1].max(r[2]) < 0.02 * peak, "{} {}", r[1], r[2]);
    }

    #[test]
    fn lossless_resonant_not_swaps_populations() {
        let r = population_rows("ensemble-rei", "not", "table1", 0.0, true).unwrap();
        let last = &r[r.len() - 5..];
        assert!((last[1] - 1.0).abs() < 1e-6);
        assert!((last[4] - 1.0).abs() < 1e-6);
        assert_eq!(r[3], 1.0);
    }

    #[test]
    fn sweep_is_symmetric_for_not() {
        let r = sweep_rows("ensemble-rei", "not", "table1", -300e3, 300e3, 5).unwrap();
        assert_eq!(r.len(), 15);
        assert!((r[1] - r[13]).abs() < 1e-6);
        assert!(r.chunks(3).all(|c| c[1] > 0.97 && c[1] <= 1.0));
    }

    #[test]
    fn bad_inputs_are_errors() {
        assert!(rabi_rows("qutrit", "not", "table1", 10).is_err());
        assert!(rabi_rows("transmon", "swap", "table1", 10).is_err());
        assert!(rabi_rows("transmon", "not", "1,x", 10).is_err());
        assert!(rabi_rows("transmon", "not", "table1", 1).is_err());
        assert!(sweep_rows("transmon", "not", "baseline", 1.0, -1.0, 5).is_err());
        assert!(population_rows("transmon", "not", "baseline", f64::NAN, false).is_err());
    }
}
