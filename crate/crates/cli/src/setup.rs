//! Turns flag values into library objects.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use anyhow::{bail, Context, Result};
use holopt::pulse::build_schedule;
use holopt::systems::{
    ensemble_alternative_coefficients, table1_coefficients, table3_coefficients, table4_coefficients,
};
use holopt::{
    gate_by_name, hz_to_angular, preset_by_name, DecoherenceProfile, GateSpec, IntegrationMethod, IntegratorConfig,
    PulseCoefficients, PulseSchedule, QubitState, Sigma2Variant, SystemPreset,
};
use num_complex::Complex64 as C64;

use crate::args::{PulseArgs, Sigma2Arg};

pub struct Setup {
    pub system: SystemPreset,
    pub gate: GateSpec,
    pub coeffs: PulseCoefficients,
    pub schedule: PulseSchedule,
    pub psi: QubitState,
    pub cfg: IntegratorConfig,
}

pub fn parse_coeffs(spec: &str, system: &SystemPreset, gate: &GateSpec) -> Result<PulseCoefficients> {
    let s = spec.trim().to_ascii_lowercase();
    let tau = system.tau;
    let c = match s.as_str() {
        "table1" => table1_coefficients(system.name).with_tau(tau)?,
        "table3" => table3_coefficients(gate.name).with_tau(tau)?,
        "baseline" => PulseCoefficients::baseline(tau),
        "alternative" | "alt" => ensemble_alternative_coefficients().with_tau(tau)?,
        _ if s.starts_with("table4:") => {
            let k: usize = s[7..].parse().with_context(|| format!("bad harmonic count in `{spec}`"))?;
            table4_coefficients(k)?.with_tau(tau)?
        }
        _ => {
            let alphas = s
                .split(',')
                .map(|x| x.trim().parse::<f64>().with_context(|| format!("bad weight `{x}` in `{spec}`")))
                .collect::<Result<Vec<_>>>()?;
            PulseCoefficients::new(alphas, tau)?
        }
    };
    let check = c.validate();
    if !check.passed {
        log::warn!(
            "weights {:?} miss the endpoint constraints (residuals {:.2e}, {:.2e})",
            c.alphas(),
            check.odd_residual,
            check.even_residual
        );
    }
    Ok(c)
}

pub fn parse_state(spec: &str) -> Result<QubitState> {
    let h = FRAC_1_SQRT_2;
    let s = spec.trim().to_ascii_lowercase();
    let amps = match s.as_str() {
        "0" => (C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
        "1" => (C64::new(0.0, 0.0), C64::new(1.0, 0.0)),
        "+" => (C64::new(h, 0.0), C64::new(h, 0.0)),
        "-" => (C64::new(h, 0.0), C64::new(-h, 0.0)),
        "+i" => (C64::new(h, 0.0), C64::new(0.0, h)),
        "-i" => (C64::new(h, 0.0), C64::new(0.0, -h)),
        _ => {
            let Some(rest) = s.strip_prefix("bloch:") else {
                bail!("unknown initial state `{spec}`");
            };
            let v: Vec<f64> = rest.split(',').map(|x| x.trim().parse()).collect::<Result<_, _>>()?;
            let [polar, azimuth] = v[..] else {
                bail!("bloch state needs POLAR,AZIMUTH");
            };
            if !(0.0..=PI).contains(&polar) {
                bail!("polar angle must lie in [0, π]");
            }
            return Ok(QubitState::from_bloch(polar, azimuth));
        }
    };
    Ok(QubitState::new(amps.0, amps.1)?)
}

pub fn parse_integrator(spec: &str, max_step: f64) -> Result<IntegratorConfig> {
    let method = match spec.trim().to_ascii_lowercase().as_str() {
        "adaptive" => IntegrationMethod::Adaptive,
        other => {
            let Some(n) = other.strip_prefix("rk4:") else {
                bail!("integrator must be `adaptive` or `rk4:STEPS`");
            };
            IntegrationMethod::FixedRk4 { steps_per_segment: n.parse().context("bad RK4 step count")? }
        }
    };
    let cfg = IntegratorConfig { method, max_step_fraction: max_step, ..Default::default() };
    cfg.check()?;
    Ok(cfg)
}

/// Applies decoherence, τ and compensation overrides to a named preset.
pub fn system_from(args: &PulseArgs) -> Result<SystemPreset> {
    let mut sys = preset_by_name(&args.system)?;
    let variant = match args.sigma2 {
        Some(Sigma2Arg::LambdaRei) => Sigma2Variant::LambdaRei,
        Some(Sigma2Arg::TransmonLadder) => Sigma2Variant::TransmonLadder,
        None => sys.profile.sigma2_variant,
    };
    let g1 = args.gamma1.map(hz_to_angular).unwrap_or(sys.profile.gamma1);
    let g2 = args.gamma2.map(hz_to_angular).unwrap_or(sys.profile.gamma2);
    sys.profile = if args.lossless { DecoherenceProfile::lossless(variant) } else { DecoherenceProfile::new(g1, g2, variant)? };
    if let Some(tau) = args.tau {
        sys.tau = tau;
    }
    if let Some(c) = args.compensation {
        sys.compensation = c;
    }
    sys.check()?;
    Ok(sys)
}

pub fn resolve(args: &PulseArgs) -> Result<Setup> {
    let system = system_from(args)?;
    let gate = gate_by_name(&args.gate)?;
    let coeffs = parse_coeffs(&args.coeffs, &system, &gate)?;
    let comp = match &args.comp_coeffs {
        Some(s) => Some(parse_coeffs(s, &system, &gate)?),
        None => None,
    };
    if comp.is_some() && !system.compensation {
        bail!("--comp-coeffs given but the compensation pair is off");
    }
    let comp_ref = system.compensation.then(|| comp.as_ref().unwrap_or(&coeffs));
    let schedule = build_schedule(&gate.params, &coeffs, comp_ref);
    Ok(Setup {
        psi: parse_state(&args.initial)?,
        cfg: parse_integrator(&args.integrator, args.max_step)?,
        system,
        gate,
        coeffs,
        schedule,
    })
}

/// Preset-driven setup starting from `|1⟩` with the default integrator.
pub fn canned(system: &SystemPreset, gate: GateSpec, coeffs: &PulseCoefficients) -> Result<Setup> {
    let schedule = holopt::metrics::schedule_for(system, &gate, coeffs)?;
    Ok(Setup {
        system: system.clone(),
        coeffs: coeffs.with_tau(system.tau)?,
        gate,
        schedule,
        psi: QubitState::one(),
        cfg: IntegratorConfig::default(),
    })
}
