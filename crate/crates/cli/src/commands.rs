use anyhow::{bail, Result};
use holopt::metrics::{robustness_window, sweep_schedule, SweepResult};
use holopt::optimizer::{run_ga, select_solution, GAConfig, ObjectiveGrids, ParetoFront, SelectionStrategy};
use holopt::systems::{gate_catalog, preset, GateName, SystemName, TABLE1, TABLE3, TABLE4};
use holopt::{
    evolve, gate_by_name, hz_to_angular, preset_by_name, rabi_pair, target_state, DecoherenceProfile, DetuningRange,
    PureState3, Trajectory,
};
use serde_json::json;
use std::io::Write;

use crate::args::{OptimizeArgs, ShowArgs, ShowWhat, SimulateArgs, SweepArgs};
use crate::cells;
use crate::output::{Csv, Outputs};
use crate::setup::{resolve, Setup};
use crate::svg::{line_chart, Series};
use crate::units::{parse_freq, Unit};
use crate::NumericalFailure;

/// Rabi magnitudes are reported as |Ω|/2π in Hz.
pub fn trajectory_csv(traj: &Trajectory, setup: &Setup, full_matrix: bool) -> Result<Csv> {
    let mut header = vec!["time_s", "omega0_abs_hz", "omega1_abs_hz", "p0", "pe", "p1", "fidelity"];
    let names: Vec<String> =
        (0..3).flat_map(|i| (0..3).flat_map(move |j| [format!("re_rho{i}{j}"), format!("im_rho{i}{j}")])).collect();
    if full_matrix {
        header.extend(names.iter().map(String::as_str));
    }
    let mut csv = Csv::new(&header);
    let fid = traj.fidelity_series.as_ref().expect("fidelity attached");
    for (k, &t) in traj.times.iter().enumerate() {
        let (o0, o1) = rabi_pair(&setup.schedule, t)?;
        let [p0, pe, p1] = traj.populations[k];
        let mut row = vec![
            t.into(),
            (o0.norm() / std::f64::consts::TAU).into(),
            (o1.norm() / std::f64::consts::TAU).into(),
            p0.into(),
            pe.into(),
            p1.into(),
            fid[k].into(),
        ];
        if full_matrix {
            let m = traj.states[k].matrix();
            for i in 0..3 {
                for j in 0..3 {
                    row.push(m.0[i][j].re.into());
                    row.push(m.0[i][j].im.into());
                }
            }
        }
        csv.row(&row);
    }
    Ok(csv)
}

pub fn run_trajectory(setup: &Setup, delta_hz: f64, samples: usize) -> Result<Trajectory> {
    let rho0 = holopt::DensityMatrix::from_qubit(&setup.psi);
    let target = PureState3::from_qubit(&target_state(&setup.gate.params, &setup.psi));
    let traj = evolve(&rho0, &setup.schedule, hz_to_angular(delta_hz), &setup.system.profile, &setup.cfg.with_samples(samples))?;
    Ok(traj.with_fidelity(&target))
}

pub fn trajectory_svg(traj: &Trajectory, title: &str) -> String {
    let t_us = |k: usize| traj.times[k] * 1e6;
    let pop = |idx: usize| (0..traj.times.len()).map(|k| (t_us(k), traj.populations[k][idx])).collect();
    let fid = traj.fidelity_series.as_ref().map(|f| (0..f.len()).map(|k| (t_us(k), f[k])).collect()).unwrap_or_default();
    line_chart(
        title,
        "time (µs)",
        "population",
        &[
            Series { name: "P0", points: pop(0) },
            Series { name: "Pe", points: pop(1) },
            Series { name: "P1", points: pop(2) },
            Series { name: "F", points: fid },
        ],
    )
}

pub fn simulate(args: &SimulateArgs, out: &mut Outputs) -> Result<()> {
    let setup = resolve(&args.pulse)?;
    let delta = match (args.delta_khz, args.delta_mhz) {
        (Some(k), _) => k * 1e3,
        (_, Some(m)) => m * 1e6,
        _ => parse_freq(&args.delta, Unit::Hz)?,
    };
    log::info!("weights {:?}, τ = {} s", setup.coeffs.alphas(), setup.coeffs.tau());
    let traj = run_trajectory(&setup, delta, args.samples)?;
    out.write(&args.out, &trajectory_csv(&traj, &setup, args.full_matrix)?.into_bytes())?;
    if out.svg {
        let title = format!("{} {} at Δ = {delta} Hz", setup.system.name, setup.gate.name);
        out.write(&svg_name(&args.out), trajectory_svg(&traj, &title).as_bytes())?;
    }
    let [p0, pe, p1] = traj.final_populations();
    let f = traj.fidelity_series.as_ref().and_then(|v| v.last().copied()).unwrap_or(f64::NAN);
    out.say(format!(
        "{} {} Δ = {delta} Hz: final fidelity {f:.9}, populations (P0, Pe, P1) = ({p0:.6}, {pe:.6}, {p1:.6})",
        setup.system.name, setup.gate.name
    ));
    Ok(())
}

pub fn svg_name(csv: &str) -> String {
    csv.strip_suffix(".csv").unwrap_or(csv).to_string() + ".svg"
}

pub fn default_span(name: SystemName) -> (f64, f64) {
    match name {
        SystemName::EnsembleRei => (-300e3, 300e3),
        SystemName::SingleRei => (-12e6, 12e6),
        SystemName::Transmon => (-20e6, 20e6),
    }
}

pub fn sweep_csv(s: &SweepResult) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    s.write_csv(&mut buf)?;
    Ok(buf)
}

pub fn sweep_svg(title: &str, sweeps: &[(&str, &SweepResult)], p_off: bool) -> String {
    let series: Vec<Series> = sweeps
        .iter()
        .map(|(name, s)| Series {
            name,
            points: s
                .detunings_hz
                .iter()
                .zip(if p_off { &s.p_off } else { &s.fidelity })
                .map(|(d, v)| (d / 1e6, *v))
                .collect(),
        })
        .collect();
    line_chart(title, "detuning (MHz)", if p_off { "P0 + Pe" } else { "fidelity" }, &series)
}

pub fn sweep(args: &SweepArgs, out: &mut Outputs) -> Result<()> {
    let setup = resolve(&args.pulse)?;
    let unit = args.unit();
    let (lo_d, hi_d) = default_span(setup.system.name);
    let lo = args.from.as_deref().map(|s| parse_freq(s, unit)).transpose()?.unwrap_or(lo_d);
    let hi = args.to.as_deref().map(|s| parse_freq(s, unit)).transpose()?.unwrap_or(hi_d);
    if args.points == 0 {
        bail!("--points must be positive");
    }
    let grid = DetuningRange::new(lo, hi)?.grid(args.points);
    let s = sweep_schedule(&setup.system, &setup.gate, &setup.schedule, &grid, &setup.psi, &setup.cfg)?;
    out.write(&args.out, &sweep_csv(&s)?)?;
    if out.svg {
        let title = format!("{} {}", setup.system.name, setup.gate.name);
        out.write(&svg_name(&args.out), sweep_svg(&title, &[("fidelity", &s)], false).as_bytes())?;
    }
    let window = args.mean_window.as_deref().map(|w| parse_freq(w, unit).map(|h| DetuningRange::symmetric(h.abs()))).transpose()?;
    out.say(format!(
        "{} {}: mean fidelity {:.6} over [{}, {}] Hz ({} points)",
        setup.system.name,
        setup.gate.name,
        s.mean_fidelity(window),
        window.map_or(lo, |w| w.lo_hz),
        window.map_or(hi, |w| w.hi_hz),
        args.points
    ));
    if let Some(thr) = setup.system.offres_threshold_hz {
        let far: Vec<f64> = s.detunings_hz.iter().zip(&s.p_off).filter(|(d, _)| d.abs() >= thr).map(|(_, p)| *p).collect();
        if !far.is_empty() {
            out.say(format!("max P_off at |Δ| ≥ {thr} Hz: {:.6}", far.iter().copied().fold(0.0, f64::max)));
        }
    }
    if let Some(at) = &args.report_at {
        let d = parse_freq(at, unit)?.abs();
        let r = sweep_schedule(&setup.system, &setup.gate, &setup.schedule, &[-d, d], &setup.psi, &setup.cfg)?;
        out.say(format!("P_off at Δ = ±{d} Hz: {:.6} / {:.6}", r.p_off[0], r.p_off[1]));
    }
    if let Some(thr) = args.threshold {
        match robustness_window(&s, thr) {
            Some(w) => out.say(format!("window at F ≥ {thr}: [{:.6e}, {:.6e}] Hz", w.lo_hz, w.hi_hz)),
            None => out.say(format!("window at F ≥ {thr}: empty")),
        }
    }
    if !s.failures.is_empty() {
        return Err(NumericalFailure(format!("{} sweep points failed to integrate", s.failures.len())).into());
    }
    Ok(())
}

pub fn front_csv(front: &ParetoFront) -> Vec<u8> {
    let k = front.provenance.config.harmonics;
    let mut header = vec!["set".to_string(), "position".into(), "objective1".into(), "objective2".into()];
    header.extend((1..=k - 2).map(|i| format!("free{i}")));
    header.extend((1..=k).map(|i| format!("alpha{i}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = Csv::new(&header);
    for (set, list) in [("front", &front.individuals), ("top", &front.top_set)] {
        for (i, ind) in list.iter().enumerate() {
            let o = ind.obj();
            let mut row = cells![set, i, o[0], o[1]].to_vec();
            row.extend(ind.free_params.iter().map(|x| (*x).into()));
            row.extend(ind.coeffs.alphas().iter().map(|x| (*x).into()));
            csv.row(&row);
        }
    }
    csv.into_bytes()
}

pub fn ga_config(args: &OptimizeArgs) -> GAConfig {
    GAConfig {
        population_size: args.population,
        generations: args.generations,
        crossover_rate: args.crossover_rate,
        mutation_rate: args.mutation_rate,
        mutation_scale: args.mutation_scale,
        elite_fraction: args.elite_fraction,
        rng_seed: args.seed,
        harmonics: args.harmonics,
        grids: if args.fast_grids { ObjectiveGrids::fast() } else { ObjectiveGrids::default() },
        ..Default::default()
    }
}

pub fn optimize(args: &OptimizeArgs, out: &mut Outputs) -> Result<()> {
    let mut system = preset_by_name(&args.system)?;
    if args.lossless {
        system.profile = DecoherenceProfile::lossless(system.profile.sigma2_variant);
    }
    let gate = gate_by_name(&args.gate)?;
    let cfg = ga_config(args);
    let front = run_ga(&system, &gate, &cfg)?;
    out.write(&args.out, &front_csv(&front))?;
    out.write(&(args.out.trim_end_matches(".csv").to_string() + ".json"), front.to_json()?.as_bytes())?;
    if out.svg {
        let pts = |v: &[holopt::Individual]| v.iter().map(|i| (i.obj()[0], i.obj()[1])).collect();
        let svg = line_chart(
            "Pareto front",
            "mean infidelity",
            "mean off-resonant excitation",
            &[Series { name: "front", points: pts(&front.individuals) }, Series { name: "top set", points: pts(&front.top_set) }],
        );
        out.write(&svg_name(&args.out), svg.as_bytes())?;
    }
    out.say(format!("run {}: front of {}, top set of {}", front.provenance.run_id, front.individuals.len(), front.top_set.len()));
    let strategies: Vec<SelectionStrategy> = if args.select.is_empty() {
        vec![SelectionStrategy::MinObjective1, SelectionStrategy::Knee, SelectionStrategy::MinObjective2]
    } else {
        args.select.iter().map(|s| s.parse()).collect::<Result<_, _>>()?
    };
    for st in strategies {
        let ind = select_solution(&front, st)?;
        out.say(format!("{st:?}: objectives ({:.6e}, {:.6e}), alphas {:?}", ind.obj()[0], ind.obj()[1], ind.coeffs.alphas()));
    }
    Ok(())
}

pub fn show(args: &ShowArgs) -> Result<()> {
    let v = match args.what {
        ShowWhat::Presets => json!(SystemName::ALL.iter().map(|n| preset(*n)).collect::<Vec<_>>()),
        ShowWhat::Gates => json!(GateName::ALL.iter().map(|g| gate_catalog(*g)).collect::<Vec<_>>()),
        ShowWhat::Coefficients => json!({
            "table1": TABLE1.iter().map(|(n, r)| json!({"system": n, "alphas": r})).collect::<Vec<_>>(),
            "table3": TABLE3.iter().map(|(g, r)| json!({"gate": g, "alphas": r})).collect::<Vec<_>>(),
            "table4": TABLE4.iter().map(|r| json!({"harmonics": r.len(), "alphas": r})).collect::<Vec<_>>(),
            "baseline": [0.0, -0.25, 0.0, 0.0],
            "alternative": holopt::systems::ENSEMBLE_ALTERNATIVE,
        }),
    };
    // a closed pipe (`holopt show presets | head`) is not an error
    let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&v)?);
    Ok(())
}
