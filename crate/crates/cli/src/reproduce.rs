//! Canned configurations for each published figure and table.

use anyhow::Result;
use holopt::metrics::{bloch_average_fidelity, detuning_sweep, robustness_window, sensitivity_scan, BlochGrid, SweepResult};
use holopt::optimizer::{evaluate_objectives, run_ga, select_from, GAConfig, ObjectiveGrids, ParetoFront, SelectionStrategy};
use holopt::systems::{
    ensemble_alternative_coefficients, gate_catalog, preset, table1_coefficients, table3_coefficients,
    table4_coefficients, uniform_grid, GateName, SystemName, SystemPreset,
};
use holopt::{IntegratorConfig, PulseCoefficients, QubitState};

use crate::args::{ReproduceArgs, Target};
use crate::cells;
use crate::commands::{front_csv, run_trajectory, sweep_svg, trajectory_csv, trajectory_svg};
use crate::output::{Csv, Outputs};
use crate::setup::canned;

const PAIR: [GateName; 2] = [GateName::Not, GateName::Hadamard];

fn cfg() -> IntegratorConfig {
    IntegratorConfig::default()
}

fn sweep(sys: &SystemPreset, gate: GateName, coeffs: &PulseCoefficients, grid: &[f64]) -> Result<SweepResult> {
    Ok(detuning_sweep(sys, &gate_catalog(gate), coeffs, grid, &QubitState::one(), &cfg())?)
}

/// Concatenates per-key CSV bodies under one header with a leading key column.
fn keyed(key: &str, parts: &[(String, Vec<u8>)]) -> Vec<u8> {
    let mut out = String::new();
    for (i, (k, body)) in parts.iter().enumerate() {
        let text = String::from_utf8_lossy(body);
        let mut lines = text.lines();
        let header = lines.next().unwrap_or("");
        if i == 0 {
            out.push_str(&format!("{key},{header}\n"));
        }
        for l in lines {
            out.push_str(&format!("{k},{l}\n"));
        }
    }
    out.into_bytes()
}

fn max_abs_beyond(s: &SweepResult, thr: f64) -> f64 {
    s.detunings_hz.iter().zip(&s.p_off).filter(|(d, _)| d.abs() >= thr - 1e-6).map(|(_, p)| *p).fold(0.0, f64::max)
}

fn mirrored(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let pos = uniform_grid(lo, hi, n);
    pos.iter().map(|d| -d).rev().chain(pos.iter().copied()).collect()
}

fn trajectories(out: &mut Outputs, name: &str, sys: &SystemPreset, delta: f64, coeffs: &PulseCoefficients) -> Result<()> {
    let mut parts = vec![];
    for g in PAIR {
        let setup = canned(sys, gate_catalog(g), coeffs)?;
        let traj = run_trajectory(&setup, delta, 200)?;
        let f = traj.fidelity_series.as_ref().and_then(|v| v.last().copied()).unwrap_or(f64::NAN);
        let peak = setup.schedule.peak_rabi_magnitude(2000) / std::f64::consts::TAU;
        out.say(format!("{name} {} {g}: final fidelity {f:.6}, peak |Ω|/2π {:.4} MHz", sys.name, peak / 1e6));
        if out.svg {
            out.write(&format!("{name}_{g}.svg"), trajectory_svg(&traj, &format!("{} {g}", sys.name)).as_bytes())?;
        }
        parts.push((g.to_string(), trajectory_csv(&traj, &setup, false)?.into_bytes()));
    }
    out.write(&format!("{name}.csv"), &keyed("gate", &parts))?;
    Ok(())
}

fn ga_cfg(args: &ReproduceArgs, harmonics: usize) -> GAConfig {
    let base = GAConfig { rng_seed: args.seed, harmonics, ..Default::default() };
    if args.fast {
        GAConfig { population_size: 12, generations: 30, grids: ObjectiveGrids::fast(), ..base }
    } else {
        base
    }
}

/// The sixth point from the left, or the last one on shorter fronts.
fn sixth(front: &ParetoFront) -> PulseCoefficients {
    let k = 5.min(front.individuals.len() - 1);
    select_from(&front.individuals, SelectionStrategy::Index(k)).expect("index in range").coeffs.clone()
}

pub fn run(args: &ReproduceArgs, out: &mut Outputs) -> Result<Vec<u64>> {
    let ens = preset(SystemName::EnsembleRei);
    let single = preset(SystemName::SingleRei);
    let tr = preset(SystemName::Transmon);
    let mut seeds = vec![];
    match args.target {
        Target::Fig3 => trajectories(out, "fig3", &ens, 170e3, &table1_coefficients(ens.name))?,
        Target::Fig6 => trajectories(out, "fig6", &single, 0.0, &table1_coefficients(single.name))?,
        Target::Fig9 => trajectories(out, "fig9", &tr, 2e6, &table1_coefficients(tr.name))?,
        Target::Fig4 => {
            let near = uniform_grid(-300e3, 300e3, 61);
            let far = uniform_grid(-6e6, 6e6, 241);
            let mut parts = vec![];
            for g in PAIR {
                for (label, c) in [("table1", table1_coefficients(ens.name)), ("baseline", PulseCoefficients::baseline(ens.tau))] {
                    let a = sweep(&ens, g, &c, &near)?;
                    let b = sweep(&ens, g, &c, &far)?;
                    out.say(format!(
                        "fig4 {g} {label}: mean F over ±300 kHz {:.6}, max P_off at |Δ| ≥ 3.5 MHz {:.6}",
                        a.mean_fidelity(None),
                        max_abs_beyond(&b, 3.5e6)
                    ));
                    if out.svg {
                        out.write(&format!("fig4_{g}_{label}_fidelity.svg"), sweep_svg(&format!("{g} {label}"), &[("F", &a)], false).as_bytes())?;
                        out.write(&format!("fig4_{g}_{label}_poff.svg"), sweep_svg(&format!("{g} {label}"), &[("P_off", &b)], true).as_bytes())?;
                    }
                    for (panel, s) in [("fidelity", &a), ("offres", &b)] {
                        let mut buf = vec![];
                        s.write_csv(&mut buf)?;
                        parts.push((format!("{g},{label},{panel}"), buf));
                    }
                }
            }
            out.write("fig4.csv", &keyed("gate,coeffs,panel", &parts))?;
        }
        Target::Fig5 => {
            let not = gate_catalog(GateName::Not);
            let mut csv = Csv::new(&["harmonics", "source", "bloch_average", "mean_fidelity_300khz"]);
            let near = uniform_grid(-300e3, 300e3, 61);
            for k in (4..=16).step_by(2) {
                let (source, c) = if args.reoptimize {
                    let ga = ga_cfg(args, k);
                    seeds.push(ga.rng_seed);
                    ("search", sixth(&run_ga(&ens, &not, &ga)?))
                } else if k == 4 {
                    ("published", table1_coefficients(ens.name))
                } else {
                    ("published", table4_coefficients(k)?)
                };
                let b = bloch_average_fidelity(&ens, &not, &c, 0.0, BlochGrid::default(), &cfg())?;
                let m = sweep(&ens, GateName::Not, &c, &near)?.mean_fidelity(None);
                out.say(format!("fig5 K = {k:>2}: Bloch average {b:.6}, mean F ±300 kHz {m:.6}"));
                csv.row(cells![k, source, b, m]);
            }
            out.write("fig5.csv", &csv.into_bytes())?;
            let six = canned(&ens, not, &table4_coefficients(6)?)?;
            let traj = run_trajectory(&six, 0.0, 400)?;
            out.write("fig5b.csv", &trajectory_csv(&traj, &six, false)?.into_bytes())?;
        }
        Target::Fig7 => {
            let grid = uniform_grid(-12e6, 12e6, 481);
            let mut parts = vec![];
            let c = table1_coefficients(single.name);
            for g in PAIR {
                let s = sweep(&single, g, &c, &grid)?;
                out.say(format!("fig7 {g}: max P_off at |Δ| ≥ 8.9 MHz {:.6}", max_abs_beyond(&s, 8.9e6)));
                if out.svg {
                    out.write(&format!("fig7_{g}.svg"), sweep_svg(&g.to_string(), &[("P_off", &s)], true).as_bytes())?;
                }
                let mut buf = vec![];
                s.write_csv(&mut buf)?;
                parts.push((g.to_string(), buf));
            }
            out.write("fig7.csv", &keyed("gate", &parts))?;
        }
        Target::Fig10 => {
            let grid = uniform_grid(-20e6, 20e6, 401);
            let mut parts = vec![];
            for g in PAIR {
                let mut pair = vec![];
                for (label, c) in [("table1", table1_coefficients(tr.name)), ("baseline", PulseCoefficients::baseline(tr.tau))] {
                    let s = sweep(&tr, g, &c, &grid)?;
                    let w = robustness_window(&s, 0.996)
                        .map_or("empty".to_string(), |w| format!("[{:.3}, {:.3}] MHz", w.lo_hz / 1e6, w.hi_hz / 1e6));
                    out.say(format!("fig10 {g} {label}: F(0) {:.6}, window at F ≥ 0.996 {w}", s.fidelity[200]));
                    let mut buf = vec![];
                    s.write_csv(&mut buf)?;
                    parts.push((format!("{g},{label}"), buf));
                    pair.push((label, s));
                }
                if out.svg {
                    let refs: Vec<(&str, &SweepResult)> = pair.iter().map(|(l, s)| (*l, s)).collect();
                    out.write(&format!("fig10_{g}.svg"), sweep_svg(&g.to_string(), &refs, false).as_bytes())?;
                }
            }
            out.write("fig10.csv", &keyed("gate,coeffs", &parts))?;
        }
        Target::Fig11 => {
            let c = table1_coefficients(tr.name);
            let etas = uniform_grid(-0.3, 0.3, 13);
            let deltas = uniform_grid(-2e6, 2e6, 21);
            let mut parts = vec![];
            for g in PAIR {
                for k in 1..=4 {
                    let surf = sensitivity_scan(&tr, &gate_catalog(g), &c, k, &etas, &deltas, &cfg())?;
                    let rise = surf.max_increase(|d| (d.abs() - 2e6).abs() < 1.0).unwrap_or(f64::NAN);
                    out.say(format!("fig11 {g} α{k}: largest infidelity rise at Δ = ±2 MHz {:.4} pp", 100.0 * rise));
                    let mut buf = vec![];
                    surf.write_csv(&mut buf)?;
                    parts.push((format!("{g},{k}"), buf));
                }
            }
            out.write("fig11.csv", &keyed("gate,weight", &parts))?;
        }
        Target::Fig12 => {
            let not = gate_catalog(GateName::Not);
            let ga = ga_cfg(args, 4);
            seeds.push(ga.rng_seed);
            let front = run_ga(&ens, &not, &ga)?;
            out.write("fig12.csv", &front_csv(&front))?;
            out.write("fig12.json", front.to_json()?.as_bytes())?;
            let pick = sixth(&front);
            let reference = evaluate_objectives(&table1_coefficients(ens.name), &ens, &not, ga.grids, &ga.integrator);
            out.say(format!("fig12: front of {}, sixth point alphas {:?}", front.individuals.len(), pick.alphas()));
            out.say(format!("fig12: published weights score ({:.6e}, {:.6e}) on the same grids", reference[0], reference[1]));
        }
        Target::Table2 => {
            let published = [
                (GateName::Not, 98.09, 4.0, 0.5, 99.76),
                (GateName::Hadamard, 98.38, 5.0, 0.3, 99.79),
                (GateName::SigmaY, 98.06, 4.0, 0.5, 99.76),
                (GateName::SigmaZ, 98.85, 5.0, 0.1, 99.85),
            ];
            let mut csv = Csv::new(&[
                "gate",
                "ensemble_mean_fidelity",
                "ensemble_max_p_off",
                "single_p_off_8p9mhz",
                "transmon_fidelity",
                "published_ensemble_fidelity_pct",
                "published_ensemble_p_off_pct",
                "published_single_p_off_pct",
                "published_transmon_fidelity_pct",
            ]);
            let near = uniform_grid(-300e3, 300e3, 61);
            for (g, pf, pe, ps, pt) in published {
                let e = sweep(&ens, g, &table1_coefficients(ens.name), &near)?.mean_fidelity(None);
                let eo = sweep(&ens, g, &table1_coefficients(ens.name), &mirrored(3.5e6, 5e6, 151))?.max_p_off();
                let so = sweep(&single, g, &table1_coefficients(single.name), &[-8.9e6, 8.9e6])?.max_p_off();
                let t = sweep(&tr, g, &table1_coefficients(tr.name), &[0.0])?.fidelity[0];
                out.say(format!(
                    "table2 {g}: ensemble F {:.3}% (pub. {pf}), ensemble P_off {:.2}% (pub. {pe}), single P_off {:.3}% (pub. {ps}), transmon F {:.3}% (pub. {pt})",
                    100.0 * e,
                    100.0 * eo,
                    100.0 * so,
                    100.0 * t
                ));
                csv.row(cells![g.to_string(), e, eo, so, t, pf, pe, ps, pt]);
            }
            out.write("table2.csv", &csv.into_bytes())?;
        }
        Target::Table3 => {
            let mut csv = Csv::new(&["gate", "source", "alphas", "mean_fidelity", "max_p_off", "published_fidelity_pct"]);
            let published = [98.09, 98.50, 98.12, 98.69];
            let near = uniform_grid(-300e3, 300e3, 61);
            for (g, pf) in GateName::ALL.into_iter().zip(published) {
                let (source, c) = if args.reoptimize {
                    let ga = ga_cfg(args, 4);
                    seeds.push(ga.rng_seed);
                    ("search", sixth(&run_ga(&ens, &gate_catalog(g), &ga)?))
                } else {
                    ("published", table3_coefficients(g))
                };
                let f = sweep(&ens, g, &c, &near)?.mean_fidelity(None);
                let p = sweep(&ens, g, &c, &mirrored(3.5e6, 5e6, 151))?.max_p_off();
                out.say(format!("table3 {g}: mean F {:.3}% (pub. {pf}), max P_off {:.2}%", 100.0 * f, 100.0 * p));
                let alphas: Vec<String> = c.alphas().iter().map(|a| a.to_string()).collect();
                csv.row(cells![g.to_string(), source, alphas.join(";"), f, p, pf]);
            }
            out.write("table3.csv", &csv.into_bytes())?;
        }
        Target::Table4 => {
            let mut csv = Csv::new(&["harmonics", "alphas", "odd_residual", "even_residual", "within_2e-3"]);
            for k in (6..=16).step_by(2) {
                let c = table4_coefficients(k)?;
                let r = c.validate();
                let ok = r.max_residual() <= holopt::systems::PUBLISHED_RESIDUAL_TOL;
                out.say(format!("table4 K = {k:>2}: residuals ({:.1e}, {:.1e}) {}", r.odd_residual, r.even_residual, if ok { "ok" } else { "too large" }));
                let alphas: Vec<String> = c.alphas().iter().map(|a| a.to_string()).collect();
                csv.row(cells![k, alphas.join(";"), r.odd_residual, r.even_residual, ok.to_string()]);
            }
            out.write("table4.csv", &csv.into_bytes())?;
        }
        Target::BlochAverage => {
            let not = gate_catalog(GateName::Not);
            let mut csv = Csv::new(&["coeffs", "decoherence", "bloch_average"]);
            for (label, c) in [("table1", table1_coefficients(ens.name)), ("alternative", ensemble_alternative_coefficients())] {
                for (dec, sys) in [("on", ens.clone()), ("off", ens.lossless())] {
                    let b = bloch_average_fidelity(&sys, &not, &c, 0.0, BlochGrid::default(), &cfg())?;
                    out.say(format!("bloch-average {label}, decoherence {dec}: {b:.6}"));
                    csv.row(cells![label, dec, b]);
                }
            }
            out.write("bloch-average.csv", &csv.into_bytes())?;
        }
    }
    Ok(seeds)
}
