//! Two-objective genetic search over pulse weights.
//!
//! Chromosomes hold the `K − 2` free weights; the last two weights follow
//! from the endpoint constraints (see [`repair_coefficients`]). Ranking uses
//! non-dominated sorting with crowding distance.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::IntegratorConfig;
use crate::error::{Error, Result};
use crate::metrics::detuning_sweep;
use crate::parallel::par_map;
use crate::pulse::{repair_coefficients, PulseCoefficients};
use crate::quantum::QubitState;
use crate::systems::{GateSpec, SystemPreset};

/// `(mean infidelity, mean off-resonant excitation)`, both minimised.
pub type Objectives = [f64; 2];

const WORST: Objectives = [1.0, 1.0];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub free_params: Vec<f64>,
    pub coeffs: PulseCoefficients,
    pub objectives: Option<Objectives>,
}

impl Individual {
    pub fn new(free_params: Vec<f64>, harmonics: usize, tau: f64) -> Result<Self> {
        let coeffs = repair_coefficients(&free_params, harmonics, tau)?;
        Ok(Self { free_params, coeffs, objectives: None })
    }

    /// Objectives, or the worst value when unevaluated.
    pub fn obj(&self) -> Objectives {
        self.objectives.unwrap_or(WORST)
    }
}

/// Detuning grids used inside the objectives.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveGrids {
    pub robustness_points: usize,
    /// Points on the positive side; the mirrored side is added.
    pub offres_points: usize,
}

impl Default for ObjectiveGrids {
    fn default() -> Self {
        Self { robustness_points: 21, offres_points: 16 }
    }
}

impl ObjectiveGrids {
    pub fn fast() -> Self {
        Self { robustness_points: 7, offres_points: 4 }
    }
}

/// Mean `1 − F` from `|1⟩` over the robustness window and mean `P₀ + P_e`
/// over `±offres_range`.
///
/// A failed evaluation scores 1 on the affected objective. Without an
/// off-resonant window the second objective is 0.
pub fn evaluate_objectives(
    coeffs: &PulseCoefficients,
    system: &SystemPreset,
    gate: &GateSpec,
    grids: ObjectiveGrids,
    cfg: &IntegratorConfig,
) -> Objectives {
    let robust = system.robustness_range.grid(grids.robustness_points);
    let offres: Vec<f64> = match system.offres_range {
        Some(r) if grids.offres_points > 0 => {
            let pos = r.grid(grids.offres_points);
            pos.iter().copied().chain(pos.iter().map(|d| -d)).collect()
        }
        _ => vec![],
    };
    let grid: Vec<f64> = robust.iter().chain(&offres).copied().collect();
    let sweep = match detuning_sweep(system, gate, coeffs, &grid, &QubitState::one(), cfg) {
        Ok(s) => s,
        Err(e) => {
            log::warn!("objective evaluation failed: {e}");
            return WORST;
        }
    };
    let n = robust.len();
    let avg = |xs: &[f64]| -> f64 {
        if xs.iter().any(|x| !x.is_finite()) {
            log::warn!("objective evaluation hit an integrator failure");
            return 1.0;
        }
        xs.iter().sum::<f64>() / xs.len() as f64
    };
    let infid: Vec<f64> = sweep.fidelity[..n].iter().map(|f| 1.0 - f).collect();
    let o1 = if n == 0 { 0.0 } else { avg(&infid) };
    let o2 = if offres.is_empty() { 0.0 } else { avg(&sweep.p_off[n..]) };
    [o1.clamp(0.0, 1.0), o2.clamp(0.0, 1.0)]
}

/// `a` is no worse than `b` everywhere and strictly better somewhere.
pub fn dominates(a: &Objectives, b: &Objectives) -> bool {
    a[0] <= b[0] && a[1] <= b[1] && (a[0] < b[0] || a[1] < b[1])
}

/// Non-dominated sorting. Returns fronts of indices into `objs`.
pub fn pareto_rank(objs: &[Objectives]) -> Vec<Vec<usize>> {
    let n = objs.len();
    let mut dominated_by = vec![0usize; n];
    let mut dominates_list = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates(&objs[i], &objs[j]) {
                dominates_list[i].push(j);
                dominated_by[j] += 1;
            } else if dominates(&objs[j], &objs[i]) {
                dominates_list[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Crowding distance of each member of `front` (same order).
pub fn crowding_distance(front: &[Objectives]) -> Vec<f64> {
    let n = front.len();
    let mut dist = vec![0.0; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    for m in 0..2 {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| front[a][m].total_cmp(&front[b][m]).then(a.cmp(&b)));
        let lo = front[order[0]][m];
        let hi = front[order[n - 1]][m];
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        let span = hi - lo;
        if span <= 0.0 {
            continue;
        }
        for w in 1..n - 1 {
            dist[order[w]] += (front[order[w + 1]][m] - front[order[w - 1]][m]) / span;
        }
    }
    dist
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GAConfig {
    pub population_size: usize,
    pub generations: usize,
    pub param_range: (f64, f64),
    pub crossover_rate: f64,
    /// Per-gene probability; `None` means `1/(K − 2)`.
    pub mutation_rate: Option<f64>,
    /// Gaussian σ; `None` means a tenth of the range width.
    pub mutation_scale: Option<f64>,
    pub elite_fraction: f64,
    pub rng_seed: u64,
    pub harmonics: usize,
    pub grids: ObjectiveGrids,
    pub integrator: IntegratorConfig,
}

impl Default for GAConfig {
    fn default() -> Self {
        Self {
            population_size: 50,
            generations: 300,
            param_range: (-0.8, 0.8),
            crossover_rate: 0.9,
            mutation_rate: None,
            mutation_scale: None,
            elite_fraction: 0.3,
            rng_seed: 0,
            harmonics: 4,
            grids: ObjectiveGrids::default(),
            integrator: IntegratorConfig::default(),
        }
    }
}

impl GAConfig {
    pub fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.population_size < 2 {
            return bad("population size must be at least 2");
        }
        let (lo, hi) = self.param_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return bad("parameter range must be finite with lo < hi");
        }
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !unit(self.crossover_rate) || !unit(self.elite_fraction) || !self.mutation_rate.is_none_or(unit) {
            return bad("rates must lie in [0, 1]");
        }
        if self.mutation_scale.is_some_and(|s| !(s.is_finite() && s >= 0.0)) {
            return bad("mutation scale must be non-negative");
        }
        if self.harmonics < 4 || !self.harmonics.is_multiple_of(2) || self.harmonics > crate::pulse::MAX_HARMONICS {
            return bad("harmonic count must be even and between 4 and 16");
        }
        self.integrator.check()
    }

    pub fn genes(&self) -> usize {
        self.harmonics - 2
    }

    pub fn effective_mutation_rate(&self) -> f64 {
        self.mutation_rate.unwrap_or(1.0 / self.genes() as f64)
    }

    pub fn effective_mutation_scale(&self) -> f64 {
        self.mutation_scale.unwrap_or(0.1 * (self.param_range.1 - self.param_range.0))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_objective1: f64,
    pub best_objective2: f64,
    pub front_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub run_id: String,
    pub config: GAConfig,
    pub system: SystemPreset,
    pub gate: GateSpec,
    pub crate_version: String,
}

/// Final non-dominated set plus the top fraction of the last population.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParetoFront {
    /// Front 0, sorted by objective 1.
    pub individuals: Vec<Individual>,
    /// Best `elite_fraction` of the final population by rank then crowding,
    /// sorted by objective 1.
    pub top_set: Vec<Individual>,
    pub history: Vec<GenerationRecord>,
    pub provenance: Provenance,
}

impl ParetoFront {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// True when no member of `individuals` dominates another.
    pub fn is_non_dominated(&self) -> bool {
        let o: Vec<Objectives> = self.individuals.iter().map(Individual::obj).collect();
        o.iter().all(|a| o.iter().all(|b| !dominates(a, b)))
    }
}

fn run_id(cfg: &GAConfig, system: &SystemPreset, gate: &GateSpec) -> Result<String> {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(&(cfg, system, gate))?);
    h.update(env!("CARGO_PKG_VERSION").as_bytes());
    let digest = h.finalize();
    Ok(digest.iter().take(6).map(|b| format!("{b:02x}")).collect())
}

fn evaluate_all(pop: &mut [Individual], system: &SystemPreset, gate: &GateSpec, cfg: &GAConfig) {
    let (lo, hi) = cfg.param_range;
    let todo: Vec<usize> = (0..pop.len()).filter(|&i| pop[i].objectives.is_none()).collect();
    let results = par_map(&todo, |&i| {
        let ind = &pop[i];
        // Repaired weights outside the search box are infeasible.
        if ind.coeffs.alphas().iter().any(|a| *a < lo - 1e-12 || *a > hi + 1e-12) {
            return WORST;
        }
        evaluate_objectives(&ind.coeffs, system, gate, cfg.grids, &cfg.integrator)
    });
    for (i, o) in todo.into_iter().zip(results) {
        pop[i].objectives = Some(o);
    }
}

/// Rank and crowding for each member of `pop`.
fn rank_and_crowd(pop: &[Individual]) -> (Vec<usize>, Vec<f64>) {
    let objs: Vec<Objectives> = pop.iter().map(Individual::obj).collect();
    let mut rank = vec![0; pop.len()];
    let mut crowd = vec![0.0; pop.len()];
    for (r, front) in pareto_rank(&objs).iter().enumerate() {
        let fo: Vec<Objectives> = front.iter().map(|&i| objs[i]).collect();
        for (&i, d) in front.iter().zip(crowding_distance(&fo)) {
            rank[i] = r;
            crowd[i] = d;
        }
    }
    (rank, crowd)
}

/// Indices of `pop` ordered best first: lower rank, then larger crowding,
/// then lower objective 1.
fn survival_order(pop: &[Individual]) -> Vec<usize> {
    let (rank, crowd) = rank_and_crowd(pop);
    let mut order: Vec<usize> = (0..pop.len()).collect();
    order.sort_by(|&a, &b| {
        rank[a]
            .cmp(&rank[b])
            .then(crowd[b].total_cmp(&crowd[a]))
            .then(pop[a].obj()[0].total_cmp(&pop[b].obj()[0]))
            .then(a.cmp(&b))
    });
    order
}

fn tournament(rng: &mut ChaCha8Rng, rank: &[usize], crowd: &[f64]) -> usize {
    let a = rng.gen_range(0..rank.len());
    let b = rng.gen_range(0..rank.len());
    match rank[a].cmp(&rank[b]) {
        Ordering::Less => a,
        Ordering::Greater => b,
        Ordering::Equal if crowd[b] > crowd[a] => b,
        Ordering::Equal => a,
    }
}

fn record(generation: usize, pop: &[Individual]) -> GenerationRecord {
    let objs: Vec<Objectives> = pop.iter().map(Individual::obj).collect();
    GenerationRecord {
        generation,
        best_objective1: objs.iter().map(|o| o[0]).fold(f64::INFINITY, f64::min),
        best_objective2: objs.iter().map(|o| o[1]).fold(f64::INFINITY, f64::min),
        front_size: pareto_rank(&objs).first().map_or(0, Vec::len),
    }
}

fn sorted_by_obj1(mut v: Vec<Individual>) -> Vec<Individual> {
    v.sort_by(|a, b| a.obj()[0].total_cmp(&b.obj()[0]).then(a.obj()[1].total_cmp(&b.obj()[1])));
    v
}

/// Elitism keeps clones around; the exported sets list each point once.
fn distinct(v: Vec<Individual>) -> Vec<Individual> {
    let mut out: Vec<Individual> = Vec::with_capacity(v.len());
    for ind in v {
        if !out.iter().any(|o| o.free_params == ind.free_params) {
            out.push(ind);
        }
    }
    out
}

/// Runs the search. Deterministic for a given configuration and seed.
pub fn run_ga(system: &SystemPreset, gate: &GateSpec, cfg: &GAConfig) -> Result<ParetoFront> {
    cfg.check()?;
    system.check()?;
    let (lo, hi) = cfg.param_range;
    let genes = cfg.genes();
    let tau = system.tau;
    let p_mut = cfg.effective_mutation_rate();
    let noise = Normal::new(0.0, cfg.effective_mutation_scale())
        .map_err(|e| Error::InvalidArgument(format!("mutation scale: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let n = cfg.population_size;

    let mut pop = (0..n)
        .map(|_| Individual::new((0..genes).map(|_| rng.gen_range(lo..=hi)).collect(), cfg.harmonics, tau))
        .collect::<Result<Vec<_>>>()?;
    evaluate_all(&mut pop, system, gate, cfg);
    let mut history = vec![record(0, &pop)];

    for generation in 1..=cfg.generations {
        let (rank, crowd) = rank_and_crowd(&pop);
        let mut children = Vec::with_capacity(n);
        while children.len() < n {
            let pa = &pop[tournament(&mut rng, &rank, &crowd)].free_params;
            let pb = &pop[tournament(&mut rng, &rank, &crowd)].free_params;
            let (mut ca, mut cb) = (pa.clone(), pb.clone());
            if rng.gen::<f64>() < cfg.crossover_rate {
                // BLX-0.5
                for g in 0..genes {
                    let (x, y) = (pa[g].min(pb[g]), pa[g].max(pb[g]));
                    let ext = 0.5 * (y - x);
                    ca[g] = rng.gen_range((x - ext)..=(y + ext));
                    cb[g] = rng.gen_range((x - ext)..=(y + ext));
                }
            }
            for child in [&mut ca, &mut cb] {
                for v in child.iter_mut() {
                    if rng.gen::<f64>() < p_mut {
                        *v += noise.sample(&mut rng);
                    }
                    *v = v.clamp(lo, hi);
                }
            }
            children.push(Individual::new(ca, cfg.harmonics, tau)?);
            if children.len() < n {
                children.push(Individual::new(cb, cfg.harmonics, tau)?);
            }
        }
        evaluate_all(&mut children, system, gate, cfg);
        pop.extend(children);
        let keep = survival_order(&pop);
        let mut merged: Vec<Option<Individual>> = pop.into_iter().map(Some).collect();
        pop = keep[..n].iter().map(|&i| merged[i].take().expect("unique index")).collect();
        let rec = record(generation, &pop);
        log::debug!(
            "generation {generation}: best objectives ({:.6e}, {:.6e}), front {}",
            rec.best_objective1,
            rec.best_objective2,
            rec.front_size
        );
        history.push(rec);
    }

    let order = survival_order(&pop);
    let objs: Vec<Objectives> = pop.iter().map(Individual::obj).collect();
    let front0 = pareto_rank(&objs).swap_remove(0);
    let n_top = ((cfg.elite_fraction * n as f64).ceil() as usize).clamp(1, n);
    let top_set = order[..n_top].iter().map(|&i| pop[i].clone()).collect();
    let individuals = front0.iter().map(|&i| pop[i].clone()).collect();
    Ok(ParetoFront {
        individuals: distinct(sorted_by_obj1(individuals)),
        top_set: distinct(sorted_by_obj1(top_set)),
        history,
        provenance: Provenance {
            run_id: run_id(cfg, system, gate)?,
            config: cfg.clone(),
            system: system.clone(),
            gate: *gate,
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionStrategy {
    /// 0-based position in objective-1 order.
    Index(usize),
    /// Largest perpendicular distance from the chord joining the extremes.
    Knee,
    MinObjective1,
    MinObjective2,
}

impl std::str::FromStr for SelectionStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if let Some(k) = s.strip_prefix("index=").or_else(|| s.strip_prefix("index:")) {
            return k
                .parse()
                .map(Self::Index)
                .map_err(|_| Error::InvalidArgument(format!("bad index `{k}`")));
        }
        match s.as_str() {
            "knee" => Ok(Self::Knee),
            "min-objective1" | "min1" | "min-infidelity" => Ok(Self::MinObjective1),
            "min-objective2" | "min2" | "min-offres" => Ok(Self::MinObjective2),
            _ => Err(Error::Unknown { kind: "selection strategy", name: s }),
        }
    }
}

/// Picks one member of a list sorted by objective 1.
pub fn select_from(points: &[Individual], strategy: SelectionStrategy) -> Result<&Individual> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("front is empty".into()));
    }
    let o: Vec<Objectives> = points.iter().map(Individual::obj).collect();
    let idx = match strategy {
        SelectionStrategy::Index(k) if k < points.len() => k,
        SelectionStrategy::Index(k) => return Err(Error::IndexOutOfRange { index: k, len: points.len() }),
        SelectionStrategy::MinObjective1 => argmin(&o, 0),
        SelectionStrategy::MinObjective2 => argmin(&o, 1),
        SelectionStrategy::Knee => {
            let (a, b) = (o[argmin(&o, 0)], o[argmin(&o, 1)]);
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let len = dx.hypot(dy);
            if len == 0.0 {
                0
            } else {
                let dist = |p: &Objectives| ((p[0] - a[0]) * dy - (p[1] - a[1]) * dx).abs() / len;
                (0..o.len()).fold(0, |best, i| if dist(&o[i]) > dist(&o[best]) { i } else { best })
            }
        }
    };
    Ok(&points[idx])
}

fn argmin(o: &[Objectives], m: usize) -> usize {
    (0..o.len()).fold(0, |best, i| if o[i][m] < o[best][m] { i } else { best })
}

pub fn select_solution(front: &ParetoFront, strategy: SelectionStrategy) -> Result<&Individual> {
    select_from(&front.individuals, strategy)
}
