use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::units::Unit;

#[derive(Parser, Debug)]
#[command(name = "holopt", version, about = "Holonomic gate pulses for three-level systems: simulate, sweep, optimize")]
pub struct Cli {
    /// Worker threads for grid and population evaluation
    #[arg(long, global = true, env = "HOLOPT_WORKERS")]
    pub workers: Option<usize>,

    /// JSON file supplying any subcommand flag; flags on the command line win
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Directory for CSV, SVG and manifest outputs
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,

    /// Also draw SVG plots next to the CSV files
    #[arg(long, global = true)]
    pub svg: bool,

    /// Repeat for more log output
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Time evolution of one gate at one detuning
    Simulate(SimulateArgs),
    /// Final-time fidelity and spectator excitation over a detuning grid
    Sweep(SweepArgs),
    /// Multi-objective search over pulse weights
    Optimize(OptimizeArgs),
    /// Canned runs for the published figures and tables
    Reproduce(ReproduceArgs),
    /// Print presets, gates or coefficient sets as JSON
    Show(ShowArgs),
}

/// Everything that picks a system, gate and pulse.
#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct PulseArgs {
    #[arg(long, default_value = "ensemble-rei")]
    pub system: String,

    #[arg(long, default_value = "not")]
    pub gate: String,

    /// table1 | table3 | table4:K | baseline | alternative | a1,a2,…
    #[arg(long, default_value = "table1")]
    pub coeffs: String,

    /// Separate weights for the compensation pair (same syntax)
    #[arg(long)]
    pub comp_coeffs: Option<String>,

    /// Override Γ₁ in Hz (multiplied by 2π internally)
    #[arg(long)]
    pub gamma1: Option<f64>,

    /// Override Γ₂ in Hz (multiplied by 2π internally)
    #[arg(long)]
    pub gamma2: Option<f64>,

    /// Switch all decoherence off
    #[arg(long)]
    pub lossless: bool,

    #[arg(long, value_enum)]
    pub sigma2: Option<Sigma2Arg>,

    /// Force the compensation pair on or off
    #[arg(long)]
    pub compensation: Option<bool>,

    /// Override the segment duration, in seconds
    #[arg(long)]
    pub tau: Option<f64>,

    /// 0 | 1 | + | - | +i | -i | bloch:POLAR,AZIMUTH
    #[arg(long, default_value = "1")]
    pub initial: String,

    /// Integrator: adaptive or rk4:STEPS
    #[arg(long, default_value = "adaptive")]
    pub integrator: String,

    /// Largest adaptive step as a fraction of τ
    #[arg(long, default_value_t = 0.01)]
    pub max_step: f64,
}

#[derive(Copy, Clone, Debug, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sigma2Arg {
    LambdaRei,
    TransmonLadder,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub pulse: PulseArgs,

    /// Detuning, e.g. 170kHz or 2e6 (Hz when bare)
    #[arg(long, default_value = "0", conflicts_with_all = ["delta_khz", "delta_mhz"])]
    pub delta: String,

    #[arg(long)]
    pub delta_khz: Option<f64>,

    #[arg(long)]
    pub delta_mhz: Option<f64>,

    /// Interior samples per segment
    #[arg(long, default_value_t = 200)]
    pub samples: usize,

    /// Add the nine density-matrix entries to the CSV
    #[arg(long)]
    pub full_matrix: bool,

    /// Output file name inside --out-dir
    #[arg(long, default_value = "simulate.csv")]
    pub out: String,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub pulse: PulseArgs,

    /// Lower detuning (defaults per system)
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<String>,

    /// Upper detuning (defaults per system)
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<String>,

    #[arg(long, default_value_t = 121)]
    pub points: usize,

    /// Bare numbers in this command are kHz
    #[arg(long, conflicts_with = "mhz")]
    pub khz: bool,

    /// Bare numbers in this command are MHz
    #[arg(long)]
    pub mhz: bool,

    /// Report the robustness window at this fidelity (e.g. 0.996)
    #[arg(long)]
    pub threshold: Option<f64>,

    /// Report spectator excitation at ±this detuning
    #[arg(long, allow_hyphen_values = true)]
    pub report_at: Option<String>,

    /// Half-width of the window for the reported mean fidelity (default: whole grid)
    #[arg(long)]
    pub mean_window: Option<String>,

    #[arg(long, default_value = "sweep.csv")]
    pub out: String,
}

impl SweepArgs {
    pub fn unit(&self) -> Unit {
        match (self.khz, self.mhz) {
            (true, _) => Unit::KHz,
            (_, true) => Unit::MHz,
            _ => Unit::Hz,
        }
    }
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct OptimizeArgs {
    #[arg(long, default_value = "ensemble-rei")]
    pub system: String,

    #[arg(long, default_value = "not")]
    pub gate: String,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value_t = 50)]
    pub population: usize,

    #[arg(long, default_value_t = 300)]
    pub generations: usize,

    #[arg(long, default_value_t = 4)]
    pub harmonics: usize,

    #[arg(long, default_value_t = 0.9)]
    pub crossover_rate: f64,

    /// Per-gene probability (default 1/(K−2))
    #[arg(long)]
    pub mutation_rate: Option<f64>,

    /// Gaussian σ (default 0.1 × range width)
    #[arg(long)]
    pub mutation_scale: Option<f64>,

    /// Fraction of the final population exported as the top set
    #[arg(long, default_value_t = 0.3)]
    pub elite_fraction: f64,

    /// Coarse objective grids (7 and 4 points)
    #[arg(long)]
    pub fast_grids: bool,

    /// Switch all decoherence off
    #[arg(long)]
    pub lossless: bool,

    /// index=K | knee | min-objective1 | min-objective2 (repeatable)
    #[arg(long)]
    pub select: Vec<String>,

    #[arg(long, default_value = "front.csv")]
    pub out: String,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig9,
    Fig10,
    Fig11,
    Fig12,
    Table2,
    Table3,
    Table4,
    BlochAverage,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub target: Target,

    /// Re-run the searches instead of using published weights (slow)
    #[arg(long)]
    pub reoptimize: bool,

    /// Reduced search size for fig12 and --reoptimize (population 12, 30 generations, coarse grids)
    #[arg(long)]
    pub fast: bool,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum ShowWhat {
    Presets,
    Gates,
    Coefficients,
}

#[derive(Args, Debug, Clone)]
pub struct ShowArgs {
    #[arg(value_enum)]
    pub what: ShowWhat,
}
