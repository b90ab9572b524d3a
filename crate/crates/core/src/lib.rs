//! Non-adiabatic holonomic single-qubit gates in three-level Λ systems.
//!
//! The basis is ordered `(|0⟩, |e⟩, |1⟩)`; the qubit lives on `|0⟩, |1⟩`.
//! Times are in seconds, Rabi frequencies and detunings inside the dynamics
//! are angular (rad/s). Public APIs that take detunings in Hz say so in the
//! parameter name.

// index loops read better for fixed 3×3 algebra
#![allow(clippy::needless_range_loop)]

pub mod dynamics;
pub mod error;
pub mod integrate;
pub mod metrics;
pub mod optimizer;
pub mod parallel;
pub mod pulse;
pub mod quantum;
pub mod systems;

pub use dynamics::{
    evolve, evolve_final, lindblad_rhs, qubit_state_fidelity, state_fidelity, target_state, DecoherenceProfile,
    IntegrationMethod, IntegratorConfig, Sigma2Variant, Trajectory,
};
pub use error::{Error, Result};
pub use metrics::{
    bloch_average_fidelity, detuning_sweep, off_resonant_excitation, robustness_window, sensitivity_scan, BlochGrid,
    SensitivitySurface, SweepResult,
};
pub use optimizer::{
    crowding_distance, dominates, evaluate_objectives, pareto_rank, run_ga, select_solution, GAConfig, Individual,
    ObjectiveGrids, ParetoFront, SelectionStrategy,
};
pub use pulse::{
    build_schedule, compensated_schedule, compensation_schedule, envelope, gate_schedule, rabi_pair,
    repair_coefficients, validate_coefficients, PulseCoefficients, PulseSchedule, Segment,
};
pub use quantum::{
    bright_dark_states, gate_unitary, hamiltonian, Complex3x3, DensityMatrix, GateParams, PureState3, QubitState,
    QubitUnitary,
};
pub use systems::{
    gate_by_name, gate_catalog, hz_to_angular, preset, preset_by_name, DetuningRange, GateName, GateSpec, SystemName,
    SystemPreset,
};
