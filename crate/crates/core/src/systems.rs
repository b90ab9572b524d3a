//! Physical platform presets, the gate catalog, and published coefficient sets.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{DecoherenceProfile, Sigma2Variant};
use crate::error::{Error, Result};
use crate::pulse::PulseCoefficients;
use crate::quantum::GateParams;

/// Converts an ordinary frequency (Hz) to angular units (rad/s).
pub fn hz_to_angular(hz: f64) -> f64 {
    2.0 * PI * hz
}

pub fn angular_to_hz(w: f64) -> f64 {
    w / (2.0 * PI)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemName {
    EnsembleRei,
    SingleRei,
    Transmon,
}

impl SystemName {
    pub const ALL: [SystemName; 3] = [SystemName::EnsembleRei, SystemName::SingleRei, SystemName::Transmon];

    pub fn as_str(&self) -> &'static str {
        match self {
            SystemName::EnsembleRei => "ensemble-rei",
            SystemName::SingleRei => "single-rei",
            SystemName::Transmon => "transmon",
        }
    }
}

impl fmt::Display for SystemName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SystemName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "ensemble-rei" | "ensemble" => Ok(SystemName::EnsembleRei),
            "single-rei" | "single" => Ok(SystemName::SingleRei),
            "transmon" | "superconducting" => Ok(SystemName::Transmon),
            _ => Err(Error::Unknown { kind: "system", name: s.to_string() }),
        }
    }
}

/// Closed detuning interval in Hz.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetuningRange {
    pub lo_hz: f64,
    pub hi_hz: f64,
}

impl DetuningRange {
    pub fn new(lo_hz: f64, hi_hz: f64) -> Result<Self> {
        if !(lo_hz.is_finite() && hi_hz.is_finite() && lo_hz <= hi_hz) {
            return Err(Error::InvalidArgument(format!("detuning range [{lo_hz}, {hi_hz}] is not well-ordered")));
        }
        Ok(Self { lo_hz, hi_hz })
    }

    pub fn symmetric(half_width_hz: f64) -> Self {
        Self { lo_hz: -half_width_hz, hi_hz: half_width_hz }
    }

    /// `points` uniformly spaced values including both ends.
    pub fn grid(&self, points: usize) -> Vec<f64> {
        uniform_grid(self.lo_hz, self.hi_hz, points)
    }
}

/// `n` points from `lo` to `hi` inclusive; a single point sits at the midpoint.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemPreset {
    pub name: SystemName,
    /// Segment duration in seconds.
    pub tau: f64,
    pub profile: DecoherenceProfile,
    /// Whether the compensation pair follows the gate pulses.
    pub compensation: bool,
    /// Detuning window for the robustness objective.
    pub robustness_range: DetuningRange,
    /// Detuning window (positive side) for the off-resonant objective.
    pub offres_range: Option<DetuningRange>,
    /// Detuning magnitude from which spectator excitation is reported.
    pub offres_threshold_hz: Option<f64>,
}

impl SystemPreset {
    pub fn check(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::InvalidArgument("preset τ must be positive".into()));
        }
        self.profile.check()?;
        DetuningRange::new(self.robustness_range.lo_hz, self.robustness_range.hi_hz)?;
        if let Some(r) = self.offres_range {
            DetuningRange::new(r.lo_hz, r.hi_hz)?;
        }
        Ok(())
    }

    pub fn lossless(&self) -> Self {
        Self { profile: DecoherenceProfile::lossless(self.profile.sigma2_variant), ..self.clone() }
    }
}

pub fn preset(name: SystemName) -> SystemPreset {
    match name {
        SystemName::EnsembleRei => SystemPreset {
            name,
            tau: 0.75e-6,
            profile: DecoherenceProfile {
                gamma1: hz_to_angular(0.97e3),
                gamma2: hz_to_angular(1.21e3),
                gamma3: 0.0,
                sigma2_variant: Sigma2Variant::LambdaRei,
            },
            compensation: true,
            robustness_range: DetuningRange::symmetric(170e3),
            offres_range: Some(DetuningRange { lo_hz: 3.5e6, hi_hz: 5e6 }),
            offres_threshold_hz: Some(3.5e6),
        },
        SystemName::SingleRei => SystemPreset {
            name,
            tau: 1e-6,
            profile: DecoherenceProfile {
                gamma1: hz_to_angular(80.0),
                gamma2: hz_to_angular(60.0),
                gamma3: 0.0,
                sigma2_variant: Sigma2Variant::LambdaRei,
            },
            compensation: false,
            robustness_range: DetuningRange { lo_hz: 0.0, hi_hz: 0.0 },
            offres_range: Some(DetuningRange { lo_hz: 8.9e6, hi_hz: 12e6 }),
            offres_threshold_hz: Some(8.9e6),
        },
        SystemName::Transmon => SystemPreset {
            name,
            tau: 40e-9,
            profile: DecoherenceProfile {
                gamma1: hz_to_angular(3e3),
                gamma2: hz_to_angular(3e3),
                gamma3: 0.0,
                sigma2_variant: Sigma2Variant::TransmonLadder,
            },
            compensation: true,
            robustness_range: DetuningRange::symmetric(9.3e6),
            offres_range: None,
            offres_threshold_hz: None,
        },
    }
}

pub fn preset_by_name(name: &str) -> Result<SystemPreset> {
    Ok(preset(name.parse()?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GateName {
    Not,
    Hadamard,
    SigmaY,
    SigmaZ,
}

impl GateName {
    pub const ALL: [GateName; 4] = [GateName::Not, GateName::Hadamard, GateName::SigmaY, GateName::SigmaZ];

    pub fn as_str(&self) -> &'static str {
        match self {
            GateName::Not => "not",
            GateName::Hadamard => "hadamard",
            GateName::SigmaY => "sigma-y",
            GateName::SigmaZ => "sigma-z",
        }
    }
}

impl fmt::Display for GateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GateName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "not" | "x" | "sigma-x" => Ok(GateName::Not),
            "hadamard" | "h" => Ok(GateName::Hadamard),
            "sigma-y" | "y" => Ok(GateName::SigmaY),
            "sigma-z" | "z" => Ok(GateName::SigmaZ),
            _ => Err(Error::Unknown { kind: "gate", name: s.to_string() }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateSpec {
    pub name: GateName,
    pub params: GateParams,
}

pub fn gate_catalog(name: GateName) -> GateSpec {
    let (theta, phi, beta) = match name {
        GateName::Not => (FRAC_PI_2, 0.0, PI),
        GateName::Hadamard => (FRAC_PI_4, 0.0, PI),
        GateName::SigmaY => (FRAC_PI_2, FRAC_PI_2, PI),
        GateName::SigmaZ => (0.0, 0.0, PI),
    };
    GateSpec { name, params: GateParams { theta, phi, beta } }
}

pub fn gate_by_name(name: &str) -> Result<GateSpec> {
    Ok(gate_catalog(name.parse()?))
}

/// NOT-gate optima per platform.
pub const TABLE1: [(SystemName, [f64; 4]); 3] = [
    (SystemName::EnsembleRei, [-0.6955, -0.1966, 0.2318, -0.0267]),
    (SystemName::SingleRei, [-0.0096, -0.1317, 0.0032, -0.0586]),
    (SystemName::Transmon, [-0.8000, -0.0365, 0.2667, -0.1068]),
];

/// Per-gate optima for the ensemble platform.
pub const TABLE3: [(GateName, [f64; 4]); 4] = [
    (GateName::Not, [-0.6955, -0.1966, 0.2318, -0.0267]),
    (GateName::Hadamard, [-0.7338, 0.0024, 0.2449, -0.1261]),
    (GateName::SigmaY, [-0.8000, -0.0753, 0.2667, -0.0873]),
    (GateName::SigmaZ, [0.7261, -0.0631, -0.2420, -0.0934]),
];

/// Ensemble optima for larger harmonic counts.
pub const TABLE4: [&[f64]; 6] = [
    &[0.0280, 0.1902, 0.0070, -0.7983, -0.0098, 0.3854],
    &[0.8000, -0.0133, -0.0667, -0.0843, -0.1021, -0.0092, -0.0128, -0.0102],
    &[0.0417, -0.0958, -0.0051, -0.1655, 0.0270, -0.2552, 0.0013, 0.8000, -0.0190, -0.4515],
    &[
        -0.0156, -0.0892, 0.0133, -0.1770, 0.0107, 0.7538, -0.0042, -0.4066, -0.0206, 0.6352, 0.0124, -0.6029,
    ],
    &[
        -0.0080, -0.2069, 0.0046, -0.0650, 0.0127, -0.0687, 0.0614, -0.0907, -0.0256, -0.1017, 0.0226, 0.5747,
        -0.0398, -0.3262,
    ],
    &[
        -0.8000, -0.0000, 0.2702, 0.0000, -0.0001, 0.0000, -0.0001, -0.0000, -0.0001, -0.0000, -0.0002, -0.0000,
        -0.0002, 0.0000, -0.0002, -0.0312,
    ],
];

/// Ensemble weights tuned for resonant fidelity only.
pub const ENSEMBLE_ALTERNATIVE: [f64; 4] = [-0.1547, -0.5553, 0.0516, 0.1527];

/// Published four-decimal weights can miss the constraints by rounding.
pub const PUBLISHED_RESIDUAL_TOL: f64 = 2e-3;

pub fn table1_coefficients(name: SystemName) -> PulseCoefficients {
    let row = TABLE1.iter().find(|(n, _)| *n == name).map(|(_, r)| r).expect("every system has a row");
    PulseCoefficients::new(row.to_vec(), preset(name).tau).expect("published row is well-formed")
}

pub fn table3_coefficients(gate: GateName) -> PulseCoefficients {
    let row = TABLE3.iter().find(|(n, _)| *n == gate).map(|(_, r)| r).expect("every gate has a row");
    PulseCoefficients::new(row.to_vec(), preset(SystemName::EnsembleRei).tau).expect("published row is well-formed")
}

/// Published weights for `harmonics ∈ {6, 8, …, 16}` at the ensemble τ.
pub fn table4_coefficients(harmonics: usize) -> Result<PulseCoefficients> {
    let row = TABLE4
        .iter()
        .find(|r| r.len() == harmonics)
        .ok_or_else(|| Error::Unknown { kind: "harmonic count", name: harmonics.to_string() })?;
    PulseCoefficients::new(row.to_vec(), preset(SystemName::EnsembleRei).tau)
}

pub fn ensemble_alternative_coefficients() -> PulseCoefficients {
    PulseCoefficients::new(ENSEMBLE_ALTERNATIVE.to_vec(), preset(SystemName::EnsembleRei).tau)
        .expect("published row is well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{gate_unitary, QubitUnitary};
    use num_complex::Complex64 as C64;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn preset_values() {
        let e = preset(SystemName::EnsembleRei);
        assert_eq!(e.tau, 0.75e-6);
        assert!((e.profile.gamma1 - 2.0 * PI * 970.0).abs() < 1e-9);
        assert!((e.profile.gamma2 - 2.0 * PI * 1210.0).abs() < 1e-9);
        assert!(e.compensation);
        assert_eq!(e.robustness_range, DetuningRange::symmetric(170e3));
        assert!(!preset(SystemName::SingleRei).compensation);
        let t = preset(SystemName::Transmon);
        assert_eq!(t.profile.gamma1, t.profile.gamma2);
        assert!((t.profile.gamma1 - 2.0 * PI * 3e3).abs() < 1e-9);
        assert_eq!(t.profile.sigma2_variant, Sigma2Variant::TransmonLadder);
        for n in SystemName::ALL {
            preset(n).check().unwrap();
            assert_eq!(preset(n).profile.gamma3, 0.0);
        }
    }

    #[test]
    fn names_parse() {
        assert_eq!("ensemble-rei".parse::<SystemName>().unwrap(), SystemName::EnsembleRei);
        assert_eq!("Transmon".parse::<SystemName>().unwrap(), SystemName::Transmon);
        assert!("ion-trap".parse::<SystemName>().is_err());
        assert_eq!("sigma_y".parse::<GateName>().unwrap(), GateName::SigmaY);
        assert!("cnot".parse::<GateName>().is_err());
        for g in GateName::ALL {
            assert_eq!(g.as_str().parse::<GateName>().unwrap(), g);
        }
    }

    fn pauli(g: GateName) -> QubitUnitary {
        let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        QubitUnitary(match g {
            GateName::Not => [[z, o], [o, z]],
            GateName::SigmaY => [[z, -i], [i, z]],
            GateName::SigmaZ => [[o, z], [z, -o]],
            GateName::Hadamard => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
        })
    }

    #[test]
    fn catalog_reproduces_standard_gates() {
        for g in GateName::ALL {
            let u = gate_unitary(&gate_catalog(g).params);
            assert!(u.unitarity_defect() < 1e-12);
            assert!(u.phase_insensitive_distance(&pauli(g)) < 1e-12, "{g}");
        }
        // σ_y comes out exactly, not only up to phase
        let u = gate_unitary(&gate_catalog(GateName::SigmaY).params);
        for i in 0..2 {
            for j in 0..2 {
                assert!((u.0[i][j] - pauli(GateName::SigmaY).0[i][j]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn published_rows_pass_validation() {
        let rows = TABLE1
            .iter()
            .filter(|(n, _)| *n != SystemName::SingleRei)
            .map(|(_, r)| r.to_vec())
            .chain(TABLE3.iter().map(|(_, r)| r.to_vec()))
            .chain(TABLE4.iter().map(|r| r.to_vec()))
            .chain(std::iter::once(ENSEMBLE_ALTERNATIVE.to_vec()));
        for r in rows {
            let check = PulseCoefficients::new(r.clone(), 1.0).unwrap().validate();
            assert!(check.max_residual() <= PUBLISHED_RESIDUAL_TOL, "{r:?}: {check:?}");
        }
    }

    #[test]
    fn single_rei_row_misses_even_constraint_by_rounding() {
        let check = table1_coefficients(SystemName::SingleRei).validate();
        assert!(check.odd_residual.abs() < 1e-12);
        assert!((check.even_residual.abs() - 2.2e-3).abs() < 1e-9);
    }

    #[test]
    fn table_lookups() {
        assert_eq!(table1_coefficients(SystemName::SingleRei).alphas(), &[-0.0096, -0.1317, 0.0032, -0.0586]);
        assert_eq!(table1_coefficients(SystemName::Transmon).tau(), 40e-9);
        assert_eq!(table3_coefficients(GateName::SigmaZ).alphas()[0], 0.7261);
        assert_eq!(table4_coefficients(16).unwrap().harmonics(), 16);
        assert!(table4_coefficients(4).is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(uniform_grid(-1.0, 1.0, 3), vec![-1.0, 0.0, 1.0]);
        assert_eq!(uniform_grid(2.0, 4.0, 1), vec![3.0]);
        assert!(DetuningRange::new(1.0, 0.0).is_err());
    }
}
