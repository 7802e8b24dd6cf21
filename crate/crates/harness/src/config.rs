//! Experiment configuration files.
//!
//! Noise strengths are given in units of the gate drive: `Ω = π/τ` for the
//! one-qubit gate, `J` for the two-qubit gate.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use ddgeo_core::control::{DecouplingFrame1Q, DecouplingSequence2Q, PulseMode};
use ddgeo_core::engine::SimulationConfig;
use ddgeo_core::gate2q::{block_states, TwoQubitSchedule, CouplingShape};
use ddgeo_core::geometry::{orange_slice, PathSpec};
use ddgeo_core::matrix::{c, StateVector};
use ddgeo_core::noise::{BathCoupling, BathHamiltonian, EnvInit, NoiseModel, Topology};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, HarnessError, Result};

pub const DEFAULT_POINTS: usize = 41;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GateSpec {
    OneQubit(OneQubitGate),
    TwoQubit(TwoQubitGate),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneQubitGate {
    /// Geometric phase of the `z` rotation `exp(−iγσ_z)`; used when no path is given.
    #[serde(default = "default_gamma_1q")]
    pub gamma: f64,
    /// Explicit path; the orange slice for `gamma` otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathSpec>,
    pub nx: u32,
    pub nz: u32,
    #[serde(default = "one")]
    pub tau: f64,
    #[serde(default = "default_init_1q")]
    pub initial: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitGate {
    pub gamma: f64,
    #[serde(rename = "J", default = "one")]
    pub j: f64,
    #[serde(default)]
    pub shape: CouplingShape,
    pub pulse_mode: PulseMode,
    #[serde(default = "default_pulse_strength")]
    pub pulse_strength: f64,
    #[serde(default = "default_init_2q")]
    pub initial: String,
}

/// Noise block without the swept strength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct NoiseSettings {
    #[serde(default)]
    pub topology: Topology,
    #[serde(default)]
    pub bath_hamiltonian: BathHamiltonian,
    #[serde(default)]
    pub env_init: EnvInit,
    #[serde(default)]
    pub bath: BathCoupling,
}

impl NoiseSettings {
    /// Model with absolute strength `epsilon`.
    pub fn model(&self, epsilon: f64) -> NoiseModel {
        NoiseModel {
            epsilon,
            topology: self.topology,
            bath_hamiltonian: self.bath_hamiltonian.clone(),
            env_initial_state: self.env_init,
            coupling: self.bath.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub epsilon_min: f64,
    pub epsilon_max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

impl SweepSpec {
    /// Evenly spaced strengths in drive units, ascending.
    pub fn epsilons(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.epsilon_max
                } else {
                    self.epsilon_min + (self.epsilon_max - self.epsilon_min) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub gate: GateSpec,
    #[serde(default)]
    pub noise: NoiseSettings,
    pub sweep: SweepSpec,
    #[serde(default)]
    pub simulation: SimulationConfig,
    #[serde(default)]
    pub outputs: Outputs,
}

fn one() -> f64 {
    1.0
}

fn default_gamma_1q() -> f64 {
    PI / 8.0
}

fn default_pulse_strength() -> f64 {
    20.0
}

fn default_points() -> usize {
    DEFAULT_POINTS
}

fn default_init_1q() -> String {
    "plus-x".into()
}

fn default_init_2q() -> String {
    "10".into()
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.sweep;
        if !(s.epsilon_min.is_finite() && s.epsilon_min >= 0.0) {
            return Err(HarnessError::Config("epsilon_min must be >= 0".into()));
        }
        if !(s.epsilon_max.is_finite() && s.epsilon_max > s.epsilon_min) {
            return Err(HarnessError::Config("epsilon_max must exceed epsilon_min".into()));
        }
        if s.points < 2 {
            return Err(HarnessError::Config("a sweep needs at least 2 points".into()));
        }
        self.simulation.validate()?;
        match &self.gate {
            GateSpec::OneQubit(g) => {
                g.frame()?;
                g.path()?;
                parse_initial(&g.initial, 1)?;
                self.noise.model(0.0).validate(1)?;
            }
            GateSpec::TwoQubit(g) => {
                g.schedule()?;
                parse_initial(&g.initial, 2)?;
                self.noise.model(0.0).validate(2)?;
            }
        }
        Ok(())
    }

    /// Drive unit that converts configured strengths into absolute ones.
    pub fn drive_unit(&self) -> f64 {
        match &self.gate {
            GateSpec::OneQubit(g) => PI / g.tau,
            GateSpec::TwoQubit(g) => g.j,
        }
    }
}

impl OneQubitGate {
    pub fn frame(&self) -> Result<DecouplingFrame1Q> {
        Ok(DecouplingFrame1Q::new(self.nx, self.nz, self.tau)?)
    }

    pub fn path(&self) -> Result<PathSpec> {
        match &self.path {
            Some(p) => {
                let d = p.total_duration();
                if (d - self.tau).abs() > 1e-12 * self.tau {
                    return Err(HarnessError::Config(format!(
                        "path lasts {d}, gate period is {}",
                        self.tau
                    )));
                }
                Ok(p.clone())
            }
            None => Ok(orange_slice(self.gamma, self.tau)),
        }
    }
}

impl TwoQubitGate {
    pub fn sequence(&self) -> Result<DecouplingSequence2Q> {
        Ok(DecouplingSequence2Q::new(PI / (4.0 * self.j), self.pulse_mode, self.pulse_strength)?)
    }

    pub fn schedule(&self) -> Result<TwoQubitSchedule> {
        Ok(TwoQubitSchedule::new(self.gamma, self.j, self.shape, &self.sequence()?)?)
    }
}

/// Named initial states.
///
/// One qubit: `0`, `1`, `plus-x`, `minus-x`, `plus-y`, `minus-y`.
/// Two qubits: `00`, `01`, `10`, `11`, and `plus`/`minus` for
/// `(|01⟩ ± i|10⟩)/√2`.
pub fn parse_initial(name: &str, qubits: usize) -> Result<StateVector> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let state = match (qubits, name) {
        (1, "0") => StateVector::basis(2, 0),
        (1, "1") => StateVector::basis(2, 1),
        (1, "plus-x") => StateVector::new(vec![c(h, 0.0), c(h, 0.0)]),
        (1, "minus-x") => StateVector::new(vec![c(h, 0.0), c(-h, 0.0)]),
        (1, "plus-y") => StateVector::new(vec![c(h, 0.0), c(0.0, h)]),
        (1, "minus-y") => StateVector::new(vec![c(h, 0.0), c(0.0, -h)]),
        (2, "00") => StateVector::basis(4, 0),
        (2, "01") => StateVector::basis(4, 1),
        (2, "10") => StateVector::basis(4, 2),
        (2, "11") => StateVector::basis(4, 3),
        (2, "plus") => block_states().0,
        (2, "minus") => block_states().1,
        _ => return Err(HarnessError::InitialState(name.to_string())),
    };
    Ok(state)
}
