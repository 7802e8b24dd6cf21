//! Noise-strength sweeps comparing protected and unprotected gates.

use ddgeo_core::control::DecouplingFrame1Q;
use ddgeo_core::engine::{run_1q_experiment, run_2q_experiment, SimulationConfig, SimulationOutcome};
use ddgeo_core::noise::NoiseModel;
use rayon::prelude::*;

use crate::config::{parse_initial, ExperimentConfig, GateSpec, NoiseSettings, OneQubitGate, TwoQubitGate};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    /// Noise strength in drive units.
    pub epsilon: f64,
    pub fidelity_protected: f64,
    pub fidelity_unprotected: f64,
    /// Both runs passed the step-doubling check.
    pub converged: bool,
}

/// Protected and unprotected outcomes at one noise strength.
#[derive(Debug, Clone)]
pub struct PointResult {
    pub protected: SimulationOutcome,
    pub unprotected: SimulationOutcome,
}

pub fn run_point_1q(
    gate: &OneQubitGate,
    noise: &NoiseSettings,
    epsilon: f64,
    sim: &SimulationConfig,
) -> Result<PointResult> {
    let path = gate.path()?;
    let frame = gate.frame()?;
    let initial = parse_initial(&gate.initial, 1)?;
    let model = noise.model(epsilon * std::f64::consts::PI / gate.tau);
    Ok(PointResult {
        protected: run_1q_experiment(&path, &frame, &model, &initial, sim)?,
        unprotected: run_1q_experiment(&path, &DecouplingFrame1Q::bare(gate.tau), &model, &initial, sim)?,
    })
}

pub fn run_point_2q(
    gate: &TwoQubitGate,
    noise: &NoiseSettings,
    epsilon: f64,
    sim: &SimulationConfig,
) -> Result<PointResult> {
    let schedule = gate.schedule()?;
    let initial = parse_initial(&gate.initial, 2)?;
    let model: NoiseModel = noise.model(epsilon * gate.j);
    Ok(PointResult {
        protected: run_2q_experiment(&schedule, &model, &initial, sim)?,
        unprotected: run_2q_experiment(&schedule.unprotected(), &model, &initial, sim)?,
    })
}

pub fn run_point(cfg: &ExperimentConfig, epsilon: f64) -> Result<PointResult> {
    match &cfg.gate {
        GateSpec::OneQubit(g) => run_point_1q(g, &cfg.noise, epsilon, &cfg.simulation),
        GateSpec::TwoQubit(g) => run_point_2q(g, &cfg.noise, epsilon, &cfg.simulation),
    }
}

/// One row per sweep point, ascending in `epsilon`. Points run in parallel;
/// the result does not depend on scheduling.
pub fn sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    cfg.sweep
        .epsilons()
        .par_iter()
        .map(|&epsilon| {
            let r = run_point(cfg, epsilon)?;
            Ok(SweepRow {
                epsilon,
                fidelity_protected: r.protected.fidelity,
                fidelity_unprotected: r.unprotected.fidelity,
                converged: r.protected.converged && r.unprotected.converged,
            })
        })
        .collect()
}

/// Rows where the unprotected gate beats the protected one by more than `tol`.
pub fn dominance_violations(rows: &[SweepRow], tol: f64) -> Vec<SweepRow> {
    rows.iter()
        .filter(|r| r.fidelity_unprotected > r.fidelity_protected + tol)
        .copied()
        .collect()
}
