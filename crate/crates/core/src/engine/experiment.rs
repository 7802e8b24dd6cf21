//! End-to-end gate experiments: build the joint Hamiltonian, propagate,
//! trace out the environment and score the result.

use serde::{Deserialize, Serialize};

use super::propagate::{propagate_steps, SimulationConfig};
use crate::control::{DecouplingFrame1Q, DecouplingSequence2Q};
use crate::error::{Error, Result};
use crate::gate2q::{target_gate_2q, PulseRole, TimelinePiece, TwoQubitSchedule};
use crate::geometry::{holonomy_gate, PathSpec};
use crate::matrix::{c, kron, partial_trace, state_fidelity, trace_distance, ComplexMatrix, StateVector};
use crate::noise::{assemble_total, NoiseModel};
use crate::pauli::Pauli;
use crate::pulse1q::synthesize;
use crate::tolerance::{NORM_TOL, RICHARDSON_TOL};

type Evaluator<'a> = Box<dyn Fn(f64) -> Result<ComplexMatrix> + 'a>;

enum Piece<'a> {
    Smooth { t0: f64, t1: f64, h: Evaluator<'a> },
    /// Instantaneous unitary; `opens` marks a kick that starts the next interval.
    Kick { t: f64, opens: bool, u: ComplexMatrix },
}

/// Propagator after a piece. `opens` is set for kicks that belong to the
/// interval starting at `t` rather than the one ending there.
struct Mark {
    t: f64,
    opens: bool,
    u: ComplexMatrix,
}

/// A piecewise program on the joint space.
struct Program<'a> {
    pieces: Vec<Piece<'a>>,
    tau: f64,
    dim: usize,
}

impl Program<'_> {
    /// Final unitary plus the unitary after every piece.
    fn run(&self, cfg: &SimulationConfig) -> Result<(ComplexMatrix, Vec<Mark>)> {
        let mut u = ComplexMatrix::identity(self.dim);
        let mut marks = Vec::with_capacity(self.pieces.len());
        for piece in &self.pieces {
            match piece {
                Piece::Smooth { t0, t1, h } => {
                    let steps = cfg.steps_for(t1 - t0, self.tau);
                    u = &propagate_steps(h, *t0, *t1, steps, cfg.integrator)? * &u;
                    marks.push(Mark {
                        t: *t1,
                        opens: false,
                        u: u.clone(),
                    });
                }
                Piece::Kick { t, opens, u: k } => {
                    u = k * &u;
                    marks.push(Mark {
                        t: *t,
                        opens: *opens,
                        u: u.clone(),
                    });
                }
            }
        }
        Ok((u, marks))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    /// Overlap of the reduced state with the noiseless state at `t`.
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutcome {
    pub final_unitary: ComplexMatrix,
    pub reduced_state: ComplexMatrix,
    pub fidelity: f64,
    /// `|F(2N steps) − F(N steps)|`, when the check ran.
    pub fidelity_shift: Option<f64>,
    /// Trace distance between the joint unitaries at `N` and `2N` steps.
    pub step_convergence_estimate: Option<f64>,
    pub converged: bool,
    pub trajectory: Option<Vec<TrajectoryPoint>>,
}

fn check_initial(initial: &StateVector, dim: usize) -> Result<()> {
    if initial.dim() != dim {
        return Err(Error::Dimension(format!(
            "initial state has dimension {}, expected {dim}",
            initial.dim()
        )));
    }
    let n = initial.norm();
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(n));
    }
    Ok(())
}

/// Reduced system state after `u` acts on `|ψ⟩⟨ψ| ⊗ ρ_E`.
pub fn reduced_state(u: &ComplexMatrix, initial: &StateVector, env_rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rho0 = kron(&initial.projector(), env_rho);
    if rho0.dim() != u.dim() {
        return Err(Error::Dimension(format!(
            "initial joint state has dimension {}, propagator {}",
            rho0.dim(),
            u.dim()
        )));
    }
    let rho = (&(u * &rho0) * &u.adjoint()).hermitian_part();
    partial_trace(&rho, &[initial.dim(), env_rho.dim()], &[0])
}

/// Fidelity of the reduced state with `target · initial`.
pub fn gate_state_fidelity(
    u: &ComplexMatrix,
    target: &ComplexMatrix,
    initial: &StateVector,
    env_rho: &ComplexMatrix,
) -> Result<f64> {
    let rho = reduced_state(u, initial, env_rho)?;
    state_fidelity(&target.apply(initial), &rho)
}

/// The six single-qubit cardinal states `|0⟩, |1⟩, |±⟩, |±i⟩`.
pub fn cardinal_states_1q() -> Vec<StateVector> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        StateVector::basis(2, 0),
        StateVector::basis(2, 1),
        StateVector::new(vec![c(h, 0.0), c(h, 0.0)]),
        StateVector::new(vec![c(h, 0.0), c(-h, 0.0)]),
        StateVector::new(vec![c(h, 0.0), c(0.0, h)]),
        StateVector::new(vec![c(h, 0.0), c(0.0, -h)]),
    ]
}

/// Products of cardinal states on `n` qubits (`6^n` states).
pub fn cardinal_states(n: usize) -> Vec<StateVector> {
    let one = cardinal_states_1q();
    (1..n).fold(one.clone(), |acc, _| {
        acc.iter().flat_map(|a| one.iter().map(move |b| a.kron(b))).collect()
    })
}

/// Uniform average of [`gate_state_fidelity`] over the cardinal states.
pub fn average_cardinal_fidelity(u: &ComplexMatrix, target: &ComplexMatrix, env_rho: &ComplexMatrix) -> Result<f64> {
    let n = target.dim().trailing_zeros() as usize;
    let states = cardinal_states(n);
    let total = states
        .iter()
        .map(|s| gate_state_fidelity(u, target, s, env_rho))
        .sum::<Result<f64>>()?;
    Ok(total / states.len() as f64)
}

fn execute(
    noisy: &Program,
    ideal: Option<&Program>,
    target: &ComplexMatrix,
    initial: &StateVector,
    env_rho: &ComplexMatrix,
    cfg: &SimulationConfig,
) -> Result<SimulationOutcome> {
    cfg.validate()?;
    let (u, marks) = noisy.run(cfg)?;
    let reduced = reduced_state(&u, initial, env_rho)?;
    let fidelity = state_fidelity(&target.apply(initial), &reduced)?;

    let (fidelity_shift, step_convergence_estimate) = if cfg.richardson_check {
        let (fine, _) = noisy.run(&cfg.doubled())?;
        let f2 = gate_state_fidelity(&fine, target, initial, env_rho)?;
        (Some((f2 - fidelity).abs()), Some(trace_distance(&u, &fine)))
    } else {
        (None, None)
    };
    let converged = fidelity_shift.is_none_or(|s| s < RICHARDSON_TOL);

    let trajectory = match ideal {
        Some(ideal) if cfg.record_trajectory => {
            let (_, ideal_marks) = ideal.run(cfg)?;
            let points = marks
                .iter()
                .zip(&ideal_marks)
                .map(|(mn, mi)| {
                    let rn = reduced_state(&mn.u, initial, env_rho)?;
                    let ri = reduced_state(&mi.u, initial, env_rho)?;
                    Ok(TrajectoryPoint {
                        t: mn.t,
                        fidelity: (&rn * &ri).trace().re,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Some(points)
        }
        _ => None,
    };

    Ok(SimulationOutcome {
        final_unitary: u,
        reduced_state: reduced,
        fidelity,
        fidelity_shift,
        step_convergence_estimate,
        converged,
        trajectory,
    })
}

/// One-qubit gate along `path` in the decoupling `frame`. Pass
/// [`DecouplingFrame1Q::bare`] for the unprotected reference.
pub fn run_1q_experiment(
    path: &PathSpec,
    frame: &DecouplingFrame1Q,
    model: &NoiseModel,
    initial: &StateVector,
    cfg: &SimulationConfig,
) -> Result<SimulationOutcome> {
    check_initial(initial, 2)?;
    let schedule = synthesize(path, frame)?;
    let target = holonomy_gate(path)?;
    let build = |m: &NoiseModel| -> Result<(ComplexMatrix, usize)> {
        let j = assemble_total(|t| schedule.driving_hamiltonian(t), m, 1)?;
        Ok((j.static_part().clone(), j.dim()))
    };
    let program = |(static_part, dim): (ComplexMatrix, usize)| {
        let env_dim = dim / 2;
        let pieces = path
            .breakpoints()
            .windows(2)
            .map(|w| {
                let static_part = static_part.clone();
                let schedule = &schedule;
                Piece::Smooth {
                    t0: w[0],
                    t1: w[1],
                    h: Box::new(move |t| {
                        let hs = schedule.driving_hamiltonian(t)?;
                        Ok(&kron(&hs, &ComplexMatrix::identity(env_dim)) + &static_part)
                    }) as Evaluator,
                }
            })
            .collect();
        Program {
            pieces,
            tau: frame.tau(),
            dim,
        }
    };
    let noisy = program(build(model)?);
    let ideal = if cfg.record_trajectory {
        Some(program(build(&model.with_epsilon(0.0))?))
    } else {
        None
    };
    execute(&noisy, ideal.as_ref(), &target, initial, &model.env_density(1), cfg)
}

fn program_2q<'a>(s: &'a TwoQubitSchedule, model: &NoiseModel, cfg: &SimulationConfig) -> Result<Program<'a>> {
    let coupling = assemble_total(|_| Ok(ComplexMatrix::zeros(4)), model, 2)?;
    let dim = coupling.dim();
    let env_dim = dim / 4;
    let env_id = ComplexMatrix::identity(env_dim);
    let noisy_static = coupling.static_part().clone();
    let pulse_static = if cfg.noise_during_pulses {
        noisy_static.clone()
    } else {
        assemble_total(|_| Ok(ComplexMatrix::zeros(4)), &model.with_epsilon(0.0), 2)?
            .static_part()
            .clone()
    };
    let strength = s.sequence().pulse_strength();
    let mut pieces = Vec::new();
    for piece in s.timeline() {
        match piece {
            TimelinePiece::Coupling { t0, t1, .. } => {
                let st = noisy_static.clone();
                let id = env_id.clone();
                pieces.push(Piece::Smooth {
                    t0,
                    t1,
                    h: Box::new(move |t| Ok(&kron(&s.real_hamiltonian(t)?, &id) + &st)),
                });
            }
            TimelinePiece::Pulse { k: 0, .. } => {}
            TimelinePiece::Pulse { k, t0, t1, role } if t0 == t1 => pieces.push(Piece::Kick {
                t: t0,
                opens: role == PulseRole::Open,
                u: kron(&DecouplingSequence2Q::operator_matrix(k), &env_id),
            }),
            TimelinePiece::Pulse { k, t0, t1, .. } => {
                let p = Pauli::from_index(k).matrix();
                let id2 = ComplexMatrix::identity(2);
                let hp = (&kron(&p, &id2) + &kron(&id2, &p)).scale_re(strength);
                let h = &kron(&hp, &env_id) + &pulse_static;
                pieces.push(Piece::Smooth {
                    t0,
                    t1,
                    h: Box::new(move |_| Ok(h.clone())),
                });
            }
        }
    }
    Ok(Program {
        pieces,
        tau: s.tau(),
        dim,
    })
}

/// Two-qubit gate under schedule `s`; use [`TwoQubitSchedule::unprotected`]
/// for the reference without the decoupling sequence.
pub fn run_2q_experiment(
    s: &TwoQubitSchedule,
    model: &NoiseModel,
    initial: &StateVector,
    cfg: &SimulationConfig,
) -> Result<SimulationOutcome> {
    check_initial(initial, 4)?;
    let target = target_gate_2q(s.gamma());
    let noisy = program_2q(s, model, cfg)?;
    let ideal = if cfg.record_trajectory {
        Some(program_2q(s, &model.with_epsilon(0.0), cfg)?)
    } else {
        None
    };
    execute(&noisy, ideal.as_ref(), &target, initial, &model.env_density(2), cfg)
}

/// Noiseless system propagator of the two-qubit program up to time `t`.
/// A kick at exactly `t` counts only if it closes the interval ending there.
pub fn system_propagator_2q(s: &TwoQubitSchedule, t: f64, cfg: &SimulationConfig) -> Result<ComplexMatrix> {
    let program = program_2q(s, &NoiseModel::noiseless(), cfg)?;
    let (_, marks) = program.run(cfg)?;
    let tol = 1e-12 * s.total_duration();
    let u = marks
        .iter()
        .rev()
        .find(|m| m.t < t - tol || (m.t <= t + tol && !m.opens))
        .map(|m| m.u.clone())
        .unwrap_or_else(|| ComplexMatrix::identity(program.dim));
    partial_trace_unitary(&u, 4)
}

/// Extracts `U_S` from `U_S ⊗ I_E`.
fn partial_trace_unitary(u: &ComplexMatrix, sys_dim: usize) -> Result<ComplexMatrix> {
    let env_dim = u.dim() / sys_dim;
    Ok(ComplexMatrix::from_fn(sys_dim, |i, j| u[(i * env_dim, j * env_dim)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::PulseMode;
    use crate::gate2q::schedule;
    use crate::geometry::orange_slice;
    use crate::noise::EnvInit;
    use std::f64::consts::PI;

    fn quick() -> SimulationConfig {
        SimulationConfig {
            steps_per_interval: 400,
            richardson_check: false,
            ..Default::default()
        }
    }

    fn plus_x() -> StateVector {
        cardinal_states_1q()[2].clone()
    }

    #[test]
    fn noiseless_1q_gate_is_reached() {
        let path = orange_slice(PI / 8.0, 1.0);
        let frame = DecouplingFrame1Q::new(1, 3, 1.0).unwrap();
        let out = run_1q_experiment(&path, &frame, &NoiseModel::noiseless(), &plus_x(), &quick()).unwrap();
        assert!(out.fidelity > 1.0 - 1e-5, "{}", out.fidelity);
        assert!(out.final_unitary.is_unitary(1e-10));
        assert!(crate::matrix::is_density_matrix(&out.reduced_state, 1e-10));
    }

    #[test]
    fn richardson_shift_is_small_for_noiseless_bare_gate() {
        let path = orange_slice(PI / 8.0, 1.0);
        let cfg = SimulationConfig {
            steps_per_interval: 200,
            ..Default::default()
        };
        let out = run_1q_experiment(&path, &DecouplingFrame1Q::bare(1.0), &NoiseModel::noiseless(), &plus_x(), &cfg).unwrap();
        // piecewise-constant in the bare frame, so both resolutions are exact
        assert!(out.fidelity_shift.unwrap() < 1e-12);
        assert!(out.converged);
    }

    #[test]
    fn initial_state_is_validated() {
        let path = orange_slice(PI / 8.0, 1.0);
        let bad = StateVector::new(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let frame = DecouplingFrame1Q::bare(1.0);
        assert!(matches!(
            run_1q_experiment(&path, &frame, &NoiseModel::noiseless(), &bad, &quick()),
            Err(Error::NotNormalized(_))
        ));
        assert!(run_1q_experiment(&path, &frame, &NoiseModel::noiseless(), &StateVector::basis(4, 0), &quick()).is_err());
    }

    #[test]
    fn noiseless_2q_gate_is_reached() {
        let seq = DecouplingSequence2Q::new(PI / 4.0, PulseMode::Square, 20.0).unwrap();
        let s = schedule(PI / 4.0, 1.0, &seq).unwrap();
        let init = StateVector::basis(4, 2);
        for sched in [s.clone(), s.unprotected()] {
            let out = run_2q_experiment(&sched, &NoiseModel::noiseless(), &init, &quick()).unwrap();
            assert!(out.fidelity > 1.0 - 1e-9, "{}", out.fidelity);
        }
    }

    #[test]
    fn trajectory_tracks_piece_boundaries() {
        let seq = DecouplingSequence2Q::instantaneous(PI / 4.0).unwrap();
        let s = schedule(PI / 4.0, 1.0, &seq).unwrap();
        let cfg = SimulationConfig {
            record_trajectory: true,
            ..quick()
        };
        let out = run_2q_experiment(&s, &NoiseModel::heisenberg(0.1), &StateVector::basis(4, 2), &cfg).unwrap();
        let traj = out.trajectory.unwrap();
        assert!(traj.windows(2).all(|w| w[1].t >= w[0].t));
        assert!((traj.last().unwrap().fidelity - out.fidelity).abs() < 1e-12);
    }

    #[test]
    fn global_phase_of_target_is_irrelevant() {
        let path = orange_slice(PI / 8.0, 1.0);
        let frame = DecouplingFrame1Q::new(1, 3, 1.0).unwrap();
        let model = NoiseModel::heisenberg(0.3);
        let out = run_1q_experiment(&path, &frame, &model, &plus_x(), &quick()).unwrap();
        let target = holonomy_gate(&path).unwrap();
        let env = model.env_density(1);
        let f0 = gate_state_fidelity(&out.final_unitary, &target, &plus_x(), &env).unwrap();
        let f1 = gate_state_fidelity(&out.final_unitary, &target.scale(c(0.0, 1.234).exp()), &plus_x(), &env).unwrap();
        assert!((f0 - f1).abs() < 1e-12);
        assert!((f0 - out.fidelity).abs() < 1e-12);
    }

    #[test]
    fn average_fidelity_of_identity_is_one() {
        let u = ComplexMatrix::identity(4);
        let env = NoiseModel::noiseless().env_density(1);
        let f = average_cardinal_fidelity(&u, &ComplexMatrix::identity(2), &env).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
        assert_eq!(cardinal_states(2).len(), 36);
    }

    #[test]
    fn mixed_environment_averages_basis_runs() {
        let path = orange_slice(PI / 8.0, 1.0);
        let frame = DecouplingFrame1Q::new(1, 3, 1.0).unwrap();
        let base = NoiseModel::heisenberg(0.4);
        let mixed = run_1q_experiment(&path, &frame, &base.with_env_init(EnvInit::MixedAverage), &plus_x(), &quick())
            .unwrap()
            .fidelity;
        let ground = run_1q_experiment(&path, &frame, &base, &plus_x(), &quick()).unwrap().final_unitary;
        let excited_env = StateVector::basis(2, 1).projector();
        let f1 = gate_state_fidelity(&ground, &holonomy_gate(&path).unwrap(), &plus_x(), &excited_env).unwrap();
        let f0 = gate_state_fidelity(&ground, &holonomy_gate(&path).unwrap(), &plus_x(), &base.env_density(1)).unwrap();
        assert!((mixed - 0.5 * (f0 + f1)).abs() < 1e-12);
    }

    #[test]
    fn system_propagator_checkpoints() {
        let seq = DecouplingSequence2Q::instantaneous(PI / 4.0).unwrap();
        let s = schedule(PI / 4.0, 1.0, &seq).unwrap();
        let u = system_propagator_2q(&s, PI / 4.0, &quick()).unwrap();
        let eff = s.effective_propagator(PI / 4.0).unwrap();
        assert!((&u - &eff).frobenius_norm() < 1e-12);
    }
}
