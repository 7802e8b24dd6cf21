//! Decoupling frames and the two decoupling conditions.
//!
//! One-qubit protection uses the continuous frame
//! `U_c(t) = exp(-iπ n_x σ_x t/τ) exp(-iπ n_z σ_z t/τ)`; two-qubit protection
//! uses the discrete sequence `σ_k ⊗ σ_k`, `k = 0..3`, one per interval.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{c, kron, ComplexMatrix};
use crate::pauli::{sigma_x, sigma_y, sigma_z, GaussInt, Pauli, PauliString, PauliSum};
use crate::quadrature::CompositeRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn matrix(self) -> ComplexMatrix {
        match self {
            Axis::X => sigma_x(),
            Axis::Y => sigma_y(),
            Axis::Z => sigma_z(),
        }
    }
}

/// Continuous one-qubit decoupling frame `(n_x, n_z, τ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecouplingFrame1Q {
    n_x: u32,
    n_z: u32,
    tau: f64,
}

impl DecouplingFrame1Q {
    /// Validated frame: both counts positive, unequal, and of equal parity.
    pub fn new(n_x: u32, n_z: u32, tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidFrame(format!("period must be positive, got {tau}")));
        }
        if n_x == 0 || n_z == 0 {
            return Err(Error::InvalidFrame(format!(
                "n_x and n_z must be positive, got ({n_x}, {n_z})"
            )));
        }
        if n_x == n_z {
            return Err(Error::InvalidFrame(format!("n_x and n_z must differ, both are {n_x}")));
        }
        if n_x % 2 != n_z % 2 {
            return Err(Error::InvalidFrame(format!(
                "n_x and n_z must have equal parity, got ({n_x}, {n_z})"
            )));
        }
        Ok(Self { n_x, n_z, tau })
    }

    /// The identity frame `n_x = n_z = 0`: no protection.
    pub fn bare(tau: f64) -> Self {
        Self { n_x: 0, n_z: 0, tau }
    }

    /// Builds a frame without checking any invariant.
    ///
    /// Only for exercising failure modes (mixed parity, single axis); schedules
    /// built on such a frame are not decoupled.
    pub fn new_unchecked(n_x: u32, n_z: u32, tau: f64) -> Self {
        Self { n_x, n_z, tau }
    }

    pub fn n_x(&self) -> u32 {
        self.n_x
    }

    pub fn n_z(&self) -> u32 {
        self.n_z
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn is_bare(&self) -> bool {
        self.n_x == 0 && self.n_z == 0
    }

    pub fn with_tau(&self, tau: f64) -> Self {
        Self { tau, ..*self }
    }

    /// Rotation angles `(π n_x t/τ, π n_z t/τ)` of the two frame factors.
    fn angles(&self, t: f64) -> (f64, f64) {
        (
            PI * self.n_x as f64 * t / self.tau,
            PI * self.n_z as f64 * t / self.tau,
        )
    }
}

/// `exp(-iθσ)` for a Pauli axis.
fn axis_rotation(axis: Axis, theta: f64) -> ComplexMatrix {
    let (s, co) = theta.sin_cos();
    &ComplexMatrix::identity(2).scale_re(co) + &axis.matrix().scale(c(0.0, -s))
}

/// `U_c(t)`, the frame unitary.
pub fn control_unitary_1q(frame: &DecouplingFrame1Q, t: f64) -> ComplexMatrix {
    let (ax, az) = frame.angles(t);
    &axis_rotation(Axis::X, ax) * &axis_rotation(Axis::Z, az)
}

/// `H_c(t) = i U̇_c U_c^†`, as Bloch coefficients `(x, y, z)`.
pub fn control_field_coefficients(frame: &DecouplingFrame1Q, t: f64) -> [f64; 3] {
    let wx = PI * frame.n_x as f64 / frame.tau;
    let wz = PI * frame.n_z as f64 / frame.tau;
    let (s, co) = (2.0 * PI * frame.n_x as f64 * t / frame.tau).sin_cos();
    [wx, -wz * s, wz * co]
}

pub fn control_field_1q(frame: &DecouplingFrame1Q, t: f64) -> ComplexMatrix {
    crate::pauli::bloch_operator(control_field_coefficients(frame, t))
}

/// `U_c^†(t) σ_axis U_c(t)` by direct conjugation.
pub fn toggled_pauli_1q(frame: &DecouplingFrame1Q, axis: Axis, t: f64) -> ComplexMatrix {
    let u = control_unitary_1q(frame, t);
    axis.matrix().conjugate_by(&u.adjoint())
}

/// Closed-form Bloch coefficients of the toggled Pauli.
pub fn toggled_pauli_coefficients(frame: &DecouplingFrame1Q, axis: Axis, t: f64) -> [f64; 3] {
    let (sx, cx) = (2.0 * PI * frame.n_x as f64 * t / frame.tau).sin_cos();
    let (sz, cz) = (2.0 * PI * frame.n_z as f64 * t / frame.tau).sin_cos();
    match axis {
        Axis::X => [cz, -sz, 0.0],
        Axis::Y => [cx * sz, cx * cz, -sx],
        Axis::Z => [sx * sz, sx * cz, cx],
    }
}

/// Condition (a): `max_t ||U_c(t+τ) - U_c(t)||_F` over a uniform grid on `[0, τ]`.
pub fn periodicity_residual(frame: &DecouplingFrame1Q, grid_points: usize) -> f64 {
    let n = grid_points.max(2);
    (0..n)
        .map(|i| {
            let t = frame.tau * i as f64 / (n - 1) as f64;
            (&control_unitary_1q(frame, t + frame.tau) - &control_unitary_1q(frame, t)).frobenius_norm()
        })
        .fold(0.0, f64::max)
}

const GAUSS_ORDER: usize = 8;

/// Composite Gauss-Legendre rule on `[0, τ]` with about `points` nodes.
pub fn frame_quadrature(frame: &DecouplingFrame1Q, points: usize) -> CompositeRule {
    let panels = points.div_ceil(GAUSS_ORDER).max(1);
    CompositeRule::new(0.0, frame.tau, panels, GAUSS_ORDER)
}

/// Condition (b): `||∫_0^τ U_c^† σ_μ U_c dt||_F` for `μ = x, y, z`.
pub fn average_interaction_residual_1q(frame: &DecouplingFrame1Q, quadrature_points: usize) -> [f64; 3] {
    let rule = frame_quadrature(frame, quadrature_points);
    Axis::ALL.map(|axis| {
        let mut acc = ComplexMatrix::zeros(2);
        for &(t, w) in rule.points() {
            acc += &toggled_pauli_1q(frame, axis, t).scale_re(w);
        }
        acc.frobenius_norm()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PulseMode {
    /// Ideal zero-duration `σ_k ⊗ σ_k` kicks.
    Instantaneous,
    /// Finite square pulses `Ω_p (σ_k ⊗ I + I ⊗ σ_k)` of area `π/2` per qubit.
    Square,
}

/// The periodic two-qubit sequence `{σ_0^⊗2, σ_1^⊗2, σ_2^⊗2, σ_3^⊗2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecouplingSequence2Q {
    interval_tau: f64,
    pulse_mode: PulseMode,
    pulse_strength: f64,
}

impl DecouplingSequence2Q {
    pub const STEP_COUNT: usize = 4;

    pub fn new(interval_tau: f64, pulse_mode: PulseMode, pulse_strength: f64) -> Result<Self> {
        if !(interval_tau.is_finite() && interval_tau > 0.0) {
            return Err(Error::InvalidSchedule(format!(
                "interval length must be positive, got {interval_tau}"
            )));
        }
        if pulse_mode == PulseMode::Square && !(pulse_strength.is_finite() && pulse_strength > 0.0) {
            return Err(Error::InvalidSchedule(format!(
                "square pulses need a positive strength, got {pulse_strength}"
            )));
        }
        Ok(Self {
            interval_tau,
            pulse_mode,
            pulse_strength,
        })
    }

    pub fn instantaneous(interval_tau: f64) -> Result<Self> {
        Self::new(interval_tau, PulseMode::Instantaneous, 1.0)
    }

    pub fn interval_tau(&self) -> f64 {
        self.interval_tau
    }

    pub fn pulse_mode(&self) -> PulseMode {
        self.pulse_mode
    }

    pub fn pulse_strength(&self) -> f64 {
        self.pulse_strength
    }

    /// Duration of one square pulse, `π / (2 Ω_p)`.
    pub fn pulse_duration(&self) -> f64 {
        match self.pulse_mode {
            PulseMode::Instantaneous => 0.0,
            PulseMode::Square => PI / (2.0 * self.pulse_strength),
        }
    }

    /// The sequence operators as Pauli strings, in order.
    pub fn operators(&self) -> [PauliString; 4] {
        std::array::from_fn(|k| vec![Pauli::from_index(k); 2])
    }

    pub fn operator_matrix(k: usize) -> ComplexMatrix {
        let p = Pauli::from_index(k).matrix();
        kron(&p, &p)
    }
}

/// `Σ_terms ||Σ_k (σ_k⊗σ_k) H (σ_k⊗σ_k)||_F` in floating point.
pub fn sequence_average_residual_2q(seq: &DecouplingSequence2Q, interaction_terms: &[ComplexMatrix]) -> f64 {
    let ops: Vec<ComplexMatrix> = seq
        .operators()
        .iter()
        .map(|p| PauliSum::term(p.clone(), GaussInt::ONE).to_matrix(2))
        .collect();
    interaction_terms
        .iter()
        .map(|h| {
            let mut acc = ComplexMatrix::zeros(4);
            for p in &ops {
                acc += &(&(p * h) * p);
            }
            acc.frobenius_norm()
        })
        .sum()
}

/// Exact sequence average `Σ_k (σ_k⊗σ_k) H (σ_k⊗σ_k)` in Pauli algebra.
pub fn sequence_average_exact(seq: &DecouplingSequence2Q, term: &PauliSum) -> PauliSum {
    seq.operators()
        .iter()
        .fold(PauliSum::zero(), |acc, p| acc.sum(&term.conjugated_by(p)))
}

/// The six single-qubit Pauli embeddings on two system qubits.
pub fn single_qubit_pauli_terms() -> Vec<PauliSum> {
    let mut out = Vec::with_capacity(6);
    for q in 0..2 {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            out.push(PauliSum::single(2, q, p));
        }
    }
    out
}
