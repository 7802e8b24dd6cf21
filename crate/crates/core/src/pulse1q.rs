//! Synthesis of the total one-qubit driving field.
//!
//! `H_S(t) = Ω_x σ_x + Ω_y σ_y + Ω_z σ_z` combines the frame-conjugated
//! geometric Hamiltonian with the frame field:
//! `H_S = U_c H_S^eff U_c^† + i U̇_c U_c^†`. The coefficients are evaluated
//! from their closed forms; [`consistency_residual`] checks them against the
//! explicit conjugation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::control::{control_field_1q, control_unitary_1q, DecouplingFrame1Q};
use crate::error::{Error, Result};
use crate::geometry::{effective_hamiltonian_1q, PathPoint, PathSpec};
use crate::matrix::ComplexMatrix;
use crate::pauli::bloch_operator;

/// Default number of export samples per period.
pub const DEFAULT_SAMPLES_PER_TAU: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule1Q {
    frame: DecouplingFrame1Q,
    path: PathSpec,
    samples_per_tau: usize,
}

pub fn synthesize(path: &PathSpec, frame: &DecouplingFrame1Q) -> Result<PulseSchedule1Q> {
    let total = path.total_duration();
    if (total - frame.tau()).abs() > 1e-12 * frame.tau().max(1.0) {
        return Err(Error::InvalidSchedule(format!(
            "path lasts {total} but the frame period is {}",
            frame.tau()
        )));
    }
    Ok(PulseSchedule1Q {
        frame: *frame,
        path: path.clone(),
        samples_per_tau: DEFAULT_SAMPLES_PER_TAU,
    })
}

/// Closed-form `(Ω_x, Ω_y, Ω_z)` at frame time `t` for path point `p`.
pub fn drive_coefficients(frame: &DecouplingFrame1Q, p: &PathPoint, t: f64) -> [f64; 3] {
    let tau = frame.tau();
    let nx = frame.n_x() as f64;
    let nz = frame.n_z() as f64;
    let (sa, ca) = (2.0 * nx * PI * t / tau).sin_cos();
    let (sp, cp) = (p.phi + 2.0 * nz * PI * t / tau).sin_cos();
    let s2 = (2.0 * p.theta).sin();
    let one_minus_c2 = 1.0 - (2.0 * p.theta).cos();
    let half_td = 0.5 * p.theta_dot;
    let quarter_pd = 0.25 * p.phi_dot;
    [
        -half_td * sp - quarter_pd * s2 * cp + PI * nx / tau,
        half_td * ca * cp - quarter_pd * (s2 * ca * sp + one_minus_c2 * sa) - nz * PI * sa / tau,
        half_td * sa * cp - quarter_pd * (s2 * sa * sp - one_minus_c2 * ca) + nz * PI * ca / tau,
    ]
}

impl PulseSchedule1Q {
    pub fn frame(&self) -> &DecouplingFrame1Q {
        &self.frame
    }

    pub fn path(&self) -> &PathSpec {
        &self.path
    }

    pub fn tau(&self) -> f64 {
        self.frame.tau()
    }

    pub fn samples_per_tau(&self) -> usize {
        self.samples_per_tau
    }

    pub fn with_samples_per_tau(mut self, n: usize) -> Self {
        self.samples_per_tau = n.max(1);
        self
    }

    /// `(Ω_x, Ω_y, Ω_z)(t)` for `t ∈ [0, τ]`.
    pub fn coefficients(&self, t: f64) -> Result<[f64; 3]> {
        let p = self.path.point(t)?;
        Ok(drive_coefficients(&self.frame, &p, t))
    }

    /// Coefficients of the periodically repeated schedule at any `t`.
    pub fn coefficients_extended(&self, t: f64) -> [f64; 3] {
        let p = self
            .path
            .point(t.rem_euclid(self.tau()))
            .expect("reduced time lies in [0, τ)");
        drive_coefficients(&self.frame, &p, t)
    }

    pub fn driving_hamiltonian(&self, t: f64) -> Result<ComplexMatrix> {
        Ok(bloch_operator(self.coefficients(t)?))
    }

    /// Splits `H_S(t)` into the rotated geometric part, the `n_x`-rate frame
    /// field, and the remaining `n_z − n_x` part of the frame field.
    pub fn decomposition(&self, t: f64) -> Result<[[f64; 3]; 3]> {
        let p = self.path.point(t)?;
        let tau = self.tau();
        let nx = self.frame.n_x() as f64;
        let nz = self.frame.n_z() as f64;
        let (sa, ca) = (2.0 * nx * PI * t / tau).sin_cos();
        let total = drive_coefficients(&self.frame, &p, t);
        let frame_rate = PI / tau;
        let second = [nx * frame_rate, -nx * frame_rate * sa, nx * frame_rate * ca];
        let third = [0.0, -(nz - nx) * frame_rate * sa, (nz - nx) * frame_rate * ca];
        let first = [
            total[0] - second[0] - third[0],
            total[1] - second[1] - third[1],
            total[2] - second[2] - third[2],
        ];
        Ok([first, second, third])
    }

    /// Uniform samples `t_i = iτ/N`, `i = 0..=N`, for export.
    pub fn samples(&self) -> Vec<Sample1Q> {
        let n = self.samples_per_tau;
        (0..=n)
            .map(|i| {
                let t = self.tau() * i as f64 / n as f64;
                let [ox, oy, oz] = self.coefficients(t).expect("grid lies in [0, τ]");
                Sample1Q { t, ox, oy, oz }
            })
            .collect()
    }

    pub fn export(&self) -> ScheduleExport1Q {
        ScheduleExport1Q {
            tau: self.tau(),
            nx: self.frame.n_x(),
            nz: self.frame.n_z(),
            path: self.path.clone(),
            samples: self.samples(),
        }
    }
}

fn grid(tau: f64, grid_points: usize) -> impl Iterator<Item = f64> {
    let n = grid_points.max(2);
    (0..n).map(move |i| tau * i as f64 / (n - 1) as f64)
}

fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// `max_t ||H_S(t) − [U_c H_S^eff U_c^† + H_c](t)||_F` on a uniform grid.
pub fn consistency_residual(path: &PathSpec, frame: &DecouplingFrame1Q, grid_points: usize) -> Result<f64> {
    let schedule = synthesize(path, frame)?;
    let mut worst: f64 = 0.0;
    for t in grid(frame.tau(), grid_points) {
        let u = control_unitary_1q(frame, t);
        let rebuilt = &effective_hamiltonian_1q(path, t)?.conjugate_by(&u) + &control_field_1q(frame, t);
        worst = worst.max((&schedule.driving_hamiltonian(t)? - &rebuilt).frobenius_norm());
    }
    Ok(worst)
}

/// Largest `√(Ω_x² + Ω_y² + Ω_z²)` on a uniform grid over `[0, τ]`.
pub fn pulse_envelope(s: &PulseSchedule1Q, grid_points: usize) -> Result<f64> {
    grid(s.tau(), grid_points).try_fold(0.0f64, |acc, t| Ok(acc.max(norm3(&s.coefficients(t)?))))
}

/// Envelopes of the three [`PulseSchedule1Q::decomposition`] parts over `[t0, t1)`.
pub fn component_envelopes(s: &PulseSchedule1Q, t0: f64, t1: f64, grid_points: usize) -> Result<[f64; 3]> {
    let n = grid_points.max(1);
    let mut out = [0.0f64; 3];
    for i in 0..n {
        let t = t0 + (t1 - t0) * i as f64 / n as f64;
        let parts = s.decomposition(t)?;
        for (o, p) in out.iter_mut().zip(parts.iter()) {
            *o = o.max(norm3(p));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample1Q {
    pub t: f64,
    pub ox: f64,
    pub oy: f64,
    pub oz: f64,
}

/// On-disk form of a one-qubit schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleExport1Q {
    pub tau: f64,
    pub nx: u32,
    pub nz: u32,
    pub path: PathSpec,
    pub samples: Vec<Sample1Q>,
}

impl ScheduleExport1Q {
    /// Rebuilds the analytic schedule from the stored path and frame.
    pub fn to_schedule(&self) -> Result<PulseSchedule1Q> {
        let frame = if self.nx == 0 && self.nz == 0 {
            DecouplingFrame1Q::bare(self.tau)
        } else {
            DecouplingFrame1Q::new(self.nx, self.nz, self.tau)?
        };
        let samples = self.samples.len().saturating_sub(1).max(1);
        Ok(synthesize(&self.path, &frame)?.with_samples_per_tau(samples))
    }
}
