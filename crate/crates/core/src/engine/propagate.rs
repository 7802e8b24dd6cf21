//! Time-ordered propagation of piecewise-smooth Hamiltonians.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{expm_hermitian, trace_distance, ComplexMatrix};

/// Smallest number of steps used on any smooth piece.
pub const MIN_STEPS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    /// Product of `exp(−i H(t_mid) Δt)`; second order.
    #[default]
    Midpoint2,
    /// Two-point Gauss fourth-order Magnus step.
    Magnus4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulationConfig {
    /// Steps per nominal interval `τ`; pieces get a proportional share.
    pub steps_per_interval: usize,
    pub integrator: Integrator,
    /// Keep the system-environment coupling on during square pulses.
    pub noise_during_pulses: bool,
    /// Re-run at doubled resolution and report the fidelity shift.
    pub richardson_check: bool,
    /// Record fidelity at every piece boundary.
    pub record_trajectory: bool,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            steps_per_interval: 2000,
            integrator: Integrator::Midpoint2,
            noise_during_pulses: true,
            richardson_check: true,
            record_trajectory: false,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps_per_interval < MIN_STEPS {
            return Err(Error::InvalidConfig(format!(
                "steps_per_interval must be at least {MIN_STEPS}, got {}",
                self.steps_per_interval
            )));
        }
        Ok(())
    }

    pub fn doubled(&self) -> Self {
        Self {
            steps_per_interval: 2 * self.steps_per_interval,
            ..*self
        }
    }

    /// Steps for a piece of length `len` given the nominal interval `tau`.
    pub fn steps_for(&self, len: f64, tau: f64) -> usize {
        ((self.steps_per_interval as f64 * len / tau).round() as usize).max(MIN_STEPS)
    }
}

fn checked<F>(h: &F, t: f64) -> Result<ComplexMatrix>
where
    F: Fn(f64) -> Result<ComplexMatrix>,
{
    let m = h(t)?;
    if !m.is_finite() {
        return Err(Error::NonFinite(t));
    }
    Ok(m)
}

/// `T exp(−i ∫_{t0}^{t1} H dt)` with a fixed number of steps.
///
/// Consecutive steps with an identical Hamiltonian reuse the previous step
/// unitary, so constant pieces cost one diagonalization.
pub fn propagate_steps<F>(h: F, t0: f64, t1: f64, steps: usize, integrator: Integrator) -> Result<ComplexMatrix>
where
    F: Fn(f64) -> Result<ComplexMatrix>,
{
    if !(t0.is_finite() && t1.is_finite()) {
        return Err(Error::NonFinite(if t0.is_finite() { t1 } else { t0 }));
    }
    if steps == 0 {
        return Err(Error::InvalidConfig("step count must be positive".into()));
    }
    let dt = (t1 - t0) / steps as f64;
    let probe = checked(&h, t0)?;
    let mut u = ComplexMatrix::identity(probe.dim());
    if dt == 0.0 {
        return Ok(u);
    }
    let offset = 3f64.sqrt() / 6.0 * dt;
    let mut cache: Option<(ComplexMatrix, ComplexMatrix)> = None;
    for n in 0..steps {
        let mid = t0 + (n as f64 + 0.5) * dt;
        let generator = match integrator {
            Integrator::Midpoint2 => checked(&h, mid)?.scale_re(dt),
            Integrator::Magnus4 => {
                let h1 = checked(&h, mid - offset)?;
                let h2 = checked(&h, mid + offset)?;
                let mean = (&h1 + &h2).scale_re(0.5 * dt);
                // −i(√3/12)Δt²[H2, H1] is Hermitian
                let corr = h2.commutator(&h1).scale(crate::matrix::c(0.0, -(3f64.sqrt()) / 12.0 * dt * dt));
                &mean + &corr
            }
        };
        let step = match &cache {
            Some((g, s)) if *g == generator => s.clone(),
            _ => {
                let s = expm_hermitian(&generator, 1.0)?;
                cache = Some((generator, s.clone()));
                s
            }
        };
        u = &step * &u;
    }
    Ok(u)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Propagation {
    pub unitary: ComplexMatrix,
    /// Trace distance to the doubled-resolution result; absent when the
    /// check is disabled.
    pub step_convergence_estimate: Option<f64>,
}

/// Propagates over `[t0, t1]` using `cfg.steps_per_interval` steps.
pub fn propagate<F>(h: F, t0: f64, t1: f64, cfg: &SimulationConfig) -> Result<Propagation>
where
    F: Fn(f64) -> Result<ComplexMatrix>,
{
    cfg.validate()?;
    let unitary = propagate_steps(&h, t0, t1, cfg.steps_per_interval, cfg.integrator)?;
    let step_convergence_estimate = if cfg.richardson_check {
        let fine = propagate_steps(&h, t0, t1, 2 * cfg.steps_per_interval, cfg.integrator)?;
        Some(trace_distance(&unitary, &fine))
    } else {
        None
    };
    Ok(Propagation {
        unitary,
        step_convergence_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{bloch_operator, sigma_x, sigma_z};
    use std::f64::consts::PI;

    fn cfg(steps: usize, integrator: Integrator) -> SimulationConfig {
        SimulationConfig {
            steps_per_interval: steps,
            integrator,
            richardson_check: false,
            ..Default::default()
        }
    }

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        (a - b).frobenius_norm() < tol
    }

    #[test]
    fn constant_hamiltonian_is_exact() {
        let h = sigma_z().scale_re(PI / 2.0);
        for integ in [Integrator::Midpoint2, Integrator::Magnus4] {
            let p = propagate(|_| Ok(h.clone()), 0.0, 1.0, &cfg(16, integ)).unwrap();
            assert!(close(&p.unitary, &expm_hermitian(&h, 1.0).unwrap(), 1e-13));
        }
    }

    #[test]
    fn commuting_time_dependence() {
        // H = cos(t) σ_x integrates to sin(T) σ_x
        let h = |t: f64| Ok(sigma_x().scale_re(t.cos()));
        let exact = expm_hermitian(&sigma_x(), 2f64.sin()).unwrap();
        let u = propagate(h, 0.0, 2.0, &cfg(400, Integrator::Midpoint2)).unwrap().unitary;
        assert!(close(&u, &exact, 1e-5));
        assert!(u.is_unitary(1e-10));
    }

    fn rotating(t: f64) -> Result<ComplexMatrix> {
        Ok(bloch_operator([3.0 * (2.0 * t).cos(), 3.0 * (2.0 * t).sin(), 1.0]))
    }

    fn rotating_exact(t: f64) -> ComplexMatrix {
        // rotating frame: U = exp(−iωσ_z t/2) exp(−i(Bσ_x + (Δ − ω/2)σ_z) t), here Δ = ω/2
        let frame = expm_hermitian(&sigma_z(), t).unwrap();
        let static_h = bloch_operator([3.0, 0.0, 0.0]);
        &frame * &expm_hermitian(&static_h, t).unwrap()
    }

    #[test]
    fn midpoint_error_scales_quadratically() {
        let exact = rotating_exact(1.0);
        let e1 = trace_distance(&propagate(rotating, 0.0, 1.0, &cfg(100, Integrator::Midpoint2)).unwrap().unitary, &exact);
        let e2 = trace_distance(&propagate(rotating, 0.0, 1.0, &cfg(400, Integrator::Midpoint2)).unwrap().unitary, &exact);
        let ratio = e1 / e2;
        assert!((14.0..18.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn magnus_error_scales_quartically() {
        let exact = rotating_exact(1.0);
        let e1 = trace_distance(&propagate(rotating, 0.0, 1.0, &cfg(20, Integrator::Magnus4)).unwrap().unitary, &exact);
        let e2 = trace_distance(&propagate(rotating, 0.0, 1.0, &cfg(40, Integrator::Magnus4)).unwrap().unitary, &exact);
        let ratio = e1 / e2;
        assert!((13.0..19.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn richardson_estimate_is_reported() {
        let c = SimulationConfig {
            steps_per_interval: 200,
            ..Default::default()
        };
        let p = propagate(rotating, 0.0, 1.0, &c).unwrap();
        let est = p.step_convergence_estimate.unwrap();
        assert!(est > 0.0 && est < 1e-3);
    }

    #[test]
    fn failures_are_errors() {
        let nan = |_t: f64| Ok(sigma_x().scale_re(f64::NAN));
        assert!(matches!(propagate(nan, 0.0, 1.0, &cfg(16, Integrator::Midpoint2)), Err(Error::NonFinite(_))));
        assert!(propagate(rotating, 0.0, 1.0, &cfg(4, Integrator::Midpoint2)).is_err());
        assert_eq!(cfg(2000, Integrator::Midpoint2).steps_for(0.005, 1.0), MIN_STEPS);
        assert_eq!(cfg(2000, Integrator::Midpoint2).steps_for(0.5, 1.0), 1000);
    }
}
