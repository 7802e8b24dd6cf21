//! Two-qubit geometric gate under the `σ_k ⊗ σ_k` decoupling sequence.
//!
//! The gate runs in the `{|01⟩, |10⟩}` block over four intervals of length
//! `τ = π/(4J)`. In the toggling frame the coupling is
//! `J_1 (σ_xσ_x + σ_yσ_y) + J_2 D` with `D = σ_y⊗σ_x − σ_x⊗σ_y = 2R_y`. The
//! physical coupling during interval `k` is that Hamiltonian conjugated by
//! `σ_k ⊗ σ_k`, which flips the sign of the `D` term for `k = 1, 2`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::control::{DecouplingSequence2Q, PulseMode};
use crate::error::{Error, Result};
use crate::matrix::{c, kron, ComplexMatrix, StateVector, I, ONE, ZERO};
use crate::pauli::{sigma_x, sigma_y};
use crate::quadrature::CompositeRule;
use crate::tolerance::QUADRATURE_TOL;

/// `|01⟩⟨10| + |10⟩⟨01|`
pub fn r_x() -> ComplexMatrix {
    ComplexMatrix::from_fn(4, |i, j| if (i, j) == (1, 2) || (i, j) == (2, 1) { ONE } else { ZERO })
}

/// `−i|01⟩⟨10| + i|10⟩⟨01|`
pub fn r_y() -> ComplexMatrix {
    ComplexMatrix::from_fn(4, |i, j| match (i, j) {
        (1, 2) => -I,
        (2, 1) => I,
        _ => ZERO,
    })
}

/// `σ_x⊗σ_x + σ_y⊗σ_y`
pub fn xy_operator() -> ComplexMatrix {
    &kron(&sigma_x(), &sigma_x()) + &kron(&sigma_y(), &sigma_y())
}

/// `σ_y⊗σ_x − σ_x⊗σ_y`
pub fn dm_operator() -> ComplexMatrix {
    &kron(&sigma_y(), &sigma_x()) - &kron(&sigma_x(), &sigma_y())
}

/// `J_1 (σ_xσ_x + σ_yσ_y) + J_2 D`
pub fn coupling_hamiltonian(j1: f64, j2: f64) -> ComplexMatrix {
    &xy_operator().scale_re(j1) + &dm_operator().scale_re(j2)
}

/// Projects a Hamiltonian onto the `(XX+YY, D)` pair. Both operators have
/// Hilbert-Schmidt norm² 8 and are orthogonal.
pub fn coupling_components(h: &ComplexMatrix) -> (f64, f64) {
    let j1 = (&xy_operator() * h).trace().re / 8.0;
    let j2 = (&dm_operator() * h).trace().re / 8.0;
    (j1, j2)
}

/// Identity on `|00⟩, |11⟩`; rotation `[[cos γ, −sin γ], [sin γ, cos γ]]` on
/// the ordered `{|01⟩, |10⟩}` block.
pub fn target_gate_2q(gamma: f64) -> ComplexMatrix {
    let (sg, cg) = gamma.sin_cos();
    ComplexMatrix::from_fn(4, |i, j| match (i, j) {
        (0, 0) | (3, 3) => ONE,
        (1, 1) | (2, 2) => c(cg, 0.0),
        (1, 2) => c(-sg, 0.0),
        (2, 1) => c(sg, 0.0),
        _ => ZERO,
    })
}

/// `|±⟩ = (|01⟩ ± i|10⟩)/√2`, the eigenvectors of the target gate.
pub fn block_states() -> (StateVector, StateVector) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    (
        StateVector::new(vec![ZERO, c(h, 0.0), c(0.0, h), ZERO]),
        StateVector::new(vec![ZERO, c(h, 0.0), c(0.0, -h), ZERO]),
    )
}

/// Time profile of the coupling strength within each interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CouplingShape {
    #[default]
    Constant,
    /// `(π/2) sin(π s)` with `s ∈ [0, 1]` the fraction of the interval; same area.
    Sine,
}

impl CouplingShape {
    pub fn factor(self, s: f64) -> f64 {
        match self {
            CouplingShape::Constant => 1.0,
            CouplingShape::Sine => 0.5 * PI * (PI * s).sin(),
        }
    }

    /// `∫_0^s factor`
    pub fn area(self, s: f64) -> f64 {
        match self {
            CouplingShape::Constant => s,
            CouplingShape::Sine => 0.5 * (1.0 - (PI * s).cos()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingInterval {
    /// Sequence index `k` of the `σ_k ⊗ σ_k` frame used in this interval.
    pub k: usize,
    pub t0: f64,
    pub t1: f64,
    pub j1_eff: f64,
    pub j2_eff: f64,
    pub j1_real: f64,
    pub j2_real: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PulseRole {
    /// Enters the frame of an interval.
    Open,
    /// Leaves it.
    Close,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseEvent {
    pub t: f64,
    pub k: usize,
    pub duration: f64,
    pub role: PulseRole,
}

/// A piece of the physical timeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimelinePiece {
    /// Coupling interval `index` runs on `[t0, t1]`.
    Coupling { index: usize, t0: f64, t1: f64 },
    /// `σ_k ⊗ σ_k` pulse on `[t0, t1]`; `t0 == t1` for a kick.
    Pulse { k: usize, t0: f64, t1: f64, role: PulseRole },
}

impl TimelinePiece {
    pub fn span(&self) -> (f64, f64) {
        match *self {
            TimelinePiece::Coupling { t0, t1, .. } | TimelinePiece::Pulse { t0, t1, .. } => (t0, t1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitSchedule {
    gamma: f64,
    j: f64,
    shape: CouplingShape,
    sequence: DecouplingSequence2Q,
    intervals: [CouplingInterval; 4],
    pulses: Vec<PulseEvent>,
    protected: bool,
}

/// Effective couplings of interval `i`: `π − γ` rotates the middle pair.
fn effective_couplings(gamma: f64, j: f64, i: usize) -> (f64, f64) {
    match i {
        1 | 2 => (0.5 * j * (PI - gamma).cos(), 0.5 * j * (PI - gamma).sin()),
        _ => (0.5 * j, 0.0),
    }
}

/// Physical couplings for interval frame `k` by explicit conjugation.
pub fn real_couplings(j1_eff: f64, j2_eff: f64, k: usize) -> (f64, f64) {
    let p = DecouplingSequence2Q::operator_matrix(k);
    coupling_components(&coupling_hamiltonian(j1_eff, j2_eff).conjugate_by(&p))
}

/// Places the sequence pulses around the nominal interval boundaries.
///
/// Instantaneous mode yields an open and a close event for every interval,
/// the `k = 0` ones being identities. Square mode drops the identities and
/// stretches the timeline by one pulse duration per pulse.
pub fn expand_pulses(seq: &DecouplingSequence2Q, boundaries: &[f64; 5]) -> Result<Vec<PulseEvent>> {
    if boundaries.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
        return Err(Error::InvalidSchedule("interval boundaries must increase".into()));
    }
    let d = seq.pulse_duration();
    let mut shift = 0.0;
    let mut out = Vec::new();
    for k in 0..4 {
        for (role, nominal) in [(PulseRole::Open, boundaries[k]), (PulseRole::Close, boundaries[k + 1])] {
            match seq.pulse_mode() {
                PulseMode::Instantaneous => out.push(PulseEvent {
                    t: nominal,
                    k,
                    duration: 0.0,
                    role,
                }),
                PulseMode::Square if k != 0 => {
                    out.push(PulseEvent {
                        t: nominal + shift,
                        k,
                        duration: d,
                        role,
                    });
                    shift += d;
                }
                PulseMode::Square => {}
            }
        }
    }
    Ok(out)
}

/// Validated two-qubit schedule with a constant coupling profile.
pub fn schedule(gamma: f64, j: f64, seq: &DecouplingSequence2Q) -> Result<TwoQubitSchedule> {
    TwoQubitSchedule::new(gamma, j, CouplingShape::Constant, seq)
}

impl TwoQubitSchedule {
    pub fn new(gamma: f64, j: f64, shape: CouplingShape, seq: &DecouplingSequence2Q) -> Result<Self> {
        if !(j.is_finite() && j > 0.0) {
            return Err(Error::InvalidSchedule(format!("coupling J must be positive, got {j}")));
        }
        if !gamma.is_finite() {
            return Err(Error::NonFinite(gamma));
        }
        let tau = seq.interval_tau();
        let expect = PI / (4.0 * j);
        if (tau - expect).abs() > 1e-12 * expect {
            return Err(Error::InvalidSchedule(format!(
                "interval length {tau} differs from π/(4J) = {expect}"
            )));
        }
        let pulses = expand_pulses(seq, &std::array::from_fn(|i| i as f64 * tau))?;
        let mut intervals = [CouplingInterval {
            k: 0,
            t0: 0.0,
            t1: 0.0,
            j1_eff: 0.0,
            j2_eff: 0.0,
            j1_real: 0.0,
            j2_real: 0.0,
        }; 4];
        for (i, iv) in intervals.iter_mut().enumerate() {
            // the interval starts after every pulse that precedes it
            let t0 = i as f64 * tau
                + pulses
                    .iter()
                    .filter(|p| p.k < i || (p.k == i && p.role == PulseRole::Open))
                    .map(|p| p.duration)
                    .sum::<f64>();
            let (j1_eff, j2_eff) = effective_couplings(gamma, j, i);
            let (j1_real, j2_real) = real_couplings(j1_eff, j2_eff, i);
            *iv = CouplingInterval {
                k: i,
                t0,
                t1: t0 + tau,
                j1_eff,
                j2_eff,
                j1_real,
                j2_real,
            };
        }
        let s = Self {
            gamma,
            j,
            shape,
            sequence: *seq,
            intervals,
            pulses,
            protected: true,
        };
        s.check_areas()?;
        Ok(s)
    }

    /// Rotation areas `∫J dt`: `π/4` in the first and last intervals,
    /// `π/2` across the middle pair.
    fn check_areas(&self) -> Result<()> {
        let areas: Vec<f64> = self
            .intervals
            .iter()
            .map(|iv| {
                CompositeRule::new(iv.t0, iv.t1, 16, 8).integrate(|t| self.coupling_strength_in(iv, t))
            })
            .collect();
        let expect = [PI / 4.0, PI / 2.0, PI / 4.0];
        let got = [areas[0], areas[1] + areas[2], areas[3]];
        for (g, e) in got.iter().zip(expect) {
            if (g - e).abs() > QUADRATURE_TOL {
                return Err(Error::InvalidSchedule(format!("coupling area {g} differs from {e}")));
            }
        }
        Ok(())
    }

    /// The same gate with the decoupling sequence switched off: the
    /// effective couplings act directly over `[0, 4τ]` and no pulses fire.
    pub fn unprotected(&self) -> Self {
        let tau = self.tau();
        let mut intervals = self.intervals;
        for (i, iv) in intervals.iter_mut().enumerate() {
            iv.k = 0;
            iv.t0 = i as f64 * tau;
            iv.t1 = iv.t0 + tau;
            iv.j1_real = iv.j1_eff;
            iv.j2_real = iv.j2_eff;
        }
        Self {
            intervals,
            pulses: Vec::new(),
            protected: false,
            ..self.clone()
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn coupling(&self) -> f64 {
        self.j
    }

    pub fn shape(&self) -> CouplingShape {
        self.shape
    }

    pub fn sequence(&self) -> &DecouplingSequence2Q {
        &self.sequence
    }

    pub fn tau(&self) -> f64 {
        self.sequence.interval_tau()
    }

    pub fn intervals(&self) -> &[CouplingInterval; 4] {
        &self.intervals
    }

    pub fn pulses(&self) -> &[PulseEvent] {
        &self.pulses
    }

    pub fn is_protected(&self) -> bool {
        self.protected
    }

    /// Physical end time, `4τ` plus any pulse durations.
    pub fn total_duration(&self) -> f64 {
        let last = self.intervals[3].t1;
        self.pulses.iter().map(|p| p.t + p.duration).fold(last, f64::max)
    }

    /// Coupling intervals and pulses in time order.
    pub fn timeline(&self) -> Vec<TimelinePiece> {
        let mut out = Vec::new();
        for (i, iv) in self.intervals.iter().enumerate() {
            for p in self.pulses.iter().filter(|p| p.k == i && p.role == PulseRole::Open) {
                out.push(TimelinePiece::Pulse {
                    k: p.k,
                    t0: p.t,
                    t1: p.t + p.duration,
                    role: p.role,
                });
            }
            out.push(TimelinePiece::Coupling {
                index: i,
                t0: iv.t0,
                t1: iv.t1,
            });
            for p in self.pulses.iter().filter(|p| p.k == i && p.role == PulseRole::Close) {
                out.push(TimelinePiece::Pulse {
                    k: p.k,
                    t0: p.t,
                    t1: p.t + p.duration,
                    role: p.role,
                });
            }
        }
        out
    }

    fn coupling_strength_in(&self, iv: &CouplingInterval, t: f64) -> f64 {
        self.j * self.shape.factor((t - iv.t0) / (iv.t1 - iv.t0))
    }

    /// Index of the interval containing `t`; boundary instants belong to the
    /// earlier interval.
    fn locate(&self, t: f64) -> Result<usize> {
        let end = self.total_duration();
        if !(0.0..=end).contains(&t) {
            return Err(Error::TimeOutOfRange { t, start: 0.0, end });
        }
        let tol = 1e-12 * end;
        self.intervals
            .iter()
            .position(|iv| t >= iv.t0 - tol && t <= iv.t1 + tol)
            .ok_or_else(|| Error::InvalidSchedule(format!("t = {t} falls inside a pulse")))
    }

    /// `J(t)` at physical time `t`.
    pub fn coupling_strength(&self, t: f64) -> Result<f64> {
        let i = self.locate(t)?;
        Ok(self.coupling_strength_in(&self.intervals[i], t))
    }

    /// Toggling-frame Hamiltonian `2J_1 R_x + 2J_2 R_y` scaled by the shape.
    pub fn effective_hamiltonian(&self, t: f64) -> Result<ComplexMatrix> {
        let i = self.locate(t)?;
        let iv = &self.intervals[i];
        let g = self.shape.factor((t - iv.t0) / (iv.t1 - iv.t0));
        Ok(&r_x().scale_re(2.0 * g * iv.j1_eff) + &r_y().scale_re(2.0 * g * iv.j2_eff))
    }

    /// Physical coupling Hamiltonian during the coupling intervals.
    pub fn real_hamiltonian(&self, t: f64) -> Result<ComplexMatrix> {
        let i = self.locate(t)?;
        let iv = &self.intervals[i];
        let g = self.shape.factor((t - iv.t0) / (iv.t1 - iv.t0));
        Ok(coupling_hamiltonian(g * iv.j1_real, g * iv.j2_real))
    }

    /// Exact toggling-frame propagator from `0` to `t`. Each interval has a
    /// fixed direction, so only the accumulated area matters.
    pub fn effective_propagator(&self, t: f64) -> Result<ComplexMatrix> {
        let stop = self.locate(t)?;
        let mut u = ComplexMatrix::identity(4);
        for (i, iv) in self.intervals.iter().enumerate().take(stop + 1) {
            let s = if i == stop {
                ((t - iv.t0) / (iv.t1 - iv.t0)).clamp(0.0, 1.0)
            } else {
                1.0
            };
            let area = self.j * self.tau() * self.shape.area(s);
            let dir = &r_x().scale_re(2.0 * iv.j1_eff / self.j) + &r_y().scale_re(2.0 * iv.j2_eff / self.j);
            u = &crate::matrix::expm_hermitian(&dir, area)? * &u;
        }
        Ok(u)
    }

    pub fn export(&self) -> ScheduleExport2Q {
        ScheduleExport2Q {
            gamma: self.gamma,
            j: self.j,
            tau: self.tau(),
            shape: self.shape,
            pulse_mode: self.sequence.pulse_mode(),
            pulse_strength: self.sequence.pulse_strength(),
            protected: self.protected,
            intervals: self.intervals.to_vec(),
            pulses: self.pulses.clone(),
        }
    }
}

/// `max |⟨ψ(t)|H_eff(t)|ψ(t)⟩|` along the exact evolution of `psi`.
pub fn parallel_transport_residual_2q(s: &TwoQubitSchedule, psi: &StateVector, grid_points: usize) -> Result<f64> {
    let end = s.intervals()[3].t1;
    let n = grid_points.max(2);
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let t = end * i as f64 / (n - 1) as f64;
        let phi = s.effective_propagator(t)?.apply(psi);
        worst = worst.max(s.effective_hamiltonian(t)?.sandwich(&phi, &phi).norm());
    }
    Ok(worst)
}

/// On-disk form of a two-qubit schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleExport2Q {
    pub gamma: f64,
    #[serde(rename = "J")]
    pub j: f64,
    pub tau: f64,
    #[serde(default)]
    pub shape: CouplingShape,
    pub pulse_mode: PulseMode,
    pub pulse_strength: f64,
    #[serde(default = "default_true")]
    pub protected: bool,
    pub intervals: Vec<CouplingInterval>,
    pub pulses: Vec<PulseEvent>,
}

fn default_true() -> bool {
    true
}

impl ScheduleExport2Q {
    pub fn to_schedule(&self) -> Result<TwoQubitSchedule> {
        let seq = DecouplingSequence2Q::new(self.tau, self.pulse_mode, self.pulse_strength)?;
        let s = TwoQubitSchedule::new(self.gamma, self.j, self.shape, &seq)?;
        Ok(if self.protected { s } else { s.unprotected() })
    }
}
