//! Cyclic Bloch-sphere paths and the geometric gates they generate.
//!
//! A path `(θ(t), φ(t))` on `[0, τ]` fixes the projective basis
//!
//! ```text
//! |φ₁(t)⟩ = cos(θ/2)|0⟩ + sin(θ/2) e^{iφ}|1⟩
//! |φ₂(t)⟩ = sin(θ/2) e^{-iφ}|0⟩ − cos(θ/2)|1⟩
//! ```
//!
//! and the effective Hamiltonian that carries both basis states along the
//! path with no dynamical phase. After one period the evolution is the
//! holonomy `e^{-iγ}|φ₁(0)⟩⟨φ₁(0)| + e^{iγ}|φ₂(0)⟩⟨φ₂(0)|`.
//!
//! # Sign convention
//!
//! `γ = ½ ∮ (1 − cos θ) dφ`, with a point contribution `(1 − cos θ) Δφ / 2`
//! for every jump of `φ` (allowed only at the poles, so this is `0` at
//! `θ = 0` and `Δφ` at `θ = π`). This is the convention under which
//! time-ordered propagation of [`effective_hamiltonian_1q`] reproduces
//! [`holonomy_gate`]; the orange-slice path with azimuth offset `π/8`
//! produces `exp(−iπσ_z/8)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{c, ComplexMatrix, Complex64, StateVector};
use crate::pauli::bloch_operator;
use crate::quadrature::CompositeRule;
use crate::tolerance::POLE_TOL;

/// Time profile of one angle over a segment's local time `s ∈ [0, d]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    Constant { value: f64 },
    Linear { start: f64, end: f64 },
    /// `start + (end − start)(1 − cos(πs/d))/2`: zero slope at both ends.
    CosineRamp { start: f64, end: f64 },
    /// Uniform samples over `[0, d]`, linearly interpolated.
    Sampled { values: Vec<f64> },
}

impl Profile {
    /// Value and time derivative at local time `s` of a segment lasting `d`.
    pub fn eval(&self, s: f64, d: f64) -> (f64, f64) {
        match self {
            Profile::Constant { value } => (*value, 0.0),
            Profile::Linear { start, end } => (start + (end - start) * s / d, (end - start) / d),
            Profile::CosineRamp { start, end } => {
                let x = PI * s / d;
                let half = 0.5 * (end - start);
                (start + half * (1.0 - x.cos()), half * PI / d * x.sin())
            }
            Profile::Sampled { values } => {
                let m = values.len();
                let h = d / (m - 1) as f64;
                let slope = |i: usize| {
                    if i == 0 {
                        (values[1] - values[0]) / h
                    } else if i == m - 1 {
                        (values[m - 1] - values[m - 2]) / h
                    } else {
                        (values[i + 1] - values[i - 1]) / (2.0 * h)
                    }
                };
                let x = (s / h).clamp(0.0, (m - 1) as f64);
                let i = (x.floor() as usize).min(m - 2);
                let frac = x - i as f64;
                let v = values[i] + frac * (values[i + 1] - values[i]);
                let dv = slope(i) + frac * (slope(i + 1) - slope(i));
                (v, dv)
            }
        }
    }

    pub fn start_value(&self) -> f64 {
        match self {
            Profile::Constant { value } => *value,
            Profile::Linear { start, .. } | Profile::CosineRamp { start, .. } => *start,
            Profile::Sampled { values } => values[0],
        }
    }

    pub fn end_value(&self) -> f64 {
        match self {
            Profile::Constant { value } => *value,
            Profile::Linear { end, .. } | Profile::CosineRamp { end, .. } => *end,
            Profile::Sampled { values } => values[values.len() - 1],
        }
    }

    /// Same curve traversed backwards in local time.
    pub fn reversed(&self) -> Profile {
        match self {
            Profile::Constant { value } => Profile::Constant { value: *value },
            Profile::Linear { start, end } => Profile::Linear { start: *end, end: *start },
            Profile::CosineRamp { start, end } => Profile::CosineRamp { start: *end, end: *start },
            Profile::Sampled { values } => Profile::Sampled {
                values: values.iter().rev().copied().collect(),
            },
        }
    }

    /// Extreme values over the segment. Catalog profiles are monotone.
    fn range(&self) -> (f64, f64) {
        match self {
            Profile::Sampled { values } => values
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v))),
            p => {
                let (a, b) = (p.start_value(), p.end_value());
                (a.min(b), a.max(b))
            }
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            Profile::Constant { value } => value.is_finite(),
            Profile::Linear { start, end } | Profile::CosineRamp { start, end } => {
                start.is_finite() && end.is_finite()
            }
            Profile::Sampled { values } => values.iter().all(|v| v.is_finite()),
        }
    }

    fn is_smooth(&self) -> bool {
        !matches!(self, Profile::Sampled { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub duration: f64,
    pub theta: Profile,
    pub phi: Profile,
}

impl Segment {
    pub fn new(duration: f64, theta: Profile, phi: Profile) -> Self {
        Self { duration, theta, phi }
    }
}

/// Angles and their rates at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPoint {
    pub theta: f64,
    pub phi: f64,
    pub theta_dot: f64,
    pub phi_dot: f64,
}

/// A piecewise cyclic path on the Bloch sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPath", into = "RawPath")]
pub struct PathSpec {
    segments: Vec<Segment>,
}

#[derive(Serialize, Deserialize)]
struct RawPath {
    segments: Vec<Segment>,
}

impl TryFrom<RawPath> for PathSpec {
    type Error = Error;

    fn try_from(raw: RawPath) -> Result<Self> {
        PathSpec::new(raw.segments)
    }
}

impl From<PathSpec> for RawPath {
    fn from(p: PathSpec) -> Self {
        RawPath { segments: p.segments }
    }
}

/// A `φ` discontinuity between two consecutive instants of the path.
#[derive(Debug, Clone, Copy, PartialEq)]
struct PhiJump {
    theta: f64,
    delta: f64,
}

fn at_north(theta: f64) -> bool {
    theta.abs() < POLE_TOL
}

fn at_south(theta: f64) -> bool {
    (theta - PI).abs() < POLE_TOL
}

fn wrapped(delta: f64) -> f64 {
    delta - 2.0 * PI * (delta / (2.0 * PI)).round()
}

impl PathSpec {
    /// Validates and builds a path.
    ///
    /// Checks positive durations, `θ ∈ [0, π]`, continuity of `θ` across
    /// segments and around the loop, and that `φ` only jumps at a pole
    /// (or by a multiple of `2π`).
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let path = Self { segments };
        path.validate()?;
        Ok(path)
    }

    /// Skips validation; for building deliberately broken paths in tests.
    pub fn new_unchecked(segments: Vec<Segment>) -> Self {
        Self { segments }
    }

    fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::InvalidPath("path has no segments".into()));
        }
        for (i, seg) in self.segments.iter().enumerate() {
            if !(seg.duration.is_finite() && seg.duration > 0.0) {
                return Err(Error::InvalidPath(format!(
                    "segment {i} has non-positive duration {}",
                    seg.duration
                )));
            }
            for p in [&seg.theta, &seg.phi] {
                if let Profile::Sampled { values } = p {
                    if values.len() < 2 {
                        return Err(Error::InvalidPath(format!("segment {i} has fewer than 2 samples")));
                    }
                }
                if !p.is_finite() {
                    return Err(Error::InvalidPath(format!("segment {i} has non-finite parameters")));
                }
            }
            let (lo, hi) = seg.theta.range();
            if lo < -1e-12 || hi > PI + 1e-12 {
                return Err(Error::InvalidPath(format!(
                    "segment {i} leaves theta in [0, pi]: range [{lo}, {hi}]"
                )));
            }
        }
        for (i, (theta_a, theta_b)) in self.boundary_thetas().into_iter().enumerate() {
            if (theta_a - theta_b).abs() > POLE_TOL {
                return Err(Error::InvalidPath(format!(
                    "theta is discontinuous at boundary {i}: {theta_a} -> {theta_b}"
                )));
            }
        }
        self.phi_jumps().map(|_| ())
    }

    /// `(θ before, θ after)` at each boundary, the last being the loop closure.
    fn boundary_thetas(&self) -> Vec<(f64, f64)> {
        let n = self.segments.len();
        (0..n)
            .map(|i| {
                (
                    self.segments[i].theta.end_value(),
                    self.segments[(i + 1) % n].theta.start_value(),
                )
            })
            .collect()
    }

    /// All `φ` jumps, including the loop closure; errors on an inadmissible one.
    fn phi_jumps(&self) -> Result<Vec<PhiJump>> {
        let n = self.segments.len();
        let mut jumps = Vec::new();
        for i in 0..n {
            let a = &self.segments[i];
            let b = &self.segments[(i + 1) % n];
            let delta = b.phi.start_value() - a.phi.end_value();
            if delta.abs() < 1e-15 {
                continue;
            }
            let theta = a.theta.end_value();
            if at_north(theta) || at_south(theta) {
                jumps.push(PhiJump { theta, delta });
            } else if wrapped(delta).abs() > POLE_TOL {
                return Err(Error::InvalidPath(format!(
                    "phi jumps by {delta} at theta = {theta}, away from the poles"
                )));
            }
        }
        Ok(jumps)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Segment start times plus the final time.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = vec![0.0];
        let mut t = 0.0;
        for s in &self.segments {
            t += s.duration;
            out.push(t);
        }
        out
    }

    /// Whether every profile has analytic derivatives.
    pub fn is_analytic(&self) -> bool {
        self.segments.iter().all(|s| s.theta.is_smooth() && s.phi.is_smooth())
    }

    /// `(θ₀, φ₀)` at `t = 0`.
    pub fn start_angles(&self) -> (f64, f64) {
        let s = &self.segments[0];
        (s.theta.start_value(), s.phi.start_value())
    }

    /// Segment index and local time; boundary instants belong to the earlier segment.
    fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let total = self.total_duration();
        let eps = 1e-12 * total.max(1.0);
        if !(t >= -eps && t <= total + eps) {
            return Err(Error::TimeOutOfRange { t, start: 0.0, end: total });
        }
        let mut start = 0.0;
        for (i, seg) in self.segments.iter().enumerate() {
            let end = start + seg.duration;
            if t <= end || i == self.segments.len() - 1 {
                return Ok((i, (t - start).clamp(0.0, seg.duration)));
            }
            start = end;
        }
        unreachable!("non-empty path")
    }

    pub fn point(&self, t: f64) -> Result<PathPoint> {
        let (i, s) = self.locate(t)?;
        let seg = &self.segments[i];
        let (theta, theta_dot) = seg.theta.eval(s, seg.duration);
        let (phi, phi_dot) = seg.phi.eval(s, seg.duration);
        Ok(PathPoint { theta, phi, theta_dot, phi_dot })
    }

    /// The path traversed backwards: segments in reverse order, local time reversed.
    pub fn reversed(&self) -> PathSpec {
        PathSpec {
            segments: self
                .segments
                .iter()
                .rev()
                .map(|s| Segment::new(s.duration, s.theta.reversed(), s.phi.reversed()))
                .collect(),
        }
    }

    /// Same shape, every duration scaled so the period becomes `tau`.
    pub fn with_period(&self, tau: f64) -> PathSpec {
        let k = tau / self.total_duration();
        PathSpec {
            segments: self
                .segments
                .iter()
                .map(|s| Segment::new(s.duration * k, s.theta.clone(), s.phi.clone()))
                .collect(),
        }
    }
}

/// The projective basis `(|φ₁⟩, |φ₂⟩)` at angles `(θ, φ)`.
pub fn basis_at(theta: f64, phi: f64) -> (StateVector, StateVector) {
    let (s, co) = (0.5 * theta).sin_cos();
    let e = Complex64::from_polar(1.0, phi);
    (
        StateVector::new(vec![c(co, 0.0), e * s]),
        StateVector::new(vec![e.conj() * s, c(-co, 0.0)]),
    )
}

pub fn basis_states(path: &PathSpec, t: f64) -> Result<(StateVector, StateVector)> {
    let p = path.point(t)?;
    Ok(basis_at(p.theta, p.phi))
}

/// Bloch coefficients of the parallel-transport Hamiltonian at one path point.
pub fn effective_coefficients(p: &PathPoint) -> [f64; 3] {
    let (sp, cp) = p.phi.sin_cos();
    let s2 = (2.0 * p.theta).sin();
    let c2 = (2.0 * p.theta).cos();
    [
        -0.5 * p.theta_dot * sp - 0.25 * p.phi_dot * s2 * cp,
        0.5 * p.theta_dot * cp - 0.25 * p.phi_dot * s2 * sp,
        0.25 * p.phi_dot * (1.0 - c2),
    ]
}

/// `H_S^eff(t)`, the rotating-frame Hamiltonian with vanishing diagonal in the moving basis.
pub fn effective_hamiltonian_1q(path: &PathSpec, t: f64) -> Result<ComplexMatrix> {
    Ok(bloch_operator(effective_coefficients(&path.point(t)?)))
}

const PHASE_PANELS: usize = 32;
const PHASE_ORDER: usize = 8;
const SAMPLED_PANELS_PER_SAMPLE: usize = 2;

/// Geometric phase `γ = ½ ∮ (1 − cos θ) dφ`, jump terms included.
pub fn geometric_phase(path: &PathSpec) -> Result<f64> {
    let jumps = path.phi_jumps()?;
    let mut gamma = 0.0;
    for seg in path.segments() {
        let panels = match (&seg.theta, &seg.phi) {
            (Profile::Sampled { values }, _) | (_, Profile::Sampled { values }) => {
                values.len() * SAMPLED_PANELS_PER_SAMPLE
            }
            _ => PHASE_PANELS,
        };
        let rule = CompositeRule::new(0.0, seg.duration, panels, PHASE_ORDER);
        gamma += rule.integrate(|s| {
            let (theta, _) = seg.theta.eval(s, seg.duration);
            let (_, phi_dot) = seg.phi.eval(s, seg.duration);
            0.5 * (1.0 - theta.cos()) * phi_dot
        });
    }
    for j in jumps {
        gamma += 0.5 * (1.0 - j.theta.cos()) * j.delta;
    }
    Ok(gamma)
}

/// Largest `|⟨φ_k(t)| H(t) |φ_k(t)⟩|` over `grid_points` midpoints of `[0, τ]`.
pub fn diagonal_residual(
    path: &PathSpec,
    grid_points: usize,
    hamiltonian: impl Fn(f64) -> Result<ComplexMatrix>,
) -> Result<f64> {
    let tau = path.total_duration();
    let n = grid_points.max(1);
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let t = tau * (i as f64 + 0.5) / n as f64;
        let h = hamiltonian(t)?;
        let (b1, b2) = basis_states(path, t)?;
        worst = worst.max(h.sandwich(&b1, &b1).norm()).max(h.sandwich(&b2, &b2).norm());
    }
    Ok(worst)
}

/// Parallel-transport check for the path's own effective Hamiltonian.
pub fn parallel_transport_residual(path: &PathSpec, grid_points: usize) -> Result<f64> {
    diagonal_residual(path, grid_points, |t| effective_hamiltonian_1q(path, t))
}

/// Rotation `exp(−iγ n·σ)` about `n = (sinθ₀cosφ₀, sinθ₀sinφ₀, cosθ₀)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateTarget1Q {
    pub theta0: f64,
    pub phi0: f64,
    pub gamma: f64,
}

impl GateTarget1Q {
    pub fn axis(&self) -> [f64; 3] {
        let (st, ct) = self.theta0.sin_cos();
        let (sp, cp) = self.phi0.sin_cos();
        [st * cp, st * sp, ct]
    }
}

pub fn target_gate_1q(target: &GateTarget1Q) -> ComplexMatrix {
    let (s, co) = target.gamma.sin_cos();
    &ComplexMatrix::identity(2).scale_re(co) + &bloch_operator(target.axis()).scale(c(0.0, -s))
}

/// `e^{−iγ}|φ₁(0)⟩⟨φ₁(0)| + e^{iγ}|φ₂(0)⟩⟨φ₂(0)|`.
pub fn holonomy_gate(path: &PathSpec) -> Result<ComplexMatrix> {
    let gamma = geometric_phase(path)?;
    let (b1, b2) = basis_states(path, 0.0)?;
    Ok(&b1.projector().scale(Complex64::from_polar(1.0, -gamma))
        + &b2.projector().scale(Complex64::from_polar(1.0, gamma)))
}

/// The gate target implied by a path's start point and geometric phase.
pub fn implied_target(path: &PathSpec) -> Result<GateTarget1Q> {
    let (theta0, phi0) = path.start_angles();
    Ok(GateTarget1Q {
        theta0,
        phi0,
        gamma: geometric_phase(path)?,
    })
}

/// North pole to south pole along `φ = 0`, back along `φ = gamma`, each leg
/// lasting `τ/2` with θ linear in time. Realizes `exp(−iγσ_z)`.
pub fn orange_slice(gamma: f64, tau: f64) -> PathSpec {
    PathSpec::new(vec![
        Segment::new(0.5 * tau, Profile::Linear { start: 0.0, end: PI }, Profile::Constant { value: 0.0 }),
        Segment::new(0.5 * tau, Profile::Linear { start: PI, end: 0.0 }, Profile::Constant { value: gamma }),
    ])
    .expect("orange slice is a valid path")
}

/// Orange slice with cosine-ramped legs (zero θ̇ at the poles).
pub fn smooth_orange_slice(gamma: f64, tau: f64) -> PathSpec {
    PathSpec::new(vec![
        Segment::new(0.5 * tau, Profile::CosineRamp { start: 0.0, end: PI }, Profile::Constant { value: 0.0 }),
        Segment::new(0.5 * tau, Profile::CosineRamp { start: PI, end: 0.0 }, Profile::Constant { value: gamma }),
    ])
    .expect("smooth orange slice is a valid path")
}

/// One loop around the circle of colatitude `theta` at constant angular speed.
pub fn latitude_loop(theta: f64, tau: f64) -> PathSpec {
    PathSpec::new(vec![Segment::new(
        tau,
        Profile::Constant { value: theta },
        Profile::Linear { start: 0.0, end: 2.0 * PI },
    )])
    .expect("latitude loop is a valid path")
}

pub fn equatorial_loop(tau: f64) -> PathSpec {
    latitude_loop(0.5 * PI, tau)
}

/// Named paths used throughout the test suite.
pub fn catalog(tau: f64) -> Vec<(&'static str, PathSpec)> {
    vec![
        ("orange_slice_pi_8", orange_slice(PI / 8.0, tau)),
        ("orange_slice_pi_3", orange_slice(PI / 3.0, tau)),
        ("smooth_orange_slice_pi_8", smooth_orange_slice(PI / 8.0, tau)),
        ("equatorial_loop", equatorial_loop(tau)),
        ("latitude_loop_pi_3", latitude_loop(PI / 3.0, tau)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{ONE, ZERO};
    use crate::pauli::{sigma_x, sigma_y, sigma_z};

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        (a - b).frobenius_norm() < tol
    }

    fn vclose(a: &StateVector, b: &StateVector) -> bool {
        a.distance(b) < 1e-14
    }

    #[test]
    fn basis_examples() {
        let (b1, b2) = basis_at(0.0, 1.234);
        assert!(vclose(&b1, &StateVector::basis(2, 0)));
        assert!(vclose(&b2, &StateVector::basis(2, 1).scale(-ONE)));

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (b1, b2) = basis_at(PI / 2.0, 0.0);
        assert!(vclose(&b1, &StateVector::new(vec![c(s, 0.0), c(s, 0.0)])));
        assert!(vclose(&b2, &StateVector::new(vec![c(s, 0.0), c(-s, 0.0)])));

        let e = Complex64::from_polar(1.0, PI / 8.0);
        let (b1, b2) = basis_at(PI, PI / 8.0);
        assert!(b1.distance(&StateVector::new(vec![ZERO, e])) < 1e-15);
        assert!(b2.distance(&StateVector::new(vec![e.conj(), ZERO])) < 1e-15);
    }

    #[test]
    fn basis_time_out_of_range() {
        let p = orange_slice(PI / 8.0, 1.0);
        assert!(matches!(basis_states(&p, 1.5), Err(Error::TimeOutOfRange { .. })));
        assert!(matches!(basis_states(&p, -0.1), Err(Error::TimeOutOfRange { .. })));
    }

    #[test]
    fn effective_hamiltonian_examples() {
        let still = PathSpec::new(vec![Segment::new(
            1.0,
            Profile::Constant { value: 1.0 },
            Profile::Constant { value: 0.3 },
        )])
        .unwrap();
        assert_eq!(effective_hamiltonian_1q(&still, 0.4).unwrap(), ComplexMatrix::zeros(2));

        let p = orange_slice(PI / 8.0, 1.0);
        let h = effective_hamiltonian_1q(&p, 0.2).unwrap();
        assert!(close(&h, &sigma_y().scale_re(PI), 1e-12));

        let eq = equatorial_loop(1.0);
        let h = effective_hamiltonian_1q(&eq, 0.37).unwrap();
        assert!(close(&h, &sigma_z().scale_re(PI), 1e-12));
        assert!(h.trace().norm() < 1e-15 && h.is_hermitian(1e-15));
    }

    #[test]
    fn geometric_phase_examples() {
        let g = geometric_phase(&orange_slice(PI / 8.0, 1.0)).unwrap();
        assert!((g - PI / 8.0).abs() < 1e-12);
        let flat = PathSpec::new(vec![
            Segment::new(0.5, Profile::Linear { start: 0.3, end: 2.0 }, Profile::Constant { value: 0.7 }),
            Segment::new(0.5, Profile::Linear { start: 2.0, end: 0.3 }, Profile::Constant { value: 0.7 }),
        ])
        .unwrap();
        assert!(geometric_phase(&flat).unwrap().abs() < 1e-15);
        let g = geometric_phase(&equatorial_loop(1.0)).unwrap();
        assert!((g.abs() - PI).abs() < 1e-12);
    }

    #[test]
    fn phi_jump_away_from_pole_is_rejected() {
        let segs = vec![
            Segment::new(0.5, Profile::Linear { start: 0.0, end: 1.0 }, Profile::Constant { value: 0.0 }),
            Segment::new(0.5, Profile::Linear { start: 1.0, end: 0.0 }, Profile::Constant { value: 0.4 }),
        ];
        assert!(matches!(PathSpec::new(segs.clone()), Err(Error::InvalidPath(_))));
        let raw = PathSpec::new_unchecked(segs);
        assert!(matches!(geometric_phase(&raw), Err(Error::InvalidPath(_))));
        assert!(holonomy_gate(&raw).is_err());
    }

    #[test]
    fn path_validation() {
        assert!(PathSpec::new(vec![]).is_err());
        let out_of_range =
            vec![Segment::new(1.0, Profile::Linear { start: 0.0, end: 4.0 }, Profile::Constant { value: 0.0 })];
        assert!(PathSpec::new(out_of_range).is_err());
        let open = vec![Segment::new(1.0, Profile::Linear { start: 0.2, end: 1.0 }, Profile::Constant { value: 0.0 })];
        assert!(PathSpec::new(open).is_err());
        let zero_len = vec![Segment::new(0.0, Profile::Constant { value: 0.0 }, Profile::Constant { value: 0.0 })];
        assert!(PathSpec::new(zero_len).is_err());
    }

    #[test]
    fn parallel_transport_examples() {
        assert!(parallel_transport_residual(&orange_slice(PI / 8.0, 1.0), 200).unwrap() < 1e-10);
        assert!(parallel_transport_residual(&equatorial_loop(1.0), 200).unwrap() < 1e-10);
        let eq = equatorial_loop(1.0);
        let perturbed = diagonal_residual(&eq, 50, |t| {
            Ok(&effective_hamiltonian_1q(&eq, t)? + &sigma_z().scale_re(0.1))
        })
        .unwrap();
        // on the equator ⟨φ_k|σ_z|φ_k⟩ = 0; the perturbation shows up off-diagonal only
        assert!(perturbed < 1e-10);
        let lat = latitude_loop(PI / 3.0, 1.0);
        let perturbed = diagonal_residual(&lat, 50, |t| {
            Ok(&effective_hamiltonian_1q(&lat, t)? + &sigma_z().scale_re(0.1))
        })
        .unwrap();
        assert!((perturbed - 0.1 * (PI / 3.0).cos()).abs() < 1e-12);
    }

    #[test]
    fn perturbation_along_the_moving_axis_shows_up_in_full() {
        // on the equator at φ = 0 the moving basis is σ_x-diagonal
        let still = PathSpec::new(vec![Segment::new(
            1.0,
            Profile::Constant { value: PI / 2.0 },
            Profile::Constant { value: 0.0 },
        )])
        .unwrap();
        let r = diagonal_residual(&still, 10, |t| {
            Ok(&effective_hamiltonian_1q(&still, t)? + &sigma_x().scale_re(0.1))
        })
        .unwrap();
        assert!((r - 0.1).abs() < 1e-15, "{r}");
    }

    #[test]
    fn target_gate_examples() {
        let g = target_gate_1q(&GateTarget1Q { theta0: 0.0, phi0: 0.0, gamma: PI / 8.0 });
        let expect = ComplexMatrix::diag(&[Complex64::from_polar(1.0, -PI / 8.0), Complex64::from_polar(1.0, PI / 8.0)]);
        assert!(close(&g, &expect, 1e-15));
        let g = target_gate_1q(&GateTarget1Q { theta0: 0.7, phi0: 2.0, gamma: 0.0 });
        assert!(close(&g, &ComplexMatrix::identity(2), 1e-15));
        let g = target_gate_1q(&GateTarget1Q { theta0: PI / 2.0, phi0: 0.0, gamma: PI / 2.0 });
        assert!(close(&g, &sigma_x().scale(c(0.0, -1.0)), 1e-15));
    }

    #[test]
    fn holonomy_examples() {
        let g = holonomy_gate(&orange_slice(PI / 8.0, 1.0)).unwrap();
        let expect = target_gate_1q(&GateTarget1Q { theta0: 0.0, phi0: 0.0, gamma: PI / 8.0 });
        assert!(close(&g, &expect, 1e-12));
        let still = PathSpec::new(vec![Segment::new(
            1.0,
            Profile::Constant { value: 1.1 },
            Profile::Constant { value: 0.2 },
        )])
        .unwrap();
        assert!(close(&holonomy_gate(&still).unwrap(), &ComplexMatrix::identity(2), 1e-15));
        let g = holonomy_gate(&equatorial_loop(1.0)).unwrap();
        assert!(close(&g, &ComplexMatrix::identity(2).scale_re(-1.0), 1e-12));
    }

    #[test]
    fn holonomy_equals_axis_rotation_for_catalog() {
        for (name, p) in catalog(1.0) {
            let target = implied_target(&p).unwrap();
            let g = holonomy_gate(&p).unwrap();
            assert!(close(&g, &target_gate_1q(&target), 1e-10), "{name}");
        }
    }

    #[test]
    fn sampled_profile_interpolates() {
        let p = Profile::Sampled { values: vec![0.0, 1.0, 4.0] };
        let (v, d) = p.eval(0.25, 1.0);
        assert!((v - 0.5).abs() < 1e-15);
        // node slopes 2, 4, 6 interpolated halfway between nodes 0 and 1
        assert!((d - 3.0).abs() < 1e-15);
        assert_eq!(p.reversed().start_value(), 4.0);
    }

    #[test]
    fn path_round_trips_through_json() {
        let p = smooth_orange_slice(0.3, 2.0);
        let s = serde_json::to_string(&p).unwrap();
        let back: PathSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(p, back);
        let bad = r#"{"segments":[{"duration":1.0,"theta":{"kind":"linear","start":0.0,"end":1.0},"phi":{"kind":"constant","value":0.0}}]}"#;
        assert!(serde_json::from_str::<PathSpec>(bad).is_err());
    }
}
