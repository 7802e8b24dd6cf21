//! Numerical tolerances shared across the crate.
//!
//! Every check that compares floating point results pulls its threshold from
//! [`Tolerances`]. The defaults are the values the test suite is pinned to;
//! callers may pass an overridden table where an operation accepts one.

use serde::{Deserialize, Serialize};

/// Default absolute tolerance for matrix identities.
pub const ATOL: f64 = 1e-10;
/// Hermiticity check, Frobenius norm of `H - H^dagger`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Unitarity check, Frobenius norm of `U^dagger U - I`.
pub const UNITARY_TOL: f64 = 1e-10;
/// Normalization check for state vectors.
pub const NORM_TOL: f64 = 1e-10;
/// Largest tolerated imaginary part of an expectation value that must be real.
pub const IMAG_TOL: f64 = 1e-10;
/// Target accuracy of the composite quadrature rules.
pub const QUADRATURE_TOL: f64 = 1e-10;
/// Eigenvalue gap below which eigenvectors are re-orthonormalized.
pub const DEGENERACY_GAP: f64 = 1e-12;
/// How close theta must be to a pole for a phi jump to be admissible.
pub const POLE_TOL: f64 = 1e-9;
/// Maximum fidelity shift on step doubling before a run is flagged.
pub const RICHARDSON_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub atol: f64,
    pub hermitian: f64,
    pub unitary: f64,
    pub norm: f64,
    pub quadrature: f64,
    pub degeneracy_gap: f64,
    pub pole: f64,
    pub richardson: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            atol: ATOL,
            hermitian: HERMITIAN_TOL,
            unitary: UNITARY_TOL,
            norm: NORM_TOL,
            quadrature: QUADRATURE_TOL,
            degeneracy_gap: DEGENERACY_GAP,
            pole: POLE_TOL,
            richardson: RICHARDSON_TOL,
        }
    }
}
