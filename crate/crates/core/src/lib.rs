//! Decoupling-protected geometric gates: pulse synthesis, schedule
//! construction and open-system simulation.
//!
//! Units are dimensionless throughout (`ħ = 1`); time is usually measured in
//! units of the gate period `τ`.

pub mod control;
pub mod engine;
pub mod error;
pub mod gate2q;
pub mod geometry;
pub mod matrix;
pub mod noise;
pub mod pauli;
pub mod pulse1q;
pub mod quadrature;
pub mod tolerance;

pub use error::{Error, Result};
pub use matrix::{Complex64, ComplexMatrix, StateVector};
