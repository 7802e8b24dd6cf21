use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (|H - H^dagger|_F = {0:e})")]
    NotHermitian(f64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("state vector is not normalized (norm = {0})")]
    NotNormalized(f64),
    #[error("invalid decoupling frame: {0}")]
    InvalidFrame(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("time {t} outside [{start}, {end}]")]
    TimeOutOfRange { t: f64, start: f64, end: f64 },
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid noise model: {0}")]
    InvalidNoise(String),
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("non-finite Hamiltonian entry at t = {0}")]
    NonFinite(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
