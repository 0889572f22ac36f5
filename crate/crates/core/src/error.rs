//! Error types shared across the solver.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QhdError {
    #[error("grid resolution must be even, got N = {0}")]
    OddResolution(usize),
    #[error("grid resolution must be at least 8, got N = {0}")]
    ResolutionTooSmall(usize),
    #[error("dimension must be 1, 2 or 3, got {0}")]
    BadDimension(usize),
    #[error("domain length must be positive, got {0}")]
    NonPositiveLength(f64),
    #[error("mode index {index} exceeds the dealiasing cutoff {cutoff}")]
    ModeAboveCutoff { index: i64, cutoff: i64 },
    #[error("density approached vacuum: min(1+rho) = {min_density:e} <= floor {floor}")]
    VacuumApproach { min_density: f64, floor: f64 },
    #[error("non-finite value produced in {0}")]
    NonFinite(&'static str),
    #[error("invalid physical parameters: {0}")]
    InvalidParams(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("trajectories are not aligned: {0}")]
    MisalignedTrajectories(String),
    #[error("rate fit needs at least 4 (hbar, error) pairs, got {0}")]
    InsufficientPoints(usize),
    #[error("all error values lie below 10x the noise floor; nothing to fit")]
    AllBelowNoiseFloor,
    #[error("all sampled states are zero; ratio is undefined")]
    DegenerateSample,
    #[error("operation needs at least {needed} snapshots, got {got}")]
    TooFewSnapshots { needed: usize, got: usize },
    #[error("simulation aborted: {0}")]
    SimulationAborted(String),
    #[error("snapshot file error: {0}")]
    BadSnapshot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, QhdError>;
