use thiserror::Error;

/// Errors produced by the honeycomb toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid honeycomb spec: m={m}, n_c={n_c} (need m >= 1 and n_c >= 5)")]
    InvalidSpec { m: usize, n_c: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state is not an equilibrium: max |rhs| = {residual:e} exceeds {tol:e}")]
    NotAnEquilibrium { residual: f64, tol: f64 },

    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },

    #[error("energy increased by {increase:e} at t = {t}")]
    EnergyIncrease { t: f64, increase: f64 },

    #[error("edge ({0}, {1}) does not lie on a basis cycle")]
    EdgeNotOnCycle(usize, usize),

    #[error("edge phase difference {0} does not exceed pi/2")]
    EdgeNotCritical(f64),

    #[error("winding sum {sum} is not within tolerance of a multiple of 2*pi")]
    NonIntegerWinding { sum: f64 },

    #[error("state is not phase-cohesive: edge ({0}, {1}) has |d_cc| >= pi/2")]
    NotPhaseCohesive(usize, usize),

    #[error("memory index {index} out of range (capacity {capacity})")]
    IndexOutOfRange { index: String, capacity: String },

    #[error("cycle {cycle}: phase difference residual {residual} exceeds snap tolerance {tol}")]
    SnapResidual {
        cycle: usize,
        residual: f64,
        tol: f64,
    },

    #[error("cycle {cycle}: winding {k} outside the admissible range +/-{bound}")]
    WindingOutOfRange { cycle: usize, k: i64, bound: i64 },

    #[error("mean of deviation is {0:e}, expected zero")]
    NotMeanZero(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("oscillator {oscillator} has only {found} peaks after settling (need {needed})")]
    TooFewPeaks {
        oscillator: usize,
        found: usize,
        needed: usize,
    },

    #[error("grid mismatch: {0} vs {1} samples")]
    GridMismatch(usize, usize),

    #[error("impulse {impulse} too large for the linear regime (max {max})")]
    ImpulseTooLarge { impulse: f64, max: f64 },

    #[error("eigensolver did not converge after {0} sweeps")]
    EigenNoConvergence(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
