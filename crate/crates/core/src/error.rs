use thiserror::Error;

/// Errors produced by configuration validation and the operations that
/// reject bad inputs.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degree distribution has no support")]
    EmptyDistribution,

    #[error("degree 0 is not a valid repetition count")]
    ZeroDegree,

    #[error("coefficient {value} for degree {degree} is outside [0, 1]")]
    CoefficientOutOfRange { degree: u32, value: f64 },

    #[error("probabilities sum to {sum}; more than 1e-6 away from 1")]
    NotNormalized { sum: f64 },

    #[error("power levels must be positive and strictly decreasing, got {0:?}")]
    BadPowerLevels(Vec<f64>),

    #[error("power levels and probabilities have mismatched lengths ({levels} vs {probs})")]
    PowerLengthMismatch { levels: usize, probs: usize },

    #[error("capture threshold beta must be > 1, got {0}")]
    BadCaptureThreshold(f64),

    #[error("gap factor k must be >= 1")]
    BadGapFactor,

    #[error("frame must have at least 1 slot")]
    NoSlots,

    #[error("load must be finite and >= 0, got {0}")]
    BadLoad(f64),

    #[error("sampled repetition degree {degree} exceeds the {slots} available slots")]
    DegreeExceedsSlots { degree: u32, slots: usize },

    #[error("polynomial argument {0} is outside [0, 1]")]
    OutOfDomain(f64),

    #[error("capture coefficient table needs max_degree >= 1, got {0}")]
    BadMaxDegree(usize),

    #[error("minimum decodable power {min_power} exceeds transmit power {power}")]
    BadPowerFloor { min_power: f64, power: f64 },

    #[error("path-loss discretization requires k*beta > 1, got {0}")]
    BadDiscretizationGap(f64),

    #[error("path-loss exponent must be > 0, got {0}")]
    BadPathLossExponent(f64),

    #[error("optimizer settings invalid: {0}")]
    BadOptimizerSettings(String),

    #[error("optimization problem invalid: {0}")]
    BadProblem(String),

    #[error("monte carlo needs at least 1 trial")]
    NoTrials,
}

pub type Result<T> = std::result::Result<T, Error>;
