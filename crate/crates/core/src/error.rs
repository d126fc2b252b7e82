use thiserror::Error;

/// Errors raised by model validation and the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HawkesError {
    #[error("baseline intensity must be strictly positive, got {0}")]
    NonPositiveBaseline(f64),
    #[error("decay rate must be strictly positive, got {0}")]
    NonPositiveDecay(f64),
    #[error("parameter `{0}` is not finite")]
    NonFinite(&'static str),
    #[error("event times must be strictly increasing (index {index}: {previous} then {current})")]
    NotStrictlyIncreasing {
        index: usize,
        previous: f64,
        current: f64,
    },
    #[error("event time at index {index} must be positive and finite, got {value}")]
    NonPositiveTime { index: usize, value: f64 },
    #[error("horizon {horizon} precedes the last event time {last_event}")]
    HorizonBeforeLastEvent { horizon: f64, last_event: f64 },
    #[error("event sequence is empty")]
    EmptySequence,
    #[error("at least {required} events are required, got {found}")]
    TooFewEvents { required: usize, found: usize },
    #[error("sample is empty")]
    EmptySample,
    #[error("sample contains a negative or non-finite value at index {0}")]
    InvalidSample(usize),
    #[error("invalid stop criterion: {0}")]
    InvalidStopCriterion(String),
    #[error("invalid fit options: {0}")]
    InvalidOptions(String),
    #[error("objective is not finite at the perturbed point")]
    NonFiniteObjective,
    #[error("optimizer failed: {0}")]
    OptimizerFailure(String),
}

pub type Result<T> = std::result::Result<T, HawkesError>;
