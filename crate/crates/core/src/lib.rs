//! Maximum-likelihood estimation, simulation and goodness-of-fit for
//! univariate exponential-kernel Hawkes processes whose events may either
//! excite or inhibit future activity.
//!
//! The conditional intensity is the positive part of the linear Hawkes
//! intensity. Because it can sit at zero after an inhibiting event, the
//! compensator is assembled from closed-form restart times, which keeps the
//! exact log-likelihood computable in O(N).

pub mod error;
pub mod estimate;
pub mod experiment;
pub mod gof;
pub mod intensity;
pub mod io;
pub mod likelihood;
pub mod model;
pub mod optimize;
pub mod simulate;

pub use error::{HawkesError, Result};
pub use estimate::{fit, FitOptions};
pub use gof::{goodness_of_fit, ks_test_exp1, time_change_residuals};
pub use intensity::{
    build_event_states, compensator, compensator_lm, conditional_intensity_at, segment_compensator,
    transformed_times, underlying_intensity_at, zero_time_fraction,
};
pub use likelihood::{
    approx_log_likelihood, clamped_objective, exact_log_likelihood, log_likelihood,
};
pub use model::{
    validate_events, validate_params, EventSequence, EventState, ExpHawkesParams, FitResult,
    GofReport, Method,
};
pub use simulate::{child_seed, simulate, simulate_batch, RngSeed, StopCriterion};
