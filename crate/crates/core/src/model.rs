//! Domain types shared by every module: the parameter triple, validated
//! event sequences, the per-event recursion state and result containers.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{HawkesError, Result};

/// Parameters `(lambda0, alpha, beta)` of the exponential-kernel model
///
/// ```text
/// lambda(t) = ( lambda0 + sum_{T_k <= t} alpha * exp(-beta (t - T_k)) )^+
/// ```
///
/// `alpha > 0` gives self-excitation, `alpha < 0` inhibition, and
/// `alpha == 0` a homogeneous Poisson process with rate `lambda0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ExpHawkesParams {
    lambda0: f64,
    alpha: f64,
    beta: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    lambda0: f64,
    alpha: f64,
    beta: f64,
}

impl TryFrom<RawParams> for ExpHawkesParams {
    type Error = HawkesError;

    fn try_from(raw: RawParams) -> Result<Self> {
        Self::new(raw.lambda0, raw.alpha, raw.beta)
    }
}

impl From<ExpHawkesParams> for RawParams {
    fn from(p: ExpHawkesParams) -> Self {
        RawParams {
            lambda0: p.lambda0,
            alpha: p.alpha,
            beta: p.beta,
        }
    }
}

impl ExpHawkesParams {
    /// Validates and builds a parameter triple.
    pub fn new(lambda0: f64, alpha: f64, beta: f64) -> Result<Self> {
        for (name, value) in [("lambda0", lambda0), ("alpha", alpha), ("beta", beta)] {
            if !value.is_finite() {
                return Err(HawkesError::NonFinite(name));
            }
        }
        if lambda0 <= 0.0 {
            return Err(HawkesError::NonPositiveBaseline(lambda0));
        }
        if beta <= 0.0 {
            return Err(HawkesError::NonPositiveDecay(beta));
        }
        Ok(Self {
            lambda0,
            alpha,
            beta,
        })
    }

    pub fn from_array(theta: [f64; 3]) -> Result<Self> {
        Self::new(theta[0], theta[1], theta[2])
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.lambda0, self.alpha, self.beta]
    }
}

impl fmt::Display for ExpHawkesParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(lambda0={}, alpha={}, beta={})",
            self.lambda0, self.alpha, self.beta
        )
    }
}

/// Free-function form of [`ExpHawkesParams::new`].
pub fn validate_params(lambda0: f64, alpha: f64, beta: f64) -> Result<ExpHawkesParams> {
    ExpHawkesParams::new(lambda0, alpha, beta)
}

/// Strictly increasing positive event times observed on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EventSequence {
    times: Vec<f64>,
    horizon: f64,
}

impl EventSequence {
    pub fn new(times: Vec<f64>, horizon: f64) -> Result<Self> {
        let mut previous: Option<f64> = None;
        for (index, &value) in times.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(HawkesError::NonPositiveTime { index, value });
            }
            if let Some(prev) = previous {
                if value <= prev {
                    return Err(HawkesError::NotStrictlyIncreasing {
                        index,
                        previous: prev,
                        current: value,
                    });
                }
            }
            previous = Some(value);
        }
        let last_event = previous.unwrap_or(0.0);
        // NaN horizons fail this comparison too.
        if !(horizon.is_finite() && horizon > 0.0 && horizon >= last_event) {
            return Err(HawkesError::HorizonBeforeLastEvent {
                horizon,
                last_event,
            });
        }
        Ok(Self { times, horizon })
    }

    /// Uses the last event time as the horizon.
    pub fn ending_at_last_event(times: Vec<f64>) -> Result<Self> {
        let horizon = times.last().copied().ok_or(HawkesError::EmptySequence)?;
        Self::new(times, horizon)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_time(&self) -> Option<f64> {
        self.times.last().copied()
    }

    pub fn into_times(self) -> Vec<f64> {
        self.times
    }

    /// Same events observed over a different window.
    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        Self::new(self.times.clone(), horizon)
    }
}

/// Free-function form of [`EventSequence::new`].
pub fn validate_events(times: Vec<f64>, horizon: f64) -> Result<EventSequence> {
    EventSequence::new(times, horizon)
}

/// Cached recursion state at one event.
///
/// `lambda_star_pre` is the underlying intensity just before the event,
/// `lambda_star_post` includes the jump. The restart time is the first time
/// after the event at which the clamped intensity is positive again.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventState {
    pub event_time: f64,
    pub lambda_star_pre: f64,
    pub lambda_star_post: f64,
    pub restart_time: f64,
}

impl EventState {
    /// Length of the interval after the event during which the intensity is zero.
    pub fn cooldown(&self) -> f64 {
        self.restart_time - self.event_time
    }
}

/// Which compensator the likelihood uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Method {
    /// Exact compensator built from restart times.
    #[serde(rename = "exact")]
    Exact,
    /// Integral of the signed underlying intensity.
    #[serde(rename = "approx", alias = "approximated")]
    Approximated,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Approximated => "approx",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Method::Exact),
            "approx" | "approximated" => Ok(Method::Approximated),
            other => Err(format!(
                "unknown method `{other}` (expected `exact` or `approx`)"
            )),
        }
    }
}

/// Outcome of a maximum-likelihood fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub params: ExpHawkesParams,
    /// Unclamped log-likelihood of the chosen method at `params`. May be `-inf`.
    pub log_likelihood: f64,
    pub method: Method,
    pub converged: bool,
    pub iterations: usize,
    pub start_point: [f64; 3],
}

/// Time-change goodness-of-fit outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct GofReport {
    pub transformed_interarrivals: Vec<f64>,
    pub ks_statistic: f64,
    pub p_value: f64,
    pub sample_size: usize,
}
