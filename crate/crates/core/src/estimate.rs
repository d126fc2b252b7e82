//! Maximum-likelihood fitting of `(lambda0, alpha, beta)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{HawkesError, Result};
use crate::likelihood::{clamped_objective, log_likelihood, DEFAULT_FLOOR};
use crate::model::{EventSequence, ExpHawkesParams, FitResult, Method};
use crate::optimize::{maximize, AscentOptions, Bounds, Point};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub method: Method,
    pub start: Point,
    /// Lower bounds for `(lambda0, alpha, beta)`. The first and last must be positive.
    pub lower_bounds: Point,
    /// Upper bounds, `+inf` by default. Setting a coordinate's bounds equal pins it.
    pub upper_bounds: Point,
    pub max_iterations: usize,
    /// Relative finite-difference step.
    pub gradient_step: f64,
    /// Relative objective-change threshold for convergence.
    pub tolerance: f64,
    /// Extra random starts on top of `start`.
    pub multistart: usize,
    /// Seed for drawing the extra starts.
    pub multistart_seed: u64,
    /// Floor used by the optimizer surrogate inside the logarithm.
    pub floor: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            method: Method::Exact,
            start: [1.0, 0.0, 1.0],
            lower_bounds: [1e-8, f64::NEG_INFINITY, 1e-8],
            upper_bounds: [f64::INFINITY; 3],
            max_iterations: 500,
            gradient_step: 1e-6,
            tolerance: 1e-9,
            multistart: 0,
            multistart_seed: 0,
            floor: DEFAULT_FLOOR,
        }
    }
}

impl FitOptions {
    pub fn with_method(method: Method) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }

    // negated comparisons also reject NaN
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(HawkesError::InvalidOptions(msg));
        if !(self.lower_bounds[0] > 0.0 && self.lower_bounds[2] > 0.0) {
            return bad("lower bounds for lambda0 and beta must be positive".into());
        }
        if (0..3).any(|i| !(self.lower_bounds[i] <= self.upper_bounds[i])) {
            return bad("each lower bound must not exceed its upper bound".into());
        }
        if self.start.iter().any(|v| !v.is_finite()) || !self.bounds().contains(&self.start) {
            return bad(format!("start point {:?} violates the bounds", self.start));
        }
        if !(self.tolerance > 0.0) {
            return bad("tolerance must be positive".into());
        }
        if !(self.gradient_step > 0.0) {
            return bad("gradient step must be positive".into());
        }
        if !(self.floor > 0.0) {
            return bad("floor must be positive".into());
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be positive".into());
        }
        Ok(())
    }

    fn bounds(&self) -> Bounds {
        Bounds {
            lower: self.lower_bounds,
            upper: self.upper_bounds,
        }
    }

    /// `start` followed by `multistart` random draws, each projected onto the bounds.
    fn starts(&self) -> Vec<Point> {
        let bounds = self.bounds();
        let mut starts = vec![self.start];
        let mut rng = ChaCha8Rng::seed_from_u64(self.multistart_seed);
        let (lo, hi) = (0.01f64.ln(), 10f64.ln());
        for _ in 0..self.multistart {
            let lambda0 = rng.random_range(lo..hi).exp();
            let alpha = rng.random_range(-5.0..5.0);
            let beta = rng.random_range(lo..hi).exp();
            let draw = [lambda0, alpha, beta];
            starts.push(std::array::from_fn(|i| {
                draw[i].max(bounds.lower[i]).min(bounds.upper[i])
            }));
        }
        starts
    }
}

/// Fits the model to `events` observed on `[0, t]` by box-constrained
/// quasi-Newton ascent of the clamped objective. The reported
/// log-likelihood is the unclamped value at the estimate.
pub fn fit(events: &EventSequence, t: f64, options: &FitOptions) -> Result<FitResult> {
    if events.len() < 2 {
        return Err(HawkesError::TooFewEvents {
            required: 2,
            found: events.len(),
        });
    }
    options.validate()?;
    // surfaces HorizonBeforeLastEvent before optimizing
    let probe = ExpHawkesParams::from_array(options.start)?;
    clamped_objective(options.method, &probe, events, t, options.floor)?;

    let objective = |x: &Point| match ExpHawkesParams::from_array(*x) {
        Ok(theta) => {
            clamped_objective(options.method, &theta, events, t, options.floor).unwrap_or(f64::NAN)
        }
        Err(_) => f64::NAN,
    };
    let ascent = AscentOptions {
        max_iterations: options.max_iterations,
        tolerance: options.tolerance,
        gradient_step: options.gradient_step,
        ..AscentOptions::default()
    };

    let bounds = options.bounds();
    let mut best: Option<FitResult> = None;
    let mut last_error = None;
    for start in options.starts() {
        let outcome = match maximize(objective, start, &bounds, &ascent) {
            Ok(o) => o,
            Err(e) => {
                last_error = Some(e);
                continue;
            }
        };
        let Ok(params) = ExpHawkesParams::from_array(outcome.point) else {
            continue;
        };
        let log_likelihood = log_likelihood(options.method, &params, events, t)?;
        let candidate = FitResult {
            params,
            log_likelihood,
            method: options.method,
            converged: outcome.converged,
            iterations: outcome.iterations,
            start_point: start,
        };
        let better = match &best {
            None => true,
            Some(b) => candidate.log_likelihood > b.log_likelihood,
        };
        if better {
            best = Some(candidate);
        }
    }

    best.ok_or_else(|| {
        HawkesError::OptimizerFailure(match last_error {
            Some(e) => format!("no start produced a finite objective ({e})"),
            None => "no start produced a finite objective".into(),
        })
    })
}
