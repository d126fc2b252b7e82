//! Time-change goodness-of-fit.
//!
//! Under the true parameters the compensator maps event times onto a unit-rate
//! Poisson process, so the transformed interarrivals should look like an
//! Exp(1) sample. They are compared with a one-sample Kolmogorov-Smirnov test.

use crate::error::{HawkesError, Result};
use crate::intensity::transformed_times;
use crate::model::{EventSequence, ExpHawkesParams, GofReport};

/// Compensator increments `Lambda(T_1) - 0, Lambda(T_2) - Lambda(T_1), ...`.
pub fn time_change_residuals(theta: &ExpHawkesParams, events: &EventSequence) -> Result<Vec<f64>> {
    if events.len() < 2 {
        return Err(HawkesError::TooFewEvents {
            required: 2,
            found: events.len(),
        });
    }
    let transformed = transformed_times(theta, events)?;
    let mut previous = 0.0;
    Ok(transformed
        .into_iter()
        .map(|v| {
            let d = (v - previous).max(0.0);
            previous = v;
            d
        })
        .collect())
}

/// Asymptotic Kolmogorov survival function `P(sqrt(n) D_n > x)`.
///
/// Uses `2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 x^2)` for `x >= 1`. Below that the
/// alternating series converges too slowly to truncate, so the equivalent
/// theta-function form `1 - sqrt(2 pi)/x sum_{j>=1} exp(-(2j-1)^2 pi^2 / (8 x^2))`
/// is used instead.
pub fn kolmogorov_survival(x: f64) -> f64 {
    const TERM_CUTOFF: f64 = 1e-12;
    const MAX_TERMS: usize = 100;
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 {
        return 1.0;
    }
    let p = if x < 1.0 {
        let scale = std::f64::consts::PI.powi(2) / (8.0 * x * x);
        let mut cdf = 0.0;
        for j in 1..=MAX_TERMS {
            let odd = (2 * j - 1) as f64;
            let term = (-odd * odd * scale).exp();
            cdf += term;
            if term < TERM_CUTOFF * cdf.max(f64::MIN_POSITIVE) || term == 0.0 {
                break;
            }
        }
        1.0 - (2.0 * std::f64::consts::PI).sqrt() / x * cdf
    } else {
        let mut sum = 0.0;
        for j in 1..=MAX_TERMS {
            let jf = j as f64;
            let term = (-2.0 * jf * jf * x * x).exp();
            sum += if j % 2 == 1 { term } else { -term };
            if term < TERM_CUTOFF {
                break;
            }
        }
        2.0 * sum
    };
    p.clamp(0.0, 1.0)
}

/// Two-sided KS statistic of `samples` against Exp(1) and its asymptotic p-value.
pub fn ks_test_exp1(samples: &[f64]) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(HawkesError::EmptySample);
    }
    if let Some(i) = samples.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(HawkesError::InvalidSample(i));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let statistic = sorted
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let cdf = -(-x).exp_m1();
            let above = (k + 1) as f64 / n - cdf;
            let below = cdf - k as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
        .clamp(0.0, 1.0);
    Ok((statistic, kolmogorov_survival(n.sqrt() * statistic)))
}

/// Residuals under `theta` followed by the KS test against Exp(1).
pub fn goodness_of_fit(theta: &ExpHawkesParams, events: &EventSequence) -> Result<GofReport> {
    let residuals = time_change_residuals(theta, events)?;
    let (ks_statistic, p_value) = ks_test_exp1(&residuals)?;
    Ok(GofReport {
        sample_size: residuals.len(),
        transformed_interarrivals: residuals,
        ks_statistic,
        p_value,
    })
}
