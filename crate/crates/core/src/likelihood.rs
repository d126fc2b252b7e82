//! Exact and approximated log-likelihoods in a single O(N) pass.
//!
//! Both share the event term `sum_k log lambda(T_k^-)`, with `log x = -inf`
//! for `x <= 0`. The exact version subtracts the compensator built from
//! restart times; the approximated one subtracts the integral of the signed
//! underlying intensity instead.

use crate::error::{HawkesError, Result};
use crate::intensity::{relax, restart_after, segment_compensator};
use crate::model::{EventSequence, ExpHawkesParams, Method};

/// Floor applied to pre-event intensities by [`clamped_objective`] unless overridden.
pub const DEFAULT_FLOOR: f64 = 1e-10;

fn check_horizon(events: &EventSequence, t: f64) -> Result<()> {
    let last_event = events.last_time().unwrap_or(0.0);
    if !(t >= last_event && t > 0.0) {
        return Err(HawkesError::HorizonBeforeLastEvent {
            horizon: t,
            last_event,
        });
    }
    Ok(())
}

/// Shared pass. With `floor = None` a nonpositive pre-intensity yields `-inf`.
fn evaluate(
    theta: &ExpHawkesParams,
    events: &EventSequence,
    t: f64,
    method: Method,
    floor: Option<f64>,
) -> Result<f64> {
    check_horizon(events, t)?;
    let (l0, alpha, beta) = (theta.lambda0(), theta.alpha(), theta.beta());
    let times = events.times();
    let Some(&first) = times.first() else {
        return Ok(-l0 * t);
    };

    let mut log_terms = 0.0;
    // exact: running compensator up to the current event
    let mut exact = l0 * first;
    // approx: sum of (1 - exp(-beta (t - T_k)))
    let mut signed_jumps = 0.0;
    // (time, post-jump value, restart time) of the previous event
    let mut previous: Option<(f64, f64, f64)> = None;

    for &tk in times {
        let pre = match previous {
            None => l0,
            Some((t_prev, post_prev, restart_prev)) => {
                if method == Method::Exact {
                    exact += segment_compensator(theta, t_prev, post_prev, restart_prev, tk);
                }
                relax(theta, post_prev, tk - t_prev)
            }
        };
        log_terms += match floor {
            Some(f) => pre.max(f).ln(),
            None if pre > 0.0 => pre.ln(),
            None => return Ok(f64::NEG_INFINITY),
        };
        let post = pre + alpha;
        match method {
            Method::Exact => previous = Some((tk, post, restart_after(theta, tk, post))),
            Method::Approximated => {
                signed_jumps += -(-beta * (t - tk)).exp_m1();
                previous = Some((tk, post, tk));
            }
        }
    }

    let compensator = match method {
        Method::Exact => {
            let (t_last, post_last, restart_last) = previous.expect("nonempty");
            // gate t > T*_N: segment_compensator returns 0 when t <= restart
            exact + segment_compensator(theta, t_last, post_last, restart_last, t)
        }
        Method::Approximated => l0 * t + alpha / beta * signed_jumps,
    };
    Ok(log_terms - compensator)
}

/// Exact log-likelihood on `[0, t]`. Returns `-inf` when some pre-event
/// intensity is nonpositive, and `-lambda0 * t` for an empty sequence.
pub fn exact_log_likelihood(
    theta: &ExpHawkesParams,
    events: &EventSequence,
    t: f64,
) -> Result<f64> {
    evaluate(theta, events, t, Method::Exact, None)
}

/// Approximated log-likelihood: same event terms, signed-intensity compensator.
pub fn approx_log_likelihood(
    theta: &ExpHawkesParams,
    events: &EventSequence,
    t: f64,
) -> Result<f64> {
    evaluate(theta, events, t, Method::Approximated, None)
}

pub fn log_likelihood(
    method: Method,
    theta: &ExpHawkesParams,
    events: &EventSequence,
    t: f64,
) -> Result<f64> {
    evaluate(theta, events, t, method, None)
}

/// Optimizer surrogate: each pre-event intensity `x` enters as `log(max(x, floor))`,
/// so the value is always finite. Never reported as a likelihood.
pub fn clamped_objective(
    method: Method,
    theta: &ExpHawkesParams,
    events: &EventSequence,
    t: f64,
    floor: f64,
) -> Result<f64> {
    evaluate(theta, events, t, method, Some(floor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intensity::{compensator, compensator_lm, underlying_intensity_at};
    use crate::simulate::{simulate, RngSeed, StopCriterion};

    fn params(l0: f64, a: f64, b: f64) -> ExpHawkesParams {
        ExpHawkesParams::new(l0, a, b).unwrap()
    }

    fn events(times: &[f64], horizon: f64) -> EventSequence {
        EventSequence::new(times.to_vec(), horizon).unwrap()
    }

    #[test]
    fn single_event_at_horizon() {
        let p = params(1.3, -0.9, 0.7);
        let ev = events(&[0.8], 0.8);
        let ll = exact_log_likelihood(&p, &ev, 0.8).unwrap();
        assert!((ll - (1.3f64.ln() - 1.3 * 0.8)).abs() < 1e-15);
    }

    #[test]
    fn empty_sequence() {
        let p = params(0.4, -0.9, 0.7);
        let ev = events(&[], 3.0);
        assert_eq!(exact_log_likelihood(&p, &ev, 3.0).unwrap(), -0.4 * 3.0);
        assert_eq!(approx_log_likelihood(&p, &ev, 3.0).unwrap(), -0.4 * 3.0);
    }

    #[test]
    fn poisson_likelihood() {
        let p = params(0.7, 0.0, 2.0);
        let ev = events(&[0.5, 1.1, 2.0, 3.3], 4.0);
        let expected = 4.0 * 0.7f64.ln() - 0.7 * 4.0;
        let exact = exact_log_likelihood(&p, &ev, 4.0).unwrap();
        let approx = approx_log_likelihood(&p, &ev, 4.0).unwrap();
        assert!((exact - expected).abs() < 1e-14);
        assert!((approx - expected).abs() < 1e-14);
    }

    #[test]
    fn horizon_before_last_event() {
        let p = params(1.0, 0.0, 1.0);
        let ev = events(&[1.0, 2.0], 2.0);
        assert!(matches!(
            exact_log_likelihood(&p, &ev, 1.5),
            Err(HawkesError::HorizonBeforeLastEvent { .. })
        ));
        assert!(approx_log_likelihood(&p, &ev, 1.5).is_err());
        assert!(clamped_objective(Method::Exact, &p, &ev, 1.5, DEFAULT_FLOOR).is_err());
    }

    #[test]
    fn compositional_with_intensity_module() {
        let p = params(1.05, -0.75, 0.8);
        let sim = simulate(&p, StopCriterion::MaxJumps(60), RngSeed(5)).unwrap();
        let t = sim.horizon() + 0.5;
        let ev = sim.with_horizon(t).unwrap();
        let mut log_terms = 0.0;
        for &tk in ev.times() {
            let left: Vec<f64> = ev.times().iter().copied().filter(|&s| s < tk).collect();
            let hist = EventSequence::new(left, tk).unwrap();
            log_terms += underlying_intensity_at(&p, &hist, tk).ln();
        }
        let expected = log_terms - compensator(&p, &ev, t);
        let ll = exact_log_likelihood(&p, &ev, t).unwrap();
        assert!(
            ((ll - expected) / expected).abs() < 1e-12,
            "{ll} vs {expected}"
        );

        let expected_lm = log_terms - compensator_lm(&p, &ev, t);
        let lm = approx_log_likelihood(&p, &ev, t).unwrap();
        assert!(((lm - expected_lm) / expected_lm).abs() < 1e-12);
    }

    #[test]
    fn nonpositive_pre_intensity_gives_minus_infinity() {
        // 1 - 2 exp(-0.1) < 0 at the second event
        let p = params(1.0, -2.0, 1.0);
        let ev = events(&[1.0, 1.1], 2.0);
        assert_eq!(
            exact_log_likelihood(&p, &ev, 2.0).unwrap(),
            f64::NEG_INFINITY
        );
        assert_eq!(
            approx_log_likelihood(&p, &ev, 2.0).unwrap(),
            f64::NEG_INFINITY
        );

        let clamped = clamped_objective(Method::Exact, &p, &ev, 2.0, 1e-10).unwrap();
        assert!(clamped.is_finite());
        assert!((clamped - (0.0 + 1e-10f64.ln() - compensator(&p, &ev, 2.0))).abs() < 1e-12);
    }

    #[test]
    fn clamp_inactive_matches_unclamped() {
        let p = params(2.43, -0.98, 0.4);
        let ev = events(&[0.3, 0.9, 2.0, 2.6, 5.0], 5.5);
        for method in [Method::Exact, Method::Approximated] {
            let plain = log_likelihood(method, &p, &ev, 5.5).unwrap();
            let clamped = clamped_objective(method, &p, &ev, 5.5, DEFAULT_FLOOR).unwrap();
            assert_eq!(plain, clamped);
        }
    }

    #[test]
    fn shrinking_floor_decreases_objective() {
        let p = params(1.0, -2.0, 1.0);
        let ev = events(&[1.0, 1.1, 3.0], 3.0);
        let values: Vec<f64> = [1e-6, 1e-10, 1e-14]
            .iter()
            .map(|&f| clamped_objective(Method::Exact, &p, &ev, 3.0, f).unwrap())
            .collect();
        assert!(values[0] > values[1] && values[1] > values[2], "{values:?}");
        assert!(values.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn approximation_dominates_under_clamping() {
        let p = params(1.0, -1.5, 0.5);
        let ev = events(&[0.5, 3.0, 5.5], 6.0);
        let exact = exact_log_likelihood(&p, &ev, 6.0).unwrap();
        let approx = approx_log_likelihood(&p, &ev, 6.0).unwrap();
        assert!(exact.is_finite());
        assert!(approx > exact);
    }
}
