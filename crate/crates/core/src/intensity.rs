//! Underlying and conditional intensities, restart times, and the exact and
//! approximated compensators of the exponential model.
//!
//! Between events the underlying intensity relaxes toward the baseline,
//!
//! ```text
//! lambda*(t) = lambda0 + (lambda*(T_k) - lambda0) * exp(-beta (t - T_k)),   t in [T_k, T_{k+1})
//! ```
//!
//! so it is monotone on every inter-event interval. When the post-jump value
//! `lambda*(T_k)` is negative the clamped intensity stays at zero until the
//! restart time
//!
//! ```text
//! T_k* = T_k + ln((lambda0 - lambda*(T_k)) / lambda0) / beta
//! ```
//!
//! and the compensator only integrates `lambda*` over `[T_k*, T_{k+1}]`.
//!
//! Intensities are right-continuous: `lambda*(T_k)` includes the jump of the
//! event at `T_k`, `lambda*(T_k^-)` does not.

use crate::error::{HawkesError, Result};
use crate::model::{EventSequence, EventState, ExpHawkesParams};

/// Underlying intensity `dt` after an event whose post-jump value was `post`.
#[inline]
pub(crate) fn relax(params: &ExpHawkesParams, post: f64, dt: f64) -> f64 {
    let l0 = params.lambda0();
    l0 + (post - l0) * (-params.beta() * dt).exp()
}

/// Restart time following an event at `event_time` with post-jump value `post`.
#[inline]
pub(crate) fn restart_after(params: &ExpHawkesParams, event_time: f64, post: f64) -> f64 {
    if post < 0.0 {
        // ln((l0 - post) / l0) = ln(1 + (-post) / l0), argument > 1 on this branch
        event_time + (-post / params.lambda0()).ln_1p() / params.beta()
    } else {
        event_time
    }
}

/// Left-to-right O(N) pass computing the state at every event.
pub fn build_event_states(params: &ExpHawkesParams, events: &EventSequence) -> Vec<EventState> {
    states_for(params, events.times())
}

fn states_for(params: &ExpHawkesParams, times: &[f64]) -> Vec<EventState> {
    let mut states = Vec::with_capacity(times.len());
    let mut previous: Option<(f64, f64)> = None;
    for &t in times {
        let pre = match previous {
            None => params.lambda0(),
            Some((t_prev, post_prev)) => relax(params, post_prev, t - t_prev),
        };
        let post = pre + params.alpha();
        states.push(EventState {
            event_time: t,
            lambda_star_pre: pre,
            lambda_star_post: post,
            restart_time: restart_after(params, t, post),
        });
        previous = Some((t, post));
    }
    states
}

/// `lambda*(t)` by direct summation over events at or before `t`. May be negative.
pub fn underlying_intensity_at(params: &ExpHawkesParams, events: &EventSequence, t: f64) -> f64 {
    let (alpha, beta) = (params.alpha(), params.beta());
    params.lambda0()
        + events
            .times()
            .iter()
            .take_while(|&&tk| tk <= t)
            .map(|&tk| alpha * (-beta * (t - tk)).exp())
            .sum::<f64>()
}

/// Conditional intensity `max(0, lambda*(t))`.
pub fn conditional_intensity_at(params: &ExpHawkesParams, events: &EventSequence, t: f64) -> f64 {
    underlying_intensity_at(params, events, t).max(0.0)
}

/// Integral of the clamped intensity from the restart time `restart_k` to `tau`,
/// for `tau` no later than the next event. Zero when `tau <= restart_k`.
pub fn segment_compensator(
    params: &ExpHawkesParams,
    event_time: f64,
    lambda_star_post: f64,
    restart_k: f64,
    tau: f64,
) -> f64 {
    if tau <= restart_k {
        return 0.0;
    }
    let (l0, beta) = (params.lambda0(), params.beta());
    // exp(-b a) - exp(-b c) = exp(-b a) * (1 - exp(-b (c - a)))
    let decay_at_restart = (-beta * (restart_k - event_time)).exp();
    let decay_gap = -(-beta * (tau - restart_k)).exp_m1();
    let value =
        l0 * (tau - restart_k) + (lambda_star_post - l0) / beta * decay_at_restart * decay_gap;
    value.max(0.0)
}

fn segment_from_state(params: &ExpHawkesParams, state: &EventState, tau: f64) -> f64 {
    segment_compensator(
        params,
        state.event_time,
        state.lambda_star_post,
        state.restart_time,
        tau,
    )
}

/// Number of events at or before `t`.
fn count_until(events: &EventSequence, t: f64) -> usize {
    events.times().partition_point(|&tk| tk <= t)
}

/// Exact compensator `Lambda(t)`, the integral of the clamped intensity over `[0, t]`.
pub fn compensator(params: &ExpHawkesParams, events: &EventSequence, t: f64) -> f64 {
    let n = count_until(events, t);
    if n == 0 {
        return params.lambda0() * t;
    }
    let states = states_for(params, &events.times()[..n]);
    let mut total = params.lambda0() * states[0].event_time;
    for pair in states.windows(2) {
        total += segment_from_state(params, &pair[0], pair[1].event_time);
    }
    total + segment_from_state(params, &states[n - 1], t)
}

/// Approximated compensator integrating the signed underlying intensity.
///
/// Never exceeds [`compensator`]; the two agree when no post-jump value is negative.
pub fn compensator_lm(params: &ExpHawkesParams, events: &EventSequence, t: f64) -> f64 {
    let (alpha, beta) = (params.alpha(), params.beta());
    let n = count_until(events, t);
    let jumps: f64 = events.times()[..n]
        .iter()
        .map(|&tk| -(-beta * (t - tk)).exp_m1())
        .sum();
    params.lambda0() * t + alpha / beta * jumps
}

/// Compensator evaluated at every event time, `(Lambda(T_1), ..., Lambda(T_n))`.
pub fn transformed_times(params: &ExpHawkesParams, events: &EventSequence) -> Result<Vec<f64>> {
    if events.is_empty() {
        return Err(HawkesError::EmptySequence);
    }
    let states = build_event_states(params, events);
    let mut out = Vec::with_capacity(states.len());
    let mut acc = params.lambda0() * states[0].event_time;
    out.push(acc);
    for pair in states.windows(2) {
        acc += segment_from_state(params, &pair[0], pair[1].event_time);
        out.push(acc);
    }
    Ok(out)
}

/// Fraction of `[0, t]` during which the conditional intensity is zero.
pub fn zero_time_fraction(params: &ExpHawkesParams, events: &EventSequence, t: f64) -> f64 {
    let n = count_until(events, t);
    let times = &events.times()[..n];
    let states = states_for(params, times);
    let zero_time: f64 = states
        .iter()
        .enumerate()
        .filter(|(_, s)| s.lambda_star_post < 0.0)
        .map(|(k, s)| {
            let next = times.get(k + 1).copied().unwrap_or(t);
            (s.restart_time.min(next).min(t) - s.event_time).max(0.0)
        })
        .fold(0.0, |acc, d| acc + d);
    zero_time / t
}
