//! Slow but independent reference computations shared by the integration tests.
#![allow(dead_code)]

use hawkes_core::{simulate, EventSequence, ExpHawkesParams, RngSeed, StopCriterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Underlying intensity by direct summation over events strictly before `t`
/// (left limit), or at or before `t` when `inclusive`.
pub fn underlying(p: &ExpHawkesParams, times: &[f64], t: f64, inclusive: bool) -> f64 {
    p.lambda0()
        + times
            .iter()
            .filter(|&&tk| if inclusive { tk <= t } else { tk < t })
            .map(|&tk| p.alpha() * (-p.beta() * (t - tk)).exp())
            .sum::<f64>()
}

/// Root of a continuous `f` with a sign change on `[lo, hi]`, to the last bit.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = f(lo);
    assert!(f_lo * f(hi) <= 0.0, "no sign change on [{lo}, {hi}]");
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) < 0.0) == (f_lo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature of a smooth integrand on `[a, b]`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Zero of the underlying intensity on `(times[k], next)` when it starts
/// negative there, located by bisection.
pub fn crossing_after(p: &ExpHawkesParams, times: &[f64], k: usize, next: f64) -> Option<f64> {
    let history = &times[..=k];
    let lam = |s: f64| underlying(p, history, s, true);
    let start = times[k];
    if lam(start) >= 0.0 {
        return None;
    }
    if lam(next) <= 0.0 {
        return Some(next);
    }
    Some(bisect(lam, start, next))
}

/// Integral of the clamped intensity on `[0, t]`, split at events and zero
/// crossings so that every piece is smooth.
pub fn quadrature_compensator(p: &ExpHawkesParams, times: &[f64], t: f64, tol: f64) -> f64 {
    let mut total = p.lambda0() * times.first().copied().unwrap_or(t).min(t);
    for (k, &tk) in times.iter().enumerate() {
        if tk >= t {
            break;
        }
        let next = times.get(k + 1).copied().unwrap_or(t).min(t);
        let history = &times[..=k];
        let lam = move |s: f64| underlying(p, history, s, true).max(0.0);
        let from = crossing_after(p, times, k, next).unwrap_or(tk);
        total += adaptive_simpson(&lam, from, next, tol);
    }
    total
}

/// KS distance to Exp(1) by comparing the empirical CDF, counted by brute
/// force, on both sides of every sample point.
pub fn brute_force_ks(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for &x in samples {
        let at = samples.iter().filter(|&&y| y <= x).count() as f64 / n;
        let below = samples.iter().filter(|&&y| y < x).count() as f64 / n;
        let cdf = 1.0 - (-x).exp();
        d = d.max((at - cdf).abs()).max((below - cdf).abs());
    }
    d
}

/// Derivative of `f` at `x` by Richardson extrapolation of central differences.
pub fn richardson_derivative(f: impl Fn(f64) -> f64, x: f64, h0: f64) -> f64 {
    const LEVELS: usize = 6;
    let mut table = [[0.0; LEVELS]; LEVELS];
    let mut h = h0;
    for i in 0..LEVELS {
        table[i][0] = (f(x + h) - f(x - h)) / (2.0 * h);
        let mut factor = 4.0;
        for j in 1..=i {
            table[i][j] =
                table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / (factor - 1.0);
            factor *= 4.0;
        }
        h /= 2.0;
    }
    table[LEVELS - 1][LEVELS - 1]
}

/// One randomized instance: parameters drawn uniformly from the given box and
/// a simulated realization of `n` events, observed until one time unit after
/// the last event.
pub struct Instance {
    pub params: ExpHawkesParams,
    pub events: EventSequence,
    pub horizon: f64,
}

pub fn random_instances(count: usize, n: usize, seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let params = ExpHawkesParams::new(
                rng.random_range(0.2..3.0),
                rng.random_range(-3.0..1.0),
                rng.random_range(0.1..2.0),
            )
            .unwrap();
            let sim = simulate(
                &params,
                StopCriterion::MaxJumps(n),
                RngSeed(seed ^ (i as u64 + 1)),
            )
            .unwrap();
            let horizon = sim.horizon() + 1.0;
            Instance {
                params,
                events: sim.with_horizon(horizon).unwrap(),
                horizon,
            }
        })
        .collect()
}
