//! Thinning sampler for exponential Hawkes processes with excitation or inhibition.
//!
//! The sampler proposes candidates from a homogeneous Poisson process with rate
//! `max(lambda0, lambda_k)`, where `lambda_k` is the clamped intensity at the
//! previous candidate. Between events the underlying intensity moves
//! monotonically toward `lambda0`, so that rate dominates the intensity until
//! the next candidate. The intensity is tracked with the O(1) exponential
//! recursion rather than a sum over all past events.
//!
//! Randomness comes from `ChaCha8Rng` seeded with [`rand::SeedableRng::seed_from_u64`].
//! Batch runs derive one child seed per repetition with [`child_seed`], a
//! SplitMix64 finalizer applied to `master + (index + 1) * 0x9E3779B97F4A7C15`.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HawkesError, Result};
use crate::intensity::relax;
use crate::model::{EventSequence, ExpHawkesParams};

/// When to stop sampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopCriterion {
    /// Sample on `[0, T]`; the returned horizon is `T`.
    EndTime(f64),
    /// Stop at the `N_max`-th event; the returned horizon is that event's time.
    MaxJumps(usize),
}

impl StopCriterion {
    pub fn validate(&self) -> Result<()> {
        match *self {
            StopCriterion::EndTime(t) if !(t.is_finite() && t > 0.0) => Err(
                HawkesError::InvalidStopCriterion(format!("end time must be positive, got {t}")),
            ),
            StopCriterion::MaxJumps(0) => Err(HawkesError::InvalidStopCriterion(
                "maximal number of jumps must be positive".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Seed of a single simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl From<u64> for RngSeed {
    fn from(seed: u64) -> Self {
        RngSeed(seed)
    }
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic child seed for repetition `index` of a batch.
pub fn child_seed(master: RngSeed, index: u64) -> RngSeed {
    RngSeed(splitmix64(
        master
            .0
            .wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)),
    ))
}

/// One thinning proposal: the candidate was drawn after `from` with dominating rate `bound`.
#[derive(Debug, Clone, Copy)]
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) struct Proposal {
    pub from: f64,
    pub candidate: f64,
    pub bound: f64,
    pub accepted: bool,
}

pub(crate) fn thin<F: FnMut(&Proposal)>(
    params: &ExpHawkesParams,
    stop: StopCriterion,
    seed: RngSeed,
    mut observe: F,
) -> Result<EventSequence> {
    stop.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    let l0 = params.lambda0();

    let mut times: Vec<f64> = Vec::new();
    // (time, post-jump underlying intensity) of the last accepted event
    let mut last: Option<(f64, f64)> = None;
    let mut current = 0.0_f64;
    let mut lambda_k = l0;

    loop {
        let bound = l0.max(lambda_k);
        let u1: f64 = rng.sample(Open01);
        let candidate = current - u1.ln() / bound;
        if let StopCriterion::EndTime(end) = stop {
            if candidate > end {
                break;
            }
        }
        let underlying = match last {
            None => l0,
            Some((t_last, post)) => relax(params, post, candidate - t_last),
        };
        lambda_k = underlying.max(0.0);
        let u2: f64 = rng.random();
        let accepted = u2 < lambda_k / bound && last.is_none_or(|(t_last, _)| candidate > t_last);
        observe(&Proposal {
            from: current,
            candidate,
            bound,
            accepted,
        });
        if accepted {
            times.push(candidate);
            let post = underlying + params.alpha();
            last = Some((candidate, post));
            lambda_k = post.max(0.0);
            if let StopCriterion::MaxJumps(n_max) = stop {
                if times.len() >= n_max {
                    break;
                }
            }
        }
        current = candidate;
    }

    let horizon = match stop {
        StopCriterion::EndTime(end) => end,
        StopCriterion::MaxJumps(_) => times.last().copied().unwrap_or(current),
    };
    EventSequence::new(times, horizon)
}

/// Samples one realization by thinning.
pub fn simulate(
    params: &ExpHawkesParams,
    stop: StopCriterion,
    seed: RngSeed,
) -> Result<EventSequence> {
    thin(params, stop, seed, |_| {})
}

/// Samples `repetitions` independent realizations, repetition `i` using
/// `child_seed(master_seed, i)`. Runs in parallel; output order follows `i`.
pub fn simulate_batch(
    params: &ExpHawkesParams,
    stop: StopCriterion,
    master_seed: RngSeed,
    repetitions: usize,
) -> Result<Vec<EventSequence>> {
    (0..repetitions as u64)
        .into_par_iter()
        .map(|i| simulate(params, stop, child_seed(master_seed, i)))
        .collect()
}
