//! Keyed random streams and random-subset samplers.
//!
//! Every random draw is addressed by `(seed, trial, element)`: the seed keys a
//! ChaCha8 generator, the trial index selects its stream, and element `e`
//! reads the `e`-th 64-bit word of that stream. Results therefore do not
//! depend on how trials are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::set::{GroundSet, Subset};

/// Seed used when the caller does not pick one.
pub const DEFAULT_SEED: u64 = 0x5EED_2020;

/// Generator for one seed; hands out per-trial streams.
#[derive(Clone, Debug)]
pub struct KeyedRng {
    base: ChaCha8Rng,
}

impl KeyedRng {
    pub fn new(seed: u64) -> Self {
        Self { base: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Stream for `trial`, positioned at word 0.
    pub fn trial(&self, trial: u64) -> TrialStream {
        let mut rng = self.base.clone();
        rng.set_stream(trial);
        rng.set_word_pos(0);
        TrialStream { rng }
    }
}

/// The random words of one trial, consumed in element order.
pub struct TrialStream {
    rng: ChaCha8Rng,
}

impl TrialStream {
    #[inline]
    pub fn next_word(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_unit(&mut self) -> f64 {
        (self.next_word() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn next_bernoulli(&mut self, delta: f64) -> bool {
        self.next_unit() < delta
    }

    /// Class in `[0, t)` by multiply-high. Bias is at most `t / 2^64`.
    #[inline]
    pub fn next_class(&mut self, t: usize) -> usize {
        ((self.next_word() as u128 * t as u128) >> 64) as usize
    }

    pub(crate) fn inner(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// Parameters of `X_delta`, the subset containing each element independently
/// with probability `delta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernoulliSubsetParams {
    delta: f64,
    seed: u64,
}

impl BernoulliSubsetParams {
    pub fn new(delta: f64, seed: u64) -> Result<Self> {
        check_probability("delta", delta, None)?;
        Ok(Self { delta, seed })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Draws `X_delta` for trial `trial_index`.
pub fn sample_bernoulli_subset(
    ground: GroundSet,
    params: &BernoulliSubsetParams,
    trial_index: u64,
) -> Subset {
    bernoulli_from(&KeyedRng::new(params.seed), ground.size(), params.delta, trial_index)
}

#[inline]
pub(crate) fn bernoulli_from(rng: &KeyedRng, n: usize, delta: f64, trial: u64) -> Subset {
    let mut stream = rng.trial(trial);
    let mut s = Subset::EMPTY;
    for e in 0..n {
        if stream.next_bernoulli(delta) {
            s.insert(e);
        }
    }
    s
}

/// Draws a uniformly random `m`-element subset for trial `trial_index`.
pub fn sample_uniform_m_subset(ground: GroundSet, m: usize, seed: u64, trial_index: u64) -> Result<Subset> {
    if m > ground.size() {
        return Err(Error::InvalidParameter(format!(
            "m = {m} exceeds the ground set size {}",
            ground.size()
        )));
    }
    let mut stream = KeyedRng::new(seed).trial(trial_index);
    let picked = rand::seq::index::sample(stream.inner(), ground.size(), m);
    Ok(picked.into_iter().collect())
}

/// Assigns every element of `{0, .., n-1}` to one of `t` classes and returns
/// the class masks.
pub(crate) fn partition_from(rng: &KeyedRng, n: usize, t: usize, trial: u64) -> Vec<Subset> {
    let mut stream = rng.trial(trial);
    let mut classes = vec![Subset::EMPTY; t];
    for e in 0..n {
        classes[stream.next_class(t)].insert(e);
    }
    classes
}
