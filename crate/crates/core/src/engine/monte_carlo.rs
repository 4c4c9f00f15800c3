//! Monte Carlo hit probabilities with reproducible, scheduling-independent
//! results: every trial owns its random stream and the reduction is a sum of
//! hit counts.

use rayon::prelude::*;

use super::exact::{HitEstimate, Method};
use super::sampling::{bernoulli_from, KeyedRng};
use crate::constructions::BlockPartition;
use crate::error::{check_probability, Error, Result};
use crate::family::SetFamily;
use crate::set::Subset;

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    Ok(())
}

/// Builds a Monte Carlo estimate from a hit count.
///
/// The 3-sigma half width uses the normal approximation, which is poor when
/// `hits` is within a handful of 0 or `trials`; use [`clopper_pearson`] there.
pub fn estimate_from_counts(hits: u64, trials: u64, delta: f64, seed: u64) -> HitEstimate {
    let p = hits as f64 / trials as f64;
    HitEstimate {
        p_hat: p,
        delta,
        trials,
        half_width_3sigma: 3.0 * (p * (1.0 - p) / trials as f64).sqrt(),
        method: Method::MonteCarlo,
        seed: Some(seed),
        clopper_pearson: None,
    }
}

/// Counts trials in which `is_hit` accepts the sampled `X_delta`.
pub fn count_hits<F>(n: usize, delta: f64, trials: u64, seed: u64, is_hit: F) -> u64
where
    F: Fn(&Subset) -> bool + Sync,
{
    let rng = KeyedRng::new(seed);
    (0..trials)
        .into_par_iter()
        .filter(|&t| is_hit(&bernoulli_from(&rng, n, delta, t)))
        .count() as u64
}

/// Fraction of sampled `X_delta` that contain some member.
pub fn mc_hit_probability(family: &SetFamily, delta: f64, trials: u64, seed: u64) -> Result<HitEstimate> {
    check_probability("delta", delta, None)?;
    check_trials(trials)?;
    let sets = family.sets();
    let hits = count_hits(family.ground().size(), delta, trials, seed, |x| {
        sets.iter().any(|s| s.is_subset_of(x))
    });
    Ok(estimate_from_counts(hits, trials, delta, seed))
}

/// Monte Carlo hit probability of the block-product family without
/// materializing it: a sample hits iff it meets every block. Works for ground
/// sets of any size; element `e` reads the same keyed word as in
/// [`mc_hit_probability`], so both agree trial by trial when both apply.
pub fn mc_block_hit_probability(
    part: &BlockPartition,
    delta: f64,
    trials: u64,
    seed: u64,
) -> Result<HitEstimate> {
    check_probability("delta", delta, None)?;
    check_trials(trials)?;
    let rng = KeyedRng::new(seed);
    let (k, r) = (part.k(), part.r());
    let hits = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let mut stream = rng.trial(t);
            (0..k).all(|_| {
                // draw the whole block so later blocks read their own words
                let mut met = false;
                for _ in 0..r {
                    met |= stream.next_bernoulli(delta);
                }
                met
            })
        })
        .count() as u64;
    Ok(estimate_from_counts(hits, trials, delta, seed))
}

/// Exact two-sided Clopper-Pearson interval at the given confidence level.
pub fn clopper_pearson(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    assert!(successes <= trials && trials > 0);
    assert!(confidence > 0.0 && confidence < 1.0);
    let alpha = 1.0 - confidence;
    let ln_fact = ln_factorials(trials as usize);
    // P(Bin(n, p) <= x), log-space summation
    let cdf = |x: u64, p: f64| -> f64 {
        if p <= 0.0 {
            return 1.0;
        }
        if p >= 1.0 {
            return if x >= trials { 1.0 } else { 0.0 };
        }
        let n = trials as usize;
        let (lp, lq) = (p.ln(), (1.0 - p).ln());
        let logs: Vec<f64> = (0..=x as usize)
            .map(|j| ln_fact[n] - ln_fact[j] - ln_fact[n - j] + j as f64 * lp + (n - j) as f64 * lq)
            .collect();
        let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (max + logs.iter().map(|l| (l - max).exp()).sum::<f64>().ln()).exp().min(1.0)
    };
    let bisect = |f: &dyn Fn(f64) -> bool| -> f64 {
        // smallest p in [0,1] with f(p) true, f monotone false -> true
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if f(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    let lower = if successes == 0 {
        0.0
    } else {
        // P(Bin >= x) = 1 - cdf(x-1) reaches alpha/2
        bisect(&|p| 1.0 - cdf(successes - 1, p) >= alpha / 2.0)
    };
    let upper = if successes == trials {
        1.0
    } else {
        bisect(&|p| cdf(successes, p) <= alpha / 2.0)
    };
    (lower, upper)
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    v.push(0.0);
    for i in 1..=n {
        acc += (i as f64).ln();
        v.push(acc);
    }
    v
}

/// Adds a Clopper-Pearson interval (at 3-sigma normal coverage) to a Monte
/// Carlo estimate.
pub fn with_clopper_pearson(mut est: HitEstimate) -> HitEstimate {
    if est.method == Method::MonteCarlo {
        let hits = (est.p_hat * est.trials as f64).round() as u64;
        est.clopper_pearson = Some(clopper_pearson(hits, est.trials, 0.9973));
    }
    est
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::block_product_family;
    use crate::set::GroundSet;

    #[test]
    fn block_product_within_three_sigma() {
        let (f, _) = block_product_family(2, 2).unwrap();
        let est = mc_hit_probability(&f, 0.5, 100_000, 1).unwrap();
        assert!(est.contains(0.5625), "{est:?}");
        assert!((est.half_width_3sigma - 3.0 * (0.5625f64 * 0.4375 / 1e5).sqrt()).abs() < 2e-4);
        assert_eq!(est.method, Method::MonteCarlo);
    }

    #[test]
    fn streaming_block_estimator_matches_materialized() {
        let (f, part) = block_product_family(3, 3).unwrap();
        let a = mc_hit_probability(&f, 0.4, 5_000, 77).unwrap();
        let b = mc_block_hit_probability(&part, 0.4, 5_000, 77).unwrap();
        assert_eq!(a.p_hat, b.p_hat);
    }

    #[test]
    fn rare_event_is_near_zero() {
        let g = GroundSet::new(12).unwrap();
        let f = SetFamily::new(g, 12, vec![g.full()]).unwrap();
        let est = mc_hit_probability(&f, 0.05, 10_000, 3).unwrap();
        assert_eq!(est.p_hat, 0.0);
    }

    #[test]
    fn rejects_bad_params() {
        let (f, _) = block_product_family(2, 2).unwrap();
        assert!(mc_hit_probability(&f, 1.0, 10, 1).is_err());
        assert!(mc_hit_probability(&f, 0.5, 0, 1).is_err());
    }

    #[test]
    fn reproducible_across_thread_counts() {
        let (f, _) = block_product_family(2, 3).unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| mc_hit_probability(&f, 0.3, 20_000, 99).unwrap());
        let b = four.install(|| mc_hit_probability(&f, 0.3, 20_000, 99).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn clopper_pearson_known_values() {
        // 0 of 10 at 95%: upper = 1 - 0.025^(1/10)
        let (lo, hi) = clopper_pearson(0, 10, 0.95);
        assert_eq!(lo, 0.0);
        assert!((hi - (1.0 - 0.025f64.powf(0.1))).abs() < 1e-9);
        // 10 of 10 mirrors it
        let (lo, hi) = clopper_pearson(10, 10, 0.95);
        assert!((lo - 0.025f64.powf(0.1)).abs() < 1e-9);
        assert_eq!(hi, 1.0);
        let (lo, hi) = clopper_pearson(50, 100, 0.95);
        assert!(lo < 0.5 && hi > 0.5);
        assert!((lo - 0.3983).abs() < 1e-3 && (hi - 0.6017).abs() < 1e-3);
    }
}
