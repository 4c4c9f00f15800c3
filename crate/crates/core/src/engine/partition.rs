//! Random partitions of the ground set into `t` classes.
//!
//! Each element picks its class independently and uniformly, so every class
//! is distributed as `X_{1/t}`. By linearity of expectation the expected
//! number of classes that contain a member is `t * Pr(exists S ⊆ X_{1/t})`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::exact::exact_hit_probability;
use super::sampling::{partition_from, KeyedRng};
use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::set::{Subset, MAX_GROUND};

/// For each class, the index of the first member (canonical order) that lies
/// inside it.
pub(crate) fn first_member_per_class(family: &SetFamily, classes: &[Subset]) -> Vec<Option<usize>> {
    let mut found = vec![None; classes.len()];
    let mut remaining = classes.len();
    for (i, s) in family.sets().iter().enumerate() {
        let Some(e) = s.min_element() else { continue };
        let c = classes.iter().position(|cl| cl.contains(e)).expect("classes cover the ground set");
        if found[c].is_none() && s.is_subset_of(&classes[c]) {
            found[c] = Some(i);
            remaining -= 1;
            if remaining == 0 {
                break;
            }
        }
    }
    found
}

/// Number of classes that contain at least one member.
fn hit_class_count(family: &SetFamily, classes: &[Subset], class_of: &[u16]) -> usize {
    let mut hit = Subset::EMPTY;
    let mut count = 0;
    for s in family.sets() {
        let Some(e) = s.min_element() else { continue };
        let c = class_of[e] as usize;
        if !hit.contains(c) && s.is_subset_of(&classes[c]) {
            hit.insert(c);
            count += 1;
            if count == classes.len() {
                break;
            }
        }
    }
    count
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionStats {
    pub classes: usize,
    pub trials: u64,
    pub seed: u64,
    pub mean_hit_classes: f64,
    /// Standard error of `mean_hit_classes`.
    pub std_error: f64,
    /// `histogram[j]` = trials in which exactly `j` classes were hit.
    pub histogram: Vec<u64>,
    /// Fraction of trials with at least `p` hit classes, for `p = 1..=t`.
    pub frac_trials_with_at_least: BTreeMap<usize, f64>,
}

fn check_classes(t: usize) -> Result<()> {
    if !(2..=MAX_GROUND).contains(&t) {
        return Err(Error::InvalidParameter(format!("class count must be in 2..={MAX_GROUND}, got {t}")));
    }
    Ok(())
}

/// Repeats the random `t`-class partition `trials` times and tallies how many
/// classes contain a member.
pub fn partition_experiment(family: &SetFamily, t: usize, trials: u64, seed: u64) -> Result<PartitionStats> {
    check_classes(t)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let n = family.ground().size();
    let rng = KeyedRng::new(seed);
    let histogram = (0..trials)
        .into_par_iter()
        .fold(
            || vec![0u64; t + 1],
            |mut hist, trial| {
                let classes = partition_from(&rng, n, t, trial);
                let mut class_of = vec![0u16; n];
                for (c, cl) in classes.iter().enumerate() {
                    for e in cl.iter() {
                        class_of[e] = c as u16;
                    }
                }
                hist[hit_class_count(family, &classes, &class_of)] += 1;
                hist
            },
        )
        .reduce(
            || vec![0u64; t + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(stats_from_histogram(t, trials, seed, histogram))
}

fn stats_from_histogram(t: usize, trials: u64, seed: u64, histogram: Vec<u64>) -> PartitionStats {
    let nf = trials as f64;
    let mean = histogram.iter().enumerate().map(|(j, &c)| j as f64 * c as f64).sum::<f64>() / nf;
    let var = if trials > 1 {
        histogram
            .iter()
            .enumerate()
            .map(|(j, &c)| c as f64 * (j as f64 - mean).powi(2))
            .sum::<f64>()
            / (nf - 1.0)
    } else {
        0.0
    };
    let mut at_least = BTreeMap::new();
    let mut tail = 0u64;
    for p in (1..=t).rev() {
        tail += histogram[p];
        at_least.insert(p, tail as f64 / nf);
    }
    PartitionStats {
        classes: t,
        trials,
        seed,
        mean_hit_classes: mean,
        std_error: (var / nf).sqrt(),
        histogram,
        frac_trials_with_at_least: at_least,
    }
}

/// Compares the measured mean number of hit classes with
/// `t * Pr(exists S ⊆ X_{1/t})`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma2Report {
    pub classes: usize,
    pub trials: u64,
    pub seed: u64,
    pub per_class_hit_probability: f64,
    pub expected_hit_classes: f64,
    pub measured_mean: f64,
    pub three_sigma: f64,
    pub pass: bool,
}

pub fn lemma2_identity_check(family: &SetFamily, t: usize, trials: u64, seed: u64) -> Result<Lemma2Report> {
    check_classes(t)?;
    let q = exact_hit_probability(family, 1.0 / t as f64)?.p_hat;
    let stats = partition_experiment(family, t, trials, seed)?;
    let expected = t as f64 * q;
    let three_sigma = 3.0 * stats.std_error;
    Ok(Lemma2Report {
        classes: t,
        trials,
        seed,
        per_class_hit_probability: q,
        expected_hit_classes: expected,
        measured_mean: stats.mean_hit_classes,
        three_sigma,
        pass: (stats.mean_hit_classes - expected).abs() <= three_sigma,
    })
}
