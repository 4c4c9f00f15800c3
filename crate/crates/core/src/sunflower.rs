//! Sunflower detection and exhaustive sunflower search.

use std::collections::BTreeSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::set::{KSet, Subset};

/// `p` sets whose pairwise intersections all equal `core`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sunflower {
    pub core: Subset,
    pub petals: Vec<KSet>,
}

impl Sunflower {
    pub fn num_petals(&self) -> usize {
        self.petals.len()
    }

    /// Re-checks the defining property from scratch.
    pub fn verify(&self) -> bool {
        match is_sunflower(&self.petals) {
            Ok(Some(s)) => s.core == self.core,
            _ => false,
        }
    }

    /// Adds `t` to the core and to every petal.
    pub fn attach(&self, t: &Subset) -> Sunflower {
        Sunflower {
            core: self.core.union(t),
            petals: self.petals.iter().map(|p| p.union(t)).collect(),
        }
    }
}

/// Returns the sunflower formed by `sets` if all pairwise intersections are
/// equal. A single set is a one-petal sunflower whose core is the set itself.
pub fn is_sunflower(sets: &[KSet]) -> Result<Option<Sunflower>> {
    let first = sets.first().ok_or(Error::EmptyInput)?;
    let distinct: BTreeSet<_> = sets.iter().collect();
    if distinct.len() != sets.len() {
        let dup = sets.iter().duplicates().next().expect("a duplicate exists");
        return Err(Error::DuplicateSet(dup.to_vec()));
    }
    if sets.len() == 1 {
        return Ok(Some(Sunflower { core: *first, petals: sets.to_vec() }));
    }
    let core = first.intersection(&sets[1]);
    // all intersections equal `core` iff every set contains it and the
    // remainders outside it are pairwise disjoint
    let mut seen = Subset::EMPTY;
    for s in sets {
        if !core.is_subset_of(s) {
            return Ok(None);
        }
        let rest = s.difference(&core);
        if !rest.is_disjoint(&seen) {
            return Ok(None);
        }
        seen = seen.union(&rest);
    }
    Ok(Some(Sunflower { core, petals: sets.to_vec() }))
}

/// Outcome of a capped sunflower search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SunflowerSearch {
    pub sunflower: Option<Sunflower>,
    /// Candidate petal combinations examined.
    pub combinations: u64,
    /// True if the cap was hit before the search finished.
    pub truncated: bool,
}

/// Exhaustive search for a `p`-petal sunflower, grouped by candidate core.
///
/// Every core of a sunflower with at least two petals is the intersection of
/// two members, so only those cores are tried, in ascending order. Within a
/// core, members containing it are packed by backtracking on their
/// remainders. Stops after `cap` examined combinations.
pub fn find_sunflower(family: &SetFamily, p: usize, cap: u64) -> SunflowerSearch {
    let sets = family.sets();
    let mut out = SunflowerSearch { sunflower: None, combinations: 0, truncated: false };
    if p == 0 || sets.len() < p {
        return out;
    }
    if p == 1 {
        out.sunflower = Some(Sunflower { core: sets[0], petals: vec![sets[0]] });
        return out;
    }
    let cores: BTreeSet<Subset> = sets
        .iter()
        .array_combinations()
        .map(|[a, b]| a.intersection(b))
        .collect();

    fn pack(
        rests: &[(KSet, Subset)],
        start: usize,
        used: Subset,
        need: usize,
        acc: &mut Vec<KSet>,
        budget: &mut u64,
        cap: u64,
    ) -> Option<bool> {
        if need == 0 {
            return Some(true);
        }
        for i in start..rests.len() {
            if rests.len() - i < need {
                break;
            }
            *budget += 1;
            if *budget > cap {
                return None;
            }
            let (s, rest) = rests[i];
            if rest.is_disjoint(&used) {
                acc.push(s);
                match pack(rests, i + 1, used.union(&rest), need - 1, acc, budget, cap) {
                    Some(true) => return Some(true),
                    None => return None,
                    Some(false) => {}
                }
                acc.pop();
            }
        }
        Some(false)
    }

    for core in cores {
        let rests: Vec<(KSet, Subset)> = family
            .members_containing(&core)
            .map(|s| (*s, s.difference(&core)))
            .collect();
        if rests.len() < p {
            continue;
        }
        let mut acc = Vec::with_capacity(p);
        match pack(&rests, 0, Subset::EMPTY, p, &mut acc, &mut out.combinations, cap) {
            Some(true) => {
                out.sunflower = Some(Sunflower { core, petals: acc });
                return out;
            }
            Some(false) => {}
            None => {
                out.truncated = true;
                out.combinations = cap;
                return out;
            }
        }
    }
    out
}

/// Naive oracle: scans every `p`-subset of the family with [`is_sunflower`].
pub fn find_sunflower_naive(family: &SetFamily, p: usize) -> Option<Sunflower> {
    if p == 0 {
        return None;
    }
    family
        .sets()
        .iter()
        .copied()
        .combinations(p)
        .find_map(|c| is_sunflower(&c).ok().flatten())
}

/// True if no `p` members form a sunflower, by the naive scan.
pub fn is_sunflower_free(family: &SetFamily, p: usize) -> bool {
    find_sunflower_naive(family, p).is_none()
}
