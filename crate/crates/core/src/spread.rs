//! Spreadness: a `k`-uniform family is `r`-spread when every non-empty `T`
//! is contained in at most `r^(k-|T|)` members.
//!
//! Only sets `T` that lie inside some member can have a non-zero count, so
//! the enumeration runs over the union of the members' power sets
//! (at most `|F| * 2^k` candidates) instead of all subsets of the ground set.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::set::Subset;

/// Members' power sets are enumerated explicitly; larger `k` is refused.
pub const MAX_SPREAD_K: usize = 24;

/// Number of members containing `t`.
pub fn superset_count(family: &SetFamily, t: &Subset) -> Result<usize> {
    if t.is_empty() {
        return Err(Error::EmptyConditioningSet);
    }
    Ok(family.members_containing(t).count())
}

/// `r^e`, the permitted superset count for `|T| = k - e`. Shared by every
/// comparison so that certification and [`spreadness`] agree bit for bit.
#[inline]
pub fn spread_bound(r: f64, exponent: usize) -> f64 {
    r.powi(exponent as i32)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SpreadVerdict {
    Certified,
    Violation { t: Subset, count: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpreadReport {
    pub r: f64,
    pub k: usize,
    #[serde(flatten)]
    pub verdict: SpreadVerdict,
}

impl SpreadReport {
    pub fn is_certified(&self) -> bool {
        matches!(self.verdict, SpreadVerdict::Certified)
    }

    pub fn violation(&self) -> Option<(&Subset, usize)> {
        match &self.verdict {
            SpreadVerdict::Violation { t, count } => Some((t, *count)),
            SpreadVerdict::Certified => None,
        }
    }
}

/// Which violating `T` to report.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ViolationChoice {
    /// Smallest `|T|`, then smallest bit vector.
    #[default]
    First,
    /// Largest `count / r^(k-|T|)`, ties broken as in `First`.
    MaxRatio,
}

/// Superset counts of every non-empty `T` inside some member.
pub fn superset_counts(family: &SetFamily) -> Result<HashMap<Subset, usize>> {
    if family.k() > MAX_SPREAD_K {
        return Err(Error::InvalidParameter(format!(
            "spread enumeration supports k <= {MAX_SPREAD_K}, got {}",
            family.k()
        )));
    }
    let mut counts: HashMap<Subset, usize> =
        HashMap::with_capacity(family.len() << family.k().min(10));
    for s in family.sets() {
        for t in s.nonempty_subsets() {
            *counts.entry(t).or_insert(0) += 1;
        }
    }
    Ok(counts)
}

fn tie_key(t: &Subset) -> (usize, Subset) {
    (t.len(), *t)
}

/// Certifies that `family` is `r`-spread or returns a violating `T`.
pub fn spread_witness(family: &SetFamily, r: f64) -> Result<SpreadReport> {
    spread_witness_with(family, r, ViolationChoice::First)
}

pub fn spread_witness_with(
    family: &SetFamily,
    r: f64,
    choice: ViolationChoice,
) -> Result<SpreadReport> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::OutOfRange { name: "r", value: r, range: "(0, inf)" });
    }
    if family.is_empty() {
        return Err(Error::EmptyInput);
    }
    let k = family.k();
    let counts = superset_counts(family)?;
    let violators = counts.into_iter().filter(|(t, c)| *c as f64 > spread_bound(r, k - t.len()));
    let chosen = match choice {
        ViolationChoice::First => violators.min_by_key(|(t, _)| tie_key(t)),
        ViolationChoice::MaxRatio => violators
            .map(|(t, c)| (c as f64 / spread_bound(r, k - t.len()), t, c))
            .min_by(|a, b| {
                b.0.partial_cmp(&a.0)
                    .expect("finite ratios")
                    .then_with(|| tie_key(&a.1).cmp(&tie_key(&b.1)))
            })
            .map(|(_, t, c)| (t, c)),
    };
    let verdict = match chosen {
        Some((t, count)) => SpreadVerdict::Violation { t, count },
        None => SpreadVerdict::Certified,
    };
    Ok(SpreadReport { r, k, verdict })
}

/// The least `r` (up to float rounding, rounded upward) for which the family
/// is `r`-spread: the maximum over `|T| < k` of `count(T)^(1/(k-|T|))`.
///
/// Families with `k <= 1` have no constraint beyond distinctness and report 1.
pub fn spreadness(family: &SetFamily) -> Result<f64> {
    let k = family.k();
    let counts = superset_counts(family)?;
    let mut best = 1.0f64;
    for (t, c) in counts {
        let e = k - t.len();
        if e == 0 || c <= 1 {
            continue;
        }
        best = best.max(root_at_least(c, e));
    }
    Ok(best)
}

/// Smallest float `x` with `spread_bound(x, e) >= c`, exact for perfect powers.
fn root_at_least(c: usize, e: usize) -> f64 {
    let target = c as f64;
    let guess = target.powf(1.0 / e as f64);
    let rounded = guess.round();
    if rounded >= 1.0 && (rounded as u128).checked_pow(e as u32) == Some(c as u128) {
        return rounded;
    }
    let mut x = guess;
    while spread_bound(x, e) < target {
        x = x.next_up();
    }
    while x > 0.0 && spread_bound(x.next_down(), e) >= target {
        x = x.next_down();
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::block_product_family;
    use crate::set::GroundSet;

    fn s(v: &[usize]) -> Subset {
        Subset::from_elements(v.iter().copied())
    }

    fn star() -> SetFamily {
        SetFamily::new(GroundSet::new(5).unwrap(), 2, (1..=4).map(|i| s(&[0, i])).collect()).unwrap()
    }

    #[test]
    fn superset_count_examples() {
        let f = SetFamily::new(
            GroundSet::new(4).unwrap(),
            2,
            vec![s(&[1, 2]), s(&[1, 3]), s(&[2, 3])],
        )
        .unwrap();
        assert_eq!(superset_count(&f, &s(&[1])).unwrap(), 2);
        assert_eq!(superset_count(&f, &s(&[1, 3])).unwrap(), 1);
        assert!(superset_count(&f, &Subset::EMPTY).is_err());

        let (bp, _) = block_product_family(2, 2).unwrap();
        assert_eq!(superset_count(&bp, &s(&[0])).unwrap(), 2);
    }

    #[test]
    fn witness_examples() {
        let (bp, _) = block_product_family(2, 2).unwrap();
        assert!(spread_witness(&bp, 2.0).unwrap().is_certified());

        let rep = spread_witness(&star(), 3.0).unwrap();
        assert_eq!(rep.violation(), Some((&s(&[0]), 4)));

        assert!(spread_witness(&star(), 4.0).unwrap().is_certified());
        assert!(spread_witness(&star(), 0.0).is_err());
        assert!(spread_witness(&SetFamily::empty(GroundSet::new(3).unwrap(), 2), 2.0).is_err());
    }

    #[test]
    fn tie_break_prefers_small_t() {
        // {0} has count 3 > 2^1 and {0,1} sits inside one member only
        let f = SetFamily::new(
            GroundSet::new(6).unwrap(),
            2,
            vec![s(&[0, 1]), s(&[0, 2]), s(&[0, 3]), s(&[4, 5])],
        )
        .unwrap();
        let rep = spread_witness(&f, 2.0).unwrap();
        assert_eq!(rep.violation(), Some((&s(&[0]), 3)));
        let rep = spread_witness(&f, 0.5).unwrap();
        // at r < 1 every singleton inside a member violates; {0} is the smallest vector
        assert_eq!(rep.violation().unwrap().0, &s(&[0]));
    }

    #[test]
    fn max_ratio_choice() {
        let f = SetFamily::new(
            GroundSet::new(8).unwrap(),
            2,
            vec![s(&[0, 1]), s(&[0, 2]), s(&[0, 3]), s(&[5, 4]), s(&[5, 6]), s(&[5, 7]), s(&[5, 3]), s(&[5, 2])],
        )
        .unwrap();
        let first = spread_witness_with(&f, 2.0, ViolationChoice::First).unwrap();
        assert_eq!(first.violation(), Some((&s(&[0]), 3)));
        let worst = spread_witness_with(&f, 2.0, ViolationChoice::MaxRatio).unwrap();
        assert_eq!(worst.violation(), Some((&s(&[5]), 5)));
    }

    #[test]
    fn spreadness_examples() {
        let (bp, _) = block_product_family(2, 3).unwrap();
        assert_eq!(spreadness(&bp).unwrap(), 3.0);
        assert_eq!(spreadness(&star()).unwrap(), 4.0);
        let single = SetFamily::new(GroundSet::new(3).unwrap(), 2, vec![s(&[0, 1])]).unwrap();
        assert_eq!(spreadness(&single).unwrap(), 1.0);
    }

    #[test]
    fn non_perfect_power_root_is_tight() {
        for (c, e) in [(5usize, 2usize), (7, 3), (1000, 7), (3, 2)] {
            let x = root_at_least(c, e);
            assert!(spread_bound(x, e) >= c as f64);
            assert!(spread_bound(x.next_down(), e) < c as f64);
        }
        assert_eq!(root_at_least(27, 3), 3.0);
        assert_eq!(root_at_least(4096, 12), 2.0);
    }
}
