//! Recursive sunflower extraction.
//!
//! With `r = r(p, k)`:
//! * `k = 1`: any `p` singletons form a sunflower with empty core.
//! * the family is not `r`-spread: some non-empty `T` lies in more than
//!   `r^(k-|T|)` members; recurse on the link of `T` and add `T` back to
//!   the core and every petal.
//! * the family is `r`-spread: split the ground set at random into `2p`
//!   classes; whenever `p` classes each contain a member, those members are
//!   pairwise disjoint.
//!
//! The spread case needs `|F| >= r^k` to be guaranteed to succeed, which is
//! out of reach for any family that fits in memory, so the procedure falls
//! back to an exhaustive sunflower search and otherwise reports failure along
//! with the full trace.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{first_member_per_class, partition_from, KeyedRng, DEFAULT_SEED};
use crate::error::{check_probability, Error, Result};
use crate::family::SetFamily;
use crate::set::{KSet, Subset};
use crate::spread::spread_witness;
use crate::sunflower::{find_sunflower, Sunflower};

/// `C p ln k` for `k >= 2`, `p` for `k = 1`.
pub fn r_threshold(p: usize, k: usize, c: f64) -> f64 {
    if k <= 1 {
        p as f64
    } else {
        c * p as f64 * (k as f64).ln()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractionParams {
    pub p: usize,
    pub c: f64,
    /// Fixes `r` at every level instead of computing `r(p, k)`.
    pub r_override: Option<f64>,
    pub max_partition_trials: u64,
    pub seed: u64,
    /// `None` disables the exhaustive fallback.
    pub fallback_bruteforce_cap: Option<u64>,
}

impl ExtractionParams {
    pub fn new(p: usize) -> Self {
        Self {
            p,
            c: 4.0,
            r_override: None,
            max_partition_trials: 64 * p as u64,
            seed: DEFAULT_SEED,
            fallback_bruteforce_cap: Some(1_000_000),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn without_fallback(mut self) -> Self {
        self.fallback_bruteforce_cap = None;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.p < 2 {
            return Err(Error::InvalidParameter(format!("p must be at least 2, got {}", self.p)));
        }
        if !(self.c >= 1.0) {
            return Err(Error::InvalidParameter(format!("C must be at least 1, got {}", self.c)));
        }
        if let Some(r) = self.r_override {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidParameter(format!("r override must be positive, got {r}")));
            }
        }
        Ok(())
    }

    fn r_at(&self, k: usize) -> f64 {
        self.r_override.unwrap_or_else(|| r_threshold(self.p, k, self.c))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum Step {
    /// `k = 1` with enough singletons (or not).
    Base { family_size: usize, success: bool },
    /// Non-spread: `t` lies in `count > r^(k-|t|)` members.
    LinkCase { k: usize, r: f64, t: Subset, count: usize },
    /// Spread: random `2p`-class partitions.
    SpreadCase { k: usize, r: f64, trials_used: u64, success: bool },
    /// Exhaustive sunflower search on the family at this level.
    Fallback { k: usize, family_size: usize, combinations: u64, truncated: bool, success: bool },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractionTrace {
    pub params: ExtractionParams,
    pub path: Vec<Step>,
    pub result: Option<Sunflower>,
}

impl ExtractionTrace {
    pub fn succeeded(&self) -> bool {
        self.result.is_some()
    }
}

/// Runs the recursive procedure. Failure is reported in the trace, never as
/// an error; errors are reserved for invalid parameters.
pub fn extract_sunflower(family: &SetFamily, params: &ExtractionParams) -> Result<ExtractionTrace> {
    params.validate()?;
    if family.is_empty() {
        return Err(Error::EmptyInput);
    }
    if family.k() == 0 {
        return Err(Error::InvalidParameter("family must be at least 1-uniform".into()));
    }
    let mut path = Vec::new();
    let result = extract_level(family, params, &mut path);
    if let Some(sf) = &result {
        debug_assert!(sf.verify() && sf.num_petals() == params.p);
        debug_assert!(sf.petals.iter().all(|s| family.contains(s)));
    }
    Ok(ExtractionTrace { params: params.clone(), path, result })
}

fn extract_level(family: &SetFamily, params: &ExtractionParams, path: &mut Vec<Step>) -> Option<Sunflower> {
    let p = params.p;
    let k = family.k();
    if family.len() < p {
        // no p members at all; nothing to search
        if k == 1 {
            path.push(Step::Base { family_size: family.len(), success: false });
        }
        return None;
    }
    if k == 1 {
        path.push(Step::Base { family_size: family.len(), success: true });
        return Some(Sunflower { core: Subset::EMPTY, petals: family.sets()[..p].to_vec() });
    }

    let r = params.r_at(k);
    let report = spread_witness(family, r).expect("non-empty family and positive r");
    let found = match report.violation() {
        Some((t, count)) => {
            let t = *t;
            path.push(Step::LinkCase { k, r, t, count });
            let link = family.link(&t).expect("violating T is non-empty and smaller than k");
            extract_level(&link, params, path).map(|sf| sf.attach(&t))
        }
        None => {
            let (petals, trials_used) = spread_case_search_counted(family, p, params.max_partition_trials, params.seed);
            path.push(Step::SpreadCase { k, r, trials_used, success: petals.is_some() });
            petals.map(|petals| Sunflower { core: Subset::EMPTY, petals })
        }
    };
    if found.is_some() {
        return found;
    }
    let cap = params.fallback_bruteforce_cap?;
    let search = find_sunflower(family, p, cap);
    path.push(Step::Fallback {
        k,
        family_size: family.len(),
        combinations: search.combinations,
        truncated: search.truncated,
        success: search.sunflower.is_some(),
    });
    search.sunflower
}

/// Up to `trials` random partitions into `2p` classes. Returns the members
/// found in the first `p` hit classes of the lowest successful trial.
pub fn spread_case_search(family: &SetFamily, p: usize, trials: u64, seed: u64) -> Option<Vec<KSet>> {
    spread_case_search_counted(family, p, trials, seed).0
}

/// Like [`spread_case_search`], also returning how many trials were consumed
/// (the winning trial index plus one, or `trials` on failure).
pub fn spread_case_search_counted(
    family: &SetFamily,
    p: usize,
    trials: u64,
    seed: u64,
) -> (Option<Vec<KSet>>, u64) {
    if p == 0 || family.len() < p {
        return (None, trials);
    }
    let rng = KeyedRng::new(seed);
    let n = family.ground().size();
    let t = 2 * p;
    let hit = (0..trials).into_par_iter().find_map_first(|trial| {
        let classes = partition_from(&rng, n, t, trial);
        let members: Vec<KSet> = first_member_per_class(family, &classes)
            .into_iter()
            .flatten()
            .take(p)
            .map(|i| family.sets()[i])
            .collect();
        (members.len() == p).then_some((trial, members))
    });
    match hit {
        Some((trial, members)) => (Some(members), trial + 1),
        None => (None, trials),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisjointSearch {
    pub classes: usize,
    pub sets: Vec<KSet>,
    /// `|sets| > classes * (1 - eps)`.
    pub exceeded: bool,
    pub threshold: f64,
}

/// One random partition into `floor(1/delta)` classes; returns one member per
/// hit class.
pub fn generalized_disjoint_search(family: &SetFamily, delta: f64, eps: f64, seed: u64) -> Result<DisjointSearch> {
    check_probability("delta", delta, Some(0.5))?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange { name: "eps", value: eps, range: "(0, 1)" });
    }
    let t = (1.0 / delta).floor() as usize;
    let classes = partition_from(&KeyedRng::new(seed), family.ground().size(), t, 0);
    let sets: Vec<KSet> = first_member_per_class(family, &classes)
        .into_iter()
        .flatten()
        .map(|i| family.sets()[i])
        .collect();
    let threshold = t as f64 * (1.0 - eps);
    Ok(DisjointSearch { classes: t, exceeded: sets.len() as f64 > threshold, sets, threshold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{block_product_family, erdos_rado_lower_family};
    use crate::set::GroundSet;
    use crate::sunflower::is_sunflower;

    fn s(v: &[usize]) -> Subset {
        Subset::from_elements(v.iter().copied())
    }

    #[test]
    fn threshold_values() {
        assert_eq!(r_threshold(3, 1, 4.0), 3.0);
        assert_eq!(r_threshold(3, 1, 100.0), 3.0);
        assert!((r_threshold(2, 2, 4.0) - 5.545177444479562).abs() < 1e-12);
        assert!((r_threshold(2, 4, 4.0) - 11.090354888959125).abs() < 1e-12);
    }

    #[test]
    fn disjoint_family() {
        let g = GroundSet::new(9).unwrap();
        let f = SetFamily::new(g, 3, vec![s(&[0, 1, 2]), s(&[3, 4, 5]), s(&[6, 7, 8])]).unwrap();
        let trace = extract_sunflower(&f, &ExtractionParams::new(3)).unwrap();
        let sf = trace.result.unwrap();
        assert_eq!(sf.core, Subset::EMPTY);
        assert_eq!(sf.num_petals(), 3);
    }

    #[test]
    fn star_needs_cored_fallback() {
        let g = GroundSet::new(6).unwrap();
        let f = SetFamily::new(g, 2, (1..=5).map(|i| s(&[0, i])).collect()).unwrap();
        let trace = extract_sunflower(&f, &ExtractionParams::new(3)).unwrap();
        // r(3,2) = 12 ln 2 > 5, so the star is spread and the partition search cannot work
        assert!(matches!(trace.path[0], Step::SpreadCase { success: false, .. }));
        let sf = trace.result.unwrap();
        assert_eq!(sf.core, s(&[0]));
        assert_eq!(sf.num_petals(), 3);

        let no_fallback = extract_sunflower(&f, &ExtractionParams::new(3).without_fallback()).unwrap();
        assert!(no_fallback.result.is_none());
    }

    #[test]
    fn star_with_small_r_links() {
        let g = GroundSet::new(6).unwrap();
        let f = SetFamily::new(g, 2, (1..=5).map(|i| s(&[0, i])).collect()).unwrap();
        let mut params = ExtractionParams::new(3);
        params.r_override = Some(2.0);
        let trace = extract_sunflower(&f, &params).unwrap();
        assert_eq!(trace.path[0], Step::LinkCase { k: 2, r: 2.0, t: s(&[0]), count: 5 });
        assert!(matches!(trace.path[1], Step::Base { success: true, .. }));
        let sf = trace.result.unwrap();
        assert_eq!(sf.core, s(&[0]));
        assert_eq!(sf.petals, vec![s(&[0, 1]), s(&[0, 2]), s(&[0, 3])]);
    }

    #[test]
    fn erdos_rado_family_fails_honestly() {
        let f = erdos_rado_lower_family(3, 2).unwrap();
        let trace = extract_sunflower(&f, &ExtractionParams::new(3)).unwrap();
        assert!(trace.result.is_none());
        assert!(matches!(trace.path.last(), Some(Step::Fallback { success: false, truncated: false, .. })));
    }

    #[test]
    fn spread_case_examples() {
        let star = SetFamily::new(GroundSet::new(5).unwrap(), 2, (1..=4).map(|i| s(&[0, i])).collect()).unwrap();
        for seed in 0..10 {
            assert!(spread_case_search(&star, 2, 64, seed).is_none());
        }
        let pair = SetFamily::new(GroundSet::new(4).unwrap(), 2, vec![s(&[0, 1]), s(&[2, 3])]).unwrap();
        let got = spread_case_search(&pair, 2, 64, 1).unwrap();
        assert_eq!(got.len(), 2);
        assert!(got[0].is_disjoint(&got[1]));
    }

    #[test]
    fn spread_case_block_product() {
        let (f, _) = block_product_family(4, 16).unwrap();
        let (got, used) = spread_case_search_counted(&f, 2, 10, 4);
        let got = got.unwrap();
        assert!(used <= 10);
        assert!(got[0].is_disjoint(&got[1]));
        assert!(is_sunflower(&got).unwrap().is_some());
    }

    #[test]
    fn generalized_search() {
        let (f, _) = block_product_family(2, 8).unwrap();
        let out = generalized_disjoint_search(&f, 0.25, 0.5, 3).unwrap();
        assert_eq!(out.classes, 4);
        assert_eq!(out.threshold, 2.0);
        for (i, a) in out.sets.iter().enumerate() {
            for b in &out.sets[i + 1..] {
                assert!(a.is_disjoint(b));
            }
        }
        let empty = SetFamily::empty(GroundSet::new(4).unwrap(), 2);
        assert!(generalized_disjoint_search(&empty, 0.5, 0.5, 1).unwrap().sets.is_empty());
        assert!(generalized_disjoint_search(&f, 0.6, 0.5, 1).is_err());
    }

    #[test]
    fn rejects_bad_params() {
        let (f, _) = block_product_family(2, 2).unwrap();
        assert!(extract_sunflower(&f, &ExtractionParams::new(1)).is_err());
        assert!(extract_sunflower(&f, &ExtractionParams::new(2).with_c(0.5)).is_err());
        let empty = SetFamily::empty(GroundSet::new(4).unwrap(), 2);
        assert!(extract_sunflower(&empty, &ExtractionParams::new(2)).is_err());
    }
}
