//! Exact values of `Sun(p, k)` for tiny parameters by exhaustive search for
//! the largest family of `k`-sets with no `p`-petal sunflower.
//!
//! Families are built as sequences of sets in increasing bit-vector order,
//! and each new set may only introduce elements that are the smallest unused
//! indices, so the union of every prefix is `{0, .., u-1}`. Every family has
//! a relabeling of this shape, and any family of `s` sets built this way
//! spans at most `s * k` elements. The search therefore starts on a small
//! ground set and widens it until it holds `(best + 1) * k` elements, at
//! which point no larger sunflower-free family can have been missed.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::set::{GroundSet, Subset};

/// Bit-vector search works on `u64` masks.
pub const SEARCH_MAX_GROUND: usize = 63;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SunQuery {
    pub p: usize,
    pub k: usize,
    /// Initial ground-set size; widened automatically up to
    /// [`SEARCH_MAX_GROUND`]. Defaults to `2 p k`.
    pub ground_cap: Option<usize>,
    pub time_budget: Option<Duration>,
}

impl SunQuery {
    pub fn new(p: usize, k: usize) -> Self {
        Self { p, k, ground_cap: None, time_budget: None }
    }

    pub fn with_budget(mut self, budget: Duration) -> Self {
        self.time_budget = Some(budget);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.p < 2 || self.k < 1 {
            return Err(Error::InvalidParameter(format!(
                "need p >= 2 and k >= 1 (got p={}, k={})",
                self.p, self.k
            )));
        }
        if let Some(g) = self.ground_cap {
            if g < self.k {
                return Err(Error::InvalidParameter(format!("ground cap {g} is smaller than k = {}", self.k)));
            }
        }
        Ok(())
    }
}

/// Largest sunflower-free family found.
#[derive(Clone, Debug, PartialEq)]
pub struct SunflowerFreeResult {
    pub p: usize,
    pub k: usize,
    pub size: usize,
    pub witness: SetFamily,
    /// True when the search finished and the ground set was wide enough.
    pub exhaustive: bool,
    pub timed_out: bool,
    pub ground_size: usize,
    pub nodes: u64,
    pub elapsed: Duration,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SunValue {
    Exact { value: u128 },
    /// `lower <= Sun(p, k) <= upper`.
    Bracket { lower: u128, upper: u128 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SunReport {
    pub value: SunValue,
    pub search: SunflowerFreeResult,
}

/// `(p-1)^k`, the size of the classical sunflower-free construction.
pub fn erdos_rado_lower(p: usize, k: usize) -> u128 {
    ((p - 1) as u128).pow(k as u32)
}

/// `(p-1)^k k! + 1`.
pub fn erdos_rado_upper(p: usize, k: usize) -> u128 {
    erdos_rado_lower(p, k) * (1..=k as u128).product::<u128>() + 1
}

struct Search<'a> {
    p: usize,
    normalize: bool,
    deadline: Option<Instant>,
    timed_out: &'a AtomicBool,
    global_best: &'a AtomicUsize,
    nodes: u64,
    best: usize,
    witness: Vec<u64>,
}

/// Members of `family` whose intersection with every set in `with` is exactly
/// `core`, as remainders outside the core.
fn petal_rests(family: &[u64], with: &[u64], core: u64) -> Vec<u64> {
    family
        .iter()
        .filter(|&&m| with.iter().all(|&w| m & w == core))
        .map(|&m| m & !core)
        .collect()
}

/// Can `need` pairwise-disjoint masks be chosen from `rests`?
fn packs(rests: &[u64], need: usize, used: u64) -> bool {
    if need == 0 {
        return true;
    }
    for (i, &r) in rests.iter().enumerate() {
        if rests.len() - i < need {
            break;
        }
        if r & used == 0 && packs(&rests[i + 1..], need - 1, used | r) {
            return true;
        }
    }
    false
}

/// Would `family + {c}` contain a `p`-sunflower through `c`?
fn closes_sunflower(family: &[u64], c: u64, p: usize) -> bool {
    if p <= 1 {
        return true;
    }
    let cores: Vec<u64> = family.iter().map(|&m| m & c).sorted_unstable().dedup().collect();
    cores.into_iter().any(|core| packs(&petal_rests(family, &[c], core), p - 1, c & !core))
}

/// Would `family + {c, d}` contain a `p`-sunflower through both `c` and `d`?
fn closes_pair(family: &[u64], c: u64, d: u64, p: usize) -> bool {
    let core = c & d;
    if p <= 2 {
        return true;
    }
    packs(&petal_rests(family, &[c, d], core), p - 2, (c | d) & !core)
}

impl Search<'_> {
    fn out_of_time(&self) -> bool {
        if self.timed_out.load(Ordering::Relaxed) {
            return true;
        }
        if let Some(d) = self.deadline {
            if self.nodes % 1024 == 0 && Instant::now() >= d {
                self.timed_out.store(true, Ordering::Relaxed);
                return true;
            }
        }
        false
    }

    fn record(&mut self, family: &[u64]) {
        if family.len() > self.best {
            self.best = family.len();
            self.witness = family.to_vec();
            self.global_best.fetch_max(self.best, Ordering::Relaxed);
        }
    }

    /// `cands` are sets larger than the last member, each individually
    /// compatible with `family`.
    fn dfs(&mut self, family: &mut Vec<u64>, used: usize, cands: &[u64]) {
        self.nodes += 1;
        self.record(family);
        if self.out_of_time() {
            return;
        }
        for (i, &c) in cands.iter().enumerate() {
            let bound = family.len() + cands.len() - i;
            // strict against other branches so ties stay deterministic
            if bound <= self.best || bound < self.global_best.load(Ordering::Relaxed) {
                break;
            }
            let new_used = if self.normalize {
                let above = c >> used;
                if above & (above + 1) != 0 {
                    continue;
                }
                used + above.count_ones() as usize
            } else {
                used
            };
            let rest: Vec<u64> = cands[i + 1..]
                .iter()
                .copied()
                .filter(|&d| !closes_pair(family, c, d, self.p))
                .collect();
            family.push(c);
            self.dfs(family, new_used, &rest);
            family.pop();
            if self.timed_out.load(Ordering::Relaxed) {
                return;
            }
        }
    }
}

fn k_subsets(n: usize, k: usize) -> Vec<u64> {
    let mut v: Vec<u64> = (0..n).combinations(k).map(|c| c.iter().fold(0u64, |m, &e| m | 1 << e)).collect();
    v.sort_unstable();
    v
}

struct RunOutcome {
    best: Vec<u64>,
    nodes: u64,
    timed_out: bool,
}

fn run(p: usize, k: usize, n: usize, normalize: bool, deadline: Option<Instant>, seed_best: usize) -> RunOutcome {
    let all = k_subsets(n, k);
    let timed_out = AtomicBool::new(false);
    let global_best = AtomicUsize::new(seed_best);
    // first level: with normalization only {0..k-1} qualifies
    let firsts: Vec<usize> = (0..all.len())
        .filter(|&i| !normalize || all[i] == (1u64 << k) - 1)
        .collect();
    let results: Vec<(usize, Vec<u64>, u64)> = firsts
        .into_iter()
        .flat_map(|i| {
            let first = all[i];
            let rest: Vec<u64> = all[i + 1..]
                .iter()
                .copied()
                .filter(|&d| !closes_sunflower(&[first], d, p))
                .collect();
            let used = if normalize { k } else { n };
            // second level in parallel, one task per choice of second set
            let tasks: Vec<usize> = (0..=rest.len()).collect();
            let timed_out = &timed_out;
            let global_best = &global_best;
            tasks
                .into_par_iter()
                .map(move |j| {
                    let mut s = Search {
                        p,
                        normalize,
                        deadline,
                        timed_out,
                        global_best,
                        nodes: 0,
                        best: 0,
                        witness: Vec::new(),
                    };
                    let mut fam = vec![first];
                    if j == rest.len() {
                        // the branch that stops after the first set
                        s.nodes += 1;
                        s.record(&fam);
                        return (s.best, s.witness, s.nodes);
                    }
                    let c = rest[j];
                    let new_used = if normalize {
                        let above = c >> used;
                        if above & (above + 1) != 0 {
                            return (0, Vec::new(), 1);
                        }
                        used + above.count_ones() as usize
                    } else {
                        used
                    };
                    let next: Vec<u64> = rest[j + 1..].iter().copied().filter(|&d| !closes_pair(&fam, c, d, p)).collect();
                    fam.push(c);
                    s.dfs(&mut fam, new_used, &next);
                    (s.best, s.witness, s.nodes)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let nodes = results.iter().map(|r| r.2).sum();
    // deterministic: largest size, earliest branch
    let best = results
        .into_iter()
        .fold((0usize, Vec::new()), |acc, (b, w, _)| if b > acc.0 { (b, w) } else { acc })
        .1;
    RunOutcome { best, nodes, timed_out: timed_out.load(Ordering::Relaxed) }
}

fn to_family(n: usize, k: usize, masks: &[u64]) -> SetFamily {
    let sets = masks.iter().map(|&m| Subset::from_u64(m)).collect();
    SetFamily::new(GroundSet::new(n).expect("n >= k >= 1"), k, sets).expect("search emits distinct k-sets")
}

/// Largest family of `k`-sets with no `p`-petal sunflower, with automatic
/// widening of the ground set. On timeout the best family so far is
/// returned with `exhaustive = false`.
pub fn max_sunflower_free(query: &SunQuery) -> Result<SunflowerFreeResult> {
    query.validate()?;
    let (p, k) = (query.p, query.k);
    let start = Instant::now();
    let deadline = query.time_budget.map(|b| start + b);
    let mut n = query.ground_cap.unwrap_or(2 * p * k).max(k).min(SEARCH_MAX_GROUND);
    if k > SEARCH_MAX_GROUND {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds the search limit {SEARCH_MAX_GROUND}")));
    }
    let mut nodes = 0u64;
    loop {
        let out = run(p, k, n, true, deadline, 0);
        nodes += out.nodes;
        let size = out.best.len();
        let needed = (size + 1).saturating_mul(k);
        let wide_enough = n >= needed;
        if out.timed_out || wide_enough || n == SEARCH_MAX_GROUND {
            let witness_ground = out.best.iter().fold(0u64, |a, &m| a | m);
            let used = (64 - witness_ground.leading_zeros() as usize).max(k);
            return Ok(SunflowerFreeResult {
                p,
                k,
                size,
                witness: to_family(used, k, &out.best),
                exhaustive: !out.timed_out && wide_enough,
                timed_out: out.timed_out,
                ground_size: n,
                nodes,
                elapsed: start.elapsed(),
            });
        }
        n = needed.min(SEARCH_MAX_GROUND);
    }
}

/// Maximum sunflower-free family on a fixed ground set of `n` elements, with
/// or without the element-introduction normalization. Used to cross-check
/// that the normalization loses nothing.
pub fn max_sunflower_free_on(p: usize, k: usize, n: usize, normalize: bool) -> Result<SetFamily> {
    if p < 2 || k < 1 || n < k || n > SEARCH_MAX_GROUND {
        return Err(Error::InvalidParameter(format!("invalid search p={p} k={k} n={n}")));
    }
    let out = run(p, k, n, normalize, None, 0);
    Ok(to_family(n, k, &out.best))
}

/// `Sun(p, k) = max sunflower-free size + 1` when the search is exhaustive,
/// otherwise the bracket `[found + 1, (p-1)^k k! + 1]`.
pub fn sun_value(query: &SunQuery) -> Result<SunReport> {
    let search = max_sunflower_free(query)?;
    let found = search.size as u128 + 1;
    let value = if search.exhaustive {
        SunValue::Exact { value: found }
    } else {
        SunValue::Bracket {
            lower: found.max(erdos_rado_lower(query.p, query.k) + 1),
            upper: erdos_rado_upper(query.p, query.k),
        }
    };
    Ok(SunReport { value, search })
}
