//! Exact hit probabilities `Pr(exists S in F: S ⊆ X_delta)`.
//!
//! Two independent routes:
//! * enumeration: mark every subset of the ground set that contains a member
//!   (an upward closure over the `2^n` lattice), then weight by size;
//! * inclusion-exclusion over the `2^|F|` subfamilies `G`,
//!   `sum (-1)^{|G|+1} delta^{|∪G|}`.

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::family::SetFamily;

/// Largest ground set for the enumeration route.
pub const ENUMERATION_MAX_GROUND: usize = 24;
/// Largest family for the inclusion-exclusion route.
pub const INCLUSION_EXCLUSION_MAX_FAMILY: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactEnumeration,
    InclusionExclusion,
    MonteCarlo,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ExactEnumeration => "exact-enumeration",
            Method::InclusionExclusion => "inclusion-exclusion",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

/// Value of `Pr(exists S in F: S ⊆ X_delta)`, exact or sampled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HitEstimate {
    pub p_hat: f64,
    pub delta: f64,
    /// Zero for exact methods.
    pub trials: u64,
    /// `3 * sqrt(p_hat (1 - p_hat) / trials)`; zero for exact methods.
    pub half_width_3sigma: f64,
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Clopper-Pearson interval, when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clopper_pearson: Option<(f64, f64)>,
}

impl HitEstimate {
    pub fn exact(p: f64, delta: f64, method: Method) -> Self {
        Self { p_hat: p, delta, trials: 0, half_width_3sigma: 0.0, method, seed: None, clopper_pearson: None }
    }

    pub fn contains(&self, value: f64) -> bool {
        (self.p_hat - value).abs() <= self.half_width_3sigma
    }
}

/// For each size `j`, how many `j`-subsets of the ground set contain a member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HitProfile {
    n: usize,
    hits_by_size: Vec<u64>,
}

impl HitProfile {
    pub fn new(family: &SetFamily) -> Result<Self> {
        let n = family.ground().size();
        if n > ENUMERATION_MAX_GROUND {
            return Err(Error::ExactInfeasible {
                ground: n,
                ground_cap: ENUMERATION_MAX_GROUND,
                family: family.len(),
                family_cap: usize::MAX,
            });
        }
        let mut hit = vec![false; 1usize << n];
        for s in family.sets() {
            hit[s.low_word() as usize] = true;
        }
        // upward closure: mask is hit if removing any one bit leaves a hit mask
        for bit in 0..n {
            let step = 1usize << bit;
            for block in (0..hit.len()).step_by(step << 1) {
                for mask in block + step..block + (step << 1) {
                    if hit[mask - step] {
                        hit[mask] = true;
                    }
                }
            }
        }
        let mut hits_by_size = vec![0u64; n + 1];
        for (mask, &h) in hit.iter().enumerate() {
            if h {
                hits_by_size[mask.count_ones() as usize] += 1;
            }
        }
        Ok(Self { n, hits_by_size })
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn hits_by_size(&self) -> &[u64] {
        &self.hits_by_size
    }

    /// `Pr(exists S ⊆ X_delta)`. Valid for any `delta` in `[0, 1]`.
    pub fn probability(&self, delta: f64) -> f64 {
        let n = self.n as i32;
        self.hits_by_size
            .iter()
            .enumerate()
            .filter(|(_, &h)| h > 0)
            .map(|(j, &h)| h as f64 * delta.powi(j as i32) * (1.0 - delta).powi(n - j as i32))
            .sum()
    }

    /// `Pr(exists S ⊆ X_m)` for a uniform `m`-subset `X_m`.
    pub fn uniform_probability(&self, m: usize) -> f64 {
        assert!(m <= self.n, "m = {m} > n = {}", self.n);
        self.hits_by_size[m] as f64 / binomial(self.n, m) as f64
    }
}

/// `C(n, j)` for `n <= 64`; exact in `u128`.
pub fn binomial(n: usize, j: usize) -> u128 {
    if j > n {
        return 0;
    }
    let j = j.min(n - j);
    let mut c: u128 = 1;
    for i in 0..j {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c
}

pub fn hit_probability_enumeration(family: &SetFamily, delta: f64) -> Result<f64> {
    check_probability("delta", delta, None)?;
    Ok(HitProfile::new(family)?.probability(delta))
}

pub fn hit_probability_inclusion_exclusion(family: &SetFamily, delta: f64) -> Result<f64> {
    check_probability("delta", delta, None)?;
    let m = family.len();
    if m > INCLUSION_EXCLUSION_MAX_FAMILY {
        return Err(Error::ExactInfeasible {
            ground: family.ground().size(),
            ground_cap: usize::MAX,
            family: m,
            family_cap: INCLUSION_EXCLUSION_MAX_FAMILY,
        });
    }
    // signed number of subfamilies per union size; the float sum only
    // happens once per size
    let n = family.ground().size();
    let mut signed = vec![0i64; n + 1];
    fn walk(sets: &[crate::set::Subset], start: usize, union: crate::set::Subset, odd: bool, signed: &mut [i64]) {
        for i in start..sets.len() {
            let u = union.union(&sets[i]);
            let now_odd = !odd;
            signed[u.len()] += if now_odd { 1 } else { -1 };
            walk(sets, i + 1, u, now_odd, signed);
        }
    }
    walk(family.sets(), 0, crate::set::Subset::EMPTY, false, &mut signed);
    let terms = signed
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(j, &c)| c as f64 * delta.powi(j as i32));
    Ok(neumaier_sum(terms))
}

/// Compensated summation.
pub(crate) fn neumaier_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Exact hit probability, by enumeration when the ground set is small enough,
/// otherwise by inclusion-exclusion.
pub fn exact_hit_probability(family: &SetFamily, delta: f64) -> Result<HitEstimate> {
    check_probability("delta", delta, None)?;
    if family.is_empty() {
        return Ok(HitEstimate::exact(0.0, delta, Method::ExactEnumeration));
    }
    if family.ground().size() <= ENUMERATION_MAX_GROUND {
        let p = hit_probability_enumeration(family, delta)?;
        Ok(HitEstimate::exact(p, delta, Method::ExactEnumeration))
    } else if family.len() <= INCLUSION_EXCLUSION_MAX_FAMILY {
        let p = hit_probability_inclusion_exclusion(family, delta)?;
        Ok(HitEstimate::exact(p, delta, Method::InclusionExclusion))
    } else {
        Err(Error::ExactInfeasible {
            ground: family.ground().size(),
            ground_cap: ENUMERATION_MAX_GROUND,
            family: family.len(),
            family_cap: INCLUSION_EXCLUSION_MAX_FAMILY,
        })
    }
}

/// Exact hit probability by an explicitly chosen route.
pub fn exact_hit_probability_by(family: &SetFamily, delta: f64, method: Method) -> Result<HitEstimate> {
    let p = match method {
        Method::ExactEnumeration => hit_probability_enumeration(family, delta)?,
        Method::InclusionExclusion => hit_probability_inclusion_exclusion(family, delta)?,
        Method::MonteCarlo => {
            return Err(Error::InvalidParameter("monte-carlo is not an exact method".into()))
        }
    };
    Ok(HitEstimate::exact(p, delta, method))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::block_product_family;
    use crate::set::{GroundSet, Subset};

    /// Direct oracle: sum the weight of every subset containing a member.
    fn brute(family: &SetFamily, delta: f64) -> f64 {
        let n = family.ground().size();
        (0u64..1 << n)
            .filter(|&m| family.sets().iter().any(|s| s.is_subset_of(&Subset::from_u64(m))))
            .map(|m| delta.powi(m.count_ones() as i32) * (1.0 - delta).powi(n as i32 - m.count_ones() as i32))
            .sum()
    }

    #[test]
    fn block_product_quarter_grid() {
        let (f, _) = block_product_family(2, 2).unwrap();
        assert_eq!(brute(&f, 0.5), 0.5625);
        assert_eq!(hit_probability_enumeration(&f, 0.5).unwrap(), 0.5625);
        assert_eq!(hit_probability_inclusion_exclusion(&f, 0.5).unwrap(), 0.5625);
        assert_eq!(HitProfile::new(&f).unwrap().hits_by_size(), &[0, 0, 4, 4, 1]);
    }

    #[test]
    fn single_set_and_empty_family() {
        let g = GroundSet::new(6).unwrap();
        let f = SetFamily::new(g, 3, vec![Subset::from_elements([1, 3, 5])]).unwrap();
        let p = exact_hit_probability(&f, 0.3).unwrap();
        assert!((p.p_hat - 0.027).abs() < 1e-15);
        assert_eq!(p.trials, 0);
        assert_eq!(p.half_width_3sigma, 0.0);
        let e = exact_hit_probability(&SetFamily::empty(g, 3), 0.3).unwrap();
        assert_eq!(e.p_hat, 0.0);
        assert_eq!(hit_probability_inclusion_exclusion(&SetFamily::empty(g, 3), 0.3).unwrap(), 0.0);
    }

    #[test]
    fn k4_r2_matches_closed_form() {
        let (f, _) = block_product_family(4, 2).unwrap();
        let p = hit_probability_enumeration(&f, 0.3).unwrap();
        assert!((p - 0.06765201).abs() < 1e-12);
        assert!((p - brute(&f, 0.3)).abs() < 1e-12);
    }

    #[test]
    fn caps() {
        let (big, _) = block_product_family(5, 5).unwrap();
        assert!(matches!(exact_hit_probability(&big, 0.5), Err(Error::ExactInfeasible { .. })));
        let g = GroundSet::new(40).unwrap();
        let f = SetFamily::new(g, 2, vec![Subset::from_elements([0, 39])]).unwrap();
        let e = exact_hit_probability(&f, 0.5).unwrap();
        assert_eq!(e.method, Method::InclusionExclusion);
        assert_eq!(e.p_hat, 0.25);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(64, 32), 1832624140942590534);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let v = [1e16, 1.0, -1e16];
        assert_eq!(neumaier_sum(v), 1.0);
    }
}
