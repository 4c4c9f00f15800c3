//! Block-product (transversal) families.
//!
//! The ground set `{0, .., r*k - 1}` is cut into `k` consecutive blocks
//! `V_i = {i*r, .., (i+1)*r - 1}` and the family consists of every set that
//! takes exactly one element from each block. With `r = p - 1` this is the
//! classical sunflower-free family of size `(p-1)^k`; for general `r` it is
//! exactly `r`-spread while being hit by a `delta`-random subset with
//! probability only `(1 - (1-delta)^r)^k`.

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::family::SetFamily;
use crate::set::{GroundSet, Subset, MAX_GROUND};

/// Constructions refuse to materialize more sets than this.
pub const FAMILY_SIZE_CAP: usize = 1 << 24;

/// `k` consecutive blocks of `r` elements each.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPartition {
    k: usize,
    r: usize,
}

impl BlockPartition {
    pub fn new(k: usize, r: usize) -> Result<Self> {
        if k == 0 || r == 0 {
            return Err(Error::InvalidParameter(format!("block partition needs k, r >= 1 (got k={k}, r={r})")));
        }
        k.checked_mul(r)
            .ok_or_else(|| Error::InvalidParameter("r*k overflows".into()))?;
        Ok(Self { k, r })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn ground_size(&self) -> usize {
        self.k * self.r
    }

    /// Element range of block `i` (0-based).
    pub fn block_range(&self, i: usize) -> std::ops::Range<usize> {
        i * self.r..(i + 1) * self.r
    }

    pub fn block(&self, i: usize) -> Subset {
        Subset::range(i * self.r, (i + 1) * self.r)
    }

    /// Block index of element `e`.
    pub fn block_of(&self, e: usize) -> usize {
        e / self.r
    }

    /// `r^k`, or `None` on overflow.
    pub fn family_size(&self) -> Option<u128> {
        (self.r as u128).checked_pow(self.k as u32)
    }

    /// A sample contains a transversal iff it meets every block.
    pub fn is_hit_by(&self, sample: &Subset) -> bool {
        (0..self.k).all(|i| !self.block(i).is_disjoint(sample))
    }

    /// Lazily enumerates all transversals in odometer order (last block
    /// fastest). Requires `r*k` to fit a [`Subset`].
    pub fn transversals(&self) -> Result<Transversals> {
        if self.ground_size() > MAX_GROUND {
            return Err(Error::GroundTooLarge { size: self.ground_size(), max: MAX_GROUND });
        }
        Ok(Transversals { part: *self, digits: vec![0; self.k], done: false })
    }
}

/// Streaming transversal iterator; see [`BlockPartition::transversals`].
pub struct Transversals {
    part: BlockPartition,
    digits: Vec<usize>,
    done: bool,
}

impl Iterator for Transversals {
    type Item = Subset;

    fn next(&mut self) -> Option<Subset> {
        if self.done {
            return None;
        }
        let r = self.part.r;
        let out = self.digits.iter().enumerate().map(|(i, d)| i * r + d).collect();
        self.done = true;
        for d in self.digits.iter_mut().rev() {
            *d += 1;
            if *d < r {
                self.done = false;
                break;
            }
            *d = 0;
        }
        Some(out)
    }
}

/// All `r^k` transversals of the `k x r` block partition.
pub fn block_product_family(k: usize, r: usize) -> Result<(SetFamily, BlockPartition)> {
    let part = BlockPartition::new(k, r)?;
    match part.family_size() {
        Some(n) if n <= FAMILY_SIZE_CAP as u128 => {}
        n => {
            return Err(Error::FamilyTooLarge {
                count: n.unwrap_or(u128::MAX),
                cap: FAMILY_SIZE_CAP,
            })
        }
    }
    let ground = GroundSet::new(part.ground_size())?;
    let mut sets: Vec<Subset> = part.transversals()?.collect();
    sets.sort_unstable();
    Ok((SetFamily::from_canonical(ground, k, sets), part))
}

/// `(p-1)^k` sets with no `p`-petal sunflower.
pub fn erdos_rado_lower_family(p: usize, k: usize) -> Result<SetFamily> {
    if p < 2 {
        return Err(Error::InvalidParameter(format!("p must be at least 2, got {p}")));
    }
    Ok(block_product_family(k, p - 1)?.0)
}

/// `(1 - (1-delta)^r)^k`: probability that a `delta`-random subset contains a
/// transversal. Blocks are disjoint, so the per-block events are independent.
pub fn exact_block_hit_probability(k: usize, r: usize, delta: f64) -> Result<f64> {
    check_probability("delta", delta, None)?;
    BlockPartition::new(k, r)?;
    Ok((1.0 - (1.0 - delta).powi(r as i32)).powi(k as i32))
}

fn check_lemma3_params(k: usize, r: usize, delta: f64, eps: f64) -> Result<()> {
    check_probability("delta", delta, Some(0.5))?;
    check_probability("eps", eps, Some(0.5))?;
    if k == 0 || r == 0 {
        return Err(Error::InvalidParameter(format!("k and r must be at least 1 (got k={k}, r={r})")));
    }
    Ok(())
}

/// Upper end of the tight regime: `0.25 * ln(k/eps) / delta`.
pub fn lemma3_r_bound(k: usize, delta: f64, eps: f64) -> f64 {
    0.25 / delta * (k as f64 / eps).ln()
}

/// True iff `r <= 0.25 * ln(k/eps) / delta` (natural log).
pub fn lemma3_regime_check(k: usize, r: usize, delta: f64, eps: f64) -> Result<bool> {
    check_lemma3_params(k, r, delta, eps)?;
    Ok(r as f64 <= lemma3_r_bound(k, delta, eps))
}

/// Each term of
/// `(1-(1-d)^r)^k <= e^{-(1-d)^r k} < e^{-e^{-2dr} k} <= e^{-sqrt(eps k)} < 1-eps`
/// evaluated numerically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TightnessChain {
    pub k: usize,
    pub r: usize,
    pub delta: f64,
    pub eps: f64,
    pub in_regime: bool,
    /// The five terms, left to right.
    pub terms: [f64; 5],
    /// Whether each of the four relations holds (`<=`, `<`, `<=`, `<`).
    pub links: [bool; 4],
    /// Exact hit probability `< 1 - eps`.
    pub tight: bool,
}

impl TightnessChain {
    pub fn holds(&self) -> bool {
        self.tight && self.links.iter().all(|&l| l)
    }
}

pub fn tightness_chain(k: usize, r: usize, delta: f64, eps: f64) -> Result<TightnessChain> {
    let in_regime = lemma3_regime_check(k, r, delta, eps)?;
    let kf = k as f64;
    let q = (1.0 - delta).powi(r as i32);
    let terms = [
        exact_block_hit_probability(k, r, delta)?,
        (-q * kf).exp(),
        (-(-2.0 * delta * r as f64).exp() * kf).exp(),
        (-(eps * kf).sqrt()).exp(),
        1.0 - eps,
    ];
    let links = [
        terms[0] <= terms[1],
        terms[1] < terms[2],
        terms[2] <= terms[3],
        terms[3] < terms[4],
    ];
    Ok(TightnessChain { k, r, delta, eps, in_regime, terms, links, tight: terms[0] < 1.0 - eps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sunflower::find_sunflower_naive;

    fn s(v: &[usize]) -> Subset {
        Subset::from_elements(v.iter().copied())
    }

    #[test]
    fn small_block_products() {
        let (f, part) = block_product_family(2, 2).unwrap();
        assert_eq!(part.block(0), s(&[0, 1]));
        assert_eq!(part.block(1), s(&[2, 3]));
        assert_eq!(f.ground().size(), 4);
        let mut got: Vec<_> = f.sets().iter().map(|s| s.to_vec()).collect();
        got.sort();
        assert_eq!(got, vec![vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]]);

        let (f, _) = block_product_family(1, 3).unwrap();
        assert_eq!(f.sets(), &[s(&[0]), s(&[1]), s(&[2])]);

        let (f, _) = block_product_family(3, 1).unwrap();
        assert_eq!(f.sets(), &[s(&[0, 1, 2])]);
    }

    #[test]
    fn size_cap() {
        assert!(matches!(block_product_family(30, 3), Err(Error::FamilyTooLarge { .. })));
        assert_eq!(block_product_family(4, 16).unwrap().0.len(), 65536);
    }

    #[test]
    fn streaming_matches_materialized() {
        let part = BlockPartition::new(3, 4).unwrap();
        let mut streamed: Vec<_> = part.transversals().unwrap().collect();
        assert_eq!(streamed.len(), 64);
        streamed.sort();
        assert_eq!(streamed, block_product_family(3, 4).unwrap().0.sets());
    }

    #[test]
    fn erdos_rado_examples() {
        let f = erdos_rado_lower_family(3, 2).unwrap();
        assert_eq!(f.len(), 4);
        assert!(find_sunflower_naive(&f, 3).is_none());

        let f = erdos_rado_lower_family(2, 3).unwrap();
        assert_eq!(f.sets(), &[s(&[0, 1, 2])]);
        assert!(find_sunflower_naive(&f, 2).is_none());

        let f = erdos_rado_lower_family(4, 2).unwrap();
        assert_eq!(f.len(), 9);
        assert!(find_sunflower_naive(&f, 4).is_none());
        assert!(erdos_rado_lower_family(1, 2).is_err());
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(exact_block_hit_probability(2, 2, 0.5).unwrap(), 0.5625);
        assert!((exact_block_hit_probability(1, 1, 0.3).unwrap() - 0.3).abs() < 1e-15);
        assert!((exact_block_hit_probability(4, 2, 0.3).unwrap() - 0.06765201).abs() < 1e-12);
        assert!(exact_block_hit_probability(2, 2, 0.0).is_err());
        assert!(exact_block_hit_probability(2, 2, 1.0).is_err());
    }

    #[test]
    fn regime_examples() {
        assert!(lemma3_regime_check(16, 1, 0.5, 0.5).unwrap());
        assert!((lemma3_r_bound(16, 0.5, 0.5) - 1.7328679513998633).abs() < 1e-12);
        assert!(!lemma3_regime_check(2, 2, 0.5, 0.5).unwrap());
        assert!((lemma3_r_bound(2, 0.5, 0.5) - 0.6931471805599453).abs() < 1e-12);
        // k/eps = 1 gives a zero bound
        assert_eq!(lemma3_r_bound(1, 0.25, 1.0), 0.0);
        assert!(lemma3_regime_check(2, 1, 0.6, 0.5).is_err());
        assert!(lemma3_regime_check(2, 1, 0.5, 0.0).is_err());
        assert!(lemma3_regime_check(0, 1, 0.5, 0.5).is_err());
    }

    #[test]
    fn chain_holds_in_regime() {
        let c = tightness_chain(16, 1, 0.5, 0.5).unwrap();
        assert!(c.in_regime);
        assert!(c.holds(), "{c:?}");
    }
}
