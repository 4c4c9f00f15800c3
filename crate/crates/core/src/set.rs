//! Fixed-width bit vectors over a dense ground set `{0, .., n-1}`.
//!
//! A [`Subset`] is four 64-bit words, so ground sets of up to
//! [`MAX_GROUND`] elements can be stored and sampled. Operations that
//! enumerate the power set of the ground set impose their own, much smaller,
//! caps.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORDS: usize = 4;

/// Largest ground set a [`Subset`] can index.
pub const MAX_GROUND: usize = WORDS * 64;

/// The finite ground set `{0, .., size-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroundSet {
    size: usize,
}

impl GroundSet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyGround);
        }
        if size > MAX_GROUND {
            return Err(Error::GroundTooLarge { size, max: MAX_GROUND });
        }
        Ok(Self { size })
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    /// The whole ground set as a subset.
    pub fn full(&self) -> Subset {
        Subset::range(0, self.size)
    }

    pub fn contains(&self, s: &Subset) -> bool {
        s.max_element().map_or(true, |m| m < self.size)
    }

    /// Checks that `s` only uses elements of this ground set.
    pub fn check(&self, s: &Subset) -> Result<()> {
        match s.max_element() {
            Some(m) if m >= self.size => Err(Error::ElementOutOfRange {
                element: m,
                ground: self.size,
            }),
            _ => Ok(()),
        }
    }

    /// Intersection of two subsets of this ground set.
    pub fn intersect(&self, a: &Subset, b: &Subset) -> Result<Subset> {
        self.check(a)?;
        self.check(b)?;
        Ok(a.intersection(b))
    }
}

/// A subset of the ground set, stored as a bit vector.
///
/// Ordering compares the bit vectors as unsigned integers, element 0 being
/// the least significant bit. This is the canonical storage order of a
/// [`SetFamily`](crate::family::SetFamily).
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Subset {
    words: [u64; WORDS],
}

/// A member of a uniform family. Same representation as any other subset.
pub type KSet = Subset;

impl Subset {
    pub const EMPTY: Subset = Subset { words: [0; WORDS] };

    /// Builds a subset from element indices. Panics if an index is at least
    /// [`MAX_GROUND`]; use [`Subset::try_from_elements`] for untrusted input.
    pub fn from_elements<I: IntoIterator<Item = usize>>(elements: I) -> Self {
        let mut s = Self::EMPTY;
        for e in elements {
            s.insert(e);
        }
        s
    }

    pub fn try_from_elements<I: IntoIterator<Item = usize>>(elements: I) -> Result<Self> {
        let mut s = Self::EMPTY;
        for e in elements {
            if e >= MAX_GROUND {
                return Err(Error::ElementOutOfRange { element: e, ground: MAX_GROUND });
            }
            s.insert(e);
        }
        Ok(s)
    }

    /// `{lo, .., hi-1}`.
    pub fn range(lo: usize, hi: usize) -> Self {
        let mut s = Self::EMPTY;
        for e in lo..hi {
            s.insert(e);
        }
        s
    }

    /// Subset whose low word is `bits`; handy for ground sets of at most 64.
    #[inline]
    pub fn from_u64(bits: u64) -> Self {
        let mut s = Self::EMPTY;
        s.words[0] = bits;
        s
    }

    /// The low 64 bits. Exact when every element is below 64.
    #[inline]
    pub fn low_word(&self) -> u64 {
        self.words[0]
    }

    /// True if the subset fits in the low word.
    #[inline]
    pub fn fits_u64(&self) -> bool {
        self.words[1..].iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn insert(&mut self, e: usize) {
        self.words[e / 64] |= 1u64 << (e % 64);
    }

    #[inline]
    pub fn remove(&mut self, e: usize) {
        self.words[e / 64] &= !(1u64 << (e % 64));
    }

    #[inline]
    pub fn contains(&self, e: usize) -> bool {
        e < MAX_GROUND && self.words[e / 64] >> (e % 64) & 1 == 1
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn intersection(&self, other: &Subset) -> Subset {
        let mut words = self.words;
        for (w, o) in words.iter_mut().zip(other.words) {
            *w &= o;
        }
        Subset { words }
    }

    #[inline]
    pub fn union(&self, other: &Subset) -> Subset {
        let mut words = self.words;
        for (w, o) in words.iter_mut().zip(other.words) {
            *w |= o;
        }
        Subset { words }
    }

    /// `self \ other`.
    #[inline]
    pub fn difference(&self, other: &Subset) -> Subset {
        let mut words = self.words;
        for (w, o) in words.iter_mut().zip(other.words) {
            *w &= !o;
        }
        Subset { words }
    }

    #[inline]
    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.words.iter().zip(other.words.iter()).all(|(a, b)| a & !b == 0)
    }

    #[inline]
    pub fn is_disjoint(&self, other: &Subset) -> bool {
        self.words.iter().zip(other.words.iter()).all(|(a, b)| a & b == 0)
    }

    pub fn min_element(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn max_element(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + 63 - w.leading_zeros() as usize)
    }

    /// Elements in increasing order.
    pub fn iter(&self) -> Elements {
        Elements { words: self.words, word: 0 }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All non-empty subsets of `self`, each exactly once.
    pub fn nonempty_subsets(&self) -> impl Iterator<Item = Subset> + '_ {
        let elems = self.to_vec();
        let n = elems.len();
        assert!(n < 64, "power set of a {n}-element set");
        (1u64..(1u64 << n)).map(move |mask| {
            let mut s = Subset::EMPTY;
            let mut m = mask;
            while m != 0 {
                s.insert(elems[m.trailing_zeros() as usize]);
                m &= m - 1;
            }
            s
        })
    }
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.words.iter().rev().cmp(other.words.iter().rev())
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

impl FromIterator<usize> for Subset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Subset::from_elements(iter)
    }
}

impl Serialize for Subset {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(deserializer)?;
        Subset::try_from_elements(v).map_err(serde::de::Error::custom)
    }
}

pub struct Elements {
    words: [u64; WORDS],
    word: usize,
}

impl Iterator for Elements {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.word < WORDS {
            let w = self.words[self.word];
            if w != 0 {
                self.words[self.word] = w & (w - 1);
                return Some(self.word * 64 + w.trailing_zeros() as usize);
            }
            self.word += 1;
        }
        None
    }
}
