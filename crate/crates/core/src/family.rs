//! Uniform set families and their JSON file format.

use std::collections::HashMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::set::{GroundSet, KSet, Subset};

/// A collection of distinct `k`-element subsets of a ground set, stored in
/// ascending bit-vector order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFamily {
    ground: GroundSet,
    k: usize,
    sets: Vec<KSet>,
    names: Option<Vec<String>>,
}

impl SetFamily {
    /// Validates and canonicalizes. Duplicates are an error, not silently merged.
    pub fn new(ground: GroundSet, k: usize, mut sets: Vec<KSet>) -> Result<Self> {
        for s in &sets {
            ground.check(s)?;
            if s.len() != k {
                return Err(Error::WrongCardinality { set: s.to_vec(), expected: k, found: s.len() });
            }
        }
        sets.sort_unstable();
        if let Some(w) = sets.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateSet(w[0].to_vec()));
        }
        Ok(Self { ground, k, sets, names: None })
    }

    /// Like [`SetFamily::new`], but merges duplicates instead of rejecting them.
    pub fn from_sets_dedup(ground: GroundSet, k: usize, mut sets: Vec<KSet>) -> Result<Self> {
        sets.sort_unstable();
        sets.dedup();
        Self::new(ground, k, sets)
    }

    pub fn empty(ground: GroundSet, k: usize) -> Self {
        Self { ground, k, sets: Vec::new(), names: None }
    }

    /// Caller guarantees sorted, distinct, in-ground, `k`-uniform input.
    pub(crate) fn from_canonical(ground: GroundSet, k: usize, sets: Vec<KSet>) -> Self {
        debug_assert!(sets.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(sets.iter().all(|s| s.len() == k && ground.contains(s)));
        Self { ground, k, sets, names: None }
    }

    /// Builds a family from sets of named elements. Names are assigned
    /// indices in order of first appearance and kept as the name table.
    pub fn from_named_sets<S: AsRef<str>>(k: usize, named: &[Vec<S>]) -> Result<Self> {
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut names = Vec::new();
        let mut sets = Vec::with_capacity(named.len());
        for row in named {
            let mut s = Subset::EMPTY;
            for name in row {
                let next = names.len();
                let i = *index.entry(name.as_ref().to_owned()).or_insert_with(|| {
                    names.push(name.as_ref().to_owned());
                    next
                });
                if i >= crate::set::MAX_GROUND {
                    return Err(Error::GroundTooLarge { size: i + 1, max: crate::set::MAX_GROUND });
                }
                s.insert(i);
            }
            sets.push(s);
        }
        let mut fam = Self::new(GroundSet::new(names.len().max(1))?, k, sets)?;
        fam.names = Some(names);
        Ok(fam)
    }

    #[inline]
    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn sets(&self) -> &[KSet] {
        &self.sets
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn contains(&self, s: &Subset) -> bool {
        self.sets.binary_search(s).is_ok()
    }

    /// Members that contain `t`, in canonical order.
    pub fn members_containing<'a>(&'a self, t: &'a Subset) -> impl Iterator<Item = &'a KSet> + 'a {
        self.sets.iter().filter(move |s| t.is_subset_of(s))
    }

    /// Union of all members.
    pub fn support(&self) -> Subset {
        self.sets.iter().fold(Subset::EMPTY, |acc, s| acc.union(s))
    }

    /// The link `{S \ T : S in family, T ⊆ S}` as a `(k - |T|)`-uniform family.
    pub fn link(&self, t: &Subset) -> Result<SetFamily> {
        if t.is_empty() {
            return Err(Error::EmptyConditioningSet);
        }
        if t.len() > self.k {
            return Err(Error::ConditioningSetTooLarge { t: t.len(), k: self.k });
        }
        let mut sets: Vec<KSet> = self.members_containing(t).map(|s| s.difference(t)).collect();
        // removing the same bits from distinct supersets keeps them distinct,
        // but not necessarily in order once multi-word sets are involved
        sets.sort_unstable();
        Ok(SetFamily::from_canonical(self.ground, self.k - t.len(), sets))
    }

    /// First `p` pairwise-disjoint members in lexicographic index order, by
    /// exhaustive backtracking.
    pub fn disjoint_subfamily_bruteforce(&self, p: usize) -> Option<Vec<KSet>> {
        fn go(sets: &[KSet], start: usize, used: Subset, need: usize, acc: &mut Vec<KSet>) -> bool {
            if need == 0 {
                return true;
            }
            if sets.len() - start < need {
                return false;
            }
            for i in start..sets.len() {
                if sets[i].is_disjoint(&used) {
                    acc.push(sets[i]);
                    if go(sets, i + 1, used.union(&sets[i]), need - 1, acc) {
                        return true;
                    }
                    acc.pop();
                }
            }
            false
        }
        let mut acc = Vec::with_capacity(p);
        go(&self.sets, 0, Subset::EMPTY, p, &mut acc).then_some(acc)
    }

    pub fn to_file(&self) -> FamilyFile {
        FamilyFile {
            ground_set_size: self.ground.size(),
            k: self.k,
            sets: self.sets.iter().map(Subset::to_vec).collect(),
            element_names: self.names.clone(),
        }
    }

    pub fn from_file(file: FamilyFile) -> Result<Self> {
        let ground = GroundSet::new(file.ground_set_size)?;
        let mut sets = Vec::with_capacity(file.sets.len());
        for row in &file.sets {
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::UnsortedElements(row.clone()));
            }
            if let Some(&e) = row.iter().find(|&&e| e >= ground.size()) {
                return Err(Error::ElementOutOfRange { element: e, ground: ground.size() });
            }
            sets.push(Subset::from_elements(row.iter().copied()));
        }
        if let Some(names) = &file.element_names {
            if names.len() != ground.size() {
                return Err(Error::InvalidParameter(format!(
                    "name table has {} entries for a ground set of {}",
                    names.len(),
                    ground.size()
                )));
            }
        }
        let mut fam = Self::new(ground, file.k, sets)?;
        fam.names = file.element_names;
        Ok(fam)
    }

    pub fn read_json<R: Read>(reader: R) -> Result<Self> {
        Self::from_file(serde_json::from_reader(reader)?)
    }

    pub fn write_json<W: Write>(&self, writer: W) -> Result<()> {
        serde_json::to_writer(writer, &self.to_file())?;
        Ok(())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("family serializes")
    }
}

/// On-disk family: `{"ground_set_size": n, "k": k, "sets": [[e1, .., ek], ..]}`
/// with 0-based, strictly increasing element lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyFile {
    pub ground_set_size: usize,
    pub k: usize,
    pub sets: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element_names: Option<Vec<String>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(n: usize, k: usize, sets: &[&[usize]]) -> SetFamily {
        SetFamily::new(
            GroundSet::new(n).unwrap(),
            k,
            sets.iter().map(|s| Subset::from_elements(s.iter().copied())).collect(),
        )
        .unwrap()
    }

    fn s(v: &[usize]) -> Subset {
        Subset::from_elements(v.iter().copied())
    }

    #[test]
    fn canonical_order_and_duplicates() {
        let f = fam(5, 2, &[&[3, 4], &[0, 1], &[1, 2]]);
        assert_eq!(f.sets(), &[s(&[0, 1]), s(&[1, 2]), s(&[3, 4])]);
        let dup = SetFamily::new(GroundSet::new(5).unwrap(), 2, vec![s(&[0, 1]), s(&[0, 1])]);
        assert!(matches!(dup, Err(Error::DuplicateSet(_))));
        let wrong = SetFamily::new(GroundSet::new(5).unwrap(), 2, vec![s(&[0, 1, 2])]);
        assert!(matches!(wrong, Err(Error::WrongCardinality { found: 3, .. })));
    }

    #[test]
    fn link_examples() {
        let f = fam(4, 2, &[&[1, 2], &[1, 3], &[2, 3]]);
        let l = f.link(&s(&[1])).unwrap();
        assert_eq!(l.k(), 1);
        assert_eq!(l.sets(), &[s(&[2]), s(&[3])]);

        let f = fam(6, 2, &[&[1, 2], &[3, 4]]);
        assert!(f.link(&s(&[5])).unwrap().is_empty());

        let f = fam(5, 3, &[&[1, 2, 3], &[1, 2, 4]]);
        let l = f.link(&s(&[1, 2])).unwrap();
        assert_eq!(l.sets(), &[s(&[3]), s(&[4])]);
    }

    #[test]
    fn link_errors() {
        let f = fam(4, 2, &[&[1, 2]]);
        assert!(matches!(f.link(&Subset::EMPTY), Err(Error::EmptyConditioningSet)));
        assert!(matches!(
            f.link(&s(&[0, 1, 2])),
            Err(Error::ConditioningSetTooLarge { t: 3, k: 2 })
        ));
    }

    #[test]
    fn disjoint_bruteforce_examples() {
        let f = fam(5, 2, &[&[1, 2], &[3, 4], &[1, 3]]);
        assert_eq!(f.disjoint_subfamily_bruteforce(2), Some(vec![s(&[1, 2]), s(&[3, 4])]));
        let star = fam(5, 2, &[&[1, 2], &[1, 3], &[1, 4]]);
        assert_eq!(star.disjoint_subfamily_bruteforce(2), None);
        assert_eq!(star.disjoint_subfamily_bruteforce(1), Some(vec![s(&[1, 2])]));
        assert_eq!(star.disjoint_subfamily_bruteforce(0), Some(vec![]));
    }

    #[test]
    fn json_loader_validation() {
        let ok = r#"{"ground_set_size": 4, "k": 2, "sets": [[2,3],[0,1]]}"#;
        let f = SetFamily::read_json(ok.as_bytes()).unwrap();
        assert_eq!(f.sets(), &[s(&[0, 1]), s(&[2, 3])]);
        assert_eq!(f.to_json_string(), r#"{"ground_set_size":4,"k":2,"sets":[[0,1],[2,3]]}"#);

        let dup = r#"{"ground_set_size": 4, "k": 2, "sets": [[0,1],[0,1]]}"#;
        assert!(matches!(SetFamily::read_json(dup.as_bytes()), Err(Error::DuplicateSet(_))));
        let card = r#"{"ground_set_size": 4, "k": 2, "sets": [[0,1,2]]}"#;
        assert!(matches!(SetFamily::read_json(card.as_bytes()), Err(Error::WrongCardinality { .. })));
        let unsorted = r#"{"ground_set_size": 4, "k": 2, "sets": [[1,0]]}"#;
        assert!(matches!(SetFamily::read_json(unsorted.as_bytes()), Err(Error::UnsortedElements(_))));
        let out = r#"{"ground_set_size": 4, "k": 2, "sets": [[1,9]]}"#;
        assert!(matches!(
            SetFamily::read_json(out.as_bytes()),
            Err(Error::ElementOutOfRange { element: 9, .. })
        ));
    }

    #[test]
    fn named_elements_are_reindexed() {
        let f = SetFamily::from_named_sets(2, &[vec!["a", "b"], vec!["b", "c"]]).unwrap();
        assert_eq!(f.ground().size(), 3);
        assert_eq!(f.names().unwrap(), &["a", "b", "c"]);
        assert_eq!(f.sets(), &[s(&[0, 1]), s(&[1, 2])]);
        let back = SetFamily::read_json(f.to_json_string().as_bytes()).unwrap();
        assert_eq!(back, f);
    }
}
