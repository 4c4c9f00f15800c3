use proptest::prelude::*;

use sunflower::constructions::{block_product_family, lemma3_regime_check, tightness_chain};
use sunflower::engine::{
    exact_hit_probability, hit_probability_enumeration, hit_probability_inclusion_exclusion, HitProfile,
};
use sunflower::extraction::{extract_sunflower, r_threshold, spread_case_search, ExtractionParams};
use sunflower::spread::{spread_bound, spread_witness, spreadness, superset_count};
use sunflower::sunflower::find_sunflower_naive;
use sunflower::{is_sunflower, GroundSet, SetFamily, Subset};

/// Random `k`-uniform family on `n` elements with up to `max_sets` members.
fn family_strategy(max_n: usize, max_k: usize, max_sets: usize) -> impl Strategy<Value = SetFamily> {
    (2..=max_n).prop_flat_map(move |n| {
        (1..=max_k.min(n)).prop_flat_map(move |k| {
            let set = proptest::sample::subsequence((0..n).collect::<Vec<_>>(), k)
                .prop_map(|v| Subset::from_elements(v));
            proptest::collection::vec(set, 1..=max_sets).prop_map(move |sets| {
                SetFamily::from_sets_dedup(GroundSet::new(n).unwrap(), k, sets).unwrap()
            })
        })
    })
}

/// Naive spreadness check over every non-empty `T` of the ground set.
fn naive_is_spread(family: &SetFamily, r: f64) -> bool {
    let n = family.ground().size();
    let k = family.k();
    (1u64..1 << n).all(|mask| {
        let t = Subset::from_u64(mask);
        if t.len() > k {
            return true;
        }
        let count = family.sets().iter().filter(|s| t.is_subset_of(s)).count();
        count as f64 <= spread_bound(r, k - t.len())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sunflower_core_is_total_intersection(f in family_strategy(10, 4, 8)) {
        let sets = f.sets();
        for size in 2..=sets.len().min(4) {
            let chosen = &sets[..size];
            if let Some(sf) = is_sunflower(chosen).unwrap() {
                let all = chosen.iter().skip(1).fold(chosen[0], |a, s| a.intersection(s));
                prop_assert_eq!(sf.core, all);
            }
        }
    }

    #[test]
    fn any_two_distinct_sets_are_a_sunflower(f in family_strategy(10, 4, 8)) {
        prop_assume!(f.len() >= 2);
        let pair = [f.sets()[0], f.sets()[f.len() - 1]];
        prop_assert!(is_sunflower(&pair).unwrap().is_some());
    }

    #[test]
    fn link_counts_and_round_trip(f in family_strategy(10, 4, 10), pick in 0usize..64) {
        let s = f.sets()[pick % f.len()];
        for t in s.nonempty_subsets() {
            let link = f.link(&t).unwrap();
            prop_assert_eq!(link.len(), superset_count(&f, &t).unwrap());
            prop_assert_eq!(link.k(), f.k() - t.len());
            for m in link.sets() {
                prop_assert!(f.contains(&m.union(&t)));
            }
        }
    }

    #[test]
    fn witness_agrees_with_spreadness_and_naive(f in family_strategy(12, 4, 10), r in 0.5f64..6.0) {
        prop_assume!(f.k() >= 2);
        let rep = spread_witness(&f, r).unwrap();
        let s = spreadness(&f).unwrap();
        prop_assert_eq!(rep.is_certified(), s <= r);
        prop_assert_eq!(rep.is_certified(), naive_is_spread(&f, r));
        // the spreadness value itself certifies
        prop_assert!(spread_witness(&f, s).unwrap().is_certified());
        if let Some((t, count)) = rep.violation() {
            prop_assert_eq!(superset_count(&f, t).unwrap(), count);
            prop_assert!(count as f64 > spread_bound(r, f.k() - t.len()));
        }
    }

    #[test]
    fn certification_is_monotone(f in family_strategy(12, 4, 10), r in 0.5f64..6.0, dr in 0.0f64..4.0) {
        if spread_witness(&f, r).unwrap().is_certified() {
            prop_assert!(spread_witness(&f, r + dr).unwrap().is_certified());
        }
    }

    #[test]
    fn exact_routes_agree(f in family_strategy(12, 4, 12), delta in 0.01f64..0.99) {
        let a = hit_probability_enumeration(&f, delta).unwrap();
        let b = hit_probability_inclusion_exclusion(&f, delta).unwrap();
        prop_assert!((a - b).abs() <= 1e-12, "{} vs {}", a, b);
    }

    #[test]
    fn hit_probability_monotone_in_delta(f in family_strategy(12, 4, 12)) {
        let profile = HitProfile::new(&f).unwrap();
        let grid: Vec<f64> = (1..50).map(|i| i as f64 / 50.0).collect();
        let values: Vec<f64> = grid.iter().map(|&d| profile.probability(d)).collect();
        for w in values.windows(2) {
            prop_assert!(w[0] <= w[1] + 1e-15);
        }
        let uniform: Vec<f64> = (0..=profile.ground_size()).map(|m| profile.uniform_probability(m)).collect();
        for w in uniform.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn extraction_is_sound(f in family_strategy(12, 4, 12), p in 2usize..5, seed in any::<u64>()) {
        let params = ExtractionParams::new(p).with_seed(seed);
        let trace = extract_sunflower(&f, &params).unwrap();
        if let Some(sf) = &trace.result {
            prop_assert!(sf.verify());
            prop_assert_eq!(sf.num_petals(), p);
            for petal in &sf.petals {
                prop_assert!(f.contains(petal));
            }
        }
        if find_sunflower_naive(&f, p).is_some() {
            prop_assert!(trace.result.is_some());
        }
        for step in &trace.path {
            if let sunflower::extraction::Step::LinkCase { t, count, r, k } = step {
                prop_assert!(*count as f64 > spread_bound(*r, *k - t.len()));
            }
        }
    }

    #[test]
    fn spread_case_output_is_disjoint(f in family_strategy(14, 3, 14), p in 2usize..4, seed in any::<u64>()) {
        if let Some(sets) = spread_case_search(&f, p, 16, seed) {
            prop_assert_eq!(sets.len(), p);
            for (i, a) in sets.iter().enumerate() {
                prop_assert!(f.contains(a));
                for b in &sets[i + 1..] {
                    prop_assert!(a.is_disjoint(b));
                }
            }
        }
    }

    #[test]
    fn json_round_trip(f in family_strategy(20, 5, 12)) {
        let back = SetFamily::read_json(f.to_json_string().as_bytes()).unwrap();
        prop_assert_eq!(back, f);
    }
}

#[test]
fn threshold_is_monotone_in_k() {
    for p in 2..=10 {
        for c in [4.0, 4.5, 8.0, 100.0] {
            for k in 1..=64 {
                for k2 in 1..=k {
                    assert!(r_threshold(p, k2, c) <= r_threshold(p, k, c), "p={p} c={c} k'={k2} k={k}");
                }
            }
        }
    }
}

#[test]
fn block_products_are_exactly_r_spread() {
    for k in 1..=16usize {
        for r in 1..=16 / k {
            let (f, part) = block_product_family(k, r).unwrap();
            assert_eq!(f.len(), r.pow(k as u32));
            if k >= 2 {
                assert_eq!(spreadness(&f).unwrap(), r as f64, "k={k} r={r}");
            }
            // partial transversals have count r^(k-|T|); anything else is 0
            for s in f.sets().iter().take(4) {
                for t in s.nonempty_subsets() {
                    assert_eq!(
                        superset_count(&f, &t).unwrap(),
                        r.pow((k - t.len()) as u32),
                        "k={k} r={r} t={t}"
                    );
                }
            }
            if r >= 2 && k >= 1 {
                let same_block = Subset::from_elements([part.block_range(0).start, part.block_range(0).start + 1]);
                if k >= 2 {
                    assert_eq!(superset_count(&f, &same_block).unwrap(), 0);
                }
            }
        }
    }
}

#[test]
fn tightness_chain_holds_whenever_regime_does() {
    for k in 1..=40usize {
        for &delta in &[0.05, 0.1, 0.25, 0.4, 0.5] {
            for &eps in &[0.01, 0.1, 0.25, 0.5] {
                for r in 1..=200usize {
                    if !lemma3_regime_check(k, r, delta, eps).unwrap() {
                        break;
                    }
                    let c = tightness_chain(k, r, delta, eps).unwrap();
                    assert!(c.holds(), "{c:?}");
                }
            }
        }
    }
}

#[test]
fn exact_matches_closed_form_on_small_block_products() {
    for k in 1..=4usize {
        for r in 1..=4usize {
            let (f, _) = block_product_family(k, r).unwrap();
            for &d in &[0.1, 0.25, 0.5, 0.8] {
                let exact = exact_hit_probability(&f, d).unwrap().p_hat;
                let closed = sunflower::constructions::exact_block_hit_probability(k, r, d).unwrap();
                assert!((exact - closed).abs() < 1e-12);
            }
        }
    }
}
