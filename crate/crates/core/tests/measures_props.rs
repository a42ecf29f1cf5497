mod common;

use common::{letter, props};
use ltlsep::instances::{build_ab, count_c, FamilyParams};
use ltlsep::ltl::Fragment;
use ltlsep::measures::{bound_v1, check_axioms, delta1, delta1_masks, measure_bound_v1, MeasureAxioms, Rational};
use ltlsep::proof::{min_search, SearchConfig};
use ltlsep::trace::{Trace, TraceSet};
use proptest::prelude::*;

fn letters_set(max: usize) -> impl Strategy<Value = TraceSet> {
    proptest::collection::vec(letter(props(3)), 1..=max)
        .prop_map(|v| v.into_iter().map(|l| Trace::new(vec![l]).unwrap()).collect())
}

fn disjoint_pair() -> impl Strategy<Value = (TraceSet, TraceSet)> {
    (letters_set(4), letters_set(4)).prop_filter("disjoint", |(a, b)| !a.intersects(b))
}

fn ceil(r: Rational) -> usize {
    r.ceil().to_integer() as usize
}

fn masks(set: &TraceSet) -> Vec<u64> {
    let names = props(3);
    set.iter()
        .map(|s| names.iter().enumerate().filter(|(_, p)| s.first().contains(p)).map(|(i, _)| 1 << i).sum())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn delta1_bound_is_admissible((a, b) in disjoint_pair()) {
        let d = delta1(&a, &b).unwrap();
        prop_assert_eq!(d, delta1_masks(&masks(&a), &masks(&b)));
        let bound = measure_bound_v1(&a, &b, Rational::from(d)).unwrap();
        prop_assert_eq!(bound, bound_v1(d, a.len(), b.len()));
        let found = min_search(&a, &b, &SearchConfig::new(Fragment::PROP, 30)).unwrap();
        prop_assert!(found.size >= ceil(bound), "size {} below bound {}", found.size, bound);
    }

    #[test]
    fn pruning_keeps_minimum_sizes((a, b) in disjoint_pair()) {
        let plain = min_search(&a, &b, &SearchConfig::new(Fragment::PROP, 30)).unwrap();
        let pruned = min_search(&a, &b, &SearchConfig::new(Fragment::PROP, 30).with_pruning(true)).unwrap();
        prop_assert_eq!(plain.size, pruned.size);
    }

    #[test]
    fn delta1_satisfies_the_axioms((a, b) in disjoint_pair(), seed in any::<u64>()) {
        let mu = |x: &TraceSet, y: &TraceSet| Rational::from(delta1(x, y).unwrap());
        let report = check_axioms(&mu, MeasureAxioms::V1, &a, &b, 20, seed);
        prop_assert!(report.ok(), "{:?}", report.violations);
    }
}

#[test]
fn related_pair_count_is_a_measure_on_the_family() {
    let (a, b) = build_ab(&FamilyParams::new(2).unwrap());
    let mu = |x: &TraceSet, y: &TraceSet| Rational::from(count_c(x, y, 2) as u64 + 1);
    assert_eq!(mu(&a, &b), Rational::from(5));
    let (a, b) = build_ab(&FamilyParams::new(2).unwrap().with_prefixes(vec![0, 1]));
    let report = check_axioms(&mu, MeasureAxioms::V2, &a, &b, 100, 6);
    assert!(report.ok(), "{:?}", report.violations);
}
