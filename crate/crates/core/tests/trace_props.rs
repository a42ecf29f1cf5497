mod common;

use common::{formula, props, trace, trace_set, PAST};
use ltlsep::ltl::eval_all;
use ltlsep::trace::{
    apply_future_point, enumerate_future_points, parse_traces, reverse_set, reverse_trace, suffix_g, suffix_x,
    write_traces, TraceSet,
};
use ltlsep::transforms::reverse_formula;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn closure_is_the_union_over_future_points(a in trace_set(props(2), 2, 4)) {
        let mut union = TraceSet::new();
        for f in enumerate_future_points(&a) {
            union = union.union(&apply_future_point(&a, &f).unwrap());
        }
        prop_assert_eq!(union, suffix_g(&a));
    }

    #[test]
    fn suffix_operators(a in trace_set(props(2), 4, 5), extra in trace_set(props(2), 3, 5)) {
        prop_assert!(suffix_x(&a).len() <= a.len());
        let g = suffix_g(&a);
        prop_assert!(a.is_subset(&g));
        prop_assert_eq!(suffix_g(&g), g.clone());
        let bigger = a.union(&extra);
        prop_assert!(g.is_subset(&suffix_g(&bigger)));
    }

    #[test]
    fn reversal_mirrors_positions(f in formula(props(2), PAST.to_vec(), false, 7), w in trace(props(2), 6)) {
        let r = reverse_formula(&f).unwrap();
        let fwd = eval_all(w.letters(), &f);
        let back = eval_all(reverse_trace(&w).letters(), &r);
        let n = w.len();
        for i in 0..n {
            prop_assert_eq!(fwd[i], back[n - 1 - i]);
        }
    }

    #[test]
    fn text_format_round_trips(a in trace_set(props(3), 5, 6)) {
        let mut buf = Vec::new();
        write_traces(&mut buf, &a).unwrap();
        let back = parse_traces(std::str::from_utf8(&buf).unwrap()).unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(reverse_set(&reverse_set(&a)), a);
    }
}
