mod common;

use common::{formula, props, word, FUTURE, PAST};
use ltlsep::ltl::{eval, eval_lasso, parse_formula, Formula, Unary};
use ltlsep::trace::Letter;
use proptest::prelude::*;

fn all_unaries() -> Vec<Unary> {
    FUTURE.iter().chain(PAST.iter()).copied().collect()
}

// Direct reading of the semantics with explicit position quantifiers.
fn holds(w: &[Letter], i: usize, f: &Formula) -> bool {
    let n = w.len();
    match f {
        Formula::Lit(p, pos) => w[i].contains(p) == *pos,
        Formula::Or(l, r) => holds(w, i, l) || holds(w, i, r),
        Formula::And(l, r) => holds(w, i, l) && holds(w, i, r),
        Formula::Until(l, r) => (i..n).any(|j| holds(w, j, r) && (i..j).all(|k| holds(w, k, l))),
        Formula::Unary(u, g) => match u {
            Unary::Next => i + 1 < n && holds(w, i + 1, g),
            Unary::WeakNext => i + 1 >= n || holds(w, i + 1, g),
            Unary::Future => (i..n).any(|j| holds(w, j, g)),
            Unary::Globally => (i..n).all(|j| holds(w, j, g)),
            Unary::Yesterday => i > 0 && holds(w, i - 1, g),
            Unary::WeakYesterday => i == 0 || holds(w, i - 1, g),
            Unary::Once => (0..=i).any(|j| holds(w, j, g)),
            Unary::Historically => (0..=i).all(|j| holds(w, j, g)),
        },
    }
}

fn node_count(f: &Formula) -> usize {
    let mut n = 0;
    f.visit(&mut |_| n += 1);
    n
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn evaluator_matches_positional_semantics(
        f in formula(props(2), all_unaries(), true, 7),
        w in word(props(2), 1, 6),
    ) {
        for i in 0..w.len() {
            prop_assert_eq!(eval(&w, i, &f).unwrap(), holds(&w, i, &f), "{} at {}", f, i);
        }
    }

    #[test]
    fn size_counts_nodes_and_printing_round_trips(f in formula(props(3), all_unaries(), true, 9)) {
        prop_assert!(f.size() >= 1);
        prop_assert_eq!(f.size(), node_count(&f));
        let text = f.to_string();
        prop_assert_eq!(parse_formula(&text).unwrap(), f, "{}", text);
    }

    #[test]
    fn lasso_unrolling_is_invisible(
        f in formula(props(2), FUTURE.to_vec(), true, 7),
        u in word(props(2), 0, 3),
        v in word(props(2), 1, 3),
    ) {
        let mut uv = u.clone();
        uv.extend(v.iter().cloned());
        prop_assert_eq!(eval_lasso(&u, &v, &f).unwrap(), eval_lasso(&uv, &v, &f).unwrap());
    }
}
