#![allow(dead_code)]

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use ltlsep::ltl::{prop, Formula, Prop, Unary};
use ltlsep::trace::{Letter, Trace, TraceSet};

pub fn props(n: usize) -> Vec<Prop> {
    ["p", "q", "r", "s"][..n].iter().map(|s| prop(s)).collect()
}

pub fn letter(ap: Vec<Prop>) -> impl Strategy<Value = Letter> {
    proptest::sample::subsequence(ap.clone(), 0..=ap.len()).prop_map(Letter::new)
}

pub fn word(ap: Vec<Prop>, min: usize, max: usize) -> impl Strategy<Value = Vec<Letter>> {
    proptest::collection::vec(letter(ap), min..=max)
}

pub fn trace(ap: Vec<Prop>, max_len: usize) -> impl Strategy<Value = Trace> {
    word(ap, 1, max_len).prop_map(|w| Trace::new(w).unwrap())
}

pub fn trace_set(ap: Vec<Prop>, max_n: usize, max_len: usize) -> impl Strategy<Value = TraceSet> {
    proptest::collection::vec(trace(ap, max_len), 1..=max_n).prop_map(|v| v.into_iter().collect())
}

/// Formulas of size at most `max_size` built from literals, `∧`, `∨`, the
/// given unary operators and optionally `U`.
pub fn formula(ap: Vec<Prop>, unaries: Vec<Unary>, until: bool, max_size: usize) -> BoxedStrategy<Formula> {
    sized(ap, unaries, until, max_size).prop_filter("size", move |f| f.size() <= max_size).boxed()
}

fn sized(ap: Vec<Prop>, unaries: Vec<Unary>, until: bool, budget: usize) -> BoxedStrategy<Formula> {
    let lit = (proptest::sample::select(ap.clone()), any::<bool>()).prop_map(|(p, b)| Formula::Lit(p, b));
    if budget < 2 {
        return lit.boxed();
    }
    let mut options: Vec<BoxedStrategy<Formula>> = vec![lit.boxed()];
    if !unaries.is_empty() {
        let inner = sized(ap.clone(), unaries.clone(), until, budget - 1);
        options.push(
            (proptest::sample::select(unaries.clone()), inner).prop_map(|(u, f)| Formula::unary(u, f)).boxed(),
        );
    }
    if budget >= 3 {
        let half = (budget - 1) / 2;
        let left = sized(ap.clone(), unaries.clone(), until, half.max(1));
        let right = sized(ap.clone(), unaries.clone(), until, budget - 1 - half.max(1));
        let kinds = if until { 3 } else { 2 };
        options.push(
            (0..kinds, left, right)
                .prop_map(|(k, l, r)| match k {
                    0 => Formula::and(l, r),
                    1 => Formula::or(l, r),
                    _ => Formula::until(l, r),
                })
                .boxed(),
        );
    }
    proptest::strategy::Union::new(options).boxed()
}

pub const FUTURE: [Unary; 4] = [Unary::Next, Unary::WeakNext, Unary::Future, Unary::Globally];
pub const PAST: [Unary; 4] = [Unary::Yesterday, Unary::WeakYesterday, Unary::Once, Unary::Historically];
pub const XF: [Unary; 2] = [Unary::Next, Unary::Future];

/// Deterministic sampler for harness-free loops.
pub struct Sampler(TestRunner);

impl Sampler {
    pub fn new(seed: u64) -> Sampler {
        let mut bytes = [0u8; 32];
        bytes[..8].copy_from_slice(&seed.to_le_bytes());
        let rng = TestRng::from_seed(RngAlgorithm::ChaCha, &bytes);
        Sampler(TestRunner::new_with_rng(Config::default(), rng))
    }

    pub fn draw<S: Strategy>(&mut self, s: &S) -> S::Value {
        s.new_tree(&mut self.0).expect("strategy produces values").current()
    }
}

/// All words of length `1..=max_len` over `letters`.
pub fn all_words(letters: &[Letter], max_len: usize) -> Vec<Vec<Letter>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<Letter>> = vec![vec![]];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| {
                letters.iter().map(move |l| {
                    let mut w = w.clone();
                    w.push(l.clone());
                    w
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Maps `'a'` to `{p}` and anything else to the empty letter.
pub fn ab(words: &[&str]) -> TraceSet {
    words
        .iter()
        .map(|w| Trace::new(w.chars().map(|c| if c == 'a' { Letter::new([prop("p")]) } else { Letter::empty() }).collect()).unwrap())
        .collect()
}
