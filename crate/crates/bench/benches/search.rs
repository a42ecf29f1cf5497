use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use ltlsep::automata::{dfa_from_formula, gf_close, trap_close};
use ltlsep::instances::{build_ab, FamilyParams};
use ltlsep::measures::parity_instance;
use ltlsep::trace::parse_traces;
use ltlsep::{min_search, parse_formula, Fragment, SearchConfig, TraceSet};

fn set(text: &str) -> TraceSet {
    parse_traces(text).unwrap()
}

fn search(c: &mut Criterion) {
    let mut g = c.benchmark_group("min_search");
    g.sample_size(10);
    let cases = [
        ("small", "p;-;p;p\np;p;p;p", "p;p;p;-"),
        ("three_by_three", "-;-;p;-\np;-;q\np,q;p,q;p;p", "-;-;-\n-;p\n-;q;p;-"),
    ];
    for (name, a, b) in cases {
        let (a, b) = (set(a), set(b));
        for frag in [Fragment::XF, Fragment::XWXFG, Fragment::COSAFETY_U] {
            let cfg = SearchConfig::new(frag, 12);
            g.bench_with_input(BenchmarkId::new(frag.name(), name), &(&a, &b), |bch, (a, b)| {
                bch.iter(|| min_search(a, b, &cfg))
            });
        }
    }
    g.finish();
}

fn parity(c: &mut Criterion) {
    let inst = parity_instance(3);
    let mut g = c.benchmark_group("parity3");
    g.sample_size(10);
    for pruning in [false, true] {
        let cfg = SearchConfig::new(Fragment::PROP, 40).with_pruning(pruning);
        g.bench_function(if pruning { "pruned" } else { "plain" }, |b| b.iter(|| min_search(&inst.a, &inst.b, &cfg)));
    }
    g.finish();
}

fn automata(c: &mut Criterion) {
    let ap = parse_formula("p & q & r").unwrap().props();
    let f = parse_formula("F(p & X(q | F r)) & G(!r | X p)").unwrap();
    c.bench_function("dfa_from_formula", |b| b.iter(|| dfa_from_formula(black_box(&f), &ap)));
    let psi = parse_formula("F(p & X F(q & X r))").unwrap();
    c.bench_function("gf_close", |b| {
        b.iter(|| gf_close(&trap_close(&dfa_from_formula(black_box(&psi), &ap).unwrap())))
    });
}

fn family(c: &mut Criterion) {
    c.bench_function("build_ab_n4", |b| b.iter(|| build_ab(&FamilyParams::new(black_box(4)).unwrap())));
}

criterion_group!(benches, search, parity, automata, family);
criterion_main!(benches);
