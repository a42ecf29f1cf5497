use std::collections::HashSet;
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};
use std::sync::Mutex;

use dashmap::DashMap;
use rayon::prelude::*;

use super::{proposition_universe, DeductionTree, RuleApp, SepInstance};
use crate::ltl::{Fragment, Op, OpSet, Prop};
use crate::measures;
use crate::trace::{suffix_g, FuturePoint, SuffixRef, TraceSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchMode {
    /// Fixed rule and split order; the witness is reproducible.
    #[default]
    Sequential,
    /// Alternatives near the root are explored on the rayon pool. The size
    /// is still exact; the witness may differ between runs.
    Parallel,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub fragment: Fragment,
    /// Largest tree size the search will consider.
    pub budget: usize,
    pub mode: SearchMode,
    /// Prune with the Hamming-distance measure bound (propositional fragment only).
    pub measure_pruning: bool,
    /// Propositions usable in literals besides those occurring in the traces.
    pub extra_props: Vec<Prop>,
}

impl SearchConfig {
    pub fn new(fragment: Fragment, budget: usize) -> SearchConfig {
        SearchConfig {
            fragment,
            budget,
            mode: SearchMode::Sequential,
            measure_pruning: false,
            extra_props: Vec::new(),
        }
    }

    pub fn parallel(mut self) -> Self {
        self.mode = SearchMode::Parallel;
        self
    }

    pub fn with_pruning(mut self, on: bool) -> Self {
        self.measure_pruning = on;
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Calls that got past the memo table.
    pub expanded: u64,
    pub memo_entries: usize,
    /// Subtrees cut by the measure bound.
    pub measure_cuts: u64,
}

#[derive(Debug, Clone)]
pub struct Found {
    pub size: usize,
    pub tree: DeductionTree,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("unseparable: {0}")]
    Unseparable(String),
    #[error("no separating tree of size <= {budget}")]
    BudgetExceeded { budget: usize },
    #[error("the proof system has no rules for fragment {0}")]
    UnsupportedFragment(Fragment),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Separability {
    Separable,
    Unseparable(String),
    Unknown,
}

/// Decides separability without search where a pairwise criterion is known.
/// Separation only needs every pair `(a, b)` to be separable, since the
/// pairwise separators combine as a disjunction of conjunctions.
pub fn decide_separability(a: &TraceSet, b: &TraceSet, fragment: &Fragment) -> Separability {
    if let Some(s) = a.iter().find(|s| b.contains(s)) {
        return Separability::Unseparable(format!("A ∩ B nonempty (shared trace {s})"));
    }
    let ops = fragment.ops;
    let pairs = || a.iter().flat_map(|x| b.iter().map(move |y| (x, y)));
    if !ops.intersects(OpSet::FUTURE) {
        // Without future operators only the first letter is visible.
        return match pairs().find(|(x, y)| x.first() == y.first()) {
            Some((x, y)) => Separability::Unseparable(format!("{x} and {y} share their first letter")),
            None => Separability::Separable,
        };
    }
    if fragment.top_future {
        return Separability::Unknown;
    }
    if ops.contains(Op::X) && ops.contains(Op::WX) {
        return Separability::Separable;
    }
    // X, F and U formulas true on a word stay true on its extensions.
    if ops.contains(Op::X) && ops.is_subset(OpSet::of(&[Op::X, Op::F, Op::U])) {
        return match pairs().find(|(x, y)| x.is_prefix_of(y)) {
            Some((x, y)) => Separability::Unseparable(format!("{x} is a prefix of {y}")),
            None => Separability::Separable,
        };
    }
    // Dually, wX and G formulas false on a word stay false on its extensions.
    if ops.contains(Op::WX) && ops.is_subset(OpSet::of(&[Op::WX, Op::G])) {
        return match pairs().find(|(x, y)| y.is_prefix_of(x)) {
            Some((x, y)) => Separability::Unseparable(format!("{y} is a prefix of {x}")),
            None => Separability::Separable,
        };
    }
    Separability::Unknown
}

/// A size that always suffices when `{X, wX}` is available: the disjunction
/// over `a ∈ A` of the characteristic formula of `a`, which costs
/// `|a|(2|AP|+1)+3` nodes.
pub fn sufficient_budget(a: &TraceSet, b: &TraceSet) -> usize {
    let ap = proposition_universe(a, b, &[]).len();
    let sum: usize = a.iter().map(|s| s.len() * (2 * ap + 1) + 3).sum();
    (sum + a.len()).saturating_sub(1).max(1)
}

/// Exact minimum tree size for `<A, B>` in `cfg.fragment`, with a witness.
pub fn min_search(a: &TraceSet, b: &TraceSet, cfg: &SearchConfig) -> Result<Found, SearchError> {
    if cfg.fragment.top_future || cfg.fragment.ops.intersects(OpSet::PAST) {
        return Err(SearchError::UnsupportedFragment(cfg.fragment));
    }
    if let Separability::Unseparable(why) = decide_separability(a, b, &cfg.fragment) {
        return Err(SearchError::Unseparable(why));
    }
    let engine = Engine::new(a, b, cfg);
    let root = (engine.ids(a), engine.ids(b));
    for limit in 1..=cfg.budget as u32 {
        if let Some(size) = engine.best(&root, limit, 0) {
            let tree = engine.rebuild(&root);
            debug_assert_eq!(tree.size(), size as usize);
            let stats = SearchStats {
                expanded: engine.expanded.load(Ordering::Relaxed),
                memo_entries: engine.memo.len(),
                measure_cuts: engine.cuts.load(Ordering::Relaxed),
            };
            return Ok(Found {
                size: size as usize,
                tree,
                stats,
            });
        }
    }
    Err(SearchError::BudgetExceeded { budget: cfg.budget })
}

/// Fixed-width bitset over the suffix arena.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Bits(Box<[u64]>);

impl Bits {
    fn zero(words: usize) -> Bits {
        Bits(vec![0; words].into_boxed_slice())
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn union_with(&mut self, o: &Bits) {
        for (x, y) in self.0.iter_mut().zip(o.0.iter()) {
            *x |= y;
        }
    }

    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    fn is_subset(&self, o: &Bits) -> bool {
        self.0.iter().zip(o.0.iter()).all(|(x, y)| x & !y == 0)
    }

    fn is_disjoint(&self, o: &Bits) -> bool {
        self.0.iter().zip(o.0.iter()).all(|(x, y)| x & y == 0)
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let t = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * 64 + t)
            })
        })
    }
}

type Key = (Bits, Bits);

#[derive(Clone)]
enum Kind {
    Atomic(usize),
    Next,
    WeakNext,
    Future(Vec<usize>),
    Globally(Vec<usize>),
    Or,
    And,
    Until(Vec<usize>, Vec<usize>),
}

#[derive(Clone)]
struct Alt {
    kind: Kind,
    children: Vec<Key>,
}

#[derive(Clone, Default)]
struct Entry {
    /// The minimum is known to be at least this.
    lb: u32,
    exact: Option<(u32, Alt)>,
}

struct Engine {
    suffixes: Vec<SuffixRef>,
    next: Vec<Option<usize>>,
    closure: Vec<Bits>,
    words: usize,
    lits: Vec<(Prop, bool, Bits)>,
    // First-letter proposition masks, for the measure bound.
    masks: Option<Vec<u64>>,
    ops: OpSet,
    parallel: bool,
    memo: DashMap<Key, Entry>,
    expanded: AtomicU64,
    cuts: AtomicU64,
}

// Depth below which parallel mode fans out.
const PAR_DEPTH: usize = 2;

impl Engine {
    fn new(a: &TraceSet, b: &TraceSet, cfg: &SearchConfig) -> Engine {
        let all = suffix_g(&a.union(b));
        let suffixes: Vec<SuffixRef> = all.iter().cloned().collect();
        let n = suffixes.len();
        let words = n.div_ceil(64).max(1);
        let next: Vec<Option<usize>> = suffixes
            .iter()
            .map(|s| s.shift(1).map(|t| all.position(&t).expect("suffix-closed")))
            .collect();
        // Shorter suffixes first so each closure can reuse its successor's.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| suffixes[i].len());
        let mut closure = vec![Bits::zero(words); n];
        for i in order {
            let mut c = match next[i] {
                Some(j) => closure[j].clone(),
                None => Bits::zero(words),
            };
            c.insert(i);
            closure[i] = c;
        }
        let universe = proposition_universe(a, b, &cfg.extra_props);
        let mut lits = Vec::new();
        for p in &universe {
            for pos in [true, false] {
                let mut bits = Bits::zero(words);
                for (i, s) in suffixes.iter().enumerate() {
                    if s.first().contains(p) == pos {
                        bits.insert(i);
                    }
                }
                lits.push((p.clone(), pos, bits));
            }
        }
        let masks = (cfg.measure_pruning && cfg.fragment.ops == OpSet::EMPTY && universe.len() <= 64).then(|| {
            suffixes
                .iter()
                .map(|s| {
                    universe
                        .iter()
                        .enumerate()
                        .filter(|(_, p)| s.first().contains(p))
                        .fold(0u64, |m, (k, _)| m | 1 << k)
                })
                .collect()
        });
        Engine {
            suffixes,
            next,
            closure,
            words,
            lits,
            masks,
            ops: cfg.fragment.ops,
            parallel: cfg.mode == SearchMode::Parallel,
            memo: DashMap::new(),
            expanded: AtomicU64::new(0),
            cuts: AtomicU64::new(0),
        }
    }

    fn ids(&self, set: &TraceSet) -> Bits {
        let mut bits = Bits::zero(self.words);
        for s in set {
            let i = self.suffixes.binary_search(s).expect("member of the arena");
            bits.insert(i);
        }
        bits
    }

    fn set(&self, bits: &Bits) -> TraceSet {
        bits.ones().map(|i| self.suffixes[i].clone()).collect()
    }

    fn len(&self, i: usize) -> usize {
        self.suffixes[i].len()
    }

    /// The exact minimum for `key` if it is at most `limit`.
    fn best(&self, key: &Key, limit: u32, depth: usize) -> Option<u32> {
        if limit == 0 {
            return None;
        }
        if let Some(e) = self.memo.get(key) {
            if let Some((s, _)) = &e.exact {
                return (*s <= limit).then_some(*s);
            }
            if e.lb > limit {
                return None;
            }
        }
        self.expanded.fetch_add(1, Ordering::Relaxed);
        let (a, b) = key;
        if let Some(i) = self.lits.iter().position(|(_, _, l)| a.is_subset(l) && b.is_disjoint(l)) {
            self.store_exact(key, 1, Alt { kind: Kind::Atomic(i), children: vec![] });
            return Some(1);
        }
        if limit < 2 {
            self.store_lb(key, 2);
            return None;
        }
        if let Some(lb) = self.measure_bound(a, b) {
            if lb > limit {
                self.cuts.fetch_add(1, Ordering::Relaxed);
                self.store_lb(key, lb);
                return None;
            }
        }
        let alts = self.alternatives(a, b);
        let found = if self.parallel && depth < PAR_DEPTH {
            self.scan_parallel(&alts, limit, depth)
        } else {
            self.scan(&alts, limit, depth)
        };
        match found {
            Some((size, idx)) => {
                self.store_exact(key, size, alts[idx].clone());
                Some(size)
            }
            None => {
                self.store_lb(key, limit + 1);
                None
            }
        }
    }

    // Size of `alt` if it is below `bound`.
    fn try_alt(&self, alt: &Alt, bound: u32, depth: usize) -> Option<u32> {
        match alt.children.as_slice() {
            [c] => {
                let s = self.best(c, bound.checked_sub(2)?, depth + 1)?;
                Some(1 + s)
            }
            [c1, c2] => {
                let s1 = self.best(c1, bound.checked_sub(3)?, depth + 1)?;
                let s2 = self.best(c2, bound.checked_sub(2 + s1)?, depth + 1)?;
                Some(1 + s1 + s2)
            }
            _ => unreachable!("alternatives have one or two children"),
        }
    }

    fn scan(&self, alts: &[Alt], limit: u32, depth: usize) -> Option<(u32, usize)> {
        let mut bound = limit + 1;
        let mut best = None;
        for (i, alt) in alts.iter().enumerate() {
            if let Some(s) = self.try_alt(alt, bound, depth) {
                bound = s;
                best = Some((s, i));
                if s == 2 {
                    break;
                }
            }
        }
        best
    }

    fn scan_parallel(&self, alts: &[Alt], limit: u32, depth: usize) -> Option<(u32, usize)> {
        let bound = AtomicU32::new(limit + 1);
        let best: Mutex<Option<(u32, usize)>> = Mutex::new(None);
        alts.par_iter().enumerate().for_each(|(i, alt)| {
            let cur = bound.load(Ordering::Relaxed);
            if cur <= 2 {
                return;
            }
            if let Some(s) = self.try_alt(alt, cur, depth) {
                bound.fetch_min(s, Ordering::Relaxed);
                let mut g = best.lock().expect("no panics while held");
                if g.is_none_or(|(bs, bi)| (s, i) < (bs, bi)) {
                    *g = Some((s, i));
                }
            }
        });
        best.into_inner().expect("no panics while held")
    }

    fn store_exact(&self, key: &Key, size: u32, alt: Alt) {
        let mut e = self.memo.entry(key.clone()).or_default();
        if e.exact.as_ref().is_none_or(|(s, _)| size < *s) {
            e.exact = Some((size, alt));
        }
        e.lb = e.lb.max(size);
    }

    fn store_lb(&self, key: &Key, lb: u32) {
        let mut e = self.memo.entry(key.clone()).or_default();
        e.lb = e.lb.max(lb);
    }

    fn measure_bound(&self, a: &Bits, b: &Bits) -> Option<u32> {
        let masks = self.masks.as_ref()?;
        let mut la: Vec<u64> = a.ones().map(|i| masks[i]).collect();
        let mut lb: Vec<u64> = b.ones().map(|i| masks[i]).collect();
        la.sort_unstable();
        la.dedup();
        lb.sort_unstable();
        lb.dedup();
        if la.is_empty() || lb.is_empty() {
            return None;
        }
        let bound = measures::bound_v1(measures::delta1_masks(&la, &lb), la.len(), lb.len());
        Some(num_integer::Integer::div_ceil(bound.numer(), bound.denom()) as u32)
    }

    fn alternatives(&self, a: &Bits, b: &Bits) -> Vec<Alt> {
        let mut out = Vec::new();
        let parent = (a.clone(), b.clone());
        let mut push = |kind: Kind, children: Vec<Key>| {
            if children.iter().all(|(x, y)| x.is_disjoint(y) && (x, y) != (&parent.0, &parent.1)) {
                out.push(Alt { kind, children });
            }
        };
        let am: Vec<usize> = a.ones().collect();
        let bm: Vec<usize> = b.ones().collect();
        let step = |ids: &[usize]| {
            let mut s = Bits::zero(self.words);
            for &i in ids {
                if let Some(j) = self.next[i] {
                    s.insert(j);
                }
            }
            s
        };
        if self.ops.contains(Op::X) && am.iter().all(|&i| self.next[i].is_some()) {
            push(Kind::Next, vec![(step(&am), step(&bm))]);
        }
        if self.ops.contains(Op::WX) && bm.iter().all(|&i| self.next[i].is_some()) {
            push(Kind::WeakNext, vec![(step(&am), step(&bm))]);
        }
        if self.ops.contains(Op::F) {
            let bg = self.close(&bm);
            for (set, fp) in self.future_sets(&am, &bg) {
                push(Kind::Future(fp), vec![(set, bg.clone())]);
            }
        }
        if self.ops.contains(Op::G) {
            let ag = self.close(&am);
            for (set, gp) in self.future_sets(&bm, &ag) {
                push(Kind::Globally(gp), vec![(ag.clone(), set)]);
            }
        }
        for (p1, p2) in self.splits(&am) {
            push(Kind::Or, vec![(p1, b.clone()), (p2, b.clone())]);
        }
        for (p1, p2) in self.splits(&bm) {
            push(Kind::And, vec![(a.clone(), p1), (a.clone(), p2)]);
        }
        if self.ops.contains(Op::U) {
            for (kind, c1, c2) in self.until_alternatives(&am, &bm) {
                push(kind, vec![c1, c2]);
            }
        }
        out
    }

    fn close(&self, ids: &[usize]) -> Bits {
        let mut s = Bits::zero(self.words);
        for &i in ids {
            s.union_with(&self.closure[i]);
        }
        s
    }

    // Inclusion-minimal images of `members` under future points that avoid
    // `blocked`, each with a future point producing it. A larger image only
    // makes the child harder, so the others are never needed.
    fn future_sets(&self, members: &[usize], blocked: &Bits) -> Vec<(Bits, Vec<usize>)> {
        let options: Vec<Vec<Pick>> = members
            .iter()
            .map(|&i| {
                self.closure[i]
                    .ones()
                    .filter(|j| !blocked.contains(*j))
                    .map(|j| Pick {
                        x: self.single(j),
                        y: Bits::zero(self.words),
                        tag: self.len(i) - self.len(j),
                    })
                    .collect()
            })
            .collect();
        self.minimal_products(&options).into_iter().map(|c| (c.x, c.tags)).collect()
    }

    fn single(&self, i: usize) -> Bits {
        let mut b = Bits::zero(self.words);
        b.insert(i);
        b
    }

    fn span(&self, ids: &[usize]) -> Bits {
        let mut b = Bits::zero(self.words);
        for &i in ids {
            b.insert(i);
        }
        b
    }

    // Unions of one pick per member, keeping only choices whose `(x, y)` is
    // not a componentwise superset of another's.
    fn minimal_products(&self, options: &[Vec<Pick>]) -> Vec<Combo> {
        let mut states = vec![Combo {
            x: Bits::zero(self.words),
            y: Bits::zero(self.words),
            tags: vec![],
        }];
        for opts in options {
            let mut next = Vec::with_capacity(states.len() * opts.len());
            for st in &states {
                for o in opts {
                    let mut x = st.x.clone();
                    x.union_with(&o.x);
                    let mut y = st.y.clone();
                    y.union_with(&o.y);
                    let mut tags = st.tags.clone();
                    tags.push(o.tag);
                    next.push(Combo { x, y, tags });
                }
            }
            states = antichain(next);
            if states.is_empty() {
                break;
            }
        }
        states
    }

    // Binary partitions with both parts nonempty; the least member stays left.
    fn splits(&self, members: &[usize]) -> Vec<(Bits, Bits)> {
        let k = members.len();
        if !(2..=20).contains(&k) {
            return vec![];
        }
        (1u32..(1 << (k - 1)))
            .map(|mask| {
                let mut p1 = Bits::zero(self.words);
                let mut p2 = Bits::zero(self.words);
                p1.insert(members[0]);
                for (j, &m) in members[1..].iter().enumerate() {
                    if mask >> j & 1 == 1 {
                        p2.insert(m);
                    } else {
                        p1.insert(m);
                    }
                }
                (p1, p2)
            })
            .collect()
    }

    fn until_alternatives(&self, am: &[usize], bm: &[usize]) -> Vec<(Kind, Key, Key)> {
        // Position k of member i is the suffix `walk[i][k]`.
        let walk = |i: usize| {
            let mut v = vec![i];
            while let Some(j) = self.next[*v.last().expect("nonempty")] {
                v.push(j);
            }
            v
        };
        let bset = self.span(bm);
        let bw: Vec<Vec<usize>> = bm.iter().map(|&i| walk(i)).collect();
        // `f(a)` never lands on a member of B: every `b` is in its own prefix up to `g(b)`.
        let a_opts: Vec<Vec<Pick>> = am
            .iter()
            .map(|&i| {
                let w = walk(i);
                (0..w.len())
                    .filter(|&k| !bset.contains(w[k]))
                    .map(|k| Pick {
                        x: self.span(&w[..k]),
                        y: self.single(w[k]),
                        tag: k,
                    })
                    .collect()
            })
            .collect();
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for fa in self.minimal_products(&a_opts) {
            let (before_f, at_f) = (&fa.x, &fa.y);
            let b_opts: Vec<Vec<Pick>> = bw
                .iter()
                .map(|w| {
                    let clear = w.iter().take_while(|&&s| !at_f.contains(s)).count();
                    (0..clear)
                        .filter(|&k| k + 1 == w.len() || !before_f.contains(w[k]))
                        .map(|k| Pick {
                            x: if k + 1 < w.len() { self.single(w[k]) } else { Bits::zero(self.words) },
                            y: self.span(&w[..=k]),
                            tag: k,
                        })
                        .collect()
                })
                .collect();
            for gb in self.minimal_products(&b_opts) {
                let c1 = (before_f.clone(), gb.x);
                let c2 = (at_f.clone(), gb.y);
                if seen.insert((c1.clone(), c2.clone())) {
                    out.push((Kind::Until(fa.tags.clone(), gb.tags), c1, c2));
                }
            }
        }
        out
    }

    fn rebuild(&self, key: &Key) -> DeductionTree {
        let alt = {
            let e = self.memo.get(key).expect("solved instance is memoized");
            e.exact.as_ref().expect("solved instance has a witness").1.clone()
        };
        let instance = SepInstance::new(self.set(&key.0), self.set(&key.1));
        let rule = match &alt.kind {
            Kind::Atomic(i) => RuleApp::Atomic(self.lits[*i].0.clone(), self.lits[*i].1),
            Kind::Next => RuleApp::Next,
            Kind::WeakNext => RuleApp::WeakNext,
            Kind::Future(f) => RuleApp::Future(FuturePoint(f.clone())),
            Kind::Globally(g) => RuleApp::Globally(FuturePoint(g.clone())),
            Kind::Or => RuleApp::OrSplit(self.set(&alt.children[0].0), self.set(&alt.children[1].0)),
            Kind::And => RuleApp::AndSplit(self.set(&alt.children[0].1), self.set(&alt.children[1].1)),
            Kind::Until(f, g) => RuleApp::Until(FuturePoint(f.clone()), FuturePoint(g.clone())),
        };
        let children = alt.children.iter().map(|c| self.rebuild(c)).collect();
        DeductionTree { instance, rule, children }
    }
}

struct Pick {
    x: Bits,
    y: Bits,
    tag: usize,
}

struct Combo {
    x: Bits,
    y: Bits,
    tags: Vec<usize>,
}

// Drops duplicates and every combo whose sets both contain another's.
fn antichain(mut items: Vec<Combo>) -> Vec<Combo> {
    items.sort_by_key(|c| c.x.count() + c.y.count());
    let mut kept: Vec<Combo> = Vec::new();
    for c in items {
        if !kept.iter().any(|k| k.x.is_subset(&c.x) && k.y.is_subset(&c.y)) {
            kept.push(c);
        }
    }
    kept
}
