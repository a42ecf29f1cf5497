//! The combinatorial proof system for separation, exact minimal-tree search
//! and an independent enumeration oracle.

mod json;
mod oracle;
mod search;

use std::fmt;

use crate::ltl::{eval_all, separates, Formula, Fragment, Op, Prop, Unary};
use crate::trace::{
    apply_future_point, suffix_g, suffix_x, FuturePoint, FuturePointError, SuffixRef, TraceSet,
};

pub use json::{tree_from_json, tree_to_json, TreeJsonError};
pub use oracle::{brute_force_min_formula, OracleResult};
pub use search::{
    decide_separability, min_search, sufficient_budget, Found, SearchConfig, SearchError, SearchMode,
    SearchStats, Separability,
};

/// A proof obligation `<A, B>`: find a formula true on all of `A` and false on all of `B`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SepInstance {
    pub a: TraceSet,
    pub b: TraceSet,
}

impl SepInstance {
    pub fn new(a: TraceSet, b: TraceSet) -> SepInstance {
        SepInstance { a, b }
    }

    pub fn is_disjoint(&self) -> bool {
        !self.a.intersects(&self.b)
    }
}

impl fmt::Debug for SepInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{:?}, {:?}>", self.a, self.b)
    }
}

/// One rule application. Split payloads are the two parts; future points
/// are aligned with the canonical order of the set they act on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleApp {
    Atomic(Prop, bool),
    OrSplit(TraceSet, TraceSet),
    AndSplit(TraceSet, TraceSet),
    Next,
    WeakNext,
    Future(FuturePoint),
    Globally(FuturePoint),
    Until(FuturePoint, FuturePoint),
}

impl RuleApp {
    /// The temporal operator the rule introduces, if any.
    pub fn op(&self) -> Option<Op> {
        match self {
            RuleApp::Atomic(..) | RuleApp::OrSplit(..) | RuleApp::AndSplit(..) => None,
            RuleApp::Next => Some(Op::X),
            RuleApp::WeakNext => Some(Op::WX),
            RuleApp::Future(_) => Some(Op::F),
            RuleApp::Globally(_) => Some(Op::G),
            RuleApp::Until(..) => Some(Op::U),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RuleApp::Atomic(..) => "atomic",
            RuleApp::OrSplit(..) => "or",
            RuleApp::AndSplit(..) => "and",
            RuleApp::Next => "next",
            RuleApp::WeakNext => "weak_next",
            RuleApp::Future(_) => "future",
            RuleApp::Globally(_) => "globally",
            RuleApp::Until(..) => "until",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuleError {
    #[error("literal {0} does not hold on every trace of A")]
    AtomicA(String),
    #[error("literal {0} holds on some trace of B")]
    AtomicB(String),
    #[error("split parts do not partition the set")]
    NotAPartition,
    #[error("some trace of A has no next position")]
    NextLength,
    #[error("some trace of B has no next position")]
    WeakNextLength,
    #[error("bad future point: {0}")]
    FuturePoint(#[from] FuturePointError),
}

/// Validates `rule` at `inst` and returns the child obligations it creates.
pub fn check_rule(inst: &SepInstance, rule: &RuleApp) -> Result<Vec<SepInstance>, RuleError> {
    let SepInstance { a, b } = inst;
    match rule {
        RuleApp::Atomic(p, pos) => {
            let lit = Formula::lit(p, *pos);
            if !a.iter().all(|s| s.first().contains(p) == *pos) {
                return Err(RuleError::AtomicA(lit.to_string()));
            }
            if b.iter().any(|s| s.first().contains(p) == *pos) {
                return Err(RuleError::AtomicB(lit.to_string()));
            }
            Ok(vec![])
        }
        RuleApp::OrSplit(a1, a2) => {
            check_partition(a, a1, a2)?;
            Ok(vec![
                SepInstance::new(a1.clone(), b.clone()),
                SepInstance::new(a2.clone(), b.clone()),
            ])
        }
        RuleApp::AndSplit(b1, b2) => {
            check_partition(b, b1, b2)?;
            Ok(vec![
                SepInstance::new(a.clone(), b1.clone()),
                SepInstance::new(a.clone(), b2.clone()),
            ])
        }
        RuleApp::Next => {
            if a.iter().any(|s| s.len() < 2) {
                return Err(RuleError::NextLength);
            }
            Ok(vec![SepInstance::new(suffix_x(a), suffix_x(b))])
        }
        RuleApp::WeakNext => {
            if b.iter().any(|s| s.len() < 2) {
                return Err(RuleError::WeakNextLength);
            }
            Ok(vec![SepInstance::new(suffix_x(a), suffix_x(b))])
        }
        RuleApp::Future(f) => Ok(vec![SepInstance::new(apply_future_point(a, f)?, suffix_g(b))]),
        RuleApp::Globally(g) => Ok(vec![SepInstance::new(suffix_g(a), apply_future_point(b, g)?)]),
        RuleApp::Until(f, g) => {
            let (c1, c2) = until_child_sets(a, b, f, g)?;
            Ok(vec![c1, c2])
        }
    }
}

fn check_partition(whole: &TraceSet, p1: &TraceSet, p2: &TraceSet) -> Result<(), RuleError> {
    if p1.intersects(p2) || p1.len() + p2.len() != whole.len() || !p1.is_subset(whole) || !p2.is_subset(whole) {
        return Err(RuleError::NotAPartition);
    }
    Ok(())
}

/// Children of the Until rule:
/// `<{a[j..] : j < f(a)}, {b[g(b)..] : g(b) < |b|-1}>` and
/// `<{a[f(a)..]}, {b[j..] : j <= g(b)}>`.
pub fn until_child_sets(
    a: &TraceSet,
    b: &TraceSet,
    f: &FuturePoint,
    g: &FuturePoint,
) -> Result<(SepInstance, SepInstance), FuturePointError> {
    f.check(a)?;
    g.check(b)?;
    let before_f: TraceSet = a
        .iter()
        .zip(&f.0)
        .flat_map(|(s, &k)| (0..k).filter_map(move |j| s.shift(j)))
        .collect();
    let g_strict: TraceSet = b
        .iter()
        .zip(&g.0)
        .filter(|(s, &k)| k + 1 < s.len())
        .filter_map(|(s, &k)| s.shift(k))
        .collect();
    let at_f = apply_future_point(a, f)?;
    let upto_g: TraceSet = b
        .iter()
        .zip(&g.0)
        .flat_map(|(s, &k)| (0..=k).filter_map(move |j| s.shift(j)))
        .collect();
    Ok((SepInstance::new(before_f, g_strict), SepInstance::new(at_f, upto_g)))
}

/// A closed deduction tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeductionTree {
    pub instance: SepInstance,
    pub rule: RuleApp,
    pub children: Vec<DeductionTree>,
}

impl DeductionTree {
    /// Number of rule applications.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(DeductionTree::size).sum::<usize>()
    }

    /// Every operator used by some rule in the tree.
    pub fn ops(&self) -> Vec<Op> {
        let mut out = Vec::new();
        self.walk(&mut |t| {
            if let Some(op) = t.rule.op() {
                if !out.contains(&op) {
                    out.push(op);
                }
            }
        });
        out
    }

    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a DeductionTree)) {
        visit(self);
        for c in &self.children {
            c.walk(visit);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("node {path:?}: {reason}")]
pub struct TreeError {
    /// Child indices from the root to the failing node.
    pub path: Vec<usize>,
    pub reason: String,
}

/// Checks every rule application and that children carry exactly the
/// obligations the rule produces.
pub fn verify_tree(t: &DeductionTree) -> Result<(), TreeError> {
    verify_at(t, &mut Vec::new(), None)
}

/// [`verify_tree`] plus a check that each rule's operator is in `fragment`.
pub fn verify_tree_in(t: &DeductionTree, fragment: &Fragment) -> Result<(), TreeError> {
    verify_at(t, &mut Vec::new(), Some(fragment))
}

fn verify_at(t: &DeductionTree, path: &mut Vec<usize>, fragment: Option<&Fragment>) -> Result<(), TreeError> {
    let fail = |path: &Vec<usize>, reason: String| TreeError {
        path: path.clone(),
        reason,
    };
    if let (Some(frag), Some(op)) = (fragment, t.rule.op()) {
        if !frag.allows(op) {
            return Err(fail(path, format!("operator {} not in fragment {frag}", op.token())));
        }
    }
    let expected = check_rule(&t.instance, &t.rule).map_err(|e| fail(path, e.to_string()))?;
    if expected.len() != t.children.len() {
        return Err(fail(
            path,
            format!("rule {} needs {} children, found {}", t.rule.name(), expected.len(), t.children.len()),
        ));
    }
    for (i, (want, child)) in expected.iter().zip(&t.children).enumerate() {
        if *want != child.instance {
            path.push(i);
            let err = fail(path, format!("child instance should be {want:?}, found {:?}", child.instance));
            return Err(err);
        }
    }
    for (i, child) in t.children.iter().enumerate() {
        path.push(i);
        verify_at(child, path, fragment)?;
        path.pop();
    }
    Ok(())
}

/// Reads off the formula: each rule becomes its operator.
pub fn formula_from_tree(t: &DeductionTree) -> Formula {
    let kid = |i: usize| formula_from_tree(&t.children[i]);
    match &t.rule {
        RuleApp::Atomic(p, pos) => Formula::lit(p, *pos),
        RuleApp::OrSplit(..) => Formula::or(kid(0), kid(1)),
        RuleApp::AndSplit(..) => Formula::and(kid(0), kid(1)),
        RuleApp::Next => Formula::next(kid(0)),
        RuleApp::WeakNext => Formula::weak_next(kid(0)),
        RuleApp::Future(_) => Formula::future(kid(0)),
        RuleApp::Globally(_) => Formula::globally(kid(0)),
        RuleApp::Until(..) => Formula::until(kid(0), kid(1)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FromFormulaError {
    #[error("formula {0} does not separate the instance")]
    NotSeparating(String),
    #[error("the proof system has no rule for past operator {0}")]
    PastOperator(&'static str),
}

/// Builds a tree of size `size(f)` for an instance that `f` separates.
/// Disjunctions send to the left every positive that satisfies the left
/// disjunct; conjunctions send to the left every negative that violates the
/// left conjunct; F and Until use the least witness position.
pub fn tree_from_formula(a: &TraceSet, b: &TraceSet, f: &Formula) -> Result<DeductionTree, FromFormulaError> {
    if let Some(op) = f.ops().iter().find(|op| !crate::ltl::OpSet::FUTURE.contains(*op)) {
        return Err(FromFormulaError::PastOperator(op.token()));
    }
    if !separates(f, a, b) {
        return Err(FromFormulaError::NotSeparating(f.to_string()));
    }
    Ok(build(SepInstance::new(a.clone(), b.clone()), f))
}

fn holds(s: &SuffixRef, f: &Formula) -> Vec<bool> {
    eval_all(s.letters(), f)
}

fn build(inst: SepInstance, f: &Formula) -> DeductionTree {
    let (rule, kids): (RuleApp, Vec<&Formula>) = match f {
        Formula::Lit(p, pos) => (RuleApp::Atomic(p.clone(), *pos), vec![]),
        Formula::Or(l, r) => {
            let a1 = inst.a.filter(|s| holds(s, l)[0]);
            let a2 = inst.a.filter(|s| !holds(s, l)[0]);
            (RuleApp::OrSplit(a1, a2), vec![l, r])
        }
        Formula::And(l, r) => {
            let b1 = inst.b.filter(|s| !holds(s, l)[0]);
            let b2 = inst.b.filter(|s| holds(s, l)[0]);
            (RuleApp::AndSplit(b1, b2), vec![l, r])
        }
        Formula::Unary(Unary::Next, g) => (RuleApp::Next, vec![g]),
        Formula::Unary(Unary::WeakNext, g) => (RuleApp::WeakNext, vec![g]),
        Formula::Unary(Unary::Future, g) => {
            let fp = inst.a.iter().map(|s| first_true(&holds(s, g))).collect();
            (RuleApp::Future(FuturePoint(fp)), vec![g])
        }
        Formula::Unary(Unary::Globally, g) => {
            let fp = inst
                .b
                .iter()
                .map(|s| first_true(&holds(s, g).iter().map(|x| !x).collect::<Vec<_>>()))
                .collect();
            (RuleApp::Globally(FuturePoint(fp)), vec![g])
        }
        Formula::Until(l, r) => {
            let fp = inst
                .a
                .iter()
                .map(|s| {
                    let (lv, rv) = (holds(s, l), holds(s, r));
                    (0..s.len())
                        .find(|&j| rv[j] && lv[..j].iter().all(|x| *x))
                        .expect("separating Until has a witness")
                })
                .collect();
            let gp = inst
                .b
                .iter()
                .map(|s| {
                    let (lv, rv) = (holds(s, l), holds(s, r));
                    if !rv.iter().any(|x| *x) {
                        s.len() - 1
                    } else {
                        (0..s.len() - 1)
                            .find(|&j| !lv[j] && !rv[..=j].iter().any(|x| *x))
                            .expect("violated Until has a blocking position")
                    }
                })
                .collect();
            (RuleApp::Until(FuturePoint(fp), FuturePoint(gp)), vec![l, r])
        }
        Formula::Unary(u, _) => unreachable!("past operator {u:?} rejected up front"),
    };
    let children = check_rule(&inst, &rule).expect("construction follows the rule side conditions");
    let children = children.into_iter().zip(kids).map(|(c, g)| build(c, g)).collect();
    DeductionTree { instance: inst, rule, children }
}

fn first_true(v: &[bool]) -> usize {
    v.iter().position(|x| *x).expect("witness exists by separation")
}

/// The propositions literals may use: those occurring in the instance plus
/// `extra`, or a single fresh `p` when that would be empty.
pub fn proposition_universe(a: &TraceSet, b: &TraceSet, extra: &[Prop]) -> Vec<Prop> {
    let mut props = a.union(b).props();
    props.extend(extra.iter().cloned());
    props.sort();
    props.dedup();
    if props.is_empty() {
        props.push(crate::ltl::prop("p"));
    }
    props
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::{parse_formula, prop};

    // a = {p}, b = {}
    pub(crate) fn ab(words: &[&str]) -> TraceSet {
        let lines: Vec<String> = words
            .iter()
            .map(|w| w.chars().map(|c| if c == 'a' { "p" } else { "-" }).collect::<Vec<_>>().join(";"))
            .collect();
        TraceSet::parse(lines.iter().map(String::as_str)).unwrap()
    }

    fn fig2_tree() -> DeductionTree {
        let a = ab(&["abaa", "aaaa"]);
        let b = ab(&["aaab"]);
        let left = DeductionTree {
            instance: SepInstance::new(ab(&["abaa"]), b.clone()),
            rule: RuleApp::Next,
            children: vec![DeductionTree {
                instance: SepInstance::new(ab(&["baa"]), ab(&["aab"])),
                rule: RuleApp::Atomic(prop("p"), false),
                children: vec![],
            }],
        };
        let right = DeductionTree {
            instance: SepInstance::new(ab(&["aaaa"]), b.clone()),
            rule: RuleApp::Globally(FuturePoint(vec![3])),
            children: vec![DeductionTree {
                instance: SepInstance::new(ab(&["aaaa", "aaa", "aa", "a"]), ab(&["b"])),
                rule: RuleApp::Atomic(prop("p"), true),
                children: vec![],
            }],
        };
        DeductionTree {
            instance: SepInstance::new(a, b),
            rule: RuleApp::OrSplit(ab(&["abaa"]), ab(&["aaaa"])),
            children: vec![left, right],
        }
    }

    #[test]
    fn worked_example_tree() {
        let t = fig2_tree();
        assert_eq!(verify_tree(&t), Ok(()));
        assert_eq!(t.size(), 5);
        assert_eq!(formula_from_tree(&t), parse_formula("X !p | G p").unwrap());
    }

    #[test]
    fn flipped_leaf_is_rejected() {
        let mut t = fig2_tree();
        t.children[1].children[0].rule = RuleApp::Atomic(prop("p"), false);
        let err = verify_tree(&t).unwrap_err();
        assert_eq!(err.path, vec![1, 0]);
    }

    #[test]
    fn rule_side_conditions() {
        let inst = SepInstance::new(ab(&["a"]), ab(&["ab"]));
        assert_eq!(check_rule(&inst, &RuleApp::Next), Err(RuleError::NextLength));
        let single = DeductionTree {
            instance: SepInstance::new(ab(&["a"]), ab(&["b"])),
            rule: RuleApp::Atomic(prop("p"), true),
            children: vec![],
        };
        assert_eq!(verify_tree(&single), Ok(()));
        let bad_split = RuleApp::OrSplit(ab(&["abaa"]), ab(&["abaa"]));
        let root = SepInstance::new(ab(&["abaa", "aaaa"]), ab(&["aaab"]));
        assert_eq!(check_rule(&root, &bad_split), Err(RuleError::NotAPartition));
    }

    #[test]
    fn formula_to_tree() {
        let a = ab(&["abaa", "aaaa"]);
        let b = ab(&["aaab"]);
        for (text, size) in [("X !p | G p", 5), ("F G p", 3), ("X X G p", 4)] {
            let f = parse_formula(text).unwrap();
            let t = tree_from_formula(&a, &b, &f).unwrap();
            assert_eq!(verify_tree(&t), Ok(()), "{text}");
            assert_eq!(t.size(), size);
            assert_eq!(formula_from_tree(&t), f);
        }
        assert!(matches!(
            tree_from_formula(&a, &b, &parse_formula("p").unwrap()),
            Err(FromFormulaError::NotSeparating(_))
        ));
    }

    #[test]
    fn until_sets() {
        // three exclusive letters a, b, c
        let set = |ws: &[&str]| {
            let lines: Vec<String> = ws
                .iter()
                .map(|w| w.chars().map(|c| c.to_string()).collect::<Vec<_>>().join(";"))
                .collect();
            TraceSet::parse(lines.iter().map(String::as_str)).unwrap()
        };
        let a = set(&["aaab"]);
        let b = set(&["aaaa", "acb"]);
        let f = parse_formula("(a U b)").unwrap();
        let t = tree_from_formula(&a, &b, &f).unwrap();
        assert_eq!(verify_tree(&t), Ok(()));
        assert_eq!(t.size(), 3);

        let last = FuturePoint(b.iter().map(|s| s.len() - 1).collect());
        let (c1, _) = until_child_sets(&a, &b, &FuturePoint::zero(&a), &last).unwrap();
        assert!(c1.a.is_empty());
        assert!(c1.b.is_empty());
    }

    #[test]
    fn universe_defaults() {
        assert_eq!(proposition_universe(&ab(&["b"]), &ab(&["bb"]), &[]), vec![prop("p")]);
        let u = proposition_universe(&ab(&["a"]), &TraceSet::new(), &[prop("q")]);
        assert_eq!(u, vec![prop("p"), prop("q")]);
    }
}
