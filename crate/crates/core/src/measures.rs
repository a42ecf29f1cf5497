//! Sub-additive proof measures and the tree-size lower bounds they give.

use num_rational::Ratio;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::ltl::{prop, Prop};
use crate::trace::{Letter, Trace, TraceSet};

pub type Rational = Ratio<u64>;

/// Which Atomic-case axiom a measure must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureAxioms {
    /// `μ(A,B) <= min(|A|,|B|)` when a literal separates.
    V1,
    /// `μ(A,B) <= 1` when a literal separates.
    V2,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MeasureError {
    #[error("trace {0} has more than one letter; the measure is propositional")]
    NotPropositional(String),
    #[error("the bound needs nonempty A and B")]
    EmptySet,
}

fn single_letters(set: &TraceSet) -> Result<Vec<&Letter>, MeasureError> {
    set.iter()
        .map(|s| {
            if s.len() == 1 {
                Ok(s.first())
            } else {
                Err(MeasureError::NotPropositional(s.to_string()))
            }
        })
        .collect()
}

fn hamming(x: &Letter, y: &Letter) -> usize {
    let (mut i, mut j, mut d) = (0, 0, 0);
    let (xs, ys) = (x.props(), y.props());
    while i < xs.len() && j < ys.len() {
        match xs[i].cmp(&ys[j]) {
            std::cmp::Ordering::Less => (d, i) = (d + 1, i + 1),
            std::cmp::Ordering::Greater => (d, j) = (d + 1, j + 1),
            std::cmp::Ordering::Equal => (i, j) = (i + 1, j + 1),
        }
    }
    d + (xs.len() - i) + (ys.len() - j)
}

/// Number of pairs in `A × B` at Hamming distance one, at least 1.
pub fn delta1(a: &TraceSet, b: &TraceSet) -> Result<u64, MeasureError> {
    let (la, lb) = (single_letters(a)?, single_letters(b)?);
    let n = la.iter().flat_map(|x| lb.iter().filter(move |y| hamming(x, y) == 1)).count();
    Ok((n as u64).max(1))
}

/// [`delta1`] over letters given as proposition bitmasks.
pub fn delta1_masks(a: &[u64], b: &[u64]) -> u64 {
    let n = a.iter().flat_map(|x| b.iter().filter(move |y| (x ^ *y).count_ones() == 1)).count();
    (n as u64).max(1)
}

/// `μ² / (|A|·|B|)`.
pub fn bound_v1(mu: u64, na: usize, nb: usize) -> Rational {
    Rational::new(mu * mu, (na * nb) as u64)
}

/// Lower bound on the size of any tree for `<A, B>` from a measure with the
/// first Atomic axiom.
pub fn measure_bound_v1(a: &TraceSet, b: &TraceSet, mu: Rational) -> Result<Rational, MeasureError> {
    if a.is_empty() || b.is_empty() {
        return Err(MeasureError::EmptySet);
    }
    Ok(mu * mu / Rational::from((a.len() * b.len()) as u64))
}

/// Lower bound from a measure with the second Atomic axiom: the measure itself.
pub fn measure_bound_v2(a: &TraceSet, b: &TraceSet, mu: &dyn Fn(&TraceSet, &TraceSet) -> Rational) -> Rational {
    mu(a, b)
}

/// Odd-parity bit vectors against even-parity ones, each as a one-letter
/// trace over `p0..p{k-1}`.
#[derive(Debug, Clone)]
pub struct BitInstance {
    pub k: usize,
    pub a: TraceSet,
    pub b: TraceSet,
}

pub fn bit_prop(i: usize) -> Prop {
    prop(&format!("p{i}"))
}

pub fn parity_instance(k: usize) -> BitInstance {
    assert!((1..=20).contains(&k), "parity instances need 1 <= k <= 20");
    let word = |bits: u32| {
        let letter = Letter::new((0..k).filter(|i| bits >> i & 1 == 1).map(bit_prop));
        Trace::new(vec![letter]).expect("one letter")
    };
    let (odd, even): (Vec<u32>, Vec<u32>) = (0..1u32 << k).partition(|v| v.count_ones() % 2 == 1);
    BitInstance {
        k,
        a: odd.into_iter().map(word).collect(),
        b: even.into_iter().map(word).collect(),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub checked: usize,
    pub violations: Vec<String>,
}

impl AxiomReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn literal_separates(a: &TraceSet, b: &TraceSet) -> bool {
    let props = a.union(b).props();
    props.iter().any(|p| {
        [true, false].into_iter().any(|pos| {
            a.iter().all(|s| s.first().contains(p) == pos) && b.iter().all(|s| s.first().contains(p) != pos)
        })
    })
}

fn random_split(set: &TraceSet, rng: &mut StdRng) -> (TraceSet, TraceSet) {
    let (mut l, mut r) = (Vec::new(), Vec::new());
    for s in set {
        if rng.gen_bool(0.5) {
            l.push(s.clone());
        } else {
            r.push(s.clone());
        }
    }
    (l.into_iter().collect(), r.into_iter().collect())
}

/// Samples random splits of `A` and of `B` (empty parts allowed) and checks
/// sub-additivity, plus the Atomic axiom wherever a literal separates.
pub fn check_axioms(
    mu: &dyn Fn(&TraceSet, &TraceSet) -> Rational,
    axioms: MeasureAxioms,
    a: &TraceSet,
    b: &TraceSet,
    samples: usize,
    seed: u64,
) -> AxiomReport {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut report = AxiomReport::default();
    let atomic = |x: &TraceSet, y: &TraceSet, report: &mut AxiomReport| {
        if x.is_empty() || y.is_empty() || !literal_separates(x, y) {
            return;
        }
        let cap = match axioms {
            MeasureAxioms::V1 => x.len().min(y.len()) as u64,
            MeasureAxioms::V2 => 1,
        };
        report.checked += 1;
        let m = mu(x, y);
        if m > Rational::from(cap) {
            report.violations.push(format!("atomic bound: μ = {m} > {cap} at <{x:?}, {y:?}>"));
        }
    };
    atomic(a, b, &mut report);
    let whole = mu(a, b);
    for _ in 0..samples {
        let (a1, a2) = random_split(a, &mut rng);
        let sum = mu(&a1, b) + mu(&a2, b);
        report.checked += 1;
        if whole > sum {
            report.violations.push(format!("A-split: {whole} > {sum} for {a1:?} ⊎ {a2:?}"));
        }
        atomic(&a1, b, &mut report);
        let (b1, b2) = random_split(b, &mut rng);
        let sum = mu(a, &b1) + mu(a, &b2);
        report.checked += 1;
        if whole > sum {
            report.violations.push(format!("B-split: {whole} > {sum} for {b1:?} ⊎ {b2:?}"));
        }
        atomic(a, &b1, &mut report);
    }
    report
}
