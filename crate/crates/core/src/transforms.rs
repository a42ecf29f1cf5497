//! Temporal reversal and the conjunctive-reduct normal form for `{X, F}`.

use crate::ltl::{Formula, Fragment, Unary};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("{0} mixes past and future operators")]
    MixedTense(Formula),
    #[error("{0} contains U, which has no past counterpart here")]
    Until(Formula),
    #[error("{0} is outside the {{X, F}} fragment")]
    OutsideXF(Formula),
}

fn mirror(f: &Formula) -> Formula {
    match f {
        Formula::Lit(..) => f.clone(),
        Formula::Or(l, r) => Formula::or(mirror(l), mirror(r)),
        Formula::And(l, r) => Formula::and(mirror(l), mirror(r)),
        Formula::Unary(u, g) => Formula::unary(u.mirror(), mirror(g)),
        Formula::Until(..) => unreachable!("rejected before mirroring"),
    }
}

fn single_tense(f: &Formula) -> bool {
    !(f.has_past() && f.has_future())
}

/// Swaps `Y/X`, `wY/wX`, `O/F`, `H/G` throughout a single-tense formula.
///
/// A formula `F(α)` with `α` single-tense keeps its outer `F`: the word
/// language of `F(α)` reversed is the language of `F(reverse(α))`.
pub fn reverse_formula(f: &Formula) -> Result<Formula, TransformError> {
    if f.ops().contains(crate::ltl::Op::U) {
        return Err(TransformError::Until(f.clone()));
    }
    if single_tense(f) {
        return Ok(mirror(f));
    }
    match f {
        Formula::Unary(Unary::Future, inner) if single_tense(inner) => Ok(Formula::future(mirror(inner))),
        _ => Err(TransformError::MixedTense(f.clone())),
    }
}

/// The disjunction-free reducts of an `{X, F}` formula, ordered by printed form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductSet {
    pub source: Formula,
    pub members: Vec<Formula>,
}

impl ReductSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

fn canonical(mut v: Vec<Formula>) -> Vec<Formula> {
    v.sort_by_cached_key(|f| f.to_string());
    v.dedup();
    v
}

fn reducts(f: &Formula) -> Vec<Formula> {
    match f {
        Formula::Lit(..) => vec![f.clone()],
        Formula::Or(l, r) => canonical(reducts(l).into_iter().chain(reducts(r)).collect()),
        Formula::And(l, r) => {
            let rs = reducts(r);
            let prod = reducts(l)
                .into_iter()
                .flat_map(|x| rs.iter().map(move |y| Formula::and(x.clone(), y.clone())))
                .collect();
            canonical(prod)
        }
        Formula::Unary(u, g) => canonical(reducts(g).into_iter().map(|x| Formula::unary(*u, x)).collect()),
        Formula::Until(..) => unreachable!("rejected before recursion"),
    }
}

pub fn conjunctive_reducts(f: &Formula) -> Result<ReductSet, TransformError> {
    if !Fragment::XF.contains(f) {
        return Err(TransformError::OutsideXF(f.clone()));
    }
    Ok(ReductSet {
        source: f.clone(),
        members: reducts(f),
    })
}

/// `⋁ S(φ)`, right-nested, in canonical member order.
pub fn dnf(f: &Formula) -> Result<Formula, TransformError> {
    let set = conjunctive_reducts(f)?;
    let mut it = set.members.into_iter().rev();
    let last = it.next().expect("reduct sets are nonempty");
    Ok(it.fold(last, |acc, m| Formula::or(m, acc)))
}
