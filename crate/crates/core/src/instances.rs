//! The hard-instance family: types, the padded enumeration word, the
//! formulas `Φ_n` and `Φ_n'`, the trace sets `𝔸`/`𝔹` and the `≈` relation.

use crate::ltl::{prop, Formula, Prop};
use crate::trace::{reverse_set, Letter, SuffixRef, Trace, TraceSet};

/// Largest `n` accepted without `allow_large`.
pub const DEFAULT_MAX_N: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("n must be at least 1")]
    ZeroN,
    #[error("n = {0} exceeds the default cap of {DEFAULT_MAX_N}")]
    TooLarge(usize),
    #[error("{0:?} is not a type")]
    NotAType(Letter),
    #[error("{0:?} is not in T_Q")]
    NotQType(Letter),
    #[error("order must list each of the {expected} T_Q types exactly once")]
    BadOrder { expected: usize },
}

/// `α(n) = 2^{n+1}(n+2)²`, the padding length.
pub fn alpha(n: usize) -> Result<usize, InstanceError> {
    if n == 0 {
        return Err(InstanceError::ZeroN);
    }
    Ok((1usize << (n + 1)) * (n + 2) * (n + 2))
}

pub fn p_marker() -> Prop {
    prop("pt")
}

pub fn q_marker() -> Prop {
    prop("qt")
}

pub fn p_(i: usize) -> Prop {
    prop(&format!("p{i}"))
}

pub fn q_(i: usize) -> Prop {
    prop(&format!("q{i}"))
}

/// The `T_Q` type `{qt} ∪ {q_i : bit i-1 of mask}`.
pub fn q_type(n: usize, mask: u64) -> Letter {
    Letter::new(std::iter::once(q_marker()).chain((1..=n).filter(|i| mask >> (i - 1) & 1 == 1).map(q_)))
}

/// The `T_P` type `{pt} ∪ {p_i : bit i-1 of mask}`.
pub fn p_type(n: usize, mask: u64) -> Letter {
    Letter::new(std::iter::once(p_marker()).chain((1..=n).filter(|i| mask >> (i - 1) & 1 == 1).map(p_)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    P,
    Q,
}

/// Recognizes a type: a marker plus indexed propositions of the same side.
pub fn classify(t: &Letter) -> Option<(Role, u64)> {
    let (role, marker, side) = if t.contains(&q_marker()) {
        (Role::Q, "qt", 'q')
    } else if t.contains(&p_marker()) {
        (Role::P, "pt", 'p')
    } else {
        return None;
    };
    let mut mask = 0u64;
    for p in t.props() {
        if p.name() == marker {
            continue;
        }
        let rest = p.name().strip_prefix(side)?;
        let i: usize = rest.parse().ok().filter(|i| (1..=64).contains(i))?;
        if rest.starts_with('0') {
            return None;
        }
        mask |= 1 << (i - 1);
    }
    Some((role, mask))
}

/// Swaps `p_i ↔ q_i` and `pt ↔ qt`.
pub fn bar(t: &Letter) -> Result<Letter, InstanceError> {
    let (role, mask) = classify(t).ok_or_else(|| InstanceError::NotAType(t.clone()))?;
    let n = 64 - mask.leading_zeros() as usize;
    Ok(match role {
        Role::Q => p_type(n, mask),
        Role::P => q_type(n, mask),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyParams {
    pub n: usize,
    /// `T_Q` masks in enumeration order; bit `i-1` stands for `q_i`.
    pub order: Vec<u64>,
    /// The `j` values of the `∅^j` prefixes.
    pub prefixes: Vec<usize>,
}

impl FamilyParams {
    /// Binary-counting order on `T_Q`, prefixes `[0]`.
    pub fn new(n: usize) -> Result<FamilyParams, InstanceError> {
        Self::checked(n, false)
    }

    /// Like [`FamilyParams::new`] but without the size cap.
    pub fn new_uncapped(n: usize) -> Result<FamilyParams, InstanceError> {
        Self::checked(n, true)
    }

    fn checked(n: usize, allow_large: bool) -> Result<FamilyParams, InstanceError> {
        if n == 0 {
            return Err(InstanceError::ZeroN);
        }
        if n > DEFAULT_MAX_N && !allow_large {
            return Err(InstanceError::TooLarge(n));
        }
        Ok(FamilyParams {
            n,
            order: (0..1u64 << n).collect(),
            prefixes: vec![0],
        })
    }

    pub fn with_order(mut self, order: Vec<u64>) -> Result<Self, InstanceError> {
        let expected = 1usize << self.n;
        let mut sorted = order.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != expected || order.len() != expected || sorted.iter().any(|&m| m >= expected as u64) {
            return Err(InstanceError::BadOrder { expected });
        }
        self.order = order;
        Ok(self)
    }

    pub fn with_prefixes(mut self, prefixes: Vec<usize>) -> Self {
        self.prefixes = prefixes;
        self
    }

    pub fn types(&self) -> Vec<Letter> {
        self.order.iter().map(|&m| q_type(self.n, m)).collect()
    }
}

/// `∅^α · τ_1 · ∅^α · … · τ_{2^n} · ∅^α` under the configured order.
pub fn build_enum(params: &FamilyParams) -> Trace {
    let pad = alpha(params.n).expect("params validated");
    let mut letters = Vec::with_capacity((1 << params.n) * (pad + 1) + pad);
    for t in params.types() {
        letters.extend(std::iter::repeat_n(Letter::empty(), pad));
        letters.push(t);
    }
    letters.extend(std::iter::repeat_n(Letter::empty(), pad));
    Trace::new(letters).expect("nonempty")
}

/// Drops the position of `tau` and the `α(n)` padding letters before it.
pub fn enum_minus(n: usize, enumeration: &Trace, tau: &Letter) -> Result<Trace, InstanceError> {
    match classify(tau) {
        Some((Role::Q, _)) => {}
        _ => return Err(InstanceError::NotQType(tau.clone())),
    }
    let pad = alpha(n)?;
    let k = enumeration
        .letters()
        .iter()
        .position(|l| l == tau)
        .ok_or_else(|| InstanceError::NotQType(tau.clone()))?;
    let start = k.checked_sub(pad).ok_or_else(|| InstanceError::NotQType(tau.clone()))?;
    let mut letters = enumeration.letters().to_vec();
    letters.drain(start..=k);
    Ok(Trace::new(letters).expect("padding remains"))
}

/// `𝔸 = {∅^j · bar(τ) · Enum}` and `𝔹 = {∅^j · bar(τ) · Enum|₋τ}` over `τ ∈ T_Q` and the prefixes.
pub fn build_ab(params: &FamilyParams) -> (TraceSet, TraceSet) {
    let e = build_enum(params);
    let mut a = Vec::new();
    let mut b = Vec::new();
    for tau in params.types() {
        let head = bar(&tau).expect("T_Q member");
        let minus = enum_minus(params.n, &e, &tau).expect("T_Q member");
        for &j in &params.prefixes {
            let word = |tail: &Trace| {
                let mut v = vec![Letter::empty(); j];
                v.push(head.clone());
                v.extend(tail.letters().iter().cloned());
                Trace::new(v).expect("nonempty")
            };
            a.push(word(&e));
            b.push(word(&minus));
        }
    }
    (a.into_iter().collect(), b.into_iter().collect())
}

/// `F(qt ∧ ⋀_i ((q_i ∧ O(pt ∧ p_i)) ∨ (¬q_i ∧ O(pt ∧ ¬p_i))))`.
pub fn build_phi_n(n: usize) -> Result<Formula, InstanceError> {
    if n == 0 {
        return Err(InstanceError::ZeroN);
    }
    let pos = |p: Prop| Formula::Lit(p, true);
    let neg = |p: Prop| Formula::Lit(p, false);
    let conjuncts = (1..=n).map(|i| {
        Formula::or(
            Formula::and(pos(q_(i)), Formula::once(Formula::and(pos(p_marker()), pos(p_(i))))),
            Formula::and(neg(q_(i)), Formula::once(Formula::and(pos(p_marker()), neg(p_(i))))),
        )
    });
    let body = Formula::conj(std::iter::once(pos(q_marker())).chain(conjuncts)).expect("nonempty");
    Ok(Formula::future(body))
}

/// The future-only equivalent of `Φ_n`: a disjunction over `τ ⊆ P` of
/// `⋀_{p∈τ} F(pt ∧ p ∧ F(qt ∧ ψ)) ∧ ⋀_{p∉τ} F(pt ∧ ¬p ∧ F(qt ∧ ψ))`
/// where `ψ` fixes every `q_i` to agree with `τ`.
pub fn build_phi_n_prime(n: usize) -> Result<Formula, InstanceError> {
    if n == 0 {
        return Err(InstanceError::ZeroN);
    }
    let disjuncts = (0..1u64 << n).map(|tau| {
        let has = |i: usize| tau >> (i - 1) & 1 == 1;
        let psi = Formula::conj((1..=n).map(|i| Formula::Lit(q_(i), has(i)))).expect("n >= 1");
        let target = Formula::future(Formula::and(Formula::Lit(q_marker(), true), psi));
        let step = |i: usize| {
            Formula::future(Formula::conj([
                Formula::Lit(p_marker(), true),
                Formula::Lit(p_(i), has(i)),
                target.clone(),
            ])
            .expect("nonempty"))
        };
        let inside = (1..=n).filter(|&i| has(i)).map(step);
        let outside = (1..=n).filter(|&i| !has(i)).map(step);
        Formula::conj(inside.chain(outside)).expect("n >= 1")
    });
    Ok(Formula::disj(disjuncts).expect("2^n >= 1"))
}

/// The closed form `2^n · n · (2n+8) − 1`.
pub fn phi_n_prime_size(n: usize) -> usize {
    (1usize << n) * n * (2 * n + 8) - 1
}

/// The `(u, ρ)` witness of `a ≈ b`: both words lie in `∅^u · ρ · ∅^α · Σ*`
/// for a type `ρ`.
pub fn approx_witness(a: &SuffixRef, b: &SuffixRef, n: usize) -> Option<(usize, Letter)> {
    let pad = alpha(n).ok()?;
    let shape = |s: &SuffixRef| -> Option<(usize, Letter)> {
        let w = s.letters();
        let u = w.iter().position(|l| !l.is_empty())?;
        let rho = &w[u];
        classify(rho)?;
        let tail = w.get(u + 1..u + 1 + pad)?;
        tail.iter().all(Letter::is_empty).then(|| (u, rho.clone()))
    };
    let wa = shape(a)?;
    (shape(b)? == wa).then_some(wa)
}

pub fn approx(a: &SuffixRef, b: &SuffixRef, n: usize) -> bool {
    approx_witness(a, b, n).is_some()
}

/// `|{(a, b) ∈ A × B : a ≈ b}|`.
pub fn count_c(a: &TraceSet, b: &TraceSet, n: usize) -> usize {
    a.iter().map(|x| b.iter().filter(|y| approx(x, y, n)).count()).sum()
}

/// Reverses every trace on both sides.
pub fn reverse_instance(a: &TraceSet, b: &TraceSet) -> (TraceSet, TraceSet) {
    (reverse_set(a), reverse_set(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::separates;

    #[test]
    fn alpha_values() {
        assert_eq!(alpha(1).unwrap(), 36);
        assert_eq!(alpha(2).unwrap(), 128);
        assert_eq!(alpha(3).unwrap(), 400);
        assert_eq!(alpha(0), Err(InstanceError::ZeroN));
    }

    #[test]
    fn bar_is_an_involution() {
        let t = q_type(2, 0b01);
        assert_eq!(bar(&t).unwrap(), Letter::new([p_marker(), p_(1)]));
        assert_eq!(bar(&bar(&t).unwrap()).unwrap(), t);
        assert_eq!(bar(&q_type(3, 0)).unwrap(), Letter::new([p_marker()]));
        assert!(bar(&Letter::new([p_(1)])).is_err());
        assert!(bar(&Letter::new([q_marker(), p_(1)])).is_err());
    }

    #[test]
    fn enumeration_shape() {
        let params = FamilyParams::new(2).unwrap();
        let e = build_enum(&params);
        assert_eq!(e.len(), 644);
        let minus = enum_minus(2, &e, &q_type(2, 0b10)).unwrap();
        assert_eq!(minus.len(), 644 - 129);
        assert!(!minus.letters().contains(&q_type(2, 0b10)));
        assert!(enum_minus(2, &e, &p_type(2, 1)).is_err());
    }

    #[test]
    fn formula_sizes() {
        assert_eq!(build_phi_n(1).unwrap().size(), 16);
        assert_eq!(build_phi_n(3).unwrap().size(), 14 * 3 + 2);
        assert_eq!(build_phi_n_prime(1).unwrap().size(), 19);
        assert_eq!(build_phi_n_prime(2).unwrap().size(), 95);
        assert_eq!(phi_n_prime_size(2), 95);
    }

    #[test]
    fn small_family_separates() {
        let (a, b) = build_ab(&FamilyParams::new(1).unwrap());
        assert_eq!(a.len(), 2);
        assert!(a.iter().all(|s| s.len() == 111));
        assert!(!a.intersects(&b));
        assert!(separates(&build_phi_n(1).unwrap(), &a, &b));
        assert!(separates(&build_phi_n_prime(1).unwrap(), &a, &b));
        assert_eq!(count_c(&a, &b, 1), 2);
    }

    #[test]
    fn approx_needs_a_type_and_padding() {
        let params = FamilyParams::new(1).unwrap();
        let pad = Trace::new(vec![Letter::empty(); 36]).unwrap();
        let (a, _) = build_ab(&params);
        let first = a.iter().next().unwrap();
        assert!(!approx(&pad.whole(), first, 1));
        assert!(approx(first, first, 1));
        assert_eq!(approx_witness(first, first, 1).map(|w| w.0), Some(0));
    }

    #[test]
    fn order_validation() {
        let p = FamilyParams::new(2).unwrap();
        assert!(p.clone().with_order(vec![3, 2, 1, 0]).is_ok());
        assert!(p.clone().with_order(vec![0, 0, 1, 2]).is_err());
        assert!(p.with_order(vec![0, 1, 2]).is_err());
        assert_eq!(FamilyParams::new(9), Err(InstanceError::TooLarge(9)));
        assert!(FamilyParams::new_uncapped(9).is_ok());
    }
}
