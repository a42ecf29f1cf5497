use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// An atomic proposition. Ordered and compared by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Prop(Arc<str>);

impl Prop {
    /// Builds a proposition, checking the identifier shape
    /// (`[A-Za-z][A-Za-z0-9_]*`) and rejecting operator keywords.
    pub fn new(name: &str) -> Result<Self, InvalidProp> {
        if !is_identifier(name) || is_keyword(name) {
            return Err(InvalidProp(name.to_string()));
        }
        Ok(Prop(Arc::from(name)))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

/// Shorthand used all over the tests and instance builders; panics on a bad name.
pub fn prop(name: &str) -> Prop {
    Prop::new(name).unwrap_or_else(|e| panic!("{e}"))
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
#[error("invalid proposition name {0:?}")]
pub struct InvalidProp(pub String);

impl TryFrom<String> for Prop {
    type Error = InvalidProp;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        Prop::new(&s)
    }
}

impl From<Prop> for String {
    fn from(p: Prop) -> String {
        p.0.to_string()
    }
}

impl fmt::Debug for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn is_keyword(s: &str) -> bool {
    matches!(s, "X" | "wX" | "F" | "G" | "Y" | "wY" | "O" | "H" | "U")
}

/// Unary temporal operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Unary {
    Next,
    WeakNext,
    Future,
    Globally,
    Yesterday,
    WeakYesterday,
    Once,
    Historically,
}

impl Unary {
    pub const ALL: [Unary; 8] = [
        Unary::Next,
        Unary::WeakNext,
        Unary::Future,
        Unary::Globally,
        Unary::Yesterday,
        Unary::WeakYesterday,
        Unary::Once,
        Unary::Historically,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Unary::Next => "X",
            Unary::WeakNext => "wX",
            Unary::Future => "F",
            Unary::Globally => "G",
            Unary::Yesterday => "Y",
            Unary::WeakYesterday => "wY",
            Unary::Once => "O",
            Unary::Historically => "H",
        }
    }

    pub fn from_token(tok: &str) -> Option<Unary> {
        Unary::ALL.into_iter().find(|u| u.token() == tok)
    }

    pub fn op(self) -> Op {
        match self {
            Unary::Next => Op::X,
            Unary::WeakNext => Op::WX,
            Unary::Future => Op::F,
            Unary::Globally => Op::G,
            Unary::Yesterday => Op::Y,
            Unary::WeakYesterday => Op::WY,
            Unary::Once => Op::O,
            Unary::Historically => Op::H,
        }
    }

    pub fn is_past(self) -> bool {
        matches!(
            self,
            Unary::Yesterday | Unary::WeakYesterday | Unary::Once | Unary::Historically
        )
    }

    /// Temporal mirror image: X<->Y, wX<->wY, F<->O, G<->H.
    pub fn mirror(self) -> Unary {
        match self {
            Unary::Next => Unary::Yesterday,
            Unary::WeakNext => Unary::WeakYesterday,
            Unary::Future => Unary::Once,
            Unary::Globally => Unary::Historically,
            Unary::Yesterday => Unary::Next,
            Unary::WeakYesterday => Unary::WeakNext,
            Unary::Once => Unary::Future,
            Unary::Historically => Unary::Globally,
        }
    }
}

/// Formulas in negation normal form. Negation only exists on literals.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    /// `Lit(p, true)` is `p`, `Lit(p, false)` is `!p`.
    Lit(Prop, bool),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Unary(Unary, Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn lit(p: &Prop, positive: bool) -> Formula {
        Formula::Lit(p.clone(), positive)
    }

    pub fn pos(name: &str) -> Formula {
        Formula::Lit(prop(name), true)
    }

    pub fn neg(name: &str) -> Formula {
        Formula::Lit(prop(name), false)
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn until(l: Formula, r: Formula) -> Formula {
        Formula::Until(Box::new(l), Box::new(r))
    }

    pub fn unary(op: Unary, f: Formula) -> Formula {
        Formula::Unary(op, Box::new(f))
    }

    pub fn next(f: Formula) -> Formula {
        Formula::unary(Unary::Next, f)
    }

    pub fn weak_next(f: Formula) -> Formula {
        Formula::unary(Unary::WeakNext, f)
    }

    pub fn future(f: Formula) -> Formula {
        Formula::unary(Unary::Future, f)
    }

    pub fn globally(f: Formula) -> Formula {
        Formula::unary(Unary::Globally, f)
    }

    pub fn once(f: Formula) -> Formula {
        Formula::unary(Unary::Once, f)
    }

    /// Left-nested conjunction of a nonempty sequence.
    pub fn conj<I: IntoIterator<Item = Formula>>(items: I) -> Option<Formula> {
        items.into_iter().reduce(Formula::and)
    }

    /// Left-nested disjunction of a nonempty sequence.
    pub fn disj<I: IntoIterator<Item = Formula>>(items: I) -> Option<Formula> {
        items.into_iter().reduce(Formula::or)
    }

    /// Number of nodes: literals count 1 regardless of polarity.
    pub fn size(&self) -> usize {
        match self {
            Formula::Lit(..) => 1,
            Formula::Unary(_, f) => 1 + f.size(),
            Formula::Or(l, r) | Formula::And(l, r) | Formula::Until(l, r) => {
                1 + l.size() + r.size()
            }
        }
    }

    pub fn ops(&self) -> OpSet {
        let mut set = OpSet::EMPTY;
        self.visit(&mut |f| match f {
            Formula::Unary(u, _) => set = set.with(u.op()),
            Formula::Until(..) => set = set.with(Op::U),
            _ => {}
        });
        set
    }

    pub fn has_past(&self) -> bool {
        self.ops().intersects(OpSet::PAST)
    }

    pub fn has_future(&self) -> bool {
        self.ops().intersects(OpSet::FUTURE)
    }

    pub fn props(&self) -> Vec<Prop> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Formula::Lit(p, _) = f {
                out.push(p.clone());
            }
        });
        out.sort();
        out.dedup();
        out
    }

    pub fn disjunction_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |f| {
            if matches!(f, Formula::Or(..)) {
                n += 1;
            }
        });
        n
    }

    /// Pre-order walk over all subformulas, including `self`.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::Lit(..) => {}
            Formula::Unary(_, g) => g.visit(f),
            Formula::Or(l, r) | Formula::And(l, r) | Formula::Until(l, r) => {
                l.visit(f);
                r.visit(f);
            }
        }
    }
}

// Printing precedence: 0 = disjunction, 1 = conjunction, 2 = unary/atom.
fn level(f: &Formula) -> u8 {
    match f {
        Formula::Or(..) => 0,
        Formula::And(..) => 1,
        _ => 2,
    }
}

fn write_at(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if level(f) < min {
        out.write_str("(")?;
        write_at(f, 0, out)?;
        return out.write_str(")");
    }
    match f {
        Formula::Lit(p, true) => write!(out, "{p}"),
        Formula::Lit(p, false) => write!(out, "!{p}"),
        Formula::Or(l, r) => {
            write_at(l, 0, out)?;
            out.write_str(" | ")?;
            write_at(r, 1, out)
        }
        Formula::And(l, r) => {
            write_at(l, 1, out)?;
            out.write_str(" & ")?;
            write_at(r, 2, out)
        }
        Formula::Unary(u, g) => {
            out.write_str(u.token())?;
            if level(g) < 2 || matches!(**g, Formula::Until(..)) {
                write_at(g, 2, out)
            } else {
                out.write_str(" ")?;
                write_at(g, 2, out)
            }
        }
        Formula::Until(l, r) => {
            out.write_str("(")?;
            write_at(l, 0, out)?;
            out.write_str(" U ")?;
            write_at(r, 0, out)?;
            out.write_str(")")
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(self, 0, f)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(self, 0, f)
    }
}

/// Temporal operators that a fragment may allow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    X,
    WX,
    F,
    G,
    Y,
    WY,
    O,
    H,
    U,
}

impl Op {
    pub const ALL: [Op; 9] = [Op::X, Op::WX, Op::F, Op::G, Op::Y, Op::WY, Op::O, Op::H, Op::U];

    fn bit(self) -> u16 {
        1 << (self as u16)
    }

    pub fn token(self) -> &'static str {
        match self {
            Op::U => "U",
            Op::X => "X",
            Op::WX => "wX",
            Op::F => "F",
            Op::G => "G",
            Op::Y => "Y",
            Op::WY => "wY",
            Op::O => "O",
            Op::H => "H",
        }
    }
}

/// A set of temporal operators.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct OpSet(u16);

impl OpSet {
    pub const EMPTY: OpSet = OpSet(0);
    pub const FUTURE: OpSet = OpSet(0b1_0000_1111);
    pub const PAST: OpSet = OpSet(0b0_1111_0000);

    pub fn of(ops: &[Op]) -> OpSet {
        ops.iter().fold(OpSet::EMPTY, |s, &o| s.with(o))
    }

    pub fn with(self, op: Op) -> OpSet {
        OpSet(self.0 | op.bit())
    }

    pub fn contains(self, op: Op) -> bool {
        self.0 & op.bit() != 0
    }

    pub fn is_subset(self, other: OpSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: OpSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn iter(self) -> impl Iterator<Item = Op> {
        Op::ALL.into_iter().filter(move |o| self.contains(*o))
    }
}

impl fmt::Debug for OpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(Op::token)).finish()
    }
}

/// A syntactic fragment `LTL[S]`, optionally restricted to the shape `F(alpha)`
/// with `alpha` in `LTL[S]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fragment {
    pub ops: OpSet,
    pub top_future: bool,
}

impl Fragment {
    pub const PROP: Fragment = Fragment::plain(OpSet::EMPTY);
    pub const XF: Fragment = Fragment::plain(OpSet(0b0000_0101));
    pub const XWXFG: Fragment = Fragment::plain(OpSet(0b0000_1111));
    pub const COSAFETY_U: Fragment = Fragment::plain(OpSet(0b1_0000_1111));
    pub const PURE_PAST: Fragment = Fragment::plain(OpSet::PAST);
    pub const F_PURE_PAST: Fragment = Fragment {
        ops: OpSet::PAST,
        top_future: true,
    };

    pub const fn plain(ops: OpSet) -> Fragment {
        Fragment {
            ops,
            top_future: false,
        }
    }

    pub fn allows(&self, op: Op) -> bool {
        self.ops.contains(op)
    }

    /// Membership by a single walk of the formula.
    pub fn contains(&self, f: &Formula) -> bool {
        if self.top_future {
            match f {
                Formula::Unary(Unary::Future, inner) => inner.ops().is_subset(self.ops),
                _ => false,
            }
        } else {
            f.ops().is_subset(self.ops)
        }
    }

    pub fn name(&self) -> String {
        match *self {
            Fragment::PROP => "prop".into(),
            Fragment::XF => "xf".into(),
            Fragment::XWXFG => "xwxfg".into(),
            Fragment::COSAFETY_U => "cosafety-u".into(),
            Fragment::PURE_PAST => "pure-past".into(),
            Fragment::F_PURE_PAST => "f-pure-past".into(),
            other => {
                let ops: Vec<_> = other.ops.iter().map(Op::token).collect();
                let body = format!("ltl[{}]", ops.join(","));
                if other.top_future {
                    format!("F({body})")
                } else {
                    body
                }
            }
        }
    }

    /// Parses a preset name (`prop`, `xf`, `xwxfg`, `cosafety-u`, `pure-past`,
    /// `f-pure-past`) or a comma-separated operator list such as `X,F,G`.
    pub fn parse(s: &str) -> Option<Fragment> {
        let preset = match s.to_ascii_lowercase().as_str() {
            "prop" => Some(Fragment::PROP),
            "xf" => Some(Fragment::XF),
            "xwxfg" => Some(Fragment::XWXFG),
            "cosafety-u" | "cosafety_u" => Some(Fragment::COSAFETY_U),
            "pure-past" | "pure_past" => Some(Fragment::PURE_PAST),
            "f-pure-past" | "f_pure_past" => Some(Fragment::F_PURE_PAST),
            _ => None,
        };
        if preset.is_some() {
            return preset;
        }
        let mut ops = OpSet::EMPTY;
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let op = Op::ALL.into_iter().find(|o| o.token() == tok)?;
            ops = ops.with(op);
        }
        Some(Fragment::plain(ops))
    }
}

impl fmt::Debug for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_recurrence() {
        assert_eq!(Formula::neg("p").size(), 1);
        let f = Formula::or(
            Formula::next(Formula::neg("p")),
            Formula::globally(Formula::pos("p")),
        );
        assert_eq!(f.size(), 5);
        assert_eq!(
            Formula::until(Formula::pos("a"), Formula::pos("b")).size(),
            3
        );
    }

    #[test]
    fn fragment_membership() {
        let f = Formula::until(Formula::pos("a"), Formula::pos("b"));
        assert!(!Fragment::XWXFG.contains(&f));
        assert!(Fragment::COSAFETY_U.contains(&f));
        let g = Formula::future(Formula::once(Formula::pos("a")));
        assert!(Fragment::F_PURE_PAST.contains(&g));
        assert!(!Fragment::PURE_PAST.contains(&g));
        assert!(!Fragment::F_PURE_PAST.contains(&Formula::once(Formula::pos("a"))));
        assert!(Fragment::PROP.contains(&Formula::and(Formula::pos("a"), Formula::neg("b"))));
    }

    #[test]
    fn op_set_masks_line_up() {
        assert_eq!(
            Fragment::XF.ops,
            OpSet::of(&[Op::X, Op::F])
        );
        assert_eq!(Fragment::XWXFG.ops, OpSet::of(&[Op::X, Op::WX, Op::F, Op::G]));
        assert_eq!(
            Fragment::COSAFETY_U.ops,
            OpSet::of(&[Op::X, Op::WX, Op::F, Op::G, Op::U])
        );
        assert_eq!(OpSet::PAST, OpSet::of(&[Op::Y, Op::WY, Op::O, Op::H]));
        assert_eq!(
            OpSet::FUTURE,
            OpSet::of(&[Op::X, Op::WX, Op::F, Op::G, Op::U])
        );
    }

    #[test]
    fn printer_spacing() {
        let f = Formula::or(
            Formula::next(Formula::neg("p")),
            Formula::globally(Formula::pos("p")),
        );
        assert_eq!(f.to_string(), "X !p | G p");
        let g = Formula::future(Formula::and(
            Formula::pos("qt"),
            Formula::once(Formula::pos("pt")),
        ));
        assert_eq!(g.to_string(), "F(qt & O pt)");
        let h = Formula::and(
            Formula::pos("a"),
            Formula::and(Formula::pos("b"), Formula::pos("c")),
        );
        assert_eq!(h.to_string(), "a & (b & c)");
        let u = Formula::future(Formula::until(Formula::pos("a"), Formula::pos("b")));
        assert_eq!(u.to_string(), "F(a U b)");
    }

    #[test]
    fn keywords_are_not_props() {
        assert!(Prop::new("wX").is_err());
        assert!(Prop::new("1p").is_err());
        assert!(Prop::new("p_1").is_ok());
        assert_eq!(Fragment::parse("X,F"), Some(Fragment::XF));
        assert_eq!(Fragment::parse("xwxfg"), Some(Fragment::XWXFG));
        assert_eq!(Fragment::parse("X,Q"), None);
    }
}
