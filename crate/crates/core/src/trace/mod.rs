//! Finite traces over `2^AP`, shared-storage suffixes and the suffix algebra
//! used by the proof rules.

mod io;

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::ltl::Prop;

pub use io::{load_traces, parse_trace, parse_traces, read_traces, save_traces, write_traces, TraceFormatError};

/// One position of a trace: the set of propositions that hold there.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(Vec<Prop>);

impl Letter {
    pub fn empty() -> Letter {
        Letter(Vec::new())
    }

    pub fn new<I: IntoIterator<Item = Prop>>(props: I) -> Letter {
        let mut v: Vec<Prop> = props.into_iter().collect();
        v.sort();
        v.dedup();
        Letter(v)
    }

    pub fn contains(&self, p: &Prop) -> bool {
        self.0.binary_search(p).is_ok()
    }

    pub fn props(&self) -> &[Prop] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("-");
        }
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(p.name())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

/// A nonempty finite word. Cloning is cheap.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Trace(Arc<[Letter]>);

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("traces must be nonempty")]
pub struct EmptyTrace;

impl Trace {
    pub fn new(letters: Vec<Letter>) -> Result<Trace, EmptyTrace> {
        if letters.is_empty() {
            return Err(EmptyTrace);
        }
        Ok(Trace(letters.into()))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn suffix(&self, offset: usize) -> Option<SuffixRef> {
        (offset < self.len()).then(|| SuffixRef {
            base: self.clone(),
            offset,
        })
    }

    pub fn whole(&self) -> SuffixRef {
        SuffixRef {
            base: self.clone(),
            offset: 0,
        }
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_letters(self.letters(), f)
    }
}

impl fmt::Debug for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

fn fmt_letters(letters: &[Letter], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for (i, l) in letters.iter().enumerate() {
        if i > 0 {
            f.write_str(";")?;
        }
        write!(f, "{l}")?;
    }
    Ok(())
}

/// `base[offset..]`, sharing storage with `base`. Equality, ordering and
/// hashing look only at the letters.
#[derive(Clone)]
pub struct SuffixRef {
    base: Trace,
    offset: usize,
}

impl SuffixRef {
    pub fn letters(&self) -> &[Letter] {
        &self.base.letters()[self.offset..]
    }

    pub fn len(&self) -> usize {
        self.base.len() - self.offset
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn base(&self) -> &Trace {
        &self.base
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn first(&self) -> &Letter {
        &self.letters()[0]
    }

    /// The suffix `k` further positions in, if it exists.
    pub fn shift(&self, k: usize) -> Option<SuffixRef> {
        self.base.suffix(self.offset + k)
    }

    /// Copies the letters into a standalone trace.
    pub fn to_trace(&self) -> Trace {
        if self.offset == 0 {
            return self.base.clone();
        }
        Trace(self.letters().into())
    }

    pub fn is_prefix_of(&self, other: &SuffixRef) -> bool {
        other.letters().starts_with(self.letters())
    }

    pub fn is_suffix_of(&self, other: &SuffixRef) -> bool {
        other.letters().ends_with(self.letters())
    }
}

impl From<Trace> for SuffixRef {
    fn from(t: Trace) -> Self {
        t.whole()
    }
}

impl PartialEq for SuffixRef {
    fn eq(&self, other: &Self) -> bool {
        self.letters() == other.letters()
    }
}

impl Eq for SuffixRef {}

impl PartialOrd for SuffixRef {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SuffixRef {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters().cmp(other.letters())
    }
}

impl Hash for SuffixRef {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.letters().hash(state)
    }
}

impl fmt::Display for SuffixRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_letters(self.letters(), f)
    }
}

impl fmt::Debug for SuffixRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

/// A finite set of traces, kept sorted and deduplicated by content.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TraceSet(Vec<SuffixRef>);

impl TraceSet {
    pub fn new() -> TraceSet {
        TraceSet(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SuffixRef> {
        self.0.iter()
    }

    pub fn members(&self) -> &[SuffixRef] {
        &self.0
    }

    pub fn contains(&self, s: &SuffixRef) -> bool {
        self.0.binary_search(s).is_ok()
    }

    pub fn position(&self, s: &SuffixRef) -> Option<usize> {
        self.0.binary_search(s).ok()
    }

    pub fn is_subset(&self, other: &TraceSet) -> bool {
        self.0.iter().all(|s| other.contains(s))
    }

    pub fn intersects(&self, other: &TraceSet) -> bool {
        let (small, big) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.iter().any(|s| big.contains(s))
    }

    pub fn union(&self, other: &TraceSet) -> TraceSet {
        self.iter().chain(other.iter()).cloned().collect()
    }

    pub fn filter(&self, mut keep: impl FnMut(&SuffixRef) -> bool) -> TraceSet {
        TraceSet(self.0.iter().filter(|s| keep(s)).cloned().collect())
    }

    /// Builds a set from traces given as strings in the trace file format.
    pub fn parse<'a, I: IntoIterator<Item = &'a str>>(lines: I) -> Result<TraceSet, TraceFormatError> {
        lines
            .into_iter()
            .enumerate()
            .map(|(i, l)| parse_trace(l).map_err(|e| e.at_line(i + 1)))
            .collect()
    }

    /// Every distinct proposition that occurs in some member.
    pub fn props(&self) -> Vec<Prop> {
        let mut out: Vec<Prop> = self
            .iter()
            .flat_map(|s| s.letters().iter().flat_map(|l| l.props().iter().cloned()))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn max_len(&self) -> usize {
        self.iter().map(SuffixRef::len).max().unwrap_or(0)
    }
}

impl FromIterator<SuffixRef> for TraceSet {
    fn from_iter<I: IntoIterator<Item = SuffixRef>>(iter: I) -> Self {
        let mut v: Vec<SuffixRef> = iter.into_iter().collect();
        v.sort();
        v.dedup();
        TraceSet(v)
    }
}

impl FromIterator<Trace> for TraceSet {
    fn from_iter<I: IntoIterator<Item = Trace>>(iter: I) -> Self {
        iter.into_iter().map(SuffixRef::from).collect()
    }
}

impl<'a> IntoIterator for &'a TraceSet {
    type Item = &'a SuffixRef;
    type IntoIter = std::slice::Iter<'a, SuffixRef>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Debug for TraceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

/// One position per member of a trace set, aligned with the set's canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FuturePoint(pub Vec<usize>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FuturePointError {
    #[error("future point has {got} entries for a set of {expected} traces")]
    Arity { expected: usize, got: usize },
    #[error("position {pos} out of range for member {member} of length {len}")]
    Range { member: usize, pos: usize, len: usize },
}

impl FuturePoint {
    pub fn zero(a: &TraceSet) -> FuturePoint {
        FuturePoint(vec![0; a.len()])
    }

    pub fn check(&self, a: &TraceSet) -> Result<(), FuturePointError> {
        if self.0.len() != a.len() {
            return Err(FuturePointError::Arity {
                expected: a.len(),
                got: self.0.len(),
            });
        }
        for (member, (s, &pos)) in a.iter().zip(&self.0).enumerate() {
            if pos >= s.len() {
                return Err(FuturePointError::Range {
                    member,
                    pos,
                    len: s.len(),
                });
            }
        }
        Ok(())
    }
}

/// `{ s[1..] : s in A, |s| >= 2 }`.
pub fn suffix_x(a: &TraceSet) -> TraceSet {
    a.iter().filter_map(|s| s.shift(1)).collect()
}

/// Every suffix of every member.
pub fn suffix_g(a: &TraceSet) -> TraceSet {
    a.iter()
        .flat_map(|s| (0..s.len()).filter_map(move |k| s.shift(k)))
        .collect()
}

/// `{ s[f(s)..] : s in A }`.
pub fn apply_future_point(a: &TraceSet, f: &FuturePoint) -> Result<TraceSet, FuturePointError> {
    f.check(a)?;
    Ok(a.iter()
        .zip(&f.0)
        .map(|(s, &k)| s.shift(k).expect("checked"))
        .collect())
}

/// Lazily enumerates every future point of `a`, lexicographically with the
/// last member varying fastest. The empty set has exactly one future point.
pub fn enumerate_future_points(a: &TraceSet) -> FuturePoints {
    FuturePoints {
        lens: a.iter().map(SuffixRef::len).collect(),
        next: Some(vec![0; a.len()]),
    }
}

pub struct FuturePoints {
    lens: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Iterator for FuturePoints {
    type Item = FuturePoint;

    fn next(&mut self) -> Option<FuturePoint> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        let mut i = succ.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            succ[i] += 1;
            if succ[i] < self.lens[i] {
                self.next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(FuturePoint(cur))
    }
}

pub fn reverse_trace(t: &Trace) -> Trace {
    let mut v = t.letters().to_vec();
    v.reverse();
    Trace(v.into())
}

/// Reverses every member of a set.
pub fn reverse_set(a: &TraceSet) -> TraceSet {
    a.iter().map(|s| reverse_trace(&s.to_trace())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(lines: &[&str]) -> TraceSet {
        TraceSet::parse(lines.iter().copied()).unwrap()
    }

    // a = {p}, b = {} in the two-letter examples
    const A: &str = "p";
    const B: &str = "-";

    fn w(s: &str) -> String {
        s.chars()
            .map(|c| if c == 'a' { A } else { B })
            .collect::<Vec<_>>()
            .join(";")
    }

    #[test]
    fn next_step() {
        let s = set(&[&w("abaa"), &w("aaaa")]);
        assert_eq!(suffix_x(&s), set(&[&w("baa"), &w("aaa")]));
        assert!(suffix_x(&set(&[&w("a")])).is_empty());
        assert_eq!(suffix_x(&set(&[&w("ab"), &w("bb")])), set(&[&w("b")]));
    }

    #[test]
    fn all_suffixes() {
        assert_eq!(
            suffix_g(&set(&[&w("aaaa")])),
            set(&[&w("aaaa"), &w("aaa"), &w("aa"), &w("a")])
        );
        assert_eq!(suffix_g(&set(&[&w("ab")])), set(&[&w("ab"), &w("b")]));
    }

    #[test]
    fn future_points() {
        let s = set(&[&w("aaab")]);
        assert_eq!(
            apply_future_point(&s, &FuturePoint(vec![3])).unwrap(),
            set(&[&w("b")])
        );
        assert_eq!(apply_future_point(&s, &FuturePoint::zero(&s)).unwrap(), s);
        assert!(apply_future_point(&s, &FuturePoint(vec![4])).is_err());
        assert_eq!(enumerate_future_points(&set(&[&w("ab")])).count(), 2);
        assert_eq!(
            enumerate_future_points(&set(&[&w("ab"), &w("abb")])).count(),
            6
        );
        let empty: Vec<_> = enumerate_future_points(&TraceSet::new()).collect();
        assert_eq!(empty, vec![FuturePoint(vec![])]);
        let order: Vec<_> = enumerate_future_points(&set(&[&w("ab"), &w("b")]))
            .map(|f| f.0)
            .collect();
        // "b" sorts before "ab" because the empty letter is least
        assert_eq!(order, vec![vec![0, 0], vec![0, 1]]);
    }

    #[test]
    fn reversal() {
        let t = parse_trace(&w("abaa")).unwrap();
        assert_eq!(reverse_trace(&t), parse_trace(&w("aaba")).unwrap());
        assert_eq!(reverse_trace(&reverse_trace(&t)), t);
    }

    #[test]
    fn suffixes_compare_by_content() {
        let t1 = parse_trace("p;q").unwrap();
        let t2 = parse_trace("q").unwrap();
        assert_eq!(t1.suffix(1).unwrap(), t2.whole());
        let s: TraceSet = [t1.suffix(1).unwrap(), t2.whole()].into_iter().collect();
        assert_eq!(s.len(), 1);
    }
}
