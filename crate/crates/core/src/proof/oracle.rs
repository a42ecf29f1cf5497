use std::collections::HashSet;

use super::proposition_universe;
use crate::ltl::{Formula, Fragment, Op, Unary};
use crate::trace::TraceSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleResult {
    Found { size: usize, formula: Formula },
    NoneBelowBound,
}

impl OracleResult {
    pub fn size(&self) -> Option<usize> {
        match self {
            OracleResult::Found { size, .. } => Some(*size),
            OracleResult::NoneBelowBound => None,
        }
    }
}

// Truth values at every position of every trace, packed into words.
#[derive(Clone, PartialEq, Eq, Hash)]
struct Bv(Box<[u64]>);

struct Space {
    // (start, len) of each trace in the concatenation.
    segs: Vec<(usize, usize)>,
    total: usize,
}

impl Space {
    fn get(v: &Bv, i: usize) -> bool {
        v.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn pack(&self, f: impl Fn(usize) -> bool) -> Bv {
        let mut w = vec![0u64; self.total.div_ceil(64).max(1)];
        for i in 0..self.total {
            if f(i) {
                w[i / 64] |= 1 << (i % 64);
            }
        }
        Bv(w.into_boxed_slice())
    }

    fn zip(&self, x: &Bv, y: &Bv, op: impl Fn(u64, u64) -> u64) -> Bv {
        Bv(x.0.iter().zip(y.0.iter()).map(|(a, b)| op(*a, *b)).collect())
    }

    fn unary(&self, u: Unary, v: &Bv) -> Bv {
        let mut out = vec![false; self.total];
        for &(s, n) in &self.segs {
            let at = |k: usize| Self::get(v, s + k);
            match u {
                Unary::Next | Unary::WeakNext => {
                    for k in 0..n {
                        out[s + k] = if k + 1 < n { at(k + 1) } else { u == Unary::WeakNext };
                    }
                }
                Unary::Yesterday | Unary::WeakYesterday => {
                    for k in 0..n {
                        out[s + k] = if k > 0 { at(k - 1) } else { u == Unary::WeakYesterday };
                    }
                }
                Unary::Future | Unary::Globally => {
                    let any = u == Unary::Future;
                    let mut acc = !any;
                    for k in (0..n).rev() {
                        acc = if any { acc || at(k) } else { acc && at(k) };
                        out[s + k] = acc;
                    }
                }
                Unary::Once | Unary::Historically => {
                    let any = u == Unary::Once;
                    let mut acc = !any;
                    for k in 0..n {
                        acc = if any { acc || at(k) } else { acc && at(k) };
                        out[s + k] = acc;
                    }
                }
            }
        }
        self.pack(|i| out[i])
    }

    fn until(&self, l: &Bv, r: &Bv) -> Bv {
        let mut out = vec![false; self.total];
        for &(s, n) in &self.segs {
            let mut later = false;
            for k in (0..n).rev() {
                later = Self::get(r, s + k) || (Self::get(l, s + k) && later);
                out[s + k] = later;
            }
        }
        self.pack(|i| out[i])
    }
}

/// Enumerates formulas of `fragment` by increasing size, keeping one formula
/// per truth table over all positions of the instance, and returns the first
/// separator of size at most `max_size`.
pub fn brute_force_min_formula(a: &TraceSet, b: &TraceSet, fragment: &Fragment, max_size: usize) -> OracleResult {
    let all = a.union(b);
    let mut segs = Vec::new();
    let mut total = 0;
    for s in &all {
        segs.push((total, s.len()));
        total += s.len();
    }
    let start_of = |s| segs[all.position(s).expect("member of the union")].0;
    let a_starts: Vec<usize> = a.iter().map(start_of).collect();
    let b_starts: Vec<usize> = b.iter().map(start_of).collect();
    let space = Space { segs, total };

    // The top-level F of an F(pure past) fragment is applied at check time.
    let wrap_f = fragment.top_future;
    let is_sep = |v: &Bv| {
        let v = if wrap_f { space.unary(Unary::Future, v) } else { v.clone() };
        a_starts.iter().all(|&i| Space::get(&v, i)) && b_starts.iter().all(|&i| !Space::get(&v, i))
    };
    let found = |size: usize, f: &Formula| OracleResult::Found {
        size,
        formula: if wrap_f { Formula::future(f.clone()) } else { f.clone() },
    };
    let extra = usize::from(wrap_f);
    if max_size < 1 + extra {
        return OracleResult::NoneBelowBound;
    }

    let unaries: Vec<Unary> = Unary::ALL.into_iter().filter(|u| fragment.allows(u.op())).collect();
    let mut seen: HashSet<Bv> = HashSet::new();
    // levels[s] holds the classes first reached at size s.
    let mut levels: Vec<Vec<(Bv, Formula)>> = vec![vec![]];

    let mut first = Vec::new();
    for p in proposition_universe(a, b, &[]) {
        for pos in [true, false] {
            let v = space.pack(|i| {
                let (k, off) = locate(&space.segs, i);
                all.members()[k].letters()[off].contains(&p) == pos
            });
            let f = Formula::lit(&p, pos);
            if seen.insert(v.clone()) {
                if is_sep(&v) {
                    return found(1 + extra, &f);
                }
                first.push((v, f));
            }
        }
    }
    levels.push(first);

    for size in 2..=(max_size - extra) {
        let mut acc = Acc {
            seen: &mut seen,
            level: Vec::new(),
            hit: None,
        };
        for u in &unaries {
            for (v, f) in &levels[size - 1] {
                acc.add(space.unary(*u, v), || Formula::unary(*u, f.clone()), &is_sep);
            }
        }
        for i in 1..size - 1 {
            let j = size - 1 - i;
            if i <= j {
                for (x, (vx, fx)) in levels[i].iter().enumerate() {
                    let from = if i == j { x } else { 0 };
                    for (vy, fy) in &levels[j][from..] {
                        let and = space.zip(vx, vy, |p, q| p & q);
                        acc.add(and, || Formula::and(fx.clone(), fy.clone()), &is_sep);
                        let or = space.zip(vx, vy, |p, q| p | q);
                        acc.add(or, || Formula::or(fx.clone(), fy.clone()), &is_sep);
                    }
                }
            }
            if fragment.allows(Op::U) {
                for (vx, fx) in &levels[i] {
                    for (vy, fy) in &levels[j] {
                        acc.add(space.until(vx, vy), || Formula::until(fx.clone(), fy.clone()), &is_sep);
                    }
                }
            }
        }
        let Acc { level, hit, .. } = acc;
        if let Some(f) = hit {
            return found(size + extra, &f);
        }
        levels.push(level);
    }
    OracleResult::NoneBelowBound
}

struct Acc<'s> {
    seen: &'s mut HashSet<Bv>,
    level: Vec<(Bv, Formula)>,
    hit: Option<Formula>,
}

impl Acc<'_> {
    fn add(&mut self, v: Bv, mk: impl FnOnce() -> Formula, is_sep: &impl Fn(&Bv) -> bool) {
        if self.seen.contains(&v) {
            return;
        }
        let f = mk();
        if self.hit.is_none() && is_sep(&v) {
            self.hit = Some(f.clone());
        }
        self.seen.insert(v.clone());
        self.level.push((v, f));
    }
}

fn locate(segs: &[(usize, usize)], i: usize) -> (usize, usize) {
    let k = segs.partition_point(|&(s, _)| s <= i) - 1;
    (k, i - segs[k].0)
}

#[cfg(test)]
mod tests {
    use super::super::tests::ab;
    use super::*;
    use crate::ltl::separates;

    #[test]
    fn worked_example() {
        let (a, b) = (ab(&["abaa", "aaaa"]), ab(&["aaab"]));
        let r = brute_force_min_formula(&a, &b, &Fragment::XWXFG, 5);
        let OracleResult::Found { size, formula } = r else { panic!("{r:?}") };
        assert_eq!(size, 3);
        assert!(separates(&formula, &a, &b));
        assert_eq!(brute_force_min_formula(&a, &b, &Fragment::XWXFG, 2), OracleResult::NoneBelowBound);
    }

    #[test]
    fn trivial_and_overlap() {
        assert_eq!(brute_force_min_formula(&ab(&["a"]), &ab(&["b"]), &Fragment::PROP, 3).size(), Some(1));
        assert_eq!(
            brute_force_min_formula(&ab(&["ab"]), &ab(&["ab"]), &Fragment::XWXFG, 5),
            OracleResult::NoneBelowBound
        );
    }

    #[test]
    fn top_level_future_over_past() {
        // F(p & Y !p): some position where p starts
        let (a, b) = (ab(&["bba"]), ab(&["aaa", "bbb"]));
        let r = brute_force_min_formula(&a, &b, &Fragment::F_PURE_PAST, 5);
        let OracleResult::Found { size, formula } = r else { panic!("{r:?}") };
        assert!(separates(&formula, &a, &b));
        assert!(Fragment::F_PURE_PAST.contains(&formula));
        assert!(size <= 5);
    }
}
