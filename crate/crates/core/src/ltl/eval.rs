use super::formula::{Formula, Unary};
use crate::trace::{Letter, TraceSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("position {pos} out of range for a trace of length {len}")]
    OutOfRange { pos: usize, len: usize },
    #[error("lasso evaluation supports future operators only")]
    PastOperator,
    #[error("lasso period must be nonempty")]
    EmptyPeriod,
}

/// Truth value of `f` at every position of a finite word, computed bottom-up
/// in `O(|w| * size(f))`.
pub fn eval_all(w: &[Letter], f: &Formula) -> Vec<bool> {
    let n = w.len();
    match f {
        Formula::Lit(p, pos) => w.iter().map(|l| l.contains(p) == *pos).collect(),
        Formula::Or(l, r) => zip(eval_all(w, l), eval_all(w, r), |x, y| x || y),
        Formula::And(l, r) => zip(eval_all(w, l), eval_all(w, r), |x, y| x && y),
        Formula::Until(l, r) => {
            let (l, r) = (eval_all(w, l), eval_all(w, r));
            let mut out = vec![false; n];
            let mut later = false;
            for i in (0..n).rev() {
                later = r[i] || (l[i] && later);
                out[i] = later;
            }
            out
        }
        Formula::Unary(op, g) => {
            let v = eval_all(w, g);
            let mut out = vec![false; n];
            match op {
                Unary::Next | Unary::WeakNext => {
                    for i in 0..n {
                        out[i] = if i + 1 < n { v[i + 1] } else { *op == Unary::WeakNext };
                    }
                }
                Unary::Yesterday | Unary::WeakYesterday => {
                    for i in 0..n {
                        out[i] = if i > 0 { v[i - 1] } else { *op == Unary::WeakYesterday };
                    }
                }
                Unary::Future | Unary::Globally => {
                    let any = *op == Unary::Future;
                    let mut acc = !any;
                    for i in (0..n).rev() {
                        acc = if any { acc || v[i] } else { acc && v[i] };
                        out[i] = acc;
                    }
                }
                Unary::Once | Unary::Historically => {
                    let any = *op == Unary::Once;
                    let mut acc = !any;
                    for i in 0..n {
                        acc = if any { acc || v[i] } else { acc && v[i] };
                        out[i] = acc;
                    }
                }
            }
            out
        }
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

/// `w, i |= f` on a finite word.
pub fn eval(w: &[Letter], i: usize, f: &Formula) -> Result<bool, EvalError> {
    if i >= w.len() {
        return Err(EvalError::OutOfRange { pos: i, len: w.len() });
    }
    Ok(eval_all(w, f)[i])
}

/// Every member of `a` satisfies `f` at position 0 and no member of `b` does.
pub fn separates(f: &Formula, a: &TraceSet, b: &TraceSet) -> bool {
    a.iter().all(|s| eval_all(s.letters(), f)[0]) && b.iter().all(|s| !eval_all(s.letters(), f)[0])
}

/// Satisfaction of the infinite word `u v^ω` at position 0.
pub fn eval_lasso(u: &[Letter], v: &[Letter], f: &Formula) -> Result<bool, EvalError> {
    if v.is_empty() {
        return Err(EvalError::EmptyPeriod);
    }
    if f.has_past() {
        return Err(EvalError::PastOperator);
    }
    let word: Vec<Letter> = u.iter().chain(v).cloned().collect();
    Ok(lasso_all(&word, u.len(), f)[0])
}

// Positions are 0..|u|+|v|; the successor of the last one is |u|.
fn lasso_all(w: &[Letter], loop_start: usize, f: &Formula) -> Vec<bool> {
    let n = w.len();
    let succ = |i: usize| if i + 1 < n { i + 1 } else { loop_start };
    match f {
        Formula::Lit(p, pos) => w.iter().map(|l| l.contains(p) == *pos).collect(),
        Formula::Or(l, r) => zip(lasso_all(w, loop_start, l), lasso_all(w, loop_start, r), |x, y| x || y),
        Formula::And(l, r) => zip(lasso_all(w, loop_start, l), lasso_all(w, loop_start, r), |x, y| x && y),
        Formula::Until(l, r) => {
            let (l, r) = (lasso_all(w, loop_start, l), lasso_all(w, loop_start, r));
            fixpoint(n, false, |i, cur| r[i] || (l[i] && cur[succ(i)]))
        }
        Formula::Unary(op, g) => {
            let v = lasso_all(w, loop_start, g);
            match op {
                Unary::Next | Unary::WeakNext => (0..n).map(|i| v[succ(i)]).collect(),
                Unary::Future => fixpoint(n, false, |i, cur| v[i] || cur[succ(i)]),
                Unary::Globally => fixpoint(n, true, |i, cur| v[i] && cur[succ(i)]),
                _ => unreachable!("past operators rejected by eval_lasso"),
            }
        }
    }
}

fn fixpoint(n: usize, init: bool, step: impl Fn(usize, &[bool]) -> bool) -> Vec<bool> {
    let mut cur = vec![init; n];
    loop {
        let next: Vec<bool> = (0..n).map(|i| step(i, &cur)).collect();
        if next == cur {
            return cur;
        }
        cur = next;
    }
}
