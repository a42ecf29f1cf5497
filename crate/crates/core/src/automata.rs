//! Deterministic automata over explicit alphabets, read either as DFAs on
//! finite words or as deterministic Büchi automata on lasso words.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde_json::{json, Value};

use crate::ltl::{Formula, Fragment, Prop, Unary};
use crate::trace::{parse_trace, Letter};

/// Largest proposition count for which letters are materialized.
pub const MAX_PROPS: usize = 4;
const MAX_STATES: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AutomatonError {
    #[error("{0} is outside the {{X, wX, F, G}} fragment")]
    Fragment(Formula),
    #[error("{0} uses propositions outside the alphabet")]
    ForeignProp(Formula),
    #[error("at most {MAX_PROPS} propositions, got {0}")]
    TooManyProps(usize),
    #[error("the alphabet is empty")]
    EmptyAlphabet,
    #[error("letter {0} is not in the alphabet")]
    UnknownLetter(String),
    #[error("accepting state {0} is not a trap")]
    NotTrapClosed(usize),
    #[error("more than {MAX_STATES} states")]
    TooManyStates,
    #[error("lasso period must be nonempty")]
    EmptyPeriod,
    #[error("automaton JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    pub letters: Vec<Letter>,
    pub states: usize,
    pub initial: usize,
    pub accepting: BTreeSet<usize>,
    /// `delta[q][k]` is the successor of `q` on `letters[k]`.
    pub delta: Vec<Vec<usize>>,
}

/// `u · v^ω` with `v` nonempty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LassoWord {
    pub u: Vec<Letter>,
    pub v: Vec<Letter>,
}

impl LassoWord {
    pub fn new(u: Vec<Letter>, v: Vec<Letter>) -> Result<LassoWord, AutomatonError> {
        if v.is_empty() {
            return Err(AutomatonError::EmptyPeriod);
        }
        Ok(LassoWord { u, v })
    }
}

/// Every subset of `props`, in letter order.
pub fn all_letters(props: &[Prop]) -> Vec<Letter> {
    let mut out: Vec<Letter> = (0..1usize << props.len())
        .map(|m| Letter::new((0..props.len()).filter(|i| m >> i & 1 == 1).map(|i| props[i].clone())))
        .collect();
    out.sort();
    out
}

impl Dfa {
    pub fn new(
        letters: Vec<Letter>,
        initial: usize,
        accepting: BTreeSet<usize>,
        delta: Vec<Vec<usize>>,
    ) -> Result<Dfa, AutomatonError> {
        if letters.is_empty() {
            return Err(AutomatonError::EmptyAlphabet);
        }
        let states = delta.len();
        let bad = |m: &str| Err(AutomatonError::Json(m.to_string()));
        if initial >= states {
            return bad("initial state out of range");
        }
        if accepting.iter().any(|&q| q >= states) {
            return bad("accepting state out of range");
        }
        if delta.iter().any(|row| row.len() != letters.len() || row.iter().any(|&q| q >= states)) {
            return bad("transition table is not total");
        }
        Ok(Dfa {
            letters,
            states,
            initial,
            accepting,
            delta,
        })
    }

    fn letter_index(&self, l: &Letter) -> Result<usize, AutomatonError> {
        self.letters
            .binary_search(l)
            .or_else(|_| self.letters.iter().position(|x| x == l).ok_or(()))
            .map_err(|_| AutomatonError::UnknownLetter(l.to_string()))
    }

    fn run(&self, from: usize, word: &[Letter]) -> Result<usize, AutomatonError> {
        word.iter().try_fold(from, |q, l| Ok(self.delta[q][self.letter_index(l)?]))
    }

    pub fn is_trap(&self, q: usize) -> bool {
        self.delta[q].iter().all(|&r| r == q)
    }
}

/// Finite-word acceptance.
pub fn dfa_accepts(a: &Dfa, word: &[Letter]) -> Result<bool, AutomatonError> {
    Ok(a.accepting.contains(&a.run(a.initial, word)?))
}

/// Büchi acceptance of `u · v^ω`.
pub fn lasso_accepts(a: &Dfa, w: &LassoWord) -> Result<bool, AutomatonError> {
    if w.v.is_empty() {
        return Err(AutomatonError::EmptyPeriod);
    }
    let period: Vec<usize> = w.v.iter().map(|l| a.letter_index(l)).collect::<Result<_, _>>()?;
    let mut q = a.run(a.initial, &w.u)?;
    // starts[k] is the state before the k-th copy of v; visited[k] is whether
    // that copy passes an accepting state.
    let mut starts: Vec<usize> = Vec::new();
    let mut visited: Vec<bool> = Vec::new();
    for _ in 0..=a.states {
        if let Some(k) = starts.iter().position(|&s| s == q) {
            return Ok(visited[k..].iter().any(|&x| x));
        }
        starts.push(q);
        let mut hit = false;
        for &k in &period {
            q = a.delta[q][k];
            hit |= a.accepting.contains(&q);
        }
        visited.push(hit);
    }
    unreachable!("a start state repeats within |states| + 1 copies")
}

/// Accepting states become accepting traps.
pub fn trap_close(a: &Dfa) -> Dfa {
    let mut out = a.clone();
    for &q in &a.accepting {
        out.delta[q].iter_mut().for_each(|r| *r = q);
    }
    out
}

/// Accepting traps restart from the initial state's successors.
pub fn gf_close(a: &Dfa) -> Result<Dfa, AutomatonError> {
    if let Some(&q) = a.accepting.iter().find(|&&q| !a.is_trap(q)) {
        return Err(AutomatonError::NotTrapClosed(q));
    }
    let mut out = a.clone();
    for &q in &a.accepting {
        out.delta[q] = a.delta[a.initial].clone();
    }
    Ok(out)
}

/// Prepends `j` non-accepting states that skip any `j` letters.
pub fn prefix_chain(a: &Dfa, j: usize) -> Dfa {
    if j == 0 {
        return a.clone();
    }
    let n = a.states;
    let mut out = a.clone();
    for k in 0..j {
        let next = if k + 1 < j { n + k + 1 } else { a.initial };
        out.delta.push(vec![next; a.letters.len()]);
    }
    out.states = n + j;
    out.initial = n;
    out
}

// Obligations on the remaining suffix: `strong` needs it nonempty and
// satisfying the formula; weak also accepts the empty suffix.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Atom {
    strong: bool,
    f: Formula,
}

// Positive Boolean combination in DNF: a set of clauses, each a set of atoms.
// `{}` is false, `{{}}` is true.
type State = BTreeSet<BTreeSet<Atom>>;

fn tt() -> State {
    BTreeSet::from([BTreeSet::new()])
}

fn atom(strong: bool, f: &Formula) -> State {
    BTreeSet::from([BTreeSet::from([Atom { strong, f: f.clone() }])])
}

// Removes clauses that contain another clause, and weak atoms implied by a
// strong atom for the same formula.
fn normalize(s: State) -> State {
    let cleaned: Vec<BTreeSet<Atom>> = s
        .into_iter()
        .map(|c| {
            let strong: BTreeSet<&Formula> = c.iter().filter(|a| a.strong).map(|a| &a.f).collect();
            c.iter().filter(|a| a.strong || !strong.contains(&a.f)).cloned().collect()
        })
        .collect();
    cleaned
        .iter()
        .filter(|c| !cleaned.iter().any(|d| d != *c && d.is_subset(c)))
        .cloned()
        .collect()
}

fn or(x: State, y: State) -> State {
    normalize(x.into_iter().chain(y).collect())
}

fn and(x: &State, y: &State) -> State {
    normalize(x.iter().flat_map(|c| y.iter().map(move |d| c.union(d).cloned().collect())).collect())
}

// What `f` at the current position, reading `l`, demands of the rest.
fn progress(f: &Formula, l: &Letter) -> State {
    match f {
        Formula::Lit(p, pos) => {
            if l.contains(p) == *pos {
                tt()
            } else {
                State::new()
            }
        }
        Formula::Or(x, y) => or(progress(x, l), progress(y, l)),
        Formula::And(x, y) => and(&progress(x, l), &progress(y, l)),
        Formula::Unary(Unary::Next, g) => atom(true, g),
        Formula::Unary(Unary::WeakNext, g) => atom(false, g),
        Formula::Unary(Unary::Future, g) => or(progress(g, l), atom(true, f)),
        Formula::Unary(Unary::Globally, g) => and(&progress(g, l), &atom(false, f)),
        _ => unreachable!("fragment checked on entry"),
    }
}

fn step(s: &State, l: &Letter) -> State {
    s.iter().fold(State::new(), |acc, clause| {
        let conj = clause.iter().fold(tt(), |c, a| and(&c, &progress(&a.f, l)));
        or(acc, conj)
    })
}

fn explore(start: State, letters: &[Letter]) -> Result<Dfa, AutomatonError> {
    let mut ids: HashMap<State, usize> = HashMap::new();
    let mut order: Vec<State> = Vec::new();
    let mut queue = VecDeque::new();
    ids.insert(start.clone(), 0);
    order.push(start.clone());
    queue.push_back(start);
    let mut delta: Vec<Vec<usize>> = Vec::new();
    while let Some(s) = queue.pop_front() {
        let mut row = Vec::with_capacity(letters.len());
        for l in letters {
            let t = step(&s, l);
            let id = match ids.get(&t) {
                Some(&id) => id,
                None => {
                    if order.len() >= MAX_STATES {
                        return Err(AutomatonError::TooManyStates);
                    }
                    let id = order.len();
                    ids.insert(t.clone(), id);
                    order.push(t.clone());
                    queue.push_back(t);
                    id
                }
            };
            row.push(id);
        }
        delta.push(row);
    }
    let accepting = order
        .iter()
        .enumerate()
        .filter(|(_, s)| s.iter().any(|c| c.iter().all(|a| !a.strong)))
        .map(|(i, _)| i)
        .collect();
    Dfa::new(letters.to_vec(), 0, accepting, delta)
}

/// Derivative automaton for `f` over all letters of `props`, accepting
/// exactly the nonempty words satisfying `f` at position 0.
///
/// The start state is either `X f` or `wX f` read one step early; both give
/// the same language on nonempty words and the smaller automaton is kept.
pub fn dfa_from_formula(f: &Formula, props: &[Prop]) -> Result<Dfa, AutomatonError> {
    if !Fragment::XWXFG.contains(f) {
        return Err(AutomatonError::Fragment(f.clone()));
    }
    if props.len() > MAX_PROPS {
        return Err(AutomatonError::TooManyProps(props.len()));
    }
    if f.props().iter().any(|p| !props.contains(p)) {
        return Err(AutomatonError::ForeignProp(f.clone()));
    }
    let letters = all_letters(props);
    let strong = explore(atom(true, f), &letters)?;
    let weak = explore(atom(false, f), &letters)?;
    Ok(if weak.states < strong.states { weak } else { strong })
}

pub fn dfa_to_json(a: &Dfa) -> Value {
    json!({
        "letters": a.letters.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
        "states": a.states,
        "initial": a.initial,
        "accepting": a.accepting.iter().collect::<Vec<_>>(),
        "delta": a.delta,
    })
}

pub fn dfa_from_json(v: &Value) -> Result<Dfa, AutomatonError> {
    let bad = |m: &str| AutomatonError::Json(m.to_string());
    let letters = v["letters"]
        .as_array()
        .ok_or_else(|| bad("letters must be an array"))?
        .iter()
        .map(|x| {
            let s = x.as_str().ok_or_else(|| bad("letters must be strings"))?;
            let t = parse_trace(s).map_err(|e| AutomatonError::Json(e.to_string()))?;
            match t.letters() {
                [l] => Ok(l.clone()),
                _ => Err(bad("each letter must be a single position")),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let num = |x: &Value| x.as_u64().map(|n| n as usize).ok_or_else(|| bad("expected a state index"));
    let initial = num(&v["initial"])?;
    let accepting = v["accepting"]
        .as_array()
        .ok_or_else(|| bad("accepting must be an array"))?
        .iter()
        .map(num)
        .collect::<Result<_, _>>()?;
    let delta = v["delta"]
        .as_array()
        .ok_or_else(|| bad("delta must be an array"))?
        .iter()
        .map(|row| row.as_array().ok_or_else(|| bad("delta rows must be arrays"))?.iter().map(num).collect())
        .collect::<Result<Vec<Vec<usize>>, _>>()?;
    if let Some(n) = v.get("states") {
        if num(n)? != delta.len() {
            return Err(bad("states does not match the transition table"));
        }
    }
    Dfa::new(letters, initial, accepting, delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::{eval, eval_lasso, parse_formula, prop};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn words(letters: &[Letter], max: usize) -> Vec<Vec<Letter>> {
        let mut out = vec![];
        let mut layer: Vec<Vec<Letter>> = vec![vec![]];
        for _ in 0..max {
            layer = layer
                .iter()
                .flat_map(|w| {
                    letters.iter().map(move |l| {
                        let mut w = w.clone();
                        w.push(l.clone());
                        w
                    })
                })
                .collect();
            out.extend(layer.iter().cloned());
        }
        out
    }

    #[test]
    fn small_automata() {
        let ap = [prop("p")];
        let fp = dfa_from_formula(&f("F p"), &ap).unwrap();
        assert_eq!(fp.states, 2);
        let gp = dfa_from_formula(&f("G p"), &ap).unwrap();
        assert_eq!(gp.states, 2);
        for text in ["F p", "G p", "p", "X !p | G p", "wX wX p", "F(p & X !p)"] {
            let a = dfa_from_formula(&f(text), &ap).unwrap();
            for w in words(&a.letters, 5) {
                assert_eq!(dfa_accepts(&a, &w).unwrap(), eval(&w, 0, &f(text)).unwrap(), "{text} on {w:?}");
            }
        }
        assert!(dfa_from_formula(&f("(p U p)"), &ap).is_err());
        assert!(dfa_from_formula(&f("q"), &ap).is_err());
    }

    #[test]
    fn closures_and_chain() {
        let ap = [prop("p")];
        let l = all_letters(&ap);
        let (none, some) = (l[0].clone(), l[1].clone());
        let fp = dfa_from_formula(&f("F p"), &ap).unwrap();
        assert_eq!(trap_close(&fp), fp);
        let first = dfa_from_formula(&f("p"), &ap).unwrap();
        let closed = trap_close(&first);
        assert_eq!(trap_close(&closed), closed);
        assert!(dfa_accepts(&closed, &[some.clone(), none.clone()]).unwrap());
        let gp = dfa_from_formula(&f("G p"), &ap).unwrap();
        assert!(matches!(gf_close(&gp), Err(AutomatonError::NotTrapClosed(_))));

        let gf = gf_close(&fp).unwrap();
        assert_eq!(gf.states, fp.states);
        let lasso = |u: &[Letter], v: &[Letter]| LassoWord::new(u.to_vec(), v.to_vec()).unwrap();
        assert!(lasso_accepts(&gf, &lasso(&[], &[some.clone(), none.clone()])).unwrap());
        assert!(!lasso_accepts(&gf, &lasso(std::slice::from_ref(&some), std::slice::from_ref(&none))).unwrap());
        let gfp = f("G F p");
        assert!(eval_lasso(&[], &[some.clone(), none.clone()], &gfp).unwrap());

        let chained = prefix_chain(&gf, 2);
        assert_eq!(chained.states, gf.states + 2);
        assert!(lasso_accepts(&chained, &lasso(&[none.clone(), none.clone()], &[some.clone(), none.clone()])).unwrap());
        assert_eq!(prefix_chain(&gf, 0), gf);
    }

    #[test]
    fn accepting_initial_accepts_everything() {
        let ap = [prop("p")];
        let l = all_letters(&ap);
        let a = Dfa::new(l.clone(), 0, BTreeSet::from([0]), vec![vec![0, 0]]).unwrap();
        let gf = gf_close(&a).unwrap();
        for w in words(&l, 3) {
            assert!(lasso_accepts(&gf, &LassoWord::new(vec![], w).unwrap()).unwrap());
        }
    }

    #[test]
    fn json_round_trip() {
        let a = dfa_from_formula(&f("X !p | G p"), &[prop("p")]).unwrap();
        assert_eq!(dfa_from_json(&dfa_to_json(&a)).unwrap(), a);
        assert!(dfa_from_json(&json!({"letters": [], "initial": 0, "accepting": [], "delta": []})).is_err());
    }
}
