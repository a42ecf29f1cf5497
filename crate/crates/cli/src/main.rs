//! `ltlsep` command-line front end.
//!
//! Exit codes: 0 success, 1 unseparable or a failed check, 2 usage error,
//! 3 search budget exceeded, 4 I/O or input-format error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde_json::json;

use ltlsep::automata::{
    dfa_accepts, dfa_from_formula, dfa_from_json, dfa_to_json, gf_close, lasso_accepts, prefix_chain, trap_close, Dfa,
    LassoWord,
};
use ltlsep::instances::{alpha, build_ab, build_phi_n, build_phi_n_prime, FamilyParams};
use ltlsep::ltl::{eval, separates};
use ltlsep::measures::{delta1, measure_bound_v1, parity_instance, Rational};
use ltlsep::proof::{
    formula_from_tree, sufficient_budget, tree_from_json, tree_to_json, verify_tree, verify_tree_in, SearchError,
};
use ltlsep::trace::{load_traces, parse_trace, save_traces, Letter};
use ltlsep::transforms::{conjunctive_reducts, dnf, reverse_formula};
use ltlsep::{min_search, parse_formula, Formula, Fragment, Prop, SearchConfig, TraceSet};

const FORMATS: &str = "\
Trace files: one trace per line, letters separated by ';', propositions by ',',
'-' for the empty letter, '#' starts a comment. Example: pt,p1;-;qt,q1
Formulas: literals p and !p, &, |, U, and the prefix operators X wX F G Y wY O H.
Fragments: prop, xf, xwxfg, cosafety-u, pure-past, f-pure-past, or an operator
list such as X,F,G.

Exit codes: 0 ok, 1 unseparable or check failed, 2 usage error,
3 budget exceeded, 4 I/O or input-format error.";

#[derive(Parser)]
#[command(name = "ltlsep", version, about = "Minimal separating formulas for LTL on finite traces", after_help = FORMATS)]
struct Cli {
    /// Seed for every randomized choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Separation: search, formula checks, tree verification.
    #[command(subcommand)]
    Sep(Sep),
    /// Instance family generation.
    #[command(subcommand)]
    Gen(Gen),
    /// Formula transforms.
    #[command(subcommand)]
    Xform(Xform),
    /// Finite-word and lasso automata.
    #[command(subcommand)]
    Aut(Aut),
    /// Proof measures and their lower bounds.
    #[command(subcommand)]
    Measure(Measure),
}

#[derive(Args)]
struct Pair {
    /// Positive trace file.
    #[arg(long)]
    a: PathBuf,
    /// Negative trace file.
    #[arg(long)]
    b: PathBuf,
}

#[derive(Subcommand)]
enum Sep {
    /// Minimum-size separating formula.
    Find {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value = "xwxfg")]
        fragment: String,
        /// Largest size to try; defaults to a size that always suffices with X and wX.
        #[arg(long)]
        max_size: Option<usize>,
        /// Explore alternatives on a thread pool. The size stays exact but the witness may vary.
        #[arg(long)]
        parallel: bool,
        /// Prune with the Hamming-distance measure (prop fragment only).
        #[arg(long)]
        prune: bool,
        /// Also print the deduction tree as JSON.
        #[arg(long)]
        emit_tree: bool,
    },
    /// Evaluates a formula on one trace, or checks that it separates two files.
    Check {
        #[arg(long)]
        formula: String,
        #[arg(long, conflicts_with_all = ["a", "b"], required_unless_present = "a", allow_hyphen_values = true)]
        trace: Option<String>,
        #[arg(long, requires = "b")]
        a: Option<PathBuf>,
        #[arg(long, requires = "a")]
        b: Option<PathBuf>,
    },
    /// Checks every rule application in a tree JSON file.
    VerifyTree {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        fragment: Option<String>,
    },
}

#[derive(Subcommand)]
enum Gen {
    /// Prints the family formula for `n`, past form or (with --prime) future form.
    PhiN {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        prime: bool,
    },
    /// Writes a.txt, b.txt and manifest.json for the family at `n`.
    Instance {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated prefix lengths.
        #[arg(long, default_value = "0", value_delimiter = ',')]
        prefixes: Vec<usize>,
        /// Comma-separated type masks, or "random" for a seeded shuffle.
        #[arg(long)]
        order: Option<String>,
        /// Lift the default cap on `n`.
        #[arg(long)]
        allow_large: bool,
    },
}

#[derive(Subcommand)]
enum Xform {
    /// Swaps past and future operators.
    Reverse {
        #[arg(long)]
        formula: String,
    },
    /// Disjunction of the conjunctive reducts of an {X, F} formula.
    Dnf {
        #[arg(long)]
        formula: String,
    },
}

#[derive(Args)]
struct DfaIn {
    /// Automaton JSON file.
    #[arg(long)]
    dfa: PathBuf,
}

#[derive(Subcommand)]
enum Aut {
    /// Builds the automaton of a future-only formula.
    Build {
        #[arg(long)]
        formula: String,
        /// Comma-separated alphabet propositions; defaults to those of the formula.
        #[arg(long, value_delimiter = ',')]
        props: Vec<String>,
    },
    /// Makes accepting states absorbing.
    Trap(DfaIn),
    /// Reads a trap-closed automaton as recognising infinitely many matches.
    Gfclose(DfaIn),
    /// Prepends a chain of `j` states.
    Chain {
        #[command(flatten)]
        input: DfaIn,
        #[arg(long)]
        j: usize,
    },
    /// Büchi membership of the lasso u·v^ω.
    Lasso {
        #[command(flatten)]
        input: DfaIn,
        /// Stem; empty by default.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
    },
    /// Finite-word membership.
    Run {
        #[command(flatten)]
        input: DfaIn,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
}

#[derive(Subcommand)]
enum Measure {
    /// The Hamming measure of two one-letter trace files and its size bound.
    Delta1 {
        #[command(flatten)]
        pair: Pair,
    },
    /// The parity instance over `k` bits.
    Parity {
        #[arg(long)]
        k: usize,
        /// Also run the exact search.
        #[arg(long)]
        exact: bool,
    },
}

enum Failure {
    Check(String),
    Usage(String),
    Budget(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Budget(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Check(m) | Failure::Usage(m) | Failure::Budget(m) | Failure::Io(m) => m,
        }
    }
}

type Out = Result<Vec<String>, Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn io(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn formula(text: &str) -> Result<Formula, Failure> {
    parse_formula(text).map_err(|e| usage(format!("formula {text:?}: {e}")))
}

fn fragment(name: &str) -> Result<Fragment, Failure> {
    Fragment::parse(name).ok_or_else(|| usage(format!("unknown fragment {name:?}")))
}

fn traces(path: &Path) -> Result<TraceSet, Failure> {
    load_traces(path).map_err(|e| io(path, e))
}

fn word(text: &str) -> Result<Vec<Letter>, Failure> {
    if text.trim().is_empty() {
        return Ok(vec![]);
    }
    parse_trace(text).map(|t| t.letters().to_vec()).map_err(|e| usage(format!("trace {text:?}: {e}")))
}

fn read_dfa(path: &Path) -> Result<Dfa, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io(path, e))?;
    let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| io(path, e))?;
    dfa_from_json(&v).map_err(|e| io(path, e))
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

fn sep(cmd: Sep) -> Out {
    match cmd {
        Sep::Find {
            pair,
            fragment: name,
            max_size,
            parallel,
            prune,
            emit_tree,
        } => {
            let frag = fragment(&name)?;
            let (a, b) = (traces(&pair.a)?, traces(&pair.b)?);
            if a.is_empty() || b.is_empty() {
                return Err(usage("both trace files must contain at least one trace"));
            }
            let mut cfg = SearchConfig::new(frag, max_size.unwrap_or_else(|| sufficient_budget(&a, &b)));
            cfg = cfg.with_pruning(prune);
            if parallel {
                cfg = cfg.parallel();
            }
            match min_search(&a, &b, &cfg) {
                Ok(found) => {
                    let mut out = vec![format!("size={} formula={}", found.size, formula_from_tree(&found.tree))];
                    if emit_tree {
                        out.push(pretty(&tree_to_json(&found.tree)));
                    }
                    Ok(out)
                }
                Err(e @ SearchError::Unseparable(_)) => Err(Failure::Check(e.to_string())),
                Err(e @ SearchError::BudgetExceeded { .. }) => Err(Failure::Budget(e.to_string())),
                Err(e @ SearchError::UnsupportedFragment(_)) => Err(usage(e)),
            }
        }
        Sep::Check { formula: text, trace, a, b } => {
            let f = formula(&text)?;
            if let Some(t) = trace {
                let w = word(&t)?;
                if w.is_empty() {
                    return Err(usage("traces are nonempty"));
                }
                let sat = eval(&w, 0, &f).map_err(usage)?;
                return Ok(vec![if sat { "sat" } else { "unsat" }.into()]);
            }
            let (pa, pb) = (a.expect("clap enforces --a"), b.expect("clap enforces --b"));
            let (a, b) = (traces(&pa)?, traces(&pb)?);
            if separates(&f, &a, &b) {
                Ok(vec!["separates".into()])
            } else {
                Err(Failure::Check("does not separate".into()))
            }
        }
        Sep::VerifyTree { tree, fragment: name } => {
            let text = fs::read_to_string(&tree).map_err(|e| io(&tree, e))?;
            let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| io(&tree, e))?;
            let t = tree_from_json(&v).map_err(|e| io(&tree, e))?;
            let checked = match name {
                Some(n) => verify_tree_in(&t, &fragment(&n)?),
                None => verify_tree(&t),
            };
            checked.map_err(|e| Failure::Check(format!("invalid tree: {e}")))?;
            Ok(vec![format!("valid size={} formula={}", t.size(), formula_from_tree(&t))])
        }
    }
}

fn gen(cmd: Gen, seed: u64) -> Out {
    match cmd {
        Gen::PhiN { n, prime } => {
            let f = if prime { build_phi_n_prime(n) } else { build_phi_n(n) }.map_err(usage)?;
            Ok(vec![format!("size={} formula={f}", f.size())])
        }
        Gen::Instance {
            n,
            out,
            prefixes,
            order,
            allow_large,
        } => {
            let base = if allow_large { FamilyParams::new_uncapped(n) } else { FamilyParams::new(n) }.map_err(usage)?;
            if allow_large && n > ltlsep::instances::DEFAULT_MAX_N {
                eprintln!("warning: n={n} builds traces of length {}", (1usize << n) * (alpha(n).map_err(usage)? + 1));
            }
            let masks = match order.as_deref() {
                None => base.order.clone(),
                Some("random") => {
                    let mut m = base.order.clone();
                    m.shuffle(&mut StdRng::seed_from_u64(seed));
                    m
                }
                Some(list) => list
                    .split(',')
                    .map(|s| s.trim().parse::<u64>().map_err(|e| usage(format!("order entry {s:?}: {e}"))))
                    .collect::<Result<_, _>>()?,
            };
            let params = base.with_order(masks).map_err(usage)?.with_prefixes(prefixes);
            let (a, b) = build_ab(&params);
            fs::create_dir_all(&out).map_err(|e| io(&out, e))?;
            for (name, set) in [("a.txt", &a), ("b.txt", &b)] {
                let path = out.join(name);
                save_traces(&path, set).map_err(|e| io(&path, e))?;
            }
            let manifest = json!({
                "n": n,
                "alpha": alpha(n).map_err(usage)?,
                "order": params.order,
                "prefixes": params.prefixes,
                "sizes": {"a": a.len(), "b": b.len(), "max_len": a.union(&b).max_len()},
                "phi_n": build_phi_n(n).map_err(usage)?.to_string(),
                "phi_n_prime": build_phi_n_prime(n).map_err(usage)?.to_string(),
            });
            let path = out.join("manifest.json");
            fs::write(&path, pretty(&manifest) + "\n").map_err(|e| io(&path, e))?;
            Ok(vec![format!("wrote {} traces to {}", a.len() + b.len(), out.display())])
        }
    }
}

fn xform(cmd: Xform) -> Out {
    match cmd {
        Xform::Reverse { formula: text } => Ok(vec![reverse_formula(&formula(&text)?).map_err(usage)?.to_string()]),
        Xform::Dnf { formula: text } => {
            let f = formula(&text)?;
            let reducts = conjunctive_reducts(&f).map_err(usage)?;
            Ok(vec![dnf(&f).map_err(usage)?.to_string(), format!("reducts={}", reducts.len())])
        }
    }
}

fn aut(cmd: Aut) -> Out {
    let show = |a: &Dfa| Ok(vec![pretty(&dfa_to_json(a))]);
    match cmd {
        Aut::Build { formula: text, props } => {
            let f = formula(&text)?;
            let ap: Vec<Prop> = if props.is_empty() {
                f.props()
            } else {
                props.iter().map(|p| Prop::new(p).map_err(usage)).collect::<Result<_, _>>()?
            };
            show(&dfa_from_formula(&f, &ap).map_err(usage)?)
        }
        Aut::Trap(DfaIn { dfa }) => show(&trap_close(&read_dfa(&dfa)?)),
        Aut::Gfclose(DfaIn { dfa }) => show(&gf_close(&read_dfa(&dfa)?).map_err(usage)?),
        Aut::Chain { input, j } => show(&prefix_chain(&read_dfa(&input.dfa)?, j)),
        Aut::Lasso { input, u, v } => {
            let a = read_dfa(&input.dfa)?;
            let w = LassoWord::new(word(&u)?, word(&v)?).map_err(usage)?;
            Ok(vec![if lasso_accepts(&a, &w).map_err(usage)? { "accept" } else { "reject" }.into()])
        }
        Aut::Run { input, word: text } => {
            let a = read_dfa(&input.dfa)?;
            Ok(vec![if dfa_accepts(&a, &word(&text)?).map_err(usage)? { "accept" } else { "reject" }.into()])
        }
    }
}

fn measure_line(a: &TraceSet, b: &TraceSet) -> Result<String, Failure> {
    let mu = delta1(a, b).map_err(usage)?;
    let bound = measure_bound_v1(a, b, Rational::from(mu)).map_err(usage)?;
    Ok(format!("mu={mu} bound={bound} |A|={} |B|={}", a.len(), b.len()))
}

fn measure(cmd: Measure) -> Out {
    match cmd {
        Measure::Delta1 { pair } => Ok(vec![measure_line(&traces(&pair.a)?, &traces(&pair.b)?)?]),
        Measure::Parity { k, exact } => {
            if !(1..=20).contains(&k) {
                return Err(usage("--k must be between 1 and 20"));
            }
            let inst = parity_instance(k);
            let mut out = vec![measure_line(&inst.a, &inst.b)?];
            if exact {
                let cfg = SearchConfig::new(Fragment::PROP, 4 * k * k).with_pruning(true);
                match min_search(&inst.a, &inst.b, &cfg) {
                    Ok(found) => out.push(format!("size={} formula={}", found.size, formula_from_tree(&found.tree))),
                    Err(e) => return Err(Failure::Budget(e.to_string())),
                }
            }
            Ok(out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sep(c) => sep(c),
        Command::Gen(c) => gen(c, cli.seed),
        Command::Xform(c) => xform(c),
        Command::Aut(c) => aut(c),
        Command::Measure(c) => measure(c),
    };
    match result {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("{}", f.message());
            ExitCode::from(f.code())
        }
    }
}
