//! Command-line front end. `run` returns the process exit code:
//! 0 solvable/true, 1 unsolvable/false, 2 input error, 3 budget exhausted,
//! 4 oracle disagreement.

use crate::alpha::{alpha_eq, Mode};
use crate::av::{letrec_unify_av, unify_av_baseline, AvConfig, AvError, Strategy};
use crate::envmatch::{env_match, EnvMatchError};
use crate::graph::Graph;
use crate::matching::{encode_graph_iso, encode_hamiltonian, letrec_match};
use crate::name::{fresh_atom, Atom, Fun, Var};
use crate::oracle;
use crate::pattern::Subst;
use crate::sexp::{parse_edges, parse_ground, parse_problem, Problem, ProblemKind};
use crate::syntax::Term;
use crate::term::Expr;
use crate::unify::{letrec_unify, Config};
use clap::{Parser, Subcommand, ValueEnum};
use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, Read, Write};
use std::path::Path;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_ORACLE: i32 = 4;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Decision,
    Collecting,
}

#[derive(Parser, Debug)]
#[command(name = "nomlet", version, about = "Nominal unification and matching with letrec")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
    /// Stop at the first result or collect all of them.
    #[arg(long, global = true, value_enum, default_value = "decision")]
    pub mode: ModeArg,
    /// Print a stats record after the results.
    #[arg(long, global = true)]
    pub stats: bool,
    /// Fixpoint threshold for unify-av: nlogn, quadratic or constant:K.
    #[arg(long = "strategy-p", global = true, default_value = "nlogn")]
    pub strategy: Strategy,
    /// Treat inputs as garbage-free and drop fixpoint equations.
    #[arg(long, global = true)]
    pub garbage_free: bool,
    /// Maximum number of search states.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub budget: u64,
    /// Cross-check the answer against the brute-force oracles.
    #[arg(long, global = true)]
    pub oracle: bool,
    /// Worker threads for unify.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Unify a `(problem (eq s t) .. (fresh a e) ..)` file.
    Unify { file: String },
    /// Unify a problem that may use atom variables `@A`.
    UnifyAv { file: String },
    /// Match a `(match (le p t) ..)` file; targets must be ground.
    Match { file: String },
    /// Match with environment variables `%E` in patterns.
    Envmatch { file: String },
    /// Decide alpha-equivalence of two ground expressions.
    Alphaeq { left: String, right: String },
    /// Emit a matching problem solvable iff the 3-regular graph is Hamiltonian.
    GenHam { graph: String },
    /// Emit a matching problem solvable iff the two graphs are isomorphic.
    GenGi { left: String, right: String },
    /// Run a brute-force oracle directly.
    Oracle {
        #[command(subcommand)]
        what: OracleCmd,
    },
}

#[derive(Subcommand, Debug)]
pub enum OracleCmd {
    /// Enumerate ground solutions of a small unification problem.
    Unify {
        file: String,
        /// Largest expression depth tried; a leaf has depth 1.
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    Alphaeq {
        left: String,
        right: String,
    },
    Ham {
        graph: String,
    },
    Iso {
        left: String,
        right: String,
    },
}

struct Failure(i32, String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure(EXIT_INPUT, e.to_string())
    }
}

fn read_source(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Failure(EXIT_INPUT, format!("{path}: {e}")))
}

fn load_problem(path: &str, kind: ProblemKind) -> Result<Problem, Failure> {
    let p = parse_problem(&read_source(path)?).map_err(|e| Failure(EXIT_INPUT, format!("{path}:{e}")))?;
    if p.kind != kind {
        let want = if kind == ProblemKind::Unify { "(problem ..)" } else { "(match ..)" };
        return Err(Failure(EXIT_INPUT, format!("{path}: expected a {want} file")));
    }
    Ok(p)
}

fn load_ground(path: &str) -> Result<Expr, Failure> {
    parse_ground(&read_source(path)?).map_err(|e| Failure(EXIT_INPUT, format!("{path}:{e}")))
}

/// An edge-list file, or one of the built-in graph names.
pub fn load_graph(arg: &str) -> Result<Graph, String> {
    if Path::new(arg).exists() || arg == "-" {
        let src = read_source(arg).map_err(|f| f.1)?;
        let edges = parse_edges(&src).map_err(|e| format!("{arg}:{e}"))?;
        Graph::from_edges(&edges).map_err(|e| format!("{arg}: {e}"))
    } else {
        Graph::named(arg).map_err(|e| format!("{arg}: {e}"))
    }
}

fn ground_problem(p: &Problem) -> Result<(Vec<(Expr, Expr)>, Vec<(Atom, Expr)>), Failure> {
    let eqs = p.eqs.iter().map(|(s, t)| Ok((s.to_expr()?, t.to_expr()?))).collect::<Result<Vec<_>, Failure>>()?;
    let fresh = p
        .fresh
        .iter()
        .map(|(w, e)| {
            let a = w.eval().ok_or_else(|| Failure(EXIT_INPUT, format!("atom variable in ({w} ..); use unify-av")))?;
            Ok((a, e.to_expr()?))
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    Ok((eqs, fresh))
}

fn mode(cli: &Cli) -> Mode {
    match cli.mode {
        ModeArg::Decision => Mode::Decision,
        ModeArg::Collecting => Mode::Collecting,
    }
}

fn verdict(found: bool) -> i32 {
    if found {
        EXIT_OK
    } else {
        EXIT_NO
    }
}

/// Checks a unification answer with the naive oracle: every reported
/// unifier must be sound, and an empty answer must leave no ground solution
/// over a small search space.
fn cross_check_unify(eqs: &[(Expr, Expr)], fresh: &[(Atom, Expr)], instances: &[BTreeMap<Var, Expr>]) -> Result<(), String> {
    for rho in instances {
        for (s, t) in eqs {
            let (s1, t1) = (oracle::ground_subst(s, rho), oracle::ground_subst(t, rho));
            if !matches!((s1, t1), (Some(a), Some(b)) if oracle::alpha_eq_naive(&a, &b)) {
                return Err(format!("instance does not solve ({s} {t})"));
            }
        }
        for (a, e) in fresh {
            match oracle::ground_subst(e, rho) {
                Some(g) if !oracle::free_atoms_naive(&g).contains(a) => {}
                _ => return Err(format!("instance violates ({a} {e})")),
            }
        }
    }
    if instances.is_empty() {
        if let Some(space) = small_space(eqs, fresh, 2) {
            if let Some(rho) = oracle::enum_ground_solutions(eqs, fresh, &space).first() {
                return Err(format!("oracle found {}", show_ground(rho)));
            }
        }
    }
    Ok(())
}

fn problem_vars(eqs: &[(Expr, Expr)], fresh: &[(Atom, Expr)]) -> BTreeSet<Var> {
    let mut vars = BTreeSet::new();
    for (s, t) in eqs {
        s.collect_vars(&mut vars);
        t.collect_vars(&mut vars);
    }
    for (_, e) in fresh {
        e.collect_vars(&mut vars);
    }
    vars
}

/// Ground expressions over the problem's atoms, one extra atom and the
/// problem's function symbols, or `None` when the problem is too large.
fn small_space(eqs: &[(Expr, Expr)], fresh: &[(Atom, Expr)], depth: usize) -> Option<Vec<Expr>> {
    let mut atoms = BTreeSet::new();
    let mut sig: BTreeMap<Fun, usize> = BTreeMap::new();
    for (s, t) in eqs {
        s.collect_atoms(&mut atoms);
        t.collect_atoms(&mut atoms);
        s.signature(&mut sig);
        t.signature(&mut sig);
    }
    for (a, e) in fresh {
        atoms.insert(*a);
        e.collect_atoms(&mut atoms);
        e.signature(&mut sig);
    }
    atoms.insert(fresh_atom(atoms.iter()));
    let nvars = problem_vars(eqs, fresh).len();
    if nvars > 2 || atoms.len() > 4 || sig.len() > 4 || depth > 3 {
        return None;
    }
    let pool: Vec<Atom> = atoms.into_iter().collect();
    let sig: Vec<(Fun, usize)> = sig.into_iter().collect();
    Some(oracle::ground_exprs(&pool, &sig, depth, true))
}

fn show_ground(rho: &BTreeMap<Var, Expr>) -> String {
    Subst { vars: rho.clone(), envs: BTreeMap::new() }.to_string()
}

fn oracle_line(out: &mut dyn Write, r: Result<(), String>) -> Result<i32, Failure> {
    match r {
        Ok(()) => {
            writeln!(out, "(oracle agree)")?;
            Ok(EXIT_OK)
        }
        Err(msg) => {
            writeln!(out, "(oracle disagree {msg:?})")?;
            Ok(EXIT_ORACLE)
        }
    }
}

fn cmd_unify(cli: &Cli, file: &str, out: &mut dyn Write) -> Result<i32, Failure> {
    let p = load_problem(file, ProblemKind::Unify)?;
    let (eqs, fresh) = ground_problem(&p)?;
    let cfg = Config {
        mode: mode(cli),
        elim_fp: true,
        garbage_free: cli.garbage_free,
        budget: cli.budget,
        jobs: cli.jobs.max(1),
        trace: cli.stats,
    };
    let res = letrec_unify(&eqs, &fresh, &cfg).map_err(|e| Failure(EXIT_BUDGET, e.to_string()))?;
    for u in &res.unifiers {
        writeln!(out, "{u}")?;
    }
    if res.unifiers.is_empty() {
        writeln!(out, "(unsat)")?;
    }
    if cli.stats {
        writeln!(out, "{}", res.stats)?;
    }
    let code = verdict(!res.unifiers.is_empty());
    if cli.oracle {
        let vars = problem_vars(&eqs, &fresh);
        let mut avoid: BTreeSet<Atom> = BTreeSet::new();
        for (s, t) in &eqs {
            s.collect_atoms(&mut avoid);
            t.collect_atoms(&mut avoid);
        }
        for u in &res.unifiers {
            avoid.extend(u.atoms());
        }
        let z = fresh_atom(avoid.iter());
        let inst: Vec<_> = res.unifiers.iter().map(|u| u.ground_with(&vars, z)).collect();
        let c = oracle_line(out, cross_check_unify(&eqs, &fresh, &inst))?;
        if c != EXIT_OK {
            return Ok(c);
        }
    }
    Ok(code)
}

fn cmd_unify_av(cli: &Cli, file: &str, out: &mut dyn Write) -> Result<i32, Failure> {
    let p = load_problem(file, ProblemKind::Unify)?;
    let cfg = AvConfig { mode: mode(cli), strategy: cli.strategy, budget: cli.budget };
    let res = letrec_unify_av(&p.eqs, &p.fresh, &cfg).map_err(av_failure)?;
    for u in &res.unifiers {
        writeln!(out, "{u}")?;
    }
    if res.unifiers.is_empty() {
        writeln!(out, "(unsat)")?;
    }
    if cli.stats {
        writeln!(out, "{}", res.stats)?;
    }
    let found = !res.unifiers.is_empty();
    if cli.oracle {
        let base = unify_av_baseline(&p.eqs, &p.fresh, cli.budget).map_err(av_failure)?;
        let r = if base == found { Ok(()) } else { Err(format!("guessing baseline says {base}")) };
        let c = oracle_line(out, r)?;
        if c != EXIT_OK {
            return Ok(c);
        }
    }
    Ok(verdict(found))
}

fn av_failure(e: AvError) -> Failure {
    match e {
        AvError::Budget(_) => Failure(EXIT_BUDGET, e.to_string()),
        AvError::Input(_) => Failure(EXIT_INPUT, e.to_string()),
    }
}

fn cmd_match(cli: &Cli, file: &str, out: &mut dyn Write) -> Result<i32, Failure> {
    let p = load_problem(file, ProblemKind::Match)?;
    if !p.fresh.is_empty() {
        return Err(Failure(EXIT_INPUT, format!("{file}: freshness constraints need envmatch")));
    }
    let eqs = p.eqs.iter().map(|(s, t)| Ok((s.to_expr()?, t.to_ground()?))).collect::<Result<Vec<_>, Failure>>()?;
    let res = letrec_match(&eqs, mode(cli), cli.budget).map_err(|e| Failure(EXIT_BUDGET, e.to_string()))?;
    for s in &res.solutions {
        writeln!(out, "{s}")?;
    }
    if res.solutions.is_empty() {
        writeln!(out, "(unsat)")?;
    }
    if cli.stats {
        writeln!(out, "(stats (states {}))", res.states)?;
    }
    if cli.oracle {
        let inst: Vec<_> = res.solutions.iter().map(|s| s.vars.clone()).collect();
        let c = oracle_line(out, cross_check_unify(&eqs, &[], &inst))?;
        if c != EXIT_OK {
            return Ok(c);
        }
    }
    Ok(verdict(!res.solutions.is_empty()))
}

fn cmd_envmatch(cli: &Cli, file: &str, out: &mut dyn Write) -> Result<i32, Failure> {
    let p = load_problem(file, ProblemKind::Match)?;
    let eqs: Vec<(Term, Expr)> = p.eqs.iter().map(|(s, t)| Ok((s.clone(), t.to_ground()?))).collect::<Result<_, Failure>>()?;
    let res = env_match(&eqs, &p.fresh, mode(cli), cli.budget).map_err(|e| match e {
        EnvMatchError::Budget(_) => Failure(EXIT_BUDGET, e.to_string()),
        EnvMatchError::Input(_) => Failure(EXIT_INPUT, e.to_string()),
    })?;
    for s in &res.solutions {
        writeln!(out, "{s}")?;
    }
    if res.solutions.is_empty() {
        writeln!(out, "(unsat)")?;
    }
    if cli.stats {
        writeln!(out, "(stats (states {}) (guesses {}))", res.states, res.guesses)?;
    }
    Ok(verdict(!res.solutions.is_empty()))
}

fn cmd_alphaeq(cli: &Cli, l: &str, r: &str, out: &mut dyn Write) -> Result<i32, Failure> {
    let (a, b) = (load_ground(l)?, load_ground(r)?);
    let eq = alpha_eq(&a, &b);
    writeln!(out, "{eq}")?;
    if cli.oracle {
        let naive = oracle::alpha_eq_naive(&a, &b);
        let r = if naive == eq { Ok(()) } else { Err(format!("naive check says {naive}")) };
        let c = oracle_line(out, r)?;
        if c != EXIT_OK {
            return Ok(c);
        }
    }
    Ok(verdict(eq))
}

fn cmd_oracle(what: &OracleCmd, out: &mut dyn Write) -> Result<i32, Failure> {
    match what {
        OracleCmd::Unify { file, depth } => {
            let p = load_problem(file, ProblemKind::Unify)?;
            let (eqs, fresh) = ground_problem(&p)?;
            let space = small_space(&eqs, &fresh, *depth).ok_or_else(|| {
                Failure(EXIT_INPUT, "problem too large for the oracle (at most 2 variables, 3 atoms, 4 symbols, depth 3)".into())
            })?;
            let sols = oracle::enum_ground_solutions(&eqs, &fresh, &space);
            for rho in &sols {
                writeln!(out, "{}", show_ground(rho))?;
            }
            if sols.is_empty() {
                writeln!(out, "(unsat)")?;
            }
            Ok(verdict(!sols.is_empty()))
        }
        OracleCmd::Alphaeq { left, right } => {
            let eq = oracle::alpha_eq_naive(&load_ground(left)?, &load_ground(right)?);
            writeln!(out, "{eq}")?;
            Ok(verdict(eq))
        }
        OracleCmd::Ham { graph } => {
            let h = oracle::ham_cycle(&load_graph(graph)?)?;
            writeln!(out, "{h}")?;
            Ok(verdict(h))
        }
        OracleCmd::Iso { left, right } => {
            let h = oracle::graph_iso(&load_graph(left)?, &load_graph(right)?)?;
            writeln!(out, "{h}")?;
            Ok(verdict(h))
        }
    }
}

fn write_match(out: &mut dyn Write, p: &Expr, t: &Expr) -> Result<i32, Failure> {
    writeln!(out, "(match (le {p}\n        {t}))")?;
    Ok(EXIT_OK)
}

/// Runs one command line, writing results to `out` and diagnostics to
/// `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            if code == EXIT_OK {
                let _ = write!(out, "{e}");
            } else {
                let _ = write!(err, "{e}");
            }
            return code;
        }
    };
    let r = match &cli.cmd {
        Cmd::Unify { file } => cmd_unify(&cli, file, out),
        Cmd::UnifyAv { file } => cmd_unify_av(&cli, file, out),
        Cmd::Match { file } => cmd_match(&cli, file, out),
        Cmd::Envmatch { file } => cmd_envmatch(&cli, file, out),
        Cmd::Alphaeq { left, right } => cmd_alphaeq(&cli, left, right, out),
        Cmd::GenHam { graph } => load_graph(graph)
            .and_then(|g| encode_hamiltonian(&g).map_err(|e| format!("{graph}: {e}")))
            .map_err(Failure::from)
            .and_then(|(p, t)| write_match(out, &p, &t)),
        Cmd::GenGi { left, right } => load_graph(left)
            .and_then(|g1| Ok((g1, load_graph(right)?)))
            .and_then(|(g1, g2)| encode_graph_iso(&g1, &g2).map_err(|e| e.to_string()))
            .map_err(Failure::from)
            .and_then(|(p, t)| write_match(out, &p, &t)),
        Cmd::Oracle { what } => cmd_oracle(what, out),
    };
    match r {
        Ok(c) => c,
        Err(Failure(c, msg)) => {
            let _ = writeln!(err, "nomlet: {msg}");
            c
        }
    }
}
