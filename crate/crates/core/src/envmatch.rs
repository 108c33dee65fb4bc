//! Matching with environment variables and atom variables in patterns.
//!
//! Atom variables are guessed first, over the atoms of the problem plus one
//! fresh atom per variable. Each guess leaves a pattern whose environment
//! variables the correspondence engine instantiates with binding templates.

use crate::alpha::{match_all, same_subst, BudgetExceeded, Mode};
use crate::name::{Atom, AtomSupply, AtomVar};
use crate::pattern::{Pat, Subst};
use crate::syntax::{Term, TierError, W};
use crate::term::Expr;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EnvMatchError {
    #[error(transparent)]
    Input(TierError),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvSolution {
    pub atoms: BTreeMap<AtomVar, Atom>,
    pub subst: Subst,
}

impl fmt::Display for EnvSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.subst.to_string();
        write!(f, "(solution (atoms")?;
        for (a, b) in &self.atoms {
            write!(f, " ({a} {b})")?;
        }
        write!(f, ") {}", &s["(solution ".len()..])
    }
}

#[derive(Clone, Debug, Default)]
pub struct EnvOutcome {
    pub solutions: Vec<EnvSolution>,
    pub states: u64,
    pub guesses: u64,
}

/// Matches patterns (which may use `%E` and `@A`) against ground targets
/// under the freshness constraints `fresh`.
pub fn env_match(eqs: &[(Term, Expr)], fresh: &[(W, Term)], mode: Mode, budget: u64) -> Result<EnvOutcome, EnvMatchError> {
    let mut atoms = BTreeSet::new();
    let mut avars = BTreeSet::new();
    for (p, t) in eqs {
        let (a, v) = p.names();
        atoms.extend(a);
        avars.extend(v);
        t.collect_atoms(&mut atoms);
    }
    for (w, e) in fresh {
        for t in [Term::Atom(w.clone()), e.clone()] {
            let (a, v) = t.names();
            atoms.extend(a);
            avars.extend(v);
        }
    }
    let avars: Vec<AtomVar> = avars.into_iter().collect();
    let mut supply = AtomSupply::avoiding(&atoms);
    let pool: Vec<Atom> = atoms.iter().copied().chain(avars.iter().map(|_| supply.fresh())).collect();

    let mut out = EnvOutcome::default();
    let mut idx = vec![0usize; avars.len()];
    loop {
        let m: HashMap<AtomVar, Atom> = avars.iter().zip(&idx).map(|(a, i)| (*a, pool[*i])).collect();
        out.guesses += 1;
        if let Some(pats) = instance(eqs, &m)? {
            let left = budget.saturating_sub(out.states);
            let found = match_all(&pats, mode, left).map_err(|_| BudgetExceeded(budget))?;
            out.states += found.states;
            for s in found.solutions {
                if !satisfies(fresh, &m, &s)? {
                    continue;
                }
                let sol = EnvSolution { atoms: m.iter().map(|(k, v)| (*k, *v)).collect(), subst: s };
                if !out.solutions.iter().any(|o| o.atoms == sol.atoms && same_subst(&o.subst, &sol.subst)) {
                    out.solutions.push(sol);
                }
            }
            if mode == Mode::Decision && !out.solutions.is_empty() {
                return Ok(out);
            }
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(out);
            }
            idx[k] += 1;
            if idx[k] < pool.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// `None` when the guess puts equal binders into one environment.
fn instance(eqs: &[(Term, Expr)], m: &HashMap<AtomVar, Atom>) -> Result<Option<Vec<(Pat, Expr)>>, EnvMatchError> {
    let mut out = Vec::new();
    for (p, t) in eqs {
        match p.instantiate(m).to_pat() {
            Ok(p) => out.push((p, t.clone())),
            Err(TierError::DuplicateBinder(_)) => return Ok(None),
            Err(e) => return Err(EnvMatchError::Input(e)),
        }
    }
    Ok(Some(out))
}

fn satisfies(fresh: &[(W, Term)], m: &HashMap<AtomVar, Atom>, s: &Subst) -> Result<bool, EnvMatchError> {
    for (w, e) in fresh {
        let a = w.instantiate(m).eval().expect("all atom variables are guessed");
        let e = e.instantiate(m).to_pat().map_err(EnvMatchError::Input)?;
        match e.instantiate(s) {
            Some(g) if g.is_free_in(a) => return Ok(false),
            Some(_) => {}
            None => return Ok(false),
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::alpha_eq;
    use crate::name::{EnvVar, Var};
    use crate::sexp::{parse_ground, parse_term};

    fn run(p: &str, t: &str) -> EnvOutcome {
        let eqs = [(parse_term(p).unwrap(), parse_ground(t).unwrap())];
        env_match(&eqs, &[], Mode::Collecting, 1_000_000).unwrap()
    }

    fn env(s: &EnvSolution, x: &str) -> Vec<(Atom, Expr)> {
        s.subst.envs[&EnvVar::new(x)].clone()
    }

    #[test]
    fn nested_environments() {
        let out = run("(letrec (%E1) (letrec (%E2) ?X))", "(letrec ((a 0) (b 1)) (letrec ((c (t a b c))) c))");
        assert!(!out.solutions.is_empty());
        let s = &out.solutions[0];
        let e1 = env(s, "E1");
        assert_eq!(e1.len(), 2);
        assert_eq!(env(s, "E2").len(), 1);
        let x = &s.subst.vars[&Var::new("X")];
        assert_eq!(Some(x), env(s, "E2").first().map(|(c, _)| Expr::Atom(*c)).as_ref());
    }

    #[test]
    fn single_binding_guess() {
        let out = run("(letrec (%E) ?X)", "(letrec ((a 0)) a)");
        assert_eq!(out.solutions.len(), 1);
        let s = &out.solutions[0];
        let (b, e) = &env(s, "E")[0];
        assert_eq!(e, &parse_ground("0").unwrap());
        assert_eq!(s.subst.vars[&Var::new("X")], Expr::Atom(*b));
    }

    #[test]
    fn zero_slack() {
        let out = run("(letrec ((a ?X) %E) a)", "(letrec ((b 0)) b)");
        assert_eq!(out.solutions.len(), 1);
        let s = &out.solutions[0];
        assert!(env(s, "E").is_empty());
        assert!(alpha_eq(&s.subst.vars[&Var::new("X")], &parse_ground("0").unwrap()));
    }

    #[test]
    fn atom_variables_are_guessed() {
        let out = run("(lam @A (f @A @B))", "(lam a (f a b))");
        assert!(!out.solutions.is_empty());
        assert!(out.solutions.iter().all(|s| s.atoms[&AtomVar::new("B")] == Atom::new("b")));
    }
}
