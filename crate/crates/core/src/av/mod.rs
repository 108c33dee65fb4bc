//! The atom-variable tier.

pub mod constraint;
pub mod expr;
pub mod grammar;
pub mod unify;

pub use constraint::{av_satisfiable, AFresh};
pub use expr::AExpr;
pub use grammar::{Assign, Grammar, Nt, GW};
pub use unify::{av_problem_size, letrec_unify_av, unify_av_baseline, AvConfig, AvError, AvOutcome, AvStats, AvUnifier, Strategy};
