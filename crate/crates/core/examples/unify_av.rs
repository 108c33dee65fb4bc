//! Unification with atom variables, against the guess-everything baseline.

use nomlet::alpha::Mode;
use nomlet::av::{letrec_unify_av, unify_av_baseline, AvConfig, Strategy};
use nomlet::sexp::parse_problem;

fn main() {
    for (name, src) in [("av-unsat", include_str!("av-unsat.prob")), ("av-sat", include_str!("av-sat.prob"))] {
        let p = parse_problem(src).unwrap();
        for strategy in [Strategy::NLogN, Strategy::Quadratic, Strategy::Constant(1)] {
            let cfg = AvConfig { mode: Mode::Decision, strategy, budget: 1_000_000 };
            let out = letrec_unify_av(&p.eqs, &p.fresh, &cfg).unwrap();
            println!("{name} {strategy:?}: {} unifier(s), {} states", out.unifiers.len(), out.stats.states);
            if let Some(u) = out.unifiers.first() {
                println!("  {u}");
            }
        }
        println!("  baseline: {}", unify_av_baseline(&p.eqs, &p.fresh, 1_000_000).unwrap());
    }
}
