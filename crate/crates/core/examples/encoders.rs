//! Graph questions as letrec matching problems, checked against brute force.

use nomlet::alpha::Mode;
use nomlet::graph::{random_cubic, Graph};
use nomlet::matching::{encode_graph_iso, encode_hamiltonian, letrec_match};
use nomlet::oracle::{graph_iso, ham_cycle};
use std::time::Instant;

fn main() {
    let mut graphs: Vec<(String, Graph)> =
        ["k4", "k33", "prism", "cube", "petersen"].iter().map(|n| (n.to_string(), Graph::named(n).unwrap())).collect();
    graphs.extend((0..3).map(|s| (format!("cubic10/{s}"), random_cubic(10, s))));
    for (name, g) in &graphs {
        let (p, t) = encode_hamiltonian(g).unwrap();
        let t0 = Instant::now();
        let out = letrec_match(&[(p, t)], Mode::Decision, 10_000_000).unwrap();
        println!(
            "ham {name:<10} match {:<5} oracle {:<5} {:>6} states {:?}",
            !out.solutions.is_empty(),
            ham_cycle(g).unwrap(),
            out.states,
            t0.elapsed()
        );
    }
    let c6 = Graph::named("c6").unwrap();
    for (name, h) in [("c6", c6.relabel(&[3, 1, 4, 0, 5, 2])), ("2c3", Graph::named("2c3").unwrap())] {
        let (p, t) = encode_graph_iso(&c6, &h).unwrap();
        let out = letrec_match(&[(p, t.clone())], Mode::Decision, 1_000_000).unwrap();
        println!(
            "iso c6~{name:<4} match {:<5} oracle {:<5} garbage-free target {}",
            !out.solutions.is_empty(),
            graph_iso(&c6, &h).unwrap(),
            t.is_garbage_free()
        );
    }
}
