//! Small undirected graphs for the hardness encoders.

use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub names: Vec<String>,
    /// `(u, v)` with `u < v`, sorted.
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at {0}")]
    SelfLoop(String),
    #[error("edge {0} {1} listed twice")]
    Duplicate(String, String),
    #[error("graph is not {0}-regular")]
    NotRegular(usize),
    #[error("graph is not regular")]
    Irregular,
    #[error("graphs differ in vertex or edge count")]
    SizeMismatch,
    #[error("unknown graph `{0}`")]
    Unknown(String),
}

impl Graph {
    pub fn from_edges<S: AsRef<str>>(edges: &[(S, S)]) -> Result<Graph, GraphError> {
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        let mut names = Vec::new();
        let mut id = |s: &str, names: &mut Vec<String>| {
            *index.entry(s.to_string()).or_insert_with(|| {
                names.push(s.to_string());
                names.len() - 1
            })
        };
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            let (a, b) = (a.as_ref(), b.as_ref());
            if a == b {
                return Err(GraphError::SelfLoop(a.to_string()));
            }
            let (u, v) = (id(a, &mut names), id(b, &mut names));
            if !set.insert((u.min(v), u.max(v))) {
                return Err(GraphError::Duplicate(a.to_string(), b.to_string()));
            }
        }
        Ok(Graph { names, edges: set.into_iter().collect() })
    }

    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Graph {
        let names = (0..n).map(|i| i.to_string()).collect();
        let edges: BTreeSet<(usize, usize)> = pairs.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        Graph { names, edges: edges.into_iter().collect() }
    }

    pub fn cycle(n: usize) -> Graph {
        Graph::from_pairs(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>())
    }

    pub fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j));
            }
        }
        Graph::from_pairs(n, &e)
    }

    /// Known graphs by name: `k4`, `k33`, `prism`, `cube`, `petersen`,
    /// `2c3`, `cN`, `kN`.
    pub fn named(name: &str) -> Result<Graph, GraphError> {
        let g = match name {
            "k33" => Graph::from_pairs(6, &[(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5)]),
            "prism" => Graph::from_pairs(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)]),
            "cube" => {
                Graph::from_pairs(8, &[(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4), (1, 5), (2, 6), (3, 7)])
            }
            "petersen" => Graph::from_pairs(
                10,
                &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 5), (1, 6), (2, 7), (3, 8), (4, 9), (5, 7), (7, 9), (9, 6), (6, 8), (8, 5)],
            ),
            "2c3" => Graph::from_pairs(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]),
            _ => {
                let n = |s: &str| s.parse::<usize>().ok().filter(|&n| n >= 3);
                match (name.strip_prefix('c').and_then(n), name.strip_prefix('k').and_then(n)) {
                    (Some(k), _) => Graph::cycle(k),
                    (_, Some(k)) => Graph::complete(k),
                    _ => return Err(GraphError::Unknown(name.to_string())),
                }
            }
        };
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn neighbours(&self) -> Vec<BTreeSet<usize>> {
        let mut adj = vec![BTreeSet::new(); self.n()];
        for &(u, v) in &self.edges {
            adj[u].insert(v);
            adj[v].insert(u);
        }
        adj
    }

    /// The common degree, if every vertex has the same one.
    pub fn regular_degree(&self) -> Option<usize> {
        let adj = self.neighbours();
        let d = adj.first()?.len();
        adj.iter().all(|s| s.len() == d).then_some(d)
    }

    /// The same graph with vertex `i` renamed to `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        let pairs: Vec<(usize, usize)> = self.edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        Graph::from_pairs(self.n(), &pairs)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for &(u, v) in &self.edges {
            out.push_str(&format!("{} {}\n", self.names[u], self.names[v]));
        }
        out
    }
}

/// All 3-regular graphs on `n` vertices up to relabelling is too many to
/// list; this gives a deterministic family of them by random edge swaps.
pub fn random_cubic(n: usize, seed: u64) -> Graph {
    assert!(n >= 4 && n % 2 == 0);
    // Start from the prism-like circulant C_n(1, n/2) and apply degree
    // preserving switches.
    let mut e: BTreeSet<(usize, usize)> = BTreeSet::new();
    for i in 0..n {
        let a = (i, (i + 1) % n);
        e.insert((a.0.min(a.1), a.0.max(a.1)));
        let b = (i, (i + n / 2) % n);
        e.insert((b.0.min(b.1), b.0.max(b.1)));
    }
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 33) as usize
    };
    for _ in 0..4 * n {
        let v: Vec<(usize, usize)> = e.iter().copied().collect();
        let (a, b) = v[next() % v.len()];
        let (c, d) = v[next() % v.len()];
        let (c, d) = if next() % 2 == 0 { (c, d) } else { (d, c) };
        let n1 = (a.min(c), a.max(c));
        let n2 = (b.min(d), b.max(d));
        if a == c || b == d || a == d || b == c || e.contains(&n1) || e.contains(&n2) {
            continue;
        }
        e.remove(&(a, b));
        e.remove(&(c.min(d), c.max(d)));
        e.insert(n1);
        e.insert(n2);
    }
    Graph::from_pairs(n, &e.into_iter().collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_graphs_are_cubic() {
        for name in ["k4", "k33", "prism", "cube", "petersen"] {
            assert_eq!(Graph::named(name).unwrap().regular_degree(), Some(3), "{name}");
        }
        assert_eq!(Graph::named("2c3").unwrap().regular_degree(), Some(2));
        assert_eq!(Graph::named("c6").unwrap().edges.len(), 6);
    }

    #[test]
    fn random_cubic_stays_cubic() {
        for seed in 0..10 {
            let g = random_cubic(8, seed);
            assert_eq!(g.regular_degree(), Some(3));
            assert_eq!(g.edges.len(), 12);
        }
    }

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::named("petersen").unwrap();
        let pairs = crate::sexp::parse_edges(&g.to_edge_list()).unwrap();
        let h = Graph::from_edges(&pairs).unwrap();
        let named = |g: &Graph| -> BTreeSet<(String, String)> {
            g.edges
                .iter()
                .map(|&(u, v)| (g.names[u].clone(), g.names[v].clone()))
                .map(|(a, b)| (a.clone().min(b.clone()), a.max(b)))
                .collect()
        };
        assert_eq!(named(&h), named(&g));
    }
}
