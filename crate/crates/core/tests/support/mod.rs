#![allow(dead_code)]

pub mod golden;
pub mod oracles;

use graphgen::graph::Graph;
use rand::Rng;

/// G(n, p) on 0-based pairs.
pub fn random_graph(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|_| rng.random_bool(p))
        .collect();
    Graph::from_zero_based(n, edges)
}

/// `g` with up to `flips` random pairs toggled.
pub fn perturb(g: &Graph, flips: usize, rng: &mut impl Rng) -> Graph {
    let n = g.node_count();
    let mut edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|&(u, v)| (u as usize - 1, v as usize - 1))
        .collect();
    if n >= 2 {
        for _ in 0..flips {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            if u == v {
                continue;
            }
            let e = (u.min(v), u.max(v));
            match edges.iter().position(|&x| x == e) {
                Some(i) => {
                    edges.swap_remove(i);
                }
                None => edges.push(e),
            }
        }
    }
    Graph::from_zero_based(n, edges)
}
