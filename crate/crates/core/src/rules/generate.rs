//! Random exemplar graphs that satisfy a rule.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{validate_rule, RuleError, RuleKind, RuleSpec};
use crate::graph::Graph;

/// Rejection attempts allowed for Planar, KColor and KRegular.
pub const REJECTION_BUDGET: usize = 200_000;

/// Extra intra-part edge probability for Components exemplars.
const COMPONENT_EXTRA_EDGE_P: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error(transparent)]
    Spec(#[from] RuleError),
    #[error("no graph satisfies {0}")]
    Unsatisfiable(String),
    #[error("rejection budget of {attempts} exhausted for {spec}")]
    GenerationTimeout { spec: String, attempts: usize },
}

/// Deterministic in `(spec, seed)`.
pub fn generate_exemplar(spec: &RuleSpec, seed: u64) -> Result<Graph, GenerateError> {
    generate_with_budget(spec, seed, REJECTION_BUDGET)
}

pub fn generate_with_budget(
    spec: &RuleSpec,
    seed: u64,
    budget: usize,
) -> Result<Graph, GenerateError> {
    spec.check()?;
    check_satisfiable(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.n;
    let g = match spec.kind {
        RuleKind::Tree => random_tree(n, &mut rng),
        RuleKind::Cycle => {
            let order = permutation(n, &mut rng);
            Graph::from_zero_based(n, (0..n).map(|i| (order[i], order[(i + 1) % n])))
        }
        RuleKind::Wheel => {
            let order = permutation(n, &mut rng);
            let (hub, rim) = order.split_first().expect("n >= 4");
            let r = rim.len();
            Graph::from_zero_based(
                n,
                (0..r).flat_map(|i| [(*hub, rim[i]), (rim[i], rim[(i + 1) % r])]),
            )
        }
        RuleKind::Bipartite => {
            let (u, _) = spec.part_sizes.expect("checked");
            let order = permutation(n, &mut rng);
            let (left, right) = order.split_at(u);
            let mut edges = Vec::new();
            for &a in left {
                for &b in right {
                    if rng.random_bool(0.5) {
                        edges.push((a, b));
                    }
                }
            }
            Graph::from_zero_based(n, edges)
        }
        RuleKind::Components => random_components(n, spec.k.expect("checked"), &mut rng),
        RuleKind::KRegular => {
            let k = spec.k.expect("checked");
            rejection(spec, budget, |rng| pairing(n, k, rng), &mut rng)?
        }
        RuleKind::Planar => {
            let m = spec.m.expect("checked");
            rejection(spec, budget, |rng| Some(gnm(n, m, rng)), &mut rng)?
        }
        RuleKind::KColor => match spec.m {
            Some(m) => rejection(spec, budget, |rng| Some(gnm(n, m, rng)), &mut rng)?,
            None => random_k_partite(n, spec.k.expect("checked"), &mut rng),
        },
    };
    debug_assert!(validate_rule(spec, &g).map(|r| r.valid).unwrap_or(false));
    Ok(g)
}

fn check_satisfiable(spec: &RuleSpec) -> Result<(), GenerateError> {
    let n = spec.n;
    let feasible = match spec.kind {
        RuleKind::KRegular => (n * spec.k.unwrap_or(0)).is_multiple_of(2),
        RuleKind::Planar => {
            let m = spec.m.unwrap_or(0);
            n < 3 || m <= 3 * n - 6
        }
        RuleKind::KColor => spec.m.is_none_or(|m| m <= turan_edges(n, spec.k.unwrap_or(1))),
        _ => true,
    };
    if feasible {
        Ok(())
    } else {
        Err(GenerateError::Unsatisfiable(spec.label()))
    }
}

/// Largest edge count of a k-colorable graph on n nodes.
pub fn turan_edges(n: usize, k: usize) -> usize {
    let k = k.clamp(1, n.max(1));
    let (q, r) = (n / k, n % k);
    let mut sizes = vec![q; k];
    sizes.iter_mut().take(r).for_each(|s| *s += 1);
    let within: usize = sizes.iter().map(|s| s * s.saturating_sub(1) / 2).sum();
    n * (n - 1) / 2 - within
}

fn rejection(
    spec: &RuleSpec,
    budget: usize,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> Option<Graph>,
    rng: &mut ChaCha8Rng,
) -> Result<Graph, GenerateError> {
    for _ in 0..budget {
        if let Some(g) = draw(rng) {
            if validate_rule(spec, &g)?.valid {
                return Ok(g);
            }
        }
    }
    Err(GenerateError::GenerationTimeout {
        spec: spec.label(),
        attempts: budget,
    })
}

fn permutation(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order
}

/// Uniform labeled tree via a random Prüfer sequence.
pub(crate) fn random_tree(n: usize, rng: &mut impl Rng) -> Graph {
    Graph::from_zero_based(n, tree_edges(n, rng))
}

fn tree_edges(n: usize, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    if n < 2 {
        return Vec::new();
    }
    let code: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &c in &code {
        degree[c] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &c in &code {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf always exists");
        edges.push((leaf, c));
        degree[leaf] -= 1;
        degree[c] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Uniform graph with exactly `m` edges on `n` nodes.
pub(crate) fn gnm(n: usize, m: usize, rng: &mut impl Rng) -> Graph {
    let pairs = n * (n - 1) / 2;
    let chosen = index::sample(rng, pairs, m);
    Graph::from_zero_based(n, chosen.into_iter().map(|i| pair_at(n, i)))
}

/// Each pair present independently with probability `p`.
pub(crate) fn gnp(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(p) {
                edges.push((a, b));
            }
        }
    }
    Graph::from_zero_based(n, edges)
}

/// Maps `0..n(n-1)/2` onto pairs `(a, b)` with `a < b` in row order.
fn pair_at(n: usize, mut i: usize) -> (usize, usize) {
    let mut a = 0;
    while i >= n - 1 - a {
        i -= n - 1 - a;
        a += 1;
    }
    (a, a + 1 + i)
}

/// One round of the configuration model; `None` on a loop or multi-edge.
fn pairing(n: usize, k: usize, rng: &mut impl Rng) -> Option<Graph> {
    let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, k)).collect();
    points.shuffle(rng);
    let mut edges: Vec<(usize, usize)> = points
        .chunks(2)
        .map(|p| (p[0].min(p[1]), p[0].max(p[1])))
        .collect();
    if edges.iter().any(|&(a, b)| a == b) {
        return None;
    }
    edges.sort_unstable();
    let before = edges.len();
    edges.dedup();
    (edges.len() == before).then(|| Graph::from_zero_based(n, edges))
}

fn random_components(n: usize, k: usize, rng: &mut impl Rng) -> Graph {
    let order = permutation(n, rng);
    let mut cuts: Vec<usize> = index::sample(rng, n - 1, k - 1)
        .into_iter()
        .map(|c| c + 1)
        .collect();
    cuts.sort_unstable();
    cuts.insert(0, 0);
    cuts.push(n);
    let mut edges = Vec::new();
    for w in cuts.windows(2) {
        let part = &order[w[0]..w[1]];
        let tree = tree_edges(part.len(), rng);
        for a in 0..part.len() {
            for b in a + 1..part.len() {
                let in_tree = tree.contains(&(a, b)) || tree.contains(&(b, a));
                if in_tree || rng.random_bool(COMPONENT_EXTRA_EDGE_P) {
                    edges.push((part[a], part[b]));
                }
            }
        }
    }
    Graph::from_zero_based(n, edges)
}

fn random_k_partite(n: usize, k: usize, rng: &mut impl Rng) -> Graph {
    let class: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if class[a] != class[b] && rng.random_bool(0.5) {
                edges.push((a, b));
            }
        }
    }
    Graph::from_zero_based(n, edges)
}
