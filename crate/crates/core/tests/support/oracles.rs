//! Brute-force reference implementations. Deliberately naive: they share no
//! code with the library beyond reading a graph's edge list.

use graphgen::graph::Graph;
use graphgen::rules::{RuleKind, RuleSpec};

pub struct Dense {
    pub n: usize,
    pub adj: Vec<Vec<bool>>,
    pub m: usize,
}

impl Dense {
    pub fn of(g: &Graph) -> Self {
        let n = g.node_count();
        let mut adj = vec![vec![false; n]; n];
        for &(u, v) in g.edges() {
            let (u, v) = (u as usize - 1, v as usize - 1);
            adj[u][v] = true;
            adj[v][u] = true;
        }
        let m = g.edges().len();
        Dense { n, adj, m }
    }

    fn degree(&self, v: usize) -> usize {
        self.adj[v].iter().filter(|&&b| b).count()
    }

    fn edge_set(&self) -> Vec<(usize, usize)> {
        let mut e = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.adj[u][v] {
                    e.push((u, v));
                }
            }
        }
        e
    }
}

/// Transitive closure by Warshall's algorithm, then counts classes.
pub fn component_count(d: &Dense) -> usize {
    let n = d.n;
    let mut r = d.adj.clone();
    for (v, row) in r.iter_mut().enumerate() {
        row[v] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    (0..n).filter(|&v| (0..v).all(|u| !r[u][v])).count()
}

fn count_paths(d: &Dense, at: usize, to: usize, seen: &mut Vec<bool>, cap: usize) -> usize {
    if at == to {
        return 1;
    }
    let mut total = 0;
    for w in 0..d.n {
        if d.adj[at][w] && !seen[w] {
            seen[w] = true;
            total += count_paths(d, w, to, seen, cap);
            seen[w] = false;
            if total >= cap {
                return total;
            }
        }
    }
    total
}

/// Exactly one simple path between every pair of nodes.
pub fn is_tree(d: &Dense) -> bool {
    for u in 0..d.n {
        for v in u + 1..d.n {
            let mut seen = vec![false; d.n];
            seen[u] = true;
            if count_paths(d, u, v, &mut seen, 2) != 1 {
                return false;
            }
        }
    }
    true
}

/// Calls `f` on every permutation of `items` (Heap's algorithm).
fn permutations(items: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if k <= 1 {
        return f(items);
    }
    for i in 0..k {
        if permutations(items, k - 1, f) {
            return true;
        }
        let j = if k.is_multiple_of(2) { i } else { 0 };
        items.swap(j, k - 1);
    }
    false
}

fn ring_edges(order: &[usize]) -> Vec<(usize, usize)> {
    let mut e: Vec<(usize, usize)> = (0..order.len())
        .map(|i| {
            let (a, b) = (order[i], order[(i + 1) % order.len()]);
            (a.min(b), a.max(b))
        })
        .collect();
    e.sort_unstable();
    e
}

/// The edge set is exactly one Hamiltonian cycle.
pub fn is_cycle(d: &Dense) -> bool {
    if d.n < 3 || d.m != d.n {
        return false;
    }
    let target = d.edge_set();
    let mut rest: Vec<usize> = (1..d.n).collect();
    let k = rest.len();
    permutations(&mut rest, k, &mut |p| {
        let mut order = vec![0];
        order.extend_from_slice(p);
        ring_edges(&order) == target
    })
}

/// Some hub plus some cyclic order of the rest gives exactly the edge set.
pub fn is_wheel(d: &Dense) -> bool {
    if d.n < 4 || d.m != 2 * (d.n - 1) {
        return false;
    }
    let target = d.edge_set();
    (0..d.n).any(|hub| {
        let mut rest: Vec<usize> = (0..d.n).filter(|&v| v != hub).collect();
        let first = rest.remove(0);
        let k = rest.len();
        permutations(&mut rest, k, &mut |p| {
            let mut order = vec![first];
            order.extend_from_slice(p);
            let mut e = ring_edges(&order);
            e.extend(order.iter().map(|&v| (v.min(hub), v.max(hub))));
            e.sort_unstable();
            e == target
        })
    })
}

pub fn is_k_regular(d: &Dense, k: usize) -> bool {
    (0..d.n).all(|v| d.degree(v) == k)
}

/// Tries all k^n color assignments.
pub fn is_k_colorable(d: &Dense, k: usize) -> bool {
    if d.n == 0 {
        return true;
    }
    if k == 0 {
        return false;
    }
    let total = (k as u64).pow(d.n as u32);
    let edges = d.edge_set();
    (0..total).any(|mut code| {
        let mut c = vec![0u64; d.n];
        for slot in c.iter_mut() {
            *slot = code % k as u64;
            code /= k as u64;
        }
        edges.iter().all(|&(u, v)| c[u] != c[v])
    })
}

/// Tries all 2^n side assignments with exactly `u` nodes on the first side.
pub fn is_bipartite_with(d: &Dense, u: usize) -> bool {
    let edges = d.edge_set();
    (0u32..1 << d.n).any(|mask| {
        mask.count_ones() as usize == u
            && edges.iter().all(|&(a, b)| (mask >> a & 1) != (mask >> b & 1))
    })
}

/// Set partitions of `items` into exactly `blocks` nonempty blocks.
fn partitions(items: &[usize], blocks: usize, acc: &mut Vec<Vec<usize>>, f: &mut dyn FnMut(&[Vec<usize>]) -> bool) -> bool {
    let Some((&first, rest)) = items.split_first() else {
        return acc.len() == blocks && f(acc);
    };
    if acc.len() + items.len() < blocks {
        return false;
    }
    for i in 0..acc.len() {
        acc[i].push(first);
        let hit = partitions(rest, blocks, acc, f);
        acc[i].pop();
        if hit {
            return true;
        }
    }
    if acc.len() < blocks {
        acc.push(vec![first]);
        let hit = partitions(rest, blocks, acc, f);
        acc.pop();
        if hit {
            return true;
        }
    }
    false
}

fn connected_within(d: &Dense, set: &[usize]) -> bool {
    let mut seen = vec![set[0]];
    let mut i = 0;
    while i < seen.len() {
        let v = seen[i];
        for &w in set {
            if d.adj[v][w] && !seen.contains(&w) {
                seen.push(w);
            }
        }
        i += 1;
    }
    seen.len() == set.len()
}

/// Some choice of disjoint connected branch sets realizes K5 or K3,3 as a
/// minor (Wagner).
pub fn has_kuratowski_minor(d: &Dense) -> bool {
    let n = d.n;
    for mask in 0u32..1 << n {
        let used: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        for blocks in [5usize, 6] {
            if used.len() < blocks {
                continue;
            }
            let hit = partitions(&used, blocks, &mut Vec::new(), &mut |parts| {
                if !parts.iter().all(|p| connected_within(d, p)) {
                    return false;
                }
                let touch = |a: &[usize], b: &[usize]| a.iter().any(|&x| b.iter().any(|&y| d.adj[x][y]));
                if blocks == 5 {
                    (0..5).all(|i| (i + 1..5).all(|j| touch(&parts[i], &parts[j])))
                } else {
                    // Side A always holds block 0.
                    (0u32..1 << 6).filter(|s| s & 1 == 1 && s.count_ones() == 3).any(|s| {
                        (0..6).all(|i| {
                            (0..6).all(|j| {
                                (s >> i & 1 == 0) || (s >> j & 1 == 1) || touch(&parts[i], &parts[j])
                            })
                        })
                    })
                }
            });
            if hit {
                return true;
            }
        }
    }
    false
}

pub fn is_planar(d: &Dense) -> bool {
    if d.n >= 3 && d.m > 3 * d.n - 6 {
        return false;
    }
    !has_kuratowski_minor(d)
}

/// Reference verdict for any rule spec.
pub fn oracle(spec: &RuleSpec, g: &Graph) -> bool {
    let d = Dense::of(g);
    if d.n != spec.n {
        return false;
    }
    if spec.m.is_some_and(|m| m != d.m) {
        return false;
    }
    match spec.kind {
        RuleKind::Tree => is_tree(&d),
        RuleKind::Cycle => is_cycle(&d),
        RuleKind::Components => component_count(&d) == spec.k.unwrap(),
        RuleKind::Planar => is_planar(&d),
        RuleKind::KRegular => is_k_regular(&d, spec.k.unwrap()),
        RuleKind::Wheel => is_wheel(&d),
        RuleKind::Bipartite => is_bipartite_with(&d, spec.part_sizes.unwrap().0),
        RuleKind::KColor => is_k_colorable(&d, spec.k.unwrap()),
    }
}

/// Isomorphism by trying every bijection.
pub fn brute_isomorphic(a: &Graph, b: &Graph) -> bool {
    let (da, db) = (Dense::of(a), Dense::of(b));
    if da.n != db.n || da.m != db.m {
        return false;
    }
    let mut perm: Vec<usize> = (0..da.n).collect();
    let k = perm.len();
    if k == 0 {
        return true;
    }
    permutations(&mut perm, k, &mut |p| {
        (0..da.n).all(|u| (0..da.n).all(|v| da.adj[u][v] == db.adj[p[u]][p[v]]))
    })
}

/// Every graph on `n` labeled nodes.
pub fn all_graphs(n: usize) -> impl Iterator<Item = Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    (0u64..1 << pairs.len()).map(move |mask| {
        Graph::from_zero_based(
            n,
            pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e),
        )
    })
}

/// Every spec worth checking against a graph of `n` nodes and `m` edges,
/// with color counts up to `max_colors`.
pub fn specs_for(n: usize, m: usize, max_colors: usize) -> Vec<RuleSpec> {
    let mut specs = vec![RuleSpec::tree(n), RuleSpec::planar(n, m)];
    if m < n * (n - 1) / 2 {
        specs.push(RuleSpec::planar(n, m + 1));
    }
    if n >= 3 {
        specs.push(RuleSpec::cycle(n));
    }
    if n >= 4 {
        specs.push(RuleSpec::wheel(n));
    }
    for k in 1..=n {
        specs.push(RuleSpec::components(n, k));
    }
    for k in 0..n {
        specs.push(RuleSpec::k_regular(n, k));
    }
    for u in 0..=n {
        specs.push(RuleSpec::bipartite(u, n - u));
    }
    for k in 1..=n.min(max_colors) {
        specs.push(RuleSpec::k_color(n, None, k));
        specs.push(RuleSpec::k_color(n, Some(m), k));
    }
    specs
}
