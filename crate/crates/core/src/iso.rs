//! Isomorphism testing and canonical keys for small graphs (at most
//! [`MAX_ISO_NODES`] nodes).
//!
//! Both routes use color refinement, but they are deliberately separate:
//! [`is_isomorphic`] searches for one bijection between two graphs, while
//! [`CanonicalKey`] enumerates the individualization-refinement tree of a
//! single graph and keeps the maximal leaf certificate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;

pub const MAX_ISO_NODES: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("graph with {0} nodes exceeds the isomorphism limit of {MAX_ISO_NODES}")]
pub struct SizeLimitExceeded(pub usize);

type Adj = Vec<u64>;

fn bit_adjacency(g: &Graph) -> Adj {
    let mut adj = vec![0u64; g.node_count()];
    for &(u, v) in g.edges() {
        let (u, v) = (u as usize - 1, v as usize - 1);
        adj[u] |= 1 << v;
        adj[v] |= 1 << u;
    }
    adj
}

fn check_size(g: &Graph) -> Result<(), SizeLimitExceeded> {
    if g.node_count() > MAX_ISO_NODES {
        Err(SizeLimitExceeded(g.node_count()))
    } else {
        Ok(())
    }
}

/// Refines the colorings of several graphs jointly until stable.
///
/// Colors are ranks of `(old color, sorted neighbor colors)` over the union
/// of all graphs, so they are comparable across graphs and independent of
/// node labels.
fn refine(adjs: &[&Adj], colors: &mut [Vec<u32>]) {
    let mut distinct = count_distinct(colors);
    loop {
        let mut signatures: Vec<Vec<(u32, Vec<u32>)>> = Vec::with_capacity(adjs.len());
        for (adj, col) in adjs.iter().zip(colors.iter()) {
            let sigs = (0..adj.len())
                .map(|v| {
                    let mut nbr: Vec<u32> = ones(adj[v]).map(|w| col[w]).collect();
                    nbr.sort_unstable();
                    (col[v], nbr)
                })
                .collect();
            signatures.push(sigs);
        }
        let mut all: Vec<&(u32, Vec<u32>)> = signatures.iter().flatten().collect();
        all.sort();
        all.dedup();
        for (sigs, col) in signatures.iter().zip(colors.iter_mut()) {
            for (v, sig) in sigs.iter().enumerate() {
                col[v] = all.binary_search(&sig).expect("signature present") as u32;
            }
        }
        let now = all.len();
        if now == distinct {
            return;
        }
        distinct = now;
    }
}

fn count_distinct(colors: &[Vec<u32>]) -> usize {
    let mut all: Vec<u32> = colors.iter().flatten().copied().collect();
    all.sort_unstable();
    all.dedup();
    all.len()
}

fn ones(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

fn individualize(colors: &[u32], v: usize) -> Vec<u32> {
    colors
        .iter()
        .enumerate()
        .map(|(w, &c)| if w == v { 2 * c } else { 2 * c + 1 })
        .collect()
}

fn histogram(colors: &[u32]) -> Vec<u32> {
    let mut h = colors.to_vec();
    h.sort_unstable();
    h
}

/// Smallest non-singleton color class, ties broken by color value.
fn target_cell(colors: &[u32]) -> Option<u32> {
    let mut counts = std::collections::BTreeMap::new();
    for &c in colors {
        *counts.entry(c).or_insert(0usize) += 1;
    }
    counts
        .into_iter()
        .filter(|&(_, k)| k > 1)
        .min_by_key(|&(c, k)| (k, c))
        .map(|(c, _)| c)
}

/// Decides whether an edge-preserving bijection between `g` and `h` exists.
pub fn is_isomorphic(g: &Graph, h: &Graph) -> Result<bool, SizeLimitExceeded> {
    check_size(g)?;
    check_size(h)?;
    if g.node_count() != h.node_count() || g.edge_count() != h.edge_count() {
        return Ok(false);
    }
    let (ag, ah) = (bit_adjacency(g), bit_adjacency(h));
    let n = g.node_count();
    Ok(match_search(&ag, &ah, vec![0; n], vec![0; n]))
}

fn match_search(ag: &Adj, ah: &Adj, cg: Vec<u32>, ch: Vec<u32>) -> bool {
    let mut colors = [cg, ch];
    refine(&[ag, ah], &mut colors);
    let [cg, ch] = colors;
    if histogram(&cg) != histogram(&ch) {
        return false;
    }
    match target_cell(&cg) {
        None => {
            // Discrete: colors define the only candidate bijection.
            let mut map = vec![0usize; cg.len()];
            let mut by_color = vec![0usize; ch.len()];
            for (w, &c) in ch.iter().enumerate() {
                by_color[c as usize] = w;
            }
            for (v, &c) in cg.iter().enumerate() {
                map[v] = by_color[c as usize];
            }
            (0..ag.len()).all(|v| ones(ag[v]).all(|w| ah[map[v]] >> map[w] & 1 == 1))
        }
        Some(cell) => {
            let u = cg.iter().position(|&c| c == cell).expect("cell non-empty");
            let next_g = individualize(&cg, u);
            ch.iter()
                .enumerate()
                .filter(|&(_, &c)| c == cell)
                .any(|(w, _)| match_search(ag, ah, next_g.clone(), individualize(&ch, w)))
        }
    }
}

/// Byte string that is equal for two graphs exactly when they are isomorphic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn of(g: &Graph) -> Result<Self, SizeLimitExceeded> {
        check_size(g)?;
        let mut out = Vec::new();
        encode_graph(&bit_adjacency(g), &mut out);
        Ok(CanonicalKey(out))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }
}

/// Encoding: node count, then component encodings in sorted order.
fn encode_graph(adj: &Adj, out: &mut Vec<u8>) {
    out.push(adj.len() as u8);
    let mut parts: Vec<Vec<u8>> = components(adj)
        .into_iter()
        .map(|nodes| encode_connected(&induced(adj, &nodes)))
        .collect();
    parts.sort();
    for p in parts {
        out.extend(p);
    }
}

/// Encoding of a connected graph: size, tag, body. Tag 1 marks a body that
/// encodes the complement (whose components are then smaller).
fn encode_connected(adj: &Adj) -> Vec<u8> {
    let n = adj.len();
    let mut out = vec![n as u8];
    if n <= 1 {
        out.push(0);
        return out;
    }
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let complement: Adj = (0..n).map(|v| !adj[v] & full & !(1 << v)).collect();
    if components(&complement).len() > 1 {
        out.push(1);
        encode_graph(&complement, &mut out);
    } else {
        out.push(0);
        for row in CanonicalSearch::run(adj) {
            out.extend_from_slice(&(row as u32).to_le_bytes());
        }
    }
    out
}

fn components(adj: &Adj) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut seen = 0u64;
    let mut out = Vec::new();
    for s in 0..n {
        if seen >> s & 1 == 1 {
            continue;
        }
        let mut comp = 1u64 << s;
        let mut frontier = comp;
        while frontier != 0 {
            let mut next = 0;
            for v in ones(frontier) {
                next |= adj[v];
            }
            frontier = next & !comp;
            comp |= next;
        }
        seen |= comp;
        out.push(ones(comp).collect());
    }
    out
}

fn induced(adj: &Adj, nodes: &[usize]) -> Adj {
    nodes
        .iter()
        .map(|&v| {
            nodes
                .iter()
                .enumerate()
                .filter(|&(_, &w)| adj[v] >> w & 1 == 1)
                .fold(0u64, |m, (j, _)| m | 1 << j)
        })
        .collect()
}

struct CanonicalSearch<'a> {
    adj: &'a Adj,
    best: Option<(Vec<u64>, Vec<usize>)>,
    generators: Vec<Vec<usize>>,
}

impl<'a> CanonicalSearch<'a> {
    fn run(adj: &'a Adj) -> Vec<u64> {
        let n = adj.len();
        let mut search = CanonicalSearch {
            adj,
            best: None,
            generators: twin_transpositions(adj),
        };
        let mut colors = [vec![0u32; n]];
        refine(&[adj], &mut colors);
        let [colors] = colors;
        search.descend(colors, &mut Vec::new());
        search.best.expect("search reaches a leaf").0
    }

    fn descend(&mut self, colors: Vec<u32>, prefix: &mut Vec<usize>) {
        let Some(cell) = target_cell(&colors) else {
            self.leaf(&colors);
            return;
        };
        let members: Vec<usize> = (0..colors.len()).filter(|&v| colors[v] == cell).collect();
        let mut tried: Vec<usize> = Vec::new();
        for v in members {
            if !tried.is_empty() {
                let orbits = self.stabilizer_orbits(prefix);
                if tried.iter().any(|&t| orbits.same(t, v)) {
                    continue;
                }
            }
            tried.push(v);
            let mut next = [individualize(&colors, v)];
            refine(&[self.adj], &mut next);
            let [next] = next;
            prefix.push(v);
            self.descend(next, prefix);
            prefix.pop();
        }
    }

    fn leaf(&mut self, colors: &[u32]) {
        let n = colors.len();
        // labeling[p] = vertex placed at position p
        let mut labeling = vec![0usize; n];
        for (v, &c) in colors.iter().enumerate() {
            labeling[c as usize] = v;
        }
        let mut position = vec![0usize; n];
        for (p, &v) in labeling.iter().enumerate() {
            position[v] = p;
        }
        let cert: Vec<u64> = labeling
            .iter()
            .map(|&v| ones(self.adj[v]).fold(0u64, |m, w| m | 1 << position[w]))
            .collect();
        match &self.best {
            None => self.best = Some((cert, labeling)),
            Some((best_cert, best_labeling)) => {
                if cert == *best_cert {
                    let mut sigma = vec![0usize; n];
                    for p in 0..n {
                        sigma[labeling[p]] = best_labeling[p];
                    }
                    self.generators.push(sigma);
                } else if cert > *best_cert {
                    self.best = Some((cert, labeling));
                }
            }
        }
    }

    /// Orbits of the group generated by known automorphisms that fix every
    /// vertex of `prefix`.
    fn stabilizer_orbits(&self, prefix: &[usize]) -> UnionFind {
        let mut uf = UnionFind::new(self.adj.len());
        for g in &self.generators {
            if prefix.iter().all(|&v| g[v] == v) {
                for (v, &w) in g.iter().enumerate() {
                    uf.union(v, w);
                }
            }
        }
        uf
    }
}

/// Transpositions of vertices with identical neighborhoods (apart from each
/// other); each is an automorphism.
fn twin_transpositions(adj: &Adj) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut out = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let mask = !(1u64 << u | 1u64 << v);
            if adj[u] & mask == adj[v] & mask {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.swap(u, v);
                out.push(perm);
            }
        }
    }
    out
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    fn same(&self, a: usize, b: usize) -> bool {
        let root = |mut x: usize| {
            while self.parent[x] != x {
                x = self.parent[x];
            }
            x
        };
        root(a) == root(b)
    }
}
