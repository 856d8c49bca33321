//! Planarity testing.
//!
//! The graph is split into biconnected blocks (a graph is planar iff every
//! block is) and each block is checked with the Demoucron-Malgrange-Pertuiset
//! path-embedding procedure: start from a cycle, then repeatedly embed a path
//! of some fragment into a face that contains all of its attachment vertices.
//! The procedure fails exactly when some fragment has no admissible face.

use serde::{Deserialize, Serialize};

use crate::graph::Graph;

/// Why a graph was found non-planar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Obstruction {
    /// More than 3n - 6 edges.
    EdgeBound,
    /// A block contains a fragment with no admissible face, which certifies a
    /// Kuratowski subdivision inside that block.
    BlockedFragment,
}

pub fn planarity(g: &Graph) -> Result<(), Obstruction> {
    let n = g.node_count();
    let m = g.edge_count();
    if n >= 3 && m > 3 * n - 6 {
        return Err(Obstruction::EdgeBound);
    }
    if n <= 4 {
        return Ok(());
    }
    let adj = g.adjacency();
    for block in biconnected_blocks(&adj) {
        if block.len() < 9 {
            // Fewer than 9 edges cannot contain K5 (10) or K3,3 (9).
            continue;
        }
        if !block_is_planar(&block) {
            return Err(Obstruction::BlockedFragment);
        }
    }
    Ok(())
}

pub fn is_planar(g: &Graph) -> bool {
    planarity(g).is_ok()
}

/// Edge sets of the biconnected components (Hopcroft-Tarjan).
fn biconnected_blocks(adj: &[Vec<usize>]) -> Vec<Vec<(usize, usize)>> {
    struct State<'a> {
        adj: &'a [Vec<usize>],
        disc: Vec<usize>,
        low: Vec<usize>,
        time: usize,
        stack: Vec<(usize, usize)>,
        blocks: Vec<Vec<(usize, usize)>>,
    }

    fn visit(s: &mut State<'_>, v: usize, parent: Option<usize>) {
        s.time += 1;
        s.disc[v] = s.time;
        s.low[v] = s.time;
        for i in 0..s.adj[v].len() {
            let w = s.adj[v][i];
            if Some(w) == parent {
                continue;
            }
            if s.disc[w] == 0 {
                s.stack.push((v, w));
                visit(s, w, Some(v));
                s.low[v] = s.low[v].min(s.low[w]);
                if s.low[w] >= s.disc[v] {
                    let mut block = Vec::new();
                    while let Some(e) = s.stack.pop() {
                        block.push(e);
                        if e == (v, w) {
                            break;
                        }
                    }
                    s.blocks.push(block);
                }
            } else if s.disc[w] < s.disc[v] {
                s.stack.push((v, w));
                s.low[v] = s.low[v].min(s.disc[w]);
            }
        }
    }

    let n = adj.len();
    let mut s = State {
        adj,
        disc: vec![0; n],
        low: vec![0; n],
        time: 0,
        stack: Vec::new(),
        blocks: Vec::new(),
    };
    for v in 0..n {
        if s.disc[v] == 0 {
            visit(&mut s, v, None);
        }
    }
    s.blocks
}

fn block_is_planar(edges: &[(usize, usize)]) -> bool {
    // Relabel block vertices to 0..k.
    let mut ids: Vec<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    ids.sort_unstable();
    ids.dedup();
    let local = |v: usize| ids.binary_search(&v).expect("vertex in block");
    let k = ids.len();
    let mut adj = vec![Vec::new(); k];
    for &(a, b) in edges {
        let (a, b) = (local(a), local(b));
        adj[a].push(b);
        adj[b].push(a);
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    Dmp::new(adj).run()
}

struct Dmp {
    adj: Vec<Vec<usize>>,
    embedded_vertex: Vec<bool>,
    embedded_edge: std::collections::HashSet<(usize, usize)>,
    faces: Vec<Vec<usize>>,
    edge_total: usize,
}

struct Fragment {
    attachments: Vec<usize>,
    /// Interior vertices; empty for a single chord edge.
    interior: Vec<usize>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl Dmp {
    fn new(adj: Vec<Vec<usize>>) -> Self {
        let edge_total = adj.iter().map(Vec::len).sum::<usize>() / 2;
        let k = adj.len();
        Dmp {
            adj,
            embedded_vertex: vec![false; k],
            embedded_edge: Default::default(),
            faces: Vec::new(),
            edge_total,
        }
    }

    fn run(mut self) -> bool {
        let cycle = self.find_cycle();
        for i in 0..cycle.len() {
            let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
            self.embedded_vertex[a] = true;
            self.embedded_edge.insert(key(a, b));
        }
        self.faces = vec![cycle.clone(), cycle];

        while self.embedded_edge.len() < self.edge_total {
            let fragments = self.fragments();
            let mut choice: Option<(usize, usize)> = None;
            for (i, frag) in fragments.iter().enumerate() {
                let admissible: Vec<usize> = (0..self.faces.len())
                    .filter(|&f| frag.attachments.iter().all(|a| self.faces[f].contains(a)))
                    .collect();
                match admissible.len() {
                    0 => return false,
                    1 => {
                        choice = Some((i, admissible[0]));
                        break;
                    }
                    _ => {
                        if choice.is_none() {
                            choice = Some((i, admissible[0]));
                        }
                    }
                }
            }
            let (frag, face) = choice.expect("at least one fragment remains");
            let path = self.fragment_path(&fragments[frag]);
            self.embed_path(&path, face);
        }
        true
    }

    /// Edge (0, b) closed by a shortest 0-b path that avoids it; exists
    /// because the block is 2-connected.
    fn find_cycle(&self) -> Vec<usize> {
        let a = 0;
        let b = self.adj[a][0];
        let mut prev = vec![usize::MAX; self.adj.len()];
        prev[a] = a;
        let mut queue = std::collections::VecDeque::from([a]);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if (v, w) == (a, b) || prev[w] != usize::MAX {
                    continue;
                }
                prev[w] = v;
                if w == b {
                    let mut cycle = vec![b];
                    let mut x = b;
                    while x != a {
                        x = prev[x];
                        cycle.push(x);
                    }
                    return cycle;
                }
                queue.push_back(w);
            }
        }
        unreachable!("a 2-connected block always contains a cycle")
    }

    fn fragments(&self) -> Vec<Fragment> {
        let k = self.adj.len();
        let mut out = Vec::new();
        for a in 0..k {
            if !self.embedded_vertex[a] {
                continue;
            }
            for &b in &self.adj[a] {
                if a < b && self.embedded_vertex[b] && !self.embedded_edge.contains(&key(a, b)) {
                    out.push(Fragment {
                        attachments: vec![a, b],
                        interior: Vec::new(),
                    });
                }
            }
        }
        let mut seen = vec![false; k];
        for s in 0..k {
            if self.embedded_vertex[s] || seen[s] {
                continue;
            }
            seen[s] = true;
            let mut interior = vec![s];
            let mut attachments = Vec::new();
            let mut i = 0;
            while i < interior.len() {
                let v = interior[i];
                i += 1;
                for &w in &self.adj[v] {
                    if self.embedded_vertex[w] {
                        attachments.push(w);
                    } else if !seen[w] {
                        seen[w] = true;
                        interior.push(w);
                    }
                }
            }
            attachments.sort_unstable();
            attachments.dedup();
            out.push(Fragment {
                attachments,
                interior,
            });
        }
        out
    }

    /// A path through the fragment joining two distinct attachment vertices.
    fn fragment_path(&self, frag: &Fragment) -> Vec<usize> {
        if frag.interior.is_empty() {
            return frag.attachments.clone();
        }
        let start = frag.attachments[0];
        let inside = |v: usize| frag.interior.contains(&v);
        let mut prev = vec![usize::MAX; self.adj.len()];
        let mut queue = std::collections::VecDeque::new();
        for &w in &self.adj[start] {
            if inside(w) && prev[w] == usize::MAX {
                prev[w] = start;
                queue.push_back(w);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if inside(w) {
                    if prev[w] == usize::MAX {
                        prev[w] = v;
                        queue.push_back(w);
                    }
                } else if self.embedded_vertex[w] && w != start {
                    let mut path = vec![w, v];
                    let mut x = v;
                    while prev[x] != start {
                        x = prev[x];
                        path.push(x);
                    }
                    path.push(start);
                    path.reverse();
                    return path;
                }
            }
        }
        unreachable!("fragments of a 2-connected block have two attachments")
    }

    fn embed_path(&mut self, path: &[usize], face_index: usize) {
        for w in path.windows(2) {
            self.embedded_edge.insert(key(w[0], w[1]));
        }
        for &v in path {
            self.embedded_vertex[v] = true;
        }
        let face = self.faces[face_index].clone();
        let (a, b) = (path[0], *path.last().expect("path non-empty"));
        let len = face.len();
        let ia = face.iter().position(|&v| v == a).expect("attachment on face");
        let ib = face.iter().position(|&v| v == b).expect("attachment on face");
        let walk = |from: usize, to: usize| {
            let mut seg = vec![face[from]];
            let mut i = from;
            while i != to {
                i = (i + 1) % len;
                seg.push(face[i]);
            }
            seg
        };
        let interior = &path[1..path.len() - 1];
        // a .. b along the face, then back to a through the new path.
        let mut first = walk(ia, ib);
        first.extend(interior.iter().rev());
        // b .. a along the face, then back to b through the new path.
        let mut second = walk(ib, ia);
        second.extend(interior.iter());
        self.faces[face_index] = first;
        self.faces.push(second);
    }
}
