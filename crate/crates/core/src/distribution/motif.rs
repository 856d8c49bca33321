//! Base graphs, motif templates and base+motif decomposition.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::iso::is_isomorphic;

/// Base family. Declaration order gives the same-label correspondence with
/// [`MotifKind`]: tree with cycle, ladder with house, wheel with crane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseKind {
    Tree,
    Ladder,
    Wheel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MotifKind {
    Cycle,
    House,
    Crane,
}

impl BaseKind {
    pub const ALL: [BaseKind; 3] = [BaseKind::Tree, BaseKind::Ladder, BaseKind::Wheel];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl MotifKind {
    pub const ALL: [MotifKind; 3] = [MotifKind::Cycle, MotifKind::House, MotifKind::Crane];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn template(self) -> Graph {
        let edges: &[(u32, u32)] = match self {
            MotifKind::Cycle => &[(1, 2), (1, 5), (2, 3), (3, 4), (4, 5)],
            MotifKind::House => &[(1, 2), (1, 5), (2, 3), (2, 5), (3, 4), (4, 5)],
            MotifKind::Crane => &[(1, 2), (1, 3), (1, 4), (1, 5), (2, 3), (3, 4), (4, 5)],
        };
        Graph::new(5, edges.iter().copied()).expect("template is well formed")
    }
}

impl fmt::Display for BaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaseKind::Tree => "tree",
            BaseKind::Ladder => "ladder",
            BaseKind::Wheel => "wheel",
        })
    }
}

impl fmt::Display for MotifKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MotifKind::Cycle => "cycle",
            MotifKind::House => "house",
            MotifKind::Crane => "crane",
        })
    }
}

/// A concrete base graph shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseShape {
    /// Perfect binary tree; depth 0 is a single node.
    BinaryTree { depth: u32 },
    TernaryTree { depth: u32 },
    /// Two paths of `len` nodes joined by `len` rungs.
    Ladder { len: usize },
    /// Hub plus a rim cycle, `nodes` in total.
    Wheel { nodes: usize },
}

impl BaseShape {
    pub fn kind(self) -> BaseKind {
        match self {
            BaseShape::BinaryTree { .. } | BaseShape::TernaryTree { .. } => BaseKind::Tree,
            BaseShape::Ladder { .. } => BaseKind::Ladder,
            BaseShape::Wheel { .. } => BaseKind::Wheel,
        }
    }

    pub fn build(self) -> Graph {
        match self {
            BaseShape::BinaryTree { depth } => full_tree(2, depth),
            BaseShape::TernaryTree { depth } => full_tree(3, depth),
            BaseShape::Ladder { len } => {
                assert!(len >= 2, "ladders need two rungs");
                let mut edges = Vec::new();
                for i in 0..len {
                    edges.push((i, len + i));
                    if i + 1 < len {
                        edges.push((i, i + 1));
                        edges.push((len + i, len + i + 1));
                    }
                }
                Graph::from_zero_based(2 * len, edges)
            }
            BaseShape::Wheel { nodes } => {
                assert!(nodes >= 4, "wheels need at least four nodes");
                let r = nodes - 1;
                Graph::from_zero_based(
                    nodes,
                    (1..=r).flat_map(|i| [(0, i), (i, i % r + 1)]),
                )
            }
        }
    }
}

fn full_tree(arity: usize, depth: u32) -> Graph {
    let n = (arity.pow(depth + 1) - 1) / (arity - 1);
    Graph::from_zero_based(n, (1..n).map(|v| ((v - 1) / arity, v)))
}

/// Base sizes used by the motif sampler.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct BaseSizes {
    pub binary_depth: u32,
    pub ternary_depth: u32,
    pub ladder_len: usize,
    pub wheel_nodes: usize,
}

impl Default for BaseSizes {
    fn default() -> Self {
        BaseSizes {
            binary_depth: 2,
            ternary_depth: 2,
            ladder_len: 4,
            wheel_nodes: 7,
        }
    }
}

/// Which base families `g` belongs to, in [`BaseKind`] order.
pub fn base_families(g: &Graph) -> Vec<BaseKind> {
    let n = g.node_count();
    let mut shapes = Vec::new();
    for arity in [2usize, 3] {
        let mut size = 1;
        let mut depth = 0;
        while size < n {
            depth += 1;
            size = (arity.pow(depth + 1) - 1) / (arity - 1);
        }
        if size == n && depth >= 1 {
            shapes.push(if arity == 2 {
                BaseShape::BinaryTree { depth }
            } else {
                BaseShape::TernaryTree { depth }
            });
        }
    }
    if n >= 4 && n.is_multiple_of(2) {
        shapes.push(BaseShape::Ladder { len: n / 2 });
    }
    if n >= 4 {
        shapes.push(BaseShape::Wheel { nodes: n });
    }
    let mut kinds: Vec<BaseKind> = shapes
        .into_iter()
        .filter(|s| s.build().edge_count() == g.edge_count())
        .filter(|s| is_isomorphic(&s.build(), g).unwrap_or(false))
        .map(BaseShape::kind)
        .collect();
    kinds.dedup();
    kinds
}

pub fn motif_family(g: &Graph) -> Option<MotifKind> {
    if g.node_count() != 5 {
        return None;
    }
    MotifKind::ALL
        .into_iter()
        .find(|m| is_isomorphic(&m.template(), g).unwrap_or(false))
}

/// Decomposes `g` into a base and a motif joined by one edge.
///
/// Each edge whose removal leaves exactly two components is tried; a split
/// counts when one side is a motif and the other lies in exactly one base
/// family. If all such splits agree on the labels they are returned;
/// otherwise the split with the smallest motif node set decides.
pub fn decompose(g: &Graph) -> Option<(BaseKind, MotifKind)> {
    let mut found: Vec<(Vec<u32>, BaseKind, MotifKind)> = Vec::new();
    for (i, _) in g.edges().iter().enumerate() {
        let rest: Vec<(u32, u32)> = g
            .edges()
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &e)| e)
            .collect();
        let cut = Graph::new(g.node_count(), rest).expect("subset of valid edges");
        let comps = cut.connected_components();
        if comps.len() != 2 {
            continue;
        }
        for (motif_side, base_side) in [(&comps[0], &comps[1]), (&comps[1], &comps[0])] {
            let Some(motif) = motif_family(&cut.induced_subgraph(motif_side)) else {
                continue;
            };
            if let [base] = base_families(&cut.induced_subgraph(base_side))[..] {
                found.push((motif_side.clone(), base, motif));
            }
        }
    }
    let smallest = &found.iter().min_by(|a, b| a.0.cmp(&b.0))?.0;
    let mut labels = found.iter().filter(|f| &f.0 == smallest).map(|f| (f.1, f.2));
    let first = labels.next()?;
    labels.all(|l| l == first).then_some(first)
}

/// Joins `base` and `motif` with one edge between the given 1-based nodes.
pub fn compose(base: &Graph, motif: &Graph, base_node: u32, motif_node: u32) -> Graph {
    let offset = base.node_count() as u32;
    base.disjoint_union(motif)
        .with_edge(base_node, offset + motif_node)
        .expect("endpoints in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn templates_serialize_exactly() {
        assert_eq!(
            MotifKind::Cycle.template().to_text(),
            "(5, [(1, 2), (1, 5), (2, 3), (3, 4), (4, 5)])"
        );
        assert_eq!(
            MotifKind::House.template().to_text(),
            "(5, [(1, 2), (1, 5), (2, 3), (2, 5), (3, 4), (4, 5)])"
        );
        assert_eq!(
            MotifKind::Crane.template().to_text(),
            "(5, [(1, 2), (1, 3), (1, 4), (1, 5), (2, 3), (3, 4), (4, 5)])"
        );
    }

    #[test]
    fn base_shapes() {
        let w = BaseShape::Wheel { nodes: 7 }.build();
        let mut d = w.degrees();
        d.sort_unstable();
        assert_eq!(d, [3, 3, 3, 3, 3, 3, 6]);
        let l = BaseShape::Ladder { len: 4 }.build();
        assert_eq!((l.node_count(), l.edge_count()), (8, 10));
        let t = BaseShape::BinaryTree { depth: 2 }.build();
        assert_eq!((t.node_count(), t.edge_count()), (7, 6));
        let t = BaseShape::TernaryTree { depth: 2 }.build();
        assert_eq!((t.node_count(), t.edge_count()), (13, 12));
    }

    #[test]
    fn bases_belong_to_one_family() {
        for shape in [
            BaseShape::BinaryTree { depth: 2 },
            BaseShape::TernaryTree { depth: 2 },
            BaseShape::Ladder { len: 4 },
            BaseShape::Wheel { nodes: 7 },
        ] {
            assert_eq!(base_families(&shape.build()), [shape.kind()]);
        }
        let path7 = Graph::from_zero_based(7, (0..6).map(|i| (i, i + 1)));
        assert!(base_families(&path7).is_empty());
    }

    #[test]
    fn wheel_with_house() {
        let g = compose(&BaseShape::Wheel { nodes: 7 }.build(), &MotifKind::House.template(), 3, 4);
        assert_eq!(decompose(&g), Some((BaseKind::Wheel, MotifKind::House)));
    }

    #[test]
    fn every_pairing_decomposes() {
        let bases = [
            BaseShape::BinaryTree { depth: 2 },
            BaseShape::TernaryTree { depth: 2 },
            BaseShape::Ladder { len: 4 },
            BaseShape::Wheel { nodes: 7 },
        ];
        for shape in bases {
            let base = shape.build();
            for motif in MotifKind::ALL {
                for b in 1..=base.node_count() as u32 {
                    for m in 1..=5 {
                        let g = compose(&base, &motif.template(), b, m);
                        assert_eq!(decompose(&g), Some((shape.kind(), motif)), "{shape:?} {motif} {b} {m}");
                    }
                }
            }
        }
    }
}
