//! Undirected simple graphs and their text form `(n, [(u, v), ...])`.
//!
//! Node ids are 1-based in every external representation. Edges are stored
//! normalized (`u < v`) and sorted, so two `Graph` values compare equal exactly
//! when they have the same labeled edge set.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest node count accepted from text. Keeps hostile input from forcing
/// huge allocations in downstream algorithms.
pub const MAX_TEXT_NODES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("malformed graph text at byte {offset}: {reason}")]
    MalformedSyntax { offset: usize, reason: String },
    #[error("endpoint {node} outside 1..={node_count}")]
    EndpointOutOfRange { node: u64, node_count: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(u32),
    #[error("node count {0} not in 1..={MAX_TEXT_NODES}")]
    InvalidNodeCount(u64),
}

/// Non-fatal observations made while normalizing parsed text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParseWarning {
    /// The same undirected edge appeared more than once; extra copies dropped.
    DuplicateEdges(usize),
    /// Node ids were 0-based and have been shifted up by one.
    ZeroBasedIds,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Graph {
    node_count: usize,
    edges: Vec<(u32, u32)>,
}

impl Graph {
    /// Builds a graph from 1-based edges in any order and orientation.
    ///
    /// Duplicates are collapsed silently; use [`Graph::with_report`] to learn
    /// how many were dropped.
    pub fn new(
        node_count: usize,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self, GraphError> {
        Self::with_report(node_count, edges).map(|(g, _)| g)
    }

    /// Like [`Graph::new`] but also returns the number of duplicate edges removed.
    pub fn with_report(
        node_count: usize,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<(Self, usize), GraphError> {
        if node_count == 0 {
            return Err(GraphError::InvalidNodeCount(0));
        }
        let mut normalized = Vec::new();
        for (a, b) in edges {
            for x in [a, b] {
                if x == 0 || x as usize > node_count {
                    return Err(GraphError::EndpointOutOfRange {
                        node: x as u64,
                        node_count,
                    });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        let before = normalized.len();
        normalized.dedup();
        let duplicates = before - normalized.len();
        Ok((
            Graph {
                node_count,
                edges: normalized,
            },
            duplicates,
        ))
    }

    /// Builds a graph from 0-based edges; convenient for generators.
    pub fn from_zero_based(
        node_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        Self::new(
            node_count,
            edges
                .into_iter()
                .map(|(a, b)| (a as u32 + 1, b as u32 + 1)),
        )
        .expect("generator produced an invalid edge")
    }

    pub fn empty(node_count: usize) -> Self {
        assert!(node_count > 0, "graphs have at least one node");
        Graph {
            node_count,
            edges: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sorted 1-based edges.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// 0-based adjacency lists, neighbors in ascending order.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for &(u, v) in &self.edges {
            let (u, v) = (u as usize - 1, v as usize - 1);
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// 0-based degree sequence indexed by node.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.node_count];
        for &(u, v) in &self.edges {
            deg[u as usize - 1] += 1;
            deg[v as usize - 1] += 1;
        }
        deg
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).is_ok()
    }

    /// Connected components as sorted lists of 1-based node ids, ordered by
    /// their smallest member.
    pub fn connected_components(&self) -> Vec<Vec<u32>> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.node_count];
        let mut components = Vec::new();
        for start in 0..self.node_count {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            let mut members = Vec::new();
            while let Some(v) = queue.pop_front() {
                members.push(v as u32 + 1);
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }
        components
    }

    pub fn component_count(&self) -> usize {
        self.connected_components().len()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    /// Subgraph induced by `nodes` (1-based), relabeled to 1..=len in the
    /// order given.
    pub fn induced_subgraph(&self, nodes: &[u32]) -> Graph {
        let mut index = vec![0u32; self.node_count + 1];
        for (i, &v) in nodes.iter().enumerate() {
            index[v as usize] = i as u32 + 1;
        }
        let edges = self.edges.iter().filter_map(|&(u, v)| {
            let (a, b) = (index[u as usize], index[v as usize]);
            (a != 0 && b != 0).then_some((a, b))
        });
        Graph::new(nodes.len(), edges.collect::<Vec<_>>()).expect("induced subgraph is valid")
    }

    /// Applies `perm` (0-based: node i becomes perm[i]).
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.node_count);
        Graph::from_zero_based(
            self.node_count,
            self.edges
                .iter()
                .map(|&(u, v)| (perm[u as usize - 1], perm[v as usize - 1])),
        )
    }

    /// Disjoint union; `other`'s nodes are shifted past this graph's.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.node_count as u32;
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(u, v)| (u + shift, v + shift)));
        Graph::new(self.node_count + other.node_count, edges).expect("union is valid")
    }

    pub fn with_edge(&self, u: u32, v: u32) -> Result<Graph, GraphError> {
        let mut edges = self.edges.clone();
        edges.push((u, v));
        Graph::new(self.node_count, edges)
    }

    /// Renders the canonical text form with sorted edges.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Parses a single graph expression, allowing a label prefix such as
    /// `Graph 3:` and trailing punctuation.
    pub fn parse(text: &str) -> Result<Graph, GraphError> {
        parse_graph_text(text).map(|parsed| parsed.graph)
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, [", self.node_count)?;
        for (i, (u, v)) in self.edges.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({u}, {v})")?;
        }
        f.write_str("])")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedGraph {
    pub graph: Graph,
    pub warnings: Vec<ParseWarning>,
}

/// Parses one `(n, [(u, v), ...])` expression out of `text`.
///
/// Anything before the opening parenthesis is treated as a label and must not
/// contain brackets. Only whitespace and `.`, `,`, `;` may follow the closing
/// parenthesis.
pub fn parse_graph_text(text: &str) -> Result<ParsedGraph, GraphError> {
    let bytes = text.as_bytes();
    let start = find_graph_start(bytes, 0).ok_or_else(|| GraphError::MalformedSyntax {
        offset: 0,
        reason: "no graph expression found".into(),
    })?;
    if let Some(pos) = bytes[..start]
        .iter()
        .position(|b| matches!(b, b'(' | b')' | b'[' | b']'))
    {
        return Err(GraphError::MalformedSyntax {
            offset: pos,
            reason: "unexpected bracket before graph expression".into(),
        });
    }
    let (parsed, end) = parse_graph_at(bytes, start)?;
    if let Some(pos) = bytes[end..]
        .iter()
        .position(|b| !(b.is_ascii_whitespace() || matches!(b, b'.' | b',' | b';')))
    {
        return Err(GraphError::MalformedSyntax {
            offset: end + pos,
            reason: "trailing characters after graph expression".into(),
        });
    }
    Ok(parsed)
}

/// Returns the offset of the next `(` that begins `( <int> , [`.
pub(crate) fn find_graph_start(bytes: &[u8], from: usize) -> Option<usize> {
    let mut i = from;
    while i < bytes.len() {
        if bytes[i] == b'(' && looks_like_graph_start(bytes, i) {
            return Some(i);
        }
        i += 1;
    }
    None
}

fn looks_like_graph_start(bytes: &[u8], open: usize) -> bool {
    let mut cur = Cursor { bytes, pos: open + 1 };
    cur.skip_ws();
    if !cur.peek().is_some_and(|b| b.is_ascii_digit()) {
        return false;
    }
    while cur.peek().is_some_and(|b| b.is_ascii_digit()) {
        cur.pos += 1;
    }
    cur.skip_ws();
    if cur.peek() != Some(b',') {
        return false;
    }
    cur.pos += 1;
    cur.skip_ws();
    cur.peek() == Some(b'[')
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn error(&self, reason: &str) -> GraphError {
        GraphError::MalformedSyntax {
            offset: self.pos,
            reason: reason.to_string(),
        }
    }

    fn expect(&mut self, byte: u8) -> Result<(), GraphError> {
        self.skip_ws();
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", byte as char)))
        }
    }

    fn integer(&mut self) -> Result<u64, GraphError> {
        self.skip_ws();
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(b) = self.peek().filter(u8::is_ascii_digit) {
            value = value.saturating_mul(10).saturating_add(u64::from(b - b'0'));
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected integer"));
        }
        Ok(value)
    }
}

/// Parses the graph expression whose `(` sits at `open`; returns the graph and
/// the offset just past its closing `)`.
pub(crate) fn parse_graph_at(bytes: &[u8], open: usize) -> Result<(ParsedGraph, usize), GraphError> {
    let mut cur = Cursor { bytes, pos: open };
    cur.expect(b'(')?;
    let n = cur.integer()?;
    if n == 0 || n > MAX_TEXT_NODES as u64 {
        return Err(GraphError::InvalidNodeCount(n));
    }
    cur.expect(b',')?;
    cur.expect(b'[')?;
    let mut raw: Vec<(u64, u64)> = Vec::new();
    loop {
        cur.skip_ws();
        match cur.peek() {
            Some(b']') => {
                cur.pos += 1;
                break;
            }
            Some(b'(') => {
                cur.pos += 1;
                let a = cur.integer()?;
                cur.expect(b',')?;
                let b = cur.integer()?;
                cur.expect(b')')?;
                raw.push((a, b));
                cur.skip_ws();
                match cur.peek() {
                    Some(b',') => cur.pos += 1,
                    Some(b']') => {}
                    _ => return Err(cur.error("expected ',' or ']' after edge")),
                }
            }
            _ => return Err(cur.error("expected edge tuple or ']'")),
        }
    }
    cur.expect(b')')?;
    let end = cur.pos;
    let n = n as usize;

    let mut warnings = Vec::new();
    let zero_based = raw.iter().any(|&(a, b)| a == 0 || b == 0)
        && raw.iter().all(|&(a, b)| a < n as u64 && b < n as u64);
    let shift = u64::from(zero_based);
    if zero_based {
        warnings.push(ParseWarning::ZeroBasedIds);
    }
    let mut edges = Vec::with_capacity(raw.len());
    for (a, b) in raw {
        let (a, b) = (a + shift, b + shift);
        for x in [a, b] {
            if x == 0 || x > n as u64 {
                return Err(GraphError::EndpointOutOfRange {
                    node: x,
                    node_count: n,
                });
            }
        }
        edges.push((a as u32, b as u32));
    }
    let (graph, duplicates) = Graph::with_report(n, edges)?;
    if duplicates > 0 {
        warnings.push(ParseWarning::DuplicateEdges(duplicates));
    }
    Ok((ParsedGraph { graph, warnings }, end))
}

/// Reads the line-oriented graph file format: one graph per line, blank lines
/// and lines starting with `#` ignored.
pub fn parse_graph_lines(text: &str) -> Result<Vec<Graph>, (usize, GraphError)> {
    text.lines()
        .enumerate()
        .filter(|(_, line)| {
            let t = line.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(i, line)| Graph::parse(line).map_err(|e| (i + 1, e)))
        .collect()
}

pub fn write_graph_lines(graphs: &[Graph]) -> String {
    let mut out = String::new();
    for g in graphs {
        out.push_str(&g.to_text());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c5() -> Graph {
        Graph::new(5, [(1, 2), (2, 3), (3, 4), (4, 5), (5, 1)]).unwrap()
    }

    #[test]
    fn parses_cycle_template() {
        let g = Graph::parse("(5, [(1, 2), (1, 5), (2, 3), (3, 4), (4, 5)])").unwrap();
        assert_eq!(g, c5());
        assert!(g.degrees().iter().all(|&d| d == 2));
        assert!(g.is_connected());
    }

    #[test]
    fn parses_empty_edge_list() {
        let g = Graph::parse("(3, [])").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn rejects_out_of_range_endpoint() {
        assert_eq!(
            Graph::parse("(4, [(1, 5)])"),
            Err(GraphError::EndpointOutOfRange {
                node: 5,
                node_count: 4
            })
        );
    }

    #[test]
    fn rejects_self_loop_and_bad_tokens() {
        assert_eq!(Graph::parse("(3, [(2, 2)])"), Err(GraphError::SelfLoop(2)));
        assert!(matches!(
            Graph::parse("(3, [(1, x)])"),
            Err(GraphError::MalformedSyntax { .. })
        ));
        assert!(matches!(
            Graph::parse("(3, [(1, 2)"),
            Err(GraphError::MalformedSyntax { .. })
        ));
        assert!(matches!(
            Graph::parse("(0, [])"),
            Err(GraphError::InvalidNodeCount(0))
        ));
    }

    #[test]
    fn accepts_label_prefix_whitespace_and_duplicates() {
        let parsed = parse_graph_text("Graph 3:\n(3,[ (2,1),(1 ,2),\n(3, 2) ]).").unwrap();
        assert_eq!(parsed.graph.edges(), &[(1, 2), (2, 3)]);
        assert_eq!(parsed.warnings, vec![ParseWarning::DuplicateEdges(1)]);
    }

    #[test]
    fn shifts_zero_based_ids() {
        let parsed = parse_graph_text("(3, [(0, 1), (1, 2)])").unwrap();
        assert_eq!(parsed.graph.edges(), &[(1, 2), (2, 3)]);
        assert_eq!(parsed.warnings, vec![ParseWarning::ZeroBasedIds]);
        // 0 together with id n cannot be a consistent 0-based labeling.
        assert!(matches!(
            Graph::parse("(3, [(0, 3)])"),
            Err(GraphError::EndpointOutOfRange { node: 0, .. })
        ));
    }

    #[test]
    fn serializes_sorted() {
        let tri = Graph::new(3, [(2, 3), (1, 2), (1, 3)]).unwrap();
        assert_eq!(tri.to_text(), "(3, [(1, 2), (1, 3), (2, 3)])");
        assert_eq!(Graph::empty(2).to_text(), "(2, [])");
        assert_eq!(c5().to_text(), "(5, [(1, 2), (1, 5), (2, 3), (3, 4), (4, 5)])");
    }

    #[test]
    fn components_examples() {
        let g = Graph::new(4, [(1, 2)]).unwrap();
        assert_eq!(g.connected_components(), vec![vec![1, 2], vec![3], vec![4]]);
        assert_eq!(c5().connected_components(), vec![vec![1, 2, 3, 4, 5]]);
        let two = Graph::new(6, [(1, 2), (2, 3), (1, 3), (4, 5), (5, 6), (4, 6)]).unwrap();
        assert_eq!(two.component_count(), 2);
    }

    #[test]
    fn line_format_skips_comments() {
        let text = "# header\n(2, [(1, 2)])\n\n(3, [])\n";
        let graphs = parse_graph_lines(text).unwrap();
        assert_eq!(graphs.len(), 2);
        assert_eq!(write_graph_lines(&graphs), "(2, [(1, 2)])\n(3, [])\n");
        assert_eq!(parse_graph_lines("(2, [(1, 3)])").unwrap_err().0, 1);
    }
}
