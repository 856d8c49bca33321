//! Structural rules for rule-based generation tasks: specs, size presets,
//! validators, exemplar generators and random-graph difficulty calibration.

pub mod calibrate;
pub mod coloring;
pub mod generate;
pub mod planarity;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
pub use calibrate::{estimate_random_valid_prob, RandomModel, ValidityEstimate};
pub use generate::{generate_exemplar, GenerateError};
pub use planarity::Obstruction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    Tree,
    Cycle,
    Components,
    Planar,
    KRegular,
    Wheel,
    Bipartite,
    KColor,
}

impl RuleKind {
    pub const ALL: [RuleKind; 8] = [
        RuleKind::Tree,
        RuleKind::Cycle,
        RuleKind::Components,
        RuleKind::Planar,
        RuleKind::KRegular,
        RuleKind::Wheel,
        RuleKind::Bipartite,
        RuleKind::KColor,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RuleKind::Tree => "tree",
            RuleKind::Cycle => "cycle",
            RuleKind::Components => "components",
            RuleKind::Planar => "planar",
            RuleKind::KRegular => "k-regular",
            RuleKind::Wheel => "wheel",
            RuleKind::Bipartite => "bipartite",
            RuleKind::KColor => "k-color",
        }
    }

    /// Column heading used in report tables.
    pub fn title(self) -> &'static str {
        match self {
            RuleKind::Tree => "Trees",
            RuleKind::Cycle => "Cycles",
            RuleKind::Components => "Components",
            RuleKind::Planar => "Planar",
            RuleKind::KRegular => "k-regular",
            RuleKind::Wheel => "Wheel",
            RuleKind::Bipartite => "Bipartite",
            RuleKind::KColor => "k-color",
        }
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RuleKind {
    type Err = RuleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| RuleError::UnknownRule(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("rule parameters incoherent: {0}")]
    SpecMismatch(String),
    #[error("unknown rule kind '{0}'")]
    UnknownRule(String),
    #[error("no {size} preset for rule {kind}")]
    NoPreset { kind: RuleKind, size: SizePreset },
}

/// One structural rule with its numeric parameters.
///
/// `n` is the node count; `m` is a required edge count (Planar always, KColor
/// optionally); `k` is the component count, regular degree or color count;
/// `part_sizes` is `(|U|, |V|)` for Bipartite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RuleSpec {
    pub kind: RuleKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub part_sizes: Option<(usize, usize)>,
}

impl RuleSpec {
    fn base(kind: RuleKind, n: usize) -> Self {
        RuleSpec {
            kind,
            n,
            m: None,
            k: None,
            part_sizes: None,
        }
    }

    pub fn tree(n: usize) -> Self {
        Self::base(RuleKind::Tree, n)
    }

    pub fn cycle(n: usize) -> Self {
        Self::base(RuleKind::Cycle, n)
    }

    pub fn components(n: usize, k: usize) -> Self {
        RuleSpec {
            k: Some(k),
            ..Self::base(RuleKind::Components, n)
        }
    }

    pub fn planar(n: usize, m: usize) -> Self {
        RuleSpec {
            m: Some(m),
            ..Self::base(RuleKind::Planar, n)
        }
    }

    pub fn k_regular(n: usize, k: usize) -> Self {
        RuleSpec {
            k: Some(k),
            ..Self::base(RuleKind::KRegular, n)
        }
    }

    pub fn wheel(n: usize) -> Self {
        Self::base(RuleKind::Wheel, n)
    }

    pub fn bipartite(u: usize, v: usize) -> Self {
        RuleSpec {
            part_sizes: Some((u, v)),
            ..Self::base(RuleKind::Bipartite, u + v)
        }
    }

    /// `m = None` disables the exact edge-count requirement.
    pub fn k_color(n: usize, m: Option<usize>, k: usize) -> Self {
        RuleSpec {
            m,
            k: Some(k),
            ..Self::base(RuleKind::KColor, n)
        }
    }

    fn need_k(&self) -> Result<usize, RuleError> {
        self.k
            .ok_or_else(|| RuleError::SpecMismatch(format!("{} requires k", self.kind)))
    }

    /// Checks that the parameters the kind needs are present and coherent.
    ///
    /// Parity constraints (such as `n * k` even for KRegular) are
    /// satisfiability questions, not coherence ones: such specs validate
    /// every graph as invalid and make exemplar generation fail.
    pub fn check(&self) -> Result<(), RuleError> {
        let bad = |msg: String| Err(RuleError::SpecMismatch(msg));
        if self.n == 0 {
            return bad("node count must be positive".into());
        }
        let max_edges = self.n * (self.n - 1) / 2;
        if let Some(m) = self.m {
            if m > max_edges {
                return bad(format!("{m} edges exceed the {max_edges} possible on {} nodes", self.n));
            }
        }
        match self.kind {
            RuleKind::Tree => Ok(()),
            RuleKind::Cycle if self.n < 3 => bad("cycles need at least 3 nodes".into()),
            RuleKind::Cycle => Ok(()),
            RuleKind::Wheel if self.n < 4 => bad("wheels need at least 4 nodes".into()),
            RuleKind::Wheel => Ok(()),
            RuleKind::Components => {
                let k = self.need_k()?;
                if k == 0 || k > self.n {
                    bad(format!("component count {k} not in 1..={}", self.n))
                } else {
                    Ok(())
                }
            }
            RuleKind::Planar => match self.m {
                None => bad("planar rule requires an edge count".into()),
                Some(_) => Ok(()),
            },
            RuleKind::KRegular => {
                let k = self.need_k()?;
                if k >= self.n {
                    bad(format!("degree {k} must be below node count {}", self.n))
                } else {
                    Ok(())
                }
            }
            RuleKind::Bipartite => match self.part_sizes {
                None => bad("bipartite rule requires part sizes".into()),
                Some((u, v)) if u + v != self.n => {
                    bad(format!("part sizes {u}+{v} do not sum to {}", self.n))
                }
                Some(_) => Ok(()),
            },
            RuleKind::KColor => {
                if self.need_k()? == 0 {
                    bad("color count must be positive".into())
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Edge count every valid graph must have, when the rule determines one.
    pub fn implied_edge_count(&self) -> Option<usize> {
        match self.kind {
            RuleKind::Tree => Some(self.n - 1),
            RuleKind::Cycle => Some(self.n),
            RuleKind::Wheel => Some(2 * (self.n - 1)),
            RuleKind::KRegular => self.k.map(|k| self.n * k / 2),
            RuleKind::Planar | RuleKind::KColor => self.m,
            RuleKind::Components | RuleKind::Bipartite => None,
        }
    }

    /// Short human label such as `planar(n=15, m=24)`.
    pub fn label(&self) -> String {
        let mut parts = vec![format!("n={}", self.n)];
        if let Some(m) = self.m {
            parts.push(format!("m={m}"));
        }
        if let Some(k) = self.k {
            parts.push(format!("k={k}"));
        }
        if let Some((u, v)) = self.part_sizes {
            parts.push(format!("parts={u}+{v}"));
        }
        format!("{}({})", self.kind, parts.join(", "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SizePreset {
    Small,
    Medium,
    Large,
}

impl fmt::Display for SizePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SizePreset::Small => "Small",
            SizePreset::Medium => "Medium",
            SizePreset::Large => "Large",
        })
    }
}

impl SizePreset {
    /// Parameter table. Medium is the default setting for every rule; Small
    /// and Large exist for the size ablation (cycles, k-regular, k-color).
    pub fn spec(self, kind: RuleKind) -> Result<RuleSpec, RuleError> {
        use RuleKind::*;
        use SizePreset::*;
        let spec = match (kind, self) {
            (Tree, Medium) => RuleSpec::tree(15),
            (Cycle, Small) => RuleSpec::cycle(10),
            (Cycle, Medium) => RuleSpec::cycle(15),
            (Cycle, Large) => RuleSpec::cycle(20),
            (Components, Medium) => RuleSpec::components(15, 5),
            (Planar, Medium) => RuleSpec::planar(15, 24),
            (KRegular, Small) => RuleSpec::k_regular(12, 3),
            (KRegular, Medium) => RuleSpec::k_regular(16, 3),
            (KRegular, Large) => RuleSpec::k_regular(20, 3),
            (Wheel, Medium) => RuleSpec::wheel(15),
            (Bipartite, Medium) => RuleSpec::bipartite(5, 5),
            (KColor, Small) => RuleSpec::k_color(10, Some(20), 3),
            (KColor, Medium) => RuleSpec::k_color(15, Some(32), 3),
            (KColor, Large) => RuleSpec::k_color(18, Some(39), 3),
            _ => return Err(RuleError::NoPreset { kind, size: self }),
        };
        Ok(spec)
    }
}

/// Machine-readable verdict code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reason {
    Ok,
    NodeCountMismatch,
    EdgeCountMismatch,
    Disconnected,
    DegreeMismatch,
    ComponentCountMismatch,
    NonPlanar,
    NoHub,
    RimNotCycle,
    NotBipartite,
    PartSizesUnreachable,
    NotColorable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Witness {
    /// Proper coloring, one 0-based color per node.
    Coloring(Vec<u16>),
    /// 1-based node ids of the two classes, sized `(|U|, |V|)`.
    Bipartition { u: Vec<u32>, v: Vec<u32> },
    /// 1-based hub of a wheel.
    Hub(u32),
    Obstruction(Obstruction),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub valid: bool,
    pub reason: Reason,
    pub witness: Option<Witness>,
}

impl ValidityReport {
    fn ok(witness: Option<Witness>) -> Self {
        ValidityReport {
            valid: true,
            reason: Reason::Ok,
            witness,
        }
    }

    fn fail(reason: Reason) -> Self {
        ValidityReport {
            valid: false,
            reason,
            witness: None,
        }
    }
}

/// Decides whether `g` satisfies `spec`.
pub fn validate_rule(spec: &RuleSpec, g: &Graph) -> Result<ValidityReport, RuleError> {
    spec.check()?;
    let n = g.node_count();
    if n != spec.n {
        return Ok(ValidityReport::fail(Reason::NodeCountMismatch));
    }
    if let Some(m) = spec.m {
        if g.edge_count() != m {
            return Ok(ValidityReport::fail(Reason::EdgeCountMismatch));
        }
    }
    let report = match spec.kind {
        RuleKind::Tree => {
            if g.edge_count() != n - 1 {
                ValidityReport::fail(Reason::EdgeCountMismatch)
            } else if !g.is_connected() {
                ValidityReport::fail(Reason::Disconnected)
            } else {
                ValidityReport::ok(None)
            }
        }
        RuleKind::Cycle => {
            if g.degrees().iter().any(|&d| d != 2) {
                ValidityReport::fail(Reason::DegreeMismatch)
            } else if !g.is_connected() {
                ValidityReport::fail(Reason::Disconnected)
            } else {
                ValidityReport::ok(None)
            }
        }
        RuleKind::Components => {
            if g.component_count() == spec.need_k()? {
                ValidityReport::ok(None)
            } else {
                ValidityReport::fail(Reason::ComponentCountMismatch)
            }
        }
        RuleKind::Planar => match planarity::planarity(g) {
            Ok(()) => ValidityReport::ok(None),
            Err(obstruction) => ValidityReport {
                valid: false,
                reason: Reason::NonPlanar,
                witness: Some(Witness::Obstruction(obstruction)),
            },
        },
        RuleKind::KRegular => {
            let k = spec.need_k()?;
            if g.degrees().iter().all(|&d| d == k) {
                ValidityReport::ok(None)
            } else {
                ValidityReport::fail(Reason::DegreeMismatch)
            }
        }
        RuleKind::Wheel => validate_wheel(g),
        RuleKind::Bipartite => {
            let (u, _) = spec.part_sizes.expect("checked");
            validate_bipartite(g, u)
        }
        RuleKind::KColor => match coloring::find_coloring(&g.adjacency(), spec.need_k()?) {
            Some(colors) => ValidityReport::ok(Some(Witness::Coloring(colors))),
            None => ValidityReport::fail(Reason::NotColorable),
        },
    };
    Ok(report)
}

fn validate_wheel(g: &Graph) -> ValidityReport {
    let n = g.node_count();
    if g.edge_count() != 2 * (n - 1) {
        return ValidityReport::fail(Reason::EdgeCountMismatch);
    }
    let degrees = g.degrees();
    let mut saw_hub = false;
    for hub in (0..n).filter(|&v| degrees[v] == n - 1) {
        saw_hub = true;
        let rim: Vec<u32> = (1..=n as u32).filter(|&v| v != hub as u32 + 1).collect();
        let rim_graph = g.induced_subgraph(&rim);
        if rim_graph.degrees().iter().all(|&d| d == 2) && rim_graph.is_connected() {
            return ValidityReport::ok(Some(Witness::Hub(hub as u32 + 1)));
        }
    }
    ValidityReport::fail(if saw_hub { Reason::RimNotCycle } else { Reason::NoHub })
}

/// Two-colors each component, then picks an orientation per component so
/// that the first class has exactly `target_u` nodes.
fn validate_bipartite(g: &Graph, target_u: usize) -> ValidityReport {
    let adj = g.adjacency();
    let n = g.node_count();
    let mut side = vec![u8::MAX; n];
    // Per component: (nodes with side 0, nodes with side 1).
    let mut parts: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for start in 0..n {
        if side[start] != u8::MAX {
            continue;
        }
        side[start] = 0;
        let mut stack = vec![start];
        let mut classes = (Vec::new(), Vec::new());
        while let Some(v) = stack.pop() {
            if side[v] == 0 {
                classes.0.push(v);
            } else {
                classes.1.push(v);
            }
            for &w in &adj[v] {
                if side[w] == u8::MAX {
                    side[w] = 1 - side[v];
                    stack.push(w);
                } else if side[w] == side[v] {
                    return ValidityReport::fail(Reason::NotBipartite);
                }
            }
        }
        parts.push(classes);
    }

    // reachable[i][s]: first i components can contribute exactly s nodes to U.
    let c = parts.len();
    let mut reachable = vec![vec![false; n + 1]; c + 1];
    reachable[0][0] = true;
    for (i, (a, b)) in parts.iter().enumerate() {
        for s in 0..=n {
            if reachable[i][s] {
                reachable[i + 1][s + a.len()] = true;
                reachable[i + 1][s + b.len()] = true;
            }
        }
    }
    if target_u > n || !reachable[c][target_u] {
        return ValidityReport::fail(Reason::PartSizesUnreachable);
    }
    let mut u = Vec::new();
    let mut v = Vec::new();
    let mut remaining = target_u;
    for i in (0..c).rev() {
        let (a, b) = &parts[i];
        let (into_u, into_v) = if remaining >= a.len() && reachable[i][remaining - a.len()] {
            (a, b)
        } else {
            (b, a)
        };
        remaining -= into_u.len();
        u.extend(into_u.iter().map(|&x| x as u32 + 1));
        v.extend(into_v.iter().map(|&x| x as u32 + 1));
    }
    u.sort_unstable();
    v.sort_unstable();
    ValidityReport::ok(Some(Witness::Bipartition { u, v }))
}
