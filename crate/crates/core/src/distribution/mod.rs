//! Distribution-based tasks: sampling input sets, labeling graphs and
//! measuring the mixture parameter of a generated set.

pub mod motif;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::rules::generate::random_tree;
pub use motif::{BaseKind, BaseShape, BaseSizes, MotifKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    TreesOrCycles,
    UnionOfComponents,
    Motif,
}

impl TaskKind {
    pub const ALL: [TaskKind; 3] = [
        TaskKind::TreesOrCycles,
        TaskKind::UnionOfComponents,
        TaskKind::Motif,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::TreesOrCycles => "trees-or-cycles",
            TaskKind::UnionOfComponents => "union-of-components",
            TaskKind::Motif => "motif",
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskKind {
    type Err = DistributionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TaskKind::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| DistributionError::InvalidSpec(format!("unknown task '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistributionError {
    #[error("invalid distribution spec: {0}")]
    InvalidSpec(String),
    #[error("none of the {0} graphs could be classified")]
    NoClassifiableGraphs(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub task: TaskKind,
    pub p: f64,
    /// Inclusive node-count range of each tree, cycle or component.
    #[serde(default = "default_size_range")]
    pub size_range: (usize, usize),
    #[serde(default = "default_set_size")]
    pub set_size: usize,
    /// Only count outputs whose trees/cycles fall inside `size_range`.
    #[serde(default)]
    pub strict_sizes: bool,
    #[serde(default)]
    pub base_sizes: BaseSizes,
}

fn default_size_range() -> (usize, usize) {
    (5, 7)
}

fn default_set_size() -> usize {
    10
}

impl DistributionSpec {
    pub fn new(task: TaskKind, p: f64) -> Result<Self, DistributionError> {
        let spec = DistributionSpec {
            task,
            p,
            size_range: default_size_range(),
            set_size: default_set_size(),
            strict_sizes: false,
            base_sizes: BaseSizes::default(),
        };
        spec.check()?;
        Ok(spec)
    }

    pub fn check(&self) -> Result<(), DistributionError> {
        let bad = |m: String| Err(DistributionError::InvalidSpec(m));
        let (lo, hi) = self.size_range;
        if !(0.0..=1.0).contains(&self.p) {
            return bad(format!("p = {} outside [0, 1]", self.p));
        }
        if lo > hi {
            return bad(format!("empty size range {lo}..={hi}"));
        }
        // Cycles need three nodes.
        if self.task != TaskKind::Motif && lo < 3 {
            return bad(format!("size range must start at 3 or more, got {lo}"));
        }
        if self.set_size == 0 {
            return bad("set size must be at least 1".into());
        }
        let b = self.base_sizes;
        if b.binary_depth == 0 || b.ternary_depth == 0 || b.ladder_len < 2 || b.wheel_nodes < 4 {
            return bad("base sizes too small".into());
        }
        Ok(())
    }

    fn in_range(&self, n: usize) -> bool {
        !self.strict_sizes || (self.size_range.0..=self.size_range.1).contains(&n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    Tree,
    Cycle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "label")]
pub enum StructureLabel {
    Single { shape: Shape },
    Neither,
    Pair { first: Shape, second: Shape },
    Composite { base: BaseKind, motif: MotifKind },
    Unrecognized,
}

impl StructureLabel {
    pub fn is_classified(self) -> bool {
        !matches!(self, StructureLabel::Neither | StructureLabel::Unrecognized)
    }

    /// Whether the label counts toward p: a tree, a same-kind pair or a
    /// matching base and motif.
    pub fn is_positive(self) -> bool {
        match self {
            StructureLabel::Single { shape } => shape == Shape::Tree,
            StructureLabel::Pair { first, second } => first == second,
            StructureLabel::Composite { base, motif } => base.index() == motif.index(),
            StructureLabel::Neither | StructureLabel::Unrecognized => false,
        }
    }
}

fn shape_of(g: &Graph) -> Option<Shape> {
    if !g.is_connected() {
        None
    } else if g.edge_count() + 1 == g.node_count() {
        Some(Shape::Tree)
    } else if g.degrees().iter().all(|&d| d == 2) {
        Some(Shape::Cycle)
    } else {
        None
    }
}

/// Labels `g` for `task` with the default (non-strict) settings.
pub fn classify(task: TaskKind, g: &Graph) -> StructureLabel {
    classify_with(&DistributionSpec::new(task, 0.5).expect("default spec is valid"), g)
}

/// Labels `g`, honoring `spec.strict_sizes`.
pub fn classify_with(spec: &DistributionSpec, g: &Graph) -> StructureLabel {
    match spec.task {
        TaskKind::TreesOrCycles => match shape_of(g) {
            Some(shape) if spec.in_range(g.node_count()) => StructureLabel::Single { shape },
            _ => StructureLabel::Neither,
        },
        TaskKind::UnionOfComponents => {
            let comps = g.connected_components();
            let shapes: Vec<Option<Shape>> = comps
                .iter()
                .map(|c| {
                    let sub = g.induced_subgraph(c);
                    shape_of(&sub).filter(|_| spec.in_range(sub.node_count()))
                })
                .collect();
            match shapes[..] {
                [Some(first), Some(second)] => StructureLabel::Pair { first, second },
                _ => StructureLabel::Unrecognized,
            }
        }
        TaskKind::Motif => match motif::decompose(g) {
            Some((base, motif)) => StructureLabel::Composite { base, motif },
            None => StructureLabel::Unrecognized,
        },
    }
}

/// A sampled input set with the labels used to generate it.
#[derive(Debug, Clone, PartialEq)]
pub struct InputSet {
    pub graphs: Vec<Graph>,
    pub labels: Vec<StructureLabel>,
}

impl InputSet {
    pub fn positive_fraction(&self) -> f64 {
        let hits = self.labels.iter().filter(|l| l.is_positive()).count();
        hits as f64 / self.labels.len() as f64
    }
}

pub fn sample_input_set(spec: &DistributionSpec, seed: u64) -> Result<InputSet, DistributionError> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (graphs, labels) = (0..spec.set_size).map(|_| sample_one(spec, &mut rng)).unzip();
    Ok(InputSet { graphs, labels })
}

fn sample_one(spec: &DistributionSpec, rng: &mut impl Rng) -> (Graph, StructureLabel) {
    let (lo, hi) = spec.size_range;
    match spec.task {
        TaskKind::TreesOrCycles => {
            let shape = if rng.random_bool(spec.p) { Shape::Tree } else { Shape::Cycle };
            let n = rng.random_range(lo..=hi);
            (build_shape(shape, n, rng), StructureLabel::Single { shape })
        }
        TaskKind::UnionOfComponents => {
            let first = if rng.random_bool(0.5) { Shape::Tree } else { Shape::Cycle };
            let second = match (rng.random_bool(spec.p), first) {
                (true, s) => s,
                (false, Shape::Tree) => Shape::Cycle,
                (false, Shape::Cycle) => Shape::Tree,
            };
            let a = build_shape(first, rng.random_range(lo..=hi), rng);
            let b = build_shape(second, rng.random_range(lo..=hi), rng);
            (a.disjoint_union(&b), StructureLabel::Pair { first, second })
        }
        TaskKind::Motif => {
            let base = BaseKind::ALL[rng.random_range(0..3)];
            let motif = if rng.random_bool(spec.p) {
                MotifKind::ALL[base.index()]
            } else {
                let others: Vec<MotifKind> = MotifKind::ALL
                    .into_iter()
                    .filter(|m| m.index() != base.index())
                    .collect();
                others[rng.random_range(0..2)]
            };
            let base_graph = build_base_with(base, &spec.base_sizes, rng);
            let b = rng.random_range(1..=base_graph.node_count() as u32);
            let m = rng.random_range(1..=5);
            let g = motif::compose(&base_graph, &motif.template(), b, m);
            (g, StructureLabel::Composite { base, motif })
        }
    }
}

fn build_shape(shape: Shape, n: usize, rng: &mut impl Rng) -> Graph {
    match shape {
        Shape::Tree => random_tree(n, rng),
        Shape::Cycle => {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            Graph::from_zero_based(n, (0..n).map(|i| (order[i], order[(i + 1) % n])))
        }
    }
}

/// Builds a base graph of `kind`; trees are binary or ternary with equal odds.
pub fn build_base(kind: BaseKind, sizes: &BaseSizes, seed: u64) -> Graph {
    build_base_with(kind, sizes, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn build_base_with(kind: BaseKind, sizes: &BaseSizes, rng: &mut impl Rng) -> Graph {
    let shape = match kind {
        BaseKind::Tree if rng.random_bool(0.5) => BaseShape::BinaryTree { depth: sizes.binary_depth },
        BaseKind::Tree => BaseShape::TernaryTree { depth: sizes.ternary_depth },
        BaseKind::Ladder => BaseShape::Ladder { len: sizes.ladder_len },
        BaseKind::Wheel => BaseShape::Wheel { nodes: sizes.wheel_nodes },
    };
    shape.build()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PGen {
    pub p_gen: f64,
    pub valid_fraction: f64,
    pub classified: usize,
    pub total: usize,
}

pub fn estimate_p_gen(task: TaskKind, graphs: &[Graph]) -> Result<PGen, DistributionError> {
    estimate_p_gen_with(&DistributionSpec::new(task, 0.5).expect("default spec is valid"), graphs)
}

/// p over classifiable graphs; the classified share is reported separately.
pub fn estimate_p_gen_with(
    spec: &DistributionSpec,
    graphs: &[Graph],
) -> Result<PGen, DistributionError> {
    let labels: Vec<StructureLabel> = graphs
        .iter()
        .map(|g| classify_with(spec, g))
        .filter(|l| l.is_classified())
        .collect();
    if labels.is_empty() {
        return Err(DistributionError::NoClassifiableGraphs(graphs.len()));
    }
    let positive = labels.iter().filter(|l| l.is_positive()).count();
    Ok(PGen {
        p_gen: positive as f64 / labels.len() as f64,
        valid_fraction: labels.len() as f64 / graphs.len() as f64,
        classified: labels.len(),
        total: graphs.len(),
    })
}

/// Per-trial outcome for a distribution task.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionTrialResult {
    pub p_pred: Option<f64>,
    /// `None` when no generated graph could be classified.
    pub p_gen: Option<f64>,
    pub valid_fraction: f64,
}

impl DistributionTrialResult {
    pub fn new(spec: &DistributionSpec, p_pred: Option<f64>, graphs: &[Graph]) -> Self {
        match estimate_p_gen_with(spec, graphs) {
            Ok(est) => DistributionTrialResult {
                p_pred,
                p_gen: Some(est.p_gen),
                valid_fraction: est.valid_fraction,
            },
            Err(_) => DistributionTrialResult {
                p_pred,
                p_gen: None,
                valid_fraction: 0.0,
            },
        }
    }
}
