//! Valid, novel and unique rates per trial and their aggregation across
//! trials into mean ± standard error.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::iso::CanonicalKey;

/// What one trial produced.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub requested: usize,
    pub graphs: Vec<Graph>,
    /// One verdict per entry of `graphs`.
    pub valid: Vec<bool>,
    pub exemplars: Vec<Graph>,
}

impl TrialOutcome {
    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    fn valid_graphs(&self) -> impl Iterator<Item = &Graph> {
        self.graphs.iter().zip(&self.valid).filter(|(_, &v)| v).map(|(g, _)| g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Denominator {
    /// Divide by the number of graphs asked for.
    #[default]
    Requested,
    /// Divide by the number of graphs the model returned.
    Returned,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identity {
    /// Graphs are the same when isomorphic.
    #[default]
    Isomorphism,
    /// Graphs are the same when their labeled edge sets are equal.
    Labeled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UniqueScope {
    /// Distinct classes among valid graphs over the valid count.
    #[default]
    Valid,
    /// Distinct classes among all returned graphs over the returned count.
    Generated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricOptions {
    pub denominator: Denominator,
    pub identity: Identity,
    pub unique_scope: UniqueScope,
}

impl fmt::Display for MetricOptions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = match self.denominator {
            Denominator::Requested => "requested",
            Denominator::Returned => "returned",
        };
        let i = match self.identity {
            Identity::Isomorphism => "isomorphism",
            Identity::Labeled => "labeled",
        };
        let u = match self.unique_scope {
            UniqueScope::Valid => "valid",
            UniqueScope::Generated => "generated",
        };
        write!(f, "denominator={d}, identity={i}, unique-over={u}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("no valid graphs")]
    NoValidGraphs,
    #[error("no rates to aggregate")]
    EmptyInput,
}

/// Identity key: canonical form when the graph is small enough, the labeled
/// graph otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Key {
    Canonical(CanonicalKey),
    Labeled(Graph),
}

fn key(g: &Graph, identity: Identity) -> Key {
    match identity {
        Identity::Isomorphism => match CanonicalKey::of(g) {
            Ok(k) => Key::Canonical(k),
            Err(_) => Key::Labeled(g.clone()),
        },
        Identity::Labeled => Key::Labeled(g.clone()),
    }
}

pub fn valid_rate(outcome: &TrialOutcome, options: &MetricOptions) -> f64 {
    let denominator = match options.denominator {
        Denominator::Requested => outcome.requested,
        Denominator::Returned => outcome.graphs.len(),
    };
    if denominator == 0 {
        return 0.0;
    }
    100.0 * outcome.valid_count() as f64 / denominator as f64
}

/// Share of returned graphs that match no exemplar. With no exemplars every
/// graph is novel; with exemplars but nothing returned the rate is undefined.
pub fn novel_rate(outcome: &TrialOutcome, options: &MetricOptions) -> Option<f64> {
    if outcome.exemplars.is_empty() {
        return Some(100.0);
    }
    if outcome.graphs.is_empty() {
        return None;
    }
    let seen: HashSet<Key> = outcome.exemplars.iter().map(|g| key(g, options.identity)).collect();
    let novel = outcome
        .graphs
        .iter()
        .filter(|g| !seen.contains(&key(g, options.identity)))
        .count();
    Some(100.0 * novel as f64 / outcome.graphs.len() as f64)
}

pub fn unique_rate(outcome: &TrialOutcome, options: &MetricOptions) -> Result<f64, MetricError> {
    let pool: Vec<&Graph> = match options.unique_scope {
        UniqueScope::Valid => outcome.valid_graphs().collect(),
        UniqueScope::Generated => outcome.graphs.iter().collect(),
    };
    if pool.is_empty() {
        return Err(MetricError::NoValidGraphs);
    }
    let classes: HashSet<Key> = pool.iter().map(|g| key(g, options.identity)).collect();
    Ok(100.0 * classes.len() as f64 / pool.len() as f64)
}

/// The three rates of one trial; novel and unique are `None` when undefined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRates {
    pub valid: f64,
    pub novel: Option<f64>,
    pub unique: Option<f64>,
    /// Set when the other identity mode gives different novel or unique rates.
    pub identity_disagrees: bool,
}

impl TrialRates {
    pub fn compute(outcome: &TrialOutcome, options: &MetricOptions) -> Self {
        let other = MetricOptions {
            identity: match options.identity {
                Identity::Isomorphism => Identity::Labeled,
                Identity::Labeled => Identity::Isomorphism,
            },
            ..*options
        };
        let novel = novel_rate(outcome, options);
        let unique = unique_rate(outcome, options).ok();
        TrialRates {
            valid: valid_rate(outcome, options),
            novel,
            unique,
            identity_disagrees: novel != novel_rate(outcome, &other)
                || unique != unique_rate(outcome, &other).ok(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub mean: f64,
    /// `None` for a single trial.
    pub standard_error: Option<f64>,
    pub trial_count: usize,
}

/// Mean and standard error (sample standard deviation over √n).
pub fn aggregate(rates: &[f64]) -> Result<AggregateStats, MetricError> {
    if rates.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    let mut sorted = rates.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / n;
    let standard_error = (sorted.len() > 1).then(|| {
        let ss: f64 = sorted.iter().map(|x| (x - mean).powi(2)).sum();
        (ss / (n - 1.0)).sqrt() / n.sqrt()
    });
    Ok(AggregateStats {
        mean,
        standard_error,
        trial_count: sorted.len(),
    })
}

impl fmt::Display for AggregateStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.standard_error {
            Some(se) => write!(f, "{:.1} ± {:.1}", self.mean, se),
            None => write!(f, "{:.1}", self.mean),
        }
    }
}

/// Report cell text; absent cells render as `---`.
pub fn format_cell(stats: Option<&AggregateStats>) -> String {
    stats.map_or_else(|| "---".to_string(), ToString::to_string)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize, shift: usize) -> Graph {
        Graph::from_zero_based(n, (0..n).map(|i| ((i + shift) % n, (i + shift + 1) % n)))
    }

    fn path(n: usize) -> Graph {
        Graph::from_zero_based(n, (0..n - 1).map(|i| (i, i + 1)))
    }

    fn outcome(graphs: Vec<Graph>, valid: Vec<bool>, exemplars: Vec<Graph>) -> TrialOutcome {
        TrialOutcome { requested: 10, graphs, valid, exemplars }
    }

    #[test]
    fn valid_rate_denominators() {
        let mut o = outcome(vec![path(3); 6], vec![true; 6], vec![]);
        let opts = MetricOptions::default();
        assert_eq!(valid_rate(&o, &opts), 60.0);
        o.graphs = vec![path(3); 8];
        o.valid = vec![true; 8];
        assert_eq!(valid_rate(&o, &opts), 80.0);
        let returned = MetricOptions { denominator: Denominator::Returned, ..opts };
        assert_eq!(valid_rate(&o, &returned), 100.0);
    }

    #[test]
    fn novel_rate_examples() {
        let opts = MetricOptions::default();
        assert_eq!(novel_rate(&outcome(vec![path(4)], vec![true], vec![]), &opts), Some(100.0));
        // A relabeled copy of an exemplar is not novel.
        let relabeled = cycle(6, 0).relabel(&[3, 1, 5, 0, 2, 4]);
        let o = outcome(vec![relabeled], vec![true], vec![cycle(6, 0)]);
        assert_eq!(novel_rate(&o, &opts), Some(0.0));
        let labeled = MetricOptions { identity: Identity::Labeled, ..opts };
        assert_eq!(novel_rate(&o, &labeled), Some(100.0));
        assert!(TrialRates::compute(&o, &opts).identity_disagrees);

        let mut graphs: Vec<Graph> = (4..13).map(path).collect();
        graphs.push(cycle(5, 2));
        let o = outcome(graphs, vec![true; 10], vec![cycle(5, 0)]);
        assert_eq!(novel_rate(&o, &opts), Some(90.0));
        assert_eq!(novel_rate(&outcome(vec![], vec![], vec![path(3)]), &opts), None);
    }

    #[test]
    fn unique_rate_examples() {
        let opts = MetricOptions::default();
        let distinct: Vec<Graph> = (3..13).map(path).collect();
        assert_eq!(unique_rate(&outcome(distinct, vec![true; 10], vec![]), &opts), Ok(100.0));
        let same: Vec<Graph> = (0..10).map(|s| cycle(7, s)).collect();
        assert_eq!(unique_rate(&outcome(same, vec![true; 10], vec![]), &opts), Ok(10.0));
        let mut mixed: Vec<Graph> = (0..5).map(|_| path(4)).collect();
        mixed.extend((0..3).map(|s| cycle(4, s)));
        mixed.extend((0..2).map(|_| path(5)));
        let o = outcome(mixed, vec![true; 10], vec![]);
        assert!((unique_rate(&o, &opts).unwrap() - 30.0).abs() < 1e-9);
        assert_eq!(
            unique_rate(&outcome(vec![path(3)], vec![false], vec![]), &opts),
            Err(MetricError::NoValidGraphs)
        );
        let generated = MetricOptions { unique_scope: UniqueScope::Generated, ..opts };
        assert_eq!(unique_rate(&outcome(vec![path(3)], vec![false], vec![]), &generated), Ok(100.0));
    }

    #[test]
    fn aggregate_examples() {
        let s = aggregate(&[90.0, 100.0, 80.0]).unwrap();
        assert!((s.mean - 90.0).abs() < 1e-12);
        assert!((s.standard_error.unwrap() - 10.0 / 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(s.to_string(), "90.0 ± 5.8");
        let one = aggregate(&[50.0]).unwrap();
        assert_eq!((one.to_string(), one.standard_error), ("50.0".to_string(), None));
        assert_eq!(aggregate(&[]), Err(MetricError::EmptyInput));
        assert_eq!(format_cell(None), "---");
        assert_eq!(aggregate(&[100.0; 4]).unwrap().to_string(), "100.0 ± 0.0");
    }
}
