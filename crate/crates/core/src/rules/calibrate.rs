//! Monte-Carlo estimate of how often a random graph already satisfies a rule.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::generate::{gnm, gnp};
use super::{validate_rule, RuleError, RuleSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "model")]
pub enum RandomModel {
    /// Uniform over graphs with exactly `m` edges.
    Gnm { m: usize },
    /// Every pair present independently.
    Gnp { p: f64 },
}

impl RandomModel {
    /// `G(n, m)` when the rule pins the edge count, `G(n, 1/2)` otherwise.
    pub fn for_spec(spec: &RuleSpec) -> Self {
        match spec.implied_edge_count() {
            Some(m) => RandomModel::Gnm { m },
            None => RandomModel::Gnp { p: 0.5 },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidityEstimate {
    pub model: RandomModel,
    pub samples: usize,
    pub valid: usize,
    pub p: f64,
    pub se: f64,
}

pub fn estimate_random_valid_prob(
    spec: &RuleSpec,
    samples: usize,
    seed: u64,
) -> Result<ValidityEstimate, RuleError> {
    estimate_with_model(spec, RandomModel::for_spec(spec), samples, seed)
}

pub fn estimate_with_model(
    spec: &RuleSpec,
    model: RandomModel,
    samples: usize,
    seed: u64,
) -> Result<ValidityEstimate, RuleError> {
    spec.check()?;
    assert!(samples > 0, "need at least one sample");
    if let RandomModel::Gnm { m } = model {
        let max = spec.n * (spec.n - 1) / 2;
        if m > max {
            return Err(RuleError::SpecMismatch(format!(
                "{m} edges exceed the {max} possible on {} nodes",
                spec.n
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut valid = 0;
    for _ in 0..samples {
        let g = match model {
            RandomModel::Gnm { m } => gnm(spec.n, m, &mut rng),
            RandomModel::Gnp { p } => gnp(spec.n, p, &mut rng),
        };
        if validate_rule(spec, &g)?.valid {
            valid += 1;
        }
    }
    let p = valid as f64 / samples as f64;
    Ok(ValidityEstimate {
        model,
        samples,
        valid,
        p,
        se: (p * (1.0 - p) / samples as f64).sqrt(),
    })
}
