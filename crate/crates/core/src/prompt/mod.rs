//! Prompt construction for the rule, distribution and property tasks, and
//! extraction of graphs, p estimates and SMILES from model replies.

mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::distribution::{DistributionSpec, MotifKind, TaskKind};
use crate::graph::Graph;
use crate::rules::{validate_rule, RuleKind, RuleSpec};
pub use parse::{parse_p_estimate, parse_response, Diagnostic, ParsedResponse};

const BUILTIN_TEMPLATES: &str = include_str!("../../templates/prompts.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PromptStyle {
    ZeroShot,
    FewShot,
    ZeroShotCot,
    FewShotCot,
}

impl PromptStyle {
    pub const ALL: [PromptStyle; 4] = [
        PromptStyle::ZeroShot,
        PromptStyle::FewShot,
        PromptStyle::ZeroShotCot,
        PromptStyle::FewShotCot,
    ];

    pub fn is_few_shot(self) -> bool {
        matches!(self, PromptStyle::FewShot | PromptStyle::FewShotCot)
    }

    pub fn is_cot(self) -> bool {
        matches!(self, PromptStyle::ZeroShotCot | PromptStyle::FewShotCot)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PromptStyle::ZeroShot => "zero-shot",
            PromptStyle::FewShot => "few-shot",
            PromptStyle::ZeroShotCot => "zero-shot-cot",
            PromptStyle::FewShotCot => "few-shot-cot",
        }
    }

    /// Row label used in report tables.
    pub fn title(self) -> &'static str {
        match self {
            PromptStyle::ZeroShot => "Zero-shot",
            PromptStyle::FewShot => "Few-shot",
            PromptStyle::ZeroShotCot => "Zero-shot+CoT",
            PromptStyle::FewShotCot => "Few-shot+CoT",
        }
    }
}

impl fmt::Display for PromptStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PromptStyle {
    type Err = PromptError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PromptStyle::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| PromptError::UnknownStyle(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "count")]
pub enum ExpectedOutput {
    GraphList(usize),
    PEstimateAndGraphList(usize),
    SmilesList(usize),
}

impl ExpectedOutput {
    pub fn count(self) -> usize {
        match self {
            ExpectedOutput::GraphList(n)
            | ExpectedOutput::PEstimateAndGraphList(n)
            | ExpectedOutput::SmilesList(n) => n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub system_text: String,
    pub user_text: String,
    pub expected_output: ExpectedOutput,
    pub template_hash: String,
}

impl PromptBundle {
    /// SHA-256 over both texts; used to check replayed transcripts.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.system_text.as_bytes());
        h.update([0u8]);
        h.update(self.user_text.as_bytes());
        hex::encode(h.finalize())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PromptError {
    #[error("few-shot prompts need at least one exemplar")]
    MissingExemplars,
    #[error("exemplar {index} does not satisfy the rule")]
    InvalidExemplar { index: usize },
    #[error("property prompts need at least one positive molecule")]
    EmptyExemplarSet,
    #[error("style {0} is not available for this task")]
    UnsupportedStyle(PromptStyle),
    #[error("input set has {got} graphs, expected {expected}")]
    InputSetSize { got: usize, expected: usize },
    #[error("unknown prompt style '{0}'")]
    UnknownStyle(String),
    #[error("template error: {0}")]
    Template(String),
    #[error(transparent)]
    Rule(#[from] crate::rules::RuleError),
}

/// A named set of prompt templates and the hash of their source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateSet {
    templates: BTreeMap<String, String>,
    hash: String,
}

const REQUIRED: [&str; 25] = [
    "system",
    "graph_format",
    "rule_request",
    "rule_examples",
    "rule_cot",
    "rule_tree",
    "rule_cycle",
    "rule_planar",
    "rule_components",
    "rule_k_regular",
    "rule_wheel",
    "rule_bipartite",
    "rule_k_color",
    "rule_k_color_free",
    "distribution_request",
    "distribution_example",
    "distribution_cot",
    "dist_trees_or_cycles",
    "dist_union_of_components",
    "dist_motif",
    "demo_trees_or_cycles",
    "demo_union_of_components",
    "demo_motif",
    "property_request",
    "property_cot",
];

impl TemplateSet {
    pub fn builtin() -> &'static TemplateSet {
        static SET: OnceLock<TemplateSet> = OnceLock::new();
        SET.get_or_init(|| TemplateSet::from_toml(BUILTIN_TEMPLATES).expect("builtin templates parse"))
    }

    pub fn from_toml(source: &str) -> Result<Self, PromptError> {
        let templates: BTreeMap<String, String> =
            toml::from_str(source).map_err(|e| PromptError::Template(e.to_string()))?;
        if let Some(missing) = REQUIRED.iter().find(|k| !templates.contains_key(**k)) {
            return Err(PromptError::Template(format!("missing template '{missing}'")));
        }
        Ok(TemplateSet {
            templates,
            hash: hex::encode(Sha256::digest(source.as_bytes())),
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, PromptError> {
        let source = std::fs::read_to_string(path)
            .map_err(|e| PromptError::Template(format!("{}: {e}", path.display())))?;
        Self::from_toml(&source)
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    /// Substitutes `{name}` placeholders; unknown placeholders are an error.
    pub fn render(&self, name: &str, vars: &[(&str, String)]) -> Result<String, PromptError> {
        static PLACEHOLDER: OnceLock<Regex> = OnceLock::new();
        let re = PLACEHOLDER.get_or_init(|| Regex::new(r"\{([a-z_]+)\}").expect("valid regex"));
        let template = self
            .templates
            .get(name)
            .ok_or_else(|| PromptError::Template(format!("missing template '{name}'")))?;
        let mut unknown = None;
        let out = re.replace_all(template, |caps: &regex::Captures| {
            let key = &caps[1];
            match vars.iter().find(|(k, _)| *k == key) {
                Some((_, v)) => v.clone(),
                None => {
                    unknown.get_or_insert_with(|| key.to_string());
                    String::new()
                }
            }
        });
        match unknown {
            Some(key) => Err(PromptError::Template(format!("no value for {{{key}}} in '{name}'"))),
            None => Ok(out.into_owned()),
        }
    }

    fn bundle(&self, user_text: String, expected_output: ExpectedOutput) -> Result<PromptBundle, PromptError> {
        Ok(PromptBundle {
            system_text: self.render("system", &[])?,
            user_text,
            expected_output,
            template_hash: self.hash.clone(),
        })
    }

    pub fn build_rule_prompt(
        &self,
        spec: &RuleSpec,
        style: PromptStyle,
        exemplars: &[Graph],
        count: usize,
    ) -> Result<PromptBundle, PromptError> {
        spec.check()?;
        let examples = if style.is_few_shot() {
            if exemplars.is_empty() {
                return Err(PromptError::MissingExemplars);
            }
            for (index, g) in exemplars.iter().enumerate() {
                if !validate_rule(spec, g)?.valid {
                    return Err(PromptError::InvalidExemplar { index });
                }
            }
            self.render("rule_examples", &[("graphs", graph_lines(exemplars))])?
        } else {
            String::new()
        };
        let cot = if style.is_cot() {
            self.render("rule_cot", &[("count", count.to_string())])?
        } else {
            String::new()
        };
        let text = self.render(
            "rule_request",
            &[
                ("count", count.to_string()),
                ("rule", self.rule_description(spec)?),
                ("format", self.render("graph_format", &[])?),
                ("examples", examples),
                ("cot", cot),
            ],
        )?;
        self.bundle(finish(text), ExpectedOutput::GraphList(count))
    }

    fn rule_description(&self, spec: &RuleSpec) -> Result<String, PromptError> {
        let n = spec.n.to_string();
        let num = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
        let (u, v) = spec.part_sizes.unwrap_or_default();
        let vars = vec![
            ("n", n),
            ("m", num(spec.m)),
            ("k", num(spec.k)),
            ("u", u.to_string()),
            ("v", v.to_string()),
            ("rim", spec.n.saturating_sub(1).to_string()),
        ];
        let name = match spec.kind {
            RuleKind::Tree => "rule_tree",
            RuleKind::Cycle => "rule_cycle",
            RuleKind::Planar => "rule_planar",
            RuleKind::Components => "rule_components",
            RuleKind::KRegular => "rule_k_regular",
            RuleKind::Wheel => "rule_wheel",
            RuleKind::Bipartite => "rule_bipartite",
            RuleKind::KColor if spec.m.is_some() => "rule_k_color",
            RuleKind::KColor => "rule_k_color_free",
        };
        self.render(name, &vars)
    }

    /// `worked_example` is an extra input set with its true p, shown in
    /// few-shot styles when given.
    pub fn build_distribution_prompt(
        &self,
        spec: &DistributionSpec,
        style: PromptStyle,
        input_set: &[Graph],
        worked_example: Option<&WorkedExample>,
    ) -> Result<PromptBundle, PromptError> {
        if input_set.len() != spec.set_size {
            return Err(PromptError::InputSetSize {
                got: input_set.len(),
                expected: spec.set_size,
            });
        }
        let key = match spec.task {
            TaskKind::TreesOrCycles => "trees_or_cycles",
            TaskKind::UnionOfComponents => "union_of_components",
            TaskKind::Motif => "motif",
        };
        let motif_vars: Vec<(&str, String)> = MotifKind::ALL
            .iter()
            .map(|m| {
                let name = match m {
                    MotifKind::Cycle => "cycle",
                    MotifKind::House => "house",
                    MotifKind::Crane => "crane",
                };
                (name, m.template().to_text())
            })
            .collect();
        let description = self.render(&format!("dist_{key}"), &motif_vars)?;
        let example = match (style.is_few_shot(), worked_example) {
            (true, Some(ex)) => self.render(
                "distribution_example",
                &[("p", ex.p.to_string()), ("graphs", graph_lines(&ex.graphs))],
            )?,
            _ => String::new(),
        };
        let cot = if style.is_cot() {
            let demo = self.render(&format!("demo_{key}"), &[])?;
            self.render("distribution_cot", &[("demo", demo)])?
        } else {
            String::new()
        };
        let text = self.render(
            "distribution_request",
            &[
                ("count", spec.set_size.to_string()),
                ("description", description),
                ("graphs", graph_lines(input_set)),
                ("example", example),
                ("format", self.render("graph_format", &[])?),
                ("cot", cot),
            ],
        )?;
        self.bundle(finish(text), ExpectedOutput::PEstimateAndGraphList(spec.set_size))
    }

    pub fn build_property_prompt(
        &self,
        positives: &[String],
        style: PromptStyle,
        count: usize,
    ) -> Result<PromptBundle, PromptError> {
        if !style.is_few_shot() {
            return Err(PromptError::UnsupportedStyle(style));
        }
        if positives.is_empty() {
            return Err(PromptError::EmptyExemplarSet);
        }
        let cot = if style.is_cot() {
            self.render("property_cot", &[("count", count.to_string())])?
        } else {
            String::new()
        };
        let text = self.render(
            "property_request",
            &[
                ("known", positives.len().to_string()),
                ("molecules", positives.join("\n")),
                ("count", count.to_string()),
                ("cot", cot),
            ],
        )?;
        self.bundle(finish(text), ExpectedOutput::SmilesList(count))
    }
}

/// A labeled demonstration set for distribution prompts.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkedExample {
    pub graphs: Vec<Graph>,
    pub p: f64,
}

fn graph_lines(graphs: &[Graph]) -> String {
    graphs.iter().map(Graph::to_text).collect::<Vec<_>>().join("\n")
}

fn finish(text: String) -> String {
    let mut t = text.trim_end().to_string();
    t.push('\n');
    t
}

pub fn build_rule_prompt(
    spec: &RuleSpec,
    style: PromptStyle,
    exemplars: &[Graph],
    count: usize,
) -> Result<PromptBundle, PromptError> {
    TemplateSet::builtin().build_rule_prompt(spec, style, exemplars, count)
}

pub fn build_distribution_prompt(
    spec: &DistributionSpec,
    style: PromptStyle,
    input_set: &[Graph],
    worked_example: Option<&WorkedExample>,
) -> Result<PromptBundle, PromptError> {
    TemplateSet::builtin().build_distribution_prompt(spec, style, input_set, worked_example)
}

pub fn build_property_prompt(
    positives: &[String],
    style: PromptStyle,
    count: usize,
) -> Result<PromptBundle, PromptError> {
    TemplateSet::builtin().build_property_prompt(positives, style, count)
}
