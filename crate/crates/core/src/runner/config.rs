use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::RunError;
use crate::client::{ModelEndpoint, RetryPolicy, DISTRIBUTION_TEMPERATURE, RULE_TEMPERATURE};
use crate::distribution::DistributionSpec;
use crate::metrics::MetricOptions;
use crate::molhiv::ConfusionMatrix;
use crate::prompt::PromptStyle;
use crate::rules::{RuleKind, RuleSpec, SizePreset};

/// Report columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    Valid,
    Unique,
    Novel,
    PPred,
    PGen,
    ScoreRaw,
    ScoreRectified,
}

impl Metric {
    pub fn title(self) -> &'static str {
        match self {
            Metric::Valid => "Valid",
            Metric::Unique => "Unique",
            Metric::Novel => "Novel",
            Metric::PPred => "p_pred",
            Metric::PGen => "p_gen",
            Metric::ScoreRaw => "C_M(G)",
            Metric::ScoreRectified => "C(G)",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Valid => "valid",
            Metric::Unique => "unique",
            Metric::Novel => "novel",
            Metric::PPred => "p-pred",
            Metric::PGen => "p-gen",
            Metric::ScoreRaw => "score-raw",
            Metric::ScoreRectified => "score-rectified",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.title())
    }
}

/// Where metrics go in the report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Layout {
    /// One subcolumn per metric under each setting.
    #[default]
    Subcolumns,
    /// One row group per metric; settings must not be grouped.
    MetricGroups,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Rule,
    Distribution,
    Property,
}

impl Family {
    pub fn default_metrics(self) -> Vec<Metric> {
        match self {
            Family::Rule => vec![Metric::Valid, Metric::Unique, Metric::Novel],
            Family::Distribution => vec![Metric::PPred, Metric::PGen, Metric::Valid],
            Family::Property => vec![
                Metric::ScoreRaw,
                Metric::ScoreRectified,
                Metric::Novel,
                Metric::Unique,
            ],
        }
    }

    pub fn default_temperature(self) -> f64 {
        match self {
            Family::Rule => RULE_TEMPERATURE,
            Family::Distribution | Family::Property => DISTRIBUTION_TEMPERATURE,
        }
    }
}

/// Rule parameters in a configuration file: a preset, explicit values, or
/// a preset with some values overridden.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSetting {
    pub kind: RuleKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<SizePreset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub part_sizes: Option<(usize, usize)>,
}

impl RuleSetting {
    pub fn resolve(&self) -> Result<RuleSpec, RunError> {
        let explicit = self.n.is_some() || self.part_sizes.is_some();
        let mut spec = match self.preset {
            Some(p) => p.spec(self.kind)?,
            None if explicit => RuleSpec {
                kind: self.kind,
                n: self.n.unwrap_or(0),
                m: None,
                k: None,
                part_sizes: None,
            },
            None => SizePreset::Medium.spec(self.kind)?,
        };
        if let Some(n) = self.n {
            spec.n = n;
        }
        if self.m.is_some() {
            spec.m = self.m;
        }
        if self.k.is_some() {
            spec.k = self.k;
        }
        if let Some((u, v)) = self.part_sizes {
            spec.part_sizes = Some((u, v));
            spec.n = u + v;
        }
        spec.check()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScorerConfig {
    /// Program and arguments.
    Command(Vec<String>),
    Http(String),
    Constant(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertySetting {
    /// Comma-separated molecule file; relative paths are resolved against
    /// the configuration file's directory.
    pub dataset: PathBuf,
    #[serde(default = "default_positives")]
    pub positives: usize,
    pub scorer: ScorerConfig,
    #[serde(default)]
    pub confusion: ConfusionMatrix,
}

fn default_positives() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum TaskSetting {
    Rule(RuleSetting),
    Distribution(DistributionSpec),
    Property(PropertySetting),
}

impl TaskSetting {
    pub fn family(&self) -> Family {
        match self {
            TaskSetting::Rule(_) => Family::Rule,
            TaskSetting::Distribution(_) => Family::Distribution,
            TaskSetting::Property(_) => Family::Property,
        }
    }
}

/// One column group of the report, optionally inside a row group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Setting {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
    /// Requested graphs or molecules per trial.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(flatten)]
    pub task: TaskSetting,
}

impl Setting {
    pub fn column_label(&self) -> Result<String, RunError> {
        if let Some(l) = &self.label {
            return Ok(l.clone());
        }
        Ok(match &self.task {
            TaskSetting::Rule(r) => r.kind.title().to_string(),
            TaskSetting::Distribution(d) => d.task.to_string(),
            TaskSetting::Property(_) => "Molecules".to_string(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_ten")]
    pub trials: usize,
    #[serde(default = "default_ten")]
    pub count: usize,
    #[serde(default = "default_styles")]
    pub styles: Vec<PromptStyle>,
    /// Exemplar graphs per few-shot rule prompt.
    #[serde(default = "default_exemplars")]
    pub exemplars: usize,
    #[serde(default = "default_in_flight")]
    pub max_in_flight: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_title: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<Vec<Metric>>,
    #[serde(default)]
    pub layout: Layout,
    /// Row titles replacing the default style names.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub style_labels: BTreeMap<PromptStyle, String>,
    #[serde(default)]
    pub metric_options: MetricOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
    #[serde(default)]
    pub endpoint: ModelEndpoint,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub profiles: BTreeMap<String, ModelEndpoint>,
    /// Answer from this transcript file instead of the live endpoint.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replay: Option<PathBuf>,
    #[serde(default)]
    pub retry: RetryPolicy,
    /// Prompt template file; the built-in set is used when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub templates: Option<PathBuf>,
    #[serde(rename = "setting")]
    pub settings: Vec<Setting>,
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_name() -> String {
    "run".into()
}
fn default_ten() -> usize {
    10
}
fn default_styles() -> Vec<PromptStyle> {
    PromptStyle::ALL.to_vec()
}
fn default_exemplars() -> usize {
    3
}
fn default_in_flight() -> usize {
    4
}

impl FromStr for RunConfig {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let config: RunConfig = toml::from_str(s).map_err(|e| RunError::Config(e.to_string()))?;
        config.check()?;
        Ok(config)
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
        let mut config: RunConfig = text.parse()?;
        config.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(config)
    }

    pub fn resolve_path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn family(&self) -> Family {
        self.settings[0].task.family()
    }

    pub fn check(&self) -> Result<(), RunError> {
        let bad = |m: String| Err(RunError::Config(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.count == 0 || self.settings.iter().any(|s| s.count == Some(0)) {
            return bad("requested count must be at least 1".into());
        }
        if self.styles.is_empty() {
            return bad("no prompt styles configured".into());
        }
        if self.max_in_flight == 0 {
            return bad("max_in_flight must be at least 1".into());
        }
        if self.settings.is_empty() {
            return bad("no [[setting]] entries".into());
        }
        if self.metrics.as_ref().is_some_and(Vec::is_empty) {
            return bad("metrics list is empty".into());
        }
        if self.layout == Layout::MetricGroups && self.settings.iter().any(|s| s.group.is_some()) {
            return bad("metric-groups layout cannot also group settings".into());
        }
        let family = self.family();
        let mut seen = std::collections::HashSet::new();
        for s in &self.settings {
            if s.task.family() != family {
                return bad("all settings of a run must belong to the same task family".into());
            }
            if let Some(p) = &s.profile {
                if !self.profiles.contains_key(p) {
                    return bad(format!("unknown profile '{p}'"));
                }
            }
            match &s.task {
                TaskSetting::Rule(r) => {
                    r.resolve()?;
                }
                TaskSetting::Distribution(d) => {
                    d.check().map_err(|e| RunError::Config(e.to_string()))?
                }
                TaskSetting::Property(p) => {
                    if p.positives == 0 {
                        return bad("property settings need at least one positive".into());
                    }
                }
            }
            let key = (s.group.clone(), s.column_label()?);
            if !seen.insert(key.clone()) {
                return bad(format!("duplicate setting {:?}/{}", key.0, key.1));
            }
        }
        let mut endpoints = vec![&self.endpoint];
        endpoints.extend(self.profiles.values());
        for e in endpoints {
            e.check().map_err(|e| RunError::Config(e.to_string()))?;
        }
        for t in self.settings.iter().filter_map(|s| s.temperature).chain(self.temperature) {
            if !(0.0..=2.0).contains(&t) {
                return bad(format!("temperature {t} outside [0, 2]"));
            }
        }
        Ok(())
    }

    pub fn metrics(&self) -> Vec<Metric> {
        self.metrics
            .clone()
            .unwrap_or_else(|| self.family().default_metrics())
    }

    pub fn style_label(&self, style: PromptStyle) -> String {
        self.style_labels
            .get(&style)
            .cloned()
            .unwrap_or_else(|| style.title().to_string())
    }

    /// Endpoint for a setting, with the effective temperature filled in.
    pub fn endpoint_for(&self, setting: &Setting, profile: Option<&str>) -> ModelEndpoint {
        let mut endpoint = setting
            .profile
            .as_deref()
            .or(profile)
            .and_then(|p| self.profiles.get(p))
            .unwrap_or(&self.endpoint)
            .clone();
        endpoint.temperature = setting
            .temperature
            .or(self.temperature)
            .unwrap_or_else(|| setting.task.family().default_temperature());
        endpoint
    }
}
