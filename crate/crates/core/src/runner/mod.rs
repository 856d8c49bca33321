//! Runs configured experiments: builds prompts, queries the model, scores
//! the replies and aggregates the trials into report tables.

mod config;
mod report;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use rand::seq::index::sample;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{
    Family, Layout, Metric, PropertySetting, RuleSetting, RunConfig, ScorerConfig, Setting, TaskSetting,
};
pub use report::{emit_report, ReportRow, ReportTable};

use crate::client::{
    Backend, ClientError, HttpBackend, LlmClient, ModelEndpoint, ReplayBackend, SeedLineage,
    TranscriptIndex, TranscriptStore,
};
use crate::distribution::{classify_with, sample_input_set, DistributionSpec, DistributionTrialResult};
use crate::graph::Graph;
use crate::metrics::{aggregate, valid_rate, TrialOutcome, TrialRates};
use crate::molhiv::{
    load_dataset, molecule_novel_unique, rectify, score_molecules, CommandScorer, ConstantScorer,
    HttpScorer, MolhivError, RectificationModel, Scorer,
};
use crate::prompt::{parse_response, Diagnostic, PromptError, PromptStyle, TemplateSet, WorkedExample};
use crate::rules::{generate_exemplar, validate_rule, RuleError, RuleSpec};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Molhiv(#[from] MolhivError),
    #[error(transparent)]
    Client(#[from] ClientError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Seed of trial `trial`; depends only on the master seed and the index.
pub fn trial_seed(master: u64, trial: usize) -> u64 {
    splitmix64(master ^ splitmix64(trial as u64 + 1))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random stream of one setting within one trial, shared by all styles.
fn trial_rng(seed: u64, setting: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(setting as u64);
    rng
}

pub fn request_id(setting: usize, style: PromptStyle, trial: usize) -> String {
    format!("s{setting:02}/{}/t{trial:03}", style.as_str())
}

/// Per-trial result, one line of `trials.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub setting: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    pub column: String,
    pub style: PromptStyle,
    pub trial: usize,
    pub request_id: String,
    pub trial_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub returned: usize,
    /// Defined metric values, as percentages.
    pub values: BTreeMap<Metric, f64>,
    pub diagnostics: Vec<Diagnostic>,
    #[serde(default)]
    pub identity_disagrees: bool,
    #[serde(default)]
    pub clamped: bool,
}

impl TrialRecord {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub records: Vec<TrialRecord>,
    pub table: ReportTable,
}

impl RunOutput {
    /// Report files plus `trials.jsonl`.
    pub fn write(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        let mut files = emit_report(&self.table, dir)?;
        let mut lines = String::new();
        for r in &self.records {
            lines.push_str(&serde_json::to_string(r).map_err(std::io::Error::other)?);
            lines.push('\n');
        }
        let path = dir.join("trials.jsonl");
        std::fs::write(&path, lines)?;
        files.push(path);
        Ok(files)
    }
}

enum Prepared {
    Rule(RuleSpec),
    Distribution(DistributionSpec),
    Property {
        positives: Vec<String>,
        scorer: Box<dyn Scorer>,
        model: RectificationModel,
    },
}

struct Job {
    setting: usize,
    style: PromptStyle,
    trial: usize,
}

pub struct Runner<'a> {
    config: &'a RunConfig,
    profile: Option<String>,
    scorer_override: Option<Arc<dyn Scorer>>,
}

struct SharedScorer(Arc<dyn Scorer>);

impl Scorer for SharedScorer {
    fn score(&self, smiles: &[String]) -> Result<Vec<f64>, MolhivError> {
        self.0.score(smiles)
    }
}

impl<'a> Runner<'a> {
    pub fn new(config: &'a RunConfig) -> Self {
        Runner { config, profile: None, scorer_override: None }
    }

    /// Default endpoint profile for settings that name none.
    pub fn profile(mut self, profile: Option<&str>) -> Self {
        self.profile = profile.map(str::to_string);
        self
    }

    /// Scores molecules with `scorer` instead of the configured one.
    pub fn scorer(mut self, scorer: Arc<dyn Scorer>) -> Self {
        self.scorer_override = Some(scorer);
        self
    }

    fn prepare(&self, setting: &Setting) -> Result<Prepared, RunError> {
        Ok(match &setting.task {
            TaskSetting::Rule(r) => Prepared::Rule(r.resolve()?),
            TaskSetting::Distribution(d) => Prepared::Distribution(*d),
            TaskSetting::Property(p) => {
                let dataset = load_dataset(&self.config.resolve_path(&p.dataset))?;
                let positives: Vec<String> = dataset.positives().map(|r| r.smiles.clone()).collect();
                if positives.is_empty() {
                    return Err(MolhivError::NoPositives.into());
                }
                let scorer: Box<dyn Scorer> = match (&self.scorer_override, &p.scorer) {
                    (Some(s), _) => Box::new(SharedScorer(s.clone())),
                    (None, ScorerConfig::Constant(c)) => Box::new(ConstantScorer(*c)),
                    (None, ScorerConfig::Http(url)) => Box::new(HttpScorer { url: url.clone() }),
                    (None, ScorerConfig::Command(argv)) => {
                        let (program, args) = argv
                            .split_first()
                            .ok_or_else(|| RunError::Config("empty scorer command".into()))?;
                        Box::new(CommandScorer { program: program.clone(), args: args.to_vec() })
                    }
                };
                Prepared::Property {
                    positives,
                    scorer,
                    model: RectificationModel::from_confusion(&p.confusion)?,
                }
            }
        })
    }

    pub fn run(&self, client: &LlmClient) -> Result<RunOutput, RunError> {
        let cfg = self.config;
        cfg.check()?;
        if cfg.family() == Family::Property && cfg.styles.iter().any(|s| !s.is_few_shot()) {
            return Err(RunError::Config("property prompts need few-shot styles".into()));
        }
        let owned_templates;
        let templates: &TemplateSet = match &cfg.templates {
            Some(p) => {
                owned_templates = TemplateSet::from_file(&cfg.resolve_path(p))?;
                &owned_templates
            }
            None => TemplateSet::builtin(),
        };
        let prepared = cfg
            .settings
            .iter()
            .map(|s| self.prepare(s))
            .collect::<Result<Vec<_>, _>>()?;
        let endpoints: Vec<ModelEndpoint> = cfg
            .settings
            .iter()
            .map(|s| cfg.endpoint_for(s, self.profile.as_deref()))
            .collect();

        let mut jobs = Vec::new();
        for trial in 0..cfg.trials {
            for setting in 0..cfg.settings.len() {
                for &style in &cfg.styles {
                    jobs.push(Job { setting, style, trial });
                }
            }
        }

        let results: Vec<Mutex<Option<TrialRecord>>> = jobs.iter().map(|_| Mutex::new(None)).collect();
        let next = AtomicUsize::new(0);
        let abort = AtomicBool::new(false);
        let fatal: Mutex<Option<ClientError>> = Mutex::new(None);
        let workers = cfg.max_in_flight.min(jobs.len()).max(1);
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    if abort.load(Ordering::SeqCst) {
                        break;
                    }
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    let Some(job) = jobs.get(i) else { break };
                    let ctx = JobContext {
                        config: cfg,
                        templates,
                        prepared: &prepared[job.setting],
                        endpoint: &endpoints[job.setting],
                        client,
                    };
                    match ctx.run(job) {
                        Ok(record) => {
                            tracing::info!(id = %record.request_id, failed = record.failed(), "trial done");
                            *results[i].lock().expect("result slot") = Some(record);
                        }
                        Err(e) => {
                            abort.store(true, Ordering::SeqCst);
                            fatal.lock().expect("fatal slot").get_or_insert(e);
                        }
                    }
                });
            }
        });
        if let Some(e) = fatal.into_inner().expect("fatal slot") {
            return Err(e.into());
        }
        let records: Vec<TrialRecord> = results
            .into_iter()
            .map(|m| m.into_inner().expect("result slot").expect("every job ran"))
            .collect();
        let table = build_table(cfg, &records, templates.hash(), &endpoints);
        Ok(RunOutput { records, table })
    }
}

struct JobContext<'a> {
    config: &'a RunConfig,
    templates: &'a TemplateSet,
    prepared: &'a Prepared,
    endpoint: &'a ModelEndpoint,
    client: &'a LlmClient,
}

enum TrialFailure {
    Fatal(ClientError),
    Soft(String),
}

impl<T: ToString> From<T> for TrialFailure {
    fn from(e: T) -> Self {
        TrialFailure::Soft(e.to_string())
    }
}

const WORKED_EXAMPLE_PS: [f64; 4] = [0.2, 0.4, 0.6, 0.8];

impl JobContext<'_> {
    /// Only authentication failures abort the run; anything else marks the
    /// trial as failed.
    fn run(&self, job: &Job) -> Result<TrialRecord, ClientError> {
        let setting = &self.config.settings[job.setting];
        let seed = trial_seed(self.config.seed, job.trial);
        let mut record = TrialRecord {
            setting: job.setting,
            group: setting.group.clone(),
            column: setting.column_label().unwrap_or_default(),
            style: job.style,
            trial: job.trial,
            request_id: request_id(job.setting, job.style, job.trial),
            trial_seed: seed,
            error: None,
            returned: 0,
            values: BTreeMap::new(),
            diagnostics: Vec::new(),
            identity_disagrees: false,
            clamped: false,
        };
        let lineage = SeedLineage {
            master_seed: self.config.seed,
            setting: job.setting,
            trial: job.trial,
            trial_seed: seed,
        };
        let mut rng = trial_rng(seed, job.setting);
        let count = setting.count.unwrap_or(self.config.count);
        let result = match self.prepared {
            Prepared::Rule(spec) => self.rule_trial(spec, job, count, &mut rng, lineage, &mut record),
            Prepared::Distribution(spec) => self.distribution_trial(spec, job, &mut rng, lineage, &mut record),
            Prepared::Property { positives, scorer, model } => self.property_trial(
                positives,
                scorer.as_ref(),
                model,
                job,
                count,
                &mut rng,
                lineage,
                &mut record,
            ),
        };
        match result {
            Ok(()) => Ok(record),
            Err(TrialFailure::Fatal(e)) => Err(e),
            Err(TrialFailure::Soft(msg)) => {
                record.error = Some(msg);
                record.values.clear();
                Ok(record)
            }
        }
    }

    fn ask(
        &self,
        id: &str,
        bundle: &crate::prompt::PromptBundle,
        lineage: SeedLineage,
    ) -> Result<String, TrialFailure> {
        match self.client.complete_at(id, bundle, self.endpoint, lineage) {
            Ok(c) => Ok(c.text),
            Err(e @ ClientError::AuthError(_)) => Err(TrialFailure::Fatal(e)),
            Err(e) => Err(e.into()),
        }
    }

    fn rule_trial(
        &self,
        spec: &RuleSpec,
        job: &Job,
        count: usize,
        rng: &mut ChaCha8Rng,
        lineage: SeedLineage,
        record: &mut TrialRecord,
    ) -> Result<(), TrialFailure> {
        let seeds: Vec<u64> = (0..self.config.exemplars).map(|_| rng.next_u64()).collect();
        let exemplars: Vec<Graph> = if job.style.is_few_shot() {
            seeds
                .iter()
                .map(|&s| generate_exemplar(spec, s))
                .collect::<Result<_, _>>()?
        } else {
            Vec::new()
        };
        let bundle = self.templates.build_rule_prompt(spec, job.style, &exemplars, count)?;
        let text = self.ask(&record.request_id, &bundle, lineage)?;
        let parsed = parse_response(&text, bundle.expected_output);
        record.diagnostics = parsed.diagnostics.clone();
        record.returned = parsed.graphs.len();
        let valid = parsed
            .graphs
            .iter()
            .map(|g| validate_rule(spec, g).map(|r| r.valid))
            .collect::<Result<Vec<_>, _>>()?;
        let outcome = TrialOutcome { requested: count, graphs: parsed.graphs, valid, exemplars };
        let rates = TrialRates::compute(&outcome, &self.config.metric_options);
        record.values.insert(Metric::Valid, rates.valid);
        if let Some(v) = rates.novel {
            record.values.insert(Metric::Novel, v);
        }
        if let Some(v) = rates.unique {
            record.values.insert(Metric::Unique, v);
        }
        record.identity_disagrees = rates.identity_disagrees;
        Ok(())
    }

    fn distribution_trial(
        &self,
        spec: &DistributionSpec,
        job: &Job,
        rng: &mut ChaCha8Rng,
        lineage: SeedLineage,
        record: &mut TrialRecord,
    ) -> Result<(), TrialFailure> {
        let input_seed = rng.next_u64();
        let example_seed = rng.next_u64();
        let others: Vec<f64> = WORKED_EXAMPLE_PS
            .iter()
            .copied()
            .filter(|&p| (p - spec.p).abs() > 1e-9)
            .collect();
        let example_p = others[rng.random_range(0..others.len())];
        let input = sample_input_set(spec, input_seed)?;
        let worked = if job.style.is_few_shot() {
            let ex_spec = DistributionSpec { p: example_p, ..*spec };
            Some(WorkedExample { graphs: sample_input_set(&ex_spec, example_seed)?.graphs, p: example_p })
        } else {
            None
        };
        let bundle = self
            .templates
            .build_distribution_prompt(spec, job.style, &input.graphs, worked.as_ref())?;
        let text = self.ask(&record.request_id, &bundle, lineage)?;
        let parsed = parse_response(&text, bundle.expected_output);
        record.diagnostics = parsed.diagnostics.clone();
        record.returned = parsed.graphs.len();
        let result = DistributionTrialResult::new(spec, parsed.p_estimate, &parsed.graphs);
        let valid: Vec<bool> = parsed.graphs.iter().map(|g| classify_with(spec, g).is_classified()).collect();
        let outcome = TrialOutcome {
            requested: spec.set_size,
            graphs: parsed.graphs,
            valid,
            exemplars: Vec::new(),
        };
        record.values.insert(Metric::Valid, valid_rate(&outcome, &self.config.metric_options));
        if let Some(p) = result.p_pred {
            record.values.insert(Metric::PPred, 100.0 * p);
        }
        if let Some(p) = result.p_gen {
            record.values.insert(Metric::PGen, 100.0 * p);
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn property_trial(
        &self,
        positives: &[String],
        scorer: &dyn Scorer,
        model: &RectificationModel,
        job: &Job,
        count: usize,
        rng: &mut ChaCha8Rng,
        lineage: SeedLineage,
        record: &mut TrialRecord,
    ) -> Result<(), TrialFailure> {
        let TaskSetting::Property(p) = &self.config.settings[job.setting].task else {
            unreachable!("property job on a non-property setting")
        };
        let shown: Vec<String> = sample(rng, positives.len(), p.positives.min(positives.len()))
            .into_iter()
            .map(|i| positives[i].clone())
            .collect();
        let bundle = self.templates.build_property_prompt(&shown, job.style, count)?;
        let text = self.ask(&record.request_id, &bundle, lineage)?;
        let parsed = parse_response(&text, bundle.expected_output);
        record.diagnostics = parsed.diagnostics.clone();
        record.returned = parsed.smiles.len();
        if parsed.smiles.is_empty() {
            return Ok(());
        }
        let scores = score_molecules(&parsed.smiles, scorer)?;
        let mean = scores.iter().map(|s| s.score).sum::<f64>() / scores.len() as f64;
        let rectified = rectify(mean, model)?;
        record.clamped = rectified.clamped;
        record.values.insert(Metric::ScoreRaw, 100.0 * mean);
        record.values.insert(Metric::ScoreRectified, 100.0 * rectified.value);
        if let Some((novel, unique)) = molecule_novel_unique(&parsed.smiles, &shown) {
            record.values.insert(Metric::Novel, novel);
            record.values.insert(Metric::Unique, unique);
        }
        Ok(())
    }
}

fn build_table(
    cfg: &RunConfig,
    records: &[TrialRecord],
    template_hash: &str,
    endpoints: &[ModelEndpoint],
) -> ReportTable {
    let metrics = cfg.metrics();
    let labels: Vec<String> = cfg
        .settings
        .iter()
        .map(|s| s.column_label().unwrap_or_default())
        .collect();
    let mut columns: Vec<String> = Vec::new();
    let mut groups: Vec<Option<String>> = Vec::new();
    for (s, label) in cfg.settings.iter().zip(&labels) {
        if !columns.contains(label) {
            columns.push(label.clone());
        }
        if !groups.contains(&s.group) {
            groups.push(s.group.clone());
        }
    }
    let stats = |group: &Option<String>, column: &str, style: PromptStyle, metric: Metric| {
        let si = cfg
            .settings
            .iter()
            .zip(&labels)
            .position(|(s, l)| &s.group == group && l == column)?;
        let values: Vec<f64> = records
            .iter()
            .filter(|r| r.setting == si && r.style == style)
            .filter_map(|r| r.values.get(&metric).copied())
            .collect();
        aggregate(&values).ok()
    };

    let mut rows = Vec::new();
    let (group_title, subcolumns) = match cfg.layout {
        Layout::Subcolumns => {
            for group in &groups {
                for &style in &cfg.styles {
                    let cells = columns
                        .iter()
                        .flat_map(|c| metrics.iter().map(move |&m| (c, m)))
                        .map(|(c, m)| stats(group, c, style, m))
                        .collect();
                    rows.push(ReportRow { group: group.clone(), prompt: cfg.style_label(style), cells });
                }
            }
            let subcolumns = if metrics.len() > 1 {
                metrics.iter().map(|m| m.title().to_string()).collect()
            } else {
                Vec::new()
            };
            (cfg.group_title.clone(), subcolumns)
        }
        Layout::MetricGroups => {
            for &metric in &metrics {
                for &style in &cfg.styles {
                    let cells = columns.iter().map(|c| stats(&None, c, style, metric)).collect();
                    rows.push(ReportRow {
                        group: Some(metric.title().to_string()),
                        prompt: cfg.style_label(style),
                        cells,
                    });
                }
            }
            (Some(cfg.group_title.clone().unwrap_or_else(|| "Metric".into())), Vec::new())
        }
    };

    let mut footer = vec![
        format!("trials per cell: {} (master seed {})", cfg.trials, cfg.seed),
        format!("metrics: {}", cfg.metric_options),
    ];
    if metrics.len() == 1 {
        footer.push(format!("values: {}", metrics[0].title()));
    }
    footer.push(format!("templates: {template_hash}"));
    let temps: BTreeSet<String> = endpoints.iter().map(|e| format!("{}", e.temperature)).collect();
    footer.push(format!("temperature: {}", temps.into_iter().collect::<Vec<_>>().join(", ")));
    let models: BTreeSet<&str> = endpoints.iter().map(|e| e.model_name.as_str()).collect();
    footer.push(format!("model: {}", models.into_iter().collect::<Vec<_>>().join(", ")));
    let failed = records.iter().filter(|r| r.failed()).count();
    footer.push(format!("failed trials: {failed} of {}", records.len()));

    let cell_name = |si: usize, style: PromptStyle| match &cfg.settings[si].group {
        Some(g) => format!("{g}/{}/{}", labels[si], cfg.style_label(style)),
        None => format!("{}/{}", labels[si], cfg.style_label(style)),
    };
    for si in 0..cfg.settings.len() {
        for &style in &cfg.styles {
            let cell: Vec<&TrialRecord> =
                records.iter().filter(|r| r.setting == si && r.style == style).collect();
            let fails = cell.iter().filter(|r| r.failed()).count();
            if fails > 0 {
                footer.push(format!("  {}: {fails} failed", cell_name(si, style)));
            }
            let ok: Vec<&&TrialRecord> = cell.iter().filter(|r| !r.failed()).collect();
            if !ok.is_empty() && ok.iter().all(|r| r.returned == 0) {
                footer.push(format!("  {}: no parseable output in any trial", cell_name(si, style)));
            }
        }
    }
    let disagree = records.iter().filter(|r| r.identity_disagrees).count();
    if disagree > 0 {
        footer.push(format!("trials where identity modes disagree: {disagree}"));
    }
    let clamped = records.iter().filter(|r| r.clamped).count();
    if clamped > 0 {
        footer.push(format!("trials with clamped rectification: {clamped}"));
    }

    ReportTable {
        title: cfg.name.clone(),
        group_title,
        columns,
        subcolumns,
        rows,
        footer,
    }
}

/// Live client, or a replaying one when the configuration names a
/// transcript file. Live transcripts go to `out_dir/transcripts.jsonl`.
pub fn build_client(config: &RunConfig, out_dir: &Path) -> Result<LlmClient, RunError> {
    let backend: Box<dyn Backend> = match &config.replay {
        Some(p) => Box::new(ReplayBackend::new(TranscriptIndex::load(&config.resolve_path(p))?)),
        None => Box::new(HttpBackend::new()),
    };
    let mut client = LlmClient::new(backend, config.endpoint.clone()).with_retry(config.retry);
    if config.replay.is_none() {
        let store = TranscriptStore::open(&out_dir.join("transcripts.jsonl"))?;
        client = client.with_store(Arc::new(store));
    }
    Ok(client)
}

/// Builds the client, runs, and writes all outputs into `out_dir`.
pub fn execute(config: &RunConfig, profile: Option<&str>, out_dir: &Path) -> Result<RunOutput, RunError> {
    std::fs::create_dir_all(out_dir)?;
    let client = build_client(config, out_dir)?;
    let output = Runner::new(config).profile(profile).run(&client)?;
    output.write(out_dir)?;
    Ok(output)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::client::MockBackend;

    #[test]
    fn trial_seeds_are_stable_and_distinct() {
        let a: Vec<u64> = (0..5).map(|i| trial_seed(42, i)).collect();
        let b: Vec<u64> = (0..10).map(|i| trial_seed(42, i)).collect();
        assert_eq!(a[..], b[..5]);
        assert_eq!(b.iter().collect::<BTreeSet<_>>().len(), 10);
        assert_ne!(trial_seed(42, 0), trial_seed(43, 0));
    }

    #[test]
    fn rule_run_with_mock() {
        let cfg: RunConfig = r#"
            trials = 3
            count = 2
            styles = ["zero-shot", "few-shot"]
            max_in_flight = 2
            [[setting]]
            family = "rule"
            kind = "cycle"
            n = 4
        "#
        .parse()
        .unwrap();
        let reply = "(4, [(1, 2), (2, 3), (3, 4), (4, 1)])\n(4, [(1, 2), (2, 3), (3, 4)])";
        let client = LlmClient::new(Box::new(MockBackend::constant(reply)), ModelEndpoint::default());
        let out = Runner::new(&cfg).run(&client).unwrap();
        assert_eq!(out.records.len(), 6);
        let valid = out.table.cell(None, "Zero-shot", "Cycles", Some("Valid")).unwrap();
        assert_eq!((valid.mean, valid.standard_error), (50.0, Some(0.0)));
        let novel = out.table.cell(None, "Few-shot", "Cycles", Some("Novel")).unwrap();
        assert_eq!(novel.mean, 50.0);
        assert!(client.peak_in_flight() <= 2);
    }

    #[test]
    fn auth_errors_abort() {
        let cfg: RunConfig = "[[setting]]\nfamily = \"rule\"\nkind = \"tree\"\nn = 5\n".parse().unwrap();
        let client = LlmClient::new(
            Box::new(MockBackend::new(|_, _| Err(ClientError::AuthError("no key".into())))),
            ModelEndpoint::default(),
        );
        assert!(matches!(Runner::new(&cfg).run(&client), Err(RunError::Client(ClientError::AuthError(_)))));
    }
}
