//! Property-based generation on HIV-inhibiting molecules: dataset loading,
//! external scoring of generated SMILES and rectification of raw scores.

pub mod smiles;

use std::collections::HashSet;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use smiles::{check_smiles, is_valid_smiles, normalize_smiles};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoleculeRecord {
    pub smiles: String,
    /// 1 when the molecule inhibits HIV replication.
    pub label: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RejectedRow {
    /// 1-based line number in the file, header included.
    pub line: usize,
    pub raw: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Dataset {
    pub records: Vec<MoleculeRecord>,
    pub rejects: Vec<RejectedRow>,
}

impl Dataset {
    pub fn positives(&self) -> impl Iterator<Item = &MoleculeRecord> {
        self.records.iter().filter(|r| r.label == 1)
    }
}

#[derive(Debug, Error)]
pub enum MolhivError {
    #[error("cannot read {path}: {reason}")]
    FileUnreadable { path: PathBuf, reason: String },
    #[error("dataset has no positive molecules")]
    NoPositives,
    #[error("rectification needs fpr < tpr (got fpr={fpr}, tpr={tpr})")]
    DegenerateModel { fpr: f64, tpr: f64 },
    #[error("confusion matrix has an empty class")]
    EmptyClass,
    #[error("scorer unavailable: {0}")]
    ScorerUnavailable(String),
    #[error("scorer protocol violation: {0}")]
    ScorerProtocolViolation(String),
}

/// Reads a comma-separated file with a header naming a `smiles` column and a
/// label column (`label` or `HIV_active`). Rows that fail to parse or fail
/// the SMILES check are collected as rejects.
pub fn load_dataset(path: &Path) -> Result<Dataset, MolhivError> {
    let unreadable = |reason: String| MolhivError::FileUnreadable {
        path: path.to_path_buf(),
        reason,
    };
    let file = std::fs::File::open(path).map_err(|e| unreadable(e.to_string()))?;
    let dataset = read_dataset(file).map_err(unreadable)?;
    if dataset.positives().next().is_none() {
        return Err(MolhivError::NoPositives);
    }
    Ok(dataset)
}

pub fn read_dataset(input: impl Read) -> Result<Dataset, String> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = reader.headers().map_err(|e| e.to_string())?.clone();
    let find = |names: &[&str]| {
        headers
            .iter()
            .position(|h| names.iter().any(|n| h.eq_ignore_ascii_case(n)))
    };
    let smiles_col = find(&["smiles"]).ok_or("header has no 'smiles' column")?;
    let label_col = find(&["label", "HIV_active"]).ok_or("header has no label column")?;

    let mut dataset = Dataset::default();
    for (i, row) in reader.records().enumerate() {
        let line = i + 2;
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                dataset.rejects.push(RejectedRow { line, raw: String::new(), reason: e.to_string() });
                continue;
            }
        };
        let raw = row.iter().collect::<Vec<_>>().join(",");
        let reject = |reason: String| RejectedRow { line, raw: raw.clone(), reason };
        let smiles = row.get(smiles_col).unwrap_or("");
        let label = match row.get(label_col).map(str::trim) {
            Some("1") | Some("1.0") => 1,
            Some("0") | Some("0.0") => 0,
            other => {
                dataset.rejects.push(reject(format!("bad label {other:?}")));
                continue;
            }
        };
        if let Err(e) = check_smiles(smiles) {
            dataset.rejects.push(reject(e.to_string()));
            continue;
        }
        dataset.records.push(MoleculeRecord { smiles: smiles.to_string(), label });
    }
    Ok(dataset)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tp: u64,
}

impl ConfusionMatrix {
    /// Counts of the reference MolHIV classifier on its dataset.
    pub const REFERENCE: ConfusionMatrix = ConfusionMatrix {
        tn: 35539,
        fp: 4145,
        fn_: 633,
        tp: 810,
    };

    pub fn fpr(&self) -> Result<Ratio<u64>, MolhivError> {
        if self.tn + self.fp == 0 {
            return Err(MolhivError::EmptyClass);
        }
        Ok(Ratio::new(self.fp, self.tn + self.fp))
    }

    pub fn tpr(&self) -> Result<Ratio<u64>, MolhivError> {
        if self.fn_ + self.tp == 0 {
            return Err(MolhivError::EmptyClass);
        }
        Ok(Ratio::new(self.tp, self.fn_ + self.tp))
    }
}

impl Default for ConfusionMatrix {
    fn default() -> Self {
        Self::REFERENCE
    }
}

fn ratio_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Classifier error rates: `fpr = P(predicted 1 | truly 0)` and
/// `tpr = P(predicted 1 | truly 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectificationModel {
    pub fpr: f64,
    pub tpr: f64,
}

impl RectificationModel {
    pub fn new(fpr: f64, tpr: f64) -> Result<Self, MolhivError> {
        if !(0.0 <= fpr && fpr < tpr && tpr <= 1.0) {
            return Err(MolhivError::DegenerateModel { fpr, tpr });
        }
        Ok(RectificationModel { fpr, tpr })
    }

    pub fn from_confusion(m: &ConfusionMatrix) -> Result<Self, MolhivError> {
        Self::new(ratio_f64(m.fpr()?), ratio_f64(m.tpr()?))
    }

    /// Expected raw score for a true positive share `c`.
    pub fn forward(&self, c: f64) -> f64 {
        self.fpr + c * (self.tpr - self.fpr)
    }
}

impl Default for RectificationModel {
    fn default() -> Self {
        Self::from_confusion(&ConfusionMatrix::REFERENCE).expect("reference matrix is well posed")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rectified {
    pub value: f64,
    /// The unclamped value fell outside `[0, 1]`.
    pub clamped: bool,
}

/// Inverts the raw-score mixture: `(mean_score - fpr) / (tpr - fpr)`,
/// clamped to `[0, 1]`.
pub fn rectify(mean_score: f64, model: &RectificationModel) -> Result<Rectified, MolhivError> {
    if !(model.fpr < model.tpr) {
        return Err(MolhivError::DegenerateModel { fpr: model.fpr, tpr: model.tpr });
    }
    let raw = (mean_score - model.fpr) / (model.tpr - model.fpr);
    let value = raw.clamp(0.0, 1.0);
    Ok(Rectified { value, clamped: value != raw })
}

/// Maps SMILES strings to probabilities, one per input, in order.
pub trait Scorer: Send + Sync {
    fn score(&self, smiles: &[String]) -> Result<Vec<f64>, MolhivError>;
}

/// Returns the same probability for every molecule.
pub struct ConstantScorer(pub f64);

impl Scorer for ConstantScorer {
    fn score(&self, smiles: &[String]) -> Result<Vec<f64>, MolhivError> {
        Ok(vec![self.0; smiles.len()])
    }
}

/// Runs an external program: SMILES lines on stdin, probability lines on
/// stdout.
pub struct CommandScorer {
    pub program: String,
    pub args: Vec<String>,
}

impl Scorer for CommandScorer {
    fn score(&self, smiles: &[String]) -> Result<Vec<f64>, MolhivError> {
        let unavailable = |e: std::io::Error| MolhivError::ScorerUnavailable(format!("{}: {e}", self.program));
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(unavailable)?;
        let input = smiles.join("\n") + "\n";
        let mut stdin = child.stdin.take().expect("piped stdin");
        let writer = std::thread::spawn(move || stdin.write_all(input.as_bytes()));
        let stdout = child.stdout.take().expect("piped stdout");
        let lines: Vec<String> = BufReader::new(stdout)
            .lines()
            .collect::<Result<_, _>>()
            .map_err(unavailable)?;
        let status = child.wait().map_err(unavailable)?;
        let _ = writer.join();
        if !status.success() {
            return Err(MolhivError::ScorerUnavailable(format!("{} exited with {status}", self.program)));
        }
        parse_scores(&lines.join("\n"))
    }
}

/// POSTs SMILES lines as plain text; the reply body holds probability lines.
pub struct HttpScorer {
    pub url: String,
}

impl Scorer for HttpScorer {
    fn score(&self, smiles: &[String]) -> Result<Vec<f64>, MolhivError> {
        let unavailable = |e: ureq::Error| MolhivError::ScorerUnavailable(format!("{}: {e}", self.url));
        let mut response = ureq::post(&self.url)
            .content_type("text/plain")
            .send(smiles.join("\n") + "\n")
            .map_err(unavailable)?;
        let body = response.body_mut().read_to_string().map_err(unavailable)?;
        parse_scores(&body)
    }
}

fn parse_scores(text: &str) -> Result<Vec<f64>, MolhivError> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| match l.parse::<f64>() {
            Ok(p) if (0.0..=1.0).contains(&p) => Ok(p),
            _ => Err(MolhivError::ScorerProtocolViolation(format!("bad probability line '{l}'"))),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoleculeScore {
    pub score: f64,
    /// The SMILES check failed; the molecule was not sent to the scorer.
    pub invalid: bool,
}

/// Scores syntactically valid molecules with `scorer`; invalid ones get 0.
pub fn score_molecules(smiles: &[String], scorer: &dyn Scorer) -> Result<Vec<MoleculeScore>, MolhivError> {
    let valid: Vec<String> = smiles
        .iter()
        .map(|s| normalize_smiles(s))
        .filter(|s| is_valid_smiles(s))
        .map(str::to_string)
        .collect();
    let scores = if valid.is_empty() { Vec::new() } else { scorer.score(&valid)? };
    if scores.len() != valid.len() {
        return Err(MolhivError::ScorerProtocolViolation(format!(
            "sent {} molecules, received {} scores",
            valid.len(),
            scores.len()
        )));
    }
    let mut it = scores.into_iter();
    Ok(smiles
        .iter()
        .map(|s| {
            if is_valid_smiles(normalize_smiles(s)) {
                MoleculeScore { score: it.next().expect("one score per valid molecule"), invalid: false }
            } else {
                MoleculeScore { score: 0.0, invalid: true }
            }
        })
        .collect())
}

/// Novel and unique percentages under trimmed, unquoted string identity.
pub fn molecule_novel_unique(generated: &[String], exemplars: &[String]) -> Option<(f64, f64)> {
    molecule_novel_unique_with(generated, exemplars, |s| normalize_smiles(s).to_string())
}

/// Like [`molecule_novel_unique`] with a caller-supplied normalization, e.g.
/// an external canonicalizer.
pub fn molecule_novel_unique_with(
    generated: &[String],
    exemplars: &[String],
    normalize: impl Fn(&str) -> String,
) -> Option<(f64, f64)> {
    if generated.is_empty() {
        return None;
    }
    let known: HashSet<String> = exemplars.iter().map(|s| normalize(s)).collect();
    let gen: Vec<String> = generated.iter().map(|s| normalize(s)).collect();
    let novel = gen.iter().filter(|s| !known.contains(*s)).count();
    let distinct: HashSet<&String> = gen.iter().collect();
    let n = gen.len() as f64;
    Some((100.0 * novel as f64 / n, 100.0 * distinct.len() as f64 / n))
}
