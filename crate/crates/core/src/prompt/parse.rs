use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::ExpectedOutput;
use crate::graph::{find_graph_start, parse_graph_at, Graph, ParseWarning};
use crate::molhiv::smiles::{check_smiles, normalize_smiles};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Diagnostic {
    /// A graph expression started at `offset` but could not be parsed.
    MalformedGraph { offset: usize, error: String },
    /// Graph `index` parsed with a normalization warning.
    GraphWarning { index: usize, warning: ParseWarning },
    NoGraphsFound,
    /// More graphs than requested; the extras were dropped.
    Truncated { kept: usize, dropped: usize },
    NoPEstimate,
    /// A p value was found but lies outside `[0, 1]`.
    PEstimateOutOfRange { text: String },
    NoSmilesFound,
    /// A single-token line that looked like a molecule but failed the check.
    RejectedSmiles { line: usize, text: String, error: String },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ParsedResponse {
    pub graphs: Vec<Graph>,
    pub p_estimate: Option<f64>,
    pub smiles: Vec<String>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Extracts whatever `expected` asks for; never fails.
pub fn parse_response(text: &str, expected: ExpectedOutput) -> ParsedResponse {
    let mut out = ParsedResponse::default();
    match expected {
        ExpectedOutput::GraphList(count) => extract_graphs(text, count, &mut out),
        ExpectedOutput::PEstimateAndGraphList(count) => {
            match parse_p_estimate(text) {
                Some(Ok(p)) => out.p_estimate = Some(p),
                Some(Err(raw)) => out.diagnostics.push(Diagnostic::PEstimateOutOfRange { text: raw }),
                None => out.diagnostics.push(Diagnostic::NoPEstimate),
            }
            extract_graphs(text, count, &mut out);
        }
        ExpectedOutput::SmilesList(count) => extract_smiles(text, count, &mut out),
    }
    out
}

fn extract_graphs(text: &str, count: usize, out: &mut ParsedResponse) {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let mut found = 0;
    while let Some(open) = find_graph_start(bytes, pos) {
        match parse_graph_at(bytes, open) {
            Ok((parsed, end)) => {
                if found < count {
                    for warning in parsed.warnings {
                        out.diagnostics.push(Diagnostic::GraphWarning {
                            index: out.graphs.len(),
                            warning,
                        });
                    }
                    out.graphs.push(parsed.graph);
                }
                found += 1;
                pos = end;
            }
            Err(e) => {
                out.diagnostics.push(Diagnostic::MalformedGraph {
                    offset: open,
                    error: e.to_string(),
                });
                pos = open + 1;
            }
        }
    }
    if found == 0 {
        out.diagnostics.push(Diagnostic::NoGraphsFound);
    } else if found > count {
        out.diagnostics.push(Diagnostic::Truncated {
            kept: count,
            dropped: found - count,
        });
    }
}

/// Finds the first p value in `text`.
///
/// Looks for a number bound to `p` first (`p = 0.6`, `p is about 60%`,
/// `p: 3/5`), then for the first percentage, then for the first decimal
/// number between 0 and 1. `Some(Err(raw))` reports a bound value outside
/// `[0, 1]`.
pub fn parse_p_estimate(text: &str) -> Option<Result<f64, String>> {
    static BOUND: OnceLock<Regex> = OnceLock::new();
    static PERCENT: OnceLock<Regex> = OnceLock::new();
    static DECIMAL: OnceLock<Regex> = OnceLock::new();
    const NUM: &str = r"(\d+(?:\.\d+)?|\.\d+)";
    let bound = BOUND.get_or_init(|| {
        Regex::new(&format!(
            r"(?i)(?:^|[^a-z_])p(?:_?pred)?\s*(?:=|:|≈|~|\bis\b(?:\s+(?:about|around|approximately|roughly|estimated\s+(?:at|to\s+be)))?|\bof\b)\s*\**\s*{NUM}\s*(?:(%)|/\s*{NUM})?"
        ))
        .expect("valid regex")
    });
    let percent = PERCENT.get_or_init(|| Regex::new(&format!(r"{NUM}\s*%")).expect("valid regex"));
    let decimal = DECIMAL.get_or_init(|| {
        Regex::new(r"(?:^|[^\d.])(0?\.\d+|1\.0+)(?:$|[^\d.])").expect("valid regex")
    });

    let value = if let Some(c) = bound.captures(text) {
        let x: f64 = c[1].parse().ok()?;
        let raw = c.get(0).map_or("", |m| m.as_str()).trim().to_string();
        let v = if c.get(2).is_some() {
            x / 100.0
        } else if let Some(d) = c.get(3) {
            let d: f64 = d.as_str().parse().ok()?;
            if d == 0.0 {
                return Some(Err(raw));
            }
            x / d
        } else {
            x
        };
        if !(0.0..=1.0).contains(&v) {
            return Some(Err(raw));
        }
        v
    } else if let Some(c) = percent.captures(text) {
        let v = c[1].parse::<f64>().ok()? / 100.0;
        if !(0.0..=1.0).contains(&v) {
            return Some(Err(c[0].to_string()));
        }
        v
    } else {
        let c = decimal.captures(text)?;
        c[1].parse::<f64>().ok().filter(|v| (0.0..=1.0).contains(v))?
    };
    Some(Ok(value))
}

/// List markers such as `1.`, `2)`, `-`, `*` at the start of a line.
fn strip_list_marker(line: &str) -> &str {
    static MARKER: OnceLock<Regex> = OnceLock::new();
    let re = MARKER.get_or_init(|| {
        Regex::new(r"^\s*(?:\d+\s*[.):]\s+|[-•]\s+|\*\s+)").expect("valid regex")
    });
    match re.find(line) {
        Some(m) => &line[m.end()..],
        None => line,
    }
}

fn extract_smiles(text: &str, count: usize, out: &mut ParsedResponse) {
    let mut found = 0;
    for (i, line) in text.lines().enumerate() {
        let body = normalize_smiles(strip_list_marker(line));
        let body = body.trim_end_matches([',', ';']);
        if body.is_empty() || body.contains(char::is_whitespace) {
            continue;
        }
        match check_smiles(body) {
            Ok(()) => {
                if found < count {
                    out.smiles.push(body.to_string());
                }
                found += 1;
            }
            // Prose fragments ending in ':' or '.' are not attempts.
            Err(_) if body.ends_with([':', '.']) || body.chars().all(char::is_alphabetic) => {}
            Err(e) => out.diagnostics.push(Diagnostic::RejectedSmiles {
                line: i + 1,
                text: body.to_string(),
                error: e.to_string(),
            }),
        }
    }
    if found == 0 {
        out.diagnostics.push(Diagnostic::NoSmilesFound);
    } else if found > count {
        out.diagnostics.push(Diagnostic::Truncated {
            kept: count,
            dropped: found - count,
        });
    }
}
