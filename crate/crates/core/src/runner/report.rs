use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::metrics::{format_cell, AggregateStats};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    pub prompt: String,
    /// `columns.len()` × max(1, `subcolumns.len()`) cells, column by column.
    pub cells: Vec<Option<AggregateStats>>,
}

/// Prompt styles down, settings (optionally split into metric subcolumns)
/// across, optionally stacked in row groups such as sizes, temperatures,
/// models, p values or metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportTable {
    pub title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_title: Option<String>,
    pub columns: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subcolumns: Vec<String>,
    pub rows: Vec<ReportRow>,
    pub footer: Vec<String>,
}

impl ReportTable {
    fn width(&self) -> usize {
        self.subcolumns.len().max(1)
    }

    /// `sub` names the subcolumn; `None` when the table has none.
    pub fn cell(
        &self,
        group: Option<&str>,
        prompt: &str,
        column: &str,
        sub: Option<&str>,
    ) -> Option<&AggregateStats> {
        let c = self.columns.iter().position(|x| x == column)?;
        let m = match sub {
            Some(name) => self.subcolumns.iter().position(|x| x == name)?,
            None if self.subcolumns.is_empty() => 0,
            None => return None,
        };
        let row = self
            .rows
            .iter()
            .find(|r| r.prompt == prompt && r.group.as_deref() == group)?;
        row.cells[c * self.width() + m].as_ref()
    }

    /// Fixed-width plain text.
    pub fn to_text(&self) -> String {
        let nm = self.width();
        let has_groups = self.rows.iter().any(|r| r.group.is_some());
        let mut lead_titles = Vec::new();
        if has_groups {
            lead_titles.push(self.group_title.clone().unwrap_or_else(|| "Group".into()));
        }
        lead_titles.push("Prompt".to_string());

        let body: Vec<(Vec<String>, Vec<String>)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut lead = Vec::new();
                if has_groups {
                    let first = i == 0 || self.rows[i - 1].group != r.group;
                    lead.push(if first { r.group.clone().unwrap_or_default() } else { String::new() });
                }
                lead.push(r.prompt.clone());
                (lead, r.cells.iter().map(|c| format_cell(c.as_ref())).collect())
            })
            .collect();

        let width = |s: &str| s.chars().count();
        let mut lead_w: Vec<usize> = lead_titles.iter().map(|t| width(t)).collect();
        for (lead, _) in &body {
            for (w, s) in lead_w.iter_mut().zip(lead) {
                *w = (*w).max(width(s));
            }
        }
        let two_level = !self.subcolumns.is_empty();
        let head = |i: usize| {
            if !self.subcolumns.is_empty() {
                self.subcolumns[i % nm].clone()
            } else {
                self.columns[i].clone()
            }
        };
        let mut cell_w: Vec<usize> = (0..self.columns.len() * nm)
            .map(|i| {
                let head = head(i);
                body.iter().map(|(_, c)| width(&c[i])).fold(width(&head), usize::max)
            })
            .collect();
        if two_level {
            for (c, name) in self.columns.iter().enumerate() {
                let span: usize = cell_w[c * nm..(c + 1) * nm].iter().sum::<usize>() + 2 * (nm - 1);
                if width(name) > span {
                    cell_w[(c + 1) * nm - 1] += width(name) - span;
                }
            }
        }

        let pad = |s: &str, w: usize| format!("{s}{}", " ".repeat(w.saturating_sub(width(s))));
        let lead_text = |cells: &[String]| -> String {
            cells.iter().zip(&lead_w).map(|(s, &w)| pad(s, w)).collect::<Vec<_>>().join("  ")
        };
        let total: usize = lead_w.iter().sum::<usize>()
            + 2 * (lead_w.len() - 1)
            + cell_w.iter().map(|w| w + 2).sum::<usize>();

        let mut out = String::new();
        let _ = writeln!(out, "{}", self.title);
        if two_level {
            let blank: Vec<String> = lead_w.iter().map(|_| String::new()).collect();
            let mut line = lead_text(&blank);
            for (c, name) in self.columns.iter().enumerate() {
                let span: usize = cell_w[c * nm..(c + 1) * nm].iter().sum::<usize>() + 2 * (nm - 1);
                line.push_str("  ");
                line.push_str(&pad(name, span));
            }
            let _ = writeln!(out, "{}", line.trim_end());
        }
        let mut header = lead_text(&lead_titles);
        for (i, w) in cell_w.iter().enumerate() {
            header.push_str("  ");
            header.push_str(&pad(&head(i), *w));
        }
        let _ = writeln!(out, "{}", header.trim_end());
        let rule = "-".repeat(total);
        let _ = writeln!(out, "{rule}");
        for (i, (lead, cells)) in body.iter().enumerate() {
            if has_groups && i > 0 && self.rows[i - 1].group != self.rows[i].group {
                let _ = writeln!(out, "{rule}");
            }
            let mut line = lead_text(lead);
            for (s, w) in cells.iter().zip(&cell_w) {
                line.push_str("  ");
                line.push_str(&pad(s, *w));
            }
            let _ = writeln!(out, "{}", line.trim_end());
        }
        let _ = writeln!(out, "{rule}");
        for f in &self.footer {
            let _ = writeln!(out, "{f}");
        }
        out
    }

    /// One line per cell.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let nm = self.width();
        let _ = w.write_record(["group", "prompt", "setting", "metric", "mean", "standard_error", "trials", "cell"]);
        for r in &self.rows {
            for (i, cell) in r.cells.iter().enumerate() {
                let (mean, se, n) = match cell {
                    Some(s) => (
                        format!("{:.4}", s.mean),
                        s.standard_error.map(|e| format!("{e:.4}")).unwrap_or_default(),
                        s.trial_count.to_string(),
                    ),
                    None => (String::new(), String::new(), "0".into()),
                };
                let _ = w.write_record([
                    r.group.as_deref().unwrap_or(""),
                    &r.prompt,
                    &self.columns[i / nm],
                    self.subcolumns.get(i % nm).map_or("", String::as_str),
                    &mean,
                    &se,
                    &n,
                    &format_cell(cell.as_ref()),
                ]);
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
    }
}

/// Writes `report.txt`, `report.csv` and `report.json` into `dir`.
pub fn emit_report(table: &ReportTable, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let json = serde_json::to_string_pretty(table).map_err(std::io::Error::other)?;
    let files = [
        ("report.txt", table.to_text()),
        ("report.csv", table.to_csv()),
        ("report.json", json + "\n"),
    ];
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        std::fs::write(&path, body)?;
        written.push(path);
    }
    Ok(written)
}
