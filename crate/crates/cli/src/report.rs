//! The structured report document and the human tables derived from it.

use std::fmt::Write as _;

use ari::protocol::{ProtocolConfig, ScoreReport, SweepEntry};
use ari::CategoricalDataset;
use serde::Serialize;

pub const TOOL: &str = "ari";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct ReportDocument {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub format_version: u32,
    pub command: &'static str,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset: Option<DatasetDescriptor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub protocol: Option<ProtocolConfig>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub methods: Vec<MethodSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<AccuracySection>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepRow>,
}

impl ReportDocument {
    pub fn new(command: &'static str, seed: u64) -> Self {
        Self {
            tool: TOOL,
            tool_version: env!("CARGO_PKG_VERSION"),
            format_version: FORMAT_VERSION,
            command,
            seed,
            dataset: None,
            protocol: None,
            methods: Vec::new(),
            accuracy: None,
            sweep: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }
}

#[derive(Debug, Serialize)]
pub struct DatasetDescriptor {
    pub source: String,
    pub rows: usize,
    pub features: usize,
    pub label: String,
    pub classes: usize,
}

impl DatasetDescriptor {
    pub fn new(source: &str, ds: &CategoricalDataset) -> Self {
        Self {
            source: source.to_owned(),
            rows: ds.n_rows(),
            features: ds.n_features(),
            label: ds.label_name().to_owned(),
            classes: ds.n_labels(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct FeatureRow {
    pub name: String,
    /// Mean score, or the sentinel value when no repetition produced one.
    pub value: f64,
    pub raw_mean: Option<f64>,
    pub normalized: Option<f64>,
    pub flags: Vec<&'static str>,
    pub redundant_frequency: f64,
    pub zero_variance_frequency: f64,
}

#[derive(Debug, Serialize)]
pub struct MethodSection {
    pub method: String,
    pub sample_size: usize,
    pub features: Vec<FeatureRow>,
}

impl MethodSection {
    pub fn new(report: &ScoreReport, names: &[String]) -> Self {
        let features = report
            .features
            .iter()
            .zip(names)
            .map(|(f, name)| {
                let mut flags = Vec::new();
                if f.flags.zero_variance {
                    flags.push("zero_variance");
                }
                if f.flags.redundant {
                    flags.push("redundant");
                }
                FeatureRow {
                    name: name.clone(),
                    value: f.reported_value(),
                    raw_mean: f.raw_mean,
                    normalized: f.normalized,
                    flags,
                    redundant_frequency: f.redundant_frequency,
                    zero_variance_frequency: f.zero_variance_frequency,
                }
            })
            .collect();
        Self {
            method: report.method.to_string(),
            sample_size: report.sample_size,
            features,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct AccuracyRow {
    pub method: String,
    pub features: Vec<String>,
    pub accuracy: f64,
}

#[derive(Debug, Serialize)]
pub struct AccuracySection {
    pub k: usize,
    pub folds: usize,
    pub stratified: bool,
    pub l2_strength: f64,
    pub learning_rate: f64,
    pub max_iterations: usize,
    pub baseline: AccuracyRow,
    pub methods: Vec<AccuracyRow>,
}

#[derive(Debug, Serialize)]
pub struct SweepRow {
    pub function: String,
    pub dimension: usize,
    pub range: u32,
    /// Decimal string; the value can exceed what JSON numbers carry exactly.
    pub universe_size: String,
    pub sample_size: usize,
    pub coverage_percent: f64,
    pub redundant_fraction: f64,
    pub scores: MethodSection,
}

impl SweepRow {
    pub fn new(entry: &SweepEntry) -> Self {
        let names: Vec<String> = (1..=entry.spec.dimension).map(|i| format!("x{i}")).collect();
        Self {
            function: entry.spec.function.to_string(),
            dimension: entry.spec.dimension,
            range: entry.spec.range,
            universe_size: entry.universe_size.to_string(),
            sample_size: entry.sample_size,
            coverage_percent: entry.coverage_percent,
            redundant_fraction: entry.redundant_fraction,
            scores: MethodSection::new(&entry.report, &names),
        }
    }
}

fn cell(f: &FeatureRow) -> String {
    if f.flags.contains(&"redundant") {
        match f.raw_mean {
            Some(v) => format!("{v:.2}*"),
            None => "2*".to_owned(),
        }
    } else {
        format!("{:.2}", f.normalized.unwrap_or(f.value))
    }
}

/// Methods as rows, features as columns.
pub fn score_table(sections: &[MethodSection]) -> String {
    let Some(first) = sections.first() else {
        return String::new();
    };
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut header = vec!["method".to_owned()];
    header.extend(first.features.iter().map(|f| f.name.clone()));
    rows.push(header);
    for s in sections {
        let mut row = vec![s.method.clone()];
        row.extend(s.features.iter().map(cell));
        rows.push(row);
    }
    let mut out = align(&rows);
    if sections.iter().flat_map(|s| &s.features).any(|f| f.flags.contains(&"redundant")) {
        out.push_str("* redundant (empty Hamming-1 pair set) in at least one repetition; mean over the others, 2 if none\n");
    }
    out
}

pub fn accuracy_table(section: &AccuracySection) -> String {
    let mut rows = vec![vec![
        "selection".to_owned(),
        "features".to_owned(),
        "accuracy".to_owned(),
    ]];
    let mut push = |label: String, r: &AccuracyRow| {
        rows.push(vec![
            label,
            format!("{} ({})", r.features.len(), r.features.join(",")),
            format!("{:.2}%", 100.0 * r.accuracy),
        ]);
    };
    push("baseline".to_owned(), &section.baseline);
    for r in &section.methods {
        push(r.method.clone(), r);
    }
    let mut out = align(&rows);
    for r in &section.methods {
        if r.features.len() < section.k {
            let _ = writeln!(
                out,
                "{}: only {} feature(s) used (remaining candidates scored 0)",
                r.method,
                r.features.len()
            );
        }
    }
    out
}

pub fn sweep_table(rows_in: &[SweepRow]) -> String {
    let mut rows = vec![vec![
        "function".to_owned(),
        "dim".to_owned(),
        "range".to_owned(),
        "|X|".to_owned(),
        "sample".to_owned(),
        "coverage".to_owned(),
        "redundant".to_owned(),
        "sentinel frequency per feature".to_owned(),
        "scores".to_owned(),
    ]];
    for r in rows_in {
        rows.push(vec![
            r.function.clone(),
            r.dimension.to_string(),
            r.range.to_string(),
            r.universe_size.clone(),
            r.sample_size.to_string(),
            format_percent(r.coverage_percent),
            format!("{:.0}%", 100.0 * r.redundant_fraction),
            r.scores
                .features
                .iter()
                .map(|f| format!("{:.1}", f.redundant_frequency))
                .collect::<Vec<_>>()
                .join(" "),
            r.scores.features.iter().map(cell).collect::<Vec<_>>().join(" "),
        ]);
    }
    align(&rows)
}

fn format_percent(p: f64) -> String {
    if p >= 0.1 {
        format!("{p:.1}%")
    } else {
        format!("{p:.2e}%")
    }
}

fn align(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(c, s)| format!("{s:<w$}", w = widths[c]))
            .collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percent_formatting() {
        assert_eq!(format_percent(100.0 * 500.0 / 1024.0), "48.8%");
        assert_eq!(format_percent(100.0), "100.0%");
        assert_eq!(format_percent(100.0 * 500.0 / 14_348_907.0), "3.48e-3%");
    }

    #[test]
    fn table_columns_align() {
        let t = align(&[
            vec!["a".into(), "bbb".into()],
            vec!["cc".into(), "d".into()],
        ]);
        assert_eq!(t, "a   bbb\ncc  d\n");
    }
}
