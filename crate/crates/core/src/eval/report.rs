use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::metrics::{ConfusionCounts, Metrics};
use crate::corpus::ParseQuality;
use crate::error::{Error, Result};

pub const REPORT_SCHEMA: &str = "report-v1";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureMode {
    GrammarOnly,
    EmbeddingOnly,
    #[default]
    Fused,
}

impl FeatureMode {
    pub const ALL: [FeatureMode; 3] = [
        FeatureMode::GrammarOnly,
        FeatureMode::EmbeddingOnly,
        FeatureMode::Fused,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureMode::GrammarOnly => "grammar-only",
            FeatureMode::EmbeddingOnly => "embedding-only",
            FeatureMode::Fused => "fused",
        }
    }
}

impl std::fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for FeatureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FeatureMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown feature mode `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    #[default]
    Classify,
    Ner,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Classify => "classify",
            Task::Ner => "ner",
        }
    }
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classify" => Ok(Task::Classify),
            "ner" => Ok(Task::Ner),
            other => Err(Error::Config(format!("unknown task `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: String,
    pub model: String,
    pub mode: FeatureMode,
    pub task: Task,
    pub parse_quality: ParseQuality,
    pub seed: u64,
    pub config_digest: String,
    pub split_digest: String,
    pub train_size: usize,
    pub test_size: usize,
    pub metrics: Metrics,
    pub confusion: ConfusionCounts,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Json,
    Markdown,
    Csv,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Json => "json",
            ReportFormat::Markdown => "md",
            ReportFormat::Csv => "csv",
        }
    }
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Config(format!("unknown report format `{other}`"))),
        }
    }
}

/// JSON keeps full precision so it parses back to equal values; markdown
/// and CSV print metrics to two decimals.
pub fn render_report(reports: &[EvalReport], format: ReportFormat) -> Result<String> {
    if reports.is_empty() {
        return Err(Error::Input("no reports to emit".into()));
    }
    match format {
        ReportFormat::Json => {
            let mut s =
                serde_json::to_string_pretty(reports).map_err(|e| Error::Input(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Markdown => Ok(render_markdown(reports)),
        ReportFormat::Csv => render_csv(reports),
    }
}

pub fn parse_json_report(text: &str) -> Result<Vec<EvalReport>> {
    let reports: Vec<EvalReport> =
        serde_json::from_str(text).map_err(|e| Error::format(e.line(), e.to_string()))?;
    if let Some(r) = reports.iter().find(|r| r.schema_version != REPORT_SCHEMA) {
        return Err(Error::Schema(format!(
            "unsupported report schema `{}`",
            r.schema_version
        )));
    }
    Ok(reports)
}

pub fn emit_report(
    reports: &[EvalReport],
    format: ReportFormat,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let text = render_report(reports, format)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn render_markdown(reports: &[EvalReport]) -> String {
    let mut out = String::new();
    let first = &reports[0];
    let _ = writeln!(
        out,
        "Task: {}. Averaging: {}{}. Seed: {}. Train/test: {}/{}.",
        first.task,
        first.metrics.averaging,
        if first.task == Task::Ner && !first.metrics.include_o {
            ", O excluded"
        } else {
            ""
        },
        first.seed,
        first.train_size,
        first.test_size
    );
    out.push('\n');
    out.push_str("| Model | Accuracy (%) | Precision (%) | Recall (%) | F1 (%) |\n");
    out.push_str("|---|---:|---:|---:|---:|\n");
    for r in reports {
        let m = &r.metrics;
        let _ = writeln!(
            out,
            "| {} ({}) | {:.2} | {:.2} | {:.2} | {:.2} |",
            r.model, r.mode, m.accuracy, m.precision, m.recall, m.f1
        );
    }
    out
}

fn render_csv(reports: &[EvalReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Input(e.to_string());
    w.write_record([
        "model",
        "mode",
        "task",
        "parse_quality",
        "seed",
        "averaging",
        "include_o",
        "accuracy",
        "precision",
        "recall",
        "f1",
    ])
    .map_err(io)?;
    for r in reports {
        let m = &r.metrics;
        w.write_record([
            r.model.clone(),
            r.mode.to_string(),
            r.task.to_string(),
            r.parse_quality.to_string(),
            r.seed.to_string(),
            m.averaging.to_string(),
            m.include_o.to_string(),
            format!("{:.2}", m.accuracy),
            format!("{:.2}", m.precision),
            format!("{:.2}", m.recall),
            format!("{:.2}", m.f1),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Input(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Input(e.to_string()))
}
