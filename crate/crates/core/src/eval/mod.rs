//! Confusion counts, accuracy/precision/recall/F1, reports and the
//! three-mode feature ablation.

mod ablate;
mod metrics;
mod report;

pub use self::ablate::{
    ablate, build_dataset, check_coverage, evaluate, feature_rows, feature_width, model_name,
    split_digest, targets, Ablation, AblationConfig,
};
pub use self::metrics::{
    class_metrics, confusion, metrics, Averaging, ClassCounts, ClassMetrics, ConfusionCounts,
    MetricOptions, Metrics, Ratio,
};
pub use self::report::{
    emit_report, parse_json_report, render_report, EvalReport, FeatureMode, ReportFormat, Task,
    REPORT_SCHEMA,
};
