use serde::{Deserialize, Serialize};

use super::metrics::{confusion, metrics, ConfusionCounts, MetricOptions, Metrics};
use super::report::{EvalReport, FeatureMode, Task, REPORT_SCHEMA};
use crate::corpus::{split_indices, AnnotatedDocument, LabelSet, ParseQuality, SplitSpec};
use crate::digest::{json_digest, sha256_hex};
use crate::error::{Error, Result};
use crate::fuse::{
    fit_standardizer, fuse_document, fuse_tokens, pool, EmbeddingMatrix, EmbeddingSet, Pooling,
    Standardizer,
};
use crate::grammar::{extract_all, FunctionWordSet, GrammarConfig, GrammarVector, GRAMMAR_DIM};
use crate::matrix::Matrix;
use crate::model::{init_head, predict, train, Dataset, Head, HeadConfig, TrainTrace};
use crate::par::{self, Execution};

/// Feature rows for one document.
///
/// Classification yields one row (mean-pooled embedding); NER yields one row
/// per token. Grammar-only rows repeat the document's standardized vector.
pub fn feature_rows(
    task: Task,
    mode: FeatureMode,
    embeddings: &EmbeddingMatrix,
    grammar: &[f64; GRAMMAR_DIM],
    pooling: Pooling,
) -> Result<Matrix> {
    let n = match task {
        Task::Classify => 1,
        Task::Ner => embeddings.rows(),
    };
    match (task, mode) {
        (_, FeatureMode::GrammarOnly) => Matrix::from_vec(n, GRAMMAR_DIM, grammar.repeat(n)),
        (Task::Classify, FeatureMode::EmbeddingOnly) => {
            let row = pool(embeddings, pooling)?;
            Matrix::from_vec(1, row.len(), row)
        }
        (Task::Ner, FeatureMode::EmbeddingOnly) => Ok(embeddings.matrix.clone()),
        (Task::Classify, FeatureMode::Fused) => {
            Ok(fuse_document(embeddings, grammar, pooling)?.matrix)
        }
        (Task::Ner, FeatureMode::Fused) => Ok(fuse_tokens(embeddings, grammar).matrix),
    }
}

/// Width of [`feature_rows`] output for embedding dimension `dim`.
pub fn feature_width(mode: FeatureMode, dim: usize) -> usize {
    match mode {
        FeatureMode::GrammarOnly => GRAMMAR_DIM,
        FeatureMode::EmbeddingOnly => dim,
        FeatureMode::Fused => dim + GRAMMAR_DIM,
    }
}

/// Class indices for one document: its label, or one tag per token.
pub fn targets(task: Task, doc: &AnnotatedDocument, labels: &LabelSet) -> Result<Vec<usize>> {
    let lookup = |name: Option<&str>, what: &str| {
        let name =
            name.ok_or_else(|| Error::Input(format!("document {} has no {what}", doc.id)))?;
        labels
            .index_of(name)
            .ok_or_else(|| Error::Input(format!("unknown label `{name}` in document {}", doc.id)))
    };
    match task {
        Task::Classify => Ok(vec![lookup(doc.label.as_deref(), "label")?]),
        Task::Ner => doc
            .tokens()
            .map(|t| lookup(t.ner.as_deref(), "NER tag on every token"))
            .collect(),
    }
}

/// Fails with a coverage error listing every document lacking embeddings,
/// and with an input error when token-level rows do not match token counts.
pub fn check_coverage(task: Task, docs: &[AnnotatedDocument], set: &EmbeddingSet) -> Result<()> {
    let missing = set.missing(docs.iter().map(|d| d.id.as_str()));
    if !missing.is_empty() {
        return Err(Error::Coverage(missing));
    }
    if task == Task::Ner {
        for d in docs {
            let e = &set.records[&d.id];
            if e.rows() != d.token_count() {
                return Err(Error::Input(format!(
                    "document {} has {} tokens but {} embedding rows",
                    d.id,
                    d.token_count(),
                    e.rows()
                )));
            }
        }
    }
    Ok(())
}

/// Stacks feature rows and targets of the selected documents.
#[allow(clippy::too_many_arguments)]
pub fn build_dataset(
    task: Task,
    mode: FeatureMode,
    docs: &[&AnnotatedDocument],
    grammar: &[[f64; GRAMMAR_DIM]],
    embeddings: &EmbeddingSet,
    labels: &LabelSet,
    pooling: Pooling,
    exec: Execution,
) -> Result<Dataset> {
    if docs.len() != grammar.len() {
        return Err(Error::Shape {
            expected: docs.len(),
            actual: grammar.len(),
        });
    }
    let width = feature_width(mode, embeddings.dim);
    let idx: Vec<usize> = (0..docs.len()).collect();
    let parts = par::try_map(&idx, exec, |&i| {
        let doc = docs[i];
        let e = embeddings
            .get(&doc.id)
            .ok_or_else(|| Error::Coverage(vec![doc.id.clone()]))?;
        let rows = feature_rows(task, mode, e, &grammar[i], pooling)?;
        let y = targets(task, doc, labels)?;
        if rows.rows() != y.len() {
            return Err(Error::Shape {
                expected: y.len(),
                actual: rows.rows(),
            });
        }
        Ok((rows, y))
    })?;
    let mut data = Vec::new();
    let mut ys = Vec::new();
    for (rows, y) in parts {
        data.extend_from_slice(rows.as_slice());
        ys.extend(y);
    }
    Dataset::new(Matrix::from_vec(ys.len(), width, data)?, ys)
}

/// Predicts `data` with `head` and scores it.
pub fn evaluate(
    head: &Head,
    data: &Dataset,
    labels: &LabelSet,
    opts: MetricOptions,
) -> Result<(ConfusionCounts, Metrics)> {
    let pred = predict(head, &data.x)?;
    let c = confusion(&data.y, &pred, labels)?;
    let m = metrics(&c, opts)?;
    Ok((c, m))
}

pub fn model_name(config: &HeadConfig) -> String {
    if config.hidden_dim == 0 {
        "linear".to_string()
    } else {
        format!("mlp-{}", config.hidden_dim)
    }
}

/// Digest of the ordered train and test id lists.
pub fn split_digest(train: &[&str], test: &[&str]) -> String {
    let mut s = String::new();
    for id in train {
        s.push_str(id);
        s.push('\n');
    }
    s.push('\0');
    for id in test {
        s.push_str(id);
        s.push('\n');
    }
    sha256_hex(s.as_bytes())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationConfig {
    pub task: Task,
    /// Drives the split and head initialization; the seeds inside `split`
    /// and `head` are overwritten with it.
    pub seed: u64,
    pub split: SplitSpec,
    /// `input_dim` and `class_count` are set per leg.
    pub head: HeadConfig,
    pub grammar: GrammarConfig,
    pub metrics: MetricOptions,
    pub pooling: Pooling,
}

impl AblationConfig {
    pub fn new(task: Task, seed: u64) -> Self {
        AblationConfig {
            task,
            seed,
            split: SplitSpec::default(),
            head: HeadConfig::default(),
            grammar: GrammarConfig::default(),
            metrics: MetricOptions::default(),
            pooling: Pooling::Mean,
        }
    }

    fn seeded(&self) -> Self {
        let mut c = *self;
        c.split.seed = self.seed;
        c.head.seed = self.seed;
        c
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ablation {
    /// Grammar-only, embedding-only, fused, in that order.
    pub reports: Vec<EvalReport>,
    pub traces: Vec<TrainTrace>,
    pub heads: Vec<Head>,
    pub train_ids: Vec<String>,
    pub test_ids: Vec<String>,
    pub standardizer: Standardizer,
}

/// Trains and scores one head per feature mode on a single shared split.
pub fn ablate(
    docs: &[AnnotatedDocument],
    embeddings: &EmbeddingSet,
    labels: &LabelSet,
    fset: &FunctionWordSet,
    config: &AblationConfig,
    exec: Execution,
) -> Result<Ablation> {
    let cfg = config.seeded();
    check_coverage(cfg.task, docs, embeddings)?;
    let vectors = extract_all(docs, fset, &cfg.grammar, exec)?;
    let (train_idx, test_idx) = split_indices(docs, &cfg.split)?;
    if train_idx.len() < 2 || test_idx.is_empty() {
        return Err(Error::Size(format!(
            "split left {} training and {} test documents",
            train_idx.len(),
            test_idx.len()
        )));
    }
    let train_vectors: Vec<GrammarVector> = train_idx.iter().map(|&i| vectors[i].clone()).collect();
    let standardizer = fit_standardizer(&train_vectors)?;
    let z: Vec<[f64; GRAMMAR_DIM]> = vectors
        .iter()
        .map(|v| standardizer.transform(&v.values))
        .collect::<Result<_>>()?;

    let pick = |idx: &[usize]| -> (Vec<&AnnotatedDocument>, Vec<[f64; GRAMMAR_DIM]>) {
        (
            idx.iter().map(|&i| &docs[i]).collect(),
            idx.iter().map(|&i| z[i]).collect(),
        )
    };
    let (train_docs, train_z) = pick(&train_idx);
    let (test_docs, test_z) = pick(&test_idx);
    let train_ids: Vec<&str> = train_docs.iter().map(|d| d.id.as_str()).collect();
    let test_ids: Vec<&str> = test_docs.iter().map(|d| d.id.as_str()).collect();
    let split_digest = split_digest(&train_ids, &test_ids);
    let config_digest = json_digest(&cfg)?;
    let parse_quality = docs
        .iter()
        .map(|d| d.parse_quality())
        .min()
        .unwrap_or(ParseQuality::None);

    let legs = par::try_map(&FeatureMode::ALL, exec, |&mode| {
        let build = |d: &[&AnnotatedDocument], g: &[[f64; GRAMMAR_DIM]]| {
            build_dataset(cfg.task, mode, d, g, embeddings, labels, cfg.pooling, exec)
        };
        let train_set = build(&train_docs, &train_z)?;
        let test_set = build(&test_docs, &test_z)?;
        let head_cfg = HeadConfig {
            input_dim: feature_width(mode, embeddings.dim),
            class_count: labels.len(),
            ..cfg.head
        };
        let (head, trace) = train(init_head(head_cfg)?, &train_set)?;
        let (confusion, metrics) = evaluate(&head, &test_set, labels, cfg.metrics)?;
        let report = EvalReport {
            schema_version: REPORT_SCHEMA.to_string(),
            model: model_name(&head_cfg),
            mode,
            task: cfg.task,
            parse_quality,
            seed: cfg.seed,
            config_digest: config_digest.clone(),
            split_digest: split_digest.clone(),
            train_size: train_docs.len(),
            test_size: test_docs.len(),
            metrics,
            confusion,
        };
        Ok::<_, Error>((report, trace, head))
    })?;

    let mut out = Ablation {
        reports: Vec::new(),
        traces: Vec::new(),
        heads: Vec::new(),
        train_ids: train_ids.iter().map(|s| s.to_string()).collect(),
        test_ids: test_ids.iter().map(|s| s.to_string()).collect(),
        standardizer,
    };
    for (report, trace, head) in legs {
        out.reports.push(report);
        out.traces.push(trace);
        out.heads.push(head);
    }
    Ok(out)
}
