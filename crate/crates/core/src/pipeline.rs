//! End-to-end runs: corpus loading, the five commands and run manifests.
//!
//! Every command writes its artifacts into `out_dir` together with
//! `<command>_manifest.json`, which records the resolved configuration, its
//! digest, the seeds and SHA-256 checksums of every input and output. No
//! timestamps are written, so identical inputs give identical bytes.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::annotate::{heuristic_parse, Annotator};
use crate::corpus::{
    load_classification_csv, load_conllu, load_ner_iob, split_indices, AnnotatedDocument,
    CsvColumns, LabelKind, LabelSet, LoadWarning, SplitSpec,
};
use crate::digest::{json_digest, sha256_hex};
use crate::error::{Error, Result};
use crate::eval::{
    ablate, build_dataset, check_coverage, evaluate, feature_rows, model_name, render_report,
    split_digest, AblationConfig, Averaging, EvalReport, FeatureMode, MetricOptions, ReportFormat,
    Task, REPORT_SCHEMA,
};
use crate::fuse::{
    fit_standardizer, hash_embed_all, load_embeddings, render_embeddings, EmbeddingMatrix,
    EmbeddingSet, Pooling, Standardizer,
};
use crate::grammar::{
    extract_all, read_vectors_csv, render_vectors_csv, FunctionWordSet, GrammarConfig,
    GrammarVector, GRAMMAR_DIM, SCHEMA_VERSION,
};
use crate::model::{init_head, train, HeadConfig, ModelFile, TrainTrace};
use crate::par::Execution;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    /// From the file extension: `.csv`, `.conllu`, anything else is IOB.
    #[default]
    Auto,
    Csv,
    Iob,
    Conllu,
}

impl std::str::FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(CorpusFormat::Auto),
            "csv" => Ok(CorpusFormat::Csv),
            "iob" => Ok(CorpusFormat::Iob),
            "conllu" => Ok(CorpusFormat::Conllu),
            other => Err(Error::Config(format!("unknown corpus format `{other}`"))),
        }
    }
}

/// Fully resolved settings for one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub task: Task,
    pub corpus: Option<PathBuf>,
    pub corpus_format: CorpusFormat,
    /// Annotations matched to corpus documents by id.
    pub conllu: Option<PathBuf>,
    /// EMB1 file; hash embeddings of `hash_dim` are used when absent.
    pub embeddings: Option<PathBuf>,
    pub hash_dim: usize,
    /// Grammar vector CSV for `fuse`; extracted from the corpus when absent.
    pub vectors: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub standardizer: Option<PathBuf>,
    pub function_words: Option<PathBuf>,
    pub text_column: String,
    pub label_column: String,
    pub id_column: Option<String>,
    /// Heuristically parse sentences that arrive without a tree.
    pub parse_fallback: bool,
    pub mode: FeatureMode,
    pub seed: Option<u64>,
    pub train_fraction: f64,
    pub stratify: bool,
    pub hidden_dim: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub l2: f64,
    pub np_requires_noun: bool,
    pub advverb_cap: f64,
    pub epsilon: f64,
    pub averaging: Averaging,
    pub include_o: bool,
    pub formats: Vec<ReportFormat>,
    pub sequential: bool,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let head = HeadConfig::default();
        let grammar = GrammarConfig::default();
        RunConfig {
            task: Task::Classify,
            corpus: None,
            corpus_format: CorpusFormat::Auto,
            conllu: None,
            embeddings: None,
            hash_dim: 32,
            vectors: None,
            model: None,
            standardizer: None,
            function_words: None,
            text_column: "text".into(),
            label_column: "label".into(),
            id_column: None,
            parse_fallback: true,
            mode: FeatureMode::Fused,
            seed: None,
            train_fraction: SplitSpec::default().train_fraction,
            stratify: false,
            hidden_dim: head.hidden_dim,
            learning_rate: head.learning_rate,
            epochs: head.epochs,
            batch_size: head.batch_size,
            l2: head.l2,
            np_requires_noun: grammar.np_requires_noun,
            advverb_cap: grammar.advverb_cap,
            epsilon: grammar.epsilon,
            averaging: Averaging::Macro,
            include_o: false,
            formats: vec![
                ReportFormat::Json,
                ReportFormat::Markdown,
                ReportFormat::Csv,
            ],
            sequential: false,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    pub fn grammar_config(&self) -> GrammarConfig {
        GrammarConfig {
            np_requires_noun: self.np_requires_noun,
            advverb_cap: self.advverb_cap,
            epsilon: self.epsilon,
        }
    }

    pub fn head_config(&self, input_dim: usize, class_count: usize) -> HeadConfig {
        HeadConfig {
            input_dim,
            hidden_dim: self.hidden_dim,
            class_count,
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            batch_size: self.batch_size,
            l2: self.l2,
            seed: self.seed.unwrap_or(0),
        }
    }

    pub fn split_spec(&self) -> Result<SplitSpec> {
        let mut spec = SplitSpec::new(self.train_fraction, self.seed.unwrap_or(0))?;
        spec.stratify = self.stratify;
        Ok(spec)
    }

    pub fn metric_options(&self) -> MetricOptions {
        MetricOptions {
            averaging: self.averaging,
            include_o: self.include_o,
        }
    }

    /// Digest of everything that can change outputs; `out_dir` is excluded.
    pub fn digest(&self) -> Result<String> {
        let mut c = self.clone();
        c.out_dir = PathBuf::new();
        c.sequential = false;
        json_digest(&c)
    }

    fn require_seed(&self, command: &str) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Config(format!("`{command}` requires --seed")))
    }

    /// Checks numeric settings and that every referenced input exists.
    pub fn validate(&self) -> Result<()> {
        self.grammar_config().validate()?;
        self.head_config(1, 1).validate()?;
        self.split_spec()?;
        if self.hash_dim == 0 {
            return Err(Error::Config("hash_dim must be at least 1".into()));
        }
        for path in [
            &self.corpus,
            &self.conllu,
            &self.embeddings,
            &self.vectors,
            &self.model,
            &self.standardizer,
            &self.function_words,
        ]
        .into_iter()
        .flatten()
        {
            if !path.exists() {
                return Err(Error::io(
                    path,
                    std::io::Error::new(std::io::ErrorKind::NotFound, "input file does not exist"),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub role: String,
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputDigest {
    pub file: String,
    /// Absent for outputs that carry wall-clock measurements.
    pub sha256: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub grammar_schema: String,
    pub report_schema: String,
    pub config_digest: String,
    pub config: RunConfig,
    pub seeds: BTreeMap<String, u64>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<OutputDigest>,
}

/// What a command did, for the caller to print.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunSummary {
    pub command: String,
    pub outputs: Vec<PathBuf>,
    pub warnings: Vec<String>,
    pub reports: Vec<EvalReport>,
    pub traces: Vec<TrainTrace>,
}

struct Run<'a> {
    command: &'static str,
    config: &'a RunConfig,
    inputs: Vec<FileDigest>,
    outputs: Vec<OutputDigest>,
    seeds: BTreeMap<String, u64>,
    summary: RunSummary,
}

impl<'a> Run<'a> {
    fn start(command: &'static str, config: &'a RunConfig) -> Result<Self> {
        config.validate()?;
        fs::create_dir_all(&config.out_dir).map_err(|e| Error::io(&config.out_dir, e))?;
        let mut seeds = BTreeMap::new();
        if let Some(s) = config.seed {
            seeds.insert("root".to_string(), s);
        }
        Ok(Run {
            command,
            config,
            inputs: Vec::new(),
            outputs: Vec::new(),
            seeds,
            summary: RunSummary {
                command: command.to_string(),
                ..RunSummary::default()
            },
        })
    }

    fn read(&mut self, role: &str, path: &Path) -> Result<()> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        self.inputs.push(FileDigest {
            role: role.to_string(),
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    fn write(&mut self, name: &str, contents: &str, deterministic: bool) -> Result<()> {
        let path = self.config.out_dir.join(name);
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.outputs.push(OutputDigest {
            file: name.to_string(),
            sha256: deterministic.then(|| sha256_hex(contents.as_bytes())),
        });
        self.summary.outputs.push(path);
        Ok(())
    }

    fn finish(mut self) -> Result<RunSummary> {
        let manifest = Manifest {
            tool: "gramfuse".into(),
            version: TOOL_VERSION.into(),
            command: self.command.into(),
            grammar_schema: SCHEMA_VERSION.into(),
            report_schema: REPORT_SCHEMA.into(),
            config_digest: self.config.digest()?,
            config: RunConfig {
                out_dir: PathBuf::new(),
                sequential: false,
                ..self.config.clone()
            },
            seeds: std::mem::take(&mut self.seeds),
            inputs: std::mem::take(&mut self.inputs),
            outputs: std::mem::take(&mut self.outputs),
        };
        let mut text =
            serde_json::to_string_pretty(&manifest).map_err(|e| Error::Input(e.to_string()))?;
        text.push('\n');
        let name = format!("{}_manifest.json", self.command);
        let path = self.config.out_dir.join(&name);
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        self.summary.outputs.push(path);
        Ok(self.summary)
    }

    fn warn(&mut self, w: impl Into<String>) {
        self.summary.warnings.push(w.into());
    }
}

fn warning_text(source: &Path, w: &LoadWarning) -> String {
    format!("{}:{}: {}", source.display(), w.line, w.message)
}

fn detect_format(config: &RunConfig, path: &Path) -> CorpusFormat {
    match config.corpus_format {
        CorpusFormat::Auto => match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => CorpusFormat::Csv,
            Some("conllu") => CorpusFormat::Conllu,
            _ => CorpusFormat::Iob,
        },
        other => other,
    }
}

/// Copies annotations from `annotated` onto documents with the same id.
/// NER tags on `docs` survive when the token forms line up.
fn merge_annotations(
    docs: Vec<AnnotatedDocument>,
    annotated: Vec<AnnotatedDocument>,
) -> Result<Vec<AnnotatedDocument>> {
    let mut by_id: BTreeMap<String, AnnotatedDocument> =
        annotated.into_iter().map(|d| (d.id.clone(), d)).collect();
    let missing: Vec<String> = docs
        .iter()
        .filter(|d| !by_id.contains_key(&d.id))
        .map(|d| d.id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::Input(format!(
            "no CoNLL-U annotation for documents: {}",
            missing.join(", ")
        )));
    }
    docs.into_iter()
        .map(|doc| {
            let mut ann = by_id.remove(&doc.id).expect("checked above");
            if doc.is_annotated() {
                let ours: Vec<&str> = doc.tokens().map(|t| t.form.as_str()).collect();
                let theirs: Vec<&str> = ann.tokens().map(|t| t.form.as_str()).collect();
                if ours != theirs {
                    return Err(Error::Input(format!(
                        "CoNLL-U tokens of document {} do not match the corpus",
                        doc.id
                    )));
                }
                let tags: Vec<Option<String>> = doc.tokens().map(|t| t.ner.clone()).collect();
                let slots = ann.sentences.iter_mut().flat_map(|s| s.tokens.iter_mut());
                for (t, tag) in slots.zip(tags) {
                    if tag.is_some() {
                        t.ner = tag;
                    }
                }
            }
            if doc.label.is_some() {
                ann.label = doc.label;
            }
            ann.text = doc.text;
            Ok(ann)
        })
        .collect()
}

/// Loads the corpus, applies CoNLL-U annotations and the fallback annotator.
fn load_corpus(run: &mut Run<'_>) -> Result<Vec<AnnotatedDocument>> {
    let config = run.config;
    let path = config
        .corpus
        .as_deref()
        .ok_or_else(|| Error::Config("--corpus is required".into()))?;
    run.read("corpus", path)?;
    let mut docs = match detect_format(config, path) {
        CorpusFormat::Csv => {
            let mut cols = CsvColumns::new(&config.text_column, &config.label_column);
            cols.id = config.id_column.clone();
            let loaded = load_classification_csv(path, &cols)?;
            for w in &loaded.report.warnings {
                run.warn(warning_text(path, w));
            }
            loaded.documents
        }
        CorpusFormat::Iob => {
            let loaded = load_ner_iob(path)?;
            for w in &loaded.report.warnings {
                run.warn(warning_text(path, w));
            }
            loaded.documents
        }
        CorpusFormat::Conllu | CorpusFormat::Auto => load_conllu(path)?,
    };
    if let Some(ann_path) = &config.conllu {
        run.read("conllu", ann_path)?;
        docs = merge_annotations(docs, load_conllu(ann_path)?)?;
    }

    let annotator = Annotator::default();
    let (mut docs, dropped) = annotator.annotate_all(&docs, config.execution());
    for id in dropped {
        run.warn(format!(
            "document {id} has no tokens after cleaning; dropped"
        ));
    }
    if config.parse_fallback {
        for doc in &mut docs {
            for s in &mut doc.sentences {
                if !s.has_parse {
                    let tokens = std::mem::take(&mut s.tokens);
                    *s = heuristic_parse(s.id.clone(), tokens);
                }
            }
        }
    }
    if docs.is_empty() {
        return Err(Error::Size("corpus has no usable documents".into()));
    }
    Ok(docs)
}

fn function_words(run: &mut Run<'_>) -> Result<FunctionWordSet> {
    match &run.config.function_words {
        Some(p) => {
            run.read("function_words", p)?;
            FunctionWordSet::load(p)
        }
        None => Ok(FunctionWordSet::builtin()),
    }
}

fn embeddings_for(run: &mut Run<'_>, docs: &[AnnotatedDocument]) -> Result<EmbeddingSet> {
    match &run.config.embeddings {
        Some(p) => {
            run.read("embeddings", p)?;
            load_embeddings(p)
        }
        None => {
            let seed = run.config.seed.unwrap_or(0);
            run.seeds.insert("hash_embed".into(), seed);
            hash_embed_all(docs, run.config.hash_dim, seed, run.config.execution())
        }
    }
}

fn label_set(task: Task, docs: &[AnnotatedDocument]) -> Result<LabelSet> {
    match task {
        Task::Classify => LabelSet::from_documents(docs),
        Task::Ner => LabelSet::from_token_tags(docs),
    }
}

fn render_reports(run: &mut Run<'_>, stem: &str, reports: &[EvalReport]) -> Result<()> {
    for &format in &run.config.formats {
        let text = render_report(reports, format)?;
        run.write(&format!("{stem}.{}", format.extension()), &text, true)?;
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Input(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes `grammar.csv`.
pub fn run_extract(config: &RunConfig) -> Result<RunSummary> {
    let mut run = Run::start("extract", config)?;
    let docs = load_corpus(&mut run)?;
    let fset = function_words(&mut run)?;
    let vectors = extract_all(&docs, &fset, &config.grammar_config(), config.execution())?;
    run.write("grammar.csv", &render_vectors_csv(&vectors)?, true)?;
    run.finish()
}

/// Writes `fused.emb` (EMB1, width `d_b + 18`) and `standardizer.csv`.
pub fn run_fuse(config: &RunConfig) -> Result<RunSummary> {
    let mut run = Run::start("fuse", config)?;
    let docs = load_corpus(&mut run)?;
    let vectors: Vec<GrammarVector> = match &config.vectors {
        Some(p) => {
            run.read("vectors", p)?;
            let all: BTreeMap<String, GrammarVector> = read_vectors_csv(p)?
                .into_iter()
                .map(|v| (v.doc_id.clone(), v))
                .collect();
            let missing: Vec<String> = docs
                .iter()
                .filter(|d| !all.contains_key(&d.id))
                .map(|d| d.id.clone())
                .collect();
            if !missing.is_empty() {
                return Err(Error::Input(format!(
                    "no grammar vector for documents: {}",
                    missing.join(", ")
                )));
            }
            docs.iter().map(|d| all[&d.id].clone()).collect()
        }
        None => {
            let fset = function_words(&mut run)?;
            extract_all(&docs, &fset, &config.grammar_config(), config.execution())?
        }
    };
    let embeddings = embeddings_for(&mut run, &docs)?;
    check_coverage(config.task, &docs, &embeddings)?;
    let standardizer = match &config.standardizer {
        Some(p) => {
            run.read("standardizer", p)?;
            Standardizer::load(p)?
        }
        None => fit_standardizer(&vectors)?,
    };
    let fused: Vec<EmbeddingMatrix> = docs
        .iter()
        .zip(&vectors)
        .map(|(d, v)| {
            let z = standardizer.transform(&v.values)?;
            let rows = feature_rows(
                config.task,
                FeatureMode::Fused,
                &embeddings.records[&d.id],
                &z,
                Pooling::Mean,
            )?;
            Ok(EmbeddingMatrix::new(d.id.clone(), rows))
        })
        .collect::<Result<_>>()?;
    let width = embeddings.dim + GRAMMAR_DIM;
    run.write("fused.emb", &render_embeddings(width, fused.iter())?, true)?;
    run.write("standardizer.csv", &standardizer.render_csv()?, true)?;
    run.finish()
}

#[derive(Serialize, Deserialize)]
struct SplitRecord {
    seed: u64,
    train_fraction: f64,
    stratify: bool,
    digest: String,
    train: Vec<String>,
    test: Vec<String>,
}

struct Prepared {
    docs: Vec<AnnotatedDocument>,
    z: Vec<[f64; GRAMMAR_DIM]>,
    embeddings: EmbeddingSet,
    train: Vec<usize>,
    test: Vec<usize>,
    standardizer: Standardizer,
}

/// Shared by `train` and `eval`: corpus, vectors, embeddings and split.
fn prepare(run: &mut Run<'_>, standardizer: Option<Standardizer>) -> Result<Prepared> {
    let config = run.config;
    let seed = config.require_seed(run.command)?;
    run.seeds.insert("split".into(), seed);
    let docs = load_corpus(run)?;
    let fset = function_words(run)?;
    let vectors = extract_all(&docs, &fset, &config.grammar_config(), config.execution())?;
    let embeddings = embeddings_for(run, &docs)?;
    check_coverage(config.task, &docs, &embeddings)?;
    let (train, test) = split_indices(&docs, &config.split_spec()?)?;
    let standardizer = match standardizer {
        Some(s) => s,
        None => {
            let tv: Vec<GrammarVector> = train.iter().map(|&i| vectors[i].clone()).collect();
            fit_standardizer(&tv)?
        }
    };
    let z = vectors
        .iter()
        .map(|v| standardizer.transform(&v.values))
        .collect::<Result<_>>()?;
    Ok(Prepared {
        docs,
        z,
        embeddings,
        train,
        test,
        standardizer,
    })
}

impl Prepared {
    fn subset(&self, idx: &[usize]) -> (Vec<&AnnotatedDocument>, Vec<[f64; GRAMMAR_DIM]>) {
        (
            idx.iter().map(|&i| &self.docs[i]).collect(),
            idx.iter().map(|&i| self.z[i]).collect(),
        )
    }

    fn ids(&self, idx: &[usize]) -> Vec<String> {
        idx.iter().map(|&i| self.docs[i].id.clone()).collect()
    }

    fn split_digest(&self) -> String {
        let train = self.ids(&self.train);
        let test = self.ids(&self.test);
        let t: Vec<&str> = train.iter().map(String::as_str).collect();
        let s: Vec<&str> = test.iter().map(String::as_str).collect();
        split_digest(&t, &s)
    }
}

/// Writes `model.gfh`, `standardizer.csv`, `split.json` and `train_trace.json`.
pub fn run_train(config: &RunConfig) -> Result<RunSummary> {
    let mut run = Run::start("train", config)?;
    let prep = prepare(&mut run, None)?;
    let seed = config.require_seed("train")?;
    run.seeds.insert("head".into(), seed);
    let labels = label_set(config.task, &prep.docs)?;
    let (docs, z) = prep.subset(&prep.train);
    let data = build_dataset(
        config.task,
        config.mode,
        &docs,
        &z,
        &prep.embeddings,
        &labels,
        Pooling::Mean,
        config.execution(),
    )?;
    let head_cfg = config.head_config(data.x.cols(), labels.len());
    let (head, trace) = train(init_head(head_cfg)?, &data)?;

    let mut model = ModelFile::new(head);
    model.labels = labels.names().to_vec();
    for (k, v) in [
        ("task", config.task.to_string()),
        ("mode", config.mode.to_string()),
        ("embedding_dim", prep.embeddings.dim.to_string()),
        ("pooling", "mean".to_string()),
    ] {
        model.meta.insert(k.to_string(), v);
    }
    run.write("model.gfh", &model.render()?, true)?;
    run.write("standardizer.csv", &prep.standardizer.render_csv()?, true)?;
    let split = SplitRecord {
        seed,
        train_fraction: config.train_fraction,
        stratify: config.stratify,
        digest: prep.split_digest(),
        train: prep.ids(&prep.train),
        test: prep.ids(&prep.test),
    };
    run.write("split.json", &to_json(&split)?, true)?;
    run.write("train_trace.json", &to_json(&trace)?, false)?;
    run.summary.traces.push(trace);
    run.finish()
}

/// Scores a trained model on the test side of the split; writes
/// `eval_report.{json,md,csv}`.
pub fn run_eval(config: &RunConfig) -> Result<RunSummary> {
    let mut run = Run::start("eval", config)?;
    let model_path = config
        .model
        .clone()
        .unwrap_or_else(|| config.out_dir.join("model.gfh"));
    let std_path = config
        .standardizer
        .clone()
        .unwrap_or_else(|| config.out_dir.join("standardizer.csv"));
    run.read("model", &model_path)?;
    run.read("standardizer", &std_path)?;
    let model = ModelFile::load(&model_path)?;
    let standardizer = Standardizer::load(&std_path)?;
    let mode: FeatureMode = match model.meta.get("mode") {
        Some(m) => m.parse()?,
        None => config.mode,
    };
    let task: Task = match model.meta.get("task") {
        Some(t) => t.parse()?,
        None => config.task,
    };
    if task != config.task {
        return Err(Error::Config(format!(
            "model was trained for task `{task}`, run is `{}`",
            config.task
        )));
    }
    let kind = match task {
        Task::Classify => LabelKind::DocumentClass,
        Task::Ner => LabelKind::TokenTag,
    };
    let labels = LabelSet::new(model.labels.clone(), kind)?;

    let prep = prepare(&mut run, Some(standardizer))?;
    let (docs, z) = prep.subset(&prep.test);
    let data = build_dataset(
        task,
        mode,
        &docs,
        &z,
        &prep.embeddings,
        &labels,
        Pooling::Mean,
        config.execution(),
    )?;
    let (confusion, metrics) = evaluate(&model.head, &data, &labels, config.metric_options())?;
    let parse_quality = prep
        .docs
        .iter()
        .map(|d| d.parse_quality())
        .min()
        .expect("corpus is non-empty");
    let report = EvalReport {
        schema_version: REPORT_SCHEMA.to_string(),
        model: model_name(&model.head.config),
        mode,
        task,
        parse_quality,
        seed: config.seed.unwrap_or(0),
        config_digest: config.digest()?,
        split_digest: prep.split_digest(),
        train_size: prep.train.len(),
        test_size: prep.test.len(),
        metrics,
        confusion,
    };
    let reports = vec![report];
    render_reports(&mut run, "eval_report", &reports)?;
    run.summary.reports = reports;
    run.finish()
}

/// Grammar-only, embedding-only and fused heads on one split; writes
/// `ablation_report.{json,md,csv}` and `ablation_traces.json`.
pub fn run_ablate(config: &RunConfig) -> Result<RunSummary> {
    let mut run = Run::start("ablate", config)?;
    let seed = config.require_seed("ablate")?;
    for k in ["split", "head"] {
        run.seeds.insert(k.into(), seed);
    }
    let docs = load_corpus(&mut run)?;
    let fset = function_words(&mut run)?;
    let embeddings = embeddings_for(&mut run, &docs)?;
    let labels = label_set(config.task, &docs)?;
    let ab_cfg = AblationConfig {
        task: config.task,
        seed,
        split: config.split_spec()?,
        head: config.head_config(1, labels.len()),
        grammar: config.grammar_config(),
        metrics: config.metric_options(),
        pooling: Pooling::Mean,
    };
    let ablation = ablate(
        &docs,
        &embeddings,
        &labels,
        &fset,
        &ab_cfg,
        config.execution(),
    )?;
    render_reports(&mut run, "ablation_report", &ablation.reports)?;
    run.write("ablation_traces.json", &to_json(&ablation.traces)?, false)?;
    run.summary.reports = ablation.reports;
    run.summary.traces = ablation.traces;
    run.finish()
}

/// Reads a manifest written by any command.
pub fn read_manifest(path: impl AsRef<Path>) -> Result<Manifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::format(e.line(), e.to_string()))
}
