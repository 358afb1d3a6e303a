//! `gramfuse` command-line driver.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data or format
//! error, 3 numerical divergence during training.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gramfuse::eval::{render_report, Averaging, FeatureMode, ReportFormat, Task};
use gramfuse::pipeline::{
    run_ablate, run_eval, run_extract, run_fuse, run_train, CorpusFormat, RunConfig, RunSummary,
};

#[derive(Parser, Debug)]
#[command(
    name = "gramfuse",
    version,
    about = "Grammar feature extraction, embedding fusion and ablation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute the 18-value grammar vector of every document.
    Extract {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Concatenate embeddings with standardized grammar vectors.
    Fuse {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        embed: EmbedArgs,
        /// Grammar vector CSV from `extract` (default: extract now).
        #[arg(long)]
        vectors: Option<PathBuf>,
        /// Standardizer CSV (default: fit on all documents).
        #[arg(long)]
        standardizer: Option<PathBuf>,
    },
    /// Train a head on the training side of the split.
    Train {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        embed: EmbedArgs,
        #[command(flatten)]
        head: HeadArgs,
    },
    /// Score a trained head on the test side of the split.
    Eval {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        embed: EmbedArgs,
        #[command(flatten)]
        head: HeadArgs,
        #[command(flatten)]
        metrics: MetricArgs,
        /// Model file (default: <out-dir>/model.gfh).
        #[arg(long)]
        model: Option<PathBuf>,
        /// Standardizer CSV (default: <out-dir>/standardizer.csv).
        #[arg(long)]
        standardizer: Option<PathBuf>,
    },
    /// Grammar-only, embedding-only and fused heads on one shared split.
    Ablate {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        embed: EmbedArgs,
        #[command(flatten)]
        head: HeadArgs,
        #[command(flatten)]
        metrics: MetricArgs,
    },
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// TOML file with run settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Root seed for splits, initialization and hash embeddings.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for outputs and the run manifest.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// classify or ner.
    #[arg(long)]
    task: Option<Task>,
    /// Corpus file: classification CSV, IOB NER file or CoNLL-U.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// auto, csv, iob or conllu.
    #[arg(long)]
    corpus_format: Option<CorpusFormat>,
    /// CoNLL-U annotations matched to corpus documents by id.
    #[arg(long)]
    conllu: Option<PathBuf>,
    /// Function word list, one word per line.
    #[arg(long)]
    function_words: Option<PathBuf>,
    /// CSV text column.
    #[arg(long)]
    text_column: Option<String>,
    /// CSV label column.
    #[arg(long)]
    label_column: Option<String>,
    /// CSV document id column.
    #[arg(long)]
    id_column: Option<String>,
    /// Keep sentences without a dependency tree unparsed.
    #[arg(long)]
    no_parse_fallback: bool,
    /// Count a noun phrase only when it contains a NOUN or PROPN.
    #[arg(long)]
    np_requires_noun: bool,
    /// Upper clamp for the adverb/verb ratio.
    #[arg(long)]
    advverb_cap: Option<f64>,
    /// Smoothing added to the verb count of the adverb/verb ratio.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Run document-level work on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args, Debug)]
struct EmbedArgs {
    /// EMB1 embeddings file (default: hash embeddings).
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Dimension of the hash embeddings.
    #[arg(long)]
    hash_dim: Option<usize>,
}

#[derive(Args, Debug)]
struct HeadArgs {
    /// grammar-only, embedding-only or fused.
    #[arg(long)]
    mode: Option<FeatureMode>,
    /// Fraction of documents on the training side.
    #[arg(long)]
    train_fraction: Option<f64>,
    /// Split each label group separately.
    #[arg(long)]
    stratify: bool,
    /// Hidden layer width; 0 trains a linear softmax head.
    #[arg(long)]
    hidden_dim: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    /// L2 penalty on weights.
    #[arg(long)]
    l2: Option<f64>,
}

#[derive(Args, Debug)]
struct MetricArgs {
    /// macro or micro.
    #[arg(long)]
    averaging: Option<Averaging>,
    /// Count the O tag in aggregated NER metrics.
    #[arg(long)]
    include_o: bool,
    /// Report formats, comma separated: json, markdown, csv.
    #[arg(long, value_delimiter = ',')]
    format: Option<Vec<ReportFormat>>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl CommonArgs {
    fn apply(self, c: &mut RunConfig) {
        set(&mut c.seed, self.seed.map(Some));
        set(&mut c.out_dir, self.out_dir);
        set(&mut c.task, self.task);
        set(&mut c.corpus, self.corpus.map(Some));
        set(&mut c.corpus_format, self.corpus_format);
        set(&mut c.conllu, self.conllu.map(Some));
        set(&mut c.function_words, self.function_words.map(Some));
        set(&mut c.text_column, self.text_column);
        set(&mut c.label_column, self.label_column);
        set(&mut c.id_column, self.id_column.map(Some));
        set(&mut c.advverb_cap, self.advverb_cap);
        set(&mut c.epsilon, self.epsilon);
        c.parse_fallback &= !self.no_parse_fallback;
        c.np_requires_noun |= self.np_requires_noun;
        c.sequential |= self.sequential;
    }
}

impl EmbedArgs {
    fn apply(self, c: &mut RunConfig) {
        set(&mut c.embeddings, self.embeddings.map(Some));
        set(&mut c.hash_dim, self.hash_dim);
    }
}

impl HeadArgs {
    fn apply(self, c: &mut RunConfig) {
        set(&mut c.mode, self.mode);
        set(&mut c.train_fraction, self.train_fraction);
        set(&mut c.hidden_dim, self.hidden_dim);
        set(&mut c.learning_rate, self.learning_rate);
        set(&mut c.epochs, self.epochs);
        set(&mut c.batch_size, self.batch_size);
        set(&mut c.l2, self.l2);
        c.stratify |= self.stratify;
    }
}

impl MetricArgs {
    fn apply(self, c: &mut RunConfig) {
        set(&mut c.averaging, self.averaging);
        set(&mut c.formats, self.format);
        c.include_o |= self.include_o;
    }
}

enum Failure {
    Usage(String),
    Run(gramfuse::Error),
}

fn base_config(path: Option<&PathBuf>) -> Result<RunConfig, Failure> {
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| Failure::Usage(format!("invalid config {}: {e}", path.display())))
}

fn execute(command: Command) -> Result<RunSummary, Failure> {
    let run = |f: fn(&RunConfig) -> gramfuse::Result<RunSummary>, c: RunConfig| {
        f(&c).map_err(Failure::Run)
    };
    match command {
        Command::Extract { common } => {
            let mut c = base_config(common.config.as_ref())?;
            common.apply(&mut c);
            run(run_extract, c)
        }
        Command::Fuse {
            common,
            embed,
            vectors,
            standardizer,
        } => {
            let mut c = base_config(common.config.as_ref())?;
            common.apply(&mut c);
            embed.apply(&mut c);
            set(&mut c.vectors, vectors.map(Some));
            set(&mut c.standardizer, standardizer.map(Some));
            run(run_fuse, c)
        }
        Command::Train {
            common,
            embed,
            head,
        } => {
            let mut c = base_config(common.config.as_ref())?;
            common.apply(&mut c);
            embed.apply(&mut c);
            head.apply(&mut c);
            run(run_train, c)
        }
        Command::Eval {
            common,
            embed,
            head,
            metrics,
            model,
            standardizer,
        } => {
            let mut c = base_config(common.config.as_ref())?;
            common.apply(&mut c);
            embed.apply(&mut c);
            head.apply(&mut c);
            metrics.apply(&mut c);
            set(&mut c.model, model.map(Some));
            set(&mut c.standardizer, standardizer.map(Some));
            run(run_eval, c)
        }
        Command::Ablate {
            common,
            embed,
            head,
            metrics,
        } => {
            let mut c = base_config(common.config.as_ref())?;
            common.apply(&mut c);
            embed.apply(&mut c);
            head.apply(&mut c);
            metrics.apply(&mut c);
            run(run_ablate, c)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(summary) => {
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
            if !summary.reports.is_empty() {
                if let Ok(table) = render_report(&summary.reports, ReportFormat::Markdown) {
                    print!("{table}");
                }
            }
            for p in &summary.outputs {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
