//! End-to-end runs of the pipeline commands on temporary corpora.

mod common;

use std::fs;
use std::path::{Path, PathBuf};

use gramfuse::corpus::write_conllu;
use gramfuse::digest::sha256_hex;
use gramfuse::eval::{parse_json_report, FeatureMode, Task};
use gramfuse::grammar::{extract, read_vectors_csv, FunctionWordSet, GrammarConfig};
use gramfuse::pipeline::{
    read_manifest, run_ablate, run_eval, run_extract, run_fuse, run_train, CorpusFormat, RunConfig,
};
use gramfuse::synthetic::{generate, SyntheticSpec};
use gramfuse::Error;

use common::fixture;

fn synthetic_corpus(dir: &Path, documents: usize) -> PathBuf {
    let docs = generate(&SyntheticSpec {
        documents,
        seed: 5,
        ..SyntheticSpec::default()
    })
    .unwrap();
    let path = dir.join("synthetic.conllu");
    write_conllu(&docs, &path).unwrap();
    path
}

fn config(corpus: PathBuf, out_dir: PathBuf) -> RunConfig {
    RunConfig {
        corpus: Some(corpus),
        corpus_format: CorpusFormat::Conllu,
        seed: Some(11),
        out_dir,
        ..RunConfig::default()
    }
}

fn ner_corpus(dir: &Path) -> PathBuf {
    let mut text = String::from("sentence_id\tword\tpos\ttag\n");
    let people = ["John", "Mary", "Ahmed", "Lena"];
    let places = ["Paris", "Lagos", "Oslo", "Lima"];
    for i in 0..40 {
        let (p, c) = (people[i % 4], places[(i / 4) % 4]);
        text.push_str(&format!("Sentence: {i}\t{p}\tNNP\tB-per\n"));
        text.push_str("\tvisited\tVBD\tO\n");
        text.push_str(&format!("\t{c}\tNNP\tB-geo\n"));
        text.push_str("\tyesterday\tNN\tO\n\t.\t.\tO\n");
    }
    let path = dir.join("ner.tsv");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn extract_writes_the_vectors_of_every_document() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(fixture("gold.conllu"), dir.path().join("out"));
    let summary = run_extract(&cfg).unwrap();
    assert_eq!(summary.command, "extract");
    let vectors = read_vectors_csv(dir.path().join("out/grammar.csv")).unwrap();
    let docs = gramfuse::corpus::load_conllu(fixture("gold.conllu")).unwrap();
    assert_eq!(vectors.len(), docs.len());
    for (v, d) in vectors.iter().zip(&docs) {
        let want = extract(d, &FunctionWordSet::builtin(), &GrammarConfig::default()).unwrap();
        assert_eq!(*v, want);
    }
}

#[test]
fn manifest_records_seeds_and_digests() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synthetic_corpus(dir.path(), 60);
    let out = dir.path().join("out");
    run_train(&config(corpus.clone(), out.clone())).unwrap();
    let m = read_manifest(out.join("train_manifest.json")).unwrap();
    assert_eq!(m.command, "train");
    assert_eq!(m.grammar_schema, "grammar-v1");
    for key in ["split", "head", "hash_embed"] {
        assert_eq!(m.seeds.get(key), Some(&11), "seed {key}");
    }
    let input = m.inputs.iter().find(|i| i.role == "corpus").unwrap();
    assert_eq!(input.sha256, sha256_hex(&fs::read(&corpus).unwrap()));
    for o in &m.outputs {
        match &o.sha256 {
            Some(d) => assert_eq!(
                *d,
                sha256_hex(&fs::read(out.join(&o.file)).unwrap()),
                "{}",
                o.file
            ),
            None => assert_eq!(o.file, "train_trace.json"),
        }
    }
    assert_eq!(
        m.config_digest,
        config(corpus, PathBuf::from("elsewhere")).digest().unwrap()
    );
}

#[test]
fn eval_of_a_trained_model_matches_the_ablation_leg() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synthetic_corpus(dir.path(), 120);
    let out = dir.path().join("out");
    let cfg = config(corpus, out.clone());
    run_train(&cfg).unwrap();
    let eval = run_eval(&cfg).unwrap();
    let ablation = run_ablate(&RunConfig {
        out_dir: dir.path().join("ab"),
        ..cfg
    })
    .unwrap();
    let fused = ablation
        .reports
        .iter()
        .find(|r| r.mode == FeatureMode::Fused)
        .unwrap();
    assert_eq!(eval.reports.len(), 1);
    assert_eq!(eval.reports[0].split_digest, fused.split_digest);
    assert_eq!(eval.reports[0].confusion, fused.confusion);
    assert_eq!(eval.reports[0].metrics, fused.metrics);
    let on_disk =
        parse_json_report(&fs::read_to_string(out.join("eval_report.json")).unwrap()).unwrap();
    assert_eq!(on_disk, eval.reports);
}

#[test]
fn ablation_legs_share_one_split_and_keep_mode_order() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synthetic_corpus(dir.path(), 80);
    let summary = run_ablate(&config(corpus, dir.path().join("out"))).unwrap();
    let modes: Vec<_> = summary.reports.iter().map(|r| r.mode).collect();
    assert_eq!(modes, FeatureMode::ALL);
    let digests: Vec<_> = summary
        .reports
        .iter()
        .map(|r| r.split_digest.as_str())
        .collect();
    assert!(digests.iter().all(|d| *d == digests[0]));
    assert!(summary
        .reports
        .iter()
        .all(|r| r.train_size == 64 && r.test_size == 16));
}

#[test]
fn sequential_and_parallel_runs_write_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synthetic_corpus(dir.path(), 80);
    let par = config(corpus.clone(), dir.path().join("par"));
    let seq = RunConfig {
        sequential: true,
        ..config(corpus, dir.path().join("seq"))
    };
    run_ablate(&par).unwrap();
    run_ablate(&seq).unwrap();
    for f in [
        "ablation_report.json",
        "ablation_report.md",
        "ablation_report.csv",
        "ablate_manifest.json",
    ] {
        assert_eq!(
            fs::read(par.out_dir.join(f)).unwrap(),
            fs::read(seq.out_dir.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn fuse_from_saved_vectors_matches_fresh_extraction() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synthetic_corpus(dir.path(), 30);
    let base = config(corpus, dir.path().join("a"));
    run_extract(&base).unwrap();
    run_fuse(&base).unwrap();
    let reuse = RunConfig {
        vectors: Some(base.out_dir.join("grammar.csv")),
        out_dir: dir.path().join("b"),
        ..base.clone()
    };
    run_fuse(&reuse).unwrap();
    assert_eq!(
        fs::read(base.out_dir.join("fused.emb")).unwrap(),
        fs::read(reuse.out_dir.join("fused.emb")).unwrap()
    );
}

#[test]
fn ner_ablation_excludes_o_by_default() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        task: Task::Ner,
        corpus: Some(ner_corpus(dir.path())),
        corpus_format: CorpusFormat::Iob,
        seed: Some(3),
        out_dir: dir.path().join("out"),
        ..RunConfig::default()
    };
    let summary = run_ablate(&cfg).unwrap();
    assert_eq!(summary.reports.len(), 3);
    for r in &summary.reports {
        assert!(!r.metrics.include_o);
        assert!(!r.metrics.averaged_over.iter().any(|l| l == "O"));
        assert_eq!(r.task, Task::Ner);
    }
    let md = fs::read_to_string(cfg.out_dir.join("ablation_report.md")).unwrap();
    assert!(md.contains("O excluded"));
}

#[test]
fn missing_seed_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        seed: None,
        ..config(synthetic_corpus(dir.path(), 10), dir.path().join("o"))
    };
    let err = run_ablate(&cfg).unwrap_err();
    assert!(matches!(err, Error::Config(_)));
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn exploding_learning_rate_is_a_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        learning_rate: 1e300,
        ..config(synthetic_corpus(dir.path(), 40), dir.path().join("o"))
    };
    let err = run_train(&cfg).unwrap_err();
    assert!(matches!(err, Error::Divergence { .. }), "{err}");
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn corrupt_corpus_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.conllu");
    fs::write(&bad, "1\tdogs\tdog\tNOUN\tNNS\t_\t9\troot\t_\t_\n").unwrap();
    let err = run_extract(&config(bad, dir.path().join("o"))).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}
