//! Brute-force oracles and random generators shared by the integration tests.
//!
//! Everything here is written from the feature and metric definitions
//! directly, with plain loops, and does not call the code under test except
//! to read its public data types.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::HashSet;
use std::path::PathBuf;

use gramfuse::corpus::{
    AnnotatedDocument, AnnotatedSentence, Head as TreeHead, ParseQuality, Token,
};
use gramfuse::matrix::Matrix;
use gramfuse::model::{Head, HeadConfig, Layer};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).expect("fixture exists")
}

/// One token as the oracle sees it. `head` is 1-based, 0 for the root.
#[derive(Clone, Debug, PartialEq)]
pub struct RawToken {
    pub form: String,
    pub upos: String,
    pub xpos: String,
    pub head: usize,
    pub dep: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawDoc {
    pub id: String,
    pub sentences: Vec<Vec<RawToken>>,
    /// False when any sentence lacks a dependency tree.
    pub parsed: bool,
}

/// Naive CoNLL-U reader: `# newdoc id` starts a document, integer ids only.
pub fn raw_conllu(text: &str) -> Vec<RawDoc> {
    let mut docs: Vec<RawDoc> = Vec::new();
    let mut sentence: Vec<RawToken> = Vec::new();
    for line in text.lines().chain(std::iter::once("")) {
        if let Some(id) = line.strip_prefix("# newdoc id = ") {
            docs.push(RawDoc {
                id: id.trim().to_string(),
                sentences: Vec::new(),
                parsed: true,
            });
        } else if line.starts_with('#') {
            continue;
        } else if line.trim().is_empty() {
            if !sentence.is_empty() {
                docs.last_mut()
                    .expect("newdoc first")
                    .sentences
                    .push(std::mem::take(&mut sentence));
            }
        } else {
            let f: Vec<&str> = line.split('\t').collect();
            if f[0].contains('-') || f[0].contains('.') {
                continue;
            }
            if f[6] == "_" {
                docs.last_mut().expect("newdoc first").parsed = false;
            }
            sentence.push(RawToken {
                form: f[1].to_string(),
                upos: f[3].to_string(),
                xpos: f[4].to_string(),
                head: f[6].parse().unwrap_or(0),
                dep: f[7].to_string(),
            });
        }
    }
    docs
}

pub fn raw_from_doc(doc: &AnnotatedDocument) -> RawDoc {
    RawDoc {
        id: doc.id.clone(),
        parsed: doc
            .sentences
            .iter()
            .all(|s| s.parse_quality != ParseQuality::None),
        sentences: doc
            .sentences
            .iter()
            .map(|s| {
                s.tokens
                    .iter()
                    .map(|t| RawToken {
                        form: t.form.clone(),
                        upos: t.upos.clone(),
                        xpos: t.xpos.clone().unwrap_or_default(),
                        head: match t.head {
                            TreeHead::Root => 0,
                            TreeHead::Index(i) => i + 1,
                        },
                        dep: t.dep.clone().unwrap_or_default(),
                    })
                    .collect()
            })
            .collect(),
    }
}

pub fn builtin_function_words() -> HashSet<String> {
    include_str!("../../data/function_words.txt")
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

const P: [&str; 10] = [
    "NOUN", "VERB", "ADJ", "ADV", "PRON", "PROPN", "ADP", "DET", "NUM", "CCONJ",
];
const NP: [&str; 3] = ["NOUN", "PROPN", "ADJ"];
const VP: [&str; 4] = ["AUX", "VERB", "ADV", "PART"];
const C: [&str; 6] = ["csubj", "csubjpass", "ccomp", "advcl", "acl", "xcomp"];

fn base_label(dep: &str) -> String {
    dep.split(':').next().unwrap_or("").trim().to_lowercase()
}

fn auxpass(dep: &str) -> bool {
    let d = dep.trim().to_lowercase();
    d == "auxpass" || d == "aux:pass"
}

fn runs(tokens: &[RawToken], set: &[&str]) -> usize {
    let mut n = 0;
    for i in 0..tokens.len() {
        let inside = set.contains(&tokens[i].upos.as_str());
        let prev_inside = i > 0 && set.contains(&tokens[i - 1].upos.as_str());
        if inside && !prev_inside {
            n += 1;
        }
    }
    n
}

/// The 18 features by direct transcription of their definitions.
pub fn oracle_vector(doc: &RawDoc, fwords: &HashSet<String>, cap: f64, eps: f64) -> [f64; 18] {
    let all: Vec<&RawToken> = doc.sentences.iter().flatten().collect();
    let mut v = [0.0; 18];

    let denom = all.iter().filter(|t| P.contains(&t.upos.as_str())).count();
    for (k, p) in P.iter().enumerate() {
        let num = all.iter().filter(|t| t.upos == *p).count();
        v[k] = if denom == 0 {
            0.0
        } else {
            num as f64 / denom as f64
        };
    }

    let mut lengths = 0usize;
    for s in &doc.sentences {
        lengths += s.len();
    }
    v[10] = lengths as f64 / doc.sentences.len() as f64;

    let fw = all
        .iter()
        .filter(|t| fwords.contains(&t.form.to_lowercase()))
        .count();
    v[11] = fw as f64 / all.len() as f64;

    v[12] = doc.sentences.iter().map(|s| runs(s, &NP)).sum::<usize>() as f64;
    v[13] = doc.sentences.iter().map(|s| runs(s, &VP)).sum::<usize>() as f64;

    v[14] = if doc.parsed {
        all.iter()
            .filter(|t| C.contains(&base_label(&t.dep).as_str()))
            .count() as f64
    } else {
        0.0
    };

    let adv = all.iter().filter(|t| t.upos == "ADV").count() as f64;
    let verb = all.iter().filter(|t| t.upos == "VERB").count() as f64;
    v[15] = (adv / (verb + eps)).clamp(0.0, cap);

    let mut verbs = 0;
    let mut passive = 0;
    for s in &doc.sentences {
        for (i, t) in s.iter().enumerate() {
            if t.upos != "VERB" {
                continue;
            }
            verbs += 1;
            let mut governs = false;
            for d in s {
                if d.head == i + 1 && auxpass(&d.dep) {
                    governs = true;
                }
            }
            if t.xpos == "VBN" || auxpass(&t.dep) || governs {
                passive += 1;
            }
        }
    }
    v[16] = if verbs == 0 {
        0.0
    } else {
        passive as f64 / verbs as f64
    };

    let mut total = 0usize;
    let mut count = 0usize;
    for s in &doc.sentences {
        for t in s {
            let mut d = 1;
            let mut h = t.head;
            let mut guard = 0;
            while h != 0 {
                d += 1;
                h = s[h - 1].head;
                guard += 1;
                assert!(guard <= s.len(), "cycle in oracle input");
            }
            total += d;
            count += 1;
        }
    }
    v[17] = if count == 0 {
        0.0
    } else {
        total as f64 / count as f64
    };
    v
}

const UPOS: [&str; 17] = [
    "NOUN", "VERB", "ADJ", "ADV", "PRON", "PROPN", "ADP", "DET", "NUM", "CCONJ", "AUX", "PART",
    "PUNCT", "SCONJ", "INTJ", "SYM", "X",
];
const XPOS: [&str; 8] = ["VBN", "VBD", "VB", "NN", "JJ", "RB", "DT", "IN"];
const DEPS: [&str; 16] = [
    "nsubj",
    "obj",
    "amod",
    "advmod",
    "det",
    "case",
    "aux",
    "aux:pass",
    "auxpass",
    "ACL:relcl",
    "acl",
    "advcl",
    "ccomp",
    "xcomp",
    "csubj:pass",
    "conj",
];
const FORMS: [&str; 14] = [
    "The", "the", "dog", "And", "ran", "quickly", "was", "it", "OF", "report", "seen", "to", ".",
    "Paris",
];

/// Random token tree: a root, then each other token attaches to an already
/// attached one.
fn random_heads(rng: &mut impl Rng, n: usize) -> Vec<TreeHead> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut heads = vec![TreeHead::Root; n];
    for k in 1..n {
        let parent = order[rng.gen_range(0..k)];
        heads[order[k]] = TreeHead::Index(parent);
    }
    heads
}

/// A valid annotated document with 1-4 sentences of 1-12 tokens.
pub fn random_doc(rng: &mut impl Rng, id: usize) -> AnnotatedDocument {
    let n_sent = rng.gen_range(1..=4);
    let sentences = (0..n_sent)
        .map(|s| {
            let n = rng.gen_range(1..=12);
            let parsed = rng.gen_bool(0.85);
            let heads = random_heads(rng, n);
            let tokens: Vec<Token> = (0..n)
                .map(|i| {
                    let mut t = Token::new(*FORMS.choose(rng).unwrap(), *UPOS.choose(rng).unwrap());
                    if rng.gen_bool(0.8) {
                        t.xpos = Some(XPOS.choose(rng).unwrap().to_string());
                    }
                    if parsed {
                        t.head = heads[i];
                        t.dep = Some(if heads[i] == TreeHead::Root {
                            "root".to_string()
                        } else {
                            DEPS.choose(rng).unwrap().to_string()
                        });
                    }
                    t
                })
                .collect();
            let sid = format!("r{id}-s{s}");
            if parsed {
                let q = if rng.gen_bool(0.5) {
                    ParseQuality::Full
                } else {
                    ParseQuality::Heuristic
                };
                AnnotatedSentence::parsed(sid, tokens, q)
            } else {
                AnnotatedSentence::unparsed(sid, tokens)
            }
        })
        .collect();
    AnnotatedDocument::new(format!("r{id}"), sentences)
}

/// Forward pass with explicit loops and a plain softmax.
pub fn oracle_forward(head: &Head, x: &[f64]) -> Vec<f64> {
    let mut a = x.to_vec();
    let last = head.layers.len() - 1;
    for (k, layer) in head.layers.iter().enumerate() {
        let w = &layer.weights;
        let mut z = vec![0.0; w.cols()];
        for j in 0..w.cols() {
            let mut s = layer.bias[j];
            for i in 0..w.rows() {
                s += a[i] * w.get(i, j);
            }
            z[j] = if k < last { s.max(0.0) } else { s };
        }
        a = z;
    }
    let m = a.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = a.iter().map(|z| (z - m).exp()).collect();
    let sum: f64 = e.iter().sum();
    e.iter().map(|v| v / sum).collect()
}

/// Mean cross-entropy over one-hot targets in two nested loops, plus the
/// weight penalty.
pub fn oracle_loss(head: &Head, xs: &[Vec<f64>], ys: &[usize]) -> f64 {
    let c = head.config.class_count;
    let mut total = 0.0;
    for (x, &y) in xs.iter().zip(ys) {
        let p = oracle_forward(head, x);
        for i in 0..c {
            let onehot = if i == y { 1.0 } else { 0.0 };
            total -= onehot * p[i].max(1e-12).ln();
        }
    }
    let mut sq = 0.0;
    for l in &head.layers {
        for w in l.weights.as_slice() {
            sq += w * w;
        }
    }
    total / xs.len() as f64 + 0.5 * head.config.l2 * sq
}

/// A small head (at most a few hundred parameters) with random weights.
pub fn random_head(rng: &mut impl Rng) -> Head {
    let config = HeadConfig {
        input_dim: rng.gen_range(1..=6),
        hidden_dim: if rng.gen_bool(0.5) {
            0
        } else {
            rng.gen_range(1..=5)
        },
        class_count: rng.gen_range(2..=5),
        l2: if rng.gen_bool(0.5) {
            0.0
        } else {
            rng.gen_range(0.0..0.1)
        },
        seed: rng.gen(),
        ..HeadConfig::default()
    };
    let layers = config
        .layer_shapes()
        .into_iter()
        .map(|(i, o)| Layer {
            weights: Matrix::from_vec(i, o, (0..i * o).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .unwrap(),
            bias: (0..o).map(|_| rng.gen_range(-0.5..0.5)).collect(),
        })
        .collect();
    Head {
        config,
        layers,
        fitted: true,
    }
}

pub fn random_rows(rng: &mut impl Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect())
        .collect()
}

/// Per-class (tp, fp, fn, tn) by scanning all samples for each class.
pub fn oracle_counts(truth: &[usize], pred: &[usize], c: usize) -> Vec<(u64, u64, u64, u64)> {
    (0..c)
        .map(|k| {
            let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
            for (&t, &p) in truth.iter().zip(pred) {
                match (t == k, p == k) {
                    (true, true) => tp += 1,
                    (false, true) => fp += 1,
                    (true, false) => fn_ += 1,
                    (false, false) => tn += 1,
                }
            }
            (tp, fp, fn_, tn)
        })
        .collect()
}

pub fn oracle_matrix(truth: &[usize], pred: &[usize], c: usize) -> Vec<Vec<u64>> {
    let mut m = vec![vec![0u64; c]; c];
    for a in 0..c {
        for b in 0..c {
            for (&t, &p) in truth.iter().zip(pred) {
                if t == a && p == b {
                    m[a][b] += 1;
                }
            }
        }
    }
    m
}

/// Accuracy, macro precision, macro recall and macro F1 in percent.
/// Zero denominators give 0.
pub fn oracle_macro(truth: &[usize], pred: &[usize], c: usize) -> (f64, f64, f64, f64) {
    let counts = oracle_counts(truth, pred, c);
    let correct = truth.iter().zip(pred).filter(|(t, p)| t == p).count();
    let accuracy = 100.0 * correct as f64 / truth.len() as f64;
    let (mut ps, mut rs, mut fs) = (0.0, 0.0, 0.0);
    for &(tp, fp, fn_, _) in &counts {
        let p = if tp + fp == 0 {
            0.0
        } else {
            tp as f64 / (tp + fp) as f64
        };
        let r = if tp + fn_ == 0 {
            0.0
        } else {
            tp as f64 / (tp + fn_) as f64
        };
        let f = if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        };
        ps += 100.0 * p;
        rs += 100.0 * r;
        fs += 100.0 * f;
    }
    let n = c as f64;
    (accuracy, ps / n, rs / n, fs / n)
}
