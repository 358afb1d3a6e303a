//! A two-class corpus whose classes differ only in grammatical annotation.
//!
//! Both classes draw sentence templates and word forms from the same
//! distributions, so any form-based embedding carries no class signal.
//! Class `B` marks more sentences as passive (`VBN` verb with an
//! `aux:pass` dependent) and attaches more second verbs as `advcl` clauses.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{AnnotatedDocument, AnnotatedSentence, Head, ParseQuality, Token};
use crate::error::{Error, Result};

pub const CLASS_A: &str = "A";
pub const CLASS_B: &str = "B";

const DETS: [&str; 3] = ["the", "a", "this"];
const NOUNS: [&str; 12] = [
    "dog", "report", "manager", "letter", "city", "engine", "student", "river", "contract",
    "window", "doctor", "garden",
];
const PRONS: [&str; 4] = ["he", "she", "they", "we"];
const AUXES: [&str; 2] = ["was", "is"];
const VERBS: [&str; 10] = [
    "chased", "signed", "painted", "seen", "moved", "checked", "opened", "built", "found",
    "cleaned",
];
const SCONJS: [&str; 3] = ["because", "when", "although"];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub documents: usize,
    pub min_sentences: usize,
    pub max_sentences: usize,
    pub passive_rate_a: f64,
    pub passive_rate_b: f64,
    pub clause_rate_a: f64,
    pub clause_rate_b: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            documents: 1000,
            min_sentences: 2,
            max_sentences: 5,
            passive_rate_a: 0.15,
            passive_rate_b: 0.65,
            clause_rate_a: 0.15,
            clause_rate_b: 0.65,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    fn validate(&self) -> Result<()> {
        let rates = [
            self.passive_rate_a,
            self.passive_rate_b,
            self.clause_rate_a,
            self.clause_rate_b,
        ];
        if rates.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(Error::Config("synthetic rates must lie in [0, 1]".into()));
        }
        if self.min_sentences == 0 || self.min_sentences > self.max_sentences {
            return Err(Error::Config("bad synthetic sentence range".into()));
        }
        Ok(())
    }
}

/// Documents alternate `A`, `B`, `A`, ... with ids `syn-0000`, `syn-0001`, ...
pub fn generate(spec: &SyntheticSpec) -> Result<Vec<AnnotatedDocument>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut docs = Vec::with_capacity(spec.documents);
    for i in 0..spec.documents {
        let is_b = i % 2 == 1;
        let (passive, clause) = if is_b {
            (spec.passive_rate_b, spec.clause_rate_b)
        } else {
            (spec.passive_rate_a, spec.clause_rate_a)
        };
        let n = rng.gen_range(spec.min_sentences..=spec.max_sentences);
        let id = format!("syn-{i:04}");
        let sentences: Vec<AnnotatedSentence> = (0..n)
            .map(|s| {
                let sid = format!("{id}-s{}", s + 1);
                // Forms and template first, annotation choices after, so the
                // surface stream never depends on the class.
                let two_clauses = rng.gen_bool(0.5);
                let forms = draw_forms(&mut rng, two_clauses);
                let is_passive = rng.gen::<f64>() < passive;
                let is_clause = rng.gen::<f64>() < clause;
                if two_clauses {
                    complex_sentence(sid, &forms, is_passive, is_clause)
                } else {
                    simple_sentence(sid, &forms, is_passive)
                }
            })
            .collect();
        let text = sentences
            .iter()
            .map(|s| {
                s.tokens
                    .iter()
                    .map(|t| t.form.as_str())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join(" ");
        let mut doc =
            AnnotatedDocument::new(id, sentences).with_label(if is_b { CLASS_B } else { CLASS_A });
        doc.text = Some(text);
        docs.push(doc);
    }
    Ok(docs)
}

fn pick(rng: &mut ChaCha8Rng, words: &[&'static str]) -> &'static str {
    words.choose(rng).expect("non-empty word list")
}

fn draw_forms(rng: &mut ChaCha8Rng, two_clauses: bool) -> Vec<&'static str> {
    if two_clauses {
        vec![
            pick(rng, &PRONS),
            pick(rng, &VERBS),
            pick(rng, &SCONJS),
            pick(rng, &DETS),
            pick(rng, &NOUNS),
            pick(rng, &AUXES),
            pick(rng, &VERBS),
            ".",
        ]
    } else {
        vec![
            pick(rng, &DETS),
            pick(rng, &NOUNS),
            pick(rng, &AUXES),
            pick(rng, &VERBS),
            "by",
            pick(rng, &DETS),
            pick(rng, &NOUNS),
            ".",
        ]
    }
}

fn tok(form: &str, upos: &str, xpos: &str, head: Head, dep: &str) -> Token {
    Token::new(form, upos).with_xpos(xpos).with_dep(head, dep)
}

/// `DET NOUN AUX VERB by DET NOUN .`
fn simple_sentence(id: String, f: &[&str], passive: bool) -> AnnotatedSentence {
    let (subj, aux, vb) = if passive {
        ("nsubj:pass", "aux:pass", "VBN")
    } else {
        ("nsubj", "aux", "VBD")
    };
    let tokens = vec![
        tok(f[0], "DET", "DT", Head::Index(1), "det"),
        tok(f[1], "NOUN", "NN", Head::Index(3), subj),
        tok(f[2], "AUX", "VBD", Head::Index(3), aux),
        tok(f[3], "VERB", vb, Head::Root, "root"),
        tok(f[4], "ADP", "IN", Head::Index(6), "case"),
        tok(f[5], "DET", "DT", Head::Index(6), "det"),
        tok(f[6], "NOUN", "NN", Head::Index(3), "obl"),
        tok(f[7], "PUNCT", ".", Head::Index(3), "punct"),
    ];
    AnnotatedSentence::parsed(id, tokens, ParseQuality::Full)
}

/// `PRON VERB SCONJ DET NOUN AUX VERB .`
fn complex_sentence(id: String, f: &[&str], passive: bool, clause: bool) -> AnnotatedSentence {
    let (subj, aux, vb) = if passive {
        ("nsubj:pass", "aux:pass", "VBN")
    } else {
        ("nsubj", "aux", "VBD")
    };
    let (link, second) = if clause {
        ("mark", "advcl")
    } else {
        ("cc", "conj")
    };
    let tokens = vec![
        tok(f[0], "PRON", "PRP", Head::Index(1), "nsubj"),
        tok(f[1], "VERB", "VBD", Head::Root, "root"),
        tok(f[2], "SCONJ", "IN", Head::Index(6), link),
        tok(f[3], "DET", "DT", Head::Index(4), "det"),
        tok(f[4], "NOUN", "NN", Head::Index(6), subj),
        tok(f[5], "AUX", "VBD", Head::Index(6), aux),
        tok(f[6], "VERB", vb, Head::Index(1), second),
        tok(f[7], "PUNCT", ".", Head::Index(1), "punct"),
    ];
    AnnotatedSentence::parsed(id, tokens, ParseQuality::Full)
}
