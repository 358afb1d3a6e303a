//! The 18-value grammar feature vector.
//!
//! Layout (frozen, see [`FEATURE_NAMES`]): ten POS ratios, then average
//! sentence length, function-word ratio, noun-phrase count, verb-phrase
//! count, clause count, adverb/verb ratio, passive ratio and mean parse-tree
//! depth. Counts are document totals.

mod features;
mod io;

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use self::features::{
    adv_verb_ratio, avg_sentence_length, clause_count, function_word_ratio, is_clause_relation,
    np_count, parse_tree_depth, passive_ratio, pos_ratios, vp_count, winsorize, ClauseCount,
    CLAUSE_RELATIONS, NOUN_PHRASE_TAGS, POS_CLASSES, VERB_PHRASE_TAGS,
};
pub use self::io::{parse_vectors_csv, read_vectors_csv, render_vectors_csv, write_vectors_csv};

use crate::corpus::{AnnotatedDocument, ParseQuality};
use crate::error::{Error, Result};
use crate::par::{self, Execution};

pub const SCHEMA_VERSION: &str = "grammar-v1";
pub const GRAMMAR_DIM: usize = 18;

pub const FEATURE_NAMES: [&str; GRAMMAR_DIM] = [
    "pos_ratio_NOUN",
    "pos_ratio_VERB",
    "pos_ratio_ADJ",
    "pos_ratio_ADV",
    "pos_ratio_PRON",
    "pos_ratio_PROPN",
    "pos_ratio_ADP",
    "pos_ratio_DET",
    "pos_ratio_NUM",
    "pos_ratio_CCONJ",
    "avg_sentence_length",
    "function_word_ratio",
    "np_count",
    "vp_count",
    "clause_count",
    "adv_verb_ratio",
    "passive_ratio",
    "parse_tree_depth",
];

/// Column index of each scalar feature.
pub mod index {
    pub const AVG_SENTENCE_LENGTH: usize = 10;
    pub const FUNCTION_WORD_RATIO: usize = 11;
    pub const NP_COUNT: usize = 12;
    pub const VP_COUNT: usize = 13;
    pub const CLAUSE_COUNT: usize = 14;
    pub const ADV_VERB_RATIO: usize = 15;
    pub const PASSIVE_RATIO: usize = 16;
    pub const PARSE_TREE_DEPTH: usize = 17;
}

const BUILTIN_FUNCTION_WORDS: &str = include_str!("../../data/function_words.txt");

/// Lowercased closed-class words: articles, determiners, pronouns,
/// auxiliaries, conjunctions, common prepositions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionWordSet {
    words: HashSet<String>,
}

impl FunctionWordSet {
    pub fn new<I, S>(words: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let words: HashSet<String> = words
            .into_iter()
            .map(|w| w.as_ref().trim().to_lowercase())
            .filter(|w| !w.is_empty())
            .collect();
        if words.is_empty() {
            return Err(Error::Config("function word set is empty".into()));
        }
        Ok(FunctionWordSet { words })
    }

    pub fn builtin() -> Self {
        Self::parse(BUILTIN_FUNCTION_WORDS).expect("builtin function words are non-empty")
    }

    /// One word per line; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(text.lines().filter(|l| !l.trim_start().starts_with('#')))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn contains(&self, form: &str) -> bool {
        self.words.contains(&form.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl Default for FunctionWordSet {
    fn default() -> Self {
        Self::builtin()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GrammarConfig {
    pub np_requires_noun: bool,
    pub advverb_cap: f64,
    pub epsilon: f64,
}

impl Default for GrammarConfig {
    fn default() -> Self {
        GrammarConfig {
            np_requires_noun: false,
            advverb_cap: 100.0,
            epsilon: 1e-6,
        }
    }
}

impl GrammarConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.advverb_cap > 0.0 && self.advverb_cap.is_finite()) {
            return Err(Error::Config(format!(
                "advverb_cap must be positive, got {}",
                self.advverb_cap
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrammarVector {
    pub doc_id: String,
    pub values: [f64; GRAMMAR_DIM],
    pub parse_quality: ParseQuality,
}

impl GrammarVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        FEATURE_NAMES
            .iter()
            .position(|n| *n == name)
            .map(|i| self.values[i])
    }

    /// Checks the documented value ranges.
    pub fn check_ranges(&self) -> std::result::Result<(), String> {
        let v = &self.values;
        if let Some(i) = v.iter().position(|x| !x.is_finite()) {
            return Err(format!("{} is not finite", FEATURE_NAMES[i]));
        }
        if v[..10].iter().any(|&r| !(0.0..=1.0).contains(&r)) {
            return Err("POS ratio outside [0, 1]".into());
        }
        let sum: f64 = v[..10].iter().sum();
        if sum != 0.0 && (sum - 1.0).abs() > 1e-9 {
            return Err(format!("POS ratios sum to {sum}"));
        }
        for i in [index::FUNCTION_WORD_RATIO, index::PASSIVE_RATIO] {
            if !(0.0..=1.0).contains(&v[i]) {
                return Err(format!("{} = {} outside [0, 1]", FEATURE_NAMES[i], v[i]));
            }
        }
        for i in [index::NP_COUNT, index::VP_COUNT, index::CLAUSE_COUNT] {
            if v[i] < 0.0 || v[i].fract() != 0.0 {
                return Err(format!("{} = {} is not a count", FEATURE_NAMES[i], v[i]));
            }
        }
        if v[index::AVG_SENTENCE_LENGTH] < 1.0 {
            return Err("average sentence length below 1".into());
        }
        if v[index::PARSE_TREE_DEPTH] < 1.0 {
            return Err("parse tree depth below 1".into());
        }
        if v[index::ADV_VERB_RATIO] < 0.0 {
            return Err("negative adverb/verb ratio".into());
        }
        Ok(())
    }
}

/// Computes the full vector for one annotated document.
pub fn extract(
    doc: &AnnotatedDocument,
    fset: &FunctionWordSet,
    config: &GrammarConfig,
) -> Result<GrammarVector> {
    if doc.sentences.is_empty() || doc.token_count() == 0 {
        return Err(Error::Contract(format!(
            "document {} has no tokens",
            doc.id
        )));
    }
    let mut values = [0.0; GRAMMAR_DIM];
    values[..10].copy_from_slice(&pos_ratios(doc));
    values[index::AVG_SENTENCE_LENGTH] = avg_sentence_length(doc)?;
    values[index::FUNCTION_WORD_RATIO] = function_word_ratio(doc, fset);
    values[index::NP_COUNT] = np_count(doc, config.np_requires_noun) as f64;
    values[index::VP_COUNT] = vp_count(doc) as f64;
    values[index::CLAUSE_COUNT] = clause_count(doc).count as f64;
    values[index::ADV_VERB_RATIO] =
        winsorize(adv_verb_ratio(doc, config.epsilon), config.advverb_cap);
    values[index::PASSIVE_RATIO] = passive_ratio(doc);
    values[index::PARSE_TREE_DEPTH] = parse_tree_depth(doc)?;
    Ok(GrammarVector {
        doc_id: doc.id.clone(),
        values,
        parse_quality: doc.parse_quality(),
    })
}

/// [`extract`] over many documents; output follows input order.
pub fn extract_all(
    docs: &[AnnotatedDocument],
    fset: &FunctionWordSet,
    config: &GrammarConfig,
    exec: Execution,
) -> Result<Vec<GrammarVector>> {
    config.validate()?;
    par::try_map(docs, exec, |d| extract(d, fset, config))
}
