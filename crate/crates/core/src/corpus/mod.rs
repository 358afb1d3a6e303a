//! Canonical document model and the corpus loaders.
//!
//! Every loader produces [`AnnotatedDocument`]s. Heads use a 0-based index
//! into the owning sentence with a distinct [`Head::Root`] marker, so CoNLL-U
//! `0` never collides with the first token.

mod classification;
mod conllu;
mod iob;
mod split;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use self::classification::{load_classification_csv, CsvColumns};
pub use self::conllu::{load_conllu, parse_conllu, render_conllu, write_conllu};
pub use self::iob::{load_ner_iob, parse_ner_iob, ptb_to_upos};
pub use self::split::{split, split_indices, SplitSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Head {
    Root,
    Index(usize),
}

/// How the dependency annotation of a sentence or document was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParseQuality {
    None,
    Heuristic,
    Full,
}

impl ParseQuality {
    pub fn as_str(self) -> &'static str {
        match self {
            ParseQuality::None => "none",
            ParseQuality::Heuristic => "heuristic",
            ParseQuality::Full => "full",
        }
    }
}

impl fmt::Display for ParseQuality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ParseQuality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(ParseQuality::None),
            "heuristic" => Ok(ParseQuality::Heuristic),
            "full" => Ok(ParseQuality::Full),
            other => Err(Error::Input(format!("unknown parse quality `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Token {
    pub form: String,
    pub lemma: Option<String>,
    pub upos: String,
    pub xpos: Option<String>,
    pub dep: Option<String>,
    pub head: Head,
    pub ner: Option<String>,
}

impl Token {
    /// A token with only a surface form and a coarse tag; no parse.
    pub fn new(form: impl Into<String>, upos: impl Into<String>) -> Self {
        Token {
            form: form.into(),
            lemma: None,
            upos: upos.into(),
            xpos: None,
            dep: None,
            head: Head::Root,
            ner: None,
        }
    }

    pub fn with_xpos(mut self, xpos: impl Into<String>) -> Self {
        self.xpos = Some(xpos.into());
        self
    }

    pub fn with_dep(mut self, head: Head, dep: impl Into<String>) -> Self {
        self.head = head;
        self.dep = Some(dep.into());
        self
    }

    /// Dependency label lowercased with any `:subtype` suffix removed.
    pub fn dep_base(&self) -> Option<String> {
        self.dep.as_deref().map(dep_base)
    }
}

/// `acl:relcl` -> `acl`, `ADVCL` -> `advcl`.
pub fn dep_base(label: &str) -> String {
    label
        .split(':')
        .next()
        .unwrap_or_default()
        .trim()
        .to_ascii_lowercase()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedSentence {
    pub id: String,
    pub tokens: Vec<Token>,
    pub has_parse: bool,
    pub parse_quality: ParseQuality,
}

impl AnnotatedSentence {
    /// Sentence without a dependency tree: every head is ROOT.
    pub fn unparsed(id: impl Into<String>, mut tokens: Vec<Token>) -> Self {
        for t in &mut tokens {
            t.head = Head::Root;
        }
        AnnotatedSentence {
            id: id.into(),
            tokens,
            has_parse: false,
            parse_quality: ParseQuality::None,
        }
    }

    pub fn parsed(id: impl Into<String>, tokens: Vec<Token>, quality: ParseQuality) -> Self {
        AnnotatedSentence {
            id: id.into(),
            tokens,
            has_parse: true,
            parse_quality: quality,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Checks the token and tree invariants.
    pub fn validate(&self) -> Result<()> {
        let structure = |message: String| Error::Structure {
            sentence: self.id.clone(),
            message,
        };
        if self.tokens.is_empty() {
            return Err(structure("sentence has no tokens".into()));
        }
        let n = self.tokens.len();
        for (i, t) in self.tokens.iter().enumerate() {
            if t.form.trim().is_empty() {
                return Err(structure(format!("token {i} has an empty form")));
            }
            if let Head::Index(h) = t.head {
                if h >= n {
                    return Err(structure(format!("token {i} has head {h} outside 0..{n}")));
                }
                if h == i {
                    return Err(structure(format!("token {i} is its own head")));
                }
            }
        }
        let roots = self.tokens.iter().filter(|t| t.head == Head::Root).count();
        if self.has_parse {
            if roots != 1 {
                return Err(structure(format!("parsed sentence has {roots} roots")));
            }
            self.depths()?;
        } else if roots != n {
            return Err(structure("unparsed sentence has non-ROOT heads".into()));
        }
        Ok(())
    }

    /// Depth of every token: 1 + number of head hops to ROOT.
    pub fn depths(&self) -> Result<Vec<usize>> {
        let n = self.tokens.len();
        let mut depths = Vec::with_capacity(n);
        for start in 0..n {
            let mut depth = 1;
            let mut cur = start;
            loop {
                match self.tokens[cur].head {
                    Head::Root => break,
                    Head::Index(h) if h < n => {
                        depth += 1;
                        cur = h;
                        if depth > n {
                            return Err(Error::Structure {
                                sentence: self.id.clone(),
                                message: format!("cycle through token {start}"),
                            });
                        }
                    }
                    Head::Index(h) => {
                        return Err(Error::Structure {
                            sentence: self.id.clone(),
                            message: format!("head {h} out of range"),
                        })
                    }
                }
            }
            depths.push(depth);
        }
        Ok(depths)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedDocument {
    pub id: String,
    pub sentences: Vec<AnnotatedSentence>,
    pub label: Option<String>,
    /// Raw text for documents that still need annotation.
    pub text: Option<String>,
}

impl AnnotatedDocument {
    pub fn new(id: impl Into<String>, sentences: Vec<AnnotatedSentence>) -> Self {
        AnnotatedDocument {
            id: id.into(),
            sentences,
            label: None,
            text: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn is_annotated(&self) -> bool {
        !self.sentences.is_empty()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences.iter().flat_map(|s| s.tokens.iter())
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(|s| s.tokens.len()).sum()
    }

    /// Weakest parse quality over all sentences; `None` for an empty document.
    pub fn parse_quality(&self) -> ParseQuality {
        self.sentences
            .iter()
            .map(|s| s.parse_quality)
            .min()
            .unwrap_or(ParseQuality::None)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sentences.is_empty() {
            return Err(Error::Contract(format!(
                "document {} has no sentences",
                self.id
            )));
        }
        self.sentences
            .iter()
            .try_for_each(AnnotatedSentence::validate)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelKind {
    DocumentClass,
    TokenTag,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSet {
    names: Vec<String>,
    kind: LabelKind,
}

impl LabelSet {
    pub fn new(names: Vec<String>, kind: LabelKind) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::Input("label set is empty".into()));
        }
        let mut seen = HashSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(Error::Input(format!("duplicate label `{n}`")));
            }
            if kind == LabelKind::TokenTag && !is_iob_tag(n) {
                return Err(Error::Input(format!("`{n}` is not an IOB tag")));
            }
        }
        Ok(LabelSet { names, kind })
    }

    /// Sorted set of the document labels present in `docs`.
    pub fn from_documents(docs: &[AnnotatedDocument]) -> Result<Self> {
        let mut names: Vec<String> = docs.iter().filter_map(|d| d.label.clone()).collect();
        names.sort();
        names.dedup();
        LabelSet::new(names, LabelKind::DocumentClass)
    }

    /// Observed NER tags, `O` first and the rest sorted.
    pub fn from_token_tags(docs: &[AnnotatedDocument]) -> Result<Self> {
        let mut names: Vec<String> = docs
            .iter()
            .flat_map(|d| d.tokens())
            .filter_map(|t| t.ner.clone())
            .collect();
        names.sort_by(|a, b| (a != "O", a).cmp(&(b != "O", b)));
        names.dedup();
        LabelSet::new(names, LabelKind::TokenTag)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn kind(&self) -> LabelKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// `O` or `B-xxx` / `I-xxx` with a non-empty category.
pub fn is_iob_tag(tag: &str) -> bool {
    if tag == "O" {
        return true;
    }
    match tag.split_once('-') {
        Some((prefix, category)) => (prefix == "B" || prefix == "I") && !category.is_empty(),
        None => false,
    }
}

/// Counts of what a loader did with its input.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub consumed: usize,
    pub warnings: Vec<LoadWarning>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoadWarning {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Loaded {
    pub documents: Vec<AnnotatedDocument>,
    pub report: LoadReport,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> AnnotatedSentence {
        AnnotatedSentence::parsed(
            "s",
            vec![
                Token::new("a", "DET").with_dep(Head::Index(1), "det"),
                Token::new("b", "NOUN").with_dep(Head::Index(2), "nsubj"),
                Token::new("c", "VERB").with_dep(Head::Root, "root"),
            ],
            ParseQuality::Full,
        )
    }

    #[test]
    fn chain_depths() {
        assert_eq!(chain().depths().unwrap(), vec![3, 2, 1]);
        chain().validate().unwrap();
    }

    #[test]
    fn cycle_is_structure_error() {
        let mut s = chain();
        s.tokens[2].head = Head::Index(0);
        s.tokens[1].head = Head::Root;
        s.tokens[0].head = Head::Index(2);
        // 0 -> 2 -> 0
        s.tokens[2].head = Head::Index(0);
        assert!(matches!(s.validate(), Err(Error::Structure { .. })));
    }

    #[test]
    fn self_head_rejected() {
        let mut s = chain();
        s.tokens[0].head = Head::Index(0);
        assert!(s.validate().is_err());
    }

    #[test]
    fn blank_form_rejected() {
        let s = AnnotatedSentence::unparsed("s", vec![Token::new("  ", "X")]);
        assert!(s.validate().is_err());
    }

    #[test]
    fn iob_tags() {
        assert!(is_iob_tag("O"));
        assert!(is_iob_tag("B-geo"));
        assert!(is_iob_tag("I-per"));
        assert!(!is_iob_tag("X-geo"));
        assert!(!is_iob_tag("B-"));
        assert!(!is_iob_tag("geo"));
    }

    #[test]
    fn dep_subtypes_stripped() {
        assert_eq!(dep_base("acl:relcl"), "acl");
        assert_eq!(dep_base("ADVCL"), "advcl");
    }

    #[test]
    fn label_set_rejects_duplicates() {
        let r = LabelSet::new(vec!["a".into(), "a".into()], LabelKind::DocumentClass);
        assert!(r.is_err());
        assert!(LabelSet::new(vec![], LabelKind::DocumentClass).is_err());
    }

    #[test]
    fn token_tags_put_o_first() {
        let mut s = AnnotatedSentence::unparsed(
            "s",
            vec![
                Token::new("x", "NOUN"),
                Token::new("y", "NOUN"),
                Token::new("z", "NOUN"),
            ],
        );
        s.tokens[0].ner = Some("I-geo".into());
        s.tokens[1].ner = Some("O".into());
        s.tokens[2].ner = Some("B-geo".into());
        let labels = LabelSet::from_token_tags(&[AnnotatedDocument::new("d", vec![s])]).unwrap();
        assert_eq!(labels.names(), &["O", "B-geo", "I-geo"]);
    }
}
