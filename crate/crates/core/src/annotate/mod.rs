//! Deterministic fallback annotation for raw text.
//!
//! Sentence splitting, tokenization, lexicon/suffix tagging and a flat
//! heuristic dependency structure. Output sentences carry
//! [`ParseQuality::Heuristic`](crate::corpus::ParseQuality) so downstream
//! reports show that features came from the degraded path.

mod parse;
mod tagger;
mod text;

pub use self::parse::heuristic_parse;
pub use self::tagger::{fine_tags, tag_pos, TagLexicon};
pub use self::text::{clean_text, split_sentences, tokenize};

use crate::corpus::{AnnotatedDocument, AnnotatedSentence, Token};
use crate::par::{self, Execution};

#[derive(Clone, Debug, Default)]
pub struct Annotator {
    lexicon: TagLexicon,
}

impl Annotator {
    pub fn new(lexicon: TagLexicon) -> Self {
        Annotator { lexicon }
    }

    pub fn lexicon(&self) -> &TagLexicon {
        &self.lexicon
    }

    pub fn annotate_sentence(
        &self,
        id: impl Into<String>,
        sentence: &str,
    ) -> Option<AnnotatedSentence> {
        let forms = tokenize(sentence);
        if forms.is_empty() {
            return None;
        }
        let upos = tag_pos(&forms, &self.lexicon);
        let xpos = fine_tags(&forms, &upos);
        let tokens = forms
            .into_iter()
            .zip(upos)
            .zip(xpos)
            .map(|((form, upos), xpos)| {
                let mut t = Token::new(form, upos);
                t.lemma = Some(t.form.to_lowercase());
                t.xpos = xpos;
                t
            })
            .collect();
        Some(heuristic_parse(id, tokens))
    }

    /// Sentences for `text` after cleaning; empty when nothing survives.
    pub fn annotate_text(&self, doc_id: &str, text: &str) -> Vec<AnnotatedSentence> {
        split_sentences(&clean_text(text))
            .iter()
            .filter_map(|s| self.annotate_sentence(String::new(), s))
            .enumerate()
            .map(|(i, mut s)| {
                s.id = format!("{doc_id}-s{}", i + 1);
                s
            })
            .collect()
    }

    /// Fills in sentences for documents that only carry raw text; documents
    /// that are already annotated are returned unchanged.
    pub fn annotate_document(&self, doc: &AnnotatedDocument) -> AnnotatedDocument {
        if doc.is_annotated() {
            return doc.clone();
        }
        let mut out = doc.clone();
        if let Some(text) = &doc.text {
            out.sentences = self.annotate_text(&doc.id, text);
        }
        out
    }

    /// Annotates every document. Documents whose text yields no tokens are
    /// dropped and their ids returned in the second list.
    pub fn annotate_all(
        &self,
        docs: &[AnnotatedDocument],
        exec: Execution,
    ) -> (Vec<AnnotatedDocument>, Vec<String>) {
        let annotated = par::map(docs, exec, |d| self.annotate_document(d));
        let (kept, dropped): (Vec<_>, Vec<_>) = annotated
            .into_iter()
            .partition(AnnotatedDocument::is_annotated);
        (kept, dropped.into_iter().map(|d| d.id).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ParseQuality;

    #[test]
    fn raw_text_document() {
        let mut doc = AnnotatedDocument::new("m1", vec![]).with_label("ham");
        doc.text = Some("The dog was chased.  It ran away! 🎉".into());
        let out = Annotator::default().annotate_document(&doc);
        assert_eq!(out.sentences.len(), 2);
        assert_eq!(out.parse_quality(), ParseQuality::Heuristic);
        out.validate().unwrap();
        let first = &out.sentences[0];
        assert_eq!(first.id, "m1-s1");
        let chased = &first.tokens[3];
        assert_eq!(chased.form, "chased");
        assert_eq!(chased.xpos.as_deref(), Some("VBN"));
        assert_eq!(first.tokens[2].dep.as_deref(), Some("auxpass"));
    }

    #[test]
    fn deterministic() {
        let a = Annotator::default();
        let x = a.annotate_text("d", "Mr. Smith quickly left. He said it's fine.");
        let y = a.annotate_text("d", "Mr. Smith quickly left. He said it's fine.");
        assert_eq!(x, y);
        assert_eq!(x.len(), 2);
    }

    #[test]
    fn empty_documents_are_dropped() {
        let mut a = AnnotatedDocument::new("a", vec![]);
        a.text = Some("😀 😀".into());
        let mut b = AnnotatedDocument::new("b", vec![]);
        b.text = Some("Fine.".into());
        let (kept, dropped) = Annotator::default().annotate_all(&[a, b], Execution::Parallel);
        assert_eq!(kept.len(), 1);
        assert_eq!(dropped, ["a"]);
    }
}
