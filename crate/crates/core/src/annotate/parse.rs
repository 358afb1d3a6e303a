use super::tagger::is_be_form;
use crate::corpus::{AnnotatedSentence, Head, ParseQuality, Token};

/// Flat dependency structure from POS tags alone.
///
/// The first VERB (else the first AUX, else the first token) is the root and
/// every other token attaches to it. Labels come from a fixed POS table;
/// nominals are `nsubj` before the root and `obj` after it, a be-auxiliary
/// of a `VBN` root is `auxpass`, and a secondary verb is `xcomp` after `to`,
/// `advcl` after a subordinator, `conj` otherwise.
pub fn heuristic_parse(id: impl Into<String>, tokens: Vec<Token>) -> AnnotatedSentence {
    let mut tokens = tokens;
    let root = tokens
        .iter()
        .position(|t| t.upos == "VERB")
        .or_else(|| tokens.iter().position(|t| t.upos == "AUX"))
        .unwrap_or(0);
    let root_is_participle = tokens
        .get(root)
        .is_some_and(|t| t.upos == "VERB" && t.xpos.as_deref() == Some("VBN"));

    let labels: Vec<&'static str> = (0..tokens.len())
        .map(|i| {
            if i == root {
                return "root";
            }
            let t = &tokens[i];
            match t.upos.as_str() {
                "NOUN" | "PROPN" | "PRON" => {
                    if i < root {
                        "nsubj"
                    } else {
                        "obj"
                    }
                }
                "NUM" => "nummod",
                "ADJ" => "amod",
                "ADV" => "advmod",
                "DET" => "det",
                "ADP" => "case",
                "CCONJ" => "cc",
                "SCONJ" => "mark",
                "PART" if t.form.eq_ignore_ascii_case("to") => "mark",
                "PART" => "advmod",
                "PUNCT" => "punct",
                "INTJ" => "discourse",
                "AUX" if root_is_participle && i < root && is_be_form(&t.form) => "auxpass",
                "AUX" => "aux",
                "VERB" => secondary_verb_label(&tokens, root, i),
                _ => "dep",
            }
        })
        .collect();

    for (i, (t, label)) in tokens.iter_mut().zip(labels).enumerate() {
        t.dep = Some(label.to_string());
        t.head = if i == root {
            Head::Root
        } else {
            Head::Index(root)
        };
    }
    AnnotatedSentence::parsed(id, tokens, ParseQuality::Heuristic)
}

fn secondary_verb_label(tokens: &[Token], root: usize, i: usize) -> &'static str {
    let prev = tokens[..i].iter().rev().find(|t| t.upos != "ADV");
    if prev.is_some_and(|p| p.upos == "PART" || p.form.eq_ignore_ascii_case("to")) {
        return "xcomp";
    }
    let (lo, hi) = if i > root { (root + 1, i) } else { (0, i) };
    if tokens[lo..hi].iter().any(|t| t.upos == "SCONJ") {
        "advcl"
    } else {
        "conj"
    }
}
