use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

const BUILTIN_LEXICON: &str = include_str!("../../data/lexicon.tsv");
const BUILTIN_SUFFIXES: &str = include_str!("../../data/suffixes.tsv");

/// Lexicon plus suffix rules for the fallback tagger.
#[derive(Clone, Debug)]
pub struct TagLexicon {
    words: HashMap<String, String>,
    /// Sorted longest suffix first; ties keep file order.
    suffixes: Vec<(String, String)>,
    default_tag: String,
}

impl Default for TagLexicon {
    fn default() -> Self {
        Self::builtin()
    }
}

impl TagLexicon {
    pub fn new(words: HashMap<String, String>, suffixes: Vec<(String, String)>) -> Self {
        let mut suffixes = suffixes;
        // stable sort keeps priority order among equal lengths
        suffixes.sort_by_key(|s| std::cmp::Reverse(s.0.chars().count()));
        TagLexicon {
            words: words
                .into_iter()
                .map(|(w, t)| (w.to_lowercase(), t))
                .collect(),
            suffixes,
            default_tag: "NOUN".into(),
        }
    }

    /// The lexicon and suffix rules shipped in `data/`.
    pub fn builtin() -> Self {
        let words = parse_lexicon(BUILTIN_LEXICON).expect("builtin lexicon is well formed");
        let suffixes = parse_suffixes(BUILTIN_SUFFIXES).expect("builtin suffixes are well formed");
        TagLexicon::new(words, suffixes)
    }

    pub fn load(lexicon: impl AsRef<Path>, suffixes: impl AsRef<Path>) -> Result<Self> {
        let read = |p: &Path| fs::read_to_string(p).map_err(|e| Error::io(p, e));
        let words = parse_lexicon(&read(lexicon.as_ref())?)?;
        let rules = parse_suffixes(&read(suffixes.as_ref())?)?;
        Ok(TagLexicon::new(words, rules))
    }

    pub fn default_tag(&self) -> &str {
        &self.default_tag
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Lexicon, then shape (punctuation, numerals), then suffix rules, then
    /// capitalised non-initial words as PROPN, then the default tag.
    pub fn tag(&self, form: &str, position: usize) -> String {
        let lower = form.to_lowercase();
        if let Some(tag) = self.words.get(&lower) {
            return tag.clone();
        }
        if form.chars().all(|c| !c.is_alphanumeric()) {
            return "PUNCT".into();
        }
        if form.chars().any(|c| c.is_ascii_digit())
            && form
                .chars()
                .all(|c| c.is_ascii_digit() || ".,:/-%".contains(c))
        {
            return "NUM".into();
        }
        for (suffix, tag) in &self.suffixes {
            if lower.len() > suffix.len() && lower.ends_with(suffix.as_str()) {
                return tag.clone();
            }
        }
        if position > 0 && form.chars().next().is_some_and(char::is_uppercase) {
            return "PROPN".into();
        }
        self.default_tag.clone()
    }
}

fn parse_lexicon(text: &str) -> Result<HashMap<String, String>> {
    let mut words = HashMap::new();
    for (i, line) in data_lines(text) {
        let (word, tag) = line
            .split_once('\t')
            .ok_or_else(|| Error::format(i, "expected word<TAB>UPOS"))?;
        words
            .entry(word.trim().to_lowercase())
            .or_insert_with(|| tag.trim().to_string());
    }
    Ok(words)
}

fn parse_suffixes(text: &str) -> Result<Vec<(String, String)>> {
    data_lines(text)
        .map(|(i, line)| {
            let (suffix, tag) = line
                .split_once('\t')
                .ok_or_else(|| Error::format(i, "expected -suffix<TAB>UPOS"))?;
            let suffix = suffix
                .trim()
                .strip_prefix('-')
                .ok_or_else(|| Error::format(i, "suffix must start with `-`"))?;
            Ok((suffix.to_lowercase(), tag.trim().to_string()))
        })
        .collect()
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

/// One UPOS per token.
pub fn tag_pos(tokens: &[String], lexicon: &TagLexicon) -> Vec<String> {
    tokens
        .iter()
        .enumerate()
        .map(|(i, t)| lexicon.tag(t, i))
        .collect()
}

const BE_FORMS: &[&str] = &[
    "be", "am", "is", "are", "was", "were", "been", "being", "'m", "'re",
];
const HAVE_FORMS: &[&str] = &["have", "has", "had", "having", "'ve"];
const GET_FORMS: &[&str] = &["get", "gets", "got", "gotten", "getting"];

pub(crate) fn is_be_form(form: &str) -> bool {
    BE_FORMS.contains(&form.to_lowercase().as_str())
}

/// Penn-style fine tags for verbs: `VBN` after a be/have/get auxiliary
/// (adverbs, particles and further auxiliaries may intervene), `VBD` for
/// other `-ed` forms, `VBG` for `-ing`, `VB` otherwise. Non-verbs get none.
pub fn fine_tags(tokens: &[String], upos: &[String]) -> Vec<Option<String>> {
    let mut out = Vec::with_capacity(tokens.len());
    for (i, (form, tag)) in tokens.iter().zip(upos).enumerate() {
        if tag != "VERB" {
            out.push(None);
            continue;
        }
        let lower = form.to_lowercase();
        let mut after_aux = false;
        for j in (0..i).rev() {
            let prev = tokens[j].to_lowercase();
            if BE_FORMS.contains(&prev.as_str())
                || HAVE_FORMS.contains(&prev.as_str())
                || GET_FORMS.contains(&prev.as_str())
            {
                after_aux = true;
                break;
            }
            if !matches!(upos[j].as_str(), "ADV" | "PART" | "AUX") {
                break;
            }
        }
        let fine = if after_aux && !lower.ends_with("ing") {
            "VBN"
        } else if lower.ends_with("ing") {
            "VBG"
        } else if lower.ends_with("ed") {
            "VBD"
        } else {
            "VB"
        };
        out.push(Some(fine.to_string()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex(words: &[(&str, &str)], suffixes: &[(&str, &str)]) -> TagLexicon {
        TagLexicon::new(
            words
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
            suffixes
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
        )
    }

    fn strings(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn lexicon_hit() {
        let l = lex(&[("the", "DET")], &[]);
        assert_eq!(tag_pos(&strings(&["the"]), &l), ["DET"]);
        assert_eq!(tag_pos(&strings(&["The"]), &l), ["DET"]);
    }

    #[test]
    fn suffix_then_default() {
        let l = lex(&[], &[("ly", "ADV")]);
        assert_eq!(tag_pos(&strings(&["quickly"]), &l), ["ADV"]);
        assert_eq!(tag_pos(&strings(&["zorbly"]), &l), ["ADV"]);
        assert_eq!(tag_pos(&strings(&["zorb"]), &l), ["NOUN"]);
    }

    #[test]
    fn lexicon_beats_suffix() {
        let l = lex(&[("family", "NOUN")], &[("ly", "ADV")]);
        assert_eq!(tag_pos(&strings(&["family"]), &l), ["NOUN"]);
    }

    #[test]
    fn longest_suffix_first() {
        let l = lex(&[], &[("s", "VERB"), ("ness", "NOUN")]);
        assert_eq!(tag_pos(&strings(&["kindness"]), &l), ["NOUN"]);
    }

    #[test]
    fn builtin_data() {
        let l = TagLexicon::builtin();
        assert!(l.len() > 500);
        let tags = tag_pos(
            &strings(&["The", "dog", "was", "quickly", "chased", ".", "42"]),
            &l,
        );
        assert_eq!(tags, ["DET", "NOUN", "AUX", "ADV", "VERB", "PUNCT", "NUM"]);
        assert_eq!(tag_pos(&strings(&["I", "met", "Zorblax"]), &l)[2], "PROPN");
    }

    #[test]
    fn participles_after_be() {
        let toks = strings(&["was", "quickly", "eaten", "and", "walked", "running"]);
        let upos = strings(&["AUX", "ADV", "VERB", "CCONJ", "VERB", "VERB"]);
        let fine = fine_tags(&toks, &upos);
        assert_eq!(fine[2].as_deref(), Some("VBN"));
        assert_eq!(fine[4].as_deref(), Some("VBD"));
        assert_eq!(fine[5].as_deref(), Some("VBG"));
        assert_eq!(fine[0], None);
    }
}
