//! The individual grammar features. All counts run over every token of the
//! document; runs never cross a sentence boundary.

use super::FunctionWordSet;
use crate::corpus::{dep_base, AnnotatedDocument, Head, ParseQuality, Token};
use crate::error::{Error, Result};

/// The POS classes whose ratios enter the vector, in schema order.
pub const POS_CLASSES: [&str; 10] = [
    "NOUN", "VERB", "ADJ", "ADV", "PRON", "PROPN", "ADP", "DET", "NUM", "CCONJ",
];

pub const NOUN_PHRASE_TAGS: [&str; 3] = ["NOUN", "PROPN", "ADJ"];
pub const VERB_PHRASE_TAGS: [&str; 4] = ["AUX", "VERB", "ADV", "PART"];
pub const CLAUSE_RELATIONS: [&str; 6] = ["csubj", "csubjpass", "ccomp", "advcl", "acl", "xcomp"];

/// Share of each class in [`POS_CLASSES`] among tokens whose tag is in that
/// set. All zero when no token qualifies.
pub fn pos_ratios(doc: &AnnotatedDocument) -> [f64; 10] {
    let mut counts = [0usize; 10];
    for t in doc.tokens() {
        if let Some(k) = POS_CLASSES.iter().position(|p| *p == t.upos) {
            counts[k] += 1;
        }
    }
    let total: usize = counts.iter().sum();
    let mut out = [0.0; 10];
    if total > 0 {
        for (o, c) in out.iter_mut().zip(counts) {
            *o = c as f64 / total as f64;
        }
    }
    out
}

pub fn avg_sentence_length(doc: &AnnotatedDocument) -> Result<f64> {
    if doc.sentences.is_empty() {
        return Err(Error::Contract(format!(
            "document {} has no sentences",
            doc.id
        )));
    }
    let total: usize = doc.sentences.iter().map(|s| s.tokens.len()).sum();
    Ok(total as f64 / doc.sentences.len() as f64)
}

pub fn function_word_ratio(doc: &AnnotatedDocument, fset: &FunctionWordSet) -> f64 {
    let total = doc.token_count();
    if total == 0 {
        return 0.0;
    }
    let hits = doc.tokens().filter(|t| fset.contains(&t.form)).count();
    hits as f64 / total as f64
}

fn count_runs<'a>(
    tokens: impl Iterator<Item = &'a Token>,
    member: impl Fn(&Token) -> bool,
    accept: impl Fn(&[&Token]) -> bool,
) -> usize {
    let mut count = 0;
    let mut run: Vec<&Token> = Vec::new();
    for t in tokens {
        if member(t) {
            run.push(t);
        } else if !run.is_empty() {
            count += usize::from(accept(&run));
            run.clear();
        }
    }
    if !run.is_empty() {
        count += usize::from(accept(&run));
    }
    count
}

/// Maximal runs of NOUN/PROPN/ADJ. With `requires_noun`, a run only counts
/// when it holds a NOUN or PROPN.
pub fn np_count(doc: &AnnotatedDocument, requires_noun: bool) -> usize {
    doc.sentences
        .iter()
        .map(|s| {
            count_runs(
                s.tokens.iter(),
                |t| NOUN_PHRASE_TAGS.contains(&t.upos.as_str()),
                |run| !requires_noun || run.iter().any(|t| t.upos == "NOUN" || t.upos == "PROPN"),
            )
        })
        .sum()
}

/// Tokens in AUX/VERB/ADV/PART whose predecessor is not, i.e. maximal runs.
pub fn vp_count(doc: &AnnotatedDocument) -> usize {
    doc.sentences
        .iter()
        .map(|s| {
            count_runs(
                s.tokens.iter(),
                |t| VERB_PHRASE_TAGS.contains(&t.upos.as_str()),
                |_| true,
            )
        })
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClauseCount {
    pub count: usize,
    /// No dependency annotation was available, so the count is forced to 0.
    pub degraded: bool,
}

/// Tokens whose base relation is clausal. Documents without any parse get 0
/// and the degraded flag.
pub fn clause_count(doc: &AnnotatedDocument) -> ClauseCount {
    if doc.parse_quality() == ParseQuality::None {
        return ClauseCount {
            count: 0,
            degraded: true,
        };
    }
    let count = doc
        .tokens()
        .filter(|t| t.dep.as_deref().is_some_and(is_clause_relation))
        .count();
    ClauseCount {
        count,
        degraded: false,
    }
}

/// N_ADV / (N_VERB + eps), unclamped. Only UPOS VERB counts as a verb.
pub fn adv_verb_ratio(doc: &AnnotatedDocument, epsilon: f64) -> f64 {
    let adv = doc.tokens().filter(|t| t.upos == "ADV").count() as f64;
    let verb = doc.tokens().filter(|t| t.upos == "VERB").count() as f64;
    adv / (verb + epsilon)
}

/// Clamps into `[0, cap]`.
pub fn winsorize(value: f64, cap: f64) -> f64 {
    value.clamp(0.0, cap)
}

pub(crate) fn is_auxpass(label: &str) -> bool {
    let l = label.trim().to_ascii_lowercase();
    l == "auxpass" || l == "aux:pass"
}

/// Share of VERB tokens that are passive: tagged `VBN`, labelled `auxpass`,
/// or governing an `auxpass` dependent. Zero when there are no verbs.
pub fn passive_ratio(doc: &AnnotatedDocument) -> f64 {
    let mut verbs = 0usize;
    let mut passive = 0usize;
    for s in &doc.sentences {
        for (i, t) in s.tokens.iter().enumerate() {
            if t.upos != "VERB" {
                continue;
            }
            verbs += 1;
            let tagged = t.xpos.as_deref() == Some("VBN");
            let labelled = t.dep.as_deref().is_some_and(is_auxpass);
            let governs = s
                .tokens
                .iter()
                .any(|d| d.head == Head::Index(i) && d.dep.as_deref().is_some_and(is_auxpass));
            if tagged || labelled || governs {
                passive += 1;
            }
        }
    }
    if verbs == 0 {
        0.0
    } else {
        passive as f64 / verbs as f64
    }
}

/// Mean over tokens of 1 + hops to ROOT; 0 for a document without tokens.
pub fn parse_tree_depth(doc: &AnnotatedDocument) -> Result<f64> {
    let mut total = 0usize;
    let mut n = 0usize;
    for s in &doc.sentences {
        let depths = s.depths()?;
        n += depths.len();
        total += depths.iter().sum::<usize>();
    }
    Ok(if n == 0 { 0.0 } else { total as f64 / n as f64 })
}

/// Case-insensitive membership in [`CLAUSE_RELATIONS`] after dropping any
/// `:subtype` suffix.
pub fn is_clause_relation(label: &str) -> bool {
    CLAUSE_RELATIONS.contains(&dep_base(label).as_str())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::AnnotatedSentence;

    fn doc_of(tags: &[&str]) -> AnnotatedDocument {
        let tokens = tags.iter().map(|t| Token::new("w", *t)).collect();
        AnnotatedDocument::new("d", vec![AnnotatedSentence::unparsed("s", tokens)])
    }

    fn parsed(spec: &[(&str, &str, Option<usize>, &str)]) -> AnnotatedSentence {
        let tokens = spec
            .iter()
            .map(|(f, u, h, d)| Token::new(*f, *u).with_dep(h.map_or(Head::Root, Head::Index), *d))
            .collect();
        AnnotatedSentence::parsed("p", tokens, ParseQuality::Full)
    }

    #[test]
    fn pos_ratio_direct() {
        let r = pos_ratios(&doc_of(&["NOUN", "NOUN", "VERB"]));
        assert_eq!(r[0], 2.0 / 3.0);
        assert_eq!(r[1], 1.0 / 3.0);
        assert!(r[2..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn pos_ratio_empty_denominator() {
        assert_eq!(pos_ratios(&doc_of(&["PART", "AUX"])), [0.0; 10]);
    }

    #[test]
    fn pos_ratio_excludes_part() {
        let r = pos_ratios(&doc_of(&["NOUN", "VERB", "ADJ", "PART"]));
        assert_eq!(r[0], 1.0 / 3.0);
    }

    #[test]
    fn sentence_lengths() {
        assert_eq!(avg_sentence_length(&doc_of(&["X"; 5])).unwrap(), 5.0);
        let mut d = doc_of(&["X", "X"]);
        d.sentences.push(doc_of(&["X"; 4]).sentences.remove(0));
        assert_eq!(avg_sentence_length(&d).unwrap(), 3.0);
        let empty = AnnotatedDocument::new("e", vec![]);
        assert!(matches!(
            avg_sentence_length(&empty),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn function_words() {
        let fset = FunctionWordSet::builtin();
        let tokens = vec![Token::new("the", "DET"), Token::new("dog", "NOUN")];
        let d = AnnotatedDocument::new("d", vec![AnnotatedSentence::unparsed("s", tokens)]);
        assert_eq!(function_word_ratio(&d, &fset), 0.5);
        let none = AnnotatedDocument::new(
            "d",
            vec![AnnotatedSentence::unparsed(
                "s",
                vec![Token::new("dog", "NOUN")],
            )],
        );
        assert_eq!(function_word_ratio(&none, &fset), 0.0);
        let upper = AnnotatedDocument::new(
            "d",
            vec![AnnotatedSentence::unparsed(
                "s",
                vec![
                    Token::new("The", "DET"),
                    Token::new("DOG", "NOUN"),
                    Token::new("And", "CCONJ"),
                ],
            )],
        );
        assert_eq!(function_word_ratio(&upper, &fset), 2.0 / 3.0);
    }

    #[test]
    fn noun_phrases() {
        assert_eq!(
            np_count(&doc_of(&["ADJ", "NOUN", "VERB", "NOUN"]), false),
            2
        );
        assert_eq!(np_count(&doc_of(&["VERB", "VERB"]), false), 0);
        assert_eq!(np_count(&doc_of(&["ADJ", "VERB", "NOUN"]), false), 2);
        assert_eq!(np_count(&doc_of(&["ADJ", "VERB", "NOUN"]), true), 1);
    }

    #[test]
    fn runs_stop_at_sentence_boundaries() {
        let mut d = doc_of(&["VERB", "NOUN"]);
        d.sentences
            .push(doc_of(&["NOUN", "AUX"]).sentences.remove(0));
        assert_eq!(np_count(&d, false), 2);
        assert_eq!(vp_count(&d), 2);
    }

    #[test]
    fn verb_phrases() {
        assert_eq!(vp_count(&doc_of(&["AUX", "VERB"])), 1);
        assert_eq!(vp_count(&doc_of(&["VERB", "NOUN", "VERB"])), 2);
    }

    #[test]
    fn clauses() {
        let s = parsed(&[
            ("I", "PRON", Some(1), "nsubj"),
            ("think", "VERB", None, "root"),
            ("so", "ADV", Some(1), "ccomp"),
        ]);
        let d = AnnotatedDocument::new("d", vec![s]);
        assert_eq!(
            clause_count(&d),
            ClauseCount {
                count: 1,
                degraded: false
            }
        );

        let s = parsed(&[
            ("go", "VERB", None, "root"),
            ("now", "ADV", Some(0), "advmod"),
        ]);
        assert_eq!(clause_count(&AnnotatedDocument::new("d", vec![s])).count, 0);

        let unparsed = clause_count(&doc_of(&["VERB"]));
        assert!(unparsed.degraded);
        assert_eq!(unparsed.count, 0);
    }

    #[test]
    fn clause_subtypes_and_case() {
        assert!(is_clause_relation("acl:relcl"));
        assert!(is_clause_relation("ADVCL"));
        assert!(!is_clause_relation("nsubj"));
    }

    #[test]
    fn adverb_verb_ratio() {
        let r = adv_verb_ratio(&doc_of(&["ADV", "VERB", "VERB"]), 1e-6);
        assert_eq!(r, 1.0 / (2.0 + 1e-6));
        assert!((r - 0.49999975).abs() < 1e-12);
        assert_eq!(adv_verb_ratio(&doc_of(&["VERB"]), 1e-6), 0.0);
        let raw = adv_verb_ratio(&doc_of(&["ADV", "ADV"]), 1e-6);
        assert!((raw - 2e6).abs() < 1e-3);
        assert_eq!(winsorize(raw, 100.0), 100.0);
        // auxiliaries are not verbs here
        assert_eq!(adv_verb_ratio(&doc_of(&["ADV", "AUX"]), 1e-6), 1.0 / 1e-6);
    }

    #[test]
    fn passive() {
        assert_eq!(passive_ratio(&doc_of(&["NOUN", "AUX"])), 0.0);
        let tokens = vec![
            Token::new("eaten", "VERB").with_xpos("VBN"),
            Token::new("ran", "VERB").with_xpos("VBD"),
        ];
        let d = AnnotatedDocument::new("d", vec![AnnotatedSentence::unparsed("s", tokens)]);
        assert_eq!(passive_ratio(&d), 0.5);

        let s = parsed(&[
            ("it", "PRON", Some(2), "nsubj:pass"),
            ("was", "AUX", Some(2), "aux:pass"),
            ("taken", "VERB", None, "root"),
            ("and", "CCONJ", Some(4), "cc"),
            ("left", "VERB", Some(2), "conj"),
        ]);
        assert_eq!(passive_ratio(&AnnotatedDocument::new("d", vec![s])), 0.5);
    }

    #[test]
    fn depth() {
        let single = parsed(&[("go", "VERB", None, "root")]);
        assert_eq!(
            parse_tree_depth(&AnnotatedDocument::new("d", vec![single])).unwrap(),
            1.0
        );
        let chain = parsed(&[
            ("a", "DET", Some(1), "det"),
            ("b", "NOUN", Some(2), "nsubj"),
            ("c", "VERB", None, "root"),
        ]);
        assert_eq!(
            parse_tree_depth(&AnnotatedDocument::new("d", vec![chain])).unwrap(),
            2.0
        );
        assert_eq!(
            parse_tree_depth(&AnnotatedDocument::new("d", vec![])).unwrap(),
            0.0
        );
    }
}
