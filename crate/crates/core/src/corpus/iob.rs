use std::fs::File;
use std::io::Read;
use std::path::Path;

use super::{is_iob_tag, AnnotatedDocument, AnnotatedSentence, LoadReport, Loaded, Token};
use crate::error::{Error, Result};

/// Loads a four-column (sentence id, word, POS, tag) IOB file.
///
/// The delimiter is a tab when the first line contains one and a comma
/// otherwise. A header row is recognised by its tag cell not being an IOB
/// tag. A non-blank sentence id starts a new sentence even when the id was
/// seen before; each sentence becomes its own document.
pub fn load_ner_iob(path: impl AsRef<Path>) -> Result<Loaded> {
    let path = path.as_ref();
    let mut data = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut data))
        .map_err(|e| Error::io(path, e))?;
    parse_ner_iob(&data)
}

pub fn parse_ner_iob(data: &str) -> Result<Loaded> {
    let first_line = data.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    let delimiter = if first_line.contains('\t') {
        b'\t'
    } else {
        b','
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .delimiter(delimiter)
        .from_reader(data.as_bytes());

    let mut sentences: Vec<(String, Vec<Token>)> = Vec::new();
    let mut report = LoadReport::default();
    let mut first = true;
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::format(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.iter().all(|c| c.trim().is_empty()) {
            continue;
        }
        if record.len() != 4 {
            return Err(Error::format(
                line,
                format!("expected 4 columns, found {}", record.len()),
            ));
        }
        let (sid, word, pos, tag) = (
            record[0].trim(),
            record[1].trim(),
            record[2].trim(),
            record[3].trim(),
        );
        if first {
            first = false;
            if !is_iob_tag(tag) && is_header_cell(tag) {
                report.consumed += 1;
                continue;
            }
        }
        if !is_iob_tag(tag) {
            return Err(Error::format(line, format!("invalid IOB tag `{tag}`")));
        }
        if word.is_empty() {
            return Err(Error::format(line, "empty word"));
        }
        if !sid.is_empty() {
            sentences.push((sid.to_string(), Vec::new()));
        }
        let Some((_, tokens)) = sentences.last_mut() else {
            return Err(Error::format(
                line,
                "continuation row before any sentence id",
            ));
        };
        let mut token = Token::new(word, ptb_to_upos(pos));
        token.xpos = Some(pos.to_string());
        token.ner = Some(tag.to_string());
        tokens.push(token);
        report.consumed += 1;
    }

    let mut seen = std::collections::HashSet::new();
    let documents = sentences
        .into_iter()
        .enumerate()
        .map(|(i, (sid, tokens))| {
            let id = if seen.insert(sid.clone()) {
                sid
            } else {
                format!("{sid}#{}", i + 1)
            };
            AnnotatedDocument::new(id.clone(), vec![AnnotatedSentence::unparsed(id, tokens)])
        })
        .collect();
    Ok(Loaded { documents, report })
}

fn is_header_cell(tag: &str) -> bool {
    tag.chars()
        .all(|c| c.is_alphabetic() || c == '_' || c == ' ')
}

/// Maps a Penn Treebank tag to its universal POS tag. Tags that are already
/// universal pass through unchanged; unknown tags map to `X`.
pub fn ptb_to_upos(tag: &str) -> &str {
    match tag {
        "NN" | "NNS" => "NOUN",
        "NNP" | "NNPS" => "PROPN",
        "VB" | "VBD" | "VBG" | "VBN" | "VBP" | "VBZ" => "VERB",
        "MD" => "AUX",
        "JJ" | "JJR" | "JJS" => "ADJ",
        "RB" | "RBR" | "RBS" | "WRB" => "ADV",
        "PRP" | "PRP$" | "WP" | "WP$" | "EX" => "PRON",
        "IN" => "ADP",
        "DT" | "PDT" | "WDT" => "DET",
        "CD" => "NUM",
        "CC" => "CCONJ",
        "RP" | "TO" | "POS" => "PART",
        "UH" => "INTJ",
        "$" | "#" => "SYM",
        "FW" | "LS" => "X",
        "." | "," | ":" | "``" | "''" | "-LRB-" | "-RRB-" | "LRB" | "RRB" | ";" | "(" | ")"
        | "\"" => "PUNCT",
        "NOUN" | "VERB" | "ADJ" | "ADV" | "PRON" | "PROPN" | "ADP" | "DET" | "NUM" | "CCONJ"
        | "SCONJ" | "AUX" | "PART" | "INTJ" | "PUNCT" | "SYM" => tag,
        _ => "X",
    }
}
