//! CoNLL-U reader and writer.
//!
//! Besides the standard `# sent_id` comment, documents are delimited by
//! `# newdoc id = ...`, carry an optional `# doc_label = ...`, and
//! sentences annotated by the fallback parser carry
//! `# parse_quality = heuristic`. NER tags live in MISC as `NER=<tag>`.
//! Without any `newdoc` marker every sentence is its own document.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{AnnotatedDocument, AnnotatedSentence, Head, ParseQuality, Token};
use crate::error::{Error, Result};

pub fn load_conllu(path: impl AsRef<Path>) -> Result<Vec<AnnotatedDocument>> {
    let path = path.as_ref();
    let data = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_conllu(&data)
}

pub fn write_conllu(docs: &[AnnotatedDocument], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = render_conllu(docs)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

struct PendingToken {
    line: usize,
    token: Token,
    head: Option<usize>,
}

#[derive(Default)]
struct SentenceState {
    id: Option<String>,
    quality: Option<ParseQuality>,
    tokens: Vec<PendingToken>,
    first_line: usize,
}

struct DocBuilder {
    doc: AnnotatedDocument,
}

pub fn parse_conllu(data: &str) -> Result<Vec<AnnotatedDocument>> {
    let mut docs: Vec<DocBuilder> = Vec::new();
    let mut grouped = false;
    let mut sentence = SentenceState::default();
    let mut sentence_count = 0usize;

    let mut finish =
        |sentence: &mut SentenceState, docs: &mut Vec<DocBuilder>, grouped: bool| -> Result<()> {
            if sentence.tokens.is_empty() {
                *sentence = SentenceState::default();
                return Ok(());
            }
            sentence_count += 1;
            let state = std::mem::take(sentence);
            let id = state.id.unwrap_or_else(|| sentence_count.to_string());
            let built = build_sentence(id, state.quality, state.tokens)?;
            if grouped {
                let builder = docs.last_mut().ok_or_else(|| {
                    Error::format(state.first_line, "sentence outside of a document")
                })?;
                builder.doc.sentences.push(built);
            } else {
                docs.push(DocBuilder {
                    doc: AnnotatedDocument::new(built.id.clone(), vec![built]),
                });
            }
            Ok(())
        };

    for (idx, raw) in data.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            finish(&mut sentence, &mut docs, grouped)?;
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if !sentence.tokens.is_empty() {
                return Err(Error::format(line_no, "comment inside a sentence"));
            }
            let (key, value) = match comment.split_once('=') {
                Some((k, v)) => (k.trim(), Some(v.trim())),
                None => (comment.trim(), None),
            };
            match key {
                "newdoc" | "newdoc id" => {
                    grouped = true;
                    let id = value
                        .filter(|v| !v.is_empty())
                        .map(str::to_string)
                        .unwrap_or_else(|| format!("doc-{}", docs.len() + 1));
                    docs.push(DocBuilder {
                        doc: AnnotatedDocument::new(id, Vec::new()),
                    });
                }
                "doc_label" => {
                    if let (Some(b), Some(v)) = (docs.last_mut().filter(|_| grouped), value) {
                        b.doc.label = Some(v.to_string());
                    }
                }
                "sent_id" => sentence.id = value.map(str::to_string),
                "parse_quality" => {
                    let q: ParseQuality = value
                        .unwrap_or_default()
                        .parse()
                        .map_err(|_| Error::format(line_no, "invalid parse_quality"))?;
                    sentence.quality = Some(q);
                }
                _ => {}
            }
            continue;
        }

        let cols: Vec<&str> = if line.contains('\t') {
            line.split('\t').collect()
        } else {
            line.split_whitespace().collect()
        };
        if cols.len() != 10 {
            return Err(Error::format(
                line_no,
                format!("expected 10 columns, found {}", cols.len()),
            ));
        }
        let id_col = cols[0];
        if id_col.contains('-') || id_col.contains('.') {
            // multiword ranges and empty nodes are not syntactic words
            continue;
        }
        let position: usize = id_col
            .parse()
            .map_err(|_| Error::format(line_no, format!("invalid token id `{id_col}`")))?;
        if position != sentence.tokens.len() + 1 {
            return Err(Error::format(
                line_no,
                format!("token id {position} out of sequence"),
            ));
        }
        if sentence.tokens.is_empty() {
            sentence.first_line = line_no;
        }
        let opt = |s: &str| (s != "_").then(|| s.to_string());
        let head = match cols[6] {
            "_" => None,
            h => Some(
                h.parse::<usize>()
                    .map_err(|_| Error::format(line_no, format!("invalid head `{h}`")))?,
            ),
        };
        let ner = cols[9]
            .split('|')
            .find_map(|kv| kv.strip_prefix("NER="))
            .map(str::to_string);
        sentence.tokens.push(PendingToken {
            line: line_no,
            token: Token {
                form: cols[1].to_string(),
                lemma: opt(cols[2]),
                upos: cols[3].to_string(),
                xpos: opt(cols[4]),
                dep: opt(cols[7]),
                head: Head::Root,
                ner,
            },
            head,
        });
    }
    finish(&mut sentence, &mut docs, grouped)?;

    let mut out = Vec::with_capacity(docs.len());
    for b in docs {
        if b.doc.sentences.is_empty() {
            return Err(Error::Contract(format!(
                "document {} has no sentences",
                b.doc.id
            )));
        }
        out.push(b.doc);
    }
    Ok(out)
}

fn build_sentence(
    id: String,
    quality: Option<ParseQuality>,
    pending: Vec<PendingToken>,
) -> Result<AnnotatedSentence> {
    let n = pending.len();
    let has_parse = pending.iter().any(|p| p.head.is_some());
    let mut tokens = Vec::with_capacity(n);
    for p in pending {
        let mut token = p.token;
        token.head = match p.head {
            None if has_parse => {
                return Err(Error::format(p.line, "missing head in a parsed sentence"))
            }
            None | Some(0) => Head::Root,
            Some(h) if h > n => {
                return Err(Error::format(
                    p.line,
                    format!("head {h} out of range for a {n}-token sentence"),
                ))
            }
            Some(h) => Head::Index(h - 1),
        };
        tokens.push(token);
    }
    let sentence = if has_parse {
        AnnotatedSentence::parsed(id, tokens, quality.unwrap_or(ParseQuality::Full))
    } else {
        AnnotatedSentence {
            id,
            tokens,
            has_parse: false,
            parse_quality: ParseQuality::None,
        }
    };
    sentence.validate()?;
    Ok(sentence)
}

pub fn render_conllu(docs: &[AnnotatedDocument]) -> Result<String> {
    let mut out = String::new();
    for doc in docs {
        check_field(&doc.id, "document id")?;
        let _ = writeln!(out, "# newdoc id = {}", doc.id);
        if let Some(label) = &doc.label {
            check_field(label, "document label")?;
            let _ = writeln!(out, "# doc_label = {label}");
        }
        for s in &doc.sentences {
            check_field(&s.id, "sentence id")?;
            let _ = writeln!(out, "# sent_id = {}", s.id);
            if s.has_parse && s.parse_quality != ParseQuality::Full {
                let _ = writeln!(out, "# parse_quality = {}", s.parse_quality);
            }
            for (i, t) in s.tokens.iter().enumerate() {
                for field in [
                    Some(&t.form),
                    t.lemma.as_ref(),
                    Some(&t.upos),
                    t.xpos.as_ref(),
                ]
                .into_iter()
                .flatten()
                {
                    if field.contains(['\t', '\n', '\r']) {
                        return Err(Error::Input(format!(
                            "field `{}` of sentence {} contains a tab or newline",
                            field.escape_debug(),
                            s.id
                        )));
                    }
                }
                let head = match (s.has_parse, t.head) {
                    (false, _) => "_".to_string(),
                    (true, Head::Root) => "0".to_string(),
                    (true, Head::Index(h)) => (h + 1).to_string(),
                };
                let misc = t
                    .ner
                    .as_ref()
                    .map(|n| format!("NER={n}"))
                    .unwrap_or_else(|| "_".into());
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t_\t{}\t{}\t_\t{}",
                    i + 1,
                    t.form,
                    t.lemma.as_deref().unwrap_or("_"),
                    t.upos,
                    t.xpos.as_deref().unwrap_or("_"),
                    head,
                    t.dep.as_deref().unwrap_or("_"),
                    misc
                );
            }
            out.push('\n');
        }
    }
    Ok(out)
}

fn check_field(value: &str, what: &str) -> Result<()> {
    if value.contains(['\n', '\r']) {
        return Err(Error::Input(format!("{what} contains a newline")));
    }
    Ok(())
}
