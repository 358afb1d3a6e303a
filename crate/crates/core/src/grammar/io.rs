use std::fs;
use std::path::Path;

use super::{GrammarVector, FEATURE_NAMES, GRAMMAR_DIM, SCHEMA_VERSION};
use crate::error::{Error, Result};

/// CSV with columns `doc_id, schema_version, parse_quality` followed by the
/// 18 feature names. Floats use the shortest representation that parses
/// back to the same value.
pub fn render_vectors_csv(vectors: &[GrammarVector]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let mut header = vec!["doc_id", "schema_version", "parse_quality"];
    header.extend(FEATURE_NAMES);
    w.write_record(&header).map_err(csv_err)?;
    for v in vectors {
        let mut row = vec![
            v.doc_id.clone(),
            SCHEMA_VERSION.to_string(),
            v.parse_quality.to_string(),
        ];
        row.extend(v.values.iter().map(|x| x.to_string()));
        w.write_record(&row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Input(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Input(e.to_string()))
}

pub fn write_vectors_csv(vectors: &[GrammarVector], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, render_vectors_csv(vectors)?).map_err(|e| Error::io(path, e))
}

pub fn read_vectors_csv(path: impl AsRef<Path>) -> Result<Vec<GrammarVector>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_vectors_csv(&text)
}

pub fn parse_vectors_csv(text: &str) -> Result<Vec<GrammarVector>> {
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| Error::format(1, e.to_string()))?;
    let expected: Vec<&str> = ["doc_id", "schema_version", "parse_quality"]
        .into_iter()
        .chain(FEATURE_NAMES)
        .collect();
    if header.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Schema(
            "grammar vector header does not match the schema".into(),
        ));
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::format(line, e.to_string()))?;
        if &rec[1] != SCHEMA_VERSION {
            return Err(Error::format(
                line,
                format!("unknown schema version `{}`", &rec[1]),
            ));
        }
        let parse_quality = rec[2]
            .parse()
            .map_err(|_| Error::format(line, "bad parse_quality"))?;
        let mut values = [0.0; GRAMMAR_DIM];
        for (k, v) in values.iter_mut().enumerate() {
            let cell = &rec[3 + k];
            *v = cell
                .parse()
                .map_err(|_| Error::format(line, format!("bad value `{cell}`")))?;
        }
        out.push(GrammarVector {
            doc_id: rec[0].to_string(),
            values,
            parse_quality,
        });
    }
    Ok(out)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Input(e.to_string())
}
