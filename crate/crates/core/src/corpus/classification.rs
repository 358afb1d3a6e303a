use std::fs::File;
use std::io::Read;
use std::path::Path;

use super::{AnnotatedDocument, LoadReport, LoadWarning, Loaded};
use crate::error::{Error, Result};

/// Column names for a classification CSV.
#[derive(Clone, Debug)]
pub struct CsvColumns {
    pub text: String,
    pub label: String,
    /// Optional id column; rows are named `doc-<n>` (1-based data row) otherwise.
    pub id: Option<String>,
}

impl CsvColumns {
    pub fn new(text: impl Into<String>, label: impl Into<String>) -> Self {
        CsvColumns {
            text: text.into(),
            label: label.into(),
            id: None,
        }
    }
}

pub fn load_classification_csv(path: impl AsRef<Path>, columns: &CsvColumns) -> Result<Loaded> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_classification_csv(file, columns)
}

pub(crate) fn read_classification_csv<R: Read>(reader: R, columns: &CsvColumns) -> Result<Loaded> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::format(1, e.to_string()))?
        .clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Schema(format!("missing column `{name}`")))
    };
    let text_idx = find(&columns.text)?;
    let label_idx = find(&columns.label)?;
    let id_idx = columns.id.as_deref().map(find).transpose()?;

    let mut documents = Vec::new();
    let mut report = LoadReport::default();
    for (row, record) in rdr.records().enumerate() {
        let line = record
            .as_ref()
            .ok()
            .and_then(|r| r.position())
            .map(|p| p.line() as usize)
            .unwrap_or(row + 2);
        let record = record.map_err(|e| Error::format(line, e.to_string()))?;
        let text = record.get(text_idx).unwrap_or_default();
        if text.trim().is_empty() {
            report.warnings.push(LoadWarning {
                line,
                message: "empty text cell; row skipped".into(),
            });
            continue;
        }
        let id = match id_idx {
            Some(i) => record.get(i).unwrap_or_default().to_string(),
            None => format!("doc-{}", row + 1),
        };
        let label = record.get(label_idx).unwrap_or_default().to_string();
        let mut doc = AnnotatedDocument::new(id, Vec::new()).with_label(label);
        doc.text = Some(text.to_string());
        documents.push(doc);
        report.consumed += 1;
    }
    Ok(Loaded { documents, report })
}
