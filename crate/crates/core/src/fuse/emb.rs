//! EMB1: a plain-text container for frozen embeddings.
//!
//! ```text
//! EMB1 <record_count> <d_b>
//! <doc_id> <n_rows>
//! <d_b floats>      (n_rows lines)
//! ...
//! ```
//!
//! The last whitespace-separated field of a record header is the row count;
//! everything before it is the document id, so ids may contain spaces.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Embeddings keyed by document id, all of one dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingSet {
    pub dim: usize,
    pub records: BTreeMap<String, EmbeddingMatrix>,
}

impl EmbeddingSet {
    pub fn get(&self, doc_id: &str) -> Option<&EmbeddingMatrix> {
        self.records.get(doc_id)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Ids from `wanted` that have no record, in the given order.
    pub fn missing<'a>(&self, wanted: impl IntoIterator<Item = &'a str>) -> Vec<String> {
        wanted
            .into_iter()
            .filter(|id| !self.records.contains_key(*id))
            .map(str::to_string)
            .collect()
    }
}

pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingSet> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_embeddings(&text)
}

pub fn parse_embeddings(text: &str) -> Result<EmbeddingSet> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::format(1, "missing EMB1 header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (count, dim) = match fields.as_slice() {
        ["EMB1", count, dim] => (
            count
                .parse::<usize>()
                .map_err(|_| Error::format(1, "bad record count"))?,
            dim.parse::<usize>()
                .map_err(|_| Error::format(1, "bad dimension"))?,
        ),
        _ => return Err(Error::format(1, "expected `EMB1 <record_count> <d_b>`")),
    };
    if dim == 0 {
        return Err(Error::format(1, "dimension must be at least 1"));
    }

    let mut records = BTreeMap::new();
    for record in 0..count {
        let (_, head) = lines
            .next()
            .ok_or_else(|| Error::record(record, "file ends before the declared record count"))?;
        let head = head.trim();
        let (doc_id, n_rows) = head
            .rsplit_once(char::is_whitespace)
            .ok_or_else(|| Error::record(record, "expected `<doc_id> <n_rows>`"))?;
        let doc_id = doc_id.trim().to_string();
        let n_rows: usize = n_rows
            .parse()
            .map_err(|_| Error::record(record, format!("bad row count `{n_rows}`")))?;
        if n_rows == 0 {
            return Err(Error::record(record, "record has no rows"));
        }
        let mut data = Vec::with_capacity(n_rows * dim);
        for _ in 0..n_rows {
            let (_, line) = lines
                .next()
                .ok_or_else(|| Error::record(record, "record ends early"))?;
            let before = data.len();
            for cell in line.split_whitespace() {
                let v: f64 = cell
                    .parse()
                    .map_err(|_| Error::record(record, format!("bad value `{cell}`")))?;
                if !v.is_finite() {
                    return Err(Error::record(record, format!("non-finite value `{cell}`")));
                }
                data.push(v);
            }
            let got = data.len() - before;
            if got != dim {
                return Err(Error::record(
                    record,
                    format!("row has {got} values, expected {dim}"),
                ));
            }
        }
        let matrix = Matrix::from_vec(n_rows, dim, data)?;
        if records.contains_key(&doc_id) {
            return Err(Error::record(
                record,
                format!("duplicate doc_id `{doc_id}`"),
            ));
        }
        records.insert(doc_id.clone(), EmbeddingMatrix { doc_id, matrix });
    }
    if let Some((i, _)) = lines.next() {
        return Err(Error::format(i + 1, "data after the declared record count"));
    }
    Ok(EmbeddingSet { dim, records })
}

/// Renders records in the given order. All records must share one width.
pub fn render_embeddings<'a>(
    dim: usize,
    records: impl IntoIterator<Item = &'a EmbeddingMatrix>,
) -> Result<String> {
    let records: Vec<&EmbeddingMatrix> = records.into_iter().collect();
    let mut out = String::new();
    let _ = writeln!(out, "EMB1 {} {}", records.len(), dim);
    let mut seen = HashSet::new();
    for (i, r) in records.iter().enumerate() {
        if r.dim() != dim {
            return Err(Error::record(
                i,
                format!("width {} differs from {dim}", r.dim()),
            ));
        }
        if r.doc_id.trim().is_empty()
            || r.doc_id.contains(['\n', '\r'])
            || r.doc_id != r.doc_id.trim()
        {
            return Err(Error::record(
                i,
                "doc_id must be non-empty single-line text",
            ));
        }
        if !seen.insert(r.doc_id.as_str()) {
            return Err(Error::record(i, format!("duplicate doc_id `{}`", r.doc_id)));
        }
        if r.matrix.rows() == 0 {
            return Err(Error::record(i, "record has no rows"));
        }
        let _ = writeln!(out, "{} {}", r.doc_id, r.matrix.rows());
        for row in r.matrix.iter_rows() {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "{}", cells.join(" "));
        }
    }
    Ok(out)
}

pub fn write_embeddings<'a>(
    path: impl AsRef<Path>,
    dim: usize,
    records: impl IntoIterator<Item = &'a EmbeddingMatrix>,
) -> Result<()> {
    let path = path.as_ref();
    let text = render_embeddings(dim, records)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
