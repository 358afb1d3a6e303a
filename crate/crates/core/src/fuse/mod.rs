//! Frozen embeddings, grammar standardization and concatenation fusion.
//!
//! Fused rows are `[embedding || standardized grammar vector]`, embedding
//! first. Nothing here mutates an [`EmbeddingMatrix`].

mod emb;
mod standardize;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use self::emb::{
    load_embeddings, parse_embeddings, render_embeddings, write_embeddings, EmbeddingSet,
};
pub use self::standardize::{fit_standardizer, Standardizer};

use crate::corpus::AnnotatedDocument;
use crate::error::{Error, Result};
use crate::grammar::GRAMMAR_DIM;
use crate::matrix::Matrix;
use crate::par::{self, Execution};

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingMatrix {
    pub doc_id: String,
    pub matrix: Matrix,
}

impl EmbeddingMatrix {
    pub fn new(doc_id: impl Into<String>, matrix: Matrix) -> Self {
        EmbeddingMatrix {
            doc_id: doc_id.into(),
            matrix,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn is_pooled(&self) -> bool {
        self.matrix.rows() == 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FusedMatrix {
    pub doc_id: String,
    pub embedding_dim: usize,
    pub matrix: Matrix,
}

impl FusedMatrix {
    pub fn width(&self) -> usize {
        self.matrix.cols()
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    /// Splits back into the embedding block and the grammar block.
    pub fn unfuse(&self) -> (Matrix, Matrix) {
        (
            self.matrix.columns(0, self.embedding_dim),
            self.matrix.columns(self.embedding_dim, self.matrix.cols()),
        )
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pooling {
    #[default]
    Mean,
}

/// Row `i` is `e_i || g`.
pub fn fuse_tokens(embeddings: &EmbeddingMatrix, grammar: &[f64; GRAMMAR_DIM]) -> FusedMatrix {
    let d = embeddings.dim();
    let mut m = Matrix::zeros(embeddings.rows(), d + GRAMMAR_DIM);
    for (i, e) in embeddings.matrix.iter_rows().enumerate() {
        let row = m.row_mut(i);
        row[..d].copy_from_slice(e);
        row[d..].copy_from_slice(grammar);
    }
    FusedMatrix {
        doc_id: embeddings.doc_id.clone(),
        embedding_dim: d,
        matrix: m,
    }
}

/// One row: pooled token embeddings followed by `g`.
pub fn fuse_document(
    embeddings: &EmbeddingMatrix,
    grammar: &[f64; GRAMMAR_DIM],
    pooling: Pooling,
) -> Result<FusedMatrix> {
    let pooled = pool(embeddings, pooling)?;
    let d = pooled.len();
    let mut row = pooled;
    row.extend_from_slice(grammar);
    Ok(FusedMatrix {
        doc_id: embeddings.doc_id.clone(),
        embedding_dim: d,
        matrix: Matrix::from_vec(1, d + GRAMMAR_DIM, row)?,
    })
}

pub fn pool(embeddings: &EmbeddingMatrix, pooling: Pooling) -> Result<Vec<f64>> {
    match pooling {
        Pooling::Mean => embeddings.matrix.column_means().ok_or_else(|| {
            Error::Size(format!(
                "embedding matrix for {} has no rows",
                embeddings.doc_id
            ))
        }),
    }
}

/// Deterministic stand-in embedder.
///
/// Each token's row depends only on its lowercased form and `seed`:
/// `k = min(4, dim)` distinct hashed coordinates receive `±1/sqrt(k)`, so
/// every row has unit norm.
pub fn hash_embed(doc: &AnnotatedDocument, dim: usize, seed: u64) -> Result<EmbeddingMatrix> {
    if dim == 0 {
        return Err(Error::Config(
            "embedding dimension must be at least 1".into(),
        ));
    }
    let forms: Vec<&str> = doc.tokens().map(|t| t.form.as_str()).collect();
    let mut m = Matrix::zeros(forms.len(), dim);
    for (i, form) in forms.iter().enumerate() {
        hash_row(form, dim, seed, m.row_mut(i));
    }
    Ok(EmbeddingMatrix::new(doc.id.clone(), m))
}

/// [`hash_embed`] over a corpus, keyed by document id.
pub fn hash_embed_all(
    docs: &[AnnotatedDocument],
    dim: usize,
    seed: u64,
    exec: Execution,
) -> Result<EmbeddingSet> {
    let mats = par::try_map(docs, exec, |d| hash_embed(d, dim, seed))?;
    let mut records = BTreeMap::new();
    for m in mats {
        let id = m.doc_id.clone();
        if records.insert(id.clone(), m).is_some() {
            return Err(Error::Input(format!("duplicate document id `{id}`")));
        }
    }
    Ok(EmbeddingSet { dim, records })
}

fn hash_row(form: &str, dim: usize, seed: u64, row: &mut [f64]) {
    let k = dim.min(4);
    let scale = 1.0 / (k as f64).sqrt();
    let base = fnv1a(form.to_lowercase().as_bytes()) ^ splitmix64(seed);
    let mut placed = 0;
    let mut probe = 0u64;
    while placed < k {
        let h = splitmix64(base.wrapping_add(probe));
        probe += 1;
        let idx = (h % dim as u64) as usize;
        if row[idx] != 0.0 {
            continue;
        }
        row[idx] = if h >> 63 == 1 { -scale } else { scale };
        placed += 1;
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(*b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
