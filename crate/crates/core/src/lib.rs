//! Grammar-aware feature engineering: an 18-value syntactic feature vector
//! extracted from annotated text, fused with frozen contextual embeddings and
//! fed to small softmax heads for document classification and token tagging.

pub mod annotate;
pub mod corpus;
pub mod digest;
pub mod error;
pub mod eval;
pub mod fuse;
pub mod grammar;
pub mod matrix;
pub mod model;
pub mod par;
pub mod pipeline;
pub mod synthetic;

pub use error::{Error, Result};
