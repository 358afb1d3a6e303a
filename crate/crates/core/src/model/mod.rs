//! Lightweight softmax heads trained with mini-batch SGD on cross-entropy.

mod file;
mod head;
mod train;

pub use self::file::ModelFile;
pub use self::head::{
    argmax, glorot_bound, init_head, softmax, Head, HeadConfig, Layer, LOG_CLAMP,
};
pub use self::train::{
    dataset_loss, gradient, gradient_check, loss, predict, predict_tokens, predict_with, train,
    Dataset, TrainTrace,
};
