//! Embedding architectures and their shared trainer.

mod charword;
mod checkpoint;
mod grad;
mod model;
mod train;

pub use charword::{CharWordVocab, CHAR_PREFIX};
pub use crate::optim::SparseRows;
pub use grad::Gradients;
pub use model::{ContextRef, EmbeddingModel, ModelKind, ModelShape, OutputLayer};
pub use train::{train_epochs, EpochStats, SampleTrainer, TrainConfig};
