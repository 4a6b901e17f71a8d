//! Embedding tables and on-disk formats.

mod container;
mod table;

pub use container::{Container, Tensor, MAGIC};
pub use table::EmbeddingTable;
