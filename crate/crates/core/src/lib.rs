//! Training and evaluation workbench for distributed word representations.
//!
//! The crate groups the pieces needed to train and compare word and
//! character embeddings:
//!
//! * [`corpus`]: vocabulary construction, token normalization, subsampling
//!   and window extraction.
//! * [`optim`]: parameter storage, SGD/AdaGrad, the noise sampler and a
//!   finite-difference gradient checker.
//! * [`embedding`]: six embedding architectures (Skip-gram, CBOW, Order,
//!   LBL, NNLM, C&W) sharing one trainer, plus joint character-word training.
//! * [`matrix`]: co-occurrence counting, GloVe and log-count factorization,
//!   and the Skip-gram/factorization equivalence report.
//! * [`eval`]: similarity, synonym choice, analogy, nearest neighbours,
//!   average-vector classification and performance gain ratio.
//! * [`segment`]: BMES character tagging segmenter with Viterbi decoding.
//! * [`textclass`]: recurrent convolutional and window convolutional
//!   document classifiers.
//! * [`io`]: text embedding files and the binary checkpoint container.

pub mod corpus;
pub mod embedding;
mod error;
pub mod eval;
pub mod io;
pub mod matrix;
pub mod optim;
pub mod rng;
pub mod segment;
pub mod textclass;

pub use error::{Error, Result};
