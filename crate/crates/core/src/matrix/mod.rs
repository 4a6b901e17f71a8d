//! Co-occurrence counting and log-count matrix factorization.

mod cooccur;
mod equivalence;
mod factor;

pub use cooccur::{count_cooccurrences, count_document_ids, CooccurrenceMatrix};
pub use equivalence::{skipgram_equivalence_report, EquivalenceReport};
pub use factor::{
    factorize_log_counts, glove_weight, objective, train_factorization, train_glove, FactorConfig, FactorFit,
    FactorModel, FactorObjective, LogMode, DEFAULT_ALPHA, DEFAULT_X_MAX,
};
