//! Intrinsic and extrinsic evaluation of embedding tables.

mod analogy;
mod classify;
mod datasets;
mod pgr;
mod similarity;

pub use analogy::{eval_analogy, eval_analogy_within, AnalogyQuestion, AnalogyReport, CategoryScore};
pub use classify::{
    avg_document_vector, train_logistic_classifier, LogisticClassifier, LogisticConfig,
};
pub use datasets::{
    read_analogy, read_choice, read_labeled_documents, read_similarity, LabeledText,
};
pub use pgr::{pgr, pgr_table, to_percent, PgrInput};
pub use similarity::{
    eval_choice, eval_similarity, nearest_neighbors, ChoiceQuestion, SimilarityDataset, SimilarityItem,
    SimilarityReport,
};

use crate::optim::dot;
use crate::{Error, Result};

/// Cosine of the angle between `u` and `v`.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            actual: v.len(),
        });
    }
    let nu = dot(u, u).sqrt();
    let nv = dot(v, v).sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::invalid("cosine of a zero vector"));
    }
    Ok((dot(u, v) / (nu * nv)).clamp(-1.0, 1.0))
}

/// Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InsufficientData("correlation needs at least two pairs".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::invalid("correlation with a constant sequence"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Unit-normalized copies of every row (zero rows stay zero).
pub(crate) fn normalized_rows(values: &[f64], dim: usize) -> Vec<f64> {
    let mut out = values.to_vec();
    for row in out.chunks_mut(dim) {
        let n = dot(row, row).sqrt();
        if n > 0.0 {
            row.iter_mut().for_each(|v| *v /= n);
        }
    }
    out
}
