use std::fmt;

use log::warn;

use super::CooccurrenceMatrix;
use crate::embedding::EmbeddingModel;
use crate::optim::{dot, log_softmax};
use crate::{Error, Result};

/// Per-column divergence between empirical and model conditionals.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceReport {
    /// `(j, KL(empirical ‖ model))` for every nonzero context column.
    pub columns: Vec<(usize, f64)>,
    /// All-zero columns.
    pub skipped: Vec<usize>,
    pub mean_kl: f64,
    pub max_kl: f64,
}

impl fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "columns: {}", self.columns.len())?;
        writeln!(f, "skipped: {}", self.skipped.len())?;
        writeln!(f, "mean_kl: {:.6e}", self.mean_kl)?;
        write!(f, "max_kl: {:.6e}", self.max_kl)
    }
}

/// Compares `softmax_i(e'(v_i)·e(v_j))` with `x_ij / Σ_k x_kj` column by column.
pub fn skipgram_equivalence_report(matrix: &CooccurrenceMatrix, model: &EmbeddingModel) -> Result<EquivalenceReport> {
    let n = matrix.n();
    if model.output.rows() != n || model.input.rows() < n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: model.output.rows(),
        });
    }
    if model.output.cols() != model.input.cols() {
        return Err(Error::invalid("equivalence report needs a model with dot-product energies"));
    }
    let dense = matrix.to_dense();
    let sums = matrix.column_sums();
    let mut columns = Vec::new();
    let mut skipped = Vec::new();
    for j in 0..n {
        if sums[j] <= 0.0 {
            skipped.push(j);
            continue;
        }
        let e = model.input.row(j);
        let scores: Vec<f64> = (0..n).map(|i| dot(model.output.row(i), e)).collect();
        let log_b = log_softmax(&scores);
        let kl: f64 = (0..n)
            .filter(|&i| dense[i * n + j] > 0.0)
            .map(|i| {
                let p = dense[i * n + j] / sums[j];
                p * (p.ln() - log_b[i])
            })
            .sum();
        columns.push((j, kl.max(0.0)));
    }
    if !skipped.is_empty() {
        warn!("skipped {} all-zero context columns", skipped.len());
    }
    if columns.is_empty() {
        return Err(Error::InsufficientData("every context column is empty".into()));
    }
    let mean_kl = columns.iter().map(|c| c.1).sum::<f64>() / columns.len() as f64;
    let max_kl = columns.iter().map(|c| c.1).fold(0.0, f64::max);
    Ok(EquivalenceReport {
        columns,
        skipped,
        mean_kl,
        max_kl,
    })
}
