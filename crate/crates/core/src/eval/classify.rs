use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use crate::io::EmbeddingTable;
use crate::optim::{dot, log_softmax, softmax};
use crate::rng::{self, SeedStreams};
use crate::{Error, Result};

/// Term-frequency weighted mean of the in-vocabulary token vectors.
pub fn avg_document_vector<S: AsRef<str>>(emb: &EmbeddingTable, doc: &[S]) -> Result<Vec<f64>> {
    let mut tf: BTreeMap<usize, f64> = BTreeMap::new();
    for t in doc {
        if let Some(id) = emb.id(t.as_ref()) {
            *tf.entry(id).or_insert(0.0) += 1.0;
        }
    }
    if tf.is_empty() {
        return Err(Error::InsufficientData("document has no in-vocabulary token".into()));
    }
    let mut out = vec![0.0; emb.dim()];
    let mut total = 0.0;
    for (&id, &w) in &tf {
        for (o, v) in out.iter_mut().zip(emb.row(id)) {
            *o += w * v;
        }
        total += w;
    }
    out.iter_mut().for_each(|v| *v /= total);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogisticConfig {
    /// L2 penalty `λ/2 ‖W‖²` on the weights (not the biases).
    pub l2: f64,
    pub epochs: usize,
    pub lr: f64,
    pub seed: u64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            l2: 1e-4,
            epochs: 20,
            lr: 0.1,
            seed: 1,
        }
    }
}

/// Multinomial logistic regression.
#[derive(Clone, Debug, PartialEq)]
pub struct LogisticClassifier {
    classes: usize,
    dim: usize,
    /// Row-major `classes × dim`.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl LogisticClassifier {
    pub fn zeros(classes: usize, dim: usize) -> Self {
        LogisticClassifier {
            classes,
            dim,
            weights: vec![0.0; classes * dim],
            bias: vec![0.0; classes],
        }
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    fn scores(&self, x: &[f64]) -> Vec<f64> {
        (0..self.classes)
            .map(|c| self.bias[c] + dot(&self.weights[c * self.dim..(c + 1) * self.dim], x))
            .collect()
    }

    pub fn log_probs(&self, x: &[f64]) -> Vec<f64> {
        log_softmax(&self.scores(x))
    }

    /// Highest-scoring class, lowest index on ties.
    pub fn classify(&self, x: &[f64]) -> usize {
        let s = self.scores(x);
        (0..self.classes).fold(0, |best, c| if s[c] > s[best] { c } else { best })
    }

    pub fn accuracy(&self, xs: &[Vec<f64>], ys: &[usize]) -> f64 {
        if xs.is_empty() {
            return 0.0;
        }
        let hits = xs.iter().zip(ys).filter(|(x, &y)| self.classify(x) == y).count();
        hits as f64 / xs.len() as f64
    }

    /// Regularized log-loss of one example and its gradient as `(loss, dW, db)`.
    pub fn loss_grad(&self, x: &[f64], y: usize, l2: f64) -> (f64, Vec<f64>, Vec<f64>) {
        let s = self.scores(x);
        let p = softmax(&s);
        let loss = -log_softmax(&s)[y] + 0.5 * l2 * dot(&self.weights, &self.weights);
        let mut gw: Vec<f64> = self.weights.iter().map(|w| l2 * w).collect();
        let mut gb = vec![0.0; self.classes];
        for c in 0..self.classes {
            let d = p[c] - f64::from(u8::from(c == y));
            gb[c] = d;
            for (g, xv) in gw[c * self.dim..(c + 1) * self.dim].iter_mut().zip(x) {
                *g += d * xv;
            }
        }
        (loss, gw, gb)
    }
}

/// SGD on the log-loss with a proximal shrink for the L2 term.
pub fn train_logistic_classifier(
    features: &[Vec<f64>],
    labels: &[usize],
    cfg: &LogisticConfig,
) -> Result<LogisticClassifier> {
    if features.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: features.len(),
            actual: labels.len(),
        });
    }
    let dim = features.first().map_or(0, Vec::len);
    if features.iter().any(|f| f.len() != dim) {
        return Err(Error::invalid("feature vectors have different lengths"));
    }
    let classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut seen = labels.to_vec();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() < 2 {
        return Err(Error::InsufficientData("training set needs at least two classes".into()));
    }
    let mut model = LogisticClassifier::zeros(classes, dim);
    let mut order: Vec<usize> = (0..features.len()).collect();
    let mut rng = SeedStreams::new(cfg.seed).stream(rng::ORDER);
    let shrink = 1.0 / (1.0 + cfg.lr * cfg.l2);
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for &k in &order {
            let (_, gw, gb) = model.loss_grad(&features[k], labels[k], 0.0);
            for (w, g) in model.weights.iter_mut().zip(&gw) {
                *w = (*w - cfg.lr * g) * shrink;
            }
            for (b, g) in model.bias.iter_mut().zip(&gb) {
                *b -= cfg.lr * g;
            }
        }
    }
    if model.weights.iter().chain(&model.bias).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("logistic classifier weights".into()));
    }
    Ok(model)
}
