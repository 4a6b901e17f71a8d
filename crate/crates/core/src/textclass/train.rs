use log::info;
use rand::seq::SliceRandom;

use super::{DocModel, Document};
use crate::rng::{self, SeedStreams};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ClassifierConfig {
    pub lr: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            lr: 0.01,
            epochs: 10,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub mean_loss: f64,
    pub train_accuracy: f64,
    pub dev_accuracy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainReport {
    /// 1-based epoch of the kept model; 0 when no epoch improved on the initialization.
    pub best_epoch: usize,
    pub best_dev_accuracy: f64,
    pub epochs: Vec<EpochMetrics>,
}

/// Fraction of documents assigned their labelled class.
pub fn accuracy<M: DocModel>(model: &M, docs: &[Document]) -> Result<f64> {
    if docs.is_empty() {
        return Err(Error::InsufficientData("no documents to score".into()));
    }
    let mut right = 0usize;
    for d in docs {
        if model.classify(&model.vocab().encode(&d.tokens))? == d.class {
            right += 1;
        }
    }
    Ok(right as f64 / docs.len() as f64)
}

/// Per-document SGD over shuffled training documents. On return `model`
/// holds the parameters with the best dev accuracy, the earliest on ties.
pub fn train_classifier<M: DocModel>(
    model: &mut M,
    train: &[Document],
    dev: &[Document],
    cfg: &ClassifierConfig,
) -> Result<TrainReport> {
    if train.is_empty() {
        return Err(Error::InsufficientData("empty training set".into()));
    }
    let classes = model.n_classes();
    if let Some(d) = train.iter().chain(dev).find(|d| d.class >= classes || d.tokens.is_empty()) {
        return Err(Error::invalid(format!(
            "document with class {} and {} tokens does not fit a {classes}-class model",
            d.class,
            d.tokens.len()
        )));
    }
    let mut seen = vec![false; classes];
    train.iter().for_each(|d| seen[d.class] = true);
    if seen.iter().filter(|&&s| s).count() < 2 {
        return Err(Error::InsufficientData("training set holds fewer than two classes".into()));
    }
    let dev = if dev.is_empty() { train } else { dev };
    info!("lr={} epochs={} seed={} train={} dev={}", cfg.lr, cfg.epochs, cfg.seed, train.len(), dev.len());

    let encoded: Vec<Vec<usize>> = train.iter().map(|d| model.vocab().encode(&d.tokens)).collect();
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut rng = SeedStreams::new(cfg.seed).stream(rng::ORDER);
    let mut best = model.clone();
    let mut best_acc = accuracy(model, dev)?;
    let mut best_epoch = 0;
    let mut epochs = Vec::with_capacity(cfg.epochs);
    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for &k in &order {
            let mut g = model.new_grads();
            let loss = model.loss_grad(&encoded[k], train[k].class, &mut g)?;
            if !loss.is_finite() {
                return Err(Error::NonFinite(format!(
                    "classifier loss {loss} at epoch {epoch} on training document {k}"
                )));
            }
            total += loss;
            model.sgd_step(&g, cfg.lr)?;
        }
        let m = EpochMetrics {
            epoch,
            mean_loss: total / train.len() as f64,
            train_accuracy: accuracy(model, train)?,
            dev_accuracy: accuracy(model, dev)?,
        };
        info!(
            "epoch={epoch} mean_loss={:.6} train_acc={:.4} dev_acc={:.4}",
            m.mean_loss, m.train_accuracy, m.dev_accuracy
        );
        if m.dev_accuracy > best_acc {
            best_acc = m.dev_accuracy;
            best_epoch = epoch;
            best = model.clone();
        }
        epochs.push(m);
    }
    *model = best;
    Ok(TrainReport {
        best_epoch,
        best_dev_accuracy: best_acc,
        epochs,
    })
}
