use log::info;
use rand::seq::SliceRandom;

use super::{segmentation_from_tags, viterbi_decode, SegGradients, SegmenterNet, Tag, TaggedSentence};
use crate::corpus::{normalize_unit, raw_units, Vocabulary};
use crate::optim::Optimizer;
use crate::rng::{self, SeedStreams};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SegmenterConfig {
    pub dim: usize,
    pub hidden: usize,
    pub win: usize,
    pub lr: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SegmenterConfig {
    fn default() -> Self {
        SegmenterConfig {
            dim: 50,
            hidden: 100,
            win: 5,
            lr: 0.05,
            epochs: 10,
            seed: 1,
        }
    }
}

impl SegmenterConfig {
    /// Fresh network over the normalized characters of `corpus`, most frequent first.
    pub fn build_net(&self, corpus: &[TaggedSentence]) -> Result<SegmenterNet> {
        let units: Vec<String> = corpus
            .iter()
            .flat_map(|s| s.chars.iter().map(|c| normalize_unit(c)))
            .collect();
        let vocab = Vocabulary::build(units.iter().map(String::as_str), 1)?;
        let mut rng = SeedStreams::new(self.seed).stream(rng::INIT);
        SegmenterNet::new(vocab.tokens(), self.dim, self.hidden, self.win, &mut rng)
    }
}

/// Plain SGD over shuffled (sentence, position) samples; returns the mean
/// loss of every epoch.
pub fn train_segmenter(net: &mut SegmenterNet, corpus: &[TaggedSentence], cfg: &SegmenterConfig) -> Result<Vec<f64>> {
    if corpus.is_empty() {
        return Err(Error::InsufficientData("empty training corpus".into()));
    }
    for s in corpus {
        if s.chars.len() != s.tags.len() {
            return Err(Error::DimensionMismatch {
                expected: s.chars.len(),
                actual: s.tags.len(),
            });
        }
    }
    let encoded: Vec<Vec<usize>> = corpus.iter().map(|s| net.encode(&s.chars)).collect();
    let mut samples: Vec<(usize, usize)> = corpus
        .iter()
        .enumerate()
        .flat_map(|(k, s)| (0..s.chars.len()).map(move |i| (k, i)))
        .collect();
    let mut order = SeedStreams::new(cfg.seed).stream(rng::ORDER);
    let opt = Optimizer::Sgd { lr: cfg.lr };
    let mut grads = SegGradients::for_net(net);
    let mut losses = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        samples.shuffle(&mut order);
        let mut total = 0.0;
        for &(k, i) in &samples {
            grads.clear();
            let loss = net.loss_grad(&encoded[k], i, corpus[k].tags[i], &mut grads);
            if !loss.is_finite() {
                return Err(Error::NonFinite(format!("segmenter loss at epoch {}", epoch + 1)));
            }
            total += loss;
            net.apply(&grads, &opt)?;
        }
        let mean = total / samples.len() as f64;
        info!("epoch={} samples={} mean_loss={mean:.6}", epoch + 1, samples.len());
        losses.push(mean);
    }
    Ok(losses)
}

/// Fraction of characters whose most probable tag is the gold tag.
pub fn tag_accuracy(net: &SegmenterNet, corpus: &[TaggedSentence]) -> f64 {
    let mut hits = 0;
    let mut total = 0;
    for s in corpus {
        let ids = net.encode(&s.chars);
        for (i, gold) in s.tags.iter().enumerate() {
            let lp = net.tag_log_probs(&ids, i);
            let best = (0..4).fold(0, |b, t| if lp[t] > lp[b] { t } else { b });
            hits += usize::from(Tag::from_index(best) == *gold);
            total += 1;
        }
    }
    if total == 0 {
        0.0
    } else {
        hits as f64 / total as f64
    }
}

/// Segments raw text; whitespace is ignored.
pub fn segment_text(net: &SegmenterNet, text: &str) -> Vec<String> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let chars = raw_units(&compact);
    if chars.is_empty() {
        return Vec::new();
    }
    let tags = viterbi_decode(&net.lattice(&net.encode(&chars)));
    segmentation_from_tags(&TaggedSentence { chars, tags }).unwrap_or_default()
}
