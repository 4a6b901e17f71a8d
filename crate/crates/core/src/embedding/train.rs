use std::time::Instant;

use log::info;

use super::charword::CharWordVocab;
use super::grad::Gradients;
use super::model::{ContextRef, EmbeddingModel, ModelKind, OutputLayer};
use crate::corpus::{subsample_document, windows_for_document, SubsampleVariant, Vocabulary, WindowSample};
use crate::optim::{negative_sample_into, NoiseSampler, Optimizer};
use crate::rng::{self, Rng, SeedStreams};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    /// Negative samples per positive target.
    pub negatives: usize,
    pub optimizer: Optimizer,
    pub epochs: usize,
    /// Subsampling threshold `t`; `None` disables subsampling.
    pub subsample: Option<f64>,
    pub subsample_variant: SubsampleVariant,
    /// Character weight `β` of joint character-word training.
    pub beta: f64,
    /// Also feed the characters of context words as plain context units.
    pub char_context: bool,
    pub seed: u64,
    pub workers: usize,
    /// Shuffle document order once before training.
    pub shuffle: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            negatives: 5,
            optimizer: Optimizer::adagrad(0.1),
            epochs: 5,
            subsample: Some(1e-4),
            subsample_variant: SubsampleVariant::Toolkit,
            beta: 0.0,
            char_context: false,
            seed: 1,
            workers: 1,
            shuffle: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self, kind: ModelKind, output: OutputLayer) -> Result<()> {
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::invalid(format!("beta must lie in [0, 1], got {}", self.beta)));
        }
        if kind != ModelKind::Cw && output == OutputLayer::NegativeSampling && self.negatives == 0 {
            return Err(Error::invalid("at least one negative sample is required"));
        }
        if self.workers == 0 {
            return Err(Error::invalid("workers must be positive"));
        }
        if let Some(t) = self.subsample {
            if t <= 0.0 {
                return Err(Error::invalid("subsampling threshold must be positive"));
            }
        }
        if self.optimizer.lr() <= 0.0 {
            return Err(Error::invalid("learning rate must be positive"));
        }
        Ok(())
    }
}

/// Per-sample update logic with reusable scratch buffers.
pub struct SampleTrainer<'a> {
    cfg: &'a TrainConfig,
    noise: &'a NoiseSampler,
    uniform: Option<NoiseSampler>,
    chars: Option<&'a CharWordVocab>,
    grads: Gradients,
    negs: Vec<usize>,
    slots: Vec<Option<usize>>,
}

impl<'a> SampleTrainer<'a> {
    /// `noise` draws negative targets; `chars` enables joint character-word
    /// training (Skip-gram only).
    pub fn new(
        model: &EmbeddingModel,
        cfg: &'a TrainConfig,
        noise: &'a NoiseSampler,
        chars: Option<&'a CharWordVocab>,
    ) -> Result<Self> {
        cfg.validate(model.kind(), model.shape.output_layer)?;
        if chars.is_some() && model.kind() != ModelKind::SkipGram {
            return Err(Error::invalid("joint character-word training requires skipgram"));
        }
        let uniform = if model.kind() == ModelKind::Cw {
            Some(NoiseSampler::uniform(model.input.rows())?)
        } else {
            None
        };
        Ok(SampleTrainer {
            cfg,
            noise,
            uniform,
            chars,
            grads: Gradients::for_model(model),
            negs: Vec::with_capacity(cfg.negatives),
            slots: vec![None; model.shape.win],
        })
    }

    /// Dispatches on the model kind and joint-training setting.
    pub fn train_sample(&mut self, model: &mut EmbeddingModel, sample: &WindowSample, rng: &mut Rng) -> Result<f64> {
        let loss = if model.kind() == ModelKind::Cw {
            self.cw(model, sample, rng)?
        } else if self.chars.is_some() {
            self.charword(model, sample, rng)?
        } else {
            self.predictive(model, sample, rng)?
        };
        if loss.is_finite() {
            Ok(loss)
        } else {
            Err(Error::NonFinite(format!("loss at target {}", sample.target)))
        }
    }

    fn draw(&mut self, model: &EmbeddingModel, target: usize, rng: &mut Rng) {
        match model.shape.output_layer {
            OutputLayer::NegativeSampling => {
                negative_sample_into(self.noise, self.cfg.negatives, target, rng, &mut self.negs)
            }
            OutputLayer::FullSoftmax => self.negs.clear(),
        }
    }

    /// One negative-sampling update for a predictive kind. Skip-gram makes
    /// one update per context word.
    pub fn predictive(&mut self, model: &mut EmbeddingModel, sample: &WindowSample, rng: &mut Rng) -> Result<f64> {
        if sample.context.is_empty() {
            return Ok(0.0);
        }
        let opt = self.cfg.optimizer;
        let mut loss = 0.0;
        if model.kind() == ModelKind::SkipGram {
            for &(_, c) in &sample.context {
                self.draw(model, sample.target, rng);
                self.grads.clear();
                loss += model.unit_loss_grad(ContextRef::Word(c), sample.target, &self.negs, 1.0, &mut self.grads)?;
                model.apply(&self.grads, &opt)?;
            }
        } else {
            self.draw(model, sample.target, rng);
            self.grads.clear();
            loss = model.unit_loss_grad(
                ContextRef::Window(&sample.context),
                sample.target,
                &self.negs,
                1.0,
                &mut self.grads,
            )?;
            model.apply(&self.grads, &opt)?;
        }
        Ok(loss)
    }

    /// Pairwise ranking update against a window whose middle word is
    /// replaced by a uniformly drawn word.
    pub fn cw(&mut self, model: &mut EmbeddingModel, sample: &WindowSample, rng: &mut Rng) -> Result<f64> {
        let half = (model.shape.win / 2) as i32;
        self.slots.iter_mut().for_each(|s| *s = None);
        self.slots[half as usize] = Some(sample.target);
        for &(off, id) in &sample.context {
            self.slots[(off + half) as usize] = Some(id);
        }
        let uniform = self.uniform.as_ref().expect("cw sampler");
        negative_sample_into(uniform, 1, sample.target, rng, &mut self.negs);
        self.grads.clear();
        let loss = model.cw_loss_grad(&self.slots, self.negs[0], &mut self.grads)?;
        if loss > 0.0 {
            model.apply(&self.grads, &self.cfg.optimizer)?;
        }
        Ok(loss)
    }

    /// Joint character-word Skip-gram update.
    ///
    /// For each context word `w_j` the objective mixes the word term with
    /// weight `1 - β` and each character term with weight `β / |w_j|`.
    /// With `char_context` each character additionally acts as a plain
    /// context unit with weight 1. One optimizer step per context word.
    pub fn charword(&mut self, model: &mut EmbeddingModel, sample: &WindowSample, rng: &mut Rng) -> Result<f64> {
        let chars = self.chars.expect("character vocabulary");
        let beta = self.cfg.beta;
        let opt = self.cfg.optimizer;
        let mut loss = 0.0;
        for &(_, w) in &sample.context {
            self.grads.clear();
            if beta < 1.0 {
                self.draw(model, sample.target, rng);
                loss += model.unit_loss_grad(ContextRef::Word(w), sample.target, &self.negs, 1.0 - beta, &mut self.grads)?;
            }
            let ch_ids = chars.chars_of(w);
            if beta > 0.0 {
                let weight = beta / ch_ids.len() as f64;
                for &ch in ch_ids {
                    self.draw(model, sample.target, rng);
                    loss += model.unit_loss_grad(ContextRef::Word(ch), sample.target, &self.negs, weight, &mut self.grads)?;
                }
            }
            if self.cfg.char_context {
                for &ch in ch_ids {
                    self.draw(model, sample.target, rng);
                    loss += model.unit_loss_grad(ContextRef::Word(ch), sample.target, &self.negs, 1.0, &mut self.grads)?;
                }
            }
            model.apply(&self.grads, &opt)?;
        }
        Ok(loss)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub samples: usize,
    pub tokens: usize,
    pub mean_loss: f64,
    pub tokens_per_sec: f64,
}

struct RacyModel(*mut EmbeddingModel);

// SAFETY: workers update the shared parameters without synchronization
// (Hogwild). Buffers are never reallocated while workers run because
// accumulators are allocated before spawning.
unsafe impl Send for RacyModel {}
unsafe impl Sync for RacyModel {}

fn run_shard(
    model: &mut EmbeddingModel,
    docs: &[Vec<usize>],
    vocab: &Vocabulary,
    subsample: bool,
    trainer: &mut SampleTrainer<'_>,
    neg_rng: &mut Rng,
    sub_rng: &mut Rng,
) -> Result<(f64, usize, usize)> {
    let (mut loss, mut samples, mut tokens) = (0.0, 0, 0);
    let win = model.shape.win;
    for doc in docs {
        let kept;
        let doc = if subsample {
            kept = subsample_document(doc, vocab, sub_rng);
            &kept
        } else {
            doc
        };
        tokens += doc.len();
        for sample in windows_for_document(doc, win) {
            if sample.context.is_empty() && model.kind() != ModelKind::Cw {
                continue;
            }
            loss += trainer.train_sample(model, &sample, neg_rng)?;
            samples += 1;
        }
    }
    Ok((loss, samples, tokens))
}

/// Trains for `cfg.epochs` passes over `docs` (vocabulary ids, OOV already
/// removed) and calls `on_epoch` after every pass so callers can
/// checkpoint and evaluate each iteration.
///
/// With `cfg.workers == 1` the run is deterministic for a fixed seed.
pub fn train_epochs<F>(
    model: &mut EmbeddingModel,
    docs: &[Vec<usize>],
    vocab: &Vocabulary,
    cfg: &TrainConfig,
    chars: Option<&CharWordVocab>,
    mut on_epoch: F,
) -> Result<Vec<EpochStats>>
where
    F: FnMut(&EmbeddingModel, &EpochStats) -> Result<()>,
{
    cfg.validate(model.kind(), model.shape.output_layer)?;
    let streams = SeedStreams::new(cfg.seed);
    let vocab = match cfg.subsample {
        Some(t) => vocab.clone().with_subsampling(t, cfg.subsample_variant),
        None => vocab.clone(),
    };
    let noise = NoiseSampler::new(vocab.noise_weights())?;

    let mut order: Vec<Vec<usize>> = docs.to_vec();
    if cfg.shuffle {
        use rand::seq::SliceRandom;
        order.shuffle(&mut streams.stream(rng::SHUFFLE));
    }

    let workers = cfg.workers.min(order.len().max(1));
    let mut neg_rngs: Vec<Rng> = (0..workers).map(|w| worker_rng(&streams, rng::NEGATIVES, w, workers)).collect();
    let mut sub_rngs: Vec<Rng> = (0..workers).map(|w| worker_rng(&streams, rng::SUBSAMPLE, w, workers)).collect();
    model.prepare_accumulators(&cfg.optimizer);

    let mut stats = Vec::with_capacity(cfg.epochs);
    for epoch in 1..=cfg.epochs {
        let start = Instant::now();
        let (loss, samples, tokens) = if workers == 1 {
            let mut trainer = SampleTrainer::new(model, cfg, &noise, chars)?;
            run_shard(
                model,
                &order,
                &vocab,
                cfg.subsample.is_some(),
                &mut trainer,
                &mut neg_rngs[0],
                &mut sub_rngs[0],
            )?
        } else {
            let shared = RacyModel(model as *mut EmbeddingModel);
            let chunk = order.len().div_ceil(workers);
            let results: Vec<Result<(f64, usize, usize)>> = std::thread::scope(|scope| {
                let handles: Vec<_> = order
                    .chunks(chunk)
                    .zip(neg_rngs.iter_mut().zip(sub_rngs.iter_mut()))
                    .map(|(shard, (neg_rng, sub_rng))| {
                        let shared = &shared;
                        let (vocab, noise) = (&vocab, &noise);
                        scope.spawn(move || {
                            // SAFETY: see `RacyModel`.
                            let model = unsafe { &mut *shared.0 };
                            let mut trainer = SampleTrainer::new(model, cfg, noise, chars)?;
                            run_shard(model, shard, vocab, cfg.subsample.is_some(), &mut trainer, neg_rng, sub_rng)
                        })
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
            });
            let mut total = (0.0, 0, 0);
            for r in results {
                let (l, s, t) = r?;
                total = (total.0 + l, total.1 + s, total.2 + t);
            }
            total
        };
        let secs = start.elapsed().as_secs_f64().max(1e-9);
        let st = EpochStats {
            epoch,
            samples,
            tokens,
            mean_loss: if samples > 0 { loss / samples as f64 } else { 0.0 },
            tokens_per_sec: tokens as f64 / secs,
        };
        info!(
            "epoch={} kind={} samples={} mean_loss={:.6} tokens_per_sec={:.0}",
            st.epoch,
            model.kind(),
            st.samples,
            st.mean_loss,
            st.tokens_per_sec
        );
        on_epoch(model, &st)?;
        stats.push(st);
    }
    Ok(stats)
}

fn worker_rng(streams: &SeedStreams, name: &str, worker: usize, workers: usize) -> Rng {
    if workers == 1 {
        streams.stream(name)
    } else {
        streams.worker_stream(name, worker)
    }
}
