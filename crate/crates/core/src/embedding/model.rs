use std::fmt;
use std::str::FromStr;

use super::grad::Gradients;
use crate::corpus::context_slot;
use crate::optim::{axpy, dot, log_sigmoid, log_softmax, sigmoid, Optimizer, ParamMatrix, SparseRows};
use crate::rng::Rng;
use crate::{Error, Result};

/// The six supported embedding architectures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    SkipGram,
    Cbow,
    Order,
    Lbl,
    Nnlm,
    Cw,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::SkipGram,
        ModelKind::Cbow,
        ModelKind::Order,
        ModelKind::Lbl,
        ModelKind::Nnlm,
        ModelKind::Cw,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::SkipGram => "skipgram",
            ModelKind::Cbow => "cbow",
            ModelKind::Order => "order",
            ModelKind::Lbl => "lbl",
            ModelKind::Nnlm => "nnlm",
            ModelKind::Cw => "cw",
        }
    }

    fn has_transform(self) -> bool {
        matches!(self, ModelKind::Lbl | ModelKind::Nnlm | ModelKind::Cw)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s) || (s.eq_ignore_ascii_case("skip-gram") && *k == ModelKind::SkipGram))
            .ok_or_else(|| Error::invalid(format!("unknown model kind {s:?}")))
    }
}

/// How the target distribution is modelled for predictive kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputLayer {
    #[default]
    NegativeSampling,
    /// Exact softmax over all targets; only practical for tiny vocabularies.
    FullSoftmax,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelShape {
    pub kind: ModelKind,
    /// Rows of the input table (words, plus characters for joint training).
    pub input_rows: usize,
    /// Rows of the target table.
    pub output_rows: usize,
    pub dim: usize,
    /// Hidden layer size for LBL, NNLM and C&W.
    pub hidden: usize,
    pub win: usize,
    pub output_layer: OutputLayer,
}

impl ModelShape {
    pub fn new(kind: ModelKind, vocab_size: usize, dim: usize, win: usize) -> Self {
        ModelShape {
            kind,
            input_rows: vocab_size,
            output_rows: vocab_size,
            dim,
            hidden: dim,
            win,
            output_layer: OutputLayer::NegativeSampling,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.win % 2 == 0 || self.win < 3 {
            return Err(Error::invalid(format!("window size must be odd and >= 3, got {}", self.win)));
        }
        if self.dim == 0 || (self.kind.has_transform() && self.hidden == 0) {
            return Err(Error::invalid("dimensions must be positive"));
        }
        if self.output_layer == OutputLayer::FullSoftmax && self.kind != ModelKind::SkipGram {
            return Err(Error::invalid("full softmax is only provided for skipgram"));
        }
        Ok(())
    }
}

/// Context handed to the predictive models.
#[derive(Clone, Copy, Debug)]
pub enum ContextRef<'a> {
    /// A single input row (Skip-gram pairs, characters in joint training).
    Word(usize),
    /// `(offset, id)` pairs of a window, left to right.
    Window(&'a [(i32, usize)]),
}

/// Parameters of one embedding architecture.
///
/// | kind      | context `x`                 | energy `E(w; x)`                         |
/// |-----------|-----------------------------|------------------------------------------|
/// | Skip-gram | `e(c)`                      | `e'(w)·x`                                |
/// | CBOW      | mean of context vectors     | `e'(w)·x`                                |
/// | Order     | concatenation               | `e'(w)·x`, `e'(w)` of length `(win-1)d`  |
/// | LBL       | concatenation               | `b2_w + e'(w)·(b1 + Hx)`                 |
/// | NNLM      | concatenation               | `b2_w + e'(w)·tanh(b1 + Hx)`             |
/// | C&W       | whole window incl. target   | `u·tanh(b1 + Hx)`                        |
///
/// Missing window slots at document edges are zero vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingModel {
    pub shape: ModelShape,
    /// `e`: input (context) vectors.
    pub input: ParamMatrix,
    /// `e'`: target vectors. Empty for C&W.
    pub output: ParamMatrix,
    /// `H`
    pub transform: Option<ParamMatrix>,
    /// `b1`
    pub hidden_bias: Option<ParamMatrix>,
    /// `b2`, one entry per target word (LBL, NNLM).
    pub output_bias: Option<ParamMatrix>,
    /// `u`, the single scoring unit of C&W.
    pub score: Option<ParamMatrix>,
}

impl EmbeddingModel {
    /// Input vectors uniform in `±0.5/dim`, target vectors zero, hidden
    /// matrices uniform in `±1/sqrt(fan_in)`, biases zero.
    pub fn new(shape: ModelShape, rng: &mut Rng) -> Result<Self> {
        shape.validate()?;
        let d = shape.dim;
        let input = ParamMatrix::uniform(shape.input_rows, d, 0.5 / d as f64, rng);
        let ctx_len = (shape.win - 1) * d;
        let (output, transform, hidden_bias, output_bias, score) = match shape.kind {
            ModelKind::SkipGram | ModelKind::Cbow => (ParamMatrix::zeros(shape.output_rows, d), None, None, None, None),
            ModelKind::Order => (ParamMatrix::zeros(shape.output_rows, ctx_len), None, None, None, None),
            ModelKind::Lbl | ModelKind::Nnlm => (
                ParamMatrix::zeros(shape.output_rows, shape.hidden),
                Some(ParamMatrix::uniform(shape.hidden, ctx_len, 1.0 / (ctx_len as f64).sqrt(), rng)),
                Some(ParamMatrix::zeros(1, shape.hidden)),
                Some(ParamMatrix::zeros(shape.output_rows, 1)),
                None,
            ),
            ModelKind::Cw => {
                let fan_in = shape.win * d;
                (
                    ParamMatrix::zeros(0, 0),
                    Some(ParamMatrix::uniform(shape.hidden, fan_in, 1.0 / (fan_in as f64).sqrt(), rng)),
                    Some(ParamMatrix::zeros(1, shape.hidden)),
                    None,
                    Some(ParamMatrix::uniform(1, shape.hidden, 1.0 / (shape.hidden as f64).sqrt(), rng)),
                )
            }
        };
        Ok(EmbeddingModel {
            shape,
            input,
            output,
            transform,
            hidden_bias,
            output_bias,
            score,
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.shape.kind
    }

    fn check_input(&self, id: usize) -> Result<()> {
        if id < self.input.rows() {
            Ok(())
        } else {
            Err(Error::UnknownId(id))
        }
    }

    fn check_output(&self, id: usize) -> Result<()> {
        if id < self.output.rows() {
            Ok(())
        } else {
            Err(Error::UnknownId(id))
        }
    }

    /// Context vector `x` for the predictive kinds.
    pub fn context_representation(&self, ctx: ContextRef<'_>) -> Result<Vec<f64>> {
        let d = self.shape.dim;
        match (self.shape.kind, ctx) {
            (ModelKind::SkipGram | ModelKind::Cbow, ContextRef::Word(id)) => {
                self.check_input(id)?;
                Ok(self.input.row(id).to_vec())
            }
            (ModelKind::Cbow, ContextRef::Window(words)) => {
                if words.is_empty() {
                    return Err(Error::invalid("empty context"));
                }
                let mut x = vec![0.0; d];
                for &(_, id) in words {
                    self.check_input(id)?;
                    axpy(1.0, self.input.row(id), &mut x);
                }
                let n = words.len() as f64;
                x.iter_mut().for_each(|v| *v /= n);
                Ok(x)
            }
            (ModelKind::Order | ModelKind::Lbl | ModelKind::Nnlm, ContextRef::Window(words)) => {
                if words.is_empty() {
                    return Err(Error::invalid("empty context"));
                }
                let mut x = vec![0.0; (self.shape.win - 1) * d];
                for &(off, id) in words {
                    self.check_input(id)?;
                    if off == 0 || off.unsigned_abs() as usize > self.shape.win / 2 {
                        return Err(Error::invalid(format!("context offset {off} outside window")));
                    }
                    let s = context_slot(off, self.shape.win);
                    x[s * d..(s + 1) * d].copy_from_slice(self.input.row(id));
                }
                Ok(x)
            }
            (kind, _) => Err(Error::invalid(format!("context form not supported by {kind}"))),
        }
    }

    /// Hidden activation `b1 + Hx` (LBL) or `tanh(b1 + Hx)` (NNLM, C&W).
    fn hidden_layer(&self, x: &[f64]) -> Vec<f64> {
        let h_mat = self.transform.as_ref().expect("transform");
        let mut h = vec![0.0; h_mat.rows()];
        h_mat.mat_vec(x, &mut h);
        axpy(1.0, self.hidden_bias.as_ref().expect("bias").as_slice(), &mut h);
        if self.shape.kind != ModelKind::Lbl {
            h.iter_mut().for_each(|v| *v = v.tanh());
        }
        h
    }

    /// Energy `E(w; x)` of target `w` given a context vector from
    /// [`context_representation`](Self::context_representation).
    pub fn score_target(&self, x: &[f64], w: usize) -> Result<f64> {
        if self.shape.kind == ModelKind::Cw {
            return Err(Error::invalid("cw scores whole windows; use cw_score"));
        }
        self.check_output(w)?;
        let expected = match self.shape.kind {
            ModelKind::SkipGram | ModelKind::Cbow => self.shape.dim,
            _ => (self.shape.win - 1) * self.shape.dim,
        };
        if x.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: x.len(),
            });
        }
        Ok(match self.shape.kind {
            ModelKind::Lbl | ModelKind::Nnlm => {
                let h = self.hidden_layer(x);
                self.output_bias.as_ref().unwrap().get(w, 0) + dot(self.output.row(w), &h)
            }
            _ => dot(self.output.row(w), x),
        })
    }

    /// Negative-sampling (or full-softmax) loss of one context/target unit,
    /// scaled by `weight`; loss gradients are accumulated into `grads`.
    ///
    /// The loss is `-[log σ(E(w;x)) + Σ log σ(-E(w';x))]`.
    pub fn unit_loss_grad(
        &self,
        ctx: ContextRef<'_>,
        target: usize,
        negatives: &[usize],
        weight: f64,
        grads: &mut Gradients,
    ) -> Result<f64> {
        self.check_output(target)?;
        let x = self.context_representation(ctx)?;
        let transformed = self.transform.is_some();
        let h = if transformed { self.hidden_layer(&x) } else { x.clone() };
        let mut dh = vec![0.0; h.len()];
        let bias = self.output_bias.as_ref();
        let mut loss = 0.0;

        let mut accumulate = |o: usize, g: f64, grads: &mut Gradients| {
            axpy(g, self.output.row(o), &mut dh);
            grads.output.add(o, g, &h);
            if bias.is_some() {
                grads.output_bias.row_mut(o)[0] += g;
            }
        };

        match self.shape.output_layer {
            OutputLayer::NegativeSampling => {
                for (o, positive) in std::iter::once((target, true)).chain(negatives.iter().map(|&n| (n, false))) {
                    self.check_output(o)?;
                    let e = dot(self.output.row(o), &h) + bias.map_or(0.0, |b| b.get(o, 0));
                    let label = if positive { 1.0 } else { 0.0 };
                    loss -= if positive { log_sigmoid(e) } else { log_sigmoid(-e) };
                    accumulate(o, (sigmoid(e) - label) * weight, grads);
                }
            }
            OutputLayer::FullSoftmax => {
                let scores: Vec<f64> = (0..self.output.rows()).map(|o| dot(self.output.row(o), &h)).collect();
                let logp = log_softmax(&scores);
                loss = -logp[target];
                for (o, lp) in logp.iter().enumerate() {
                    let label = if o == target { 1.0 } else { 0.0 };
                    accumulate(o, (lp.exp() - label) * weight, grads);
                }
            }
        }
        loss *= weight;

        let dx = if transformed {
            let mut da = dh;
            if self.shape.kind == ModelKind::Nnlm {
                da.iter_mut().zip(&h).for_each(|(g, hv)| *g *= 1.0 - hv * hv);
            }
            self.backprop_transform(&x, &da, grads)
        } else {
            dh
        };
        self.scatter_context(ctx, &dx, grads);
        Ok(loss)
    }

    /// Accumulates `H`, `b1` gradients for pre-activation gradient `da` and
    /// returns the gradient with respect to the input `x`.
    fn backprop_transform(&self, x: &[f64], da: &[f64], grads: &mut Gradients) -> Vec<f64> {
        let h_mat = self.transform.as_ref().unwrap();
        let cols = h_mat.cols();
        for (r, &g) in da.iter().enumerate() {
            if g != 0.0 {
                axpy(g, x, &mut grads.transform[r * cols..(r + 1) * cols]);
            }
        }
        axpy(1.0, da, &mut grads.hidden_bias);
        grads.dense_touched = true;
        let mut dx = vec![0.0; cols];
        h_mat.mat_t_vec_add(da, &mut dx);
        dx
    }

    fn scatter_context(&self, ctx: ContextRef<'_>, dx: &[f64], grads: &mut Gradients) {
        let d = self.shape.dim;
        match (self.shape.kind, ctx) {
            (_, ContextRef::Word(id)) => grads.input.add(id, 1.0, dx),
            (ModelKind::Cbow, ContextRef::Window(words)) => {
                let scale = 1.0 / words.len() as f64;
                for &(_, id) in words {
                    grads.input.add(id, scale, dx);
                }
            }
            (_, ContextRef::Window(words)) => {
                for &(off, id) in words {
                    let s = context_slot(off, self.shape.win);
                    grads.input.add(id, 1.0, &dx[s * d..(s + 1) * d]);
                }
            }
        }
    }

    fn cw_input(&self, window: &[Option<usize>]) -> Result<Vec<f64>> {
        if self.shape.kind != ModelKind::Cw {
            return Err(Error::invalid("window scoring requires the cw kind"));
        }
        if window.len() != self.shape.win {
            return Err(Error::DimensionMismatch {
                expected: self.shape.win,
                actual: window.len(),
            });
        }
        let d = self.shape.dim;
        let mut x = vec![0.0; window.len() * d];
        for (s, slot) in window.iter().enumerate() {
            if let Some(id) = *slot {
                self.check_input(id)?;
                x[s * d..(s + 1) * d].copy_from_slice(self.input.row(id));
            }
        }
        Ok(x)
    }

    /// C&W score of a full window (target in the middle slot).
    pub fn cw_score(&self, window: &[Option<usize>]) -> Result<f64> {
        let x = self.cw_input(window)?;
        let h = self.hidden_layer(&x);
        Ok(dot(self.score.as_ref().unwrap().as_slice(), &h))
    }

    fn cw_backward(&self, window: &[Option<usize>], coef: f64, grads: &mut Gradients) -> Result<()> {
        let x = self.cw_input(window)?;
        let h = self.hidden_layer(&x);
        let u = self.score.as_ref().unwrap().as_slice();
        axpy(coef, &h, &mut grads.score);
        let da: Vec<f64> = u.iter().zip(&h).map(|(ui, hi)| coef * ui * (1.0 - hi * hi)).collect();
        let dx = self.backprop_transform(&x, &da, grads);
        let d = self.shape.dim;
        for (s, slot) in window.iter().enumerate() {
            if let Some(id) = *slot {
                grads.input.add(id, 1.0, &dx[s * d..(s + 1) * d]);
            }
        }
        Ok(())
    }

    /// Pairwise hinge loss `max(0, 1 - score(window) + score(corrupted))`,
    /// where the corrupted window has its middle word replaced by `negative`.
    /// Gradients are accumulated only when the loss is positive.
    pub fn cw_loss_grad(&self, window: &[Option<usize>], negative: usize, grads: &mut Gradients) -> Result<f64> {
        let pos = self.cw_score(window)?;
        let mut corrupted = window.to_vec();
        corrupted[self.shape.win / 2] = Some(negative);
        let neg = self.cw_score(&corrupted)?;
        let loss = (1.0 - pos + neg).max(0.0);
        if loss > 0.0 {
            self.cw_backward(window, -1.0, grads)?;
            self.cw_backward(&corrupted, 1.0, grads)?;
        }
        Ok(loss)
    }

    /// Applies a descent step with the accumulated loss gradients.
    pub fn apply(&mut self, grads: &Gradients, opt: &Optimizer) -> Result<()> {
        grads.input.apply(&mut self.input, opt)?;
        grads.output.apply(&mut self.output, opt)?;
        if let Some(b) = self.output_bias.as_mut() {
            grads.output_bias.apply(b, opt)?;
        }
        if grads.dense_touched {
            if let Some(m) = self.transform.as_mut() {
                m.update(&grads.transform, opt, 1.0)?;
            }
            if let Some(m) = self.hidden_bias.as_mut() {
                m.update(&grads.hidden_bias, opt, 1.0)?;
            }
            if let Some(m) = self.score.as_mut() {
                m.update(&grads.score, opt, 1.0)?;
            }
        }
        Ok(())
    }

    /// Allocates AdaGrad accumulators up front (required before sharing the
    /// model between workers).
    pub(crate) fn prepare_accumulators(&mut self, opt: &Optimizer) {
        if matches!(opt, Optimizer::AdaGrad { .. }) {
            for m in self.matrices_mut() {
                m.ensure_accumulator();
            }
        }
    }

    pub(super) fn matrices(&self) -> Vec<&ParamMatrix> {
        let mut v = vec![&self.input, &self.output];
        v.extend(
            [&self.transform, &self.hidden_bias, &self.output_bias, &self.score]
                .into_iter()
                .flatten(),
        );
        v
    }

    fn matrices_mut(&mut self) -> Vec<&mut ParamMatrix> {
        let mut v = vec![&mut self.input, &mut self.output];
        v.extend(
            [
                &mut self.transform,
                &mut self.hidden_bias,
                &mut self.output_bias,
                &mut self.score,
            ]
            .into_iter()
            .flatten(),
        );
        v
    }

    /// All parameters flattened in the order input, output, transform,
    /// hidden bias, output bias, score.
    pub fn flat_params(&self) -> Vec<f64> {
        self.matrices().into_iter().flat_map(|m| m.as_slice().iter().copied()).collect()
    }

    pub fn set_flat_params(&mut self, flat: &[f64]) {
        let mut offset = 0;
        for m in self.matrices_mut() {
            let n = m.as_slice().len();
            m.as_mut_slice().copy_from_slice(&flat[offset..offset + n]);
            offset += n;
        }
        assert_eq!(offset, flat.len());
    }

    /// Dense gradient in the layout of [`flat_params`](Self::flat_params).
    pub fn dense_gradient(&self, grads: &Gradients) -> Vec<f64> {
        let mut out = Vec::new();
        let mut push_sparse = |m: &ParamMatrix, g: &SparseRows| {
            let mut d = vec![0.0; m.as_slice().len()];
            g.scatter(m.cols(), &mut d);
            out.extend(d);
        };
        push_sparse(&self.input, &grads.input);
        push_sparse(&self.output, &grads.output);
        if self.transform.is_some() {
            out.extend(&grads.transform);
        }
        if self.hidden_bias.is_some() {
            out.extend(&grads.hidden_bias);
        }
        if let Some(b) = &self.output_bias {
            let mut d = vec![0.0; b.rows()];
            grads.output_bias.scatter(1, &mut d);
            out.extend(d);
        }
        if self.score.is_some() {
            out.extend(&grads.score);
        }
        out
    }
}
