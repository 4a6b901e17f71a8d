use std::collections::HashMap;

use super::Tag;
use crate::corpus::normalize_unit;
use crate::io::{Container, EmbeddingTable, Tensor};
use crate::optim::{axpy, log_softmax, softmax, Optimizer, ParamMatrix, SparseRows};
use crate::rng::Rng;
use crate::{Error, Result};

/// Row filling window slots outside the sentence.
pub const PADDING: &str = "PADDING";
/// Row for characters unseen in training.
pub const UNK: &str = "UNK";

/// Window feed-forward tagger: `softmax(b2 + U tanh(b1 + H x))`.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmenterNet {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    win: usize,
    pub chars: ParamMatrix,
    pub h: ParamMatrix,
    pub b1: ParamMatrix,
    pub u: ParamMatrix,
    pub b2: ParamMatrix,
}

/// Gradient of the per-character loss.
#[derive(Clone, Debug)]
pub struct SegGradients {
    pub chars: SparseRows,
    pub h: Vec<f64>,
    pub b1: Vec<f64>,
    pub u: Vec<f64>,
    pub b2: Vec<f64>,
}

impl SegGradients {
    pub fn for_net(net: &SegmenterNet) -> Self {
        SegGradients {
            chars: SparseRows::new(net.dim()),
            h: vec![0.0; net.h.as_slice().len()],
            b1: vec![0.0; net.hidden()],
            u: vec![0.0; 4 * net.hidden()],
            b2: vec![0.0; 4],
        }
    }

    pub fn clear(&mut self) {
        self.chars.clear();
        for v in [&mut self.h, &mut self.b1, &mut self.u, &mut self.b2] {
            v.iter_mut().for_each(|x| *x = 0.0);
        }
    }
}

fn build_index(tokens: &[String]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(tokens.len());
    for (i, t) in tokens.iter().enumerate() {
        if index.insert(t.clone(), i).is_some() {
            return Err(Error::invalid(format!("duplicate character {t:?}")));
        }
    }
    Ok(index)
}

impl SegmenterNet {
    /// `chars` lists normalized units; `PADDING` and `UNK` rows are prepended.
    pub fn new(chars: &[String], dim: usize, hidden: usize, win: usize, rng: &mut Rng) -> Result<Self> {
        if win % 2 == 0 || dim == 0 || hidden == 0 {
            return Err(Error::invalid(format!(
                "need odd window and positive sizes, got win={win} dim={dim} hidden={hidden}"
            )));
        }
        let mut tokens = vec![PADDING.to_string(), UNK.to_string()];
        tokens.extend(chars.iter().filter(|c| *c != PADDING && *c != UNK).cloned());
        let index = build_index(&tokens)?;
        let fan_in = (win * dim) as f64;
        Ok(SegmenterNet {
            chars: ParamMatrix::uniform(tokens.len(), dim, 0.5 / (dim as f64).sqrt(), rng),
            h: ParamMatrix::uniform(hidden, win * dim, 1.0 / fan_in.sqrt(), rng),
            b1: ParamMatrix::zeros(hidden, 1),
            u: ParamMatrix::uniform(4, hidden, 1.0 / (hidden as f64).sqrt(), rng),
            b2: ParamMatrix::zeros(4, 1),
            tokens,
            index,
            win,
        })
    }

    pub fn win(&self) -> usize {
        self.win
    }

    pub fn dim(&self) -> usize {
        self.chars.cols()
    }

    pub fn hidden(&self) -> usize {
        self.h.rows()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Row ids of raw character units.
    pub fn encode<S: AsRef<str>>(&self, units: &[S]) -> Vec<usize> {
        units
            .iter()
            .map(|u| self.index.get(&normalize_unit(u.as_ref())).copied().unwrap_or(1))
            .collect()
    }

    fn window(&self, ids: &[usize], i: usize) -> Vec<usize> {
        let half = (self.win / 2) as isize;
        (-half..=half)
            .map(|off| {
                let j = i as isize + off;
                if j < 0 || j >= ids.len() as isize {
                    0
                } else {
                    ids[j as usize]
                }
            })
            .collect()
    }

    fn forward(&self, ids: &[usize], i: usize) -> (Vec<usize>, Vec<f64>, Vec<f64>, Vec<f64>) {
        let slots = self.window(ids, i);
        let x: Vec<f64> = slots.iter().flat_map(|&s| self.chars.row(s).iter().copied()).collect();
        let mut h = self.b1.as_slice().to_vec();
        self.h.mat_vec_add(&x, &mut h);
        h.iter_mut().for_each(|v| *v = v.tanh());
        let mut y = self.b2.as_slice().to_vec();
        self.u.mat_vec_add(&h, &mut y);
        (slots, x, h, y)
    }

    /// Log-probabilities of B, M, E, S at position `i`.
    pub fn tag_log_probs(&self, ids: &[usize], i: usize) -> [f64; 4] {
        let (_, _, _, y) = self.forward(ids, i);
        let lp = log_softmax(&y);
        [lp[0], lp[1], lp[2], lp[3]]
    }

    pub fn lattice(&self, ids: &[usize]) -> Vec<[f64; 4]> {
        (0..ids.len()).map(|i| self.tag_log_probs(ids, i)).collect()
    }

    /// `-log P(gold | window at i)`, accumulating its gradient.
    pub fn loss_grad(&self, ids: &[usize], i: usize, gold: Tag, grads: &mut SegGradients) -> f64 {
        let (slots, x, h, y) = self.forward(ids, i);
        let mut dy = softmax(&y);
        let loss = -log_softmax(&y)[gold.index()];
        dy[gold.index()] -= 1.0;
        let hid = self.hidden();
        let mut dh = vec![0.0; hid];
        for t in 0..4 {
            grads.b2[t] += dy[t];
            axpy(dy[t], &h, &mut grads.u[t * hid..(t + 1) * hid]);
        }
        self.u.mat_t_vec_add(&dy, &mut dh);
        for (d, hv) in dh.iter_mut().zip(&h) {
            *d *= 1.0 - hv * hv;
        }
        let cols = x.len();
        for r in 0..hid {
            grads.b1[r] += dh[r];
            axpy(dh[r], &x, &mut grads.h[r * cols..(r + 1) * cols]);
        }
        let mut dx = vec![0.0; cols];
        self.h.mat_t_vec_add(&dh, &mut dx);
        let dim = self.dim();
        for (k, &s) in slots.iter().enumerate() {
            grads.chars.add(s, 1.0, &dx[k * dim..(k + 1) * dim]);
        }
        loss
    }

    pub fn apply(&mut self, grads: &SegGradients, opt: &Optimizer) -> Result<()> {
        grads.chars.apply(&mut self.chars, opt)?;
        self.h.update(&grads.h, opt, 1.0)?;
        self.b1.update(&grads.b1, opt, 1.0)?;
        self.u.update(&grads.u, opt, 1.0)?;
        self.b2.update(&grads.b2, opt, 1.0)
    }

    fn tables(&self) -> [&ParamMatrix; 5] {
        [&self.chars, &self.h, &self.b1, &self.u, &self.b2]
    }

    /// All parameters in the order chars, H, b1, U, b2.
    pub fn flat_params(&self) -> Vec<f64> {
        self.tables().iter().flat_map(|m| m.as_slice().iter().copied()).collect()
    }

    pub fn set_flat_params(&mut self, flat: &[f64]) {
        let mut off = 0;
        for m in [&mut self.chars, &mut self.h, &mut self.b1, &mut self.u, &mut self.b2] {
            let n = m.as_slice().len();
            m.as_mut_slice().copy_from_slice(&flat[off..off + n]);
            off += n;
        }
    }

    pub fn dense_gradient(&self, grads: &SegGradients) -> Vec<f64> {
        let mut chars = vec![0.0; self.chars.as_slice().len()];
        grads.chars.scatter(self.dim(), &mut chars);
        [chars, grads.h.clone(), grads.b1.clone(), grads.u.clone(), grads.b2.clone()].concat()
    }

    /// Copies vectors of known characters from `table`; returns how many rows were set.
    pub fn load_char_embeddings(&mut self, table: &EmbeddingTable) -> Result<usize> {
        if table.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: table.dim(),
            });
        }
        let mut loaded = 0;
        for (i, t) in self.tokens.iter().enumerate() {
            if let Some(v) = table.vector(t) {
                self.chars.set_row(i, v);
                loaded += 1;
            }
        }
        Ok(loaded)
    }

    pub fn to_container(&self) -> Container {
        let mut c = Container::default().with_meta("model", "segmenter").with_meta("win", self.win);
        c.tokens = self.tokens.clone();
        for (name, m) in ["chars", "h", "b1", "u", "b2"].into_iter().zip(self.tables()) {
            c.push(Tensor::from_matrix(name, m));
        }
        c
    }

    pub fn from_container(c: &Container) -> Result<Self> {
        if c.meta("model") != Some("segmenter") {
            return Err(Error::invalid("checkpoint does not hold a segmenter"));
        }
        let win: usize = c
            .require_meta("win")?
            .parse()
            .map_err(|_| Error::invalid("bad window size in checkpoint"))?;
        let net = SegmenterNet {
            index: build_index(&c.tokens)?,
            tokens: c.tokens.clone(),
            win,
            chars: c.tensor("chars")?.to_matrix()?,
            h: c.tensor("h")?.to_matrix()?,
            b1: c.tensor("b1")?.to_matrix()?,
            u: c.tensor("u")?.to_matrix()?,
            b2: c.tensor("b2")?.to_matrix()?,
        };
        let (dim, hid) = (net.dim(), net.hidden());
        let shapes_ok = net.chars.rows() == net.tokens.len()
            && net.h.cols() == win * dim
            && net.b1.rows() == hid
            && net.u.rows() == 4
            && net.u.cols() == hid
            && net.b2.rows() == 4;
        if !shapes_ok || net.tokens.first().map(String::as_str) != Some(PADDING) {
            return Err(Error::invalid("inconsistent segmenter checkpoint"));
        }
        Ok(net)
    }
}
