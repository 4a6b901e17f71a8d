use super::head::{HeadGradients, PoolHead};
use super::{check_doc, flatten, unflatten, DocModel, DocVocab};
use crate::io::{Container, EmbeddingTable, Tensor};
use crate::optim::{axpy, Optimizer, ParamMatrix, SparseRows};
use crate::rng::Rng;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RcnnShape {
    /// Word vector size `|e|`.
    pub word_dim: usize,
    /// Context vector size `|c|`.
    pub context_dim: usize,
    /// Pooled layer size `H`.
    pub hidden: usize,
    pub classes: usize,
}

impl Default for RcnnShape {
    fn default() -> Self {
        RcnnShape {
            word_dim: 50,
            context_dim: 50,
            hidden: 100,
            classes: 2,
        }
    }
}

/// Recurrent convolutional network: left and right context scans around
/// every word, a tanh layer, max pooling and a softmax output.
#[derive(Clone, Debug, PartialEq)]
pub struct RcnnModel {
    vocab: DocVocab,
    /// Truncation length of backpropagation through the scans; `None` is unlimited.
    pub bptt: Option<usize>,
    pub e: ParamMatrix,
    pub w_l: ParamMatrix,
    pub w_r: ParamMatrix,
    pub w_sl: ParamMatrix,
    pub w_sr: ParamMatrix,
    pub cl_init: ParamMatrix,
    pub cr_init: ParamMatrix,
    head: PoolHead,
}

#[derive(Clone, Debug)]
pub struct RcnnGradients {
    pub e: SparseRows,
    pub w_l: Vec<f64>,
    pub w_r: Vec<f64>,
    pub w_sl: Vec<f64>,
    pub w_sr: Vec<f64>,
    pub cl_init: Vec<f64>,
    pub cr_init: Vec<f64>,
    pub head: HeadGradients,
}

/// States of one scan: `s[0] = init`, `s[i] = tanh(W s[i-1] + Ws e(w[i-1]))`.
fn scan(init: &[f64], w: &ParamMatrix, ws: &ParamMatrix, e: &ParamMatrix, ids: &[usize]) -> Vec<Vec<f64>> {
    let mut states = Vec::with_capacity(ids.len());
    states.push(init.to_vec());
    for i in 1..ids.len() {
        let mut z = vec![0.0; w.rows()];
        w.mat_vec_add(&states[i - 1], &mut z);
        ws.mat_vec_add(e.row(ids[i - 1]), &mut z);
        z.iter_mut().for_each(|v| *v = v.tanh());
        states.push(z);
    }
    states
}

/// Backpropagation through [`scan`], optionally truncated to `limit` steps
/// per source position.
#[allow(clippy::too_many_arguments)]
fn scan_backward(
    states: &[Vec<f64>],
    dstates: &[Option<Vec<f64>>],
    w: &ParamMatrix,
    ws: &ParamMatrix,
    e: &ParamMatrix,
    ids: &[usize],
    limit: Option<usize>,
    gw: &mut [f64],
    gws: &mut [f64],
    ginit: &mut [f64],
    ge: &mut SparseRows,
) {
    let c = w.rows();
    let ed = ws.cols();
    let step = |i: usize, g: &[f64], gw: &mut [f64], gws: &mut [f64], ge: &mut SparseRows| -> Vec<f64> {
        let da: Vec<f64> = g.iter().zip(&states[i]).map(|(g, s)| g * (1.0 - s * s)).collect();
        for r in 0..c {
            axpy(da[r], &states[i - 1], &mut gw[r * c..(r + 1) * c]);
            axpy(da[r], e.row(ids[i - 1]), &mut gws[r * ed..(r + 1) * ed]);
        }
        let mut de = vec![0.0; ed];
        ws.mat_t_vec_add(&da, &mut de);
        ge.add(ids[i - 1], 1.0, &de);
        let mut prev = vec![0.0; c];
        w.mat_t_vec_add(&da, &mut prev);
        prev
    };
    match limit {
        None => {
            let mut carry = vec![0.0; c];
            for i in (0..states.len()).rev() {
                if let Some(d) = &dstates[i] {
                    axpy(1.0, d, &mut carry);
                }
                if i == 0 {
                    axpy(1.0, &carry, ginit);
                } else {
                    carry = step(i, &carry, gw, gws, ge);
                }
            }
        }
        Some(limit) => {
            for (src, d) in dstates.iter().enumerate() {
                let Some(d) = d else { continue };
                let mut g = d.clone();
                let mut i = src;
                let mut steps = 0;
                while i > 0 && steps < limit {
                    g = step(i, &g, gw, gws, ge);
                    i -= 1;
                    steps += 1;
                }
                if i == 0 {
                    axpy(1.0, &g, ginit);
                }
            }
        }
    }
}

struct Cache {
    cl: Vec<Vec<f64>>,
    cr: Vec<Vec<f64>>,
    xs: Vec<Vec<f64>>,
}

impl RcnnModel {
    pub fn new(vocab: DocVocab, shape: RcnnShape, rng: &mut Rng) -> Result<Self> {
        let RcnnShape {
            word_dim,
            context_dim,
            hidden,
            classes,
        } = shape;
        if word_dim == 0 || context_dim == 0 || hidden == 0 {
            return Err(Error::invalid("layer sizes must be positive"));
        }
        if classes < 2 {
            return Err(Error::invalid("at least two classes are required"));
        }
        let (c, ed) = (context_dim as f64, word_dim as f64);
        Ok(RcnnModel {
            e: ParamMatrix::uniform(vocab.len(), word_dim, 1.0, rng),
            w_l: ParamMatrix::uniform(context_dim, context_dim, 1.0 / c.sqrt(), rng),
            w_r: ParamMatrix::uniform(context_dim, context_dim, 1.0 / c.sqrt(), rng),
            w_sl: ParamMatrix::uniform(context_dim, word_dim, 1.0 / ed.sqrt(), rng),
            w_sr: ParamMatrix::uniform(context_dim, word_dim, 1.0 / ed.sqrt(), rng),
            cl_init: ParamMatrix::uniform(context_dim, 1, 1.0, rng),
            cr_init: ParamMatrix::uniform(context_dim, 1, 1.0, rng),
            head: PoolHead::new(word_dim + 2 * context_dim, hidden, classes, rng),
            bptt: None,
            vocab,
        })
    }

    pub fn shape(&self) -> RcnnShape {
        RcnnShape {
            word_dim: self.e.cols(),
            context_dim: self.w_l.rows(),
            hidden: self.head.hidden(),
            classes: self.head.classes(),
        }
    }

    pub fn load_word_embeddings(&mut self, table: &EmbeddingTable) -> Result<usize> {
        self.vocab.load_into(&mut self.e, table)
    }

    /// Left and right context vectors of every position.
    pub fn context_scans(&self, ids: &[usize]) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
        check_doc(ids, self.e.rows())?;
        let cl = scan(self.cl_init.as_slice(), &self.w_l, &self.w_sl, &self.e, ids);
        let rev: Vec<usize> = ids.iter().rev().copied().collect();
        let mut cr = scan(self.cr_init.as_slice(), &self.w_r, &self.w_sr, &self.e, &rev);
        cr.reverse();
        Ok((cl, cr))
    }

    fn representations(&self, ids: &[usize]) -> Result<Cache> {
        let (cl, cr) = self.context_scans(ids)?;
        let xs = (0..ids.len())
            .map(|i| [cl[i].as_slice(), self.e.row(ids[i]), cr[i].as_slice()].concat())
            .collect();
        Ok(Cache { cl, cr, xs })
    }

    fn matrices(&self) -> Vec<&ParamMatrix> {
        let mut v = vec![
            &self.e,
            &self.w_l,
            &self.w_r,
            &self.w_sl,
            &self.w_sr,
            &self.cl_init,
            &self.cr_init,
        ];
        v.extend(self.head.matrices());
        v
    }

    pub fn from_container(c: &Container) -> Result<Self> {
        if c.meta("model") != Some("rcnn") {
            return Err(Error::invalid("checkpoint does not hold an RCNN classifier"));
        }
        let t = |name: &str| c.tensor(name).and_then(|t| t.to_matrix());
        let bptt = match c.meta("bptt") {
            None | Some("full") => None,
            Some(v) => Some(v.parse().map_err(|_| Error::invalid("bad bptt entry"))?),
        };
        let m = RcnnModel {
            vocab: DocVocab::from_tokens(c.tokens.clone())?,
            bptt,
            e: t("e")?,
            w_l: t("w_l")?,
            w_r: t("w_r")?,
            w_sl: t("w_sl")?,
            w_sr: t("w_sr")?,
            cl_init: t("cl_init")?,
            cr_init: t("cr_init")?,
            head: PoolHead {
                w2: t("w2")?,
                b2: t("b2")?,
                w4: t("w4")?,
                b4: t("b4")?,
            },
        };
        let s = m.shape();
        let ok = m.e.rows() == m.vocab.len()
            && m.w_r.rows() == s.context_dim
            && m.w_sl.cols() == s.word_dim
            && m.head.w2.cols() == s.word_dim + 2 * s.context_dim
            && m.head.w4.cols() == s.hidden;
        if !ok {
            return Err(Error::invalid("inconsistent RCNN checkpoint"));
        }
        Ok(m)
    }
}

impl DocModel for RcnnModel {
    type Grads = RcnnGradients;

    fn vocab(&self) -> &DocVocab {
        &self.vocab
    }

    fn n_classes(&self) -> usize {
        self.head.classes()
    }

    fn log_probs(&self, ids: &[usize]) -> Result<Vec<f64>> {
        let cache = self.representations(ids)?;
        Ok(self.head.log_probs(&self.head.forward(&cache.xs)))
    }

    fn pooled_positions(&self, ids: &[usize]) -> Result<Vec<usize>> {
        let cache = self.representations(ids)?;
        Ok(self.head.forward(&cache.xs).argmax)
    }

    fn new_grads(&self) -> RcnnGradients {
        let len = |m: &ParamMatrix| vec![0.0; m.as_slice().len()];
        RcnnGradients {
            e: SparseRows::new(self.e.cols()),
            w_l: len(&self.w_l),
            w_r: len(&self.w_r),
            w_sl: len(&self.w_sl),
            w_sr: len(&self.w_sr),
            cl_init: len(&self.cl_init),
            cr_init: len(&self.cr_init),
            head: self.head.new_grads(),
        }
    }

    fn loss_grad(&self, ids: &[usize], class: usize, g: &mut RcnnGradients) -> Result<f64> {
        if class >= self.n_classes() {
            return Err(Error::UnknownId(class));
        }
        let cache = self.representations(ids)?;
        let hc = self.head.forward(&cache.xs);
        let (loss, dx) = self.head.backward(&cache.xs, &hc, class, &mut g.head);
        let (c, ed) = (self.w_l.rows(), self.e.cols());
        let n = ids.len();
        let mut dcl: Vec<Option<Vec<f64>>> = vec![None; n];
        let mut dcr_rev: Vec<Option<Vec<f64>>> = vec![None; n];
        for (i, d) in dx.iter().enumerate() {
            if let Some(d) = d {
                dcl[i] = Some(d[..c].to_vec());
                g.e.add(ids[i], 1.0, &d[c..c + ed]);
                dcr_rev[n - 1 - i] = Some(d[c + ed..].to_vec());
            }
        }
        scan_backward(
            &cache.cl, &dcl, &self.w_l, &self.w_sl, &self.e, ids, self.bptt,
            &mut g.w_l, &mut g.w_sl, &mut g.cl_init, &mut g.e,
        );
        let rev_ids: Vec<usize> = ids.iter().rev().copied().collect();
        let rev_states: Vec<Vec<f64>> = cache.cr.iter().rev().cloned().collect();
        scan_backward(
            &rev_states, &dcr_rev, &self.w_r, &self.w_sr, &self.e, &rev_ids, self.bptt,
            &mut g.w_r, &mut g.w_sr, &mut g.cr_init, &mut g.e,
        );
        Ok(loss)
    }

    fn sgd_step(&mut self, g: &RcnnGradients, lr: f64) -> Result<()> {
        let sgd = |fan: usize| Optimizer::Sgd { lr: lr / fan as f64 };
        let (c, ed) = (self.w_l.rows(), self.e.cols());
        g.e.apply(&mut self.e, &sgd(1))?;
        self.w_l.update(&g.w_l, &sgd(c), 1.0)?;
        self.w_r.update(&g.w_r, &sgd(c), 1.0)?;
        self.w_sl.update(&g.w_sl, &sgd(ed), 1.0)?;
        self.w_sr.update(&g.w_sr, &sgd(ed), 1.0)?;
        self.cl_init.update(&g.cl_init, &sgd(1), 1.0)?;
        self.cr_init.update(&g.cr_init, &sgd(1), 1.0)?;
        self.head.sgd_step(&g.head, lr)
    }

    fn flat_params(&self) -> Vec<f64> {
        flatten(&self.matrices())
    }

    fn set_flat_params(&mut self, flat: &[f64]) {
        let [w2, b2, w4, b4] = self.head.matrices_mut();
        unflatten(
            &mut [
                &mut self.e,
                &mut self.w_l,
                &mut self.w_r,
                &mut self.w_sl,
                &mut self.w_sr,
                &mut self.cl_init,
                &mut self.cr_init,
                w2,
                b2,
                w4,
                b4,
            ],
            flat,
        );
    }

    fn dense_gradient(&self, g: &RcnnGradients) -> Vec<f64> {
        let mut e = vec![0.0; self.e.as_slice().len()];
        g.e.scatter(self.e.cols(), &mut e);
        [
            e,
            g.w_l.clone(),
            g.w_r.clone(),
            g.w_sl.clone(),
            g.w_sr.clone(),
            g.cl_init.clone(),
            g.cr_init.clone(),
            g.head.w2.clone(),
            g.head.b2.clone(),
            g.head.w4.clone(),
            g.head.b4.clone(),
        ]
        .concat()
    }

    fn to_container(&self) -> Container {
        let mut c = Container::default().with_meta("model", "rcnn").with_meta(
            "bptt",
            self.bptt.map_or_else(|| "full".to_string(), |b| b.to_string()),
        );
        c.tokens = self.vocab.tokens().to_vec();
        let names = ["e", "w_l", "w_r", "w_sl", "w_sr", "cl_init", "cr_init", "w2", "b2", "w4", "b4"];
        for (name, m) in names.into_iter().zip(self.matrices()) {
            c.push(Tensor::from_matrix(name, m));
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;

    use super::*;

    fn model(words: &[&str], word_dim: usize, context_dim: usize, hidden: usize, seed: u64) -> RcnnModel {
        let vocab = DocVocab::build(&[words.to_vec()]);
        let shape = RcnnShape {
            word_dim,
            context_dim,
            hidden,
            classes: 2,
        };
        RcnnModel::new(vocab, shape, &mut Rng::seed_from_u64(seed)).unwrap()
    }

    fn mv(m: &ParamMatrix, x: &[f64]) -> Vec<f64> {
        (0..m.rows())
            .map(|r| (0..m.cols()).map(|c| m.get(r, c) * x[c]).sum())
            .collect()
    }

    fn add_tanh(a: &[f64], b: &[f64]) -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| (x + y).tanh()).collect()
    }

    #[test]
    fn single_word_scans_are_boundaries() {
        let m = model(&["a"], 3, 2, 4, 1);
        let (cl, cr) = m.context_scans(&[2]).unwrap();
        assert_eq!(cl, vec![m.cl_init.as_slice().to_vec()]);
        assert_eq!(cr, vec![m.cr_init.as_slice().to_vec()]);
    }

    #[test]
    fn zero_matrices_give_zero_contexts() {
        let mut m = model(&["a", "b", "c"], 3, 2, 4, 2);
        for w in [&mut m.w_l, &mut m.w_r, &mut m.w_sl, &mut m.w_sr] {
            w.as_mut_slice().fill(0.0);
        }
        let (cl, cr) = m.context_scans(&[2, 3, 4, 2]).unwrap();
        assert!(cl[1..].iter().flatten().all(|&v| v == 0.0));
        assert!(cr[..3].iter().flatten().all(|&v| v == 0.0));
        assert_eq!(cl[0], m.cl_init.as_slice());
        assert_eq!(cr[3], m.cr_init.as_slice());
    }

    #[test]
    fn two_word_scan_arithmetic() {
        let m = model(&["a", "b"], 3, 2, 4, 3);
        let ids = [2, 3];
        let (cl, cr) = m.context_scans(&ids).unwrap();
        let cl1 = add_tanh(&mv(&m.w_l, m.cl_init.as_slice()), &mv(&m.w_sl, m.e.row(2)));
        let cr0 = add_tanh(&mv(&m.w_r, m.cr_init.as_slice()), &mv(&m.w_sr, m.e.row(3)));
        for (a, b) in cl[1].iter().zip(&cl1).chain(cr[0].iter().zip(&cr0)) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn three_word_logits_match_recomputation() {
        let m = model(&["a", "b", "c"], 3, 2, 5, 4);
        let ids = [4, 2, 3];
        let e = |i: usize| m.e.row(ids[i]).to_vec();
        let cl0 = m.cl_init.as_slice().to_vec();
        let cl1 = add_tanh(&mv(&m.w_l, &cl0), &mv(&m.w_sl, &e(0)));
        let cl2 = add_tanh(&mv(&m.w_l, &cl1), &mv(&m.w_sl, &e(1)));
        let cr2 = m.cr_init.as_slice().to_vec();
        let cr1 = add_tanh(&mv(&m.w_r, &cr2), &mv(&m.w_sr, &e(2)));
        let cr0 = add_tanh(&mv(&m.w_r, &cr1), &mv(&m.w_sr, &e(1)));
        let xs = [
            [cl0, e(0), cr0].concat(),
            [cl1, e(1), cr1].concat(),
            [cl2, e(2), cr2].concat(),
        ];
        let y2: Vec<Vec<f64>> = xs.iter().map(|x| add_tanh(&mv(&m.head.w2, x), m.head.b2.as_slice())).collect();
        let y3: Vec<f64> = (0..5).map(|k| y2.iter().map(|r| r[k]).fold(f64::MIN, f64::max)).collect();
        let y4: Vec<f64> = mv(&m.head.w4, &y3).iter().zip(m.head.b4.as_slice()).map(|(a, b)| a + b).collect();
        let z = y4.iter().map(|v| v.exp()).sum::<f64>().ln();
        let lp = m.log_probs(&ids).unwrap();
        for c in 0..2 {
            assert!((lp[c] - (y4[c] - z)).abs() < 1e-10);
        }
    }

    #[test]
    fn contexts_only_see_their_side() {
        let m = model(&["a", "b", "c", "d"], 3, 2, 4, 5);
        let base = [2, 3, 4, 5, 2, 3];
        let (cl, cr) = m.context_scans(&base).unwrap();
        let mut changed = base;
        changed[3] = 1;
        let (cl2, cr2) = m.context_scans(&changed).unwrap();
        for i in 0..base.len() {
            assert_eq!(cl[i] == cl2[i], i <= 3, "left context at {i}");
            assert_eq!(cr[i] == cr2[i], i >= 3, "right context at {i}");
        }
    }

    #[test]
    fn checkpoint_round_trip() {
        let mut m = model(&["a", "b"], 3, 2, 4, 6);
        m.bptt = Some(7);
        let back = RcnnModel::from_container(&m.to_container()).unwrap();
        assert_eq!(back.shape(), m.shape());
        assert_eq!(back.bptt, Some(7));
        let (a, b) = (m.flat_params(), back.flat_params());
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-6));
    }

    #[test]
    fn init_bounds_follow_fan_in() {
        let m = model(&["a", "b"], 4, 9, 16, 7);
        let within = |w: &ParamMatrix, b: f64| w.as_slice().iter().all(|v| v.abs() <= b);
        assert!(within(&m.w_l, 1.0 / 3.0));
        assert!(within(&m.w_sl, 0.5));
        assert!(within(&m.head.w2, 1.0 / (22f64).sqrt()));
        assert!(within(&m.head.w4, 0.25));
    }
}
