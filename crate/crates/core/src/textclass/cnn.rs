use super::head::{HeadGradients, PoolHead};
use super::{check_doc, flatten, unflatten, DocModel, DocVocab};
use crate::io::{Container, EmbeddingTable, Tensor};
use crate::optim::{Optimizer, ParamMatrix, SparseRows};
use crate::rng::Rng;
use crate::{Error, Result};

/// Convolution over fixed word windows followed by max pooling.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowCnnModel {
    vocab: DocVocab,
    win: usize,
    pub e: ParamMatrix,
    head: PoolHead,
}

#[derive(Clone, Debug)]
pub struct WindowCnnGradients {
    pub e: SparseRows,
    pub head: HeadGradients,
}

impl WindowCnnModel {
    pub fn new(
        vocab: DocVocab,
        win: usize,
        word_dim: usize,
        hidden: usize,
        classes: usize,
        rng: &mut Rng,
    ) -> Result<Self> {
        if win % 2 == 0 || word_dim == 0 || hidden == 0 {
            return Err(Error::invalid(format!("need an odd window and positive sizes, got win={win}")));
        }
        if classes < 2 {
            return Err(Error::invalid("at least two classes are required"));
        }
        Ok(WindowCnnModel {
            e: ParamMatrix::uniform(vocab.len(), word_dim, 1.0, rng),
            head: PoolHead::new(win * word_dim, hidden, classes, rng),
            win,
            vocab,
        })
    }

    pub fn win(&self) -> usize {
        self.win
    }

    pub fn load_word_embeddings(&mut self, table: &EmbeddingTable) -> Result<usize> {
        self.vocab.load_into(&mut self.e, table)
    }

    fn slots(&self, ids: &[usize], i: usize) -> Vec<usize> {
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

    /// Concatenated window vectors centred at `i`, `PADDING` beyond the edges.
    pub fn window_representation(&self, ids: &[usize], i: usize) -> Vec<f64> {
        self.slots(ids, i).iter().flat_map(|&s| self.e.row(s).iter().copied()).collect()
    }

    fn representations(&self, ids: &[usize]) -> Result<Vec<Vec<f64>>> {
        check_doc(ids, self.e.rows())?;
        Ok((0..ids.len()).map(|i| self.window_representation(ids, i)).collect())
    }

    fn matrices(&self) -> Vec<&ParamMatrix> {
        let mut v = vec![&self.e];
        v.extend(self.head.matrices());
        v
    }

    pub fn from_container(c: &Container) -> Result<Self> {
        if c.meta("model") != Some("window-cnn") {
            return Err(Error::invalid("checkpoint does not hold a window CNN classifier"));
        }
        let t = |name: &str| c.tensor(name).and_then(|t| t.to_matrix());
        let win: usize = c
            .require_meta("win")?
            .parse()
            .map_err(|_| Error::invalid("bad window size in checkpoint"))?;
        let m = WindowCnnModel {
            vocab: DocVocab::from_tokens(c.tokens.clone())?,
            win,
            e: t("e")?,
            head: PoolHead {
                w2: t("w2")?,
                b2: t("b2")?,
                w4: t("w4")?,
                b4: t("b4")?,
            },
        };
        if m.e.rows() != m.vocab.len() || m.head.w2.cols() != win * m.e.cols() {
            return Err(Error::invalid("inconsistent window CNN checkpoint"));
        }
        Ok(m)
    }
}

impl DocModel for WindowCnnModel {
    type Grads = WindowCnnGradients;

    fn vocab(&self) -> &DocVocab {
        &self.vocab
    }

    fn n_classes(&self) -> usize {
        self.head.classes()
    }

    fn log_probs(&self, ids: &[usize]) -> Result<Vec<f64>> {
        let xs = self.representations(ids)?;
        Ok(self.head.log_probs(&self.head.forward(&xs)))
    }

    fn pooled_positions(&self, ids: &[usize]) -> Result<Vec<usize>> {
        Ok(self.head.forward(&self.representations(ids)?).argmax)
    }

    fn new_grads(&self) -> WindowCnnGradients {
        WindowCnnGradients {
            e: SparseRows::new(self.e.cols()),
            head: self.head.new_grads(),
        }
    }

    fn loss_grad(&self, ids: &[usize], class: usize, g: &mut WindowCnnGradients) -> Result<f64> {
        if class >= self.n_classes() {
            return Err(Error::UnknownId(class));
        }
        let xs = self.representations(ids)?;
        let hc = self.head.forward(&xs);
        let (loss, dx) = self.head.backward(&xs, &hc, class, &mut g.head);
        let d = self.e.cols();
        for (i, dxi) in dx.iter().enumerate() {
            if let Some(dxi) = dxi {
                for (k, s) in self.slots(ids, i).into_iter().enumerate() {
                    g.e.add(s, 1.0, &dxi[k * d..(k + 1) * d]);
                }
            }
        }
        Ok(loss)
    }

    fn sgd_step(&mut self, g: &WindowCnnGradients, lr: f64) -> Result<()> {
        g.e.apply(&mut self.e, &Optimizer::Sgd { lr })?;
        self.head.sgd_step(&g.head, lr)
    }

    fn flat_params(&self) -> Vec<f64> {
        flatten(&self.matrices())
    }

    fn set_flat_params(&mut self, flat: &[f64]) {
        let [w2, b2, w4, b4] = self.head.matrices_mut();
        unflatten(&mut [&mut self.e, w2, b2, w4, b4], flat);
    }

    fn dense_gradient(&self, g: &WindowCnnGradients) -> Vec<f64> {
        let mut e = vec![0.0; self.e.as_slice().len()];
        g.e.scatter(self.e.cols(), &mut e);
        [e, g.head.w2.clone(), g.head.b2.clone(), g.head.w4.clone(), g.head.b4.clone()].concat()
    }

    fn to_container(&self) -> Container {
        let mut c = Container::default().with_meta("model", "window-cnn").with_meta("win", self.win);
        c.tokens = self.vocab.tokens().to_vec();
        for (name, m) in ["e", "w2", "b2", "w4", "b4"].into_iter().zip(self.matrices()) {
            c.push(Tensor::from_matrix(name, m));
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;

    use super::*;

    fn model(win: usize) -> WindowCnnModel {
        let vocab = DocVocab::build(&[vec!["a", "b", "c"]]);
        WindowCnnModel::new(vocab, win, 2, 3, 2, &mut Rng::seed_from_u64(1)).unwrap()
    }

    #[test]
    fn window_of_one_is_the_word_vector() {
        let m = model(1);
        for i in 0..3 {
            assert_eq!(m.window_representation(&[2, 3, 4], i), m.e.row(i + 2));
        }
    }

    #[test]
    fn window_of_three_concatenates_neighbours() {
        let m = model(3);
        let ids = [2, 3, 4];
        let x = m.window_representation(&ids, 1);
        assert_eq!(x, [m.e.row(2), m.e.row(3), m.e.row(4)].concat());
        let edge = m.window_representation(&ids, 0);
        assert_eq!(edge, [m.e.row(0), m.e.row(2), m.e.row(3)].concat());
    }

    #[test]
    fn even_window_rejected() {
        let vocab = DocVocab::build(&[vec!["a"]]);
        assert!(WindowCnnModel::new(vocab, 2, 2, 3, 2, &mut Rng::seed_from_u64(1)).is_err());
    }

    #[test]
    fn checkpoint_round_trip() {
        let m = model(3);
        let back = WindowCnnModel::from_container(&m.to_container()).unwrap();
        assert_eq!(back.win(), 3);
        assert_eq!(back.log_probs(&[2, 3]).unwrap().len(), 2);
    }
}
