use crate::optim::{axpy, log_softmax, softmax, Optimizer, ParamMatrix};
use crate::rng::Rng;
use crate::Result;

/// `y2_i = tanh(W2 x_i + b2)`, `y3 = max_i y2_i`, `y4 = W4 y3 + b4`.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct PoolHead {
    pub w2: ParamMatrix,
    pub b2: ParamMatrix,
    pub w4: ParamMatrix,
    pub b4: ParamMatrix,
}

#[derive(Clone, Debug)]
pub struct HeadGradients {
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
    pub w4: Vec<f64>,
    pub b4: Vec<f64>,
}

pub(crate) struct HeadCache {
    pub y2: Vec<Vec<f64>>,
    pub argmax: Vec<usize>,
    pub y3: Vec<f64>,
    pub y4: Vec<f64>,
}

impl PoolHead {
    pub fn new(input: usize, hidden: usize, classes: usize, rng: &mut Rng) -> Self {
        PoolHead {
            w2: ParamMatrix::uniform(hidden, input, 1.0 / (input as f64).sqrt(), rng),
            b2: ParamMatrix::uniform(hidden, 1, 1.0 / (input as f64).sqrt(), rng),
            w4: ParamMatrix::uniform(classes, hidden, 1.0 / (hidden as f64).sqrt(), rng),
            b4: ParamMatrix::uniform(classes, 1, 1.0 / (hidden as f64).sqrt(), rng),
        }
    }

    pub fn hidden(&self) -> usize {
        self.w2.rows()
    }

    pub fn classes(&self) -> usize {
        self.w4.rows()
    }

    pub fn new_grads(&self) -> HeadGradients {
        HeadGradients {
            w2: vec![0.0; self.w2.as_slice().len()],
            b2: vec![0.0; self.hidden()],
            w4: vec![0.0; self.w4.as_slice().len()],
            b4: vec![0.0; self.classes()],
        }
    }

    pub fn matrices(&self) -> [&ParamMatrix; 4] {
        [&self.w2, &self.b2, &self.w4, &self.b4]
    }

    pub fn matrices_mut(&mut self) -> [&mut ParamMatrix; 4] {
        [&mut self.w2, &mut self.b2, &mut self.w4, &mut self.b4]
    }

    pub fn forward(&self, xs: &[Vec<f64>]) -> HeadCache {
        let h = self.hidden();
        let y2: Vec<Vec<f64>> = xs
            .iter()
            .map(|x| {
                let mut z = self.b2.as_slice().to_vec();
                self.w2.mat_vec_add(x, &mut z);
                z.iter_mut().for_each(|v| *v = v.tanh());
                z
            })
            .collect();
        let mut argmax = vec![0; h];
        let mut y3 = y2[0].clone();
        for (i, row) in y2.iter().enumerate().skip(1) {
            for k in 0..h {
                if row[k] > y3[k] {
                    y3[k] = row[k];
                    argmax[k] = i;
                }
            }
        }
        let mut y4 = self.b4.as_slice().to_vec();
        self.w4.mat_vec_add(&y3, &mut y4);
        HeadCache { y2, argmax, y3, y4 }
    }

    /// Loss and per-position input gradients (only pooled positions are nonzero).
    pub fn backward(
        &self,
        xs: &[Vec<f64>],
        cache: &HeadCache,
        class: usize,
        grads: &mut HeadGradients,
    ) -> (f64, Vec<Option<Vec<f64>>>) {
        let h = self.hidden();
        let loss = -log_softmax(&cache.y4)[class];
        let mut dy4 = softmax(&cache.y4);
        dy4[class] -= 1.0;
        let mut dy3 = vec![0.0; h];
        for (c, &d) in dy4.iter().enumerate() {
            grads.b4[c] += d;
            axpy(d, &cache.y3, &mut grads.w4[c * h..(c + 1) * h]);
        }
        self.w4.mat_t_vec_add(&dy4, &mut dy3);

        let mut dz: Vec<Option<Vec<f64>>> = vec![None; xs.len()];
        for k in 0..h {
            let p = cache.argmax[k];
            let y = cache.y2[p][k];
            dz[p].get_or_insert_with(|| vec![0.0; h])[k] += dy3[k] * (1.0 - y * y);
        }
        let cols = self.w2.cols();
        let dx = dz
            .iter()
            .zip(xs)
            .map(|(d, x)| {
                d.as_ref().map(|d| {
                    for r in 0..h {
                        grads.b2[r] += d[r];
                        axpy(d[r], x, &mut grads.w2[r * cols..(r + 1) * cols]);
                    }
                    let mut dx = vec![0.0; cols];
                    self.w2.mat_t_vec_add(d, &mut dx);
                    dx
                })
            })
            .collect();
        (loss, dx)
    }

    pub fn sgd_step(&mut self, g: &HeadGradients, lr: f64) -> Result<()> {
        let fan2 = self.w2.cols() as f64;
        let fan4 = self.w4.cols() as f64;
        self.w2.update(&g.w2, &Optimizer::Sgd { lr: lr / fan2 }, 1.0)?;
        self.b2.update(&g.b2, &Optimizer::Sgd { lr: lr / fan2 }, 1.0)?;
        self.w4.update(&g.w4, &Optimizer::Sgd { lr: lr / fan4 }, 1.0)?;
        self.b4.update(&g.b4, &Optimizer::Sgd { lr: lr / fan4 }, 1.0)
    }

    pub fn log_probs(&self, cache: &HeadCache) -> Vec<f64> {
        log_softmax(&cache.y4)
    }
}
