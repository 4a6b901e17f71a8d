use rand::Rng as _;

use crate::rng::Rng;
use crate::{Error, Result};

pub const DEFAULT_ADAGRAD_EPS: f64 = 1e-8;

/// Whether a gradient points uphill on an objective being maximized or on a
/// loss being minimized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Ascent,
    Descent,
}

impl Sense {
    fn sign(self) -> f64 {
        match self {
            Sense::Ascent => 1.0,
            Sense::Descent => -1.0,
        }
    }
}

fn check_finite(grad: &[f64]) -> Result<()> {
    if grad.iter().all(|g| g.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite("gradient".into()))
    }
}

/// `theta <- theta ± lr * grad`
pub fn sgd_step(theta: &mut [f64], grad: &[f64], lr: f64, sense: Sense) -> Result<()> {
    if theta.len() != grad.len() {
        return Err(Error::DimensionMismatch {
            expected: theta.len(),
            actual: grad.len(),
        });
    }
    check_finite(grad)?;
    let step = sense.sign() * lr;
    for (t, g) in theta.iter_mut().zip(grad) {
        *t += step * g;
    }
    Ok(())
}

/// AdaGrad: `accum += grad^2; theta <- theta ± lr * grad / (sqrt(accum) + eps)`
pub fn adagrad_step(
    theta: &mut [f64],
    grad: &[f64],
    accum: &mut [f64],
    lr: f64,
    eps: f64,
    sense: Sense,
) -> Result<()> {
    if theta.len() != grad.len() || accum.len() != grad.len() {
        return Err(Error::DimensionMismatch {
            expected: theta.len(),
            actual: grad.len().min(accum.len()),
        });
    }
    check_finite(grad)?;
    let step = sense.sign() * lr;
    for ((t, g), a) in theta.iter_mut().zip(grad).zip(accum.iter_mut()) {
        *a += g * g;
        *t += step * g / (a.sqrt() + eps);
    }
    Ok(())
}

/// Update rule applied to loss gradients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Optimizer {
    Sgd { lr: f64 },
    AdaGrad { lr: f64, eps: f64 },
}

impl Optimizer {
    pub fn adagrad(lr: f64) -> Self {
        Optimizer::AdaGrad {
            lr,
            eps: DEFAULT_ADAGRAD_EPS,
        }
    }

    pub fn lr(&self) -> f64 {
        match *self {
            Optimizer::Sgd { lr } | Optimizer::AdaGrad { lr, .. } => lr,
        }
    }
}

/// Dense row-major parameter matrix with an optional AdaGrad accumulator.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    accum: Option<Vec<f64>>,
}

impl ParamMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ParamMatrix {
            rows,
            cols,
            values: vec![0.0; rows * cols],
            accum: None,
        }
    }

    /// Entries drawn uniformly from `[-bound, bound]`.
    pub fn uniform(rows: usize, cols: usize, bound: f64, rng: &mut Rng) -> Self {
        let values = (0..rows * cols)
            .map(|_| if bound > 0.0 { rng.gen_range(-bound..=bound) } else { 0.0 })
            .collect();
        ParamMatrix {
            rows,
            cols,
            values,
            accum: None,
        }
    }

    pub fn from_values(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: values.len(),
            });
        }
        Ok(ParamMatrix {
            rows,
            cols,
            values,
            accum: None,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn accumulator(&self) -> Option<&[f64]> {
        self.accum.as_deref()
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values[r * self.cols + c]
    }

    /// `out = self * x`
    pub fn mat_vec(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        for (r, o) in out.iter_mut().enumerate() {
            *o = super::dot(self.row(r), x);
        }
    }

    /// `out += self * x`
    pub fn mat_vec_add(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        for (r, o) in out.iter_mut().enumerate() {
            *o += super::dot(self.row(r), x);
        }
    }

    /// `out += self^T * y`
    pub fn mat_t_vec_add(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.rows);
        for (r, &yr) in y.iter().enumerate() {
            if yr != 0.0 {
                super::axpy(yr, self.row(r), out);
            }
        }
    }

    /// Descent step on `rows * cols` entries starting at `offset` using the
    /// loss gradient `grad`; `scale` multiplies the learning rate.
    fn update_range(&mut self, offset: usize, grad: &[f64], opt: &Optimizer, scale: f64) -> Result<()> {
        let theta = &mut self.values[offset..offset + grad.len()];
        match *opt {
            Optimizer::Sgd { lr } => sgd_step(theta, grad, lr * scale, Sense::Descent),
            Optimizer::AdaGrad { lr, eps } => {
                let n = self.rows * self.cols;
                let accum = self.accum.get_or_insert_with(|| vec![0.0; n]);
                adagrad_step(
                    theta,
                    grad,
                    &mut accum[offset..offset + grad.len()],
                    lr * scale,
                    eps,
                    Sense::Descent,
                )
            }
        }
    }

    pub fn update_row(&mut self, row: usize, grad: &[f64], opt: &Optimizer, scale: f64) -> Result<()> {
        if grad.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: grad.len(),
            });
        }
        self.update_range(row * self.cols, grad, opt, scale)
    }

    pub fn update(&mut self, grad: &[f64], opt: &Optimizer, scale: f64) -> Result<()> {
        if grad.len() != self.values.len() {
            return Err(Error::DimensionMismatch {
                expected: self.values.len(),
                actual: grad.len(),
            });
        }
        self.update_range(0, grad, opt, scale)
    }

    pub fn ensure_accumulator(&mut self) {
        let n = self.values.len();
        self.accum.get_or_insert_with(|| vec![0.0; n]);
    }

    /// Copies values into `row`, e.g. when loading pretrained vectors.
    pub fn set_row(&mut self, row: usize, values: &[f64]) {
        self.row_mut(row).copy_from_slice(values);
    }
}
