use log::info;
use rand::seq::SliceRandom;

use super::CooccurrenceMatrix;
use crate::io::{Container, Tensor};
use crate::optim::{dot, Optimizer, ParamMatrix};
use crate::rng::{self, SeedStreams};
use crate::{Error, Result};

pub const DEFAULT_X_MAX: f64 = 100.0;
pub const DEFAULT_ALPHA: f64 = 0.75;

/// Down-weights rare pairs: `(x / x_max)^alpha`, capped at 1.
pub fn glove_weight(x: f64, x_max: f64, alpha: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::invalid(format!("weight is only defined for positive counts, got {x}")));
    }
    Ok(if x < x_max { (x / x_max).powf(alpha) } else { 1.0 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogMode {
    /// Fit `log x_ij`.
    Raw,
    /// Fit `log(x_ij / Σ_k x_kj)`.
    Conditional,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FactorObjective {
    /// Weighted fit of `p_i·q_j + b_i + b_j` to `log x_ij`.
    Glove { x_max: f64, alpha: f64 },
    Log(LogMode),
}

impl FactorObjective {
    pub fn glove() -> Self {
        FactorObjective::Glove {
            x_max: DEFAULT_X_MAX,
            alpha: DEFAULT_ALPHA,
        }
    }

    fn has_biases(self) -> bool {
        matches!(self, FactorObjective::Glove { .. })
    }
}

/// Target and context factors with optional per-word biases.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorModel {
    pub p: ParamMatrix,
    pub q: ParamMatrix,
    pub bias1: Option<ParamMatrix>,
    pub bias2: Option<ParamMatrix>,
}

impl FactorModel {
    pub fn dim(&self) -> usize {
        self.p.cols()
    }

    /// `p_i·q_j` plus both biases when present.
    pub fn predict(&self, i: usize, j: usize) -> f64 {
        let mut s = dot(self.p.row(i), self.q.row(j));
        if let (Some(b1), Some(b2)) = (&self.bias1, &self.bias2) {
            s += b1.get(i, 0) + b2.get(j, 0);
        }
        s
    }

    pub fn to_container(&self, tokens: &[String]) -> Container {
        let mut c = Container::default().with_meta("model", "factorization");
        c.tokens = tokens.to_vec();
        c.push(Tensor::from_matrix("p", &self.p));
        c.push(Tensor::from_matrix("q", &self.q));
        if let (Some(b1), Some(b2)) = (&self.bias1, &self.bias2) {
            c.push(Tensor::from_matrix("bias1", b1));
            c.push(Tensor::from_matrix("bias2", b2));
        }
        c
    }

    pub fn from_container(c: &Container) -> Result<Self> {
        if c.meta("model") != Some("factorization") {
            return Err(Error::invalid("checkpoint does not hold a factorization"));
        }
        let opt = |name: &str| c.tensor(name).ok().map(Tensor::to_matrix).transpose();
        let m = FactorModel {
            p: c.tensor("p")?.to_matrix()?,
            q: c.tensor("q")?.to_matrix()?,
            bias1: opt("bias1")?,
            bias2: opt("bias2")?,
        };
        let n = m.p.rows();
        let bias_ok = |b: &Option<ParamMatrix>| b.as_ref().is_none_or(|b| b.rows() == n && b.cols() == 1);
        if m.q.rows() != n || m.q.cols() != m.p.cols() || !bias_ok(&m.bias1) || !bias_ok(&m.bias2) {
            return Err(Error::invalid("inconsistent factorization checkpoint"));
        }
        Ok(m)
    }

    /// Word vectors as `p_i + q_i`.
    pub fn word_vectors(&self) -> Vec<Vec<f64>> {
        (0..self.p.rows())
            .map(|i| self.p.row(i).iter().zip(self.q.row(i)).map(|(a, b)| a + b).collect())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorConfig {
    pub epochs: usize,
    pub optimizer: Optimizer,
    pub seed: u64,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig {
            epochs: 50,
            optimizer: Optimizer::adagrad(0.05),
            seed: 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FactorFit {
    pub model: FactorModel,
    /// Objective after each epoch.
    pub objectives: Vec<f64>,
}

impl FactorFit {
    pub fn objective(&self) -> f64 {
        self.objectives.last().copied().unwrap_or(f64::NAN)
    }
}

struct Cell {
    i: usize,
    j: usize,
    target: f64,
    weight: f64,
}

fn cells(matrix: &CooccurrenceMatrix, obj: FactorObjective) -> Result<Vec<Cell>> {
    let sums = matrix.column_sums();
    let cells = matrix
        .entries()
        .map(|(i, j, x)| {
            let (target, weight) = match obj {
                FactorObjective::Glove { x_max, alpha } => (x.ln(), glove_weight(x, x_max, alpha)?),
                FactorObjective::Log(LogMode::Raw) => (x.ln(), 1.0),
                FactorObjective::Log(LogMode::Conditional) => ((x / sums[j]).ln(), 1.0),
            };
            Ok(Cell { i, j, target, weight })
        })
        .collect::<Result<Vec<_>>>()?;
    if cells.is_empty() {
        return Err(Error::InsufficientData("no nonzero co-occurrence cells".into()));
    }
    Ok(cells)
}

/// Weighted squared residual summed over the nonzero cells.
pub fn objective(model: &FactorModel, matrix: &CooccurrenceMatrix, obj: FactorObjective) -> Result<f64> {
    Ok(cells(matrix, obj)?
        .iter()
        .map(|c| {
            let r = model.predict(c.i, c.j) - c.target;
            c.weight * r * r
        })
        .sum())
}

/// AdaGrad (or SGD) over the nonzero cells, reshuffled every epoch.
pub fn train_factorization(
    matrix: &CooccurrenceMatrix,
    dim: usize,
    obj: FactorObjective,
    cfg: &FactorConfig,
) -> Result<FactorFit> {
    if dim == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    let mut cells = cells(matrix, obj)?;
    let streams = SeedStreams::new(cfg.seed);
    let mut init = streams.stream(rng::INIT);
    let mut order = streams.stream(rng::ORDER);
    let n = matrix.n();
    let bound = 0.5 / dim as f64;
    let mut model = FactorModel {
        p: ParamMatrix::uniform(n, dim, bound, &mut init),
        q: ParamMatrix::uniform(n, dim, bound, &mut init),
        bias1: obj.has_biases().then(|| ParamMatrix::zeros(n, 1)),
        bias2: obj.has_biases().then(|| ParamMatrix::zeros(n, 1)),
    };

    let opt = cfg.optimizer;
    let mut gp = vec![0.0; dim];
    let mut gq = vec![0.0; dim];
    let mut objectives = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        cells.shuffle(&mut order);
        for c in &cells {
            let r = model.predict(c.i, c.j) - c.target;
            let g = 2.0 * c.weight * r;
            let (p, q) = (model.p.row(c.i), model.q.row(c.j));
            for k in 0..dim {
                gp[k] = g * q[k];
                gq[k] = g * p[k];
            }
            model.p.update_row(c.i, &gp, &opt, 1.0)?;
            model.q.update_row(c.j, &gq, &opt, 1.0)?;
            if let (Some(b1), Some(b2)) = (&mut model.bias1, &mut model.bias2) {
                b1.update_row(c.i, &[g], &opt, 1.0)?;
                b2.update_row(c.j, &[g], &opt, 1.0)?;
            }
        }
        let value: f64 = cells
            .iter()
            .map(|c| {
                let r = model.predict(c.i, c.j) - c.target;
                c.weight * r * r
            })
            .sum();
        if !value.is_finite() {
            return Err(Error::NonFinite(format!("factorization objective at epoch {}", epoch + 1)));
        }
        info!("epoch={} objective={value:.6e} cells={}", epoch + 1, cells.len());
        objectives.push(value);
    }
    Ok(FactorFit { model, objectives })
}

pub fn train_glove(matrix: &CooccurrenceMatrix, dim: usize, cfg: &FactorConfig) -> Result<FactorFit> {
    train_factorization(matrix, dim, FactorObjective::glove(), cfg)
}

pub fn factorize_log_counts(
    matrix: &CooccurrenceMatrix,
    dim: usize,
    mode: LogMode,
    cfg: &FactorConfig,
) -> Result<FactorFit> {
    train_factorization(matrix, dim, FactorObjective::Log(mode), cfg)
}
