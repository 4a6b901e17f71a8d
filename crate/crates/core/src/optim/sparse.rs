use super::{axpy, Optimizer, ParamMatrix};
use crate::Result;

/// Row-sparse gradient accumulator; repeated rows are summed.
#[derive(Clone, Debug, Default)]
pub struct SparseRows {
    dim: usize,
    ids: Vec<usize>,
    data: Vec<f64>,
}

impl SparseRows {
    pub fn new(dim: usize) -> Self {
        SparseRows {
            dim,
            ids: Vec::new(),
            data: Vec::new(),
        }
    }

    pub fn clear(&mut self) {
        self.ids.clear();
        self.data.clear();
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Slot for `id`, created zeroed if absent.
    pub fn row_mut(&mut self, id: usize) -> &mut [f64] {
        let pos = match self.ids.iter().position(|&i| i == id) {
            Some(p) => p,
            None => {
                self.ids.push(id);
                self.data.resize(self.data.len() + self.dim, 0.0);
                self.ids.len() - 1
            }
        };
        &mut self.data[pos * self.dim..(pos + 1) * self.dim]
    }

    /// `row(id) += alpha * v`
    pub fn add(&mut self, id: usize, alpha: f64, v: &[f64]) {
        axpy(alpha, v, self.row_mut(id));
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &[f64])> {
        self.ids
            .iter()
            .enumerate()
            .map(move |(p, &id)| (id, &self.data[p * self.dim..(p + 1) * self.dim]))
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|x| *x *= s);
    }

    pub(crate) fn apply(&self, m: &mut ParamMatrix, opt: &Optimizer) -> Result<()> {
        for (id, g) in self.iter() {
            m.update_row(id, g, opt, 1.0)?;
        }
        Ok(())
    }

    pub(crate) fn scatter(&self, cols: usize, dense: &mut [f64]) {
        for (id, g) in self.iter() {
            axpy(1.0, g, &mut dense[id * cols..(id + 1) * cols]);
        }
    }
}
