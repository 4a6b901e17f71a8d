use crate::optim::SparseRows;

/// Loss gradients for one update of an [`EmbeddingModel`](super::EmbeddingModel).
#[derive(Clone, Debug, Default)]
pub struct Gradients {
    pub input: SparseRows,
    pub output: SparseRows,
    pub output_bias: SparseRows,
    pub transform: Vec<f64>,
    pub hidden_bias: Vec<f64>,
    pub score: Vec<f64>,
    pub(crate) dense_touched: bool,
}

impl Gradients {
    pub fn for_model(model: &super::EmbeddingModel) -> Self {
        Gradients {
            input: SparseRows::new(model.input.cols()),
            output: SparseRows::new(model.output.cols()),
            output_bias: SparseRows::new(1),
            transform: vec![0.0; model.transform.as_ref().map_or(0, |m| m.as_slice().len())],
            hidden_bias: vec![0.0; model.hidden_bias.as_ref().map_or(0, |m| m.as_slice().len())],
            score: vec![0.0; model.score.as_ref().map_or(0, |m| m.as_slice().len())],
            dense_touched: false,
        }
    }

    pub fn clear(&mut self) {
        self.input.clear();
        self.output.clear();
        self.output_bias.clear();
        if self.dense_touched {
            self.transform.iter_mut().for_each(|x| *x = 0.0);
            self.hidden_bias.iter_mut().for_each(|x| *x = 0.0);
            self.score.iter_mut().for_each(|x| *x = 0.0);
            self.dense_touched = false;
        }
    }

    pub fn scale(&mut self, s: f64) {
        self.input.scale(s);
        self.output.scale(s);
        self.output_bias.scale(s);
        for v in [&mut self.transform, &mut self.hidden_bias, &mut self.score] {
            v.iter_mut().for_each(|x| *x *= s);
        }
    }
}
