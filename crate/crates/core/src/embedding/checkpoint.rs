use super::model::{EmbeddingModel, ModelShape, OutputLayer};
use crate::io::{Container, EmbeddingTable, Tensor};
use crate::rng::{self, SeedStreams};
use crate::{Error, Result};

const OPTIONAL: [&str; 4] = ["transform", "hidden_bias", "output_bias", "score"];

fn parse_meta(c: &Container, key: &str) -> Result<usize> {
    c.require_meta(key)?
        .parse()
        .map_err(|_| Error::invalid(format!("bad {key} entry in checkpoint")))
}

impl EmbeddingModel {
    /// Checkpoint with every parameter table; `tokens` names the input rows.
    pub fn to_container(&self, tokens: &[String]) -> Container {
        let s = &self.shape;
        let layer = match s.output_layer {
            OutputLayer::NegativeSampling => "negative-sampling",
            OutputLayer::FullSoftmax => "full-softmax",
        };
        let mut c = Container::default()
            .with_meta("model", "embedding")
            .with_meta("kind", s.kind)
            .with_meta("dim", s.dim)
            .with_meta("hidden", s.hidden)
            .with_meta("win", s.win)
            .with_meta("output_rows", s.output_rows)
            .with_meta("output_layer", layer);
        c.tokens = tokens.to_vec();
        c.push(Tensor::from_matrix("input", &self.input));
        c.push(Tensor::from_matrix("output", &self.output));
        let optional = [&self.transform, &self.hidden_bias, &self.output_bias, &self.score];
        for (name, m) in OPTIONAL.into_iter().zip(optional) {
            if let Some(m) = m {
                c.push(Tensor::from_matrix(name, m));
            }
        }
        c
    }

    pub fn from_container(c: &Container) -> Result<Self> {
        if c.meta("model") != Some("embedding") {
            return Err(Error::invalid("checkpoint does not hold an embedding model"));
        }
        let output_layer = match c.require_meta("output_layer")? {
            "negative-sampling" => OutputLayer::NegativeSampling,
            "full-softmax" => OutputLayer::FullSoftmax,
            other => return Err(Error::invalid(format!("unknown output layer {other:?}"))),
        };
        let input = c.tensor("input")?.to_matrix()?;
        let output = c.tensor("output")?.to_matrix()?;
        let shape = ModelShape {
            kind: c.require_meta("kind")?.parse()?,
            input_rows: input.rows(),
            output_rows: parse_meta(c, "output_rows")?,
            dim: parse_meta(c, "dim")?,
            hidden: parse_meta(c, "hidden")?,
            win: parse_meta(c, "win")?,
            output_layer,
        };
        shape.validate()?;
        let opt = |name: &str| c.tensor(name).ok().map(Tensor::to_matrix).transpose();
        let model = EmbeddingModel {
            input,
            output,
            transform: opt("transform")?,
            hidden_bias: opt("hidden_bias")?,
            output_bias: opt("output_bias")?,
            score: opt("score")?,
            shape,
        };
        let mut rng = SeedStreams::new(0).stream(rng::INIT);
        let fresh = EmbeddingModel::new(model.shape.clone(), &mut rng)?;
        let dims = |m: &EmbeddingModel| -> Vec<(usize, usize)> {
            m.matrices().iter().map(|t| (t.rows(), t.cols())).collect()
        };
        if dims(&fresh) != dims(&model) || c.tokens.len() != model.input.rows() {
            return Err(Error::invalid("inconsistent embedding checkpoint"));
        }
        Ok(model)
    }

    /// Input vectors of the first `tokens.len()` rows.
    pub fn word_table(&self, tokens: &[String]) -> Result<EmbeddingTable> {
        let rows: Vec<Vec<f64>> = (0..tokens.len()).map(|i| self.input.row(i).to_vec()).collect();
        EmbeddingTable::from_rows(tokens.to_vec(), &rows)
    }
}
