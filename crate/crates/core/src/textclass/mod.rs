//! Document classification with a recurrent convolutional network and a
//! window convolutional baseline, both max-pooled over positions.

mod cnn;
mod head;
mod phrases;
mod rcnn;
mod train;

use std::collections::{BTreeSet, HashMap};

pub use cnn::{WindowCnnGradients, WindowCnnModel};
pub use head::HeadGradients;
pub use phrases::{extract_key_phrases, extract_key_phrases_by_class, KeyPhrase};
pub use rcnn::{RcnnGradients, RcnnModel, RcnnShape};
pub use train::{accuracy, train_classifier, ClassifierConfig, EpochMetrics, TrainReport};

use crate::io::{Container, EmbeddingTable};
use crate::optim::ParamMatrix;
use crate::{Error, Result};

/// Row reserved for window slots beyond the document edge.
pub const PADDING: &str = "PADDING";
/// Row for words unseen in training.
pub const UNK: &str = "UNK";

/// Word rows of a classifier; rows 0 and 1 are `PADDING` and `UNK`.
#[derive(Clone, Debug, PartialEq)]
pub struct DocVocab {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
}

impl DocVocab {
    /// Words of `docs` in first-seen order after the reserved rows.
    pub fn build<I, D, S>(docs: I) -> Self
    where
        I: IntoIterator<Item = D>,
        D: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut tokens = vec![PADDING.to_string(), UNK.to_string()];
        let mut index: HashMap<String, usize> = tokens.iter().cloned().zip(0..).collect();
        for doc in docs {
            for t in doc {
                let t = t.as_ref();
                if !index.contains_key(t) {
                    index.insert(t.to_string(), tokens.len());
                    tokens.push(t.to_string());
                }
            }
        }
        DocVocab { tokens, index }
    }

    pub fn from_tokens(tokens: Vec<String>) -> Result<Self> {
        if tokens.first().map(String::as_str) != Some(PADDING) || tokens.get(1).map(String::as_str) != Some(UNK) {
            return Err(Error::invalid("vocabulary must start with PADDING and UNK"));
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate token {t:?}")));
            }
        }
        Ok(DocVocab { tokens, index })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn encode<S: AsRef<str>>(&self, doc: &[S]) -> Vec<usize> {
        doc.iter().map(|t| self.index.get(t.as_ref()).copied().unwrap_or(1)).collect()
    }

    /// Copies known vectors from `table` into `e`; returns how many rows were set.
    pub(crate) fn load_into(&self, e: &mut ParamMatrix, table: &EmbeddingTable) -> Result<usize> {
        if table.dim() != e.cols() {
            return Err(Error::DimensionMismatch {
                expected: e.cols(),
                actual: table.dim(),
            });
        }
        let mut n = 0;
        for (i, t) in self.tokens.iter().enumerate() {
            if let Some(v) = table.vector(t) {
                e.set_row(i, v);
                n += 1;
            }
        }
        Ok(n)
    }
}

/// Sorted set of class names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelSet {
    names: Vec<String>,
}

impl LabelSet {
    pub fn from_labels<'a, I: IntoIterator<Item = &'a str>>(labels: I) -> Self {
        let set: BTreeSet<&str> = labels.into_iter().collect();
        LabelSet {
            names: set.into_iter().map(String::from).collect(),
        }
    }

    pub fn from_names(names: Vec<String>) -> Self {
        LabelSet { names }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn id(&self, label: &str) -> Option<usize> {
        self.names.iter().position(|n| n == label)
    }

    pub fn name(&self, id: usize) -> Option<&str> {
        self.names.get(id).map(String::as_str)
    }
}

/// Tokens with a class id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub tokens: Vec<String>,
    pub class: usize,
}

/// Forward/backward interface shared by the classifiers.
pub trait DocModel: Clone {
    type Grads;

    fn vocab(&self) -> &DocVocab;
    fn n_classes(&self) -> usize;
    /// Class log-probabilities of an encoded document.
    fn log_probs(&self, ids: &[usize]) -> Result<Vec<f64>>;
    /// Position selected by max pooling for every pooled dimension.
    fn pooled_positions(&self, ids: &[usize]) -> Result<Vec<usize>>;
    fn new_grads(&self) -> Self::Grads;
    /// `-log P(class | doc)`, accumulating its gradient.
    fn loss_grad(&self, ids: &[usize], class: usize, grads: &mut Self::Grads) -> Result<f64>;
    /// One SGD step with every matrix's rate divided by its fan-in.
    fn sgd_step(&mut self, grads: &Self::Grads, lr: f64) -> Result<()>;
    fn flat_params(&self) -> Vec<f64>;
    fn set_flat_params(&mut self, flat: &[f64]);
    fn dense_gradient(&self, grads: &Self::Grads) -> Vec<f64>;
    fn to_container(&self) -> Container;

    fn classify(&self, ids: &[usize]) -> Result<usize> {
        let lp = self.log_probs(ids)?;
        Ok((0..lp.len()).fold(0, |b, c| if lp[c] > lp[b] { c } else { b }))
    }
}

pub(crate) fn check_doc(ids: &[usize], rows: usize) -> Result<()> {
    if ids.is_empty() {
        return Err(Error::InsufficientData("empty document".into()));
    }
    if let Some(&bad) = ids.iter().find(|&&i| i >= rows) {
        return Err(Error::UnknownId(bad));
    }
    Ok(())
}

pub(crate) fn flatten(ms: &[&ParamMatrix]) -> Vec<f64> {
    ms.iter().flat_map(|m| m.as_slice().iter().copied()).collect()
}

pub(crate) fn unflatten(ms: &mut [&mut ParamMatrix], flat: &[f64]) {
    let mut off = 0;
    for m in ms.iter_mut() {
        let n = m.as_slice().len();
        m.as_mut_slice().copy_from_slice(&flat[off..off + n]);
        off += n;
    }
}
