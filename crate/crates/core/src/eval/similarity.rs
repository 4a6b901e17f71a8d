use std::cmp::Ordering;

use super::{cosine, normalized_rows, pearson};
use crate::io::EmbeddingTable;
use crate::optim::dot;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityItem {
    pub a: String,
    pub b: String,
    pub score: f64,
}

pub type SimilarityDataset = Vec<SimilarityItem>;

#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityReport {
    pub pearson: f64,
    pub covered_pairs: usize,
    pub total_pairs: usize,
}

impl SimilarityReport {
    pub fn coverage(&self) -> f64 {
        self.covered_pairs as f64 / self.total_pairs.max(1) as f64
    }
}

/// Pearson correlation between human scores and cosines over in-vocabulary pairs.
pub fn eval_similarity(emb: &EmbeddingTable, ds: &[SimilarityItem]) -> Result<SimilarityReport> {
    let mut human = Vec::new();
    let mut model = Vec::new();
    for item in ds {
        if let (Some(a), Some(b)) = (emb.vector(&item.a), emb.vector(&item.b)) {
            human.push(item.score);
            model.push(cosine(a, b).unwrap_or(0.0));
        }
    }
    if human.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} of {} pairs are in the vocabulary",
            human.len(),
            ds.len()
        )));
    }
    Ok(SimilarityReport {
        pearson: pearson(&model, &human)?,
        covered_pairs: human.len(),
        total_pairs: ds.len(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChoiceQuestion {
    pub query: String,
    pub options: [String; 4],
    pub answer: usize,
}

/// Index of the option closest to the query; `None` when nothing is comparable.
fn choose(emb: &EmbeddingTable, q: &ChoiceQuestion) -> Option<usize> {
    let query = emb.vector(&q.query)?;
    let mut best: Option<(usize, f64)> = None;
    for (i, opt) in q.options.iter().enumerate() {
        let Some(v) = emb.vector(opt) else { continue };
        let Ok(s) = cosine(query, v) else { continue };
        if best.map_or(true, |(_, b)| s > b) {
            best = Some((i, s));
        }
    }
    best.map(|b| b.0)
}

/// Fraction of questions whose closest option is the answer.
pub fn eval_choice(emb: &EmbeddingTable, questions: &[ChoiceQuestion]) -> f64 {
    if questions.is_empty() {
        return 0.0;
    }
    let correct = questions.iter().filter(|q| choose(emb, q) == Some(q.answer)).count();
    correct as f64 / questions.len() as f64
}

/// The `k` nearest tokens by cosine, excluding `word`, ties by ascending id.
pub fn nearest_neighbors(emb: &EmbeddingTable, word: &str, k: usize) -> Result<Vec<(String, f64)>> {
    let q = emb.id(word).ok_or_else(|| Error::OutOfVocabulary(word.to_string()))?;
    if k == 0 {
        return Ok(Vec::new());
    }
    let dim = emb.dim();
    let unit = normalized_rows(emb.values(), dim);
    let qv = &unit[q * dim..(q + 1) * dim];
    let mut scored: Vec<(usize, f64)> = (0..emb.len())
        .filter(|&i| i != q)
        .map(|i| (i, dot(qv, &unit[i * dim..(i + 1) * dim])))
        .collect();
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0)));
    scored.truncate(k);
    Ok(scored.into_iter().map(|(i, s)| (emb.tokens()[i].clone(), s)).collect())
}
