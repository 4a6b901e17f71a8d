use super::normalized_rows;
use crate::io::EmbeddingTable;
use crate::optim::dot;

/// `a : b :: c : expected`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalogyQuestion {
    pub category: String,
    pub a: String,
    pub b: String,
    pub c: String,
    pub expected: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CategoryScore {
    pub category: String,
    pub correct: usize,
    pub answered: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalogyReport {
    /// Correct over answered; 0 when nothing was answered.
    pub accuracy: f64,
    pub correct: usize,
    pub answered: usize,
    /// Questions with an out-of-vocabulary word.
    pub skipped: usize,
    pub per_category: Vec<CategoryScore>,
}

/// 3CosAdd over the whole vocabulary.
pub fn eval_analogy(emb: &EmbeddingTable, questions: &[AnalogyQuestion]) -> AnalogyReport {
    eval_analogy_within(emb, questions, None)
}

/// 3CosAdd with candidates restricted to the first `limit` rows when given.
pub fn eval_analogy_within(emb: &EmbeddingTable, questions: &[AnalogyQuestion], limit: Option<usize>) -> AnalogyReport {
    let dim = emb.dim();
    let unit = normalized_rows(emb.values(), dim);
    let n_cand = limit.unwrap_or(emb.len()).min(emb.len());
    let mut report = AnalogyReport {
        accuracy: 0.0,
        correct: 0,
        answered: 0,
        skipped: 0,
        per_category: Vec::new(),
    };
    let mut target = vec![0.0; dim];
    for q in questions {
        let ids = [&q.a, &q.b, &q.c, &q.expected].map(|w| emb.id(w));
        let [Some(a), Some(b), Some(c), Some(d)] = ids else {
            report.skipped += 1;
            continue;
        };
        let row = |i: usize| &unit[i * dim..(i + 1) * dim];
        for k in 0..dim {
            target[k] = row(b)[k] - row(a)[k] + row(c)[k];
        }
        // cosine to the target up to its positive norm
        let mut best: Option<(usize, f64)> = None;
        for i in 0..n_cand {
            if i == a || i == b || i == c {
                continue;
            }
            let s = dot(row(i), &target);
            if best.map_or(true, |(_, bs)| s > bs) {
                best = Some((i, s));
            }
        }
        let hit = best.map(|x| x.0) == Some(d);
        report.answered += 1;
        report.correct += usize::from(hit);
        match report.per_category.iter_mut().find(|s| s.category == q.category) {
            Some(s) => {
                s.answered += 1;
                s.correct += usize::from(hit);
            }
            None => report.per_category.push(CategoryScore {
                category: q.category.clone(),
                correct: usize::from(hit),
                answered: 1,
            }),
        }
    }
    if report.answered > 0 {
        report.accuracy = report.correct as f64 / report.answered as f64;
    }
    report
}
