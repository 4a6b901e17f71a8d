use crate::{Error, Result};

/// Performance of one embedding on one task, with the random and best references.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PgrInput {
    pub p_a: f64,
    pub p_rand: f64,
    pub p_best: f64,
}

/// Performance gain ratio `(p_a - p_rand) / (p_best - p_rand)`.
pub fn pgr(input: PgrInput) -> Result<f64> {
    let PgrInput { p_a, p_rand, p_best } = input;
    if ![p_a, p_rand, p_best].iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("performance values".into()));
    }
    if p_best == p_rand {
        return Err(Error::UndefinedPgr(p_best));
    }
    Ok((p_a - p_rand) / (p_best - p_rand))
}

/// Integer percent, rounding halves away from zero.
pub fn to_percent(ratio: f64) -> i64 {
    (ratio * 100.0).round() as i64
}

/// Gain ratios for a models-by-tasks score table, taking each column's
/// maximum as the best reference.
pub fn pgr_table(scores: &[Vec<f64>], random: &[f64]) -> Result<Vec<Vec<f64>>> {
    let tasks = random.len();
    if let Some(row) = scores.iter().find(|r| r.len() != tasks) {
        return Err(Error::DimensionMismatch {
            expected: tasks,
            actual: row.len(),
        });
    }
    let best: Vec<f64> = (0..tasks)
        .map(|t| scores.iter().map(|r| r[t]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    scores
        .iter()
        .map(|row| {
            (0..tasks)
                .map(|t| {
                    pgr(PgrInput {
                        p_a: row[t],
                        p_rand: random[t],
                        p_best: best[t],
                    })
                })
                .collect()
        })
        .collect()
}
