use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};

use crate::corpus::{windows_for_document, CorpusStream, Vocabulary};
use crate::{Error, Result};

/// Sparse target-by-context counts, kept in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct CooccurrenceMatrix {
    n: usize,
    win: Option<usize>,
    entries: BTreeMap<(usize, usize), f64>,
}

impl CooccurrenceMatrix {
    pub fn new(n: usize, win: Option<usize>) -> Self {
        CooccurrenceMatrix {
            n,
            win,
            entries: BTreeMap::new(),
        }
    }

    /// Builds a matrix from a dense row-major table, dropping zeros.
    pub fn from_dense(n: usize, values: &[f64]) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: values.len(),
            });
        }
        let mut m = CooccurrenceMatrix::new(n, None);
        for (k, &x) in values.iter().enumerate() {
            if x != 0.0 {
                m.add(k / n, k % n, x)?;
            }
        }
        Ok(m)
    }

    /// Vocabulary size; both indices range over `0..n`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn win(&self) -> Option<usize> {
        self.win
    }

    pub fn add(&mut self, i: usize, j: usize, x: f64) -> Result<()> {
        if i >= self.n || j >= self.n {
            return Err(Error::UnknownId(i.max(j)));
        }
        if !x.is_finite() || x < 0.0 {
            return Err(Error::invalid(format!("count must be finite and non-negative, got {x}")));
        }
        *self.entries.entry((i, j)).or_insert(0.0) += x;
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries.get(&(i, j)).copied().unwrap_or(0.0)
    }

    /// Nonzero cells in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.entries.iter().filter(|(_, &x)| x > 0.0).map(|(&(i, j), &x)| (i, j, x))
    }

    pub fn nnz(&self) -> usize {
        self.entries().count()
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    /// `Σ_k x_kj` for every context column `j`.
    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n];
        for (_, j, x) in self.entries() {
            sums[j] += x;
        }
        sums
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n * self.n];
        for (i, j, x) in self.entries() {
            d[i * self.n + j] = x;
        }
        d
    }

    pub fn transpose(&self) -> Self {
        CooccurrenceMatrix {
            n: self.n,
            win: self.win,
            entries: self.entries.iter().map(|(&(i, j), &x)| ((j, i), x)).collect(),
        }
    }

    /// Writes `i<TAB>j<TAB>x` lines.
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        for (i, j, x) in self.entries() {
            writeln!(w, "{i}\t{j}\t{x}")?;
        }
        Ok(())
    }

    pub fn read<R: Read>(r: R, n: usize) -> Result<Self> {
        let mut m = CooccurrenceMatrix::new(n, None);
        for (lineno, line) in BufReader::new(r).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(Error::parse(lineno + 1, "expected i<TAB>j<TAB>x"));
            }
            let i: usize = fields[0].parse().map_err(|_| Error::parse(lineno + 1, "bad row index"))?;
            let j: usize = fields[1].parse().map_err(|_| Error::parse(lineno + 1, "bad column index"))?;
            let x: f64 = fields[2].parse().map_err(|_| Error::parse(lineno + 1, "bad count"))?;
            m.add(i, j, x).map_err(|e| Error::parse(lineno + 1, e.to_string()))?;
        }
        Ok(m)
    }
}

/// Counts (target, context) pairs over id documents, one per window sample.
pub fn count_document_ids(docs: &[Vec<usize>], n: usize, win: usize) -> Result<CooccurrenceMatrix> {
    if win % 2 == 0 {
        return Err(Error::invalid(format!("window size must be odd, got {win}")));
    }
    let mut m = CooccurrenceMatrix::new(n, Some(win));
    for doc in docs {
        for s in windows_for_document(doc, win) {
            for j in s.context_ids() {
                m.add(s.target, j, 1.0)?;
            }
        }
    }
    Ok(m)
}

/// Counts co-occurrences of in-vocabulary tokens without subsampling.
pub fn count_cooccurrences(corpus: &CorpusStream, vocab: &Vocabulary, win: usize) -> Result<CooccurrenceMatrix> {
    count_document_ids(&corpus.to_ids(vocab), vocab.len(), win)
}
