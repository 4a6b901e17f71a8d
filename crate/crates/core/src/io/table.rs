use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::optim::ParamMatrix;
use crate::{Error, Result};

/// Row-major word vectors with a token index.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingTable {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    dim: usize,
    values: Vec<f64>,
}

impl EmbeddingTable {
    pub fn new(tokens: Vec<String>, dim: usize, values: Vec<f64>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        if dim == 0 {
            return Err(Error::invalid("embedding dimension must be positive"));
        }
        if values.len() != tokens.len() * dim {
            return Err(Error::DimensionMismatch {
                expected: tokens.len() * dim,
                actual: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("embedding value {v}")));
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate token {t:?}")));
            }
        }
        Ok(EmbeddingTable {
            tokens,
            index,
            dim,
            values,
        })
    }

    /// Takes the first `tokens.len()` rows of `m`.
    pub fn from_matrix(tokens: Vec<String>, m: &ParamMatrix) -> Result<Self> {
        if m.rows() < tokens.len() {
            return Err(Error::DimensionMismatch {
                expected: tokens.len(),
                actual: m.rows(),
            });
        }
        let values = m.as_slice()[..tokens.len() * m.cols()].to_vec();
        EmbeddingTable::new(tokens, m.cols(), values)
    }

    pub fn from_rows(tokens: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: r.len(),
            });
        }
        EmbeddingTable::new(tokens, dim, rows.concat())
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn id(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn row(&self, id: usize) -> &[f64] {
        &self.values[id * self.dim..(id + 1) * self.dim]
    }

    pub fn vector(&self, token: &str) -> Option<&[f64]> {
        self.id(token).map(|i| self.row(i))
    }

    /// Scales every vector by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        EmbeddingTable {
            values: self.values.iter().map(|v| v * s).collect(),
            ..self.clone()
        }
    }

    /// `"<V> <dim>"` header, then `token v_1 … v_dim` per line.
    pub fn write_text<W: Write>(&self, w: W) -> Result<()> {
        let mut w = BufWriter::new(w);
        writeln!(w, "{} {}", self.len(), self.dim)?;
        for (i, t) in self.tokens.iter().enumerate() {
            write!(w, "{t}")?;
            for v in self.row(i) {
                write!(w, " {v}")?;
            }
            writeln!(w)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_text<R: Read>(r: R) -> Result<Self> {
        let mut lines = BufReader::new(r).lines();
        let header = lines.next().ok_or(Error::EmptyVocabulary)??;
        let mut it = header.split_whitespace();
        let parse_count = |s: Option<&str>, what: &str| -> Result<usize> {
            s.and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::parse(1, format!("header must be \"<vocab_size> <dim>\", bad {what}")))
        };
        let n = parse_count(it.next(), "vocabulary size")?;
        let dim = parse_count(it.next(), "dimension")?;
        if it.next().is_some() {
            return Err(Error::parse(1, "header has extra fields"));
        }
        if n == 0 {
            return Err(Error::EmptyVocabulary);
        }
        let mut tokens = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n * dim);
        for (k, line) in lines.enumerate() {
            let lineno = k + 2;
            let line = line?;
            if line.is_empty() {
                continue;
            }
            if tokens.len() == n {
                return Err(Error::parse(lineno, format!("more rows than the {n} declared in the header")));
            }
            let line = line.trim_end();
            let mut fields = line.split(' ');
            let token = fields.next().unwrap_or_default();
            let before = values.len();
            for f in fields {
                let v: f64 = f.parse().map_err(|_| Error::parse(lineno, format!("bad value {f:?}")))?;
                values.push(v);
            }
            if values.len() - before != dim {
                return Err(Error::parse(
                    lineno,
                    format!("expected {dim} values, found {}", values.len() - before),
                ));
            }
            tokens.push(token.to_string());
        }
        if tokens.len() != n {
            return Err(Error::parse(
                tokens.len() + 2,
                format!("header declares {n} rows, found {}", tokens.len()),
            ));
        }
        EmbeddingTable::new(tokens, dim, values)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_text(File::create(path)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        EmbeddingTable::read_text(File::open(path)?)
    }
}
