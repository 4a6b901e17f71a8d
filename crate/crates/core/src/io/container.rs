use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::optim::ParamMatrix;
use crate::{Error, Result};

pub const MAGIC: &[u8; 8] = b"WBCKPT01";

/// Named 2-d tensor stored as little-endian `f32`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f32>,
}

impl Tensor {
    pub fn from_f64(name: &str, rows: usize, cols: usize, data: &[f64]) -> Self {
        Tensor {
            name: name.to_string(),
            rows,
            cols,
            data: data.iter().map(|&v| v as f32).collect(),
        }
    }

    pub fn from_matrix(name: &str, m: &ParamMatrix) -> Self {
        Tensor::from_f64(name, m.rows(), m.cols(), m.as_slice())
    }

    pub fn to_matrix(&self) -> Result<ParamMatrix> {
        ParamMatrix::from_values(self.rows, self.cols, self.data.iter().map(|&v| f64::from(v)).collect())
    }
}

/// Checkpoint file: string metadata, a token list and named tensors.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Container {
    pub meta: Vec<(String, String)>,
    pub tokens: Vec<String>,
    pub tensors: Vec<Tensor>,
}

fn put_str<W: Write>(w: &mut W, s: &str) -> Result<()> {
    w.write_all(&(s.len() as u32).to_le_bytes())?;
    w.write_all(s.as_bytes())?;
    Ok(())
}

fn get_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn get_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn get_str<R: Read>(r: &mut R) -> Result<String> {
    let n = get_u32(r)? as usize;
    let mut b = vec![0u8; n];
    r.read_exact(&mut b)?;
    String::from_utf8(b).map_err(|_| Error::invalid("checkpoint string is not UTF-8"))
}

impl Container {
    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn require_meta(&self, key: &str) -> Result<&str> {
        self.meta(key)
            .ok_or_else(|| Error::invalid(format!("checkpoint has no {key:?} entry")))
    }

    pub fn push(&mut self, tensor: Tensor) {
        self.tensors.push(tensor);
    }

    pub fn tensor(&self, name: &str) -> Result<&Tensor> {
        self.tensors
            .iter()
            .find(|t| t.name == name)
            .ok_or_else(|| Error::invalid(format!("checkpoint has no tensor {name:?}")))
    }

    pub fn write<W: Write>(&self, w: W) -> Result<()> {
        let mut w = BufWriter::new(w);
        w.write_all(MAGIC)?;
        w.write_all(&(self.meta.len() as u32).to_le_bytes())?;
        for (k, v) in &self.meta {
            put_str(&mut w, k)?;
            put_str(&mut w, v)?;
        }
        w.write_all(&(self.tokens.len() as u64).to_le_bytes())?;
        for t in &self.tokens {
            put_str(&mut w, t)?;
        }
        w.write_all(&(self.tensors.len() as u32).to_le_bytes())?;
        for t in &self.tensors {
            if t.data.len() != t.rows * t.cols {
                return Err(Error::DimensionMismatch {
                    expected: t.rows * t.cols,
                    actual: t.data.len(),
                });
            }
            put_str(&mut w, &t.name)?;
            w.write_all(&(t.rows as u64).to_le_bytes())?;
            w.write_all(&(t.cols as u64).to_le_bytes())?;
            for v in &t.data {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read<R: Read>(r: R) -> Result<Self> {
        let mut r = BufReader::new(r);
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::invalid("not a checkpoint file"));
        }
        let n_meta = get_u32(&mut r)?;
        let meta = (0..n_meta)
            .map(|_| Ok((get_str(&mut r)?, get_str(&mut r)?)))
            .collect::<Result<Vec<_>>>()?;
        let n_tokens = get_u64(&mut r)?;
        let tokens = (0..n_tokens).map(|_| get_str(&mut r)).collect::<Result<Vec<_>>>()?;
        let n_tensors = get_u32(&mut r)?;
        let mut tensors = Vec::with_capacity(n_tensors as usize);
        for _ in 0..n_tensors {
            let name = get_str(&mut r)?;
            let rows = get_u64(&mut r)? as usize;
            let cols = get_u64(&mut r)? as usize;
            let mut bytes = vec![0u8; rows * cols * 4];
            r.read_exact(&mut bytes)?;
            let data = bytes
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect();
            tensors.push(Tensor { name, rows, cols, data });
        }
        Ok(Container { meta, tokens, tensors })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write(File::create(path)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Container::read(File::open(path)?)
    }
}
