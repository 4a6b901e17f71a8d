use rand::Rng as _;

use crate::rng::Rng;
use crate::{Error, Result};

/// Alias-method sampler over ids with probability proportional to a weight.
#[derive(Clone, Debug)]
pub struct NoiseSampler {
    prob: Vec<f64>,
    alias: Vec<usize>,
}

impl NoiseSampler {
    pub fn new(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid("noise weights must be finite and non-negative"));
        }
        if weights.iter().filter(|&&w| w > 0.0).count() < 2 {
            return Err(Error::invalid("noise distribution needs at least two ids with positive weight"));
        }
        let n = weights.len();
        let total: f64 = weights.iter().sum();
        let mut scaled: Vec<f64> = weights.iter().map(|w| w * n as f64 / total).collect();
        let mut prob = vec![1.0; n];
        let mut alias: Vec<usize> = (0..n).collect();
        let (mut small, mut large): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| scaled[i] < 1.0);
        while let (Some(s), Some(&l)) = (small.pop(), large.last()) {
            prob[s] = scaled[s];
            alias[s] = l;
            scaled[l] -= 1.0 - scaled[s];
            if scaled[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // leftovers are 1 up to rounding
        for i in large.into_iter().chain(small) {
            prob[i] = 1.0;
        }
        Ok(NoiseSampler { prob, alias })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(&vec![1.0; n])
    }

    /// Weights `count^exponent`.
    pub fn from_counts(counts: &[u64], exponent: f64) -> Result<Self> {
        let w: Vec<f64> = counts.iter().map(|&c| (c as f64).powf(exponent)).collect();
        Self::new(&w)
    }

    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    #[inline]
    pub fn sample(&self, rng: &mut Rng) -> usize {
        let i = rng.gen_range(0..self.prob.len());
        if rng.gen::<f64>() < self.prob[i] {
            i
        } else {
            self.alias[i]
        }
    }
}

/// `k` noise draws, redrawing any that equal `exclude`.
pub fn negative_sample(sampler: &NoiseSampler, k: usize, exclude: usize, rng: &mut Rng) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    negative_sample_into(sampler, k, exclude, rng, &mut out);
    out
}

pub(crate) fn negative_sample_into(
    sampler: &NoiseSampler,
    k: usize,
    exclude: usize,
    rng: &mut Rng,
    out: &mut Vec<usize>,
) {
    out.clear();
    while out.len() < k {
        let id = sampler.sample(rng);
        if id != exclude {
            out.push(id);
        }
    }
}
