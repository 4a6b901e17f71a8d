use std::collections::{HashMap, HashSet};
use std::io::{BufRead, BufReader, Read, Write};

use crate::{Error, Result};

/// Which skip-probability formula to use for frequent-word subsampling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SubsampleVariant {
    /// `P(w) = 1 - sqrt(t / f(w))`
    Paper,
    /// `P(w) = (f(w) - t) / f(w) - sqrt(t / f(w))`, as in the word2vec tool.
    #[default]
    Toolkit,
}

/// Probability of keeping a token with relative frequency `freq`.
///
/// Returns `1 - P(w)` clamped to `[0, 1]`.
pub fn subsample_keep_probability(freq: f64, t: f64, variant: SubsampleVariant) -> f64 {
    debug_assert!(t > 0.0);
    if freq <= 0.0 {
        return 1.0;
    }
    let ratio = (t / freq).sqrt();
    let skip = match variant {
        SubsampleVariant::Paper => 1.0 - ratio,
        SubsampleVariant::Toolkit => (freq - t) / freq - ratio,
    };
    (1.0 - skip).clamp(0.0, 1.0)
}

/// Token/id bijection with counts, keep probabilities and noise weights.
///
/// Ids are dense in `[0, len)` and ordered by descending count, ties broken
/// by the token string.
#[derive(Clone, Debug, PartialEq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    counts: Vec<u64>,
    total_count: u64,
    keep_prob: Vec<f64>,
    noise_weights: Vec<f64>,
    index: HashMap<String, usize>,
}

pub const DEFAULT_NOISE_EXPONENT: f64 = 0.75;

impl Vocabulary {
    /// Counts `tokens` and keeps those seen at least `min_count` times.
    pub fn build<'a, I>(tokens: I, min_count: u64) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut counts: HashMap<&'a str, u64> = HashMap::new();
        for t in tokens {
            *counts.entry(t).or_insert(0) += 1;
        }
        Self::from_counts(
            counts
                .into_iter()
                .filter(|&(_, c)| c >= min_count.max(1))
                .map(|(t, c)| (t.to_string(), c)),
        )
    }

    /// Like [`Vocabulary::build`], but only tokens from the closed list
    /// `allowed` are counted; everything else is ignored.
    pub fn build_closed<'a, I>(tokens: I, allowed: &[String], min_count: u64) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let allowed: HashSet<&str> = allowed.iter().map(String::as_str).collect();
        Self::build(tokens.into_iter().filter(|t| allowed.contains(t)), min_count)
    }

    /// Builds a vocabulary from explicit `(token, count)` pairs.
    pub fn from_counts<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, u64)>,
    {
        let mut pairs: Vec<(String, u64)> = pairs.into_iter().collect();
        if pairs.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        pairs.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let mut index = HashMap::with_capacity(pairs.len());
        for (i, (t, _)) in pairs.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate token {t:?}")));
            }
        }
        let counts: Vec<u64> = pairs.iter().map(|p| p.1).collect();
        let total_count = counts.iter().sum();
        let noise_weights = counts
            .iter()
            .map(|&c| (c as f64).powf(DEFAULT_NOISE_EXPONENT))
            .collect();
        Ok(Vocabulary {
            keep_prob: vec![1.0; pairs.len()],
            tokens: pairs.into_iter().map(|p| p.0).collect(),
            counts,
            total_count,
            noise_weights,
            index,
        })
    }

    /// Recomputes keep probabilities for subsampling threshold `t`.
    pub fn with_subsampling(mut self, t: f64, variant: SubsampleVariant) -> Self {
        let total = self.total_count.max(1) as f64;
        self.keep_prob = self
            .counts
            .iter()
            .map(|&c| subsample_keep_probability(c as f64 / total, t, variant))
            .collect();
        self
    }

    /// Recomputes noise weights as `count^exponent`.
    pub fn with_noise_exponent(mut self, exponent: f64) -> Self {
        self.noise_weights = self.counts.iter().map(|&c| (c as f64).powf(exponent)).collect();
        self
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: usize) -> Option<&str> {
        self.tokens.get(id).map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn count(&self, id: usize) -> u64 {
        self.counts[id]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total_count(&self) -> u64 {
        self.total_count
    }

    pub fn frequency(&self, id: usize) -> f64 {
        self.counts[id] as f64 / self.total_count.max(1) as f64
    }

    pub fn keep_prob(&self, id: usize) -> f64 {
        self.keep_prob[id]
    }

    pub fn noise_weights(&self) -> &[f64] {
        &self.noise_weights
    }

    /// Writes `token<TAB>count` lines.
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        for (t, c) in self.tokens.iter().zip(&self.counts) {
            writeln!(w, "{t}\t{c}")?;
        }
        Ok(())
    }

    pub fn read<R: Read>(r: R) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, line) in BufReader::new(r).lines().enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let (tok, count) = line
                .rsplit_once('\t')
                .ok_or_else(|| Error::parse(i + 1, "expected token<TAB>count"))?;
            let count = count
                .trim()
                .parse::<u64>()
                .map_err(|e| Error::parse(i + 1, e.to_string()))?;
            pairs.push((tok.to_string(), count));
        }
        Self::from_counts(pairs)
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    use super::*;

    #[test]
    fn counts_and_threshold() {
        let v = Vocabulary::build(["a", "b", "a"], 1).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v.count(v.id("a").unwrap()), 2);
        assert_eq!(v.count(v.id("b").unwrap()), 1);
        assert_eq!(v.total_count(), 3);
        let v = Vocabulary::build(["a", "b", "a"], 2).unwrap();
        assert_eq!(v.tokens(), &["a".to_string()]);
        assert!(matches!(Vocabulary::build(["a"], 2), Err(Error::EmptyVocabulary)));
    }

    #[test]
    fn closed_vocabulary_ignores_other_tokens() {
        let allowed = vec!["a".to_string(), "c".to_string()];
        let v = Vocabulary::build_closed(["a", "b", "a", "c", "b"], &allowed, 1).unwrap();
        assert_eq!(v.tokens(), &["a".to_string(), "c".to_string()]);
        assert_eq!(v.total_count(), 3);
    }

    #[test]
    fn matches_independent_counter_on_generated_stream() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let tokens: Vec<String> = (0..100_000)
            .map(|_| {
                let r: f64 = rng.gen();
                format!("w{}", (1.0 / (r + 1e-4)) as u32 % 5000)
            })
            .collect();
        let mut oracle: BTreeMap<&str, u64> = BTreeMap::new();
        for t in &tokens {
            *oracle.entry(t).or_default() += 1;
        }
        let expected = oracle.values().filter(|&&c| c >= 5).count();
        let v = Vocabulary::build(tokens.iter().map(String::as_str), 5).unwrap();
        assert_eq!(v.len(), expected);
        for (t, &c) in oracle.iter().filter(|(_, &c)| c >= 5) {
            assert_eq!(v.count(v.id(t).unwrap()), c);
        }
    }

    #[test]
    fn keep_probability_examples() {
        let t = 1e-4;
        assert!((subsample_keep_probability(4.0 * t, t, SubsampleVariant::Paper) - 0.5).abs() < 1e-12);
        assert!((subsample_keep_probability(4.0 * t, t, SubsampleVariant::Toolkit) - 0.75).abs() < 1e-12);
        assert_eq!(subsample_keep_probability(t, t, SubsampleVariant::Paper), 1.0);
        assert_eq!(subsample_keep_probability(t, t, SubsampleVariant::Toolkit), 1.0);
        assert_eq!(subsample_keep_probability(t / 3.0, t, SubsampleVariant::Toolkit), 1.0);
    }

    #[test]
    fn persisted_round_trip() {
        let v = Vocabulary::build(["x", "y", "x", "z z"], 1).unwrap();
        let mut buf = Vec::new();
        v.write(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "x\t2\ny\t1\nz z\t1\n");
        assert_eq!(Vocabulary::read(&buf[..]).unwrap(), v);
        assert!(matches!(Vocabulary::read(&b"a\tb\n"[..]), Err(Error::Parse { line: 1, .. })));
    }

    proptest! {
        #[test]
        fn keep_probability_bounded_and_monotone(
            t in 1e-6f64..1e-1,
            f1 in 1e-7f64..1.0,
            f2 in 1e-7f64..1.0,
        ) {
            let (lo, hi) = if f1 < f2 { (f1, f2) } else { (f2, f1) };
            for variant in [SubsampleVariant::Paper, SubsampleVariant::Toolkit] {
                let a = subsample_keep_probability(lo, t, variant);
                let b = subsample_keep_probability(hi, t, variant);
                prop_assert!((0.0..=1.0).contains(&a));
                prop_assert!((0.0..=1.0).contains(&b));
                prop_assert!(b <= a + 1e-15);
            }
        }
    }
}
