#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Documents from a small topical language: each document picks a topic and
/// walks a noisy cycle through that topic's words.
pub fn topical_corpus(n_tokens: usize, topics: usize, words_per_topic: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut docs = Vec::new();
    let mut produced = 0;
    while produced < n_tokens {
        let topic = rng.gen_range(0..topics);
        let len = rng.gen_range(20..60);
        let mut w = rng.gen_range(0..words_per_topic);
        let mut doc = Vec::with_capacity(len);
        for _ in 0..len {
            let r: f64 = rng.gen();
            w = if r < 0.6 {
                (w + 1) % words_per_topic
            } else if r < 0.9 {
                rng.gen_range(0..words_per_topic)
            } else {
                doc.push(format!("f{}", rng.gen_range(0..10)));
                continue;
            };
            doc.push(format!("t{topic}w{w}"));
        }
        produced += doc.len();
        docs.push(doc.join(" "));
    }
    docs
}

pub fn uniform_vec(rng: &mut ChaCha8Rng, n: usize, bound: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-bound..bound)).collect()
}
