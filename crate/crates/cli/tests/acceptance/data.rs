use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng as _, SeedableRng};
use wordbench::corpus::CorpusStream;
use wordbench::rng::Rng;
use wordbench::textclass::Document;

/// Zipf-distributed tokens with a first-order dependence so conditionals differ by column.
pub fn zipf_corpus(n_words: usize, n_tokens: usize, seed: u64) -> CorpusStream {
    let mut rng = Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (1..=n_words).map(|r| 1.0 / r as f64).collect();
    let zipf = WeightedIndex::new(&weights).unwrap();
    let mut docs = Vec::new();
    let mut produced = 0;
    while produced < n_tokens {
        let mut doc = Vec::with_capacity(100);
        let mut prev = zipf.sample(&mut rng);
        for _ in 0..100 {
            let w = if rng.gen_bool(0.3) { (prev + 1) % n_words } else { zipf.sample(&mut rng) };
            doc.push(format!("w{w}"));
            prev = w;
        }
        produced += doc.len();
        docs.push(doc);
    }
    CorpusStream::new(docs)
}

const HANZI: &str = "天地人山水火木金土日月星风云雨雪花草鱼鸟马牛羊车门口手心头田学生国家大小上下中";

/// Lexicon of short words over a small character set, then sentences drawn from it.
pub fn segmented_sentences(n: usize, seed: u64) -> Vec<Vec<String>> {
    let mut rng = Rng::seed_from_u64(seed);
    let chars: Vec<char> = HANZI.chars().collect();
    let mut lexicon: Vec<String> = Vec::new();
    while lexicon.len() < 80 {
        let len = [1, 2, 2, 2, 3, 3, 4][rng.gen_range(0..7)];
        let w: String = (0..len).map(|_| chars[rng.gen_range(0..chars.len())]).collect();
        if !lexicon.contains(&w) {
            lexicon.push(w);
        }
    }
    (0..n)
        .map(|_| {
            let words = rng.gen_range(4..12);
            (0..words).map(|_| lexicon[rng.gen_range(0..lexicon.len())].clone()).collect()
        })
        .collect()
}

/// Two classes told apart only by the order of two planted keywords, which
/// sit more than 15 tokens from both document ends.
pub fn keyword_order_docs(n: usize, seed: u64) -> Vec<Document> {
    let mut rng = Rng::seed_from_u64(seed);
    (0..n)
        .map(|k| {
            let class = k % 2;
            let mut tokens: Vec<String> = (0..40).map(|_| format!("w{}", rng.gen_range(0..50))).collect();
            let pos = rng.gen_range(16..23);
            let (a, b) = if class == 0 { ("kwa", "kwb") } else { ("kwb", "kwa") };
            tokens.insert(pos, b.to_string());
            tokens.insert(pos, a.to_string());
            Document { tokens, class }
        })
        .collect()
}
