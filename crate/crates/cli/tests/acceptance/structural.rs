use rand::{Rng as _, SeedableRng};
use wordbench::corpus::{CorpusStream, SubsampleVariant, Vocabulary};
use wordbench::embedding::{train_epochs, EmbeddingModel, ModelKind, ModelShape, OutputLayer, TrainConfig};
use wordbench::eval::{pgr_table, to_percent};
use wordbench::matrix::{count_cooccurrences, factorize_log_counts, skipgram_equivalence_report, FactorConfig, LogMode};
use wordbench::rng::{self, Rng, SeedStreams};
use wordbench::segment::{path_score, viterbi_decode, Tag};

use crate::{data, ensure, Outcome};

/// Task columns: syn, sem, ws, tfl, avg, ner, cnn, pos.
const RANDOM_SCORES: [f64; 8] = [0.0, 0.0, 0.0, 25.0, 64.38, 84.39, 36.60, 95.41];

const MODEL_SCORES: [[f64; 8]; 6] = [
    [51.78, 44.80, 63.89, 76.25, 74.94, 88.90, 43.84, 96.57],
    [55.83, 44.43, 62.21, 77.50, 74.68, 88.47, 43.75, 96.63],
    [55.57, 36.38, 62.44, 77.50, 74.93, 88.41, 44.77, 96.76],
    [45.74, 29.12, 57.86, 75.00, 74.32, 88.69, 43.98, 96.77],
    [41.41, 23.51, 59.25, 71.25, 73.70, 88.36, 44.40, 96.73],
    [3.13, 2.20, 46.17, 47.50, 73.26, 88.15, 41.86, 96.66],
];

const EXPECTED_PERCENT: [[i64; 8]; 6] = [
    [93, 100, 100, 98, 100, 100, 89, 85],
    [100, 99, 97, 100, 98, 90, 88, 90],
    [100, 81, 98, 100, 100, 89, 100, 99],
    [82, 65, 91, 95, 94, 95, 90, 100],
    [74, 52, 93, 88, 88, 88, 95, 97],
    [6, 5, 72, 43, 84, 83, 64, 92],
];

pub fn pgr_table_reproduction() -> Outcome {
    let scores: Vec<Vec<f64>> = MODEL_SCORES.iter().map(|r| r.to_vec()).collect();
    let table = pgr_table(&scores, &RANDOM_SCORES).map_err(|e| e.to_string())?;
    let mut matched = 0;
    for (r, row) in table.iter().enumerate() {
        for (c, &ratio) in row.iter().enumerate() {
            let got = to_percent(ratio);
            ensure!(got == EXPECTED_PERCENT[r][c], "row {r} column {c}: got {got}, expected {}", EXPECTED_PERCENT[r][c]);
            matched += 1;
        }
    }
    Ok(format!("{matched}/48 cells match"))
}

pub fn equivalence() -> Outcome {
    let corpus: CorpusStream = data::zipf_corpus(20, 200_000, 7);
    let vocab = Vocabulary::build(corpus.tokens(), 1).map_err(|e| e.to_string())?;
    ensure!(vocab.len() == 20, "vocabulary has {} words", vocab.len());
    let m = count_cooccurrences(&corpus, &vocab, 5).map_err(|e| e.to_string())?;

    let mut shape = ModelShape::new(ModelKind::SkipGram, vocab.len(), 24, 5);
    shape.output_layer = OutputLayer::FullSoftmax;
    let mut model = EmbeddingModel::new(shape, &mut SeedStreams::new(1).stream(rng::INIT)).map_err(|e| e.to_string())?;
    let cfg = TrainConfig {
        epochs: 5,
        subsample: None,
        ..TrainConfig::default()
    };
    train_epochs(&mut model, &corpus.to_ids(&vocab), &vocab, &cfg, None, |_, _| Ok(())).map_err(|e| e.to_string())?;
    let report = skipgram_equivalence_report(&m, &model).map_err(|e| e.to_string())?;
    ensure!(report.mean_kl < 0.01, "skip-gram mean KL {:.3e} >= 0.01", report.mean_kl);

    let fit = factorize_log_counts(
        &m,
        24,
        LogMode::Conditional,
        &FactorConfig {
            epochs: 3000,
            ..FactorConfig::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let sums = m.column_sums();
    let worst = m
        .entries()
        .map(|(i, j, x)| (fit.model.predict(i, j) - (x / sums[j]).ln()).abs())
        .fold(0.0, f64::max);
    ensure!(worst < 0.05, "factorization max abs log error {worst:.4} >= 0.05");
    Ok(format!("mean KL {:.3e}, factorization max abs log error {worst:.3e}", report.mean_kl))
}

/// Transitions of the tagging scheme, written out independently of the decoder.
fn allowed(prev: Option<usize>, next: usize) -> bool {
    // 0 = B, 1 = M, 2 = E, 3 = S
    match prev {
        None => next == 0 || next == 3,
        Some(0) | Some(1) => next == 1 || next == 2,
        Some(_) => next == 0 || next == 3,
    }
}

/// Exhaustive search in lexicographic order, keeping the first maximum.
fn brute_force(lattice: &[[f64; 4]]) -> (Vec<usize>, f64) {
    fn walk(lattice: &[[f64; 4]], path: &mut Vec<usize>, best: &mut (Vec<usize>, f64)) {
        if path.len() == lattice.len() {
            let last = *path.last().unwrap();
            if last == 2 || last == 3 {
                let score = path.iter().zip(lattice).rev().fold(0.0, |acc, (&t, row)| row[t] + acc);
                if score > best.1 {
                    *best = (path.clone(), score);
                }
            }
            return;
        }
        for t in 0..4 {
            if allowed(path.last().copied(), t) {
                path.push(t);
                walk(lattice, path, best);
                path.pop();
            }
        }
    }
    let mut best = (Vec::new(), f64::NEG_INFINITY);
    walk(lattice, &mut Vec::new(), &mut best);
    best
}

pub fn viterbi_oracle() -> Outcome {
    let mut rng = Rng::seed_from_u64(2024);
    let mut checked = 0;
    let mut tied = 0;
    for len in 1..=8 {
        for k in 0..1000 {
            let quantized = k % 2 == 1;
            let lattice: Vec<[f64; 4]> = (0..len)
                .map(|_| {
                    std::array::from_fn(|_| {
                        if quantized {
                            rng.gen_range(-2..=1) as f64
                        } else {
                            rng.gen_range(-3.0..0.0)
                        }
                    })
                })
                .collect();
            let (want, want_score) = brute_force(&lattice);
            let got = viterbi_decode(&lattice);
            let got_idx: Vec<usize> = got.iter().map(|t| Tag::index(*t)).collect();
            let got_score = path_score(&lattice, &got);
            ensure!(
                got_idx == want && got_score == want_score,
                "length {len} lattice {k}: decoder {got_idx:?} ({got_score}) vs oracle {want:?} ({want_score})"
            );
            if quantized {
                tied += 1;
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} lattices ({tied} with integer scores) match"))
}

fn closed_form_skip(freq: f64, t: f64, variant: SubsampleVariant) -> f64 {
    let p = match variant {
        SubsampleVariant::Paper => 1.0 - (t / freq).sqrt(),
        SubsampleVariant::Toolkit => (freq - t) / freq - (t / freq).sqrt(),
    };
    p.clamp(0.0, 1.0)
}

pub fn subsampling_statistics() -> Outcome {
    let t = 1e-4;
    let total = 1_000_000u64;
    let trials = 1_000_000;
    let mut worst: f64 = 0.0;
    for variant in [SubsampleVariant::Paper, SubsampleVariant::Toolkit] {
        for mult in [1u64, 2, 4, 16] {
            let count = mult * 100;
            let vocab = Vocabulary::from_counts([("w".to_string(), count), ("rest".to_string(), total - count)])
                .map_err(|e| e.to_string())?
                .with_subsampling(t, variant);
            let id = vocab.id("w").unwrap();
            let doc = vec![id; trials];
            let mut rng = SeedStreams::new(mult).stream(rng::SUBSAMPLE);
            let kept = wordbench::corpus::subsample_document(&doc, &vocab, &mut rng).len();
            let empirical = 1.0 - kept as f64 / trials as f64;
            let expected = closed_form_skip(count as f64 / total as f64, t, variant);
            let gap = (empirical - expected).abs();
            ensure!(gap <= 0.005, "{variant:?} freq {mult}t: skip rate {empirical:.4} vs {expected:.4}");
            worst = worst.max(gap);
        }
    }
    Ok(format!("8 settings, max deviation {worst:.4}"))
}
