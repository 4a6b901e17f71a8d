use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::SeedableRng;
use wordbench::rng::Rng;
use wordbench::segment::{score_corpus, segment_text, tags_from_segmentation, train_segmenter, SegmenterConfig};
use wordbench::textclass::{
    accuracy, extract_key_phrases, train_classifier, ClassifierConfig, DocModel, DocVocab, RcnnModel, RcnnShape,
    WindowCnnModel,
};

use crate::{data, ensure, Outcome};

fn segmenter_f1(train: &[Vec<String>], eval: &[Vec<String>], cfg: &SegmenterConfig) -> Result<f64, String> {
    let corpus = train
        .iter()
        .map(|s| tags_from_segmentation(s))
        .collect::<wordbench::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    let mut net = cfg.build_net(&corpus).map_err(|e| e.to_string())?;
    train_segmenter(&mut net, &corpus, cfg).map_err(|e| e.to_string())?;
    let pred: Vec<Vec<String>> = eval.iter().map(|s| segment_text(&net, &s.concat())).collect();
    Ok(score_corpus(&pred, eval).map_err(|e| e.to_string())?.f1)
}

pub fn segmenter_capacity() -> Outcome {
    let sentences = data::segmented_sentences(100, 8);
    let cfg = SegmenterConfig {
        epochs: 30,
        ..SegmenterConfig::default()
    };
    let train_f = segmenter_f1(&sentences, &sentences, &cfg)?;
    ensure!(train_f >= 0.99, "training-set F {train_f:.4} < 0.99");
    let (head, tail) = sentences.split_at(90);
    let held_f = segmenter_f1(head, tail, &cfg)?;
    ensure!(held_f >= 0.80, "held-out F {held_f:.4} < 0.80");
    Ok(format!("training F {train_f:.4}, held-out F {held_f:.4}"))
}

fn forward_seconds(model: &RcnnModel, ids: &[usize]) -> f64 {
    (0..5)
        .map(|_| {
            let start = Instant::now();
            for _ in 0..100 {
                std::hint::black_box(model.log_probs(std::hint::black_box(ids)).unwrap());
            }
            start.elapsed().as_secs_f64()
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn rcnn_properties() -> Outcome {
    // (a) forward cost per doubling of the document length
    let docs = data::keyword_order_docs(40, 1);
    let vocab = DocVocab::build(docs.iter().map(|d| &d.tokens));
    let model = RcnnModel::new(vocab.clone(), RcnnShape::default(), &mut Rng::seed_from_u64(1)).map_err(|e| e.to_string())?;
    let long: Vec<usize> = docs.iter().flat_map(|d| vocab.encode(&d.tokens)).collect();
    forward_seconds(&model, &long[..200]);
    let mut ratios = Vec::new();
    for n in [200, 400, 800] {
        ratios.push(forward_seconds(&model, &long[..2 * n]) / forward_seconds(&model, &long[..n]));
    }
    let worst_ratio = ratios.iter().copied().fold(0.0, f64::max);
    ensure!(worst_ratio <= 2.3, "forward time ratios per doubling {ratios:.3?}");

    // (b) keyword order task
    let train = data::keyword_order_docs(400, 2);
    let dev = data::keyword_order_docs(100, 3);
    let test = data::keyword_order_docs(200, 4);
    let vocab = DocVocab::build(train.iter().map(|d| &d.tokens));
    let cfg = ClassifierConfig {
        lr: 0.5,
        epochs: 10,
        seed: 1,
    };
    let shape = RcnnShape {
        word_dim: 10,
        context_dim: 10,
        hidden: 20,
        classes: 2,
    };
    let mut rcnn = RcnnModel::new(vocab.clone(), shape, &mut Rng::seed_from_u64(5)).map_err(|e| e.to_string())?;
    train_classifier(&mut rcnn, &train, &dev, &cfg).map_err(|e| e.to_string())?;
    let rcnn_acc = accuracy(&rcnn, &test).map_err(|e| e.to_string())?;
    let mut cnn = WindowCnnModel::new(vocab, 1, 10, 20, 2, &mut Rng::seed_from_u64(5)).map_err(|e| e.to_string())?;
    train_classifier(&mut cnn, &train, &dev, &cfg).map_err(|e| e.to_string())?;
    let cnn_acc = accuracy(&cnn, &test).map_err(|e| e.to_string())?;
    ensure!(rcnn_acc >= 0.95, "rcnn test accuracy {rcnn_acc:.3} < 0.95");
    ensure!(cnn_acc <= 0.80, "window-1 cnn test accuracy {cnn_acc:.3} > 0.80");

    // (c) key phrases
    let test_tokens: Vec<&[String]> = test.iter().map(|d| d.tokens.as_slice()).collect();
    let phrases = extract_key_phrases(&rcnn, &test_tokens, 3).map_err(|e| e.to_string())?;
    let top = phrases.first().ok_or("no key phrases")?;
    ensure!(
        top.phrase.split(' ').any(|w| w == "kwa" || w == "kwb"),
        "top phrase {:?} misses the planted keywords",
        top.phrase
    );
    Ok(format!(
        "forward ratios {ratios:.2?}; test accuracy rcnn {rcnn_acc:.3} vs window-1 cnn {cnn_acc:.3}; top phrase {:?} x{}",
        top.phrase, top.count
    ))
}

fn wordbench(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_wordbench"))
        .args(args)
        .env("WORDBENCH_LOG", "warn")
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("wordbench {} failed: {}", args.join(" "), String::from_utf8_lossy(&out.stderr)))
    }
}

fn same_bytes(a: &Path, b: &Path) -> Result<bool, String> {
    let read = |p: &Path| fs::read(p).map_err(|e| format!("{}: {e}", p.display()));
    Ok(read(a)? == read(b)?)
}

fn write_inputs(dir: &Path) -> Result<(), String> {
    let corpus = data::zipf_corpus(40, 20_000, 11);
    let text: Vec<String> = corpus.documents.iter().map(|d| d.join(" ")).collect();
    let seg: Vec<String> = data::segmented_sentences(40, 12).iter().map(|s| s.join(" ")).collect();
    let docs: Vec<String> = data::keyword_order_docs(40, 13)
        .iter()
        .map(|d| format!("{}\t{}", ["first", "second"][d.class], d.tokens.join(" ")))
        .collect();
    let w = |name: &str, lines: &[String]| fs::write(dir.join(name), lines.join("\n")).map_err(|e| e.to_string());
    w("corpus.txt", &text)?;
    w("seg.txt", &seg)?;
    w("docs.tsv", &docs)
}

pub fn reproducible_checkpoints() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = tmp.path();
    write_inputs(dir)?;
    let p = |name: &str| dir.join(name).to_string_lossy().into_owned();
    wordbench(&["cooccur", "--corpus", &p("corpus.txt"), "--min-count", "1", "--output", &p("x.tsv"), "--vocab-out", &p("v.tsv")])?;
    let mut checked = Vec::new();
    for run in ["a", "b"] {
        let out = |stem: &str| p(&format!("{stem}-{run}"));
        for kind in ["skipgram", "cbow", "cw"] {
            wordbench(&[
                "train-emb", "--kind", kind, "--corpus", &p("corpus.txt"), "--min-count", "1", "--dim", "12",
                "--epochs", "2", "--output", &out(&format!("{kind}.txt")), "--model", &out(&format!("{kind}.wbc")),
            ])?;
        }
        wordbench(&[
            "factorize", "--matrix", &p("x.tsv"), "--vocab", &p("v.tsv"), "--dim", "8", "--epochs", "5",
            "--output", &out("glove.txt"), "--model", &out("glove.wbc"),
        ])?;
        wordbench(&[
            "segment-train", "--train", &p("seg.txt"), "--dim", "8", "--hidden", "16", "--epochs", "2",
            "--model", &out("seg.wbc"),
        ])?;
        wordbench(&[
            "classify-train", "--train", &p("docs.tsv"), "--word-dim", "6", "--context-dim", "6", "--hidden", "8",
            "--epochs", "2", "--lr", "0.3", "--model", &out("rcnn.wbc"),
        ])?;
    }
    for stem in ["skipgram.wbc", "cbow.wbc", "cw.wbc", "skipgram.txt", "glove.wbc", "glove.txt", "seg.wbc", "rcnn.wbc"] {
        let (a, b) = (dir.join(format!("{stem}-a")), dir.join(format!("{stem}-b")));
        ensure!(same_bytes(&a, &b)?, "{stem} differs between two runs with the same seed");
        checked.push(stem);
    }
    Ok(format!("identical across runs: {}", checked.join(", ")))
}
