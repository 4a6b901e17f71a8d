use std::env;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::{Rng as _, SeedableRng};
use wordbench::corpus::{CorpusStream, DocumentDelimiter, NormalizeMode, Vocabulary};
use wordbench::embedding::{train_epochs, EmbeddingModel, ModelKind, ModelShape, TrainConfig};
use wordbench::eval::{eval_analogy, eval_similarity, read_analogy, read_similarity};
use wordbench::io::EmbeddingTable;
use wordbench::rng::{self, Rng, SeedStreams};

use crate::{ensure, Outcome};

const CORPUS_VAR: &str = "WORDBENCH_EN_CORPUS";
const WORDSIM_VAR: &str = "WORDBENCH_WORDSIM353";
const ANALOGY_VAR: &str = "WORDBENCH_ANALOGY";

fn path_from(var: &str) -> Result<String, String> {
    env::var(var).map_err(|_| format!("blocked: set {var} to run this criterion"))
}

fn lowercase_file(var: &str) -> Result<String, String> {
    let path = path_from(var)?;
    Ok(std::fs::read_to_string(&path).map_err(|e| format!("{path}: {e}"))?.to_lowercase())
}

struct Trained {
    corpus_tokens: usize,
    tables: Vec<(ModelKind, EmbeddingTable)>,
}

fn train(kind: ModelKind, docs: &[Vec<usize>], vocab: &Vocabulary) -> Result<EmbeddingTable, String> {
    let shape = ModelShape::new(kind, vocab.len(), 50, 5);
    let mut model =
        EmbeddingModel::new(shape, &mut SeedStreams::new(1).stream(rng::INIT)).map_err(|e| e.to_string())?;
    let cfg = TrainConfig::default();
    train_epochs(&mut model, docs, vocab, &cfg, None, |_, _| Ok(())).map_err(|e| e.to_string())?;
    model.word_table(vocab.tokens()).map_err(|e| e.to_string())
}

fn trained() -> Result<&'static Trained, String> {
    static CELL: OnceLock<Result<Trained, String>> = OnceLock::new();
    CELL.get_or_init(|| {
        let text = lowercase_file(CORPUS_VAR)?;
        let corpus =
            CorpusStream::read(text.as_bytes(), DocumentDelimiter::Line, NormalizeMode::None).map_err(|e| e.to_string())?;
        let vocab = Vocabulary::build(corpus.tokens(), 5).map_err(|e| e.to_string())?;
        let docs = corpus.to_ids(&vocab);
        let mut tables = Vec::new();
        for kind in [ModelKind::SkipGram, ModelKind::Cbow, ModelKind::Cw] {
            tables.push((kind, train(kind, &docs, &vocab)?));
        }
        Ok(Trained {
            corpus_tokens: corpus.n_tokens(),
            tables,
        })
    })
    .as_ref()
    .map_err(Clone::clone)
}

fn table(t: &Trained, kind: ModelKind) -> &EmbeddingTable {
    &t.tables.iter().find(|(k, _)| *k == kind).expect("trained kind").1
}

pub fn wordsim_quality() -> Outcome {
    let ds = read_similarity(lowercase_file(WORDSIM_VAR)?.as_bytes()).map_err(|e| e.to_string())?;
    let t = trained()?;
    let sg = eval_similarity(table(t, ModelKind::SkipGram), &ds).map_err(|e| e.to_string())?;
    let cbow = eval_similarity(table(t, ModelKind::Cbow), &ds).map_err(|e| e.to_string())?;

    let mut rng = Rng::seed_from_u64(9);
    let sg_table = table(t, ModelKind::SkipGram);
    let random_values: Vec<f64> = (0..sg_table.values().len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let random = EmbeddingTable::new(sg_table.tokens().to_vec(), sg_table.dim(), random_values).map_err(|e| e.to_string())?;
    let rand_r = eval_similarity(&random, &ds).map_err(|e| e.to_string())?.pearson;

    let summary = format!(
        "{} tokens; pearson sg {:.3} cbow {:.3} random {:.3}; coverage {:.3}",
        t.corpus_tokens,
        sg.pearson,
        cbow.pearson,
        rand_r,
        sg.coverage()
    );
    ensure!(sg.coverage() >= 0.8, "pair coverage below 0.8 ({summary})");
    ensure!(sg.pearson >= 0.35, "skip-gram pearson below 0.35 ({summary})");
    ensure!(cbow.pearson >= 0.35, "cbow pearson below 0.35 ({summary})");
    ensure!((cbow.pearson - sg.pearson).abs() <= 0.10, "cbow and skip-gram differ by more than 0.10 ({summary})");
    ensure!(rand_r.abs() < 0.1, "random vectors correlate ({summary})");
    Ok(summary)
}

pub fn cw_analogy_below_cbow() -> Outcome {
    let questions = read_analogy(lowercase_file(ANALOGY_VAR)?.as_bytes()).map_err(|e| e.to_string())?;
    let t = trained()?;
    let cbow = table(t, ModelKind::Cbow);
    let mut answerable: Vec<_> = questions
        .into_iter()
        .filter(|q| [&q.a, &q.b, &q.c, &q.expected].iter().all(|w| cbow.id(w).is_some()))
        .collect();
    ensure!(answerable.len() >= 200, "only {} answerable questions", answerable.len());
    answerable.shuffle(&mut Rng::seed_from_u64(7));
    answerable.truncate(200);
    let cbow_acc = eval_analogy(cbow, &answerable).accuracy;
    let cw_acc = eval_analogy(table(t, ModelKind::Cw), &answerable).accuracy;
    ensure!(cw_acc < cbow_acc, "cw accuracy {cw_acc:.3} not below cbow {cbow_acc:.3}");
    Ok(format!("200 questions; cw {cw_acc:.3} < cbow {cbow_acc:.3}"))
}
