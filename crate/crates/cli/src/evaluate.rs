use std::fs::File;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use log::{info, warn};
use wordbench::eval::{
    avg_document_vector, eval_analogy_within, eval_choice, eval_similarity, nearest_neighbors, pgr, read_analogy,
    read_choice, read_labeled_documents, read_similarity, train_logistic_classifier, LabeledText, LogisticConfig,
    PgrInput,
};
use wordbench::io::EmbeddingTable;
use wordbench::textclass::LabelSet;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Task {
    /// Pearson correlation with human similarity ratings.
    Ws,
    /// Four-choice synonym questions.
    Tfl,
    /// Analogy questions, with per-category accuracy.
    Analogy,
    /// Logistic regression over averaged word vectors.
    Avg,
    /// Nearest neighbours of one word.
    Nn,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long, value_enum)]
    pub task: Task,
    /// Embedding text file.
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Dataset for ws, tfl and analogy.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Labeled training documents for avg.
    #[arg(long)]
    pub train: Option<PathBuf>,
    /// Labeled test documents for avg.
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// Query word for nn.
    #[arg(long)]
    pub word: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Only search the first N embedding rows when answering analogies.
    #[arg(long)]
    pub limit: Option<usize>,
    #[arg(long, default_value_t = 20)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.1)]
    pub lr: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub l2: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Score of random vectors on this task, for the gain ratio.
    #[arg(long, requires = "pgr_best")]
    pub pgr_rand: Option<f64>,
    /// Best known score on this task, for the gain ratio.
    #[arg(long, requires = "pgr_rand")]
    pub pgr_best: Option<f64>,
}

fn required<'a, T>(v: &'a Option<T>, flag: &str, task: Task) -> CliResult<&'a T> {
    v.as_ref()
        .ok_or_else(|| CliError::usage(format!("--{flag} is required for task {task:?}")))
}

fn open(path: &Path) -> CliResult<File> {
    Ok(File::open(path)?)
}

fn features(emb: &EmbeddingTable, docs: &[LabeledText]) -> Vec<Vec<f64>> {
    let mut empty = 0;
    let out = docs
        .iter()
        .map(|d| {
            avg_document_vector(emb, &d.tokens).unwrap_or_else(|_| {
                empty += 1;
                vec![0.0; emb.dim()]
            })
        })
        .collect();
    if empty > 0 {
        warn!("{empty} documents have no in-vocabulary token and use a zero vector");
    }
    out
}

/// Runs the task and returns its score in percent, if the task has one.
fn score(args: &EvalArgs, emb: &EmbeddingTable) -> CliResult<Option<f64>> {
    let task = args.task;
    match task {
        Task::Ws => {
            let ds = read_similarity(open(required(&args.data, "data", task)?)?)?;
            let r = eval_similarity(emb, &ds)?;
            println!("pearson: {:.4}", r.pearson);
            println!("coverage: {}/{} ({:.1}%)", r.covered_pairs, r.total_pairs, 100.0 * r.coverage());
            Ok(Some(100.0 * r.pearson))
        }
        Task::Tfl => {
            let qs = read_choice(open(required(&args.data, "data", task)?)?)?;
            let acc = eval_choice(emb, &qs);
            println!("accuracy: {:.4} over {} questions", acc, qs.len());
            Ok(Some(100.0 * acc))
        }
        Task::Analogy => {
            let qs = read_analogy(open(required(&args.data, "data", task)?)?)?;
            let r = eval_analogy_within(emb, &qs, args.limit);
            for c in &r.per_category {
                let acc = c.correct as f64 / c.answered.max(1) as f64;
                println!("category {}: {}/{} ({:.2}%)", c.category, c.correct, c.answered, 100.0 * acc);
            }
            println!("accuracy: {:.4} ({}/{}, skipped {})", r.accuracy, r.correct, r.answered, r.skipped);
            Ok(Some(100.0 * r.accuracy))
        }
        Task::Avg => {
            let train = read_labeled_documents(open(required(&args.train, "train", task)?)?)?;
            let test = read_labeled_documents(open(required(&args.test, "test", task)?)?)?;
            let labels = LabelSet::from_labels(train.iter().map(|d| d.label.as_str()));
            let ids = |docs: &[LabeledText]| -> CliResult<Vec<usize>> {
                docs.iter()
                    .map(|d| {
                        labels
                            .id(&d.label)
                            .ok_or_else(|| wordbench::Error::InvalidArgument(format!("unseen label {:?}", d.label)).into())
                    })
                    .collect()
            };
            let (ytr, yte) = (ids(&train)?, ids(&test)?);
            let cfg = LogisticConfig {
                l2: args.l2,
                epochs: args.epochs,
                lr: args.lr,
                seed: args.seed,
            };
            info!("logistic config: {cfg:?}");
            let clf = train_logistic_classifier(&features(emb, &train), &ytr, &cfg)?;
            let acc = clf.accuracy(&features(emb, &test), &yte);
            println!("accuracy: {acc:.4} over {} documents", test.len());
            Ok(Some(100.0 * acc))
        }
        Task::Nn => {
            let word = required(&args.word, "word", task)?;
            for line in neighbor_lines(emb, word, args.k)? {
                println!("{line}");
            }
            Ok(None)
        }
    }
}

pub(crate) fn neighbor_lines(emb: &EmbeddingTable, word: &str, k: usize) -> CliResult<Vec<String>> {
    Ok(nearest_neighbors(emb, word, k)?
        .into_iter()
        .map(|(w, s)| format!("{w}\t{s:.4}"))
        .collect())
}

pub fn eval(args: EvalArgs) -> CliResult {
    info!("eval config: {args:?}");
    let emb = EmbeddingTable::load(&args.embeddings)?;
    info!("embeddings={} rows={} dim={}", args.embeddings.display(), emb.len(), emb.dim());
    let score = score(&args, &emb)?;
    if let (Some(p_rand), Some(p_best)) = (args.pgr_rand, args.pgr_best) {
        let p_a = score.ok_or_else(|| CliError::usage("task nn has no score for a gain ratio"))?;
        let ratio = pgr(PgrInput { p_a, p_rand, p_best })?;
        println!("score: {p_a:.2}");
        println!("pgr: {:.2}%", 100.0 * ratio);
    }
    Ok(())
}
