use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;

use clap::Args;
use log::info;
use wordbench::io::{Container, EmbeddingTable};
use wordbench::segment::{
    format_segmentation, read_segmented, score_corpus, segment_text, tags_from_segmentation, train_segmenter, Prf,
    SegmenterConfig, SegmenterNet,
};

use crate::error::{CliError, CliResult};

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Segmented sentences, words separated by whitespace or `/`.
    #[arg(long)]
    pub train: PathBuf,
    /// Segmented held-out sentences.
    #[arg(long, conflicts_with = "dev_fraction")]
    pub dev: Option<PathBuf>,
    /// Hold out this fraction of the training file (its last sentences).
    #[arg(long)]
    pub dev_fraction: Option<f64>,
    #[arg(long, default_value_t = 50)]
    pub dim: usize,
    #[arg(long, default_value_t = 100)]
    pub hidden: usize,
    #[arg(long, default_value_t = 5)]
    pub win: usize,
    #[arg(long, default_value_t = 0.05)]
    pub lr: f64,
    #[arg(long, default_value_t = 10)]
    pub epochs: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Pretrained character vectors (embedding text file).
    #[arg(long)]
    pub char_embeddings: Option<PathBuf>,
    /// Binary checkpoint output.
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(Args, Debug)]
pub struct DecodeArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Raw text, one sentence per line; standard input when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value = " ")]
    pub sep: String,
}

#[derive(Args, Debug)]
pub struct ScoreArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub gold: PathBuf,
}

fn print_prf(label: &str, p: &Prf) {
    println!(
        "{label}: precision {:.4} recall {:.4} f1 {:.4}",
        p.precision, p.recall, p.f1
    );
}

/// Segments the concatenated gold sentences and scores them against gold.
fn score_net(net: &SegmenterNet, gold: &[Vec<String>]) -> CliResult<Prf> {
    let pred: Vec<Vec<String>> = gold.iter().map(|s| segment_text(net, &s.concat())).collect();
    Ok(score_corpus(&pred, gold)?)
}

pub fn train(args: TrainArgs) -> CliResult {
    info!("segment-train config: {args:?}");
    let mut sentences = read_segmented(File::open(&args.train)?)?;
    let dev = match (&args.dev, args.dev_fraction) {
        (Some(path), _) => read_segmented(File::open(path)?)?,
        (None, Some(f)) => {
            if !(0.0..1.0).contains(&f) {
                return Err(CliError::usage("--dev-fraction must lie in [0, 1)"));
            }
            let keep = sentences.len() - (f * sentences.len() as f64).round() as usize;
            sentences.split_off(keep)
        }
        (None, None) => Vec::new(),
    };
    let corpus = sentences
        .iter()
        .map(|s| tags_from_segmentation(s))
        .collect::<wordbench::Result<Vec<_>>>()?;
    let cfg = SegmenterConfig {
        dim: args.dim,
        hidden: args.hidden,
        win: args.win,
        lr: args.lr,
        epochs: args.epochs,
        seed: args.seed,
    };
    info!("resolved {cfg:?} train={} dev={}", corpus.len(), dev.len());
    let mut net = cfg.build_net(&corpus)?;
    if let Some(path) = &args.char_embeddings {
        let loaded = net.load_char_embeddings(&EmbeddingTable::load(path)?)?;
        info!("loaded {loaded} pretrained character vectors");
    }
    train_segmenter(&mut net, &corpus, &cfg)?;
    net.to_container().save(&args.model)?;
    print_prf("train", &score_net(&net, &sentences)?);
    if !dev.is_empty() {
        print_prf("dev", &score_net(&net, &dev)?);
    }
    Ok(())
}

pub fn decode(args: DecodeArgs) -> CliResult {
    info!("segment-decode config: {args:?}");
    let net = SegmenterNet::from_container(&Container::load(&args.model)?)?;
    let input: Box<dyn BufRead> = match &args.input {
        Some(p) => Box::new(BufReader::new(File::open(p)?)),
        None => Box::new(BufReader::new(io::stdin())),
    };
    let mut out: Box<dyn Write> = match &args.output {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    };
    for line in input.lines() {
        writeln!(out, "{}", format_segmentation(&segment_text(&net, &line?), &args.sep))?;
    }
    out.flush()?;
    Ok(())
}

pub fn score(args: ScoreArgs) -> CliResult {
    let pred = read_segmented(File::open(&args.pred)?)?;
    let gold = read_segmented(File::open(&args.gold)?)?;
    print_prf("score", &score_corpus(&pred, &gold)?);
    Ok(())
}
