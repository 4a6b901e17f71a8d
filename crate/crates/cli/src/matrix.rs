use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use log::info;
use wordbench::corpus::Vocabulary;
use wordbench::embedding::EmbeddingModel;
use wordbench::io::{Container, EmbeddingTable};
use wordbench::matrix::{
    count_cooccurrences, skipgram_equivalence_report, train_factorization, CooccurrenceMatrix, FactorConfig,
    FactorObjective, LogMode,
};
use wordbench::optim::Optimizer;

use crate::emb::CorpusArgs;
use crate::error::{CliError, CliResult};

#[derive(Args, Debug)]
pub struct CooccurArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Window size including the centre word.
    #[arg(long, default_value_t = 5)]
    pub win: usize,
    /// Matrix output, `i<TAB>j<TAB>count` lines.
    #[arg(long)]
    pub output: PathBuf,
    /// Vocabulary output, `token<TAB>count` lines in id order.
    #[arg(long)]
    pub vocab_out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ObjectiveArg {
    Glove,
    Log,
    Conditional,
}

#[derive(Args, Debug)]
pub struct FactorizeArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub vocab: PathBuf,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Glove)]
    pub objective: ObjectiveArg,
    #[arg(long, default_value_t = 50)]
    pub dim: usize,
    #[arg(long, default_value_t = 50)]
    pub epochs: usize,
    /// AdaGrad learning rate.
    #[arg(long, default_value_t = 0.05)]
    pub lr: f64,
    #[arg(long, default_value_t = wordbench::matrix::DEFAULT_X_MAX)]
    pub x_max: f64,
    #[arg(long, default_value_t = wordbench::matrix::DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Embedding text file of `p_i + q_i`.
    #[arg(long)]
    pub output: PathBuf,
    /// Binary checkpoint of both factors.
    #[arg(long)]
    pub model: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EquivArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub vocab: PathBuf,
    /// Binary checkpoint of a full-softmax Skip-gram model.
    #[arg(long)]
    pub model: PathBuf,
}

fn load_matrix(matrix: &PathBuf, vocab: &PathBuf) -> CliResult<(CooccurrenceMatrix, Vocabulary)> {
    let vocab = Vocabulary::read(File::open(vocab)?)?;
    let m = CooccurrenceMatrix::read(File::open(matrix)?, vocab.len())?;
    info!("matrix={} n={} nnz={}", matrix.display(), m.n(), m.nnz());
    Ok((m, vocab))
}

pub fn cooccur(args: CooccurArgs) -> CliResult {
    info!("cooccur config: {args:?}");
    let (corpus, vocab) = args.corpus.load()?;
    let m = count_cooccurrences(&corpus, &vocab, args.win)?;
    let mut w = BufWriter::new(File::create(&args.output)?);
    m.write(&mut w)?;
    w.flush()?;
    let mut w = BufWriter::new(File::create(&args.vocab_out)?);
    vocab.write(&mut w)?;
    w.flush()?;
    info!("nnz={} total={}", m.nnz(), m.total());
    Ok(())
}

pub fn factorize(args: FactorizeArgs) -> CliResult {
    info!("factorize config: {args:?}");
    if !(args.lr > 0.0) {
        return Err(CliError::usage("--lr must be positive"));
    }
    let (m, vocab) = load_matrix(&args.matrix, &args.vocab)?;
    let obj = match args.objective {
        ObjectiveArg::Glove => FactorObjective::Glove {
            x_max: args.x_max,
            alpha: args.alpha,
        },
        ObjectiveArg::Log => FactorObjective::Log(LogMode::Raw),
        ObjectiveArg::Conditional => FactorObjective::Log(LogMode::Conditional),
    };
    let cfg = FactorConfig {
        epochs: args.epochs,
        optimizer: Optimizer::adagrad(args.lr),
        seed: args.seed,
    };
    info!("resolved {obj:?} {cfg:?}");
    let fit = train_factorization(&m, args.dim, obj, &cfg)?;
    println!("objective: {:.6e}", fit.objective());
    if let Some(path) = &args.model {
        fit.model.to_container(vocab.tokens()).save(path)?;
    }
    EmbeddingTable::from_rows(vocab.tokens().to_vec(), &fit.model.word_vectors())?.save(&args.output)?;
    Ok(())
}

pub fn equiv_report(args: EquivArgs) -> CliResult {
    info!("equiv-report config: {args:?}");
    let (m, vocab) = load_matrix(&args.matrix, &args.vocab)?;
    let c = Container::load(&args.model)?;
    let model = EmbeddingModel::from_container(&c)?;
    if c.tokens.get(..vocab.len()) != Some(vocab.tokens()) {
        return Err(wordbench::Error::InvalidArgument("model and matrix vocabularies differ".into()).into());
    }
    println!("{}", skipgram_equivalence_report(&m, &model)?);
    Ok(())
}
