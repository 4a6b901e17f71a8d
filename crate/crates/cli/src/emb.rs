use std::fs::{self, File};
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use log::info;
use wordbench::corpus::{shuffle_documents, CorpusStream, DocumentDelimiter, NormalizeMode, SubsampleVariant, Vocabulary};
use wordbench::embedding::{train_epochs, CharWordVocab, EmbeddingModel, ModelKind, ModelShape, OutputLayer, TrainConfig};
use wordbench::io::EmbeddingTable;
use wordbench::optim::Optimizer;
use wordbench::rng::{self, SeedStreams};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum OptimizerArg {
    Adagrad,
    Sgd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum VariantArg {
    Toolkit,
    Paper,
}

/// Corpus loading options shared by every corpus-reading command.
#[derive(Args, Debug, Clone)]
pub struct CorpusArgs {
    /// Whitespace-tokenized text, one document per line.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Documents are separated by blank lines instead of newlines.
    #[arg(long)]
    pub blank_line_docs: bool,
    /// Rewrite digit runs to NUMBER and Latin runs to WORD.
    #[arg(long)]
    pub normalize: bool,
    /// Drop words seen fewer times.
    #[arg(long, default_value_t = 5)]
    pub min_count: u64,
    /// Closed vocabulary: one token per line (first column); other words are ignored.
    #[arg(long)]
    pub vocab_list: Option<PathBuf>,
}

impl CorpusArgs {
    pub fn load(&self) -> CliResult<(CorpusStream, Vocabulary)> {
        let delim = if self.blank_line_docs {
            DocumentDelimiter::BlankLine
        } else {
            DocumentDelimiter::Line
        };
        let mode = if self.normalize {
            NormalizeMode::Segmentation
        } else {
            NormalizeMode::None
        };
        let corpus = CorpusStream::open(&self.corpus, delim, mode)?;
        let vocab = match &self.vocab_list {
            Some(path) => {
                let allowed = read_token_list(path)?;
                Vocabulary::build_closed(corpus.tokens(), &allowed, self.min_count)?
            }
            None => Vocabulary::build(corpus.tokens(), self.min_count)?,
        };
        info!(
            "corpus={} documents={} tokens={} vocab={}",
            self.corpus.display(),
            corpus.documents.len(),
            corpus.n_tokens(),
            vocab.len()
        );
        Ok((corpus, vocab))
    }
}

fn read_token_list(path: &Path) -> CliResult<Vec<String>> {
    let mut out = Vec::new();
    for line in BufReader::new(File::open(path)?).lines() {
        if let Some(t) = line?.split_whitespace().next() {
            out.push(t.to_string());
        }
    }
    Ok(out)
}

#[derive(Args, Debug, Clone)]
pub struct CommonTrainArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Embedding text file written after training.
    #[arg(long)]
    pub output: PathBuf,
    /// Binary checkpoint of the final model.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Directory receiving a binary checkpoint after every epoch.
    #[arg(long)]
    pub checkpoint_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub dim: usize,
    /// Window size including the centre word.
    #[arg(long, default_value_t = 5)]
    pub win: usize,
    #[arg(long, default_value_t = 5)]
    pub negatives: usize,
    #[arg(long, value_enum, default_value_t = OptimizerArg::Adagrad)]
    pub optimizer: OptimizerArg,
    #[arg(long, default_value_t = 0.1)]
    pub lr: f64,
    #[arg(long, default_value_t = 5)]
    pub epochs: usize,
    /// Subsampling threshold t; 0 disables subsampling.
    #[arg(long, default_value_t = 1e-4)]
    pub subsample: f64,
    #[arg(long, value_enum, default_value_t = VariantArg::Toolkit)]
    pub subsample_variant: VariantArg,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Shuffle document order before training.
    #[arg(long)]
    pub shuffle: bool,
}

impl CommonTrainArgs {
    fn config(&self) -> TrainConfig {
        TrainConfig {
            negatives: self.negatives,
            optimizer: match self.optimizer {
                OptimizerArg::Adagrad => Optimizer::adagrad(self.lr),
                OptimizerArg::Sgd => Optimizer::Sgd { lr: self.lr },
            },
            epochs: self.epochs,
            subsample: (self.subsample > 0.0).then_some(self.subsample),
            subsample_variant: match self.subsample_variant {
                VariantArg::Toolkit => SubsampleVariant::Toolkit,
                VariantArg::Paper => SubsampleVariant::Paper,
            },
            seed: self.seed,
            workers: self.workers,
            ..TrainConfig::default()
        }
    }

    fn check(&self) -> CliResult {
        if self.subsample < 0.0 {
            return Err(CliError::usage("--subsample must not be negative"));
        }
        if self.workers == 0 {
            return Err(CliError::usage("--workers must be positive"));
        }
        if let Some(dir) = &self.checkpoint_dir {
            fs::create_dir_all(dir)?;
        }
        Ok(())
    }
}

#[derive(Args, Debug)]
pub struct TrainEmbArgs {
    #[arg(long)]
    pub kind: ModelKind,
    #[command(flatten)]
    pub common: CommonTrainArgs,
    /// Hidden layer size of LBL, NNLM and C&W (defaults to --dim).
    #[arg(long)]
    pub hidden: Option<usize>,
    /// Exact softmax output layer (Skip-gram only).
    #[arg(long)]
    pub full_softmax: bool,
}

#[derive(Args, Debug)]
pub struct TrainCharwordArgs {
    #[command(flatten)]
    pub common: CommonTrainArgs,
    /// Weight of the character terms.
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    /// Also use the characters of context words as context units.
    #[arg(long)]
    pub char_context: bool,
    /// Text file for the character vectors.
    #[arg(long)]
    pub char_output: Option<PathBuf>,
}

fn run_training(
    common: &CommonTrainArgs,
    mut model: EmbeddingModel,
    cfg: &TrainConfig,
    vocab: &Vocabulary,
    corpus: &CorpusStream,
    chars: Option<&CharWordVocab>,
    tokens: &[String],
) -> CliResult<EmbeddingModel> {
    let corpus = if common.shuffle {
        shuffle_documents(corpus, common.seed)
    } else {
        corpus.clone()
    };
    let docs = corpus.to_ids(vocab);
    train_epochs(&mut model, &docs, vocab, cfg, chars, |m, st| {
        if let Some(dir) = &common.checkpoint_dir {
            m.to_container(tokens).save(dir.join(format!("epoch-{}.wbc", st.epoch)))?;
        }
        Ok(())
    })?;
    if let Some(path) = &common.model {
        model.to_container(tokens).save(path)?;
    }
    model.word_table(&tokens[..vocab.len()])?.save(&common.output)?;
    info!("wrote {}", common.output.display());
    Ok(model)
}

pub fn train_emb(args: TrainEmbArgs) -> CliResult {
    info!("train-emb config: {args:?}");
    let common = &args.common;
    common.check()?;
    let (corpus, vocab) = common.corpus.load()?;
    let mut shape = ModelShape::new(args.kind, vocab.len(), common.dim, common.win);
    if let Some(h) = args.hidden {
        shape.hidden = h;
    }
    if args.full_softmax {
        shape.output_layer = OutputLayer::FullSoftmax;
    }
    let cfg = common.config();
    info!("resolved {shape:?} {cfg:?}");
    let model = EmbeddingModel::new(shape, &mut SeedStreams::new(common.seed).stream(rng::INIT))?;
    run_training(common, model, &cfg, &vocab, &corpus, None, vocab.tokens())?;
    Ok(())
}

pub fn train_charword(args: TrainCharwordArgs) -> CliResult {
    info!("train-charword config: {args:?}");
    let common = &args.common;
    common.check()?;
    let (corpus, vocab) = common.corpus.load()?;
    let cw = CharWordVocab::new(vocab.clone());
    let mut shape = ModelShape::new(ModelKind::SkipGram, cw.n_words(), common.dim, common.win);
    shape.input_rows = cw.joint_size();
    let cfg = TrainConfig {
        beta: args.beta,
        char_context: args.char_context,
        ..common.config()
    };
    info!("resolved {shape:?} {cfg:?} characters={}", cw.chars().len());
    let model = EmbeddingModel::new(shape, &mut SeedStreams::new(common.seed).stream(rng::INIT))?;
    let tokens = cw.joint_tokens();
    let model = run_training(common, model, &cfg, &vocab, &corpus, Some(&cw), &tokens)?;
    if let Some(path) = &args.char_output {
        let n = cw.n_words();
        let rows: Vec<Vec<f64>> = (0..cw.chars().len()).map(|i| model.input.row(n + i).to_vec()).collect();
        EmbeddingTable::from_rows(cw.chars().to_vec(), &rows)?.save(path)?;
    }
    Ok(())
}
