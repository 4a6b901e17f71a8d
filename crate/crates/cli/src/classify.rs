use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use log::info;
use wordbench::eval::{read_labeled_documents, LabeledText};
use wordbench::io::{Container, EmbeddingTable};
use wordbench::rng::{self, SeedStreams};
use wordbench::textclass::{
    accuracy, extract_key_phrases, extract_key_phrases_by_class, train_classifier, ClassifierConfig, DocModel,
    DocVocab, Document, KeyPhrase, LabelSet, RcnnModel, RcnnShape, WindowCnnModel,
};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Arch {
    Rcnn,
    Cnn,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// `label<TAB>tokens` lines.
    #[arg(long)]
    pub train: PathBuf,
    /// Development documents used to pick the kept epoch (defaults to the training set).
    #[arg(long)]
    pub dev: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Arch::Rcnn)]
    pub arch: Arch,
    /// Window size of the convolutional baseline.
    #[arg(long, default_value_t = 3)]
    pub win: usize,
    #[arg(long, default_value_t = 50)]
    pub word_dim: usize,
    #[arg(long, default_value_t = 50)]
    pub context_dim: usize,
    #[arg(long, default_value_t = 100)]
    pub hidden: usize,
    #[arg(long, default_value_t = 0.01)]
    pub lr: f64,
    #[arg(long, default_value_t = 10)]
    pub epochs: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Truncate backpropagation through the scans to this many steps.
    #[arg(long)]
    pub bptt: Option<usize>,
    /// Pretrained word vectors (embedding text file).
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Binary checkpoint output.
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Documents, one per line; `label<TAB>tokens` with --labeled.
    #[arg(long)]
    pub input: PathBuf,
    /// Input lines carry gold labels; accuracy is reported.
    #[arg(long)]
    pub labeled: bool,
}

#[derive(Args, Debug)]
pub struct KeyPhraseArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// `label<TAB>tokens` lines.
    #[arg(long)]
    pub input: PathBuf,
    /// Odd phrase length centred on the pooled word.
    #[arg(long, default_value_t = 3)]
    pub len: usize,
    #[arg(long, default_value_t = 20)]
    pub top: usize,
    /// Report phrases separately for every class.
    #[arg(long)]
    pub by_class: bool,
}

enum Classifier {
    Rcnn(RcnnModel),
    Cnn(WindowCnnModel),
}

fn to_documents(docs: &[LabeledText], labels: &LabelSet) -> CliResult<Vec<Document>> {
    docs.iter()
        .map(|d| {
            let class = labels
                .id(&d.label)
                .ok_or_else(|| wordbench::Error::InvalidArgument(format!("label {:?} unknown to the model", d.label)))?;
            Ok(Document {
                tokens: d.tokens.clone(),
                class,
            })
        })
        .collect()
}

fn save<M: DocModel>(model: &M, labels: &LabelSet, path: &PathBuf) -> CliResult {
    let mut c = model.to_container();
    c.meta.push(("labels".into(), labels.names().join("\t")));
    c.save(path)?;
    Ok(())
}

fn load(path: &PathBuf) -> CliResult<(Classifier, LabelSet)> {
    let c = Container::load(path)?;
    let labels = LabelSet::from_names(c.require_meta("labels")?.split('\t').map(String::from).collect());
    let model = match c.meta("model") {
        Some("rcnn") => Classifier::Rcnn(RcnnModel::from_container(&c)?),
        Some("window-cnn") => Classifier::Cnn(WindowCnnModel::from_container(&c)?),
        other => {
            return Err(wordbench::Error::InvalidArgument(format!("unsupported classifier {other:?}")).into());
        }
    };
    Ok((model, labels))
}

fn fit<M: DocModel>(
    mut model: M,
    args: &TrainArgs,
    train: &[Document],
    dev: &[Document],
    labels: &LabelSet,
) -> CliResult {
    let cfg = ClassifierConfig {
        lr: args.lr,
        epochs: args.epochs,
        seed: args.seed,
    };
    info!("resolved {cfg:?}");
    let report = train_classifier(&mut model, train, dev, &cfg)?;
    for m in &report.epochs {
        println!(
            "epoch {}: loss {:.6} train {:.4} dev {:.4}",
            m.epoch, m.mean_loss, m.train_accuracy, m.dev_accuracy
        );
    }
    println!("best epoch {} dev accuracy {:.4}", report.best_epoch, report.best_dev_accuracy);
    save(&model, labels, &args.model)
}

pub fn train(args: TrainArgs) -> CliResult {
    info!("classify-train config: {args:?}");
    let raw = read_labeled_documents(File::open(&args.train)?)?;
    let labels = LabelSet::from_labels(raw.iter().map(|d| d.label.as_str()));
    if labels.len() < 2 {
        return Err(wordbench::Error::InsufficientData("training data has fewer than two labels".into()).into());
    }
    let train = to_documents(&raw, &labels)?;
    let dev = match &args.dev {
        Some(p) => to_documents(&read_labeled_documents(File::open(p)?)?, &labels)?,
        None => Vec::new(),
    };
    let vocab = DocVocab::build(train.iter().map(|d| &d.tokens));
    info!("labels={:?} vocab={} train={} dev={}", labels.names(), vocab.len(), train.len(), dev.len());
    let pretrained = args.embeddings.as_ref().map(EmbeddingTable::load).transpose()?;
    let mut rng = SeedStreams::new(args.seed).stream(rng::INIT);
    match args.arch {
        Arch::Rcnn => {
            let shape = RcnnShape {
                word_dim: args.word_dim,
                context_dim: args.context_dim,
                hidden: args.hidden,
                classes: labels.len(),
            };
            let mut model = RcnnModel::new(vocab, shape, &mut rng)?;
            model.bptt = args.bptt;
            if let Some(t) = &pretrained {
                info!("loaded {} pretrained word vectors", model.load_word_embeddings(t)?);
            }
            fit(model, &args, &train, &dev, &labels)
        }
        Arch::Cnn => {
            if args.bptt.is_some() {
                return Err(CliError::usage("--bptt applies to the rcnn architecture only"));
            }
            let mut model = WindowCnnModel::new(vocab, args.win, args.word_dim, args.hidden, labels.len(), &mut rng)?;
            if let Some(t) = &pretrained {
                info!("loaded {} pretrained word vectors", model.load_word_embeddings(t)?);
            }
            fit(model, &args, &train, &dev, &labels)
        }
    }
}

fn predict_with<M: DocModel>(model: &M, args: &PredictArgs, labels: &LabelSet) -> CliResult {
    if args.labeled {
        let docs = to_documents(&read_labeled_documents(File::open(&args.input)?)?, labels)?;
        for d in &docs {
            let c = model.classify(&model.vocab().encode(&d.tokens))?;
            println!("{}", labels.name(c).unwrap_or("?"));
        }
        println!("accuracy: {:.4}", accuracy(model, &docs)?);
        return Ok(());
    }
    for line in BufReader::new(File::open(&args.input)?).lines() {
        let line = line?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            println!();
            continue;
        }
        let c = model.classify(&model.vocab().encode(&tokens))?;
        println!("{}", labels.name(c).unwrap_or("?"));
    }
    Ok(())
}

pub fn predict(args: PredictArgs) -> CliResult {
    info!("classify-predict config: {args:?}");
    let (model, labels) = load(&args.model)?;
    match &model {
        Classifier::Rcnn(m) => predict_with(m, &args, &labels),
        Classifier::Cnn(m) => predict_with(m, &args, &labels),
    }
}

fn print_phrases(title: &str, phrases: &[KeyPhrase], top: usize) {
    println!("{title}");
    for p in phrases.iter().take(top) {
        println!("{}\t{}", p.count, p.phrase);
    }
}

fn phrases_with<M: DocModel>(model: &M, args: &KeyPhraseArgs, labels: &LabelSet) -> CliResult {
    let docs = to_documents(&read_labeled_documents(File::open(&args.input)?)?, labels)?;
    if args.by_class {
        for (c, phrases) in extract_key_phrases_by_class(model, &docs, args.len)?.iter().enumerate() {
            print_phrases(&format!("class {}", labels.name(c).unwrap_or("?")), phrases, args.top);
        }
    } else {
        let tokens: Vec<&[String]> = docs.iter().map(|d| d.tokens.as_slice()).collect();
        print_phrases("all", &extract_key_phrases(model, &tokens, args.len)?, args.top);
    }
    Ok(())
}

pub fn key_phrases(args: KeyPhraseArgs) -> CliResult {
    info!("key-phrases config: {args:?}");
    let (model, labels) = load(&args.model)?;
    match &model {
        Classifier::Rcnn(m) => phrases_with(m, &args, &labels),
        Classifier::Cnn(m) => phrases_with(m, &args, &labels),
    }
}
