//! Command-line front end of the wordbench toolkit.

mod classify;
mod emb;
mod error;
mod evaluate;
mod matrix;
mod seg;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::error;

use error::CliResult;

#[derive(Parser, Debug)]
#[command(name = "wordbench", version, about = "Train and evaluate word and character representations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train word embeddings with one of the six architectures.
    TrainEmb(emb::TrainEmbArgs),
    /// Joint character-word Skip-gram training.
    TrainCharword(emb::TrainCharwordArgs),
    /// Count windowed co-occurrences of a corpus.
    Cooccur(matrix::CooccurArgs),
    /// Fit a factorization of a co-occurrence matrix.
    Factorize(matrix::FactorizeArgs),
    /// Compare a full-softmax Skip-gram model with corpus conditionals.
    EquivReport(matrix::EquivArgs),
    /// Evaluate an embedding file on one task.
    Eval(evaluate::EvalArgs),
    /// Train the BMES word segmenter.
    SegmentTrain(seg::TrainArgs),
    /// Segment raw text with a trained segmenter.
    SegmentDecode(seg::DecodeArgs),
    /// Precision, recall and F of a segmentation against gold.
    SegmentScore(seg::ScoreArgs),
    /// Train a document classifier.
    ClassifyTrain(classify::TrainArgs),
    /// Label documents with a trained classifier.
    ClassifyPredict(classify::PredictArgs),
    /// Phrases most often selected by max pooling.
    KeyPhrases(classify::KeyPhraseArgs),
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::TrainEmb(a) => emb::train_emb(a),
        Command::TrainCharword(a) => emb::train_charword(a),
        Command::Cooccur(a) => matrix::cooccur(a),
        Command::Factorize(a) => matrix::factorize(a),
        Command::EquivReport(a) => matrix::equiv_report(a),
        Command::Eval(a) => evaluate::eval(a),
        Command::SegmentTrain(a) => seg::train(a),
        Command::SegmentDecode(a) => seg::decode(a),
        Command::SegmentScore(a) => seg::score(a),
        Command::ClassifyTrain(a) => classify::train(a),
        Command::ClassifyPredict(a) => classify::predict(a),
        Command::KeyPhrases(a) => classify::key_phrases(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("WORDBENCH_LOG", "info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            eprintln!("wordbench: {e}");
            e.exit_code()
        }
    }
}
