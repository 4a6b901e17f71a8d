//! Corpus ingestion: documents, vocabularies, normalization and windows.

mod normalize;
mod vocab;
mod window;

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use rand::seq::SliceRandom;

pub use normalize::{
    decompose_word, normalize_token, normalize_unit, normalized_units, raw_units, NormalizeMode, PSEUDO_TOKENS,
};
pub use vocab::{subsample_keep_probability, SubsampleVariant, Vocabulary};
pub use window::{context_slot, iter_windows, subsample_document, windows_for_document, WindowSample};

use crate::rng::Rng;
use crate::Result;

/// How documents are delimited in a plain-text corpus file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DocumentDelimiter {
    /// One document per non-empty line.
    #[default]
    Line,
    /// Documents separated by one or more blank lines.
    BlankLine,
}

/// A sequence of tokenized documents.
///
/// Token order inside a document is never changed; only the order of the
/// documents themselves may be shuffled.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CorpusStream {
    pub documents: Vec<Vec<String>>,
    pub shuffle_seed: Option<u64>,
}

impl CorpusStream {
    pub fn new(documents: Vec<Vec<String>>) -> Self {
        CorpusStream {
            documents,
            shuffle_seed: None,
        }
    }

    /// Splits each text on whitespace.
    pub fn from_texts<S: AsRef<str>>(texts: &[S]) -> Self {
        CorpusStream::new(
            texts
                .iter()
                .map(|t| t.as_ref().split_whitespace().map(str::to_owned).collect())
                .collect(),
        )
    }

    pub fn read<R: Read>(reader: R, delimiter: DocumentDelimiter, mode: NormalizeMode) -> Result<Self> {
        let mut documents = Vec::new();
        let mut current: Vec<String> = Vec::new();
        for line in BufReader::new(reader).lines() {
            let line = line?;
            let tokens = line.split_whitespace().map(|t| normalize_token(t, mode));
            match delimiter {
                DocumentDelimiter::Line => {
                    let doc: Vec<String> = tokens.collect();
                    if !doc.is_empty() {
                        documents.push(doc);
                    }
                }
                DocumentDelimiter::BlankLine => {
                    if line.trim().is_empty() {
                        if !current.is_empty() {
                            documents.push(std::mem::take(&mut current));
                        }
                    } else {
                        current.extend(tokens);
                    }
                }
            }
        }
        if !current.is_empty() {
            documents.push(current);
        }
        Ok(CorpusStream::new(documents))
    }

    pub fn open(path: impl AsRef<Path>, delimiter: DocumentDelimiter, mode: NormalizeMode) -> Result<Self> {
        Self::read(File::open(path)?, delimiter, mode)
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.documents.iter().flatten().map(String::as_str)
    }

    pub fn n_tokens(&self) -> usize {
        self.documents.iter().map(Vec::len).sum()
    }

    /// Maps every document to vocabulary ids, dropping out-of-vocabulary tokens.
    pub fn to_ids(&self, vocab: &Vocabulary) -> Vec<Vec<usize>> {
        self.documents
            .iter()
            .map(|doc| doc.iter().filter_map(|t| vocab.id(t)).collect())
            .collect()
    }
}

/// Permutes the document order with a seeded generator.
pub fn shuffle_documents(corpus: &CorpusStream, seed: u64) -> CorpusStream {
    let mut rng: Rng = crate::rng::SeedStreams::new(seed).stream(crate::rng::SHUFFLE);
    let mut documents = corpus.documents.clone();
    documents.shuffle(&mut rng);
    CorpusStream {
        documents,
        shuffle_seed: Some(seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn docs(c: &CorpusStream) -> Vec<String> {
        c.documents.iter().map(|d| d.join(" ")).collect()
    }

    #[test]
    fn shuffle_is_a_deterministic_permutation() {
        let corpus = CorpusStream::from_texts(&["a", "b", "c", "d e f", "g h"]);
        let s1 = shuffle_documents(&corpus, 11);
        let s2 = shuffle_documents(&corpus, 11);
        assert_eq!(s1, s2);
        let mut before = docs(&corpus);
        let mut after = docs(&s1);
        before.sort();
        after.sort();
        assert_eq!(before, after);
        assert!(s1.documents.contains(&vec!["d".to_string(), "e".into(), "f".into()]));
    }

    #[test]
    fn shuffle_preserves_token_multiset() {
        let texts: Vec<String> = (0..50).map(|i| format!("w{} x{} w{}", i % 7, i % 3, i % 5)).collect();
        let corpus = CorpusStream::from_texts(&texts);
        let shuffled = shuffle_documents(&corpus, 3);
        let mut a: Vec<&str> = corpus.tokens().collect();
        let mut b: Vec<&str> = shuffled.tokens().collect();
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b);
    }

    #[test]
    fn reads_line_and_blank_line_documents() {
        let text = "a b\nc\n\nd e\n\n\nf\n";
        let lines = CorpusStream::read(text.as_bytes(), DocumentDelimiter::Line, NormalizeMode::None).unwrap();
        assert_eq!(lines.documents.len(), 4);
        let blocks = CorpusStream::read(text.as_bytes(), DocumentDelimiter::BlankLine, NormalizeMode::None).unwrap();
        assert_eq!(docs(&blocks), vec!["a b c", "d e", "f"]);
    }
}
