use std::collections::HashMap;

use crate::corpus::{decompose_word, Vocabulary};

/// Prefix used when character rows are written next to word rows in one file.
pub const CHAR_PREFIX: &str = "\u{E000}";

/// Joint id space for words and their characters.
///
/// Word ids are the vocabulary ids `[0, |V|)`; character ids follow at
/// `[|V|, |V| + |C|)`. Both share the input table of the model, while only
/// words have target vectors.
#[derive(Clone, Debug)]
pub struct CharWordVocab {
    words: Vocabulary,
    chars: Vec<String>,
    char_index: HashMap<String, usize>,
    word_chars: Vec<Vec<usize>>,
}

impl CharWordVocab {
    pub fn new(words: Vocabulary) -> Self {
        let n_words = words.len();
        let mut chars = Vec::new();
        let mut char_index: HashMap<String, usize> = HashMap::new();
        let word_chars = words
            .tokens()
            .iter()
            .map(|w| {
                decompose_word(w)
                    .into_iter()
                    .map(|c| {
                        let next = n_words + chars.len();
                        *char_index.entry(c.clone()).or_insert_with(|| {
                            chars.push(c);
                            next
                        })
                    })
                    .collect()
            })
            .collect();
        CharWordVocab {
            words,
            chars,
            char_index,
            word_chars,
        }
    }

    pub fn words(&self) -> &Vocabulary {
        &self.words
    }

    pub fn chars(&self) -> &[String] {
        &self.chars
    }

    pub fn n_words(&self) -> usize {
        self.words.len()
    }

    /// Rows needed in the shared input table.
    pub fn joint_size(&self) -> usize {
        self.words.len() + self.chars.len()
    }

    /// Joint id of a character.
    pub fn char_id(&self, ch: &str) -> Option<usize> {
        self.char_index.get(ch).copied()
    }

    /// Joint ids of the characters of word `word_id`, in order.
    pub fn chars_of(&self, word_id: usize) -> &[usize] {
        &self.word_chars[word_id]
    }

    /// Words followed by prefixed characters, in joint-id order.
    pub fn joint_tokens(&self) -> Vec<String> {
        self.words
            .tokens()
            .iter()
            .cloned()
            .chain(self.chars.iter().map(|c| format!("{CHAR_PREFIX}{c}")))
            .collect()
    }
}
