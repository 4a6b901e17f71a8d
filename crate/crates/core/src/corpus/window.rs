use rand::Rng as _;

use super::{CorpusStream, Vocabulary};
use crate::rng::Rng;

/// A target word with its surrounding context inside one document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowSample {
    pub target: usize,
    /// `(offset, id)` pairs ordered left to right; offsets are non-zero and
    /// lie in `[-(win-1)/2, (win-1)/2]`.
    pub context: Vec<(i32, usize)>,
}

impl WindowSample {
    pub fn context_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.context.iter().map(|&(_, id)| id)
    }
}

/// Position of a context offset inside the `win - 1` concatenation slots.
pub fn context_slot(offset: i32, win: usize) -> usize {
    let half = (win / 2) as i32;
    debug_assert!(offset != 0 && offset.abs() <= half);
    if offset < 0 {
        (offset + half) as usize
    } else {
        (offset + half - 1) as usize
    }
}

/// Drops each token independently with probability `1 - keep_prob`.
pub fn subsample_document(doc: &[usize], vocab: &Vocabulary, rng: &mut Rng) -> Vec<usize> {
    doc.iter()
        .copied()
        .filter(|&id| {
            let keep = vocab.keep_prob(id);
            keep >= 1.0 || rng.gen::<f64>() < keep
        })
        .collect()
}

/// One sample per token of `doc`, with windows truncated at the document edges.
pub fn windows_for_document(doc: &[usize], win: usize) -> impl Iterator<Item = WindowSample> + '_ {
    let half = win / 2;
    (0..doc.len()).map(move |i| {
        let lo = i.saturating_sub(half);
        let hi = (i + half).min(doc.len() - 1);
        let context = (lo..=hi)
            .filter(|&j| j != i)
            .map(|j| (j as i32 - i as i32, doc[j]))
            .collect();
        WindowSample {
            target: doc[i],
            context,
        }
    })
}

/// Streams window samples over a corpus.
///
/// Out-of-vocabulary tokens are removed first, then (optionally) frequent
/// tokens are subsampled, then windows are formed. Windows never cross
/// document boundaries.
pub fn iter_windows<'a>(
    corpus: &'a CorpusStream,
    vocab: &'a Vocabulary,
    win: usize,
    subsample: bool,
    rng: &'a mut Rng,
) -> impl Iterator<Item = WindowSample> + 'a {
    assert!(win % 2 == 1, "window size must be odd");
    corpus.documents.iter().flat_map(move |doc| {
        let ids: Vec<usize> = doc.iter().filter_map(|t| vocab.id(t)).collect();
        let ids = if subsample {
            subsample_document(&ids, vocab, rng)
        } else {
            ids
        };
        windows_for_document(&ids, win).collect::<Vec<_>>()
    })
}
