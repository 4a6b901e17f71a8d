use std::collections::HashMap;

use super::{DocModel, Document};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyPhrase {
    pub phrase: String,
    pub count: usize,
}

fn count_phrases<M, S>(model: &M, tokens: &[S], phrase_len: usize, counts: &mut HashMap<String, usize>) -> Result<()>
where
    M: DocModel,
    S: AsRef<str>,
{
    let half = phrase_len / 2;
    for p in model.pooled_positions(&model.vocab().encode(tokens))? {
        let lo = p.saturating_sub(half);
        let hi = (p + half + 1).min(tokens.len());
        let phrase = tokens[lo..hi].iter().map(AsRef::as_ref).collect::<Vec<_>>().join(" ");
        *counts.entry(phrase).or_default() += 1;
    }
    Ok(())
}

fn ranked(counts: HashMap<String, usize>) -> Vec<KeyPhrase> {
    let mut out: Vec<KeyPhrase> = counts
        .into_iter()
        .map(|(phrase, count)| KeyPhrase { phrase, count })
        .collect();
    out.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.phrase.cmp(&b.phrase)));
    out
}

fn check_len(phrase_len: usize) -> Result<()> {
    if phrase_len % 2 == 0 {
        return Err(Error::invalid(format!("phrase length must be odd, got {phrase_len}")));
    }
    Ok(())
}

/// Phrases centred on the positions chosen by max pooling, counted once
/// per pooled dimension and document, most frequent first.
pub fn extract_key_phrases<M, D, S>(model: &M, docs: &[D], phrase_len: usize) -> Result<Vec<KeyPhrase>>
where
    M: DocModel,
    D: AsRef<[S]>,
    S: AsRef<str>,
{
    check_len(phrase_len)?;
    let mut counts = HashMap::new();
    for d in docs {
        count_phrases(model, d.as_ref(), phrase_len, &mut counts)?;
    }
    Ok(ranked(counts))
}

/// [`extract_key_phrases`] grouped by the documents' labelled class.
pub fn extract_key_phrases_by_class<M: DocModel>(
    model: &M,
    docs: &[Document],
    phrase_len: usize,
) -> Result<Vec<Vec<KeyPhrase>>> {
    check_len(phrase_len)?;
    let mut counts = vec![HashMap::new(); model.n_classes()];
    for d in docs {
        let c = counts.get_mut(d.class).ok_or(Error::UnknownId(d.class))?;
        count_phrases(model, &d.tokens, phrase_len, c)?;
    }
    Ok(counts.into_iter().map(ranked).collect())
}
