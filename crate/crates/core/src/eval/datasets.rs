use std::io::{BufRead, BufReader, Read};

use super::{AnalogyQuestion, ChoiceQuestion, SimilarityItem};
use crate::{Error, Result};

/// A labeled document: label string and whitespace tokens.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledText {
    pub label: String,
    pub tokens: Vec<String>,
}

fn content_lines<R: Read>(r: R) -> impl Iterator<Item = Result<(usize, String)>> {
    BufReader::new(r).lines().enumerate().filter_map(|(i, l)| match l {
        Ok(l) if l.trim().is_empty() || l.starts_with('#') => None,
        Ok(l) => Some(Ok((i + 1, l))),
        Err(e) => Some(Err(e.into())),
    })
}

fn fields(line: &str) -> Vec<&str> {
    if line.contains('\t') {
        line.split('\t').map(str::trim).collect()
    } else {
        line.split_whitespace().collect()
    }
}

/// `word_a<TAB>word_b<TAB>score` lines; `#` lines are comments.
pub fn read_similarity<R: Read>(r: R) -> Result<Vec<SimilarityItem>> {
    content_lines(r)
        .map(|l| {
            let (n, line) = l?;
            let f = fields(&line);
            if f.len() < 3 {
                return Err(Error::parse(n, "expected word_a, word_b and a score"));
            }
            let score: f64 = f[2].parse().map_err(|_| Error::parse(n, format!("bad score {:?}", f[2])))?;
            if !score.is_finite() {
                return Err(Error::parse(n, "score is not finite"));
            }
            Ok(SimilarityItem {
                a: f[0].to_string(),
                b: f[1].to_string(),
                score,
            })
        })
        .collect()
}

/// `a b c expected` lines grouped under `: category` headers.
pub fn read_analogy<R: Read>(r: R) -> Result<Vec<AnalogyQuestion>> {
    let mut category = String::new();
    let mut out = Vec::new();
    for l in content_lines(r) {
        let (n, line) = l?;
        if let Some(c) = line.strip_prefix(':') {
            category = c.trim().to_string();
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 4 {
            return Err(Error::parse(n, "expected four words"));
        }
        out.push(AnalogyQuestion {
            category: category.clone(),
            a: f[0].into(),
            b: f[1].into(),
            c: f[2].into(),
            expected: f[3].into(),
        });
    }
    Ok(out)
}

/// `query<TAB>opt1<TAB>opt2<TAB>opt3<TAB>opt4<TAB>answer_index` lines.
pub fn read_choice<R: Read>(r: R) -> Result<Vec<ChoiceQuestion>> {
    content_lines(r)
        .map(|l| {
            let (n, line) = l?;
            let f = fields(&line);
            if f.len() != 6 {
                return Err(Error::parse(n, "expected a query, four options and an answer index"));
            }
            let answer: usize = f[5].parse().map_err(|_| Error::parse(n, "bad answer index"))?;
            if answer >= 4 {
                return Err(Error::parse(n, "answer index must be below 4"));
            }
            Ok(ChoiceQuestion {
                query: f[0].into(),
                options: std::array::from_fn(|i| f[i + 1].to_string()),
                answer,
            })
        })
        .collect()
}

/// `label<TAB>space separated tokens` lines.
pub fn read_labeled_documents<R: Read>(r: R) -> Result<Vec<LabeledText>> {
    content_lines(r)
        .map(|l| {
            let (n, line) = l?;
            let (label, text) = line.split_once('\t').ok_or_else(|| Error::parse(n, "expected label<TAB>text"))?;
            let tokens: Vec<String> = text.split_whitespace().map(String::from).collect();
            if tokens.is_empty() {
                return Err(Error::parse(n, "empty document"));
            }
            Ok(LabeledText {
                label: label.trim().to_string(),
                tokens,
            })
        })
        .collect()
}
