use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, BufReader, Read};

use crate::corpus::raw_units;
use crate::{Error, Result};

/// Position of a character within its word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    B = 0,
    M = 1,
    E = 2,
    S = 3,
}

impl Tag {
    pub const ALL: [Tag; 4] = [Tag::B, Tag::M, Tag::E, Tag::S];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Tag {
        Tag::ALL[i]
    }

    pub fn can_start(self) -> bool {
        matches!(self, Tag::B | Tag::S)
    }

    pub fn can_end(self) -> bool {
        matches!(self, Tag::E | Tag::S)
    }

    pub fn can_precede(self, next: Tag) -> bool {
        match self {
            Tag::B | Tag::M => matches!(next, Tag::M | Tag::E),
            Tag::E | Tag::S => matches!(next, Tag::B | Tag::S),
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tag::B => "B",
            Tag::M => "M",
            Tag::E => "E",
            Tag::S => "S",
        };
        f.write_str(s)
    }
}

pub fn is_legal(tags: &[Tag]) -> bool {
    match (tags.first(), tags.last()) {
        (Some(first), Some(last)) => {
            first.can_start() && last.can_end() && tags.windows(2).all(|w| w[0].can_precede(w[1]))
        }
        _ => true,
    }
}

/// Raw character units with one tag each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaggedSentence {
    pub chars: Vec<String>,
    pub tags: Vec<Tag>,
}

pub fn tags_from_segmentation<S: AsRef<str>>(words: &[S]) -> Result<TaggedSentence> {
    if words.is_empty() {
        return Err(Error::invalid("empty sentence"));
    }
    let mut chars = Vec::new();
    let mut tags = Vec::new();
    for w in words {
        let units = raw_units(w.as_ref());
        match units.len() {
            0 => return Err(Error::invalid("empty word")),
            1 => tags.push(Tag::S),
            n => {
                tags.push(Tag::B);
                tags.extend(std::iter::repeat(Tag::M).take(n - 2));
                tags.push(Tag::E);
            }
        }
        chars.extend(units);
    }
    Ok(TaggedSentence { chars, tags })
}

pub fn segmentation_from_tags(sentence: &TaggedSentence) -> Result<Vec<String>> {
    if sentence.chars.len() != sentence.tags.len() {
        return Err(Error::DimensionMismatch {
            expected: sentence.chars.len(),
            actual: sentence.tags.len(),
        });
    }
    if !is_legal(&sentence.tags) {
        return Err(Error::invalid("illegal tag sequence"));
    }
    let mut words = Vec::new();
    let mut current = String::new();
    for (c, t) in sentence.chars.iter().zip(&sentence.tags) {
        current.push_str(c);
        if t.can_end() {
            words.push(std::mem::take(&mut current));
        }
    }
    Ok(words)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn spans<S: AsRef<str>>(words: &[S]) -> Vec<(usize, usize)> {
    let mut start = 0;
    words
        .iter()
        .map(|w| {
            let end = start + w.as_ref().chars().count();
            let span = (start, end);
            start = end;
            span
        })
        .collect()
}

/// Span-matching precision, recall and F1 of a predicted segmentation.
pub fn prf_score<S: AsRef<str>, T: AsRef<str>>(pred: &[S], gold: &[T]) -> Result<Prf> {
    let p_text: String = pred.iter().map(AsRef::as_ref).collect();
    let g_text: String = gold.iter().map(AsRef::as_ref).collect();
    if p_text != g_text {
        return Err(Error::invalid("predicted and gold segmentations cover different text"));
    }
    Ok(prf_from_counts(
        &spans(pred).into_iter().collect(),
        &spans(gold).into_iter().collect(),
    ))
}

fn prf_from_counts(pred: &HashSet<(usize, usize)>, gold: &HashSet<(usize, usize)>) -> Prf {
    prf_from_totals(pred.intersection(gold).count(), pred.len(), gold.len())
}

fn prf_from_totals(hit: usize, n_pred: usize, n_gold: usize) -> Prf {
    let hit = hit as f64;
    let precision = if n_pred == 0 { 0.0 } else { hit / n_pred as f64 };
    let recall = if n_gold == 0 { 0.0 } else { hit / n_gold as f64 };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Prf { precision, recall, f1 }
}

/// Corpus-level scores with span counts pooled over sentences.
pub fn score_corpus<S: AsRef<str>, T: AsRef<str>>(pred: &[Vec<S>], gold: &[Vec<T>]) -> Result<Prf> {
    if pred.len() != gold.len() {
        return Err(Error::DimensionMismatch {
            expected: gold.len(),
            actual: pred.len(),
        });
    }
    let (mut hit, mut n_pred, mut n_gold) = (0, 0, 0);
    for (p, g) in pred.iter().zip(gold) {
        let pt: String = p.iter().map(AsRef::as_ref).collect();
        let gt: String = g.iter().map(AsRef::as_ref).collect();
        if pt != gt {
            return Err(Error::invalid(format!("sentence text differs: {pt:?} vs {gt:?}")));
        }
        let ps: HashSet<_> = spans(p).into_iter().collect();
        let gs: HashSet<_> = spans(g).into_iter().collect();
        hit += ps.intersection(&gs).count();
        n_pred += ps.len();
        n_gold += gs.len();
    }
    Ok(prf_from_totals(hit, n_pred, n_gold))
}

/// One sentence per nonempty line, words separated by `/` or whitespace.
pub fn read_segmented<R: Read>(r: R) -> Result<Vec<Vec<String>>> {
    let mut out = Vec::new();
    for line in BufReader::new(r).lines() {
        let words: Vec<String> = line?
            .split(|c: char| c == '/' || c.is_whitespace())
            .filter(|w| !w.is_empty())
            .map(String::from)
            .collect();
        if !words.is_empty() {
            out.push(words);
        }
    }
    Ok(out)
}

pub fn format_segmentation<S: AsRef<str>>(words: &[S], sep: &str) -> String {
    words.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(sep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tagging_examples() {
        let s = tags_from_segmentation(&["中国", "人"]).unwrap();
        assert_eq!(s.chars, vec!["中", "国", "人"]);
        assert_eq!(s.tags, vec![Tag::B, Tag::E, Tag::S]);
        assert_eq!(tags_from_segmentation(&["的"]).unwrap().tags, vec![Tag::S]);
        assert_eq!(tags_from_segmentation(&["计算机网"]).unwrap().tags, vec![Tag::B, Tag::M, Tag::M, Tag::E]);
        assert_eq!(tags_from_segmentation(&["CERNET", "200多"]).unwrap().tags, vec![Tag::S, Tag::B, Tag::E]);
        assert!(tags_from_segmentation(&["a", ""]).is_err());
        let empty: [&str; 0] = [];
        assert!(tags_from_segmentation(&empty).is_err());
    }

    #[test]
    fn legality() {
        use Tag::*;
        assert!(is_legal(&[S]));
        assert!(!is_legal(&[B]));
        assert!(!is_legal(&[M, E]));
        assert!(is_legal(&[B, M, M, E, S, B, E]));
        assert!(!is_legal(&[B, S]));
        assert!(!is_legal(&[S, E]));
        let bad = TaggedSentence { chars: vec!["a".into(), "b".into()], tags: vec![B, B] };
        assert!(segmentation_from_tags(&bad).is_err());
    }

    #[test]
    fn scoring() {
        let gold = ["中国", "人民", "银行"];
        let p = prf_score(&gold, &gold).unwrap();
        assert_eq!((p.precision, p.recall, p.f1), (1.0, 1.0, 1.0));
        let split = ["北", "京", "大", "学"];
        let p = prf_score(&split, &["北京大学"]).unwrap();
        assert_eq!((p.precision, p.recall, p.f1), (0.0, 0.0, 0.0));
        let p = prf_score(&["中国", "人", "民银行"], &gold).unwrap();
        assert!((p.precision - 1.0 / 3.0).abs() < 1e-12 && (p.recall - 1.0 / 3.0).abs() < 1e-12);
        assert!(prf_score(&["中国"], &["中华"]).is_err());
        let pooled = score_corpus(&[vec!["中国", "人"], vec!["北京"]], &[vec!["中国", "人"], vec!["北", "京"]]).unwrap();
        assert!((pooled.precision - 2.0 / 3.0).abs() < 1e-12);
        assert!((pooled.recall - 2.0 / 4.0).abs() < 1e-12);
    }

    #[test]
    fn reader_accepts_both_separators() {
        let text = "中国/教育/与/科研\n\n已 连接  了/200/多\n";
        let s = read_segmented(text.as_bytes()).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[1], vec!["已", "连接", "了", "200", "多"]);
        assert_eq!(format_segmentation(&s[0], "/"), "中国/教育/与/科研");
    }

    fn segmentation() -> impl Strategy<Value = Vec<String>> {
        prop::collection::vec("[中国人民大学北京]{1,4}", 1..8)
    }

    proptest! {
        #[test]
        fn round_trip(words in segmentation()) {
            let t = tags_from_segmentation(&words).unwrap();
            prop_assert!(is_legal(&t.tags));
            prop_assert_eq!(segmentation_from_tags(&t).unwrap(), words);
        }

        #[test]
        fn prf_matches_span_sets(a in segmentation(), cuts in prop::collection::vec(any::<bool>(), 40)) {
            // re-cut the same text at random boundaries
            let text: Vec<char> = a.concat().chars().collect();
            let mut b = Vec::new();
            let mut cur = String::new();
            for (k, c) in text.iter().enumerate() {
                cur.push(*c);
                if k + 1 == text.len() || cuts[k % cuts.len()] {
                    b.push(std::mem::take(&mut cur));
                }
            }
            let sa: HashSet<_> = spans(&a).into_iter().collect();
            let sb: HashSet<_> = spans(&b).into_iter().collect();
            let hit = sa.intersection(&sb).count() as f64;
            let p = prf_score(&b, &a).unwrap();
            prop_assert!((p.precision - hit / sb.len() as f64).abs() < 1e-12);
            prop_assert!((p.recall - hit / sa.len() as f64).abs() < 1e-12);
        }
    }
}
