//! Character-tagging word segmentation.

mod net;
mod tags;
mod train;
mod viterbi;

pub use net::{SegGradients, SegmenterNet, PADDING, UNK};
pub use tags::{
    format_segmentation, is_legal, prf_score, read_segmented, score_corpus, segmentation_from_tags, tags_from_segmentation, Prf, Tag,
    TaggedSentence,
};
pub use train::{segment_text, tag_accuracy, train_segmenter, SegmenterConfig};
pub use viterbi::{path_score, viterbi_decode};
