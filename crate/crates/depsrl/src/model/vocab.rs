//! Word and label vocabularies built from a training corpus.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::convert::encode_joint;
use crate::core::{AnnotatedSentence, CShare, JointLabel};

pub const ROOT_WORD: &str = "<root>";
pub const UNK_WORD: &str = "<unk>";
/// Rendering of an unspecified label slot in the label vocabularies.
pub const ABSENT: &str = "_";

/// A closed label inventory; id 0 is the `_` (absent) class where one
/// exists.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct LabelVocab {
    items: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl LabelVocab {
    fn from_items(items: Vec<String>) -> Self {
        let index = items
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        LabelVocab { items, index }
    }

    pub fn rebuild_index(&mut self) {
        self.index = self
            .items
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn id(&self, item: &str) -> Option<usize> {
        self.index.get(item).copied()
    }

    pub fn item(&self, id: usize) -> &str {
        &self.items[id]
    }
}

/// Token and label inventories shared by the encoder and the scorers.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    #[serde(skip)]
    word_index: HashMap<String, usize>,
    pub syn: LabelVocab,
    pub d: LabelVocab,
    pub c: LabelVocab,
    pub r: LabelVocab,
}

impl Vocabulary {
    /// Builds from gold sentences. Words under `unk_threshold` occurrences
    /// map to the UNK id; the SRL label inventories come from the joint
    /// encoding of the training data.
    pub fn build(corpus: &[AnnotatedSentence], unk_threshold: usize) -> Self {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for s in corpus {
            for t in &s.tokens {
                *counts.entry(t.form.as_str()).or_insert(0) += 1;
            }
        }
        let mut words = vec![ROOT_WORD.to_string(), UNK_WORD.to_string()];
        words.extend(
            counts
                .iter()
                .filter(|(_, &c)| c >= unk_threshold.max(1))
                .map(|(w, _)| w.to_string()),
        );

        let mut syn: BTreeMap<String, ()> = BTreeMap::new();
        let mut d: BTreeMap<String, ()> = BTreeMap::new();
        let mut c: BTreeMap<String, ()> = BTreeMap::new();
        let mut r: BTreeMap<String, ()> = BTreeMap::new();
        for s in corpus {
            let (joint, _) = encode_joint(&s.tree, &s.frames);
            for label in joint.labels() {
                syn.insert(label.syn.clone(), ());
                if let Some(v) = &label.d {
                    d.insert(v.clone(), ());
                }
                if let Some(share) = &label.c {
                    c.insert(render_cshare(share), ());
                }
                if let Some(v) = &label.r {
                    r.insert(v.clone(), ());
                }
            }
        }
        let with_absent = |m: BTreeMap<String, ()>| {
            let mut items = vec![ABSENT.to_string()];
            items.extend(m.into_keys());
            LabelVocab::from_items(items)
        };
        Vocabulary {
            word_index: words
                .iter()
                .enumerate()
                .map(|(i, w)| (w.clone(), i))
                .collect(),
            words,
            syn: LabelVocab::from_items(syn.into_keys().collect()),
            d: with_absent(d),
            c: with_absent(c),
            r: with_absent(r),
        }
    }

    pub fn rebuild_indices(&mut self) {
        self.word_index = self
            .words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        self.syn.rebuild_index();
        self.d.rebuild_index();
        self.c.rebuild_index();
        self.r.rebuild_index();
    }

    pub fn n_words(&self) -> usize {
        self.words.len()
    }

    pub fn word_id(&self, form: &str) -> usize {
        self.word_index.get(form).copied().unwrap_or(1)
    }

    pub fn root_id(&self) -> usize {
        0
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }
}

/// Canonical string for a (C) share, used as its vocabulary key.
pub fn render_cshare(share: &CShare) -> String {
    let mut label = JointLabel::syntactic("x");
    label.c = Some(share.clone());
    let s = crate::core::serialize_label(&label).unwrap_or_else(|_| "x|_|_|_".into());
    s.split('|').nth(2).unwrap().to_string()
}

/// Parses a vocabulary key back into a (C) share; `_` and junk give None.
pub fn parse_cshare(key: &str) -> Option<CShare> {
    if key == ABSENT {
        return None;
    }
    let full = format!("x|_|{key}|_");
    crate::core::parse_label(&full).ok().and_then(|l| l.c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{Argument, DepTree, SrlFrame, Token};

    fn tiny_corpus() -> Vec<AnnotatedSentence> {
        let tree = DepTree::new(
            vec![2, 0, 4, 2, 6, 4],
            vec![
                "nsubj".into(),
                "root".into(),
                "mark".into(),
                "xcomp".into(),
                "det".into(),
                "dobj".into(),
            ],
        )
        .unwrap();
        let tokens = ["She", "wanted", "to", "design", "the", "bridge"]
            .iter()
            .enumerate()
            .map(|(i, f)| Token::new(i + 1, *f))
            .collect();
        let frames = vec![
            SrlFrame::new(
                2,
                vec![Argument::new("ARG0", 1, 1), Argument::new("ARG1", 3, 6)],
            ),
            SrlFrame::new(
                4,
                vec![Argument::new("ARG0", 1, 1), Argument::new("ARG1", 5, 6)],
            ),
        ];
        vec![AnnotatedSentence::new(tokens, tree, frames)]
    }

    #[test]
    fn vocab_covers_training_labels() {
        let vocab = Vocabulary::build(&tiny_corpus(), 1);
        assert_eq!(vocab.word_id("bridge"), vocab.word_id("bridge"));
        assert_ne!(vocab.word_id("bridge"), 1);
        assert_eq!(vocab.word_id("unseen-token"), 1);
        assert!(vocab.syn.id("xcomp").is_some());
        assert!(vocab.d.id("ARG1").is_some());
        assert!(vocab.c.id("(ARG0,ARG0)").is_some());
        assert_eq!(vocab.d.id(ABSENT), Some(0));
        assert_eq!(vocab.c.id(ABSENT), Some(0));
    }

    #[test]
    fn cshare_keys_round_trip() {
        let share = CShare::new("ARG0", "ARG1").propagating();
        let key = render_cshare(&share);
        assert_eq!(key, "(ARG0,ARG1)+m");
        assert_eq!(parse_cshare(&key), Some(share));
        assert_eq!(parse_cshare(ABSENT), None);
    }

    #[test]
    fn unk_threshold_prunes_rare_words() {
        let vocab = Vocabulary::build(&tiny_corpus(), 2);
        assert_eq!(vocab.word_id("bridge"), 1);
    }
}
