//! Span-based SRL scoring and attachment scoring.
//!
//! An argument counts as correct iff predicate index, label string and both
//! span boundaries match exactly; scores are micro-averaged over the
//! corpus. Predicate (V) positions themselves are never scored and
//! duplicate predictions count once.

use std::collections::{BTreeMap, BTreeSet};

use crate::convert::{argument_head, classify_pattern};
use crate::core::{AnnotatedSentence, DepTree, PatternClass, Span, SrlFrame};
use crate::error::EvalError;

/// Micro precision/recall/F1 in percent, with the raw counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrfScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub matched: usize,
    pub predicted: usize,
    pub gold: usize,
}

impl PrfScore {
    pub fn from_counts(matched: usize, predicted: usize, gold: usize) -> Self {
        let ratio = |num: usize, den: usize| {
            if den == 0 {
                0.0
            } else {
                100.0 * num as f64 / den as f64
            }
        };
        let precision = ratio(matched, predicted);
        let recall = ratio(matched, gold);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        PrfScore {
            precision,
            recall,
            f1,
            matched,
            predicted,
            gold,
        }
    }
}

impl std::fmt::Display for PrfScore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "P {:.1} / R {:.1} / F {:.1} ({}/{}/{})",
            self.precision, self.recall, self.f1, self.matched, self.predicted, self.gold
        )
    }
}

type Relation<'a> = (usize, usize, &'a str, Span);

fn relation_set(frames: &[Vec<SrlFrame>]) -> BTreeSet<Relation<'_>> {
    frames
        .iter()
        .enumerate()
        .flat_map(|(sent, fs)| {
            fs.iter().flat_map(move |f| {
                f.arguments()
                    .iter()
                    .map(move |a| (sent, f.predicate, a.label.as_str(), a.span))
            })
        })
        .collect()
}

/// Micro P/R/F over exact (predicate, label, span) matches. The two slices
/// are sentence-aligned frame lists.
pub fn srl_prf(gold: &[Vec<SrlFrame>], predicted: &[Vec<SrlFrame>]) -> PrfScore {
    assert_eq!(
        gold.len(),
        predicted.len(),
        "gold and predicted corpora must align"
    );
    let g = relation_set(gold);
    let p = relation_set(predicted);
    let matched = g.intersection(&p).count();
    PrfScore::from_counts(matched, p.len(), g.len())
}

/// The same exact-match scores, partitioned by argument label.
pub fn per_label_report(
    gold: &[Vec<SrlFrame>],
    predicted: &[Vec<SrlFrame>],
) -> BTreeMap<String, PrfScore> {
    assert_eq!(gold.len(), predicted.len());
    let g = relation_set(gold);
    let p = relation_set(predicted);
    let mut counts: BTreeMap<&str, (usize, usize, usize)> = BTreeMap::new();
    for rel in &g {
        let e = counts.entry(rel.2).or_default();
        e.2 += 1;
        if p.contains(rel) {
            e.0 += 1;
        }
    }
    for rel in &p {
        counts.entry(rel.2).or_default().1 += 1;
    }
    counts
        .into_iter()
        .map(|(label, (m, pr, go))| (label.to_string(), PrfScore::from_counts(m, pr, go)))
        .collect()
}

/// Bucket of a relation for the per-pattern breakdown. Only the three
/// patterns the joint labels can carry are reported; relations outside
/// them fold into (C), the only mechanism that can reach them (through
/// chained propagation).
fn pattern_bucket(tree: &DepTree, predicate: usize, span: Span) -> PatternClass {
    let head = match argument_head(tree, span) {
        Ok(ah) if ah.head != predicate => ah.head,
        _ => return PatternClass::Common,
    };
    match classify_pattern(tree, predicate, head) {
        PatternClass::Other => PatternClass::Common,
        p => p,
    }
}

/// Exact-match scores partitioned by structural pattern: gold relations by
/// their configuration in the gold tree, predicted relations by the
/// configuration they were decoded from in the predicted tree. Matches are
/// counted under the gold-side bucket.
pub fn per_pattern_report(
    gold: &[AnnotatedSentence],
    predicted: &[AnnotatedSentence],
) -> BTreeMap<PatternClass, PrfScore> {
    assert_eq!(gold.len(), predicted.len());
    let gold_frames: Vec<Vec<SrlFrame>> = gold.iter().map(|s| s.frames.clone()).collect();
    let pred_frames: Vec<Vec<SrlFrame>> = predicted.iter().map(|s| s.frames.clone()).collect();
    let g = relation_set(&gold_frames);
    let p = relation_set(&pred_frames);

    let mut counts: BTreeMap<PatternClass, (usize, usize, usize)> = BTreeMap::new();
    for bucket in [
        PatternClass::Direct,
        PatternClass::Common,
        PatternClass::Reverse,
    ] {
        counts.insert(bucket, (0, 0, 0));
    }
    for rel in &g {
        let bucket = pattern_bucket(&gold[rel.0].tree, rel.1, rel.3);
        let e = counts.entry(bucket).or_default();
        e.2 += 1;
        if p.contains(rel) {
            e.0 += 1;
        }
    }
    for rel in &p {
        let bucket = pattern_bucket(&predicted[rel.0].tree, rel.1, rel.3);
        counts.entry(bucket).or_default().1 += 1;
    }
    counts
        .into_iter()
        .map(|(b, (m, pr, go))| (b, PrfScore::from_counts(m, pr, go)))
        .collect()
}

/// Attachment counts, summable across sentences.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AttachmentCounts {
    pub correct_heads: usize,
    pub correct_labeled: usize,
    pub total: usize,
}

impl AttachmentCounts {
    pub fn add(&mut self, other: AttachmentCounts) {
        self.correct_heads += other.correct_heads;
        self.correct_labeled += other.correct_labeled;
        self.total += other.total;
    }

    pub fn uas(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * self.correct_heads as f64 / self.total as f64
        }
    }

    pub fn las(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * self.correct_labeled as f64 / self.total as f64
        }
    }
}

pub fn attachment_counts(gold: &DepTree, predicted: &DepTree) -> Result<AttachmentCounts, EvalError> {
    if gold.len() != predicted.len() {
        return Err(EvalError::LengthMismatch {
            gold: gold.len(),
            predicted: predicted.len(),
        });
    }
    let mut counts = AttachmentCounts {
        total: gold.len(),
        ..Default::default()
    };
    for i in 1..=gold.len() {
        if gold.head(i) == predicted.head(i) {
            counts.correct_heads += 1;
            if gold.rel(i) == predicted.rel(i) {
                counts.correct_labeled += 1;
            }
        }
    }
    Ok(counts)
}

/// (UAS, LAS) in percent for one sentence pair.
pub fn attachment_scores(gold: &DepTree, predicted: &DepTree) -> Result<(f64, f64), EvalError> {
    let c = attachment_counts(gold, predicted)?;
    Ok((c.uas(), c.las()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::Argument;

    fn frame(pred: usize, args: &[(&str, usize, usize)]) -> SrlFrame {
        SrlFrame::new(
            pred,
            args.iter()
                .map(|(l, s, e)| Argument::new(*l, *s, *e))
                .collect(),
        )
    }

    #[test]
    fn perfect_prediction_scores_hundred() {
        let gold = vec![vec![frame(2, &[("ARG0", 1, 1), ("ARG1", 3, 4)])]];
        let score = srl_prf(&gold, &gold);
        assert_eq!(
            (score.precision, score.recall, score.f1),
            (100.0, 100.0, 100.0)
        );
    }

    #[test]
    fn half_recall_yields_two_thirds_f1() {
        let gold = vec![vec![frame(2, &[("ARG0", 1, 1), ("ARG1", 3, 4)])]];
        let pred = vec![vec![frame(2, &[("ARG0", 1, 1)])]];
        let score = srl_prf(&gold, &pred);
        assert_eq!(score.precision, 100.0);
        assert_eq!(score.recall, 50.0);
        assert!((score.f1 - 200.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn swapping_sides_swaps_precision_and_recall() {
        let a = vec![vec![frame(2, &[("ARG0", 1, 1), ("ARG1", 3, 4)])]];
        let b = vec![vec![frame(2, &[("ARG0", 1, 1), ("ARG2", 5, 5)])]];
        let ab = srl_prf(&a, &b);
        let ba = srl_prf(&b, &a);
        assert_eq!(ab.precision, ba.recall);
        assert_eq!(ab.recall, ba.precision);
    }

    #[test]
    fn per_label_isolates_the_wrong_span() {
        let gold = vec![vec![frame(2, &[("ARG0", 1, 1), ("ARG2", 3, 4)])]];
        let pred = vec![vec![frame(2, &[("ARG0", 1, 1), ("ARG2", 3, 5)])]];
        let report = per_label_report(&gold, &pred);
        assert_eq!(report["ARG0"].f1, 100.0);
        assert_eq!(report["ARG2"].f1, 0.0);
        let micro = srl_prf(&gold, &pred);
        let label_matched: usize = report.values().map(|s| s.matched).sum();
        assert_eq!(label_matched, micro.matched);
    }

    #[test]
    fn duplicate_predictions_count_once() {
        let gold = vec![vec![frame(2, &[("ARG0", 1, 1)])]];
        // Same relation from two frames of the same predicate.
        let pred = vec![vec![frame(2, &[("ARG0", 1, 1)]), frame(2, &[("ARG0", 1, 1)])]];
        let score = srl_prf(&gold, &pred);
        assert_eq!(score.predicted, 1);
        assert_eq!(score.f1, 100.0);
    }

    #[test]
    fn attachment_metrics() {
        let gold = DepTree::new(
            vec![0, 1, 2, 3],
            vec!["root".into(), "a".into(), "b".into(), "c".into()],
        )
        .unwrap();
        assert_eq!(attachment_scores(&gold, &gold).unwrap(), (100.0, 100.0));
        let relabeled = DepTree::new(
            vec![0, 1, 2, 3],
            vec!["x".into(), "y".into(), "z".into(), "w".into()],
        )
        .unwrap();
        assert_eq!(attachment_scores(&gold, &relabeled).unwrap(), (100.0, 0.0));
        let one_wrong = DepTree::new(
            vec![0, 1, 2, 2],
            vec!["root".into(), "a".into(), "b".into(), "c".into()],
        )
        .unwrap();
        assert_eq!(attachment_scores(&gold, &one_wrong).unwrap().0, 75.0);
        let short = DepTree::new(vec![0], vec!["root".into()]).unwrap();
        assert!(attachment_scores(&gold, &short).is_err());
    }
}
