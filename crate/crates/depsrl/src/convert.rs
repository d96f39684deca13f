//! Forward and backward conversion between separate annotations
//! (tree + SRL frames) and the joint-label representation.
//!
//! Forward: extract every argument's syntactic head, classify the
//! predicate/argument configuration and write the SRL label into the slot
//! the pattern dictates. Arguments shared between a predicate and its
//! governor travel through (C) tuples, falling back to a dummy relation
//! when the governor does not itself take the argument; predicates that
//! share all their ARGM adjuncts get a propagation flag instead of one
//! tuple per adjunct.
//!
//! Backward: collect (D) and (R) slots, resolve (C) tuples in a preorder
//! pass so that arguments can propagate down chains of predicates, then
//! rebuild span boundaries from the tree.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::core::{
    subtree_span, Argument, CShare, DepTree, JointLabel, JointSentence, JointTree, PatternClass,
    Span, SrlFrame, DUMMY_LABEL,
};
use crate::error::ConvertError;

/// Result of argument-head extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArgumentHead {
    pub head: usize,
    /// More than one candidate covered the span equally well.
    pub ambiguous: bool,
}

/// The token inside `span` whose governor lies outside of it.
///
/// When several tokens qualify, the one whose subtree covers most of the
/// span wins, ties going to the leftmost; `ambiguous` reports unresolved
/// ties.
pub fn argument_head(tree: &DepTree, span: Span) -> Result<ArgumentHead, ConvertError> {
    let n = tree.len();
    if span.start == 0 || span.start > span.end || span.end > n {
        return Err(ConvertError::BadSpan {
            start: span.start,
            end: span.end,
            len: n,
        });
    }
    let mut best: Option<(usize, usize)> = None; // (coverage, token)
    let mut ties = 0usize;
    for t in span.start..=span.end {
        let h = tree.head(t);
        if span.contains(h) {
            continue;
        }
        let coverage = crate::core::subtree_coverage(tree, t, span);
        match best {
            Some((c, _)) if coverage < c => {}
            Some((c, _)) if coverage == c => ties += 1,
            _ => {
                best = Some((coverage, t));
                ties = 0;
            }
        }
    }
    let (_, head) = best.expect("a valid span always has an externally-headed token");
    Ok(ArgumentHead {
        head,
        ambiguous: ties > 0,
    })
}

/// Structural configuration of a (predicate, argument-head) pair.
pub fn classify_pattern(tree: &DepTree, pred: usize, arg_head: usize) -> PatternClass {
    assert_ne!(pred, arg_head, "predicate and argument head must differ");
    if tree.head(arg_head) == pred {
        PatternClass::Direct
    } else if tree.head(pred) == arg_head {
        PatternClass::Reverse
    } else if tree.head(pred) != 0 && tree.head(pred) == tree.head(arg_head) {
        PatternClass::Common
    } else {
        PatternClass::Other
    }
}

/// The fourth structural configuration of the pattern taxonomy: the
/// argument's governor is the predicate's grandparent (one (C) hop away
/// from a plain sibling configuration).
pub fn is_two_hop(tree: &DepTree, pred: usize, arg_head: usize) -> bool {
    let y = tree.head(pred);
    y != 0 && tree.head(y) != 0 && tree.head(y) == tree.head(arg_head)
}

/// Rebuilds an argument span from its head token.
///
/// (D) takes the head's whole subtree; (R) applies the side-sensitive
/// heuristics; (C) reuses the shared argument's span unchanged. The flag is
/// raised when a (D) subtree is non-contiguous and only its covering range
/// can be returned.
pub fn reconstruct_span(
    tree: &DepTree,
    pattern: PatternClass,
    pred: usize,
    arg_head: usize,
    shared: Option<Span>,
) -> (Span, bool) {
    match pattern {
        PatternClass::Direct => {
            let s = subtree_span(tree, arg_head);
            (Span::new(s.min, s.max), !s.contiguous)
        }
        PatternClass::Common => (
            shared.expect("(C) reconstruction requires the shared span"),
            false,
        ),
        PatternClass::Reverse => {
            if arg_head < pred {
                // Relative-clause side: the argument plus its child
                // subtrees lying entirely left of the predicate.
                let mut lo = arg_head;
                let mut hi = arg_head;
                for c in tree.children(arg_head) {
                    let cs = subtree_span(tree, c);
                    if cs.max < pred {
                        lo = lo.min(cs.min);
                        hi = hi.max(cs.max);
                    }
                }
                (Span::new(lo, hi), false)
            } else {
                // Participle side: the argument plus its right-hand child
                // subtrees.
                let mut hi = arg_head;
                for c in tree.children(arg_head) {
                    let cs = subtree_span(tree, c);
                    if cs.min > arg_head {
                        hi = hi.max(cs.max);
                    }
                }
                (Span::new(arg_head, hi), false)
            }
        }
        PatternClass::Other => panic!("(Other) relations have no span reconstruction"),
    }
}

/// Why a gold relation did or did not survive the round trip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConversionOutcome {
    /// Encoded and recovered exactly by the backward conversion.
    Ok,
    /// No slot exists for this configuration.
    OtherPattern,
    /// A second shared core argument; only one rides the (C) tuple.
    MultiCoreDropped,
    /// Encoded, but the argument head was ambiguous and recovery missed.
    HeadAmbiguous,
    /// The slot this relation needed was already taken.
    SlotCollision,
    /// A dummy relation was needed but the governor already carries a
    /// different one.
    DummyConflict,
    /// Encoded, but the rule-based span reconstruction does not reproduce
    /// the gold span (or a chained resolution broke upstream).
    NotRecovered,
}

impl std::fmt::Display for ConversionOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ConversionOutcome::Ok => "ok",
            ConversionOutcome::OtherPattern => "other_pattern",
            ConversionOutcome::MultiCoreDropped => "multi_core_dropped",
            ConversionOutcome::HeadAmbiguous => "head_ambiguous",
            ConversionOutcome::SlotCollision => "slot_collision",
            ConversionOutcome::DummyConflict => "dummy_conflict",
            ConversionOutcome::NotRecovered => "not_recovered",
        };
        f.write_str(s)
    }
}

/// Per gold relation: how it was (or was not) packed into the joint tree.
#[derive(Debug, Clone)]
pub struct RelationRecord {
    pub predicate: usize,
    pub argument: Argument,
    pub arg_head: usize,
    /// Pattern of the slot that carried the relation; `Other` when none
    /// did. Chained relations surface as `Common`.
    pub pattern: PatternClass,
    /// Structural two-hop configuration (common governor one level up).
    pub two_hop: bool,
    pub head_ambiguous: bool,
    pub converted: bool,
    pub reason: ConversionOutcome,
}

/// One record per gold relation of a sentence.
#[derive(Debug, Clone, Default)]
pub struct ConversionReport {
    pub relations: Vec<RelationRecord>,
}

impl ConversionReport {
    pub fn total(&self) -> usize {
        self.relations.len()
    }

    /// Relations that survive the round trip exactly.
    pub fn recovered(&self) -> usize {
        self.count(ConversionOutcome::Ok)
    }

    pub fn converted(&self) -> usize {
        self.relations.iter().filter(|r| r.converted).count()
    }

    pub fn count(&self, reason: ConversionOutcome) -> usize {
        self.relations.iter().filter(|r| r.reason == reason).count()
    }

    pub fn by_reason(&self) -> BTreeMap<ConversionOutcome, usize> {
        let mut m = BTreeMap::new();
        for r in &self.relations {
            *m.entry(r.reason).or_insert(0) += 1;
        }
        m
    }

    pub fn merge(reports: impl IntoIterator<Item = ConversionReport>) -> ConversionReport {
        let mut merged = ConversionReport::default();
        for r in reports {
            merged.relations.extend(r.relations);
        }
        merged
    }
}

/// A gold relation staged for encoding.
struct Staged {
    predicate: usize,
    argument: Argument,
    arg_head: usize,
    head_ambiguous: bool,
    structural: PatternClass,
    two_hop: bool,
    slot: Option<PatternClass>,
    reason: ConversionOutcome,
}

fn is_argm(label: &str) -> bool {
    label.starts_with("ARGM")
}

/// Packs SRL frames into the joint labels of `tree`.
///
/// Heads are never touched; only the label slots change. The report
/// carries one record per gold relation, with `Ok` meaning the relation is
/// reproduced exactly by [`decode_joint`] (this is verified by actually
/// running the backward conversion).
pub fn encode_joint(tree: &DepTree, frames: &[SrlFrame]) -> (JointTree, ConversionReport) {
    let mut labels: Vec<JointLabel> = tree
        .rels()
        .iter()
        .map(|r| JointLabel::syntactic(r.as_str()))
        .collect();

    // Canonical view of the gold annotations: one argument list per
    // predicate, sorted and deduplicated, so that encoding is independent
    // of input frame order.
    let mut gold: BTreeMap<usize, Vec<Argument>> = BTreeMap::new();
    for f in frames {
        gold.entry(f.predicate)
            .or_default()
            .extend(f.arguments().iter().cloned());
    }
    for args in gold.values_mut() {
        args.sort_by(|a, b| (a.span, &a.label).cmp(&(b.span, &b.label)));
        args.dedup();
    }

    // First label per (predicate, span), for resolving what a governor
    // calls a shared argument.
    let mut span_label: HashMap<(usize, Span), &str> = HashMap::new();
    for (&p, args) in &gold {
        for a in args {
            span_label.entry((p, a.span)).or_insert(&a.label);
        }
    }
    let argm_sets: HashMap<usize, BTreeSet<(&str, Span)>> = gold
        .iter()
        .map(|(&p, args)| {
            let set = args
                .iter()
                .filter(|a| is_argm(&a.label))
                .map(|a| (a.label.as_str(), a.span))
                .collect();
            (p, set)
        })
        .collect();

    // Stage every relation with its head and structural classification.
    let mut staged: Vec<Staged> = Vec::new();
    for (&predicate, args) in &gold {
        for argument in args {
            let (arg_head, head_ambiguous, structural) =
                match argument_head(tree, argument.span) {
                    Ok(ah) if ah.head != predicate => (
                        ah.head,
                        ah.ambiguous,
                        classify_pattern(tree, predicate, ah.head),
                    ),
                    // Malformed gold (empty span or self-headed); nothing
                    // to encode.
                    Ok(ah) => (ah.head, ah.ambiguous, PatternClass::Other),
                    Err(_) => (0, false, PatternClass::Other),
                };
            let two_hop = arg_head != 0
                && arg_head != predicate
                && structural == PatternClass::Other
                && is_two_hop(tree, predicate, arg_head);
            staged.push(Staged {
                predicate,
                argument: argument.clone(),
                arg_head,
                head_ambiguous,
                structural,
                two_hop,
                slot: None,
                reason: ConversionOutcome::OtherPattern,
            });
        }
    }

    // (D) and (R) slots first; dummies must not displace real labels.
    for rel in &mut staged {
        match rel.structural {
            PatternClass::Direct => {
                let slot = &mut labels[rel.arg_head - 1].d;
                if slot.is_none() {
                    *slot = Some(rel.argument.label.clone());
                    rel.slot = Some(PatternClass::Direct);
                    rel.reason = ConversionOutcome::Ok;
                } else {
                    rel.reason = ConversionOutcome::SlotCollision;
                }
            }
            PatternClass::Reverse => {
                let slot = &mut labels[rel.predicate - 1].r;
                if slot.is_none() {
                    *slot = Some(rel.argument.label.clone());
                    rel.slot = Some(PatternClass::Reverse);
                    rel.reason = ConversionOutcome::Ok;
                } else {
                    rel.reason = ConversionOutcome::SlotCollision;
                }
            }
            _ => {}
        }
    }

    // (C) slots, one predicate at a time. `dummy_at` remembers the single
    // dummy relation a governor may carry.
    let mut dummy_at: HashMap<usize, usize> = HashMap::new();
    let predicates: Vec<usize> = gold.keys().copied().collect();
    for &q in &predicates {
        let parent = tree.head(q);
        if parent == 0 {
            continue;
        }
        // Candidate relations of q that could ride the (C) slot of the
        // edge into q: siblings (with dummy fallback) and any argument the
        // governor itself takes (which covers chained propagation).
        let candidate_idx: Vec<usize> = staged
            .iter()
            .enumerate()
            .filter(|(_, r)| {
                r.predicate == q
                    && r.slot.is_none()
                    && r.arg_head != 0
                    && r.arg_head != q
                    && (r.structural == PatternClass::Common
                        || span_label.contains_key(&(parent, r.argument.span)))
            })
            .map(|(i, _)| i)
            .collect();
        if candidate_idx.is_empty() {
            continue;
        }
        let propagate_argm = match (argm_sets.get(&parent), argm_sets.get(&q)) {
            (Some(pa), Some(qa)) => !pa.is_empty() && pa == qa,
            _ => false,
        };
        // Core arguments take priority over adjuncts for the tuple; within
        // a group the lexicographically smallest label wins.
        let mut order = candidate_idx.clone();
        order.sort_by_key(|&i| {
            let r = &staged[i];
            (
                is_argm(&r.argument.label),
                r.argument.label.clone(),
                r.argument.span,
            )
        });
        let mut winner: Option<usize> = None;
        for &i in &order {
            let (arg_head, span) = (staged[i].arg_head, staged[i].argument.span);
            if let Some(&label) = span_label.get(&(parent, span)) {
                labels[q - 1].c = Some(CShare {
                    parent_label: Some(label.to_string()),
                    child_label: staged[i].argument.label.clone(),
                    propagate_argm,
                });
                winner = Some(i);
                break;
            }
            // Dummy fallback: only available in the true sibling
            // configuration, where the edge governor -> argument exists.
            if staged[i].structural != PatternClass::Common {
                continue;
            }
            match dummy_at.get(&parent) {
                Some(&at) if at != arg_head => {
                    staged[i].reason = ConversionOutcome::DummyConflict;
                    continue;
                }
                Some(_) => {}
                None => {
                    let slot = &mut labels[arg_head - 1].d;
                    if slot.is_some() {
                        staged[i].reason = ConversionOutcome::DummyConflict;
                        continue;
                    }
                    *slot = Some(DUMMY_LABEL.to_string());
                    dummy_at.insert(parent, arg_head);
                }
            }
            labels[q - 1].c = Some(CShare {
                parent_label: None,
                child_label: staged[i].argument.label.clone(),
                propagate_argm,
            });
            winner = Some(i);
            break;
        }
        if let Some(w) = winner {
            staged[w].slot = Some(PatternClass::Common);
            staged[w].reason = ConversionOutcome::Ok;
        }
        for &i in &order {
            if Some(i) == winner || staged[i].reason == ConversionOutcome::DummyConflict {
                continue;
            }
            if propagate_argm && is_argm(&staged[i].argument.label) {
                // Covered by the propagation flag.
                staged[i].slot = Some(PatternClass::Common);
                staged[i].reason = ConversionOutcome::Ok;
            } else if winner.is_some() {
                staged[i].reason = if is_argm(&staged[i].argument.label) {
                    ConversionOutcome::SlotCollision
                } else {
                    ConversionOutcome::MultiCoreDropped
                };
            }
        }
    }

    let joint = JointTree::new(tree.heads().to_vec(), labels)
        .expect("encoding preserves the tree structure");

    // Verify the round trip relation by relation: `Ok` must mean exactly
    // recovered, so that report counts and span-based scores agree.
    let predicate_set: BTreeSet<usize> = predicates.iter().copied().collect();
    let decoded = decode_joint(&joint, &predicate_set);
    let decoded_set: BTreeSet<(usize, &str, Span)> = decoded
        .iter()
        .flat_map(|f| {
            f.arguments()
                .iter()
                .map(move |a| (f.predicate, a.label.as_str(), a.span))
        })
        .collect();

    let relations = staged
        .into_iter()
        .map(|rel| {
            let exact = decoded_set.contains(&(
                rel.predicate,
                rel.argument.label.as_str(),
                rel.argument.span,
            ));
            let converted = rel.slot.is_some();
            let reason = if exact {
                ConversionOutcome::Ok
            } else if converted && rel.head_ambiguous {
                ConversionOutcome::HeadAmbiguous
            } else if converted {
                ConversionOutcome::NotRecovered
            } else {
                rel.reason
            };
            RelationRecord {
                predicate: rel.predicate,
                argument: rel.argument,
                arg_head: rel.arg_head,
                pattern: rel.slot.unwrap_or(PatternClass::Other),
                two_hop: rel.two_hop,
                head_ambiguous: rel.head_ambiguous,
                converted,
                reason,
            }
        })
        .collect();

    (joint, ConversionReport { relations })
}

/// Counters for degradations encountered during backward conversion.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecodeStats {
    /// (C) tuples naming an argument their governor does not hold.
    pub ignored_c_tuples: usize,
    /// Resolved arguments dropped because their span covered their own
    /// predicate.
    pub dropped_self_covering: usize,
}

/// Recovers SRL frames from a joint tree for the given predicates.
///
/// Slots anchored at tokens outside the predicate set are ignored, except
/// for dummy relations, which any governor may carry. Invalid (C) tuples
/// (naming an argument the governor does not hold) are skipped silently,
/// as they can occur in model predictions. One frame is returned per given
/// predicate, possibly with no arguments.
pub fn decode_joint(joint: &JointTree, predicates: &BTreeSet<usize>) -> Vec<SrlFrame> {
    decode_joint_with_stats(joint, predicates).0
}

/// [`decode_joint`] plus counters over the skipped label material.
pub fn decode_joint_with_stats(
    joint: &JointTree,
    predicates: &BTreeSet<usize>,
) -> (Vec<SrlFrame>, DecodeStats) {
    let n = joint.len();
    let tree = joint.syn_tree();
    let mut stats = DecodeStats::default();
    let mut args: HashMap<usize, Vec<Argument>> =
        predicates.iter().map(|&p| (p, Vec::new())).collect();
    let mut dummies: HashMap<usize, Vec<Span>> = HashMap::new();

    let push_arg = |store: &mut HashMap<usize, Vec<Argument>>,
                    stats: &mut DecodeStats,
                    predicate: usize,
                    label: &str,
                    span: Span| {
        if label == DUMMY_LABEL {
            return;
        }
        if span.contains(predicate) {
            stats.dropped_self_covering += 1;
            return;
        }
        if let Some(list) = store.get_mut(&predicate) {
            list.push(Argument {
                label: label.to_string(),
                span,
            });
        }
    };

    // Phase 1: direct and reverse relations, plus dummy spans.
    for i in 1..=n {
        let label = joint.label(i);
        if let Some(d) = &label.d {
            let governor = joint.head(i);
            if governor != 0 {
                if d == DUMMY_LABEL {
                    let (span, _) =
                        reconstruct_span(&tree, PatternClass::Direct, governor, i, None);
                    dummies.entry(governor).or_default().push(span);
                } else if predicates.contains(&governor) {
                    let (span, _) =
                        reconstruct_span(&tree, PatternClass::Direct, governor, i, None);
                    push_arg(&mut args, &mut stats, governor, d, span);
                }
            }
        }
        if let Some(r) = &label.r {
            let arg_head = joint.head(i);
            if arg_head != 0 && predicates.contains(&i) {
                let (span, _) = reconstruct_span(&tree, PatternClass::Reverse, i, arg_head, None);
                push_arg(&mut args, &mut stats, i, r, span);
            }
        }
    }

    // Phase 2: preorder traversal resolving (C) tuples top-down, so a
    // governor's arguments are final before its dependents consume them.
    let mut stack: Vec<usize> = tree.children(0).into_iter().rev().collect();
    while let Some(q) = stack.pop() {
        for c in tree.children(q).into_iter().rev() {
            stack.push(c);
        }
        let governor = joint.head(q);
        if governor == 0 {
            continue;
        }
        let Some(share) = &joint.label(q).c else {
            continue;
        };
        let mut granted: Vec<Argument> = Vec::new();
        match &share.parent_label {
            Some(a) => {
                let found = args
                    .get(&governor)
                    .and_then(|list| list.iter().find(|arg| &arg.label == a));
                match found {
                    Some(found) => granted.push(Argument {
                        label: share.child_label.clone(),
                        span: found.span,
                    }),
                    None => stats.ignored_c_tuples += 1,
                }
            }
            None => match dummies.get(&governor).and_then(|s| s.first()) {
                Some(&span) => granted.push(Argument {
                    label: share.child_label.clone(),
                    span,
                }),
                None => stats.ignored_c_tuples += 1,
            },
        }
        if share.propagate_argm {
            if let Some(list) = args.get(&governor) {
                granted.extend(list.iter().filter(|a| is_argm(&a.label)).cloned());
            }
        }
        for arg in granted {
            push_arg(&mut args, &mut stats, q, &arg.label, arg.span);
        }
    }

    let frames = predicates
        .iter()
        .map(|&p| SrlFrame::new(p, args.remove(&p).unwrap_or_default()))
        .collect();
    (frames, stats)
}

/// Full forward conversion of a sentence, keeping tokens and predicates.
pub fn encode_sentence(sentence: &crate::core::AnnotatedSentence) -> (JointSentence, ConversionReport) {
    let (joint, report) = encode_joint(&sentence.tree, &sentence.frames);
    (
        JointSentence {
            tokens: sentence.tokens.clone(),
            tree: joint,
            predicates: sentence.predicates(),
        },
        report,
    )
}

/// Full backward conversion of a joint sentence.
pub fn decode_sentence(sentence: &JointSentence) -> crate::core::AnnotatedSentence {
    let frames = decode_joint(&sentence.tree, &sentence.predicates);
    crate::core::AnnotatedSentence::new(sentence.tokens.clone(), sentence.tree.syn_tree(), frames)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::Token;

    fn tree(heads: Vec<usize>, rels: &[&str]) -> DepTree {
        DepTree::new(heads, rels.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    /// She wanted to design the bridge (the running example).
    fn figure_sentence() -> (DepTree, Vec<SrlFrame>) {
        let t = tree(
            vec![2, 0, 4, 2, 6, 4],
            &["nsubj", "root", "mark", "xcomp", "det", "dobj"],
        );
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
        (t, frames)
    }

    #[test]
    fn argument_head_of_the_complement_clause() {
        let (t, _) = figure_sentence();
        let ah = argument_head(&t, Span::new(3, 6)).unwrap();
        assert_eq!(ah.head, 4);
        assert!(!ah.ambiguous);
    }

    #[test]
    fn argument_head_of_singleton_span() {
        let (t, _) = figure_sentence();
        let ah = argument_head(&t, Span::new(5, 5)).unwrap();
        assert_eq!(ah.head, 5);
        assert!(!ah.ambiguous);
    }

    #[test]
    fn argument_head_prefers_larger_coverage() {
        // Span [2,5]: tokens 3 and 5 are externally headed with subtree
        // coverages 3 and 1.
        let t = tree(vec![0, 3, 1, 3, 1, 1], &["r", "a", "b", "c", "d", "e"]);
        let ah = argument_head(&t, Span::new(2, 5)).unwrap();
        assert_eq!(ah.head, 3);
        assert!(!ah.ambiguous);
    }

    #[test]
    fn argument_head_flags_ties() {
        let t = tree(vec![0, 1, 1, 1], &["r", "a", "b", "c"]);
        let ah = argument_head(&t, Span::new(2, 3)).unwrap();
        assert_eq!(ah.head, 2);
        assert!(ah.ambiguous);
    }

    #[test]
    fn argument_head_rejects_bad_span() {
        let (t, _) = figure_sentence();
        assert!(argument_head(&t, Span::new(4, 3)).is_err());
        assert!(argument_head(&t, Span::new(1, 9)).is_err());
    }

    #[test]
    fn pattern_classification_matches_the_taxonomy() {
        let (t, _) = figure_sentence();
        assert_eq!(classify_pattern(&t, 2, 1), PatternClass::Direct);
        assert_eq!(classify_pattern(&t, 4, 1), PatternClass::Common);
        // The bridge , which is designed by her
        let r = tree(
            vec![2, 0, 2, 6, 6, 2, 6, 7],
            &["det", "root", "punct", "nsubjpass", "auxpass", "rcmod", "prep", "pobj"],
        );
        assert_eq!(classify_pattern(&r, 6, 2), PatternClass::Reverse);
    }

    #[test]
    fn encodes_the_figure_sentence_labels() {
        let (t, frames) = figure_sentence();
        let (joint, report) = encode_joint(&t, &frames);
        let rendered: Vec<String> = joint
            .labels()
            .iter()
            .map(|l| crate::core::serialize_label(l).unwrap())
            .collect();
        assert_eq!(
            rendered,
            vec![
                "nsubj|ARG0|_|_",
                "root|_|_|_",
                "mark|_|_|_",
                "xcomp|ARG1|(ARG0,ARG0)|_",
                "det|_|_|_",
                "dobj|ARG1|_|_",
            ]
        );
        assert_eq!(joint.heads(), t.heads());
        assert_eq!(report.total(), 4);
        assert_eq!(report.recovered(), 4);
    }

    #[test]
    fn encoding_without_frames_is_identity_on_syntax() {
        let (t, _) = figure_sentence();
        let (joint, report) = encode_joint(&t, &[]);
        assert!(joint.labels().iter().all(|l| !l.has_srl()));
        assert_eq!(joint.syn_tree(), t);
        assert_eq!(report.total(), 0);
    }

    #[test]
    fn round_trips_the_figure_sentence() {
        let (t, frames) = figure_sentence();
        let (joint, _) = encode_joint(&t, &frames);
        let decoded = decode_joint(&joint, &BTreeSet::from([2, 4]));
        assert_eq!(decoded, frames);
    }

    #[test]
    fn two_hop_chain_encodes_on_the_conjunction_edge() {
        // She wanted to design and build the bridge; build's ARG0 is She,
        // reachable only through two (C) hops.
        let t = tree(
            vec![2, 0, 4, 2, 4, 4, 8, 4],
            &["nsubj", "root", "mark", "xcomp", "cc", "conj", "det", "dobj"],
        );
        let frames = vec![
            SrlFrame::new(2, vec![Argument::new("ARG0", 1, 1)]),
            SrlFrame::new(4, vec![Argument::new("ARG0", 1, 1)]),
            SrlFrame::new(6, vec![Argument::new("ARG0", 1, 1)]),
        ];
        let (joint, report) = encode_joint(&t, &frames);
        let conj_edge = crate::core::serialize_label(joint.label(6)).unwrap();
        assert_eq!(conj_edge, "conj|_|(ARG0,ARG0)|_");
        let rec = report
            .relations
            .iter()
            .find(|r| r.predicate == 6)
            .unwrap();
        assert!(rec.two_hop && rec.converted);
        assert_eq!(rec.reason, ConversionOutcome::Ok);

        let decoded = decode_joint(&joint, &BTreeSet::from([2, 4, 6]));
        assert_eq!(decoded, frames);
    }

    #[test]
    fn dummy_relation_serves_a_non_predicate_governor() {
        // She nodded , smiling: only `smiling` is a predicate; its ARG0
        // is a sibling whose governor takes no arguments of its own.
        let t = tree(vec![2, 0, 2, 2], &["nsubj", "root", "punct", "vmod"]);
        let frames = vec![SrlFrame::new(4, vec![Argument::new("ARG0", 1, 1)])];
        let (joint, report) = encode_joint(&t, &frames);
        assert_eq!(joint.label(1).d.as_deref(), Some(DUMMY_LABEL));
        assert_eq!(
            crate::core::serialize_label(joint.label(4)).unwrap(),
            "vmod|_|(0,ARG0)|_"
        );
        assert_eq!(report.recovered(), 1);
        let decoded = decode_joint(&joint, &BTreeSet::from([4]));
        assert_eq!(decoded, frames);
        // The sentinel never leaks into output.
        assert!(decoded
            .iter()
            .flat_map(|f| f.arguments())
            .all(|a| a.label != DUMMY_LABEL));
    }

    #[test]
    fn argm_propagation_covers_shared_adjuncts() {
        // She stumbled and fell yesterday: both predicates share ARG0 and
        // the temporal adjunct.
        let t = tree(
            vec![2, 0, 2, 2, 2],
            &["nsubj", "root", "cc", "conj", "tmod"],
        );
        let frames = vec![
            SrlFrame::new(
                2,
                vec![Argument::new("ARG0", 1, 1), Argument::new("ARGM-TMP", 5, 5)],
            ),
            SrlFrame::new(
                4,
                vec![Argument::new("ARG0", 1, 1), Argument::new("ARGM-TMP", 5, 5)],
            ),
        ];
        let (joint, report) = encode_joint(&t, &frames);
        assert_eq!(
            crate::core::serialize_label(joint.label(4)).unwrap(),
            "conj|_|(ARG0,ARG0)+m|_"
        );
        assert_eq!(report.recovered(), 4);
        let decoded = decode_joint(&joint, &BTreeSet::from([2, 4]));
        assert_eq!(decoded, frames);
    }

    #[test]
    fn second_shared_core_argument_is_dropped() {
        let t = tree(
            vec![2, 0, 2, 2, 2],
            &["nsubj", "root", "cc", "conj", "dobj"],
        );
        let frames = vec![
            SrlFrame::new(
                2,
                vec![Argument::new("ARG0", 1, 1), Argument::new("ARG1", 5, 5)],
            ),
            SrlFrame::new(
                4,
                vec![Argument::new("ARG0", 1, 1), Argument::new("ARG1", 5, 5)],
            ),
        ];
        let (_, report) = encode_joint(&t, &frames);
        assert_eq!(report.recovered(), 3);
        assert_eq!(report.count(ConversionOutcome::MultiCoreDropped), 1);
        let dropped = report
            .relations
            .iter()
            .find(|r| r.reason == ConversionOutcome::MultiCoreDropped)
            .unwrap();
        // The lexicographically smaller label (ARG0) rides the tuple.
        assert_eq!(dropped.argument.label, "ARG1");
        assert_eq!(dropped.predicate, 4);
    }

    #[test]
    fn invalid_c_tuple_is_ignored() {
        let t = tree(vec![2, 0, 2], &["nsubj", "root", "xcomp"]);
        let labels = vec![
            JointLabel::syntactic("nsubj"),
            JointLabel::syntactic("root"),
            JointLabel {
                syn: "xcomp".into(),
                d: None,
                c: Some(CShare::new("ARG7", "ARG0")),
                r: None,
            },
        ];
        let joint = JointTree::new(vec![2, 0, 2], labels).unwrap();
        let _ = t;
        let (decoded, stats) = decode_joint_with_stats(&joint, &BTreeSet::from([3]));
        assert_eq!(decoded.len(), 1);
        assert!(decoded[0].arguments().is_empty());
        assert_eq!(stats.ignored_c_tuples, 1);
    }

    #[test]
    fn blank_joint_tree_yields_empty_frames() {
        let (t, _) = figure_sentence();
        let labels = t
            .rels()
            .iter()
            .map(|r| JointLabel::syntactic(r.as_str()))
            .collect();
        let joint = JointTree::new(t.heads().to_vec(), labels).unwrap();
        let decoded = decode_joint(&joint, &BTreeSet::from([2, 4]));
        assert_eq!(decoded.len(), 2);
        assert!(decoded.iter().all(|f| f.arguments().is_empty()));
    }

    #[test]
    fn reconstructs_relative_clause_span_to_the_left() {
        // The bridge , which is designed by her
        let t = tree(
            vec![2, 0, 2, 6, 6, 2, 6, 7],
            &["det", "root", "punct", "nsubjpass", "auxpass", "rcmod", "prep", "pobj"],
        );
        let (span, flagged) = reconstruct_span(&t, PatternClass::Reverse, 6, 2, None);
        assert_eq!(span, Span::new(1, 3));
        assert!(!flagged);
    }

    #[test]
    fn reconstructs_participle_span_to_the_right() {
        // broken glass
        let t = tree(vec![2, 0], &["amod", "root"]);
        let (span, _) = reconstruct_span(&t, PatternClass::Reverse, 1, 2, None);
        assert_eq!(span, Span::new(2, 2));
    }

    #[test]
    fn direct_span_is_the_subtree() {
        let (t, _) = figure_sentence();
        let (span, flagged) = reconstruct_span(&t, PatternClass::Direct, 2, 4, None);
        assert_eq!(span, Span::new(3, 6));
        assert!(!flagged);
    }

    #[test]
    fn non_contiguous_direct_span_is_flagged() {
        let t = tree(vec![4, 3, 0, 3, 4], &["a", "b", "root", "c", "d"]);
        let (span, flagged) = reconstruct_span(&t, PatternClass::Direct, 3, 4, None);
        assert_eq!(span, Span::new(1, 5));
        assert!(flagged);
    }

    #[test]
    fn slot_collision_keeps_the_first_relation() {
        let t = tree(vec![0, 3, 1], &["root", "dep", "dep"]);
        let frames = vec![SrlFrame::new(
            1,
            vec![Argument::new("ARG1", 2, 3), Argument::new("ARG2", 3, 3)],
        )];
        let (joint, report) = encode_joint(&t, &frames);
        assert_eq!(joint.label(3).d.as_deref(), Some("ARG1"));
        assert_eq!(report.recovered(), 1);
        assert_eq!(report.count(ConversionOutcome::SlotCollision), 1);
    }

    #[test]
    fn decode_ignores_slots_of_unlisted_predicates() {
        let (t, frames) = figure_sentence();
        let (joint, _) = encode_joint(&t, &frames);
        let decoded = decode_joint(&joint, &BTreeSet::from([4]));
        assert_eq!(decoded.len(), 1);
        assert_eq!(decoded[0].predicate, 4);
        // The (D) argument on design's own edge survives; the shared ARG0
        // rides a slot anchored at the unlisted predicate 2 and is gone.
        assert_eq!(decoded[0].arguments(), &[Argument::new("ARG1", 5, 6)]);
    }

    #[test]
    fn encode_is_independent_of_frame_order() {
        let (t, mut frames) = figure_sentence();
        let (j1, _) = encode_joint(&t, &frames);
        frames.reverse();
        let (j2, _) = encode_joint(&t, &frames);
        assert_eq!(j1, j2);
    }

    #[test]
    fn sentence_wrappers_round_trip() {
        let (t, frames) = figure_sentence();
        let tokens: Vec<Token> = ["She", "wanted", "to", "design", "the", "bridge"]
            .iter()
            .enumerate()
            .map(|(i, f)| Token::new(i + 1, *f))
            .collect();
        let sentence = crate::core::AnnotatedSentence::new(tokens, t, frames);
        let (joint, _) = encode_sentence(&sentence);
        let back = decode_sentence(&joint);
        assert_eq!(back, sentence);
    }
}
