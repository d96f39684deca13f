//! Corpus-level structural statistics and the oracle round-trip evaluator.

use std::collections::BTreeMap;

use crate::convert::{
    argument_head, classify_pattern, decode_joint, encode_joint, is_two_hop, ConversionReport,
};
use crate::core::{AnnotatedSentence, PatternClass};
use crate::eval::{srl_prf, PrfScore};

/// Reporting bucket for the pattern distribution. The two-hop
/// configuration (common governor one level above the predicate) is kept
/// apart from plain `Other`, mirroring its own row in the taxonomy; it is
/// displayed as a sub-bucket of (R).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PatternBucket {
    Direct,
    Common,
    Reverse,
    TwoHop,
    Other,
}

impl std::fmt::Display for PatternBucket {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PatternBucket::Direct => "(D)",
            PatternBucket::Common => "(C)",
            PatternBucket::Reverse => "(R)",
            PatternBucket::TwoHop => "(R) two-hop",
            PatternBucket::Other => "Others",
        };
        f.write_str(s)
    }
}

pub const ALL_BUCKETS: [PatternBucket; 5] = [
    PatternBucket::Direct,
    PatternBucket::Common,
    PatternBucket::Reverse,
    PatternBucket::TwoHop,
    PatternBucket::Other,
];

/// How the gold predicate-argument relations distribute over the
/// structural patterns, with the syntactic relations that realize each
/// pattern.
#[derive(Debug, Clone, Default)]
pub struct PatternDistribution {
    pub counts: BTreeMap<PatternBucket, usize>,
    /// Per bucket: connecting syntactic relation -> count. For (D) this is
    /// the relation on the predicate -> argument edge; for the other
    /// buckets the relation on the edge into the predicate.
    pub relations: BTreeMap<PatternBucket, BTreeMap<String, usize>>,
}

impl PatternDistribution {
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn count(&self, bucket: PatternBucket) -> usize {
        self.counts.get(&bucket).copied().unwrap_or(0)
    }

    pub fn fraction(&self, bucket: PatternBucket) -> f64 {
        let total = self.total();
        if total == 0 {
            0.0
        } else {
            self.count(bucket) as f64 / total as f64
        }
    }

    /// Top syntactic relations of a bucket with their within-bucket share.
    pub fn top_relations(&self, bucket: PatternBucket, k: usize) -> Vec<(String, f64)> {
        let Some(rels) = self.relations.get(&bucket) else {
            return Vec::new();
        };
        let total: usize = rels.values().sum();
        let mut entries: Vec<(String, usize)> =
            rels.iter().map(|(r, &c)| (r.clone(), c)).collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        entries
            .into_iter()
            .take(k)
            .map(|(r, c)| (r, c as f64 / total as f64))
            .collect()
    }
}

/// Classifies every gold relation of the corpus and aggregates the
/// distribution.
pub fn pattern_stats(corpus: &[AnnotatedSentence]) -> PatternDistribution {
    let mut dist = PatternDistribution::default();
    for bucket in ALL_BUCKETS {
        dist.counts.insert(bucket, 0);
        dist.relations.insert(bucket, BTreeMap::new());
    }
    for sentence in corpus {
        for frame in &sentence.frames {
            for arg in frame.arguments() {
                let (bucket, edge_rel) = match argument_head(&sentence.tree, arg.span) {
                    Ok(ah) if ah.head != frame.predicate => {
                        let bucket = match classify_pattern(&sentence.tree, frame.predicate, ah.head)
                        {
                            PatternClass::Direct => PatternBucket::Direct,
                            PatternClass::Common => PatternBucket::Common,
                            PatternClass::Reverse => PatternBucket::Reverse,
                            PatternClass::Other => {
                                if is_two_hop(&sentence.tree, frame.predicate, ah.head) {
                                    PatternBucket::TwoHop
                                } else {
                                    PatternBucket::Other
                                }
                            }
                        };
                        let rel = if bucket == PatternBucket::Direct {
                            sentence.tree.rel(ah.head)
                        } else {
                            sentence.tree.rel(frame.predicate)
                        };
                        (bucket, rel.to_string())
                    }
                    _ => (PatternBucket::Other, String::from("-")),
                };
                *dist.counts.get_mut(&bucket).unwrap() += 1;
                *dist
                    .relations
                    .get_mut(&bucket)
                    .unwrap()
                    .entry(edge_rel)
                    .or_insert(0) += 1;
            }
        }
    }
    dist
}

/// Outcome of encoding and decoding a whole corpus against itself.
#[derive(Debug, Clone)]
pub struct OracleOutcome {
    pub score: PrfScore,
    pub report: ConversionReport,
}

/// Encodes every sentence to joint labels, decodes it back and scores the
/// result against the gold frames with span-based exact match.
pub fn oracle_roundtrip(corpus: &[AnnotatedSentence]) -> OracleOutcome {
    let mut decoded: Vec<Vec<crate::core::SrlFrame>> = Vec::with_capacity(corpus.len());
    let mut reports = Vec::with_capacity(corpus.len());
    for sentence in corpus {
        let (joint, report) = encode_joint(&sentence.tree, &sentence.frames);
        decoded.push(decode_joint(&joint, &sentence.predicates()));
        reports.push(report);
    }
    let gold: Vec<Vec<crate::core::SrlFrame>> = corpus.iter().map(|s| s.frames.clone()).collect();
    OracleOutcome {
        score: srl_prf(&gold, &decoded),
        report: ConversionReport::merge(reports),
    }
}
