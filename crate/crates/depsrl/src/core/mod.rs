//! Shared domain types: tokens, dependency trees, SRL frames and the joint
//! syntacto-semantic labels that fuse the two annotation layers.
//!
//! Token positions are 1-based throughout; position 0 is the virtual root of
//! the dependency tree and never corresponds to a token. All types are
//! immutable values after construction and all operations on them are pure.

mod label;
mod tree;

pub use label::{parse_label, serialize_label, CShare, JointLabel, DUMMY_LABEL};
pub use tree::{crossing_arcs_exist, is_projective, subtree_coverage, subtree_span, SubtreeSpan};

use std::collections::BTreeSet;

use crate::error::CoreError;

/// An inclusive range of token positions, `1 <= start <= end <= n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn contains(&self, pos: usize) -> bool {
        self.start <= pos && pos <= self.end
    }

    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl std::fmt::Display for Span {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{},{}]", self.start, self.end)
    }
}

/// A surface token. `index` is its 1-based position in the sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub index: usize,
    pub form: String,
    pub pos: Option<String>,
}

impl Token {
    pub fn new(index: usize, form: impl Into<String>) -> Self {
        Token {
            index,
            form: form.into(),
            pos: None,
        }
    }

    pub fn with_pos(index: usize, form: impl Into<String>, pos: impl Into<String>) -> Self {
        Token {
            index,
            form: form.into(),
            pos: Some(pos.into()),
        }
    }
}

/// A syntactic dependency tree over `n` tokens, rooted at the virtual
/// position 0. `heads[i-1]` is the governor of token `i` and `rels[i-1]`
/// the syntactic relation on that arc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepTree {
    heads: Vec<usize>,
    rels: Vec<String>,
}

impl DepTree {
    /// Validates that `heads` forms a single tree rooted at 0: no token is
    /// its own governor, all heads are in range and every token is
    /// reachable from the root.
    pub fn new(heads: Vec<usize>, rels: Vec<String>) -> Result<Self, CoreError> {
        let n = heads.len();
        if rels.len() != n {
            return Err(CoreError::Tree(format!(
                "{} heads but {} relations",
                n,
                rels.len()
            )));
        }
        for (i, &h) in heads.iter().enumerate() {
            let tok = i + 1;
            if h > n {
                return Err(CoreError::Tree(format!(
                    "token {tok} has out-of-range head {h} (n = {n})"
                )));
            }
            if h == tok {
                return Err(CoreError::Tree(format!("token {tok} is its own head")));
            }
        }
        // Reachability from the root; any unreachable token sits on a cycle
        // or below one.
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
        for (i, &h) in heads.iter().enumerate() {
            children[h].push(i + 1);
        }
        let mut seen = vec![false; n + 1];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &c in &children[v] {
                if !seen[c] {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
        if let Some(tok) = (1..=n).find(|&t| !seen[t]) {
            return Err(CoreError::Tree(format!(
                "token {tok} is not reachable from the root (cycle)"
            )));
        }
        Ok(DepTree { heads, rels })
    }

    pub fn len(&self) -> usize {
        self.heads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heads.is_empty()
    }

    /// Governor of token `i` (1-based). 0 denotes the virtual root.
    pub fn head(&self, i: usize) -> usize {
        self.heads[i - 1]
    }

    /// Syntactic relation on the arc into token `i` (1-based).
    pub fn rel(&self, i: usize) -> &str {
        &self.rels[i - 1]
    }

    pub fn heads(&self) -> &[usize] {
        &self.heads
    }

    pub fn rels(&self) -> &[String] {
        &self.rels
    }

    /// Children of position `i` (0 = root) in ascending order.
    pub fn children(&self, i: usize) -> Vec<usize> {
        (1..=self.len()).filter(|&t| self.head(t) == i).collect()
    }
}

/// One labeled argument span of a predicate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Argument {
    pub label: String,
    pub span: Span,
}

impl Argument {
    pub fn new(label: impl Into<String>, start: usize, end: usize) -> Self {
        Argument {
            label: label.into(),
            span: Span::new(start, end),
        }
    }
}

/// A predicate with its argument spans. Arguments are kept in canonical
/// order (by span, then label) and deduplicated, so that structural
/// equality is insensitive to construction order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SrlFrame {
    pub predicate: usize,
    arguments: Vec<Argument>,
}

impl SrlFrame {
    pub fn new(predicate: usize, mut arguments: Vec<Argument>) -> Self {
        arguments.sort_by(|a, b| (a.span, &a.label).cmp(&(b.span, &b.label)));
        arguments.dedup();
        SrlFrame {
            predicate,
            arguments,
        }
    }

    pub fn arguments(&self) -> &[Argument] {
        &self.arguments
    }

    /// Checks span bounds against sentence length `n` and that the
    /// predicate token lies outside all of its own argument spans.
    pub fn validate(&self, n: usize) -> Result<(), CoreError> {
        if self.predicate == 0 || self.predicate > n {
            return Err(CoreError::Frame(format!(
                "predicate index {} out of range 1..={n}",
                self.predicate
            )));
        }
        for arg in &self.arguments {
            let Span { start, end } = arg.span;
            if start == 0 || start > end || end > n {
                return Err(CoreError::Frame(format!(
                    "argument {} has invalid span {} for sentence length {n}",
                    arg.label, arg.span
                )));
            }
            if arg.span.contains(self.predicate) {
                return Err(CoreError::Frame(format!(
                    "predicate {} lies inside its own argument span {}",
                    self.predicate, arg.span
                )));
            }
        }
        Ok(())
    }
}

/// A sentence with both annotation layers: a dependency tree and SRL frames.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedSentence {
    pub tokens: Vec<Token>,
    pub tree: DepTree,
    pub frames: Vec<SrlFrame>,
}

impl AnnotatedSentence {
    pub fn new(tokens: Vec<Token>, tree: DepTree, mut frames: Vec<SrlFrame>) -> Self {
        frames.sort_by_key(|f| f.predicate);
        AnnotatedSentence {
            tokens,
            tree,
            frames,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn predicates(&self) -> BTreeSet<usize> {
        self.frames.iter().map(|f| f.predicate).collect()
    }
}

/// A dependency tree whose edges carry [`JointLabel`]s; the unified
/// representation both annotation layers convert to and from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointTree {
    heads: Vec<usize>,
    labels: Vec<JointLabel>,
}

impl JointTree {
    pub fn new(heads: Vec<usize>, labels: Vec<JointLabel>) -> Result<Self, CoreError> {
        let rels = labels.iter().map(|l| l.syn.clone()).collect();
        // Reuse the tree validation; the joint tree shares its invariants.
        DepTree::new(heads.clone(), rels)?;
        Ok(JointTree { heads, labels })
    }

    pub fn len(&self) -> usize {
        self.heads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heads.is_empty()
    }

    pub fn head(&self, i: usize) -> usize {
        self.heads[i - 1]
    }

    pub fn label(&self, i: usize) -> &JointLabel {
        &self.labels[i - 1]
    }

    pub fn heads(&self) -> &[usize] {
        &self.heads
    }

    pub fn labels(&self) -> &[JointLabel] {
        &self.labels
    }

    /// Strips the SRL slots, recovering the purely syntactic tree.
    pub fn syn_tree(&self) -> DepTree {
        DepTree {
            heads: self.heads.clone(),
            rels: self.labels.iter().map(|l| l.syn.clone()).collect(),
        }
    }
}

/// A sentence in joint-label form together with its pre-identified
/// predicate positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointSentence {
    pub tokens: Vec<Token>,
    pub tree: JointTree,
    pub predicates: BTreeSet<usize>,
}

/// Structural configuration between a predicate and an argument head.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PatternClass {
    /// The predicate directly governs the argument head.
    Direct,
    /// Predicate and argument head share a common (non-root) governor.
    Common,
    /// The argument head directly governs the predicate.
    Reverse,
    /// Anything else.
    Other,
}

impl std::fmt::Display for PatternClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PatternClass::Direct => "(D)",
            PatternClass::Common => "(C)",
            PatternClass::Reverse => "(R)",
            PatternClass::Other => "Other",
        };
        f.write_str(s)
    }
}
