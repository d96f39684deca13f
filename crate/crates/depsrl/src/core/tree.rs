//! Tree geometry: subtree projections and projectivity.

use super::DepTree;

/// The projection of a subtree onto the token line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubtreeSpan {
    pub min: usize,
    pub max: usize,
    /// True when the subtree covers every position in `[min, max]`.
    pub contiguous: bool,
}

/// Positions covered by the subtree rooted at token `i`, including `i`.
pub fn subtree_positions(tree: &DepTree, i: usize) -> Vec<usize> {
    let n = tree.len();
    let mut in_subtree = vec![false; n + 1];
    in_subtree[i] = true;
    // Peel tokens upward: a token is in the subtree iff its head chain
    // meets `i` before the root.
    for t in 1..=n {
        if in_subtree[t] {
            continue;
        }
        let mut chain = vec![t];
        let mut cur = tree.head(t);
        while cur != 0 && !in_subtree[cur] {
            chain.push(cur);
            cur = tree.head(cur);
        }
        if cur != 0 {
            for c in chain {
                in_subtree[c] = true;
            }
        }
    }
    (1..=n).filter(|&t| in_subtree[t]).collect()
}

/// Number of positions of `span` covered by the subtree rooted at `i`.
pub fn subtree_coverage(tree: &DepTree, i: usize, span: super::Span) -> usize {
    subtree_positions(tree, i)
        .into_iter()
        .filter(|&p| span.contains(p))
        .count()
}

/// Min/max projection of token `i`'s subtree and whether it is contiguous.
pub fn subtree_span(tree: &DepTree, i: usize) -> SubtreeSpan {
    let positions = subtree_positions(tree, i);
    let min = positions[0];
    let max = *positions.last().unwrap();
    SubtreeSpan {
        min,
        max,
        contiguous: positions.len() == max - min + 1,
    }
}

/// A tree is projective iff every subtree projects onto a contiguous range.
pub fn is_projective(tree: &DepTree) -> bool {
    (1..=tree.len()).all(|i| subtree_span(tree, i).contiguous)
}

/// O(n^2) pairwise arc-crossing check over the same tree, including the
/// arcs out of the virtual root. Kept as an independent reference for
/// [`is_projective`].
pub fn crossing_arcs_exist(tree: &DepTree) -> bool {
    let arcs: Vec<(usize, usize)> = (1..=tree.len())
        .map(|d| {
            let h = tree.head(d);
            (h.min(d), h.max(d))
        })
        .collect();
    for (i, &(a1, b1)) in arcs.iter().enumerate() {
        for &(a2, b2) in &arcs[i + 1..] {
            let strictly_inside = |x: usize, lo: usize, hi: usize| lo < x && x < hi;
            let one_in = strictly_inside(a2, a1, b1) != strictly_inside(b2, a1, b1);
            let shares_endpoint = a2 == a1 || a2 == b1 || b2 == a1 || b2 == b1;
            if one_in && !shares_endpoint {
                return true;
            }
        }
    }
    false
}
