//! Projective maximum spanning tree decoding over arc-factored scores.
//!
//! [`eisner`] is the O(n^3) dynamic program used at inference time;
//! [`brute_force_projective`] enumerates every head assignment for small
//! sentences and serves as its oracle in tests.
//!
//! Ties are broken identically in both: among trees of maximal total score
//! the one with the lexicographically smallest heads vector
//! `(h_1, ..., h_n)` wins. Inside the dynamic program this is realized as a
//! secondary additive penalty `(n+2)^(n-d) * h` per arc `(h, d)`, which is
//! exact for n <= 26 and saturates (still deterministically) beyond that.

use ndarray::Array2;

use crate::error::DecodeError;
use crate::scalar::Scalar;

/// Dense head x dependent scores; `get(h, d)` is the score of attaching
/// dependent `d` (1-based) to head `h` (0 = root). The diagonal is unused.
#[derive(Debug, Clone)]
pub struct ArcScoreMatrix<F> {
    n: usize,
    data: Array2<F>,
}

impl<F: Scalar> ArcScoreMatrix<F> {
    pub fn zeros(n: usize) -> Self {
        ArcScoreMatrix {
            n,
            data: Array2::zeros((n + 1, n + 1)),
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut m = Self::zeros(n);
        for h in 0..=n {
            for d in 1..=n {
                if h != d {
                    m.set(h, d, f(h, d));
                }
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, head: usize, dep: usize) -> F {
        self.data[[head, dep]]
    }

    pub fn set(&mut self, head: usize, dep: usize, score: F) {
        self.data[[head, dep]] = score;
    }

    /// Total score of a head assignment under this matrix.
    pub fn tree_score(&self, heads: &[usize]) -> F {
        heads
            .iter()
            .enumerate()
            .map(|(i, &h)| self.get(h, i + 1))
            .sum()
    }
}

fn arc_penalty(n: usize, head: usize, dep: usize) -> u128 {
    let base = (n + 2) as u128;
    let mut weight: u128 = 1;
    for _ in 0..(n - dep) {
        weight = weight.saturating_mul(base);
    }
    weight.saturating_mul(head as u128)
}

/// Score plus tie-break penalty, ordered lexicographically.
#[derive(Clone, Copy, Debug)]
struct Value<F> {
    score: F,
    penalty: u128,
}

impl<F: Scalar> Value<F> {
    fn neg_inf() -> Self {
        Value {
            score: F::neg_infinity(),
            penalty: u128::MAX,
        }
    }

    fn zero() -> Self {
        Value {
            score: F::zero(),
            penalty: 0,
        }
    }

    fn plus(self, other: Value<F>) -> Self {
        Value {
            score: self.score + other.score,
            penalty: self.penalty.saturating_add(other.penalty),
        }
    }

    fn better_than(&self, other: &Value<F>) -> bool {
        self.score > other.score || (self.score == other.score && self.penalty < other.penalty)
    }
}

/// One triangular chart over positions `lo..=hi`.
///
/// `cr`/`cl` are complete spans headed at the left/right end; `ir`/`il`
/// the corresponding incomplete spans whose top arc goes right/left.
struct Chart<F> {
    lo: usize,
    m: usize,
    cr: Vec<Value<F>>,
    cl: Vec<Value<F>>,
    ir: Vec<Value<F>>,
    il: Vec<Value<F>>,
    bp_cr: Vec<usize>,
    bp_cl: Vec<usize>,
    bp_ir: Vec<usize>,
    bp_il: Vec<usize>,
}

impl<F: Scalar> Chart<F> {
    fn idx(&self, i: usize, j: usize) -> usize {
        (i - self.lo) * self.m + (j - self.lo)
    }

    /// Fills the chart for positions `lo..=hi`. Arcs into `lo` are
    /// forbidden when `lo` is the virtual root.
    fn fill(scores: &ArcScoreMatrix<F>, lo: usize, hi: usize) -> Self {
        let n = scores.n();
        let m = hi - lo + 1;
        let mut chart = Chart {
            lo,
            m,
            cr: vec![Value::neg_inf(); m * m],
            cl: vec![Value::neg_inf(); m * m],
            ir: vec![Value::neg_inf(); m * m],
            il: vec![Value::neg_inf(); m * m],
            bp_cr: vec![usize::MAX; m * m],
            bp_cl: vec![usize::MAX; m * m],
            bp_ir: vec![usize::MAX; m * m],
            bp_il: vec![usize::MAX; m * m],
        };
        for p in lo..=hi {
            let at = chart.idx(p, p);
            chart.cr[at] = Value::zero();
            chart.cl[at] = Value::zero();
        }
        for width in 1..m {
            for i in lo..=hi - width {
                let j = i + width;
                let at = chart.idx(i, j);
                // Incomplete spans: both share the same split structure.
                for k in i..j {
                    let inner = chart.cr[chart.idx(i, k)].plus(chart.cl[chart.idx(k + 1, j)]);
                    let right = inner.plus(Value {
                        score: scores.get(i, j),
                        penalty: arc_penalty(n, i, j),
                    });
                    if right.better_than(&chart.ir[at]) {
                        chart.ir[at] = right;
                        chart.bp_ir[at] = k;
                    }
                    if i != 0 {
                        let left = inner.plus(Value {
                            score: scores.get(j, i),
                            penalty: arc_penalty(n, j, i),
                        });
                        if left.better_than(&chart.il[at]) {
                            chart.il[at] = left;
                            chart.bp_il[at] = k;
                        }
                    }
                }
                // Complete spans.
                for k in i + 1..=j {
                    let v = chart.ir[chart.idx(i, k)].plus(chart.cr[chart.idx(k, j)]);
                    if v.better_than(&chart.cr[at]) {
                        chart.cr[at] = v;
                        chart.bp_cr[at] = k;
                    }
                }
                for k in i..j {
                    let v = chart.cl[chart.idx(i, k)].plus(chart.il[chart.idx(k, j)]);
                    if v.better_than(&chart.cl[at]) {
                        chart.cl[at] = v;
                        chart.bp_cl[at] = k;
                    }
                }
            }
        }
        chart
    }

    fn extract(&self, kind: Item, i: usize, j: usize, heads: &mut [usize]) {
        if i == j {
            return;
        }
        let at = self.idx(i, j);
        match kind {
            Item::CompleteRight => {
                let k = self.bp_cr[at];
                self.extract(Item::IncompleteRight, i, k, heads);
                self.extract(Item::CompleteRight, k, j, heads);
            }
            Item::CompleteLeft => {
                let k = self.bp_cl[at];
                self.extract(Item::CompleteLeft, i, k, heads);
                self.extract(Item::IncompleteLeft, k, j, heads);
            }
            Item::IncompleteRight => {
                heads[j - 1] = i;
                let k = self.bp_ir[at];
                self.extract(Item::CompleteRight, i, k, heads);
                self.extract(Item::CompleteLeft, k + 1, j, heads);
            }
            Item::IncompleteLeft => {
                heads[i - 1] = j;
                let k = self.bp_il[at];
                self.extract(Item::CompleteRight, i, k, heads);
                self.extract(Item::CompleteLeft, k + 1, j, heads);
            }
        }
    }
}

#[derive(Clone, Copy)]
enum Item {
    CompleteRight,
    CompleteLeft,
    IncompleteRight,
    IncompleteLeft,
}

/// Maximum-score projective tree over the given arc scores.
///
/// With `single_root` exactly one token attaches to position 0; otherwise
/// the root may take several dependents.
pub fn eisner<F: Scalar>(scores: &ArcScoreMatrix<F>, single_root: bool) -> Vec<usize> {
    let n = scores.n();
    assert!(n >= 1, "eisner requires at least one token");
    let mut heads = vec![0usize; n];
    if n == 1 {
        return heads;
    }
    if single_root {
        let chart = Chart::fill(scores, 1, n);
        let mut best = Value::neg_inf();
        let mut best_root = 1;
        for r in 1..=n {
            let v = chart.cl[chart.idx(1, r)]
                .plus(chart.cr[chart.idx(r, n)])
                .plus(Value {
                    score: scores.get(0, r),
                    penalty: arc_penalty(n, 0, r),
                });
            if v.better_than(&best) {
                best = v;
                best_root = r;
            }
        }
        heads[best_root - 1] = 0;
        chart.extract(Item::CompleteLeft, 1, best_root, &mut heads);
        chart.extract(Item::CompleteRight, best_root, n, &mut heads);
    } else {
        let chart = Chart::fill(scores, 0, n);
        chart.extract(Item::CompleteRight, 0, n, &mut heads);
    }
    heads
}

fn heads_form_tree(heads: &[usize], single_root: bool) -> bool {
    let n = heads.len();
    if single_root && heads.iter().filter(|&&h| h == 0).count() != 1 {
        return false;
    }
    // Every token must reach the root without revisiting a node.
    for start in 1..=n {
        let mut cur = start;
        let mut steps = 0;
        while cur != 0 {
            cur = heads[cur - 1];
            steps += 1;
            if steps > n {
                return false;
            }
        }
    }
    true
}

fn heads_projective(heads: &[usize]) -> bool {
    let arcs: Vec<(usize, usize)> = heads
        .iter()
        .enumerate()
        .map(|(i, &h)| (h.min(i + 1), h.max(i + 1)))
        .collect();
    for (x, &(a1, b1)) in arcs.iter().enumerate() {
        for &(a2, b2) in &arcs[x + 1..] {
            let inside = |p: usize, lo: usize, hi: usize| lo < p && p < hi;
            let one_in = inside(a2, a1, b1) != inside(b2, a1, b1);
            let shared = a2 == a1 || a2 == b1 || b2 == a1 || b2 == b1;
            if one_in && !shared {
                return false;
            }
        }
    }
    true
}

/// Exhaustive oracle: enumerates all head assignments in lexicographic
/// order and keeps the first maximum, matching [`eisner`]'s tie-break.
pub fn brute_force_projective<F: Scalar>(
    scores: &ArcScoreMatrix<F>,
    single_root: bool,
) -> Result<Vec<usize>, DecodeError> {
    let n = scores.n();
    if n > 8 {
        return Err(DecodeError::TooLong(n));
    }
    assert!(n >= 1, "brute force requires at least one token");
    let mut assignment = vec![0usize; n];
    let mut best: Option<(F, Vec<usize>)> = None;
    loop {
        let valid = assignment.iter().enumerate().all(|(i, &h)| h != i + 1)
            && heads_form_tree(&assignment, single_root)
            && heads_projective(&assignment);
        if valid {
            let score = scores.tree_score(&assignment);
            if best.as_ref().is_none_or(|(s, _)| score > *s) {
                best = Some((score, assignment.clone()));
            }
        }
        // Advance the odometer; h_1 is the most significant digit so
        // assignments appear in lexicographic order of (h_1, ..., h_n).
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(best.expect("at least one valid tree exists").1);
            }
            if assignment[pos - 1] < n {
                assignment[pos - 1] += 1;
                break;
            }
            assignment[pos - 1] = 0;
            pos -= 1;
        }
    }
}
