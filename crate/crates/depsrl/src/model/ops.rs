//! Small shared tensor operations for the hand-written backward passes.

use ndarray::{Array1, Array2, Axis};

use crate::scalar::Scalar;

/// Row-wise softmax; `-inf` entries come out as exact zeros.
pub fn softmax_rows<F: Scalar>(x: &Array2<F>) -> Array2<F> {
    let mut out = x.clone();
    for mut row in out.rows_mut() {
        let max = row.iter().copied().fold(F::neg_infinity(), F::max);
        if !max.is_finite() {
            row.fill(F::zero());
            continue;
        }
        let mut sum = F::zero();
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
    out
}

/// Backward of row-wise softmax given the probabilities and upstream grad.
pub fn softmax_backward_rows<F: Scalar>(probs: &Array2<F>, dprobs: &Array2<F>) -> Array2<F> {
    let mut out = Array2::zeros(probs.raw_dim());
    for ((mut drow, prow), grow) in out
        .rows_mut()
        .into_iter()
        .zip(probs.rows())
        .zip(dprobs.rows())
    {
        let dot: F = prow.iter().zip(grow.iter()).map(|(&p, &g)| p * g).sum();
        for ((d, &p), &g) in drow.iter_mut().zip(prow.iter()).zip(grow.iter()) {
            *d = p * (g - dot);
        }
    }
    out
}

/// Log-sum-exp of a slice, ignoring `-inf` entries.
pub fn log_sum_exp<F: Scalar>(xs: impl Iterator<Item = F> + Clone) -> F {
    let max = xs.clone().fold(F::neg_infinity(), F::max);
    if !max.is_finite() {
        return F::neg_infinity();
    }
    let sum: F = xs.map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

pub fn relu<F: Scalar>(x: &Array2<F>) -> Array2<F> {
    x.mapv(|v| if v > F::zero() { v } else { F::zero() })
}

pub fn relu_backward<F: Scalar>(x: &Array2<F>, dy: &Array2<F>) -> Array2<F> {
    let mut dx = dy.clone();
    for (d, &v) in dx.iter_mut().zip(x.iter()) {
        if v <= F::zero() {
            *d = F::zero();
        }
    }
    dx
}

pub fn leaky_relu<F: Scalar>(x: &Array2<F>, slope: F) -> Array2<F> {
    x.mapv(|v| if v > F::zero() { v } else { v * slope })
}

pub fn leaky_relu_backward<F: Scalar>(x: &Array2<F>, dy: &Array2<F>, slope: F) -> Array2<F> {
    let mut dx = dy.clone();
    for (d, &v) in dx.iter_mut().zip(x.iter()) {
        if v <= F::zero() {
            *d *= slope;
        }
    }
    dx
}

/// Column sums as a 1 x cols matrix.
pub fn col_sums<F: Scalar>(x: &Array2<F>) -> Array2<F> {
    let sums: Array1<F> = x.sum_axis(Axis(0));
    sums.insert_axis(Axis(0))
}

/// Appends a constant-1 column (the biaffine bias augmentation).
pub fn append_ones<F: Scalar>(x: &Array2<F>) -> Array2<F> {
    let (rows, cols) = x.dim();
    let mut out = Array2::zeros((rows, cols + 1));
    out.slice_mut(ndarray::s![.., ..cols]).assign(x);
    out.column_mut(cols).fill(F::one());
    out
}

/// Drops the trailing bias column of a gradient.
pub fn strip_last_col<F: Scalar>(x: &Array2<F>) -> Array2<F> {
    let (_, cols) = x.dim();
    x.slice(ndarray::s![.., ..cols - 1]).to_owned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn softmax_rows_normalize() {
        let x = array![[0.0f64, 1.0, 2.0], [5.0, 5.0, 5.0]];
        let p = softmax_rows(&x);
        for row in p.rows() {
            let s: f64 = row.sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
        assert!((p[[1, 0]] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn softmax_handles_masked_entries() {
        let x = array![[f64::NEG_INFINITY, 0.0, 0.0]];
        let p = softmax_rows(&x);
        assert_eq!(p[[0, 0]], 0.0);
        assert!((p[[0, 1]] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn append_and_strip_are_inverse() {
        let x = array![[1.0f64, 2.0], [3.0, 4.0]];
        let y = append_ones(&x);
        assert_eq!(y[[0, 2]], 1.0);
        assert_eq!(strip_last_col(&y), x);
    }
}
