//! Named parameter tensors with accumulated gradients.

use ndarray::Array2;
use rand::distributions::{Distribution, Uniform};
use rand::Rng;

use crate::scalar::Scalar;

/// A trainable tensor. Gradients accumulate across a minibatch and are
/// cleared by the optimizer step.
#[derive(Debug, Clone)]
pub struct Param<F> {
    pub name: String,
    pub value: Array2<F>,
    pub grad: Array2<F>,
}

impl<F: Scalar> Param<F> {
    pub fn zeros(name: impl Into<String>, rows: usize, cols: usize) -> Self {
        let name = name.into();
        Param {
            name,
            value: Array2::zeros((rows, cols)),
            grad: Array2::zeros((rows, cols)),
        }
    }

    pub fn constant(name: impl Into<String>, rows: usize, cols: usize, v: f64) -> Self {
        let mut p = Self::zeros(name, rows, cols);
        p.value.fill(F::from_real(v));
        p
    }

    /// Uniform init in `(-scale, scale)`.
    pub fn uniform(
        name: impl Into<String>,
        rows: usize,
        cols: usize,
        scale: f64,
        rng: &mut impl Rng,
    ) -> Self {
        let mut p = Self::zeros(name, rows, cols);
        let dist = Uniform::new(-scale, scale);
        for v in p.value.iter_mut() {
            *v = F::from_real(dist.sample(rng));
        }
        p
    }

    /// Init scaled by fan-in and fan-out.
    pub fn glorot(name: impl Into<String>, rows: usize, cols: usize, rng: &mut impl Rng) -> Self {
        let scale = (6.0 / (rows + cols) as f64).sqrt();
        Self::uniform(name, rows, cols, scale, rng)
    }

    pub fn zero_grad(&mut self) {
        self.grad.fill(F::zero());
    }

    pub fn grad_norm_sq(&self) -> F {
        self.grad.iter().map(|&g| g * g).sum()
    }
}

/// Everything that exposes its parameters to the optimizer, the gradient
/// checker and the checkpoint writer. Visit order must be deterministic.
pub trait HasParams<F: Scalar> {
    fn visit_params<'a>(&'a mut self, out: &mut Vec<&'a mut Param<F>>);

    fn params_mut(&mut self) -> Vec<&mut Param<F>> {
        let mut out = Vec::new();
        self.visit_params(&mut out);
        out
    }
}
