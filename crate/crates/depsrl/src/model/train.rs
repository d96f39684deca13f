//! Training loop: adaptive-moment updates with bias correction, global
//! gradient-norm clipping and step-wise learning-rate decay on dev
//! plateaus.

use std::collections::HashMap;

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::params::{HasParams, Param};
use super::{AblationOptions, JointParser, TrainInstance};
use crate::core::AnnotatedSentence;
use crate::error::ModelError;
use crate::eval::srl_prf;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Multiplier applied to the learning rate on a dev plateau.
    pub lr_decay: f64,
    /// Epochs without dev improvement before a decay.
    pub lr_patience: usize,
    /// Training stops once the rate has been lowered this many times and
    /// the next plateau hits.
    pub max_decays: usize,
    pub grad_clip: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub max_epochs: usize,
    pub shuffle_seed: u64,
    pub single_root: bool,
}

impl TrainConfig {
    pub fn desk_scale() -> Self {
        TrainConfig {
            batch_size: 8,
            learning_rate: 1e-3,
            lr_decay: 0.1,
            lr_patience: 5,
            max_decays: 3,
            grad_clip: 5.0,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            max_epochs: 200,
            shuffle_seed: 42,
            single_root: true,
        }
    }

    pub fn paper_scale() -> Self {
        TrainConfig {
            batch_size: 64,
            learning_rate: 1e-4,
            max_epochs: 1000,
            ..Self::desk_scale()
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.grad_clip <= 0.0 {
            return Err(ModelError::Config("grad_clip must be positive".into()));
        }
        if !(0.0 < self.lr_decay && self.lr_decay < 1.0) {
            return Err(ModelError::Config("lr_decay must be in (0, 1)".into()));
        }
        if self.batch_size == 0 || self.max_epochs == 0 {
            return Err(ModelError::Config("batch_size and max_epochs must be positive".into()));
        }
        Ok(())
    }
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self::desk_scale()
    }
}

/// Adaptive-moment optimizer with bias correction; state is keyed by
/// parameter name.
pub struct Adam<F> {
    beta1: F,
    beta2: F,
    epsilon: F,
    step: i32,
    moments: HashMap<String, (Array2<F>, Array2<F>)>,
}

impl<F: Scalar> Adam<F> {
    pub fn new(beta1: f64, beta2: f64, epsilon: f64) -> Self {
        Adam {
            beta1: F::from_real(beta1),
            beta2: F::from_real(beta2),
            epsilon: F::from_real(epsilon),
            step: 0,
            moments: HashMap::new(),
        }
    }

    /// Scales all gradients so their global L2 norm is at most `max_norm`.
    /// Returns the pre-clip norm.
    pub fn clip_global_norm(params: &mut [&mut Param<F>], max_norm: F) -> F {
        let norm_sq: F = params.iter().map(|p| p.grad_norm_sq()).sum();
        let norm = norm_sq.sqrt();
        if norm > max_norm {
            let factor = max_norm / norm;
            for p in params.iter_mut() {
                p.grad.mapv_inplace(|g| g * factor);
            }
        }
        norm
    }

    pub fn step(&mut self, params: &mut [&mut Param<F>], lr: F) {
        self.step += 1;
        let bc1 = F::one() - self.beta1.powi(self.step);
        let bc2 = F::one() - self.beta2.powi(self.step);
        for p in params.iter_mut() {
            let (m, v) = self
                .moments
                .entry(p.name.clone())
                .or_insert_with(|| (Array2::zeros(p.grad.raw_dim()), Array2::zeros(p.grad.raw_dim())));
            for ((m, v), (&g, val)) in m
                .iter_mut()
                .zip(v.iter_mut())
                .zip(p.grad.iter().zip(p.value.iter_mut()))
            {
                *m = self.beta1 * *m + (F::one() - self.beta1) * g;
                *v = self.beta2 * *v + (F::one() - self.beta2) * g * g;
                let mhat = *m / bc1;
                let vhat = *v / bc2;
                *val -= lr * mhat / (vhat.sqrt() + self.epsilon);
            }
            p.zero_grad();
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub mean_loss: f64,
    pub dev_f1: f64,
    pub learning_rate: f64,
    /// Pre-clip global gradient norm of the last batch, for diagnostics.
    pub last_grad_norm: f64,
}

fn snapshot<F: Scalar>(parser: &mut JointParser<F>) -> Vec<Array2<F>> {
    parser.params_mut().iter().map(|p| p.value.clone()).collect()
}

fn restore<F: Scalar>(parser: &mut JointParser<F>, values: &[Array2<F>]) {
    for (p, v) in parser.params_mut().into_iter().zip(values) {
        p.value.assign(v);
    }
}

fn dev_f1<F: Scalar>(
    parser: &JointParser<F>,
    dev: &[AnnotatedSentence],
    single_root: bool,
) -> f64 {
    let gold: Vec<_> = dev.iter().map(|s| s.frames.clone()).collect();
    let predicted: Vec<_> = dev
        .iter()
        .map(|s| {
            parser
                .predict_sentence(s, single_root, AblationOptions::default())
                .frames
        })
        .collect();
    srl_prf(&gold, &predicted).f1
}

/// Trains in place and returns per-epoch metrics. The parameters giving
/// the best dev F1 are restored at the end.
pub fn train<F: Scalar>(
    parser: &mut JointParser<F>,
    train_corpus: &[AnnotatedSentence],
    dev_corpus: &[AnnotatedSentence],
    config: &TrainConfig,
) -> Result<Vec<EpochMetrics>, ModelError> {
    config.validate()?;
    if train_corpus.is_empty() {
        return Err(ModelError::EmptyCorpus);
    }
    let instances: Vec<TrainInstance<F>> = train_corpus
        .iter()
        .map(|s| parser.prepare_instance(s))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.shuffle_seed);
    let mut adam = Adam::new(config.beta1, config.beta2, config.epsilon);
    let clip = F::from_real(config.grad_clip);
    let mut lr = config.learning_rate;
    let mut best = f64::NEG_INFINITY;
    let mut best_params = snapshot(parser);
    let mut stale_epochs = 0usize;
    let mut decays = 0usize;
    let mut metrics = Vec::new();

    for epoch in 1..=config.max_epochs {
        let mut order: Vec<usize> = (0..instances.len()).collect();
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        let mut last_grad_norm = 0.0;
        for batch in order.chunks(config.batch_size) {
            for p in parser.params_mut() {
                p.zero_grad();
            }
            let scale = F::from_real(1.0 / batch.len() as f64);
            for &idx in batch {
                epoch_loss += parser.loss_backward(&instances[idx], scale).to_f64();
            }
            let mut params = parser.params_mut();
            last_grad_norm = Adam::clip_global_norm(&mut params, clip).to_f64();
            adam.step(&mut params, F::from_real(lr));
        }
        let f1 = dev_f1(parser, dev_corpus, config.single_root);
        metrics.push(EpochMetrics {
            epoch,
            mean_loss: epoch_loss / instances.len() as f64,
            dev_f1: f1,
            learning_rate: lr,
            last_grad_norm,
        });
        if f1 > best + 1e-9 {
            best = f1;
            best_params = snapshot(parser);
            stale_epochs = 0;
        } else {
            stale_epochs += 1;
            if stale_epochs > config.lr_patience {
                if decays >= config.max_decays {
                    break;
                }
                lr *= config.lr_decay;
                decays += 1;
                stale_epochs = 0;
            }
        }
    }
    restore(parser, &best_params);
    Ok(metrics)
}
