//! Finite-difference verification of the hand-written backward passes.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::params::HasParams;
use super::{JointParser, TrainInstance};

/// Per-group and overall maxima of the relative error between analytic
/// and central-finite-difference gradients.
#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub groups: BTreeMap<String, f64>,
    pub max_relative_error: f64,
    pub checked_entries: usize,
}

fn group_of(name: &str) -> String {
    let top = name.split('.').next().unwrap_or(name);
    if top.starts_with("layer") {
        if name.contains(".attn.") {
            "attention".into()
        } else if name.contains(".ffn.") {
            "feedforward".into()
        } else {
            "layernorm".into()
        }
    } else if top == "embed" {
        "embeddings".into()
    } else if name.ends_with(".u") {
        "bilinear_tensors".into()
    } else {
        "scorer_mlps".into()
    }
}

/// Relative error with a unit floor, so tiny absolute deviations on tiny
/// gradients do not blow up.
fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / f64::max(1.0, analytic.abs() + numeric.abs())
}

/// Compares analytic gradients of the total loss against central finite
/// differences on `samples_per_param` randomly chosen entries of every
/// parameter tensor. Runs at f64; `epsilon` is the half step.
pub fn grad_check(
    parser: &mut JointParser<f64>,
    instance: &TrainInstance<f64>,
    samples_per_param: usize,
    epsilon: f64,
    seed: u64,
) -> GradCheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for p in parser.params_mut() {
        p.zero_grad();
    }
    parser.loss_backward(instance, 1.0);
    let analytic: Vec<(String, ndarray::Array2<f64>)> = parser
        .params_mut()
        .iter()
        .map(|p| (p.name.clone(), p.grad.clone()))
        .collect();

    // Pick the entries to probe up front; names keep the report grouped.
    let mut probes: Vec<(usize, usize, usize)> = Vec::new(); // (param idx, row, col)
    {
        let params = parser.params_mut();
        for (pi, p) in params.iter().enumerate() {
            let (rows, cols) = p.value.dim();
            let mut cells: Vec<(usize, usize)> = (0..rows)
                .flat_map(|r| (0..cols).map(move |c| (r, c)))
                .collect();
            cells.shuffle(&mut rng);
            for &(r, c) in cells.iter().take(samples_per_param.min(cells.len())) {
                probes.push((pi, r, c));
            }
        }
    }

    let mut groups: BTreeMap<String, f64> = BTreeMap::new();
    let mut max_err = 0.0f64;
    let mut checked = 0usize;
    for (pi, r, c) in probes {
        let original = {
            let mut params = parser.params_mut();
            let p = &mut params[pi];
            let orig = p.value[[r, c]];
            p.value[[r, c]] = orig + epsilon;
            orig
        };
        let up = parser.loss_only(instance);
        {
            let mut params = parser.params_mut();
            params[pi].value[[r, c]] = original - epsilon;
        }
        let down = parser.loss_only(instance);
        {
            let mut params = parser.params_mut();
            params[pi].value[[r, c]] = original;
        }
        let numeric = (up - down) / (2.0 * epsilon);
        let a = analytic[pi].1[[r, c]];
        let err = relative_error(a, numeric);
        let entry = groups.entry(group_of(&analytic[pi].0)).or_insert(0.0);
        *entry = entry.max(err);
        max_err = max_err.max(err);
        checked += 1;
    }
    GradCheckReport {
        groups,
        max_relative_error: max_err,
        checked_entries: checked,
    }
}
