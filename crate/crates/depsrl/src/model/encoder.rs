//! The context-sensitive token encoder: embedding concatenation, input
//! projection and a stack of self-attention + feed-forward layers, with
//! hand-written backward passes throughout. Row 0 of every activation
//! matrix is the root position.

use ndarray::{s, Array2};
use rand::Rng;

use super::ops::{
    col_sums, relu, relu_backward, softmax_backward_rows, softmax_rows,
};
use super::params::{HasParams, Param};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct Linear<F> {
    pub w: Param<F>,
    pub b: Param<F>,
}

impl<F: Scalar> Linear<F> {
    pub fn new(name: &str, input: usize, output: usize, rng: &mut impl Rng) -> Self {
        Linear {
            w: Param::glorot(format!("{name}.w"), input, output, rng),
            b: Param::zeros(format!("{name}.b"), 1, output),
        }
    }

    pub fn forward(&self, x: &Array2<F>) -> Array2<F> {
        x.dot(&self.w.value) + &self.b.value
    }

    /// Accumulates weight gradients and returns the input gradient.
    pub fn backward(&mut self, x: &Array2<F>, dy: &Array2<F>) -> Array2<F> {
        self.w.grad = &self.w.grad + &x.t().dot(dy);
        self.b.grad = &self.b.grad + &col_sums(dy);
        dy.dot(&self.w.value.t())
    }
}

impl<F: Scalar> HasParams<F> for Linear<F> {
    fn visit_params<'a>(&'a mut self, out: &mut Vec<&'a mut Param<F>>) {
        out.push(&mut self.w);
        out.push(&mut self.b);
    }
}

#[derive(Debug, Clone)]
pub struct LayerNorm<F> {
    pub gamma: Param<F>,
    pub beta: Param<F>,
    eps: F,
}

pub struct LayerNormCache<F> {
    normed: Array2<F>,
    inv_std: Vec<F>,
}

impl<F: Scalar> LayerNorm<F> {
    pub fn new(name: &str, dim: usize) -> Self {
        LayerNorm {
            gamma: Param::constant(format!("{name}.gamma"), 1, dim, 1.0),
            beta: Param::zeros(format!("{name}.beta"), 1, dim),
            eps: F::from_real(1e-6),
        }
    }

    pub fn forward(&self, x: &Array2<F>) -> (Array2<F>, LayerNormCache<F>) {
        let (rows, dim) = x.dim();
        let denom = F::from_real(dim as f64);
        let mut normed = Array2::zeros((rows, dim));
        let mut inv_std = Vec::with_capacity(rows);
        for (mut out_row, row) in normed.rows_mut().into_iter().zip(x.rows()) {
            let mean = row.sum() / denom;
            let var = row.iter().map(|&v| (v - mean) * (v - mean)).sum::<F>() / denom;
            let istd = F::one() / (var + self.eps).sqrt();
            inv_std.push(istd);
            for (o, &v) in out_row.iter_mut().zip(row.iter()) {
                *o = (v - mean) * istd;
            }
        }
        let y = &normed * &self.gamma.value + &self.beta.value;
        (y, LayerNormCache { normed, inv_std })
    }

    pub fn backward(&mut self, cache: &LayerNormCache<F>, dy: &Array2<F>) -> Array2<F> {
        let (rows, dim) = dy.dim();
        let denom = F::from_real(dim as f64);
        self.gamma.grad = &self.gamma.grad + &col_sums(&(dy * &cache.normed));
        self.beta.grad = &self.beta.grad + &col_sums(dy);
        let mut dx = Array2::zeros((rows, dim));
        for i in 0..rows {
            let istd = cache.inv_std[i];
            let dnormed: Vec<F> = (0..dim)
                .map(|j| dy[[i, j]] * self.gamma.value[[0, j]])
                .collect();
            let mean_d: F = dnormed.iter().copied().sum::<F>() / denom;
            let mean_dn: F = dnormed
                .iter()
                .enumerate()
                .map(|(j, &d)| d * cache.normed[[i, j]])
                .sum::<F>()
                / denom;
            for j in 0..dim {
                dx[[i, j]] = (dnormed[j] - mean_d - cache.normed[[i, j]] * mean_dn) * istd;
            }
        }
        dx
    }
}

impl<F: Scalar> HasParams<F> for LayerNorm<F> {
    fn visit_params<'a>(&'a mut self, out: &mut Vec<&'a mut Param<F>>) {
        out.push(&mut self.gamma);
        out.push(&mut self.beta);
    }
}

#[derive(Debug, Clone)]
pub struct MultiHeadAttention<F> {
    wq: Linear<F>,
    wk: Linear<F>,
    wv: Linear<F>,
    wo: Linear<F>,
    heads: usize,
}

pub struct AttentionCache<F> {
    x: Array2<F>,
    q: Array2<F>,
    k: Array2<F>,
    v: Array2<F>,
    probs: Vec<Array2<F>>,
    ctx: Array2<F>,
}

impl<F: Scalar> MultiHeadAttention<F> {
    pub fn new(name: &str, dim: usize, heads: usize, rng: &mut impl Rng) -> Self {
        assert!(heads > 0 && dim.is_multiple_of(heads), "heads must divide model_dim");
        MultiHeadAttention {
            wq: Linear::new(&format!("{name}.wq"), dim, dim, rng),
            wk: Linear::new(&format!("{name}.wk"), dim, dim, rng),
            wv: Linear::new(&format!("{name}.wv"), dim, dim, rng),
            wo: Linear::new(&format!("{name}.wo"), dim, dim, rng),
            heads,
        }
    }

    pub fn forward(&self, x: &Array2<F>) -> (Array2<F>, AttentionCache<F>) {
        let (rows, dim) = x.dim();
        let dk = dim / self.heads;
        let scale = F::from_real(1.0 / (dk as f64).sqrt());
        let q = self.wq.forward(x);
        let k = self.wk.forward(x);
        let v = self.wv.forward(x);
        let mut ctx = Array2::zeros((rows, dim));
        let mut probs = Vec::with_capacity(self.heads);
        for h in 0..self.heads {
            let cols = s![.., h * dk..(h + 1) * dk];
            let qh = q.slice(cols);
            let kh = k.slice(cols);
            let vh = v.slice(cols);
            let scores = qh.dot(&kh.t()).mapv(|s| s * scale);
            let p = softmax_rows(&scores);
            let ch = p.dot(&vh);
            ctx.slice_mut(cols).assign(&ch);
            probs.push(p);
        }
        let out = self.wo.forward(&ctx);
        (
            out,
            AttentionCache {
                x: x.clone(),
                q,
                k,
                v,
                probs,
                ctx,
            },
        )
    }

    pub fn backward(&mut self, cache: &AttentionCache<F>, dout: &Array2<F>) -> Array2<F> {
        let (rows, dim) = cache.x.dim();
        let dk = dim / self.heads;
        let scale = F::from_real(1.0 / (dk as f64).sqrt());
        let dctx = self.wo.backward(&cache.ctx, dout);
        let mut dq = Array2::zeros((rows, dim));
        let mut dkm = Array2::zeros((rows, dim));
        let mut dv = Array2::zeros((rows, dim));
        for h in 0..self.heads {
            let cols = s![.., h * dk..(h + 1) * dk];
            let qh = cache.q.slice(cols).to_owned();
            let kh = cache.k.slice(cols).to_owned();
            let vh = cache.v.slice(cols).to_owned();
            let p = &cache.probs[h];
            let dch = dctx.slice(cols).to_owned();
            let dp = dch.dot(&vh.t());
            let dvh = p.t().dot(&dch);
            let dscores = softmax_backward_rows(p, &dp).mapv(|v| v * scale);
            let dqh = dscores.dot(&kh);
            let dkh = dscores.t().dot(&qh);
            dq.slice_mut(cols).assign(&dqh);
            dkm.slice_mut(cols).assign(&dkh);
            dv.slice_mut(cols).assign(&dvh);
        }
        let mut dx = self.wq.backward(&cache.x, &dq);
        dx = dx + self.wk.backward(&cache.x, &dkm);
        dx = dx + self.wv.backward(&cache.x, &dv);
        dx
    }
}

impl<F: Scalar> HasParams<F> for MultiHeadAttention<F> {
    fn visit_params<'a>(&'a mut self, out: &mut Vec<&'a mut Param<F>>) {
        self.wq.visit_params(out);
        self.wk.visit_params(out);
        self.wv.visit_params(out);
        self.wo.visit_params(out);
    }
}

#[derive(Debug, Clone)]
pub struct FeedForward<F> {
    lin1: Linear<F>,
    lin2: Linear<F>,
}

pub struct FeedForwardCache<F> {
    x: Array2<F>,
    pre: Array2<F>,
    post: Array2<F>,
}

impl<F: Scalar> FeedForward<F> {
    pub fn new(name: &str, dim: usize, hidden: usize, rng: &mut impl Rng) -> Self {
        FeedForward {
            lin1: Linear::new(&format!("{name}.lin1"), dim, hidden, rng),
            lin2: Linear::new(&format!("{name}.lin2"), hidden, dim, rng),
        }
    }

    pub fn forward(&self, x: &Array2<F>) -> (Array2<F>, FeedForwardCache<F>) {
        let pre = self.lin1.forward(x);
        let post = relu(&pre);
        let out = self.lin2.forward(&post);
        (
            out,
            FeedForwardCache {
                x: x.clone(),
                pre,
                post,
            },
        )
    }

    pub fn backward(&mut self, cache: &FeedForwardCache<F>, dy: &Array2<F>) -> Array2<F> {
        let dpost = self.lin2.backward(&cache.post, dy);
        let dpre = relu_backward(&cache.pre, &dpost);
        self.lin1.backward(&cache.x, &dpre)
    }
}

impl<F: Scalar> HasParams<F> for FeedForward<F> {
    fn visit_params<'a>(&'a mut self, out: &mut Vec<&'a mut Param<F>>) {
        self.lin1.visit_params(out);
        self.lin2.visit_params(out);
    }
}

/// One post-norm encoder layer.
#[derive(Debug, Clone)]
pub struct EncoderLayer<F> {
    attn: MultiHeadAttention<F>,
    ln1: LayerNorm<F>,
    ffn: FeedForward<F>,
    ln2: LayerNorm<F>,
}

pub struct EncoderLayerCache<F> {
    attn: AttentionCache<F>,
    ln1: LayerNormCache<F>,
    ffn: FeedForwardCache<F>,
    ln2: LayerNormCache<F>,
}

impl<F: Scalar> EncoderLayer<F> {
    pub fn new(name: &str, dim: usize, heads: usize, ffn_dim: usize, rng: &mut impl Rng) -> Self {
        EncoderLayer {
            attn: MultiHeadAttention::new(&format!("{name}.attn"), dim, heads, rng),
            ln1: LayerNorm::new(&format!("{name}.ln1"), dim),
            ffn: FeedForward::new(&format!("{name}.ffn"), dim, ffn_dim, rng),
            ln2: LayerNorm::new(&format!("{name}.ln2"), dim),
        }
    }

    pub fn forward(&self, x: &Array2<F>) -> (Array2<F>, EncoderLayerCache<F>) {
        let (a, attn_cache) = self.attn.forward(x);
        let (x1, ln1_cache) = self.ln1.forward(&(x + &a));
        let (f, ffn_cache) = self.ffn.forward(&x1);
        let (x2, ln2_cache) = self.ln2.forward(&(&x1 + &f));
        (
            x2,
            EncoderLayerCache {
                attn: attn_cache,
                ln1: ln1_cache,
                ffn: ffn_cache,
                ln2: ln2_cache,
            },
        )
    }

    pub fn backward(&mut self, cache: &EncoderLayerCache<F>, dy: &Array2<F>) -> Array2<F> {
        let dr2 = self.ln2.backward(&cache.ln2, dy);
        let dx1 = &dr2 + &self.ffn.backward(&cache.ffn, &dr2);
        let dr1 = self.ln1.backward(&cache.ln1, &dx1);
        &dr1 + &self.attn.backward(&cache.attn, &dr1)
    }
}

impl<F: Scalar> HasParams<F> for EncoderLayer<F> {
    fn visit_params<'a>(&'a mut self, out: &mut Vec<&'a mut Param<F>>) {
        self.attn.visit_params(out);
        self.ln1.visit_params(out);
        self.ffn.visit_params(out);
        self.ln2.visit_params(out);
    }
}

/// Input embeddings: word + optional external vectors + predicate
/// indicator + learned positions, concatenated and projected to the model
/// dimension.
#[derive(Debug, Clone)]
pub struct Embeddings<F> {
    pub word: Param<F>,
    pub indicator: Param<F>,
    pub positional: Param<F>,
    pub proj: Linear<F>,
    external_dim: usize,
}

pub struct EmbedCache<F> {
    word_ids: Vec<usize>,
    flags: Vec<bool>,
    x0: Array2<F>,
}

impl<F: Scalar> Embeddings<F> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        vocab_size: usize,
        word_dim: usize,
        external_dim: usize,
        indicator_dim: usize,
        positional_dim: usize,
        max_positions: usize,
        model_dim: usize,
        rng: &mut impl Rng,
    ) -> Self {
        let input_dim = word_dim + external_dim + indicator_dim + positional_dim;
        Embeddings {
            word: Param::uniform("embed.word", vocab_size, word_dim, 0.1, rng),
            indicator: Param::uniform("embed.indicator", 2, indicator_dim, 0.1, rng),
            positional: Param::uniform("embed.positional", max_positions, positional_dim, 0.1, rng),
            proj: Linear::new("embed.proj", input_dim, model_dim, rng),
            external_dim,
        }
    }

    /// `word_ids` and `flags` include position 0 (the root).
    pub fn forward(
        &self,
        word_ids: &[usize],
        flags: &[bool],
        external: Option<&Array2<F>>,
    ) -> (Array2<F>, EmbedCache<F>) {
        let rows = word_ids.len();
        let wd = self.word.value.ncols();
        let id_ = self.indicator.value.ncols();
        let pd = self.positional.value.ncols();
        let max_pos = self.positional.value.nrows();
        let din = wd + self.external_dim + id_ + pd;
        let mut x0 = Array2::zeros((rows, din));
        for t in 0..rows {
            x0.slice_mut(s![t, ..wd]).assign(&self.word.value.row(word_ids[t]));
            if self.external_dim > 0 {
                if let Some(ext) = external {
                    x0.slice_mut(s![t, wd..wd + self.external_dim])
                        .assign(&ext.row(t));
                }
            }
            let flag = usize::from(flags[t]);
            x0.slice_mut(s![t, wd + self.external_dim..wd + self.external_dim + id_])
                .assign(&self.indicator.value.row(flag));
            let pos = t.min(max_pos - 1);
            x0.slice_mut(s![t, din - pd..])
                .assign(&self.positional.value.row(pos));
        }
        let x = self.proj.forward(&x0);
        (
            x,
            EmbedCache {
                word_ids: word_ids.to_vec(),
                flags: flags.to_vec(),
                x0,
            },
        )
    }

    pub fn backward(&mut self, cache: &EmbedCache<F>, dx: &Array2<F>) {
        let dx0 = self.proj.backward(&cache.x0, dx);
        let wd = self.word.value.ncols();
        let id_ = self.indicator.value.ncols();
        let pd = self.positional.value.ncols();
        let din = dx0.ncols();
        let max_pos = self.positional.value.nrows();
        for t in 0..cache.word_ids.len() {
            let dword = dx0.slice(s![t, ..wd]);
            let mut row = self.word.grad.row_mut(cache.word_ids[t]);
            row += &dword;
            let flag = usize::from(cache.flags[t]);
            let dind = dx0.slice(s![t, wd + self.external_dim..wd + self.external_dim + id_]);
            let mut row = self.indicator.grad.row_mut(flag);
            row += &dind;
            let pos = t.min(max_pos - 1);
            let dpos = dx0.slice(s![t, din - pd..]);
            let mut row = self.positional.grad.row_mut(pos);
            row += &dpos;
        }
    }
}

impl<F: Scalar> HasParams<F> for Embeddings<F> {
    fn visit_params<'a>(&'a mut self, out: &mut Vec<&'a mut Param<F>>) {
        out.push(&mut self.word);
        out.push(&mut self.indicator);
        out.push(&mut self.positional);
        self.proj.visit_params(out);
    }
}
