//! Deep biaffine scoring: per-side MLPs with a bias-1 augmentation feeding
//! a bilinear tensor, `z_k = [MLP_I(x_i);1]^T U_k [MLP_J(x_j);1]`.

use ndarray::{s, Array1, Array2};
use rand::Rng;

use super::ops::{append_ones, leaky_relu, leaky_relu_backward, strip_last_col};
use super::params::{HasParams, Param};
use crate::scalar::Scalar;

/// One hidden layer with a leaky rectifier, sized to the biaffine side
/// dimensionality.
#[derive(Debug, Clone)]
pub struct Mlp<F> {
    lin1: super::encoder::Linear<F>,
    lin2: super::encoder::Linear<F>,
    slope: F,
}

pub struct MlpCache<F> {
    x: Array2<F>,
    pre: Array2<F>,
    post: Array2<F>,
}

impl<F: Scalar> Mlp<F> {
    pub fn new(name: &str, input: usize, output: usize, slope: f64, rng: &mut impl Rng) -> Self {
        Mlp {
            lin1: super::encoder::Linear::new(&format!("{name}.lin1"), input, output, rng),
            lin2: super::encoder::Linear::new(&format!("{name}.lin2"), output, output, rng),
            slope: F::from_real(slope),
        }
    }

    pub fn forward(&self, x: &Array2<F>) -> (Array2<F>, MlpCache<F>) {
        let pre = self.lin1.forward(x);
        let post = leaky_relu(&pre, self.slope);
        let out = self.lin2.forward(&post);
        (
            out,
            MlpCache {
                x: x.clone(),
                pre,
                post,
            },
        )
    }

    pub fn backward(&mut self, cache: &MlpCache<F>, dy: &Array2<F>) -> Array2<F> {
        let dpost = self.lin2.backward(&cache.post, dy);
        let dpre = leaky_relu_backward(&cache.pre, &dpost, self.slope);
        self.lin1.backward(&cache.x, &dpre)
    }
}

impl<F: Scalar> HasParams<F> for Mlp<F> {
    fn visit_params<'a>(&'a mut self, out: &mut Vec<&'a mut Param<F>>) {
        self.lin1.visit_params(out);
        self.lin2.visit_params(out);
    }
}

/// A deep biaffine scorer with `r` output dimensions. The bilinear tensor
/// is stored as `r` stacked `(d+1) x (d+1)` blocks.
#[derive(Debug, Clone)]
pub struct DbaScorer<F> {
    pub mlp_i: Mlp<F>,
    pub mlp_j: Mlp<F>,
    pub u: Param<F>,
    pub r: usize,
    pub d: usize,
}

pub struct PairCache<F> {
    mlp_i: MlpCache<F>,
    mlp_j: MlpCache<F>,
    a: Array2<F>,
    b: Array2<F>,
    head_rows: Option<Vec<usize>>,
    dep_rows: Option<Vec<usize>>,
}

impl<F: Scalar> DbaScorer<F> {
    pub fn new(name: &str, model_dim: usize, d: usize, r: usize, slope: f64, rng: &mut impl Rng) -> Self {
        DbaScorer {
            mlp_i: Mlp::new(&format!("{name}.mlp_i"), model_dim, d, slope, rng),
            mlp_j: Mlp::new(&format!("{name}.mlp_j"), model_dim, d, slope, rng),
            u: Param::uniform(format!("{name}.u"), r * (d + 1), d + 1, 0.1, rng),
            r,
            d,
        }
    }

    fn u_block(&self, k: usize) -> ndarray::ArrayView2<'_, F> {
        self.u.value.slice(s![k * (self.d + 1)..(k + 1) * (self.d + 1), ..])
    }

    /// The cited bilinear form for a single ordered vector pair; used
    /// directly by tests as the reference semantics of the scorer.
    pub fn score_pair(&self, xi: &Array1<F>, xj: &Array1<F>) -> Array1<F> {
        let xi = xi.clone().insert_axis(ndarray::Axis(0));
        let xj = xj.clone().insert_axis(ndarray::Axis(0));
        let (fi, _) = self.mlp_i.forward(&xi);
        let (fj, _) = self.mlp_j.forward(&xj);
        let a = append_ones(&fi);
        let b = append_ones(&fj);
        let mut out = Array1::zeros(self.r);
        for k in 0..self.r {
            let ub = self.u_block(k).dot(&b.row(0));
            out[k] = a.row(0).dot(&ub);
        }
        out
    }

    /// Scores every ordered pair of rows of `h`: `z[i, j]` is output `0`
    /// for the pair (i, j). Only meaningful for `r = 1` (attachment).
    pub fn score_all_pairs(&self, h: &Array2<F>) -> (Array2<F>, PairCache<F>) {
        assert_eq!(self.r, 1, "full pair scoring is for the attachment scorer");
        let (fi, ci) = self.mlp_i.forward(h);
        let (fj, cj) = self.mlp_j.forward(h);
        let a = append_ones(&fi);
        let b = append_ones(&fj);
        let z = a.dot(&self.u_block(0)).dot(&b.t());
        (
            z,
            PairCache {
                mlp_i: ci,
                mlp_j: cj,
                a,
                b,
                head_rows: None,
                dep_rows: None,
            },
        )
    }

    /// Backward of [`score_all_pairs`]; returns the gradient wrt `h`.
    pub fn backward_all_pairs(&mut self, cache: &PairCache<F>, dz: &Array2<F>) -> Array2<F> {
        let u0 = self.u_block(0).to_owned();
        let da = dz.dot(&cache.b).dot(&u0.t());
        let db = dz.t().dot(&cache.a).dot(&u0);
        {
            let du = cache.a.t().dot(dz).dot(&cache.b);
            let mut block = self
                .u
                .grad
                .slice_mut(s![0..self.d + 1, ..]);
            block += &du;
        }
        let dfi = strip_last_col(&da);
        let dfj = strip_last_col(&db);
        let dh_i = self.mlp_i.backward(&cache.mlp_i, &dfi);
        let dh_j = self.mlp_j.backward(&cache.mlp_j, &dfj);
        dh_i + dh_j
    }

    /// Scores the pairs `(head_rows[t], dep_rows[t])`; `z[t, k]` is output
    /// `k` for pair `t`.
    pub fn score_indexed_pairs(
        &self,
        h: &Array2<F>,
        head_rows: &[usize],
        dep_rows: &[usize],
    ) -> (Array2<F>, PairCache<F>) {
        assert_eq!(head_rows.len(), dep_rows.len());
        let gather = |rows: &[usize]| {
            let mut out = Array2::zeros((rows.len(), h.ncols()));
            for (t, &row) in rows.iter().enumerate() {
                out.row_mut(t).assign(&h.row(row));
            }
            out
        };
        let (fi, ci) = self.mlp_i.forward(&gather(head_rows));
        let (fj, cj) = self.mlp_j.forward(&gather(dep_rows));
        let a = append_ones(&fi);
        let b = append_ones(&fj);
        let mut z = Array2::zeros((head_rows.len(), self.r));
        for k in 0..self.r {
            let m = a.dot(&self.u_block(k));
            for t in 0..head_rows.len() {
                z[[t, k]] = m.row(t).dot(&b.row(t));
            }
        }
        (
            z,
            PairCache {
                mlp_i: ci,
                mlp_j: cj,
                a,
                b,
                head_rows: Some(head_rows.to_vec()),
                dep_rows: Some(dep_rows.to_vec()),
            },
        )
    }

    /// Backward of [`score_indexed_pairs`], scattering into an `h`-shaped
    /// gradient.
    pub fn backward_indexed_pairs(
        &mut self,
        cache: &PairCache<F>,
        dz: &Array2<F>,
        dh: &mut Array2<F>,
    ) {
        let pairs = cache.a.nrows();
        let mut da: Array2<F> = Array2::zeros(cache.a.raw_dim());
        let mut db: Array2<F> = Array2::zeros(cache.b.raw_dim());
        for k in 0..self.r {
            let uk = self.u_block(k).to_owned();
            let dzk: Vec<F> = (0..pairs).map(|t| dz[[t, k]]).collect();
            // dU_k += sum_t dz[t,k] * outer(a_t, b_t)
            let mut weighted_a = cache.a.clone();
            for (t, mut row) in weighted_a.rows_mut().into_iter().enumerate() {
                row *= dzk[t];
            }
            let du = weighted_a.t().dot(&cache.b);
            let mut block = self
                .u
                .grad
                .slice_mut(s![k * (self.d + 1)..(k + 1) * (self.d + 1), ..]);
            block += &du;
            // dA += dz[:,k] * (B U_k^T), dB += dz[:,k] * (A U_k)
            let bu = cache.b.dot(&uk.t());
            let au = cache.a.dot(&uk);
            for t in 0..pairs {
                let mut ra = da.row_mut(t);
                ra.scaled_add(dzk[t], &bu.row(t));
                let mut rb = db.row_mut(t);
                rb.scaled_add(dzk[t], &au.row(t));
            }
        }
        let dfi = strip_last_col(&da);
        let dfj = strip_last_col(&db);
        let dgi = self.mlp_i.backward(&cache.mlp_i, &dfi);
        let dgj = self.mlp_j.backward(&cache.mlp_j, &dfj);
        let heads = cache.head_rows.as_ref().expect("indexed cache");
        let deps = cache.dep_rows.as_ref().expect("indexed cache");
        for (t, &row) in heads.iter().enumerate() {
            let mut r = dh.row_mut(row);
            r += &dgi.row(t);
        }
        for (t, &row) in deps.iter().enumerate() {
            let mut r = dh.row_mut(row);
            r += &dgj.row(t);
        }
    }
}

impl<F: Scalar> HasParams<F> for DbaScorer<F> {
    fn visit_params<'a>(&'a mut self, out: &mut Vec<&'a mut Param<F>>) {
        self.mlp_i.visit_params(out);
        self.mlp_j.visit_params(out);
        out.push(&mut self.u);
    }
}
