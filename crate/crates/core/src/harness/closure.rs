//! Least-squares test that an operator maps a finite function span into itself.

use super::sampling::Sampler;
use crate::error::{Error, Result};
use crate::operator::Operator;
use crate::theta::{SeriesConfig, SymmetricTheta};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

/// Singular values below this fraction of the largest mark the sample matrix
/// as rank deficient.
pub const RANK_TOL: f64 = 1e-10;

/// Outcome of a closure fit `op f_i ≈ Σ_j c_ij f_j`.
#[derive(Clone, Debug, Serialize)]
pub struct ClosureFit {
    /// max_i ‖op f_i − Σ_j c_ij f_j‖ / ‖op f_i‖ over the sample set.
    pub residual: f64,
    /// max_i ‖op f_i‖ / √N, the magnitude the residual is relative to.
    pub scale: f64,
    pub dim: usize,
    pub samples: usize,
    pub attempts: usize,
    /// Index of the basis function with the largest residual.
    pub worst: usize,
    /// Fitted matrix, row i holding the coefficients of op f_i.
    pub matrix: Vec<Vec<[f64; 2]>>,
}

/// Samples `oversample · d` regular points, evaluates the basis and its image
/// under `op`, and solves the column-scaled least-squares problem by SVD.
/// A rank-deficient sample matrix is resampled up to `retries` times.
pub fn fit_closure(
    op: &Operator,
    basis: &[SymmetricTheta],
    tau: C64,
    cfg: &SeriesConfig,
    sampler: &mut Sampler,
    oversample: usize,
    retries: usize,
) -> Result<ClosureFit> {
    let d = op.datum().clone();
    let dim = basis.len();
    let n = (oversample.max(1) * dim).max(dim + 1);
    for attempt in 1..=retries.max(1) {
        let points: Vec<Vec<C64>> = (0..n).map(|_| sampler.regular_point(&d, tau, cfg)).collect::<Result<_>>()?;
        let rows: Vec<(Vec<C64>, Vec<C64>)> = points
            .par_iter()
            .map(|p| {
                let f: Vec<C64> = basis.iter().map(|b| b.eval(p, tau, cfg)).collect::<Result<_>>()?;
                let mut g = vec![C64::new(0.0, 0.0); dim];
                for (h, c) in op.expand_at(p)? {
                    if c == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let q = h.inverse_act_on_point(&d, p, op.kappa());
                    for (gi, b) in g.iter_mut().zip(basis) {
                        *gi += c * b.eval(&q, tau, cfg)?;
                    }
                }
                Ok((f, g))
            })
            .collect::<Result<_>>()?;
        let a = DMatrix::from_fn(n, dim, |r, c| rows[r].0[c]);
        let b = DMatrix::from_fn(n, dim, |r, c| rows[r].1[c]);
        let norms: Vec<f64> = (0..dim).map(|c| a.column(c).norm().max(f64::MIN_POSITIVE)).collect();
        let mut scaled = a.clone();
        for (c, s) in norms.iter().enumerate() {
            scaled.column_mut(c).unscale_mut(*s);
        }
        let svd = scaled.clone().svd(true, true);
        let smax = svd.singular_values.max();
        if svd.singular_values.iter().any(|s| *s <= RANK_TOL * smax) {
            continue;
        }
        let x = svd.solve(&b, RANK_TOL * smax).map_err(|e| Error::Config(e.to_string()))?;
        let fitted = &scaled * &x;
        let mut residual = 0.0f64;
        let mut scale = 0.0f64;
        let mut worst = 0;
        for i in 0..dim {
            let bn = b.column(i).norm();
            let r = (b.column(i) - fitted.column(i)).norm() / bn.max(f64::MIN_POSITIVE);
            if r > residual {
                residual = r;
                worst = i;
            }
            scale = scale.max(bn / (n as f64).sqrt());
        }
        let matrix = (0..dim).map(|i| (0..dim).map(|j| x[(j, i)] / norms[j]).map(|z| [z.re, z.im]).collect()).collect();
        return Ok(ClosureFit { residual, scale, dim, samples: n, attempts: attempt, worst, matrix });
    }
    Err(Error::RankDeficient(retries.max(1)))
}
