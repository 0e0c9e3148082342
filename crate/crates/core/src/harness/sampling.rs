//! Seeded sampling of points, spectral parameters and test functions.

use crate::error::{Error, Result};
use crate::linalg::{self, Q, QVec};
use crate::operator::Context;
use crate::root_system::{n_alpha_table, AffineRoot, RootDatum};
use crate::theta::{jacobi_theta, theta1_prime_zero_classical, SeriesConfig};
use crate::weyl::finite_weyl_group;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Distance (relative |ϑ_1| scale) kept from ϑ_1 zeros when sampling.
pub const POLE_MARGIN: f64 = 0.05;

/// Deterministic sampler over a ChaCha stream.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    /// Uniform integer in `lo..=hi`.
    pub fn integer(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn complex(&mut self, scale: f64) -> C64 {
        C64::new(self.uniform(-scale, scale), self.uniform(-scale, scale))
    }

    /// A point with Re in [0,1) and |Im| ≤ 0.45 Im τ in each ᾱ-coordinate.
    pub fn point(&mut self, l: usize, tau: C64) -> Vec<C64> {
        let b = 0.45 * tau.im;
        (0..l).map(|_| C64::new(self.uniform(0.0, 1.0), self.uniform(-b, b))).collect()
    }

    /// A point keeping every z_α (finite roots, δ-free) away from ϑ_1 zeros
    /// of the relevant moduli by `POLE_MARGIN`.
    pub fn regular_point(&mut self, d: &RootDatum, tau: C64, cfg: &SeriesConfig) -> Result<Vec<C64>> {
        for _ in 0..1000 {
            let p = self.point(d.l, tau);
            let mut ok = true;
            for a in d.root_directions() {
                let z = d.pair_point(&a, &p);
                if !(far_from_zeros(z, tau, cfg)? && far_from_zeros(2.0 * z, 2.0 * tau, cfg)?) {
                    ok = false;
                    break;
                }
            }
            if ok {
                return Ok(p);
            }
        }
        Err(Error::Pole { magnitude: 0.0, guard: POLE_MARGIN })
    }

    /// A generic spectral parameter: every ⟨ξ,α^∨⟩, scaled as in the H slots,
    /// stays away from 0 and ±μ_α modulo the period lattice.
    pub fn generic_xi(&mut self, ctx: &Context) -> Result<Vec<C64>> {
        let d = &*ctx.datum;
        for _ in 0..1000 {
            let xi: Vec<C64> = (0..d.l).map(|_| C64::new(self.uniform(-1.0, 1.0), self.uniform(-0.3, 0.3))).collect();
            let trial = ctx.clone().with_xi(xi.clone());
            if generic_ok(&trial)? {
                return Ok(xi);
            }
        }
        Err(Error::Config("could not sample a generic spectral parameter".into()))
    }

    /// A random combination of `terms` exponentials e^{2πi(m|p)}, with m a
    /// combination of the Λ̄_i with coefficients bounded by `bound`, rescaled by
    /// 2/(longest root length²) to keep the dynamic range type-independent.
    pub fn exp_sum(&mut self, d: &RootDatum, terms: usize, bound: i64) -> ExpSum {
        let longest = d.classes.iter().map(|c| c.sq_len).max().expect("nonempty");
        let norm = Q::from_integer(2) / longest;
        let terms = (0..terms)
            .map(|_| {
                let mut m: QVec = vec![Q::from_integer(0); d.l];
                for i in 0..d.l {
                    let c = self.rng.gen_range(-bound..=bound);
                    m = linalg::add(&m, &linalg::scale(Q::from_integer(c) * norm, &d.fundamental_weight(i)));
                }
                (self.complex(1.0), m)
            })
            .collect();
        ExpSum { terms }
    }

    /// The W̊-orbit sum of a random exponential combination.
    pub fn symmetric_exp_sum(&mut self, d: &RootDatum, terms: usize, bound: i64) -> ExpSum {
        self.exp_sum(d, terms, bound).symmetrize(d)
    }
}

fn far_from_zeros(z: C64, tau: C64, cfg: &SeriesConfig) -> Result<bool> {
    let t = jacobi_theta(1, z, tau, cfg)?;
    let s = theta1_prime_zero_classical(tau, cfg)?;
    // normalize away the quasi-periodic growth e^{π Im(z)²/Im τ}
    let growth = (-PI * z.im * z.im / tau.im).exp();
    Ok((t.norm() * growth) / s.norm() > POLE_MARGIN)
}

fn generic_ok(ctx: &Context) -> Result<bool> {
    let d = &*ctx.datum;
    for a in d.root_directions() {
        let root = AffineRoot::finite_only(a.clone());
        let class = d.class_of_finite(&a);
        let gamma = linalg::to_f64(&d.classes[class].gamma);
        let mu = ctx.couplings.mu[class];
        let nu = ctx.xi_pairing(&a);
        let table = n_alpha_table(d, &root)?;
        for (m, n) in table.iter().flatten() {
            let g = linalg::to_f64(n) * gamma;
            let s = g / linalg::to_f64(m);
            for w in [nu, nu - mu, nu + mu] {
                if !far_from_zeros(s * w, g * ctx.tau, &ctx.series)? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Σ c_k e^{2πi(m_k|p)}.
#[derive(Clone, Debug)]
pub struct ExpSum {
    pub terms: Vec<(C64, QVec)>,
}

impl ExpSum {
    pub fn eval(&self, d: &RootDatum, p: &[C64]) -> C64 {
        self.terms.iter().map(|(c, m)| c * (2.0 * PI * C64::i() * d.pair_point(m, p)).exp()).sum()
    }

    /// Σ_{w∈W̊} f(w⁻¹p) written as an exponential sum.
    pub fn symmetrize(&self, d: &RootDatum) -> ExpSum {
        let group = finite_weyl_group(d);
        let mut terms = vec![];
        for (c, m) in &self.terms {
            for w in &group {
                terms.push((*c, w.act_on_finite(m)));
            }
        }
        ExpSum { terms }
    }
}

/// max |a − b| / max(|a|, |b|) over paired samples, with the scale.
pub fn relative_residual(a: &[C64], b: &[C64]) -> (f64, f64) {
    let mut num = 0.0f64;
    let mut scale = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        num = num.max((x - y).norm());
        scale = scale.max(x.norm()).max(y.norm());
    }
    if scale == 0.0 {
        (0.0, 0.0)
    } else {
        (num / scale, scale)
    }
}
