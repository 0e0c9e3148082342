//! Closed forms of Ŷ^λ on W̊-invariant functions, and the explicit
//! operators of types A^(1)_{l−1} and A^(2)_{2l} in orthogonal coordinates.

use super::algebra::{Coefficient, Operator, Term};
use super::context::Context;
use super::rmatrix::{check_translation, h_alpha};
use crate::error::{Error, Result};
use crate::linalg::{self, Q, QVec};
use crate::root_system::{rho_mu_c, translation_inversion_set, AffineRoot, Family, RootDatum};
use crate::theta::{jacobi_theta, theta1_guarded, theta1_prime_zero_classical, SeriesConfig};
use crate::weyl::{finite_weyl_group, is_minuscule, quasi_minuscule, stabilizer_order, ExtendedWeylElement};
use num_complex::Complex64 as C64;
use serde_json::json;
use std::f64::consts::PI;
use std::sync::Arc;

/// (1/|W̊_X|) Σ_{w∈W̊} w X w⁻¹.
fn symmetrize(op: &Operator, stab: usize) -> Operator {
    let d = op.datum().clone();
    let mut total = Operator::zero(d.clone(), op.kappa());
    for w in finite_weyl_group(&d) {
        total = total.add(&op.conjugate(&w));
    }
    total.scale(C64::new(1.0 / stab as f64, 0.0))
}

/// For (−λ) minuscule:
/// `(1/|W̊_λ|) Σ_{w∈W̊} w( Π_{α∈Δ̊₊, (λ|α)=−γ_α} H_α(μ_α) · t_λ )`.
pub fn minuscule_closed_form(lam: &[Q], ctx: &Context) -> Result<Operator> {
    let d = &*ctx.datum;
    check_translation(d, lam)?;
    if !is_minuscule(d, &linalg::neg(lam)) {
        return Err(Error::Unsupported(format!("−λ = {} is not minuscule", linalg::fmt_qvec(&linalg::neg(lam)))));
    }
    let mut c = Coefficient::one();
    for a in translation_inversion_set(d, lam)? {
        c = c.mul(&h_alpha(&a, ctx.couplings.mu_of(d, &a)?, ctx)?);
    }
    let base = Operator::from_terms(ctx.datum.clone(), ctx.kappa(), vec![Term { coeff: c, elem: ExtendedWeylElement::translation(lam) }]);
    Ok(symmetrize(&base, stabilizer_order(d, lam)))
}

/// The constant in the non-translation term of the quasi-minuscule form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QminConstant {
    /// `H_β((ρ̊_μ|θ))`, as printed.
    Printed,
    /// `H_β(−(ρ̊_μ|θ)) = H_β(⟨ξ,β^∨⟩)` at ξ = −ρ̊_μ, the reflection coefficient of R̂_β.
    Reflection,
}

/// The quasi-minuscule form of Ŷ^{−ν(θ^∨)} on W̊-invariant functions:
/// `(1/|W̊_ν|) Σ_w w( Π_{α>0, ⟨α,θ^∨⟩>0} H_α(μ_α) · [H_β(μ_{α_0}) t_{−ν(θ^∨)} − H_β(c)] )`
/// with β = a_0⁻¹(θ+δ) and c selected by `constant`.
pub fn quasi_minuscule_closed_form(ctx: &Context, constant: QminConstant) -> Result<Operator> {
    let d = &*ctx.datum;
    if d.ty.is_untwisted_a() {
        return Err(Error::Unsupported("type A^(1)_l: every λ_i is minuscule; use minuscule_closed_form".into()));
    }
    let nu = quasi_minuscule(d);
    let a0 = Q::from_integer(d.a0());
    let beta = AffineRoot::new(linalg::scale(Q::from_integer(1) / a0, &d.theta), Q::from_integer(1) / a0);
    let mut c = Coefficient::one();
    for a in &d.pos_roots {
        if d.pair(a, &d.theta) > Q::from_integer(0) {
            let r = AffineRoot::finite_only(a.clone());
            c = c.mul(&h_alpha(&r, ctx.couplings.mu_of(d, &r)?, ctx)?);
        }
    }
    let rho = rho_mu_c(d, &ctx.couplings.mu);
    let theta_c: Vec<C64> = d.theta.iter().map(|x| C64::new(linalg::to_f64(x), 0.0)).collect();
    let rho_theta = d.pair_cc(&rho, &theta_c);
    let cst = match constant {
        QminConstant::Printed => rho_theta,
        QminConstant::Reflection => -rho_theta,
    };
    let kappa = ctx.kappa();
    let datum = ctx.datum.clone();
    let first = Operator::multiplication(datum.clone(), kappa, c);
    let second = Operator::from_terms(
        datum.clone(),
        kappa,
        vec![
            Term { coeff: h_alpha(&beta, ctx.couplings.mu_of(d, &d.simple[0])?, ctx)?, elem: ExtendedWeylElement::translation(&linalg::neg(&nu)) },
            Term { coeff: h_alpha(&beta, cst, ctx)?.scale(C64::new(-1.0, 0.0)), elem: ExtendedWeylElement::identity(d.l) },
        ],
    );
    Ok(symmetrize(&first.compose(&second), stabilizer_order(d, &nu)))
}

/// Orthonormal coordinates `x_j = (ε_j|p)` of the standard realizations.
#[derive(Clone, Debug)]
pub struct Orthonormal {
    /// ε_j in ᾱ-coordinates.
    pub eps: Vec<QVec>,
}

impl Orthonormal {
    /// A^(1)_{l−1}: ε̄_1 = Λ̄_1, ε̄_j = ε̄_{j−1} − α_{j−1} (projected onto Σx_j = 0).
    pub fn type_a(d: &RootDatum) -> Result<Self> {
        if !(d.ty.family == Family::A && d.ty.r == 1) {
            return Err(Error::Unsupported(format!("{} is not of type A^(1)", d.ty)));
        }
        let mut eps = vec![d.fundamental_weight(0)];
        for j in 1..=d.l {
            let prev = eps[j - 1].clone();
            eps.push(linalg::sub(&prev, &d.simple_finite(j - 1)));
        }
        Ok(Orthonormal { eps })
    }

    /// A^(2)_{2l} (finite C_l, long roots of length² 4): ε_l = α_l/2, ε_i = α_i + ε_{i+1}.
    pub fn type_a2l(d: &RootDatum) -> Result<Self> {
        if !d.ty.is_a2l() {
            return Err(Error::Unsupported(format!("{} is not of type A^(2)_2l", d.ty)));
        }
        let l = d.l;
        let mut eps = vec![vec![Q::from_integer(0); l]; l];
        eps[l - 1] = linalg::scale(linalg::qf(1, 2), &d.simple_finite(l - 1));
        for i in (0..l - 1).rev() {
            eps[i] = linalg::add(&d.simple_finite(i), &eps[i + 1]);
        }
        Ok(Orthonormal { eps })
    }

    pub fn coords(&self, d: &RootDatum, p: &[C64]) -> Vec<C64> {
        self.eps.iter().map(|e| d.pair_point(e, p)).collect()
    }
}

fn theta_guarded(j: u8, w: C64, tau: C64, cfg: &SeriesConfig) -> Result<C64> {
    if j == 1 {
        return theta1_guarded(w, tau, cfg);
    }
    let t = jacobi_theta(j, w, tau, cfg)?;
    let scale = theta1_prime_zero_classical(tau, cfg)?.norm();
    if t.norm() / scale < cfg.pole_guard {
        return Err(Error::Pole { magnitude: t.norm() / scale, guard: cfg.pole_guard });
    }
    Ok(t)
}

/// The Ruijsenaars-type operator of type A^(1)_{l−1}:
/// `Σ_j Π_{k≠j} ϑ_1(x_j−x_k−μ)/ϑ_1(x_j−x_k) · t_j(κ) Π_k t_k(−κ/l)`,
/// where the bracketed translation is t_{−ε̄_j}; μ is the (single) coupling.
pub fn explicit_a1_operator(l: usize, ctx: &Context) -> Result<Operator> {
    let d = &*ctx.datum;
    if d.ty.family != Family::A || d.ty.r != 1 || d.l + 1 != l {
        return Err(Error::Unsupported(format!("explicit A^(1)_{} operator needs datum A{}~1, got {}", l - 1, l - 1, d.ty)));
    }
    let orth = Arc::new(Orthonormal::type_a(d)?);
    let mu = ctx.couplings.mu[0];
    let (tau, cfg) = (ctx.tau, ctx.series.clone());
    let mut terms = vec![];
    for j in 0..l {
        let (o, cfg, datum) = (orth.clone(), cfg.clone(), ctx.datum.clone());
        let label = json!({"A1": {"j": j + 1, "mu": [mu.re, mu.im]}});
        let coeff = Coefficient::new(label, move |p| {
            let x = o.coords(&datum, p);
            let mut c = C64::new(1.0, 0.0);
            for k in 0..x.len() {
                if k != j {
                    c *= jacobi_theta(1, x[j] - x[k] - mu, tau, &cfg)? / theta1_guarded(x[j] - x[k], tau, &cfg)?;
                }
            }
            Ok(c)
        });
        terms.push(Term { coeff, elem: ExtendedWeylElement::translation(&linalg::neg(&orth.eps[j])) });
    }
    Ok(Operator::from_terms(ctx.datum.clone(), ctx.kappa(), terms))
}

/// Parameters of the A^(2)_{2l} operator: the eight ν_r, ν̄_r and μ.
#[derive(Clone, Debug, PartialEq)]
pub struct A2lParams {
    pub nu: [C64; 4],
    pub nubar: [C64; 4],
    pub mu: C64,
}

impl A2lParams {
    /// κ = (Σν_r + Σν̄_r + 2(l−1)μ)/k.
    pub fn kappa(&self, l: usize, k: u32) -> C64 {
        let s: C64 = self.nu.iter().sum::<C64>() + self.nubar.iter().sum::<C64>();
        (s + 2.0 * (l as f64 - 1.0) * self.mu) / k as f64
    }
}

/// Which constant term to use in the A^(2)_{2l} operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum A2lConstant {
    /// As printed: `−Σ_p … Π_r ϑ_{r+1}(−κ−ν_{π_p r}) ϑ_{r+1}(−ν̄_{π_p r}) …`.
    Printed,
    /// `+Σ_p … Π_r ϑ_{r+1}(−κ/2−ν_{π_p r}) ϑ_{r+1}(−ν̄_{π_p r}) …`.
    Corrected,
}

/// π_0 = id, π_1 = (01)(23), π_2 = (02)(13), π_3 = (03)(12).
pub const PI_PERMUTATIONS: [[usize; 4]; 4] = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]];

/// The van Diejen-type operator of type A^(2)_{2l} in orthonormal coordinates,
/// with κ taken from the context and ϑ_4 ≡ ϑ_0.
pub fn explicit_a2_2l_operator(l: usize, params: &A2lParams, constant: A2lConstant, ctx: &Context) -> Result<Operator> {
    let d = &*ctx.datum;
    if !d.ty.is_a2l() || d.l != l {
        return Err(Error::Unsupported(format!("explicit A^(2)_{} operator needs datum A{}~2, got {}", 2 * l, 2 * l, d.ty)));
    }
    let orth = Arc::new(Orthonormal::type_a2l(d)?);
    let (tau, cfg, kappa) = (ctx.tau, ctx.series.clone(), ctx.kappa());
    let prm = Arc::new(params.clone());
    let mut terms = vec![];
    for j in 0..l {
        for sign in [1.0, -1.0] {
            let (o, cfg, datum, prm) = (orth.clone(), cfg.clone(), ctx.datum.clone(), prm.clone());
            let label = json!({"A2l": {"j": j + 1, "sign": sign}});
            let coeff = Coefficient::new(label, move |p| {
                let x: Vec<C64> = o.coords(&datum, p).into_iter().map(|v| sign * v).collect();
                let mut c = C64::new(1.0, 0.0);
                for k in 0..x.len() {
                    if k != j {
                        // x_k itself is not sign-flipped in the pair terms
                        let xk = sign * x[k];
                        for w in [x[j] - xk, x[j] + xk] {
                            c *= jacobi_theta(1, w - prm.mu, tau, &cfg)? / theta1_guarded(w, tau, &cfg)?;
                        }
                    }
                }
                for r in 0..4u8 {
                    let t = r + 1;
                    c *= jacobi_theta(t, x[j] - prm.nu[r as usize], tau, &cfg)? / theta_guarded(t, x[j], tau, &cfg)?;
                    let y = x[j] + kappa / 2.0;
                    c *= jacobi_theta(t, y - prm.nubar[r as usize], tau, &cfg)? / theta_guarded(t, y, tau, &cfg)?;
                }
                Ok(c)
            });
            // t_j(+κ) = t_{−ε_j}, t_j(−κ) = t_{ε_j}
            let shift = linalg::scale(Q::from_integer(-sign as i64), &orth.eps[j]);
            terms.push(Term { coeff, elem: ExtendedWeylElement::translation(&shift) });
        }
    }
    let (orth, datum, prm, cfg2) = (orth.clone(), ctx.datum.clone(), prm.clone(), cfg.clone());
    let label = json!({"A2l": {"constant": format!("{constant:?}")}});
    let coeff = Coefficient::new(label, move |p| {
        let x = orth.coords(&datum, p);
        let th = |j: u8, w: C64| jacobi_theta(j, w, tau, &cfg2);
        let pref = (C64::new(PI, 0.0) / theta1_prime_zero_classical(tau, &cfg2)?).powi(2) * 2.0
            / (theta1_guarded(-prm.mu, tau, &cfg2)? * theta1_guarded(-kappa - prm.mu, tau, &cfg2)?);
        let (sgn, shift) = match constant {
            A2lConstant::Printed => (-1.0, kappa),
            A2lConstant::Corrected => (1.0, kappa / 2.0),
        };
        let mut total = C64::new(0.0, 0.0);
        for (pidx, perm) in PI_PERMUTATIONS.iter().enumerate() {
            let mut c = pref;
            for r in 0..4 {
                let t = r as u8 + 1;
                c *= th(t, -shift - prm.nu[perm[r]])? * th(t, -prm.nubar[perm[r]])?;
            }
            let t = pidx as u8 + 1;
            for xj in &x {
                for y in [*xj - kappa / 2.0, -*xj - kappa / 2.0] {
                    c *= th(t, y - prm.mu)? / theta_guarded(t, y, tau, &cfg2)?;
                }
            }
            total += c;
        }
        Ok(sgn * total)
    });
    terms.push(Term { coeff, elem: ExtendedWeylElement::identity(d.l) });
    Ok(Operator::from_terms(ctx.datum.clone(), kappa, terms))
}
