//! The bar representation `R̄_α = t_{ε¹_α} R̂_ᾱ t_{ε²_α}`, which preserves the
//! level-k theta space for every ξ.

use super::algebra::Operator;
use super::context::Context;
use super::rmatrix::{check_translation, r_chain, r_matrix};
use crate::error::{Error, Result};
use crate::linalg::{self, Q};
use crate::root_system::AffineRoot;
use crate::weyl::{inversion_sequence, ExtendedWeylElement, ReducedWord};
use num_complex::Complex64 as C64;

fn to_c(v: &[Q]) -> Vec<C64> {
    v.iter().map(|x| C64::new(linalg::to_f64(x), 0.0)).collect()
}

fn translate(ctx: &Context, e: Vec<C64>) -> Operator {
    Operator::element(ctx.datum.clone(), ctx.kappa(), ExtendedWeylElement::complex_translation(&e))
}

fn nonzero_h_vee(ctx: &Context) -> Result<C64> {
    let h = ctx.h_vee_mu();
    if h.norm() == 0.0 {
        return Err(Error::DegenerateHVee);
    }
    Ok(h)
}

/// R̄_α with gauge η = 0.
pub fn bar_r_matrix(root: &AffineRoot, ctx: &Context) -> Result<Operator> {
    bar_r_matrix_with_eta(root, &vec![C64::new(0.0, 0.0); ctx.datum.l], ctx)
}

/// R̄_α with an explicit gauge η satisfying ⟨η, ᾱ^∨⟩ = 0:
/// ε¹ = (−½μ_α ᾱ − ξ + η)/h^∨_μ, ε² = (−½μ_α ᾱ + ξ − η)/h^∨_μ.
pub fn bar_r_matrix_with_eta(root: &AffineRoot, eta: &[C64], ctx: &Context) -> Result<Operator> {
    let d = &*ctx.datum;
    let h = nonzero_h_vee(ctx)?;
    let a = to_c(&root.finite);
    let pairing = 2.0 * d.pair_cc(eta, &a) / linalg::to_f64(&d.sq(&root.finite));
    let scale = 1.0 + eta.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if pairing.norm() > 1e-12 * scale {
        return Err(Error::Config(format!("gauge η has ⟨η, α^∨⟩ = {pairing}, expected 0")));
    }
    let mu = ctx.couplings.mu_of(d, root)?;
    let xi = &ctx.spectral.xi;
    let e1: Vec<C64> = (0..d.l).map(|i| (-0.5 * mu * a[i] - xi[i] + eta[i]) / h).collect();
    let e2: Vec<C64> = (0..d.l).map(|i| (-0.5 * mu * a[i] + xi[i] - eta[i]) / h).collect();
    let r = r_matrix(&AffineRoot::finite_only(root.finite.clone()), ctx)?;
    Ok(translate(ctx, e1).compose(&r).compose(&translate(ctx, e2)))
}

/// The gauges η_n = −ρ̊_μ + Σ_{m<n} ν_m ᾱ^m + ½ν_n ᾱ^n along a reduced word,
/// with ν_n = μ_{α^n}, or −(ρ̊_μ|θ) when the n-th letter is 0.
pub fn word_gauges(word: &ReducedWord, ctx: &Context) -> Result<Vec<Vec<C64>>> {
    let d = &*ctx.datum;
    let seq = inversion_sequence(d, word)?;
    let rho = ctx.rho_mu();
    let rho_theta = d.pair_cc(&rho, &to_c(&d.theta));
    let mut acc: Vec<C64> = rho.iter().map(|x| -x).collect();
    let mut out = vec![];
    for (n, a) in seq.iter().enumerate() {
        let nu = if word.letters[n] == 0 { -rho_theta } else { ctx.couplings.mu_of(d, a)? };
        let ab = to_c(&a.finite);
        out.push((0..d.l).map(|i| acc[i] + 0.5 * nu * ab[i]).collect());
        for i in 0..d.l {
            acc[i] += nu * ab[i];
        }
    }
    Ok(out)
}

/// R̄_{α^1} ⋯ R̄_{α^ℓ} along a reduced word, with the gauges of [`word_gauges`].
pub fn bar_product(word: &ReducedWord, ctx: &Context) -> Result<Operator> {
    let d = &*ctx.datum;
    let seq = inversion_sequence(d, word)?;
    let gauges = word_gauges(word, ctx)?;
    let mut op = Operator::identity(ctx.datum.clone(), ctx.kappa());
    for (a, eta) in seq.iter().zip(&gauges) {
        op = op.compose(&bar_r_matrix_with_eta(a, eta, ctx)?);
    }
    Ok(op)
}

/// The right-hand side `t_{−Ξ} R̂_{α^1}⋯R̂_{α^ℓ} t_{λ′} t_Ξ` of the bar/hat
/// identity, with λ′ = −(1/h^∨_μ) Σ_n μ_{α^n} ᾱ^n.
pub fn bar_product_rhs(word: &ReducedWord, ctx: &Context) -> Result<Operator> {
    let d = &*ctx.datum;
    let h = nonzero_h_vee(ctx)?;
    let seq = inversion_sequence(d, word)?;
    let big = ctx.big_xi()?;
    let mut lam = vec![C64::new(0.0, 0.0); d.l];
    for a in &seq {
        let mu = ctx.couplings.mu_of(d, a)?;
        for (i, x) in to_c(&a.finite).iter().enumerate() {
            lam[i] -= mu * x / h;
        }
    }
    let neg_big: Vec<C64> = big.iter().map(|x| -x).collect();
    Ok(translate(ctx, neg_big).compose(&r_chain(&seq, ctx)?).compose(&translate(ctx, lam)).compose(&translate(ctx, big)))
}

/// Ȳ^λ = R̄_{α^1} ⋯ R̄_{α^ℓ} along the canonical reduced word of t_λ.
pub fn bar_y_operator(lam: &[Q], ctx: &Context) -> Result<Operator> {
    let d = &*ctx.datum;
    check_translation(d, lam)?;
    bar_product(&ExtendedWeylElement::translation(lam).reduced_word(d), ctx)
}
