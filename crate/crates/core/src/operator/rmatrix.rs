//! The coefficient functions H_α, the R-matrices R̂_α and the operators Ŷ^λ.

use super::algebra::{Coefficient, Operator, Term};
use super::context::Context;
use crate::error::{Error, Result};
use crate::linalg::{self, Q};
use crate::root_system::{is_antidominant, n_alpha_table, translation_inversion_set, AffineRoot, RootDatum};
use crate::theta::{jacobi_theta, theta1_guarded, theta1_prime_zero, theta_upper, wp0, SeriesConfig};
use crate::weyl::{inversion_sequence, ExtendedWeylElement, ReducedWord};
use num_complex::Complex64 as C64;
use serde_json::json;

/// One slot φ^j = (m, n) of H_α with its point-independent prefactor.
#[derive(Clone, Debug)]
struct Slot {
    /// ζ^j ϑ^1(−aμ;g)/ϑ^{1′}(0;g) · ϑ^{1′}(0;g)/ϑ^1(−aν;g), with g = nγ, a = nγ/m.
    pref: C64,
    m: f64,
    gtau: C64,
    anu: C64,
}

/// H_α(ν) as a function of the point, with constants precomputed.
#[derive(Clone, Debug)]
struct HFunction {
    /// z(p) = Σ w_i p_i + c κ.
    w: Vec<f64>,
    c_kappa: C64,
    slots: std::result::Result<Vec<Slot>, Error>,
    series: SeriesConfig,
}

impl HFunction {
    fn new(root: &AffineRoot, nu: C64, ctx: &Context) -> Result<HFunction> {
        let d = &*ctx.datum;
        let class = d.class_of(root)?;
        let gamma = linalg::to_f64(&d.classes[class].gamma);
        let mu = ctx.couplings.mu[class];
        let zeta = ctx.couplings.zeta[class];
        let table = n_alpha_table(d, root)?;
        let l = d.l;
        let w: Vec<f64> = (0..l).map(|j| (0..l).map(|i| linalg::to_f64(&root.finite[i]) * d.form_f64[i * l + j]).sum()).collect();
        let c_kappa = ctx.kappa() * linalg::to_f64(&root.delta);
        let cfg = &ctx.series;
        let tau = ctx.tau;
        let slots = (|| {
            let mut out = vec![];
            for (j, slot) in table.iter().enumerate() {
                let (m, n) = match slot {
                    Some((m, n)) if zeta[j] != C64::new(0.0, 0.0) => (linalg::to_f64(m), linalg::to_f64(n)),
                    _ => continue,
                };
                let g = n * gamma;
                let a = g / m;
                let prime = theta1_prime_zero(g, tau, cfg)?;
                theta1_guarded(-a * nu, g * tau, cfg)?;
                let pref = zeta[j] * theta_upper(1, -a * mu, g, tau, cfg)? / prime * prime / theta_upper(1, -a * nu, g, tau, cfg)?;
                out.push(Slot { pref, m, gtau: g * tau, anu: a * nu });
            }
            Ok(out)
        })();
        Ok(HFunction { w, c_kappa, slots, series: ctx.series.clone() })
    }

    fn eval(&self, p: &[C64]) -> Result<C64> {
        let slots = self.slots.as_ref().map_err(|e| e.clone())?;
        let z: C64 = self.w.iter().zip(p).map(|(w, x)| w * x).sum::<C64>() + self.c_kappa;
        let mut s = C64::new(0.0, 0.0);
        for sl in slots {
            let mz = sl.m * z;
            let den = theta1_guarded(mz, sl.gtau, &self.series)?;
            s += sl.pref * jacobi_theta(1, mz - sl.anu, sl.gtau, &self.series)? / den;
        }
        Ok(s)
    }
}

/// H_α(ν) as a coefficient function of the point.
pub fn h_alpha(root: &AffineRoot, nu: C64, ctx: &Context) -> Result<Coefficient> {
    let h = HFunction::new(root, nu, ctx)?;
    let label = json!({"H": {"root": root.to_string(), "nu": [nu.re, nu.im]}});
    Ok(Coefficient::new(label, move |p| h.eval(p)))
}

/// H_α(ν) at one point.
pub fn h_alpha_at(root: &AffineRoot, nu: C64, p: &[C64], ctx: &Context) -> Result<C64> {
    HFunction::new(root, nu, ctx)?.eval(p)
}

/// R̂_α = H_α(μ_α) − H_α(⟨ξ,α^∨⟩) r_α.
pub fn r_matrix(root: &AffineRoot, ctx: &Context) -> Result<Operator> {
    let d = &*ctx.datum;
    let refl = ExtendedWeylElement::reflection(d, root)?;
    let mu = ctx.couplings.mu_of(d, root)?;
    let nu = ctx.xi_pairing(&root.finite);
    let terms = vec![
        Term { coeff: h_alpha(root, mu, ctx)?, elem: ExtendedWeylElement::identity(d.l) },
        Term { coeff: h_alpha(root, nu, ctx)?.scale(C64::new(-1.0, 0.0)), elem: refl },
    ];
    Ok(Operator::from_terms(ctx.datum.clone(), ctx.kappa(), terms))
}

/// R̂_{β_1} ⋯ R̂_{β_n}.
pub fn r_chain(roots: &[AffineRoot], ctx: &Context) -> Result<Operator> {
    let mut op = Operator::identity(ctx.datum.clone(), ctx.kappa());
    for a in roots {
        op = op.compose(&r_matrix(a, ctx)?);
    }
    Ok(op)
}

/// R̂_{α^1} ⋯ R̂_{α^ℓ} ŵ along a reduced word of ŵ.
pub fn word_operator(word: &ReducedWord, ctx: &Context) -> Result<Operator> {
    let d = &*ctx.datum;
    let seq = inversion_sequence(d, word)?;
    let w = word.to_element(d);
    Ok(r_chain(&seq, ctx)?.compose(&Operator::element(ctx.datum.clone(), ctx.kappa(), w)))
}

pub(crate) fn check_translation(d: &RootDatum, lam: &[Q]) -> Result<()> {
    if lam.len() != d.l || !d.basis.in_m_hat(lam) {
        return Err(Error::NotInLattice(linalg::fmt_qvec(lam)));
    }
    if !is_antidominant(d, lam) {
        return Err(Error::NotAntidominant(linalg::fmt_qvec(lam)));
    }
    Ok(())
}

/// Ŷ^λ = R̂_{t_λ} t_λ for λ ∈ M̂_−, along the canonical reduced word of t_λ.
pub fn y_operator(lam: &[Q], ctx: &Context) -> Result<Operator> {
    let d = &*ctx.datum;
    check_translation(d, lam)?;
    let word = ExtendedWeylElement::translation(lam).reduced_word(d);
    word_operator(&word, ctx)
}

/// Ŷ^λ along a caller-supplied reduced word, which must spell t_λ.
pub fn y_operator_with_word(lam: &[Q], word: &ReducedWord, ctx: &Context) -> Result<Operator> {
    let d = &*ctx.datum;
    check_translation(d, lam)?;
    if word.to_element(d) != ExtendedWeylElement::translation(lam) {
        return Err(Error::NotReduced(format!("word {:?} does not spell t_{}", word.letters, linalg::fmt_qvec(lam))));
    }
    word_operator(word, ctx)
}

/// g^λ_λ = Π_{α∈Δ_{t_λ}} H_α(μ_α), the coefficient of t_λ in Ŷ^λ.
pub fn leading_term(lam: &[Q], ctx: &Context) -> Result<Coefficient> {
    let d = &*ctx.datum;
    check_translation(d, lam)?;
    let mut c = Coefficient::one();
    for a in translation_inversion_set(d, lam)? {
        c = c.mul(&h_alpha(&a, ctx.couplings.mu_of(d, &a)?, ctx)?);
    }
    Ok(c)
}

/// The matrix S and the vectors p_k of the unitarity formula.
pub const UNITARITY_S: [[f64; 4]; 4] = [
    [0.25, 0.0, 0.0, 0.0],
    [-0.25, 0.0, 0.0, 0.25],
    [-0.25, 1.0, 0.0, 0.0],
    [0.25, -1.0, 1.0, -0.25],
];
pub const UNITARITY_P: [[f64; 4]; 4] = [[2.0, 1.0, 1.0, 2.0], [0.0, 0.0, 1.0, 2.0], [0.0, 1.0, 1.0, 0.0], [0.0, 0.0, 1.0, 0.0]];

/// u_α with R̂_α R̂_{−α} = u_α Id:
/// `u = Σ_k (p_k·ζ̃)² (S d)_k`, ζ̃^j = ζ^j ϑ^1(−aμ;g)/ϑ^{1′}(0;g),
/// d^j = ℘⁰(aμ;g) − ℘⁰(a⟨ξ,α^∨⟩;g) over the slots of N_α.
pub fn unitarity_scalar(root: &AffineRoot, ctx: &Context) -> Result<C64> {
    let d = &*ctx.datum;
    let class = d.class_of(root)?;
    let gamma = linalg::to_f64(&d.classes[class].gamma);
    let mu = ctx.couplings.mu[class];
    let zeta = ctx.couplings.zeta[class];
    let nu = ctx.xi_pairing(&root.finite);
    let table = n_alpha_table(d, root)?;
    let (cfg, tau) = (&ctx.series, ctx.tau);
    let zero = C64::new(0.0, 0.0);
    let mut zt = [zero; 4];
    let mut dv = [zero; 4];
    for j in 0..4 {
        let Some((m, n)) = table[j] else { continue };
        let (m, n) = (linalg::to_f64(&m), linalg::to_f64(&n));
        let g = n * gamma;
        let a = g / m;
        zt[j] = zeta[j] * theta_upper(1, -a * mu, g, tau, cfg)? / theta1_prime_zero(g, tau, cfg)?;
        dv[j] = wp0(a * mu, g, tau, cfg)? - wp0(a * nu, g, tau, cfg)?;
    }
    let mut u = zero;
    for k in 0..4 {
        let pz: C64 = (0..4).map(|j| UNITARITY_P[k][j] * zt[j]).sum();
        let sd: C64 = (0..4).map(|j| UNITARITY_S[k][j] * dv[j]).sum();
        u += pz * pz * sd;
    }
    Ok(u)
}
