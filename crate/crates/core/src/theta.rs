//! Jacobi theta functions, the Dedekind eta function, the normalized
//! functions σ_ν and ℘⁰, and level-k theta functions on h̊*.
//!
//! Classical conventions: `ϑ[a,b](z|τ) = Σ_n exp(πiτ(n+a)² + 2πi(n+a)(z+b))`
//! with `ϑ_1 = −ϑ[½,½]`, `ϑ_2 = ϑ[½,0]`, `ϑ_3 = ϑ[0,0]`, `ϑ_4 = ϑ_0 = ϑ[0,½]`.
//! The series-defined root-system thetas satisfy `ϑ^j(λ;γ) = ϑ_j(z|γτ)` for
//! j ≠ 1 and `ϑ^1(λ;γ) = +i ϑ_1(z|γτ)`; arguments `λ − νδ` evaluate at
//! `z − ν`, i.e. δ pairs to 1 in these scalar arguments.

use crate::error::{Error, Result};
use crate::linalg::{self, Quotient, QVec, Q};
use crate::root_system::{finite_orbit, RootDatum};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;
use std::sync::Arc;

/// Truncation and guard parameters shared by all series evaluations.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesConfig {
    /// Maximum number of terms on either side of the series center.
    pub max_terms: usize,
    /// Tail bound required relative to the dominant term.
    pub tail_tol: f64,
    /// Minimum allowed Im τ.
    pub tau_floor: f64,
    /// |ϑ_1(w)| below `pole_guard · |ϑ_1′(0)|` is treated as a pole.
    pub pole_guard: f64,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig { max_terms: 400, tail_tol: 1e-15, tau_floor: 0.3, pole_guard: 1e-8 }
    }
}

/// Modular parameter τ with Im τ above the configured floor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModularParam {
    tau: C64,
}

impl ModularParam {
    pub fn new(tau: C64, cfg: &SeriesConfig) -> Result<Self> {
        if !(tau.im >= cfg.tau_floor) {
            return Err(Error::TauFloor { im: tau.im, floor: cfg.tau_floor });
        }
        Ok(ModularParam { tau })
    }

    pub fn tau(&self) -> C64 {
        self.tau
    }
}

fn gaussian_tail(im_tau: f64, r: f64) -> f64 {
    if r <= 0.0 {
        return f64::INFINITY;
    }
    let a = (-PI * im_tau * r * r).exp();
    let b = (-2.0 * PI * im_tau * r).exp();
    2.0 * a / (1.0 - b)
}

/// Number of terms each side of the center so that the Gaussian tail is below `tol`.
fn series_radius(im_tau: f64, cfg: &SeriesConfig) -> Result<usize> {
    let mut r = 1usize;
    // One extra term absorbs the rounding of the center.
    while gaussian_tail(im_tau, (r - 1) as f64) > cfg.tail_tol {
        r += 1;
        if r > cfg.max_terms {
            return Err(Error::Truncation { bound: gaussian_tail(im_tau, (cfg.max_terms - 1) as f64), tol: cfg.tail_tol, terms: cfg.max_terms });
        }
    }
    Ok(r)
}

/// ϑ[a,b](z|τ).
pub fn theta_char(a: f64, b: f64, z: C64, tau: C64, cfg: &SeriesConfig) -> Result<C64> {
    if !(tau.im >= cfg.tau_floor) {
        return Err(Error::TauFloor { im: tau.im, floor: cfg.tau_floor });
    }
    let r = series_radius(tau.im, cfg)? as i64;
    let center = (-z.im / tau.im - a).round() as i64;
    let i = C64::i();
    let mut acc = C64::new(0.0, 0.0);
    for n in (center - r)..=(center + r) {
        let m = n as f64 + a;
        acc += (i * PI * (m * m * tau + 2.0 * m * (z + b))).exp();
    }
    Ok(acc)
}

/// Classical Jacobi ϑ_j(z|τ) for j ∈ {1, 2, 3, 4}; j = 0 is an alias for ϑ_4.
pub fn jacobi_theta(j: u8, z: C64, tau: C64, cfg: &SeriesConfig) -> Result<C64> {
    match j {
        1 => Ok(-theta_char(0.5, 0.5, z, tau, cfg)?),
        2 => theta_char(0.5, 0.0, z, tau, cfg),
        3 => theta_char(0.0, 0.0, z, tau, cfg),
        0 | 4 => theta_char(0.0, 0.5, z, tau, cfg),
        _ => Err(Error::Unsupported(format!("theta index {j}"))),
    }
}

/// Root-system theta ϑ^j(λ;γ) as a function of `z = ⟨λ, h̊⟩`, per its defining series.
pub fn theta_upper(j: u8, z: C64, gamma: f64, tau: C64, cfg: &SeriesConfig) -> Result<C64> {
    let t = jacobi_theta(j, z, gamma * tau, cfg)?;
    Ok(if j == 1 { C64::i() * t } else { t })
}

/// ϑ^1 under the stated classical correspondence `ϑ^1 = −i ϑ_1`.
pub fn theta_upper1_classical(z: C64, gamma: f64, tau: C64, cfg: &SeriesConfig) -> Result<C64> {
    Ok(-C64::i() * jacobi_theta(1, z, gamma * tau, cfg)?)
}

/// Dedekind η(τ) = q^{1/24} Π (1 − qⁿ), q = e^{2πiτ}.
pub fn eta(tau: C64, cfg: &SeriesConfig) -> Result<C64> {
    if !(tau.im >= cfg.tau_floor) {
        return Err(Error::TauFloor { im: tau.im, floor: cfg.tau_floor });
    }
    let q = (2.0 * PI * C64::i() * tau).exp();
    let mut prod = (PI * C64::i() * tau / 12.0).exp();
    let mut qn = q;
    for _ in 0..cfg.max_terms * 8 {
        prod *= 1.0 - qn;
        if qn.norm() < cfg.tail_tol * 1e-2 {
            return Ok(prod);
        }
        qn *= q;
    }
    Err(Error::Truncation { bound: qn.norm(), tol: cfg.tail_tol, terms: cfg.max_terms * 8 })
}

/// ϑ^{1′}(0;γ) := η(γτ)³.
pub fn theta1_prime_zero(gamma: f64, tau: C64, cfg: &SeriesConfig) -> Result<C64> {
    Ok(eta(gamma * tau, cfg)?.powi(3))
}

/// Classical ϑ_1′(0|τ) = 2π η(τ)³.
pub fn theta1_prime_zero_classical(tau: C64, cfg: &SeriesConfig) -> Result<C64> {
    Ok(2.0 * PI * eta(tau, cfg)?.powi(3))
}

/// ϑ_1(w|τ), failing with a pole error when `w` is within `pole_guard` of a zero.
pub fn theta1_guarded(w: C64, tau: C64, cfg: &SeriesConfig) -> Result<C64> {
    let t = jacobi_theta(1, w, tau, cfg)?;
    let scale = theta1_prime_zero_classical(tau, cfg)?.norm();
    let dist = t.norm() / scale;
    if dist < cfg.pole_guard {
        return Err(Error::Pole { magnitude: dist, guard: cfg.pole_guard });
    }
    Ok(t)
}

/// σ_ν(λ;γ) = ϑ^1(λ−νδ)ϑ^{1′}(0) / (ϑ^1(λ)ϑ^1(−νδ)) at `z = ⟨λ, h̊⟩`.
pub fn sigma_nu(nu: C64, z: C64, gamma: f64, tau: C64, cfg: &SeriesConfig) -> Result<C64> {
    let gt = gamma * tau;
    let num = theta_upper(1, z - nu, gamma, tau, cfg)? * theta1_prime_zero(gamma, tau, cfg)?;
    let den = C64::i() * theta1_guarded(z, gt, cfg)? * C64::i() * theta1_guarded(-nu, gt, cfg)?;
    Ok(num / den)
}

/// ℘⁰(λ;γ) = (ϑ^0(λ)ϑ^{1′}(0) / (ϑ^1(λ)ϑ^0(0)))².
pub fn wp0(z: C64, gamma: f64, tau: C64, cfg: &SeriesConfig) -> Result<C64> {
    let gt = gamma * tau;
    let num = jacobi_theta(0, z, gt, cfg)? * theta1_prime_zero(gamma, tau, cfg)?;
    let den = C64::i() * theta1_guarded(z, gt, cfg)? * jacobi_theta(0, C64::new(0.0, 0.0), gt, cfg)?;
    Ok((num / den).powi(2))
}

/// Lattice data shared by the level-k theta functions of one datum.
#[derive(Debug)]
struct LatticeSum {
    l: usize,
    k: u32,
    form: Vec<f64>,
    /// Basis of kM (f64 coordinates).
    km: Vec<Vec<f64>>,
    /// Inverse Gram matrix of the kM basis, for the enumeration box.
    gram_inv_diag: Vec<f64>,
    /// kM basis expressed as a matrix B with β = Σ n_i km_i; solves for n.
    km_inv: Vec<f64>,
}

impl LatticeSum {
    fn pair(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.l;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += x[i] * self.form[i * n + j] * y[j];
            }
        }
        s
    }
}

fn invert_f64(m: &[f64], n: usize) -> Vec<f64> {
    let a = nalgebra::DMatrix::from_row_slice(n, n, m);
    let inv = a.try_inverse().expect("lattice basis is nonsingular");
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = inv[(i, j)];
        }
    }
    out
}

/// Θ_λ̄(p) = Σ_{β ∈ λ̄ + kM} exp(πiτ|β|²/k + 2πi(β|p)), the level-k theta
/// function of class `kΛ_0 + λ̄` (the factor e(kΛ_0) is omitted).
#[derive(Clone, Debug)]
pub struct ThetaBasisElement {
    pub k: u32,
    pub shift: QVec,
    data: Arc<LatticeSum>,
}

impl ThetaBasisElement {
    pub fn eval(&self, p: &[C64], tau: C64, cfg: &SeriesConfig) -> Result<C64> {
        let d = &*self.data;
        let l = d.l;
        if !(tau.im >= cfg.tau_floor) {
            return Err(Error::TauFloor { im: tau.im, floor: cfg.tau_floor });
        }
        let k = d.k as f64;
        let shift: Vec<f64> = self.shift.iter().map(linalg::to_f64).collect();
        // Dominant term sits near β_c = −k Im p / Im τ.
        let bc: Vec<f64> = p.iter().map(|z| -k * z.im / tau.im).collect();
        let rel: Vec<f64> = (0..l).map(|i| bc[i] - shift[i]).collect();
        let center: Vec<f64> = (0..l).map(|i| (0..l).map(|j| d.km_inv[i * l + j] * rel[j]).sum()).collect();
        // Radius (in form norm) beyond which terms are below tail_tol relative to
        // the dominant one, with slack for the polynomial growth of shell sizes.
        let decay = PI * tau.im / k;
        let r2 = ((1.0 / cfg.tail_tol).ln() + 4.0 * l as f64 + 8.0) / decay;
        let r = r2.sqrt();
        let lo: Vec<i64> = (0..l).map(|i| (center[i] - r * d.gram_inv_diag[i].sqrt()).floor() as i64 - 1).collect();
        let hi: Vec<i64> = (0..l).map(|i| (center[i] + r * d.gram_inv_diag[i].sqrt()).ceil() as i64 + 1).collect();
        let count: f64 = lo.iter().zip(&hi).map(|(a, b)| (b - a + 1) as f64).product();
        if count > (cfg.max_terms as f64).powi(l as i32).max(1e7) {
            return Err(Error::Truncation { bound: f64::NAN, tol: cfg.tail_tol, terms: count as usize });
        }
        let i = C64::i();
        let mut acc = C64::new(0.0, 0.0);
        let mut n = lo.clone();
        let mut beta = vec![0.0; l];
        loop {
            for a in 0..l {
                beta[a] = shift[a] + (0..l).map(|b| n[b] as f64 * d.km[b][a]).sum::<f64>();
            }
            let diff: Vec<f64> = (0..l).map(|a| beta[a] - bc[a]).collect();
            if d.pair(&diff, &diff) <= r2 {
                let bb = d.pair(&beta, &beta);
                let mut bp = C64::new(0.0, 0.0);
                for a in 0..l {
                    for b in 0..l {
                        bp += beta[a] * d.form[a * l + b] * p[b];
                    }
                }
                acc += (i * PI * (tau * bb / k + 2.0 * bp)).exp();
            }
            // odometer
            let mut a = 0;
            loop {
                if a == l {
                    return Ok(acc);
                }
                n[a] += 1;
                if n[a] <= hi[a] {
                    break;
                }
                n[a] = lo[a];
                a += 1;
            }
        }
    }
}

/// A W̊-orbit sum of level-k theta functions.
#[derive(Clone, Debug)]
pub struct SymmetricTheta {
    pub k: u32,
    pub members: Vec<ThetaBasisElement>,
}

impl SymmetricTheta {
    pub fn eval(&self, p: &[C64], tau: C64, cfg: &SeriesConfig) -> Result<C64> {
        let mut s = C64::new(0.0, 0.0);
        for m in &self.members {
            s += m.eval(p, tau, cfg)?;
        }
        Ok(s)
    }
}

fn lattice_sum(d: &RootDatum, k: u32) -> Arc<LatticeSum> {
    let l = d.l;
    let km: Vec<Vec<f64>> = d.basis.m.scaled(k as i64).basis.iter().map(|v| v.iter().map(linalg::to_f64).collect()).collect();
    let form = d.form_f64.clone();
    let mut gram = vec![0.0; l * l];
    let mut bmat = vec![0.0; l * l];
    for a in 0..l {
        for b in 0..l {
            let mut s = 0.0;
            for i in 0..l {
                for j in 0..l {
                    s += km[a][i] * form[i * l + j] * km[b][j];
                }
            }
            gram[a * l + b] = s;
            // column b of the coordinate matrix is km[b]
            bmat[a * l + b] = km[b][a];
        }
    }
    let gi = invert_f64(&gram, l);
    let gram_inv_diag = (0..l).map(|i| gi[i * l + i]).collect();
    let km_inv = invert_f64(&bmat, l);
    Arc::new(LatticeSum { l, k, form, km, gram_inv_diag, km_inv })
}

fn level_quotient(d: &RootDatum, k: u32) -> Quotient {
    Quotient::new(&d.basis.weights, &d.basis.m.scaled(k as i64)).expect("kM ⊂ P̊")
}

/// The level-k basis {Θ_{kΛ_0+λ̄}}, λ̄ over representatives of P̊ / kM.
pub fn theta_basis(d: &RootDatum, k: u32) -> Result<Vec<ThetaBasisElement>> {
    if k == 0 {
        return Err(Error::Unsupported("level must be positive".into()));
    }
    let data = lattice_sum(d, k);
    let quo = level_quotient(d, k);
    Ok(quo
        .representatives()
        .into_iter()
        .map(|shift| ThetaBasisElement { k, shift, data: data.clone() })
        .collect())
}

/// W̊-orbit sums of the level-k basis, one per orbit of classes.
pub fn symmetrize_basis(d: &RootDatum, k: u32) -> Result<Vec<SymmetricTheta>> {
    let basis = theta_basis(d, k)?;
    let quo = level_quotient(d, k);
    let mut seen: Vec<bool> = vec![false; basis.len()];
    let mut out = vec![];
    for (i, b) in basis.iter().enumerate() {
        if seen[i] {
            continue;
        }
        let mut idx: Vec<usize> = vec![];
        for w in finite_orbit(&d.form, &b.shift) {
            let red = quo.reduce(&w).expect("orbit stays in P̊");
            let j = basis.iter().position(|x| x.shift == red).expect("representative present");
            if !idx.contains(&j) {
                idx.push(j);
            }
        }
        idx.sort();
        for &j in &idx {
            seen[j] = true;
        }
        out.push(SymmetricTheta { k, members: idx.iter().map(|&j| basis[j].clone()).collect() });
    }
    Ok(out)
}

/// Quasi-periodicity factor: Θ(p + τβ) = factor · Θ(p) for β ∈ M.
pub fn theta_shift_factor(d: &RootDatum, k: u32, beta: &[Q], p: &[C64], tau: C64) -> C64 {
    let bb = linalg::to_f64(&d.sq(beta));
    let bp = d.pair_point(beta, p);
    (-C64::i() * PI * (tau * k as f64 * bb + 2.0 * k as f64 * bp)).exp()
}
