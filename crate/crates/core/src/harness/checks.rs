//! The named checks of the verification suite and the suite runner.
//!
//! Every check compares two computations on seeded sample points and reports
//! a residual relative to the magnitude of the compared values. Numerical
//! failures at individual points (pole guard, truncation) are skipped and the
//! point is redrawn; a check that cannot collect its samples aborts the run.

use super::closure::fit_closure;
use super::config::{Mode, ScenarioConfig, CHECK_NAMES};
use super::report::{CheckReport, Report, Status};
use super::sampling::{ExpSum, Sampler};
use crate::error::{Error, Result};
use crate::linalg::{self, q, Q, QVec};
use crate::operator::{
    bar_product, bar_product_rhs, bar_r_matrix, bar_r_matrix_with_eta, bar_y_operator, explicit_a1_operator, leading_term,
    minuscule_closed_form, quasi_minuscule_closed_form, r_chain, r_matrix, unitarity_scalar, y_operator, y_operator_with_word,
    Context, Operator, QminConstant,
};
use crate::root_system::{h_vee_mu, AffineRoot, inversion_mu_sum, translation_inversion_set, translation_length, RootDatum};
use crate::theta::{eta, symmetrize_basis, theta1_prime_zero_classical, theta_basis, theta_shift_factor};
use crate::weyl::{
    bfs_word_lengths, finite_weyl_group, inversion_sequence, is_minuscule, quasi_minuscule, ExtendedWeylElement, ReducedWord,
};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};
use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

/// Builds Ŷ^λ for an antidominant λ. Replaceable so that test fixtures can
/// inject deliberately wrong operators.
pub type YBuilder = Arc<dyn Fn(&[Q], &Context) -> Result<Operator> + Send + Sync>;

/// Options of [`run_suite_with`].
#[derive(Clone)]
pub struct RunOptions {
    pub y_builder: YBuilder,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { y_builder: Arc::new(|lam, ctx| y_operator(lam, ctx)) }
    }
}

/// The antidominant generators −λ_1, …, −λ_l of M̂_−.
pub fn generators(d: &RootDatum) -> Vec<QVec> {
    d.basis.lambda.iter().map(|l| linalg::neg(l)).collect()
}

/// Translation lengths ℓ(t_{−λ_i}) of the rank-3 fixtures: the node of the
/// long simple root first, then the node of the short one.
pub const REFERENCE_LENGTHS: [(&str, &[usize]); 6] = [
    ("A2~1", &[2, 2]),
    ("C2~1", &[3, 4]),
    ("G2~1", &[6, 10]),
    ("A4~2", &[6, 4]),
    ("D3~2", &[4, 3]),
    ("D4~3", &[10, 6]),
];

/// Runs `checks` (names from [`CHECK_NAMES`]) with the default options.
pub fn run_suite(cfg: &ScenarioConfig, checks: &[String]) -> Result<Report> {
    run_suite_with(cfg, checks, &RunOptions::default())
}

/// Runs `checks` in the given order. Unknown names are a configuration error;
/// an empty list yields an empty report.
pub fn run_suite_with(cfg: &ScenarioConfig, checks: &[String], opts: &RunOptions) -> Result<Report> {
    for c in checks {
        if !CHECK_NAMES.contains(&c.as_str()) {
            return Err(Error::Config(format!("unknown check {c:?}; known checks: {}", CHECK_NAMES.join(", "))));
        }
    }
    let ctx = cfg.context()?;
    let d = ctx.datum.clone();
    let env = Env { cfg, gens: generators(&d), d, ctx, opts };
    let mut reports = Vec::with_capacity(checks.len());
    for name in checks {
        let idx = CHECK_NAMES.iter().position(|n| n == name).expect("validated");
        let mut sampler = Sampler::new(cfg.seed ^ (idx as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let start = Instant::now();
        let outcome = match name.as_str() {
            "yang_baxter" => yang_baxter(&env, &mut sampler),
            "unitarity" => unitarity(&env, &mut sampler),
            "reduced_word_independence" => reduced_word_independence(&env, &mut sampler),
            "commutativity" => commutativity(&env, &mut sampler),
            "weyl_invariance" => weyl_invariance(&env, &mut sampler),
            "closed_form_equiv" => closed_form_equiv(&env, &mut sampler),
            "bar_representation" => bar_representation(&env, &mut sampler),
            "lengths_vs_bfs" => lengths_vs_bfs(&env, &mut sampler),
            "theta_quasiperiodicity" => theta_quasiperiodicity(&env, &mut sampler),
            "theta_closure" => theta_closure(&env, &mut sampler),
            "leading_term" => leading_term_check(&env, &mut sampler),
            _ => unreachable!(),
        }?;
        let seconds = if cfg.timing { start.elapsed().as_secs_f64() } else { 0.0 };
        reports.push(outcome.into_report(name, seconds));
    }
    Ok(Report { scenario: cfg.clone(), checks: reports })
}

struct Env<'a> {
    cfg: &'a ScenarioConfig,
    ctx: Context,
    d: Arc<RootDatum>,
    gens: Vec<QVec>,
    opts: &'a RunOptions,
}

impl Env<'_> {
    fn y(&self, lam: &[Q]) -> Result<Operator> {
        (self.opts.y_builder)(lam, &self.ctx)
    }

    fn n(&self) -> usize {
        self.cfg.sample_points
    }

    fn generic(&self) -> bool {
        self.cfg.mode == Mode::Generic
    }

    /// Draws regular points until `n` evaluations succeed, in parallel per
    /// batch; points hitting a numeric guard are redrawn (at most 4n draws).
    fn evaluate<T, F>(&self, s: &mut Sampler, n: usize, eval: F) -> Result<Vec<(Vec<C64>, T)>>
    where
        T: Send,
        F: Fn(&[C64]) -> Result<T> + Sync,
    {
        let mut out = Vec::with_capacity(n);
        let mut draws = 0;
        let mut last = None;
        while out.len() < n {
            if draws >= 4 * n {
                return Err(last.unwrap_or(Error::Pole { magnitude: 0.0, guard: self.ctx.series.pole_guard }));
            }
            let need = n - out.len();
            let points: Vec<Vec<C64>> =
                (0..need).map(|_| s.regular_point(&self.d, self.ctx.tau, &self.ctx.series)).collect::<Result<_>>()?;
            draws += need;
            let values: Vec<Result<T>> = points.par_iter().map(|p| eval(p)).collect();
            for (p, v) in points.into_iter().zip(values) {
                match v {
                    Ok(v) => out.push((p, v)),
                    Err(e) if e.is_numeric() => last = Some(e),
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(out)
    }

    /// `a f` against `b f` at `n` points.
    fn compare(&self, label: String, key: &str, a: &Operator, b: &Operator, f: &ExpSum, s: &mut Sampler) -> Result<Part> {
        let d = &*self.d;
        let g = |x: &[C64]| Ok(f.eval(d, x));
        let rows = self.evaluate(s, self.n(), |p| Ok((a.apply(&g, p)?, b.apply(&g, p)?)))?;
        Ok(self.part(label, key, rows.iter().map(|(p, (x, y))| (p.as_slice(), (x - y).norm(), x.norm().max(y.norm())))))
    }

    /// `A_1 ⋯ A_r f ≈ 0` at `n` points, relative to the sum of the absolute
    /// values of all unexpanded terms of the product.
    fn annihilates(&self, label: String, key: &str, chain: &[&Operator], f: &ExpSum, s: &mut Sampler) -> Result<Part> {
        let rows = self.evaluate(s, self.n(), |p| abs_apply(&self.d, chain, f, p))?;
        Ok(self.part(label, key, rows.iter().map(|(p, (v, m))| (p.as_slice(), v.norm(), *m))))
    }

    /// Reduces (point, |difference|, magnitude) rows to max|diff| / max magnitude.
    fn part<'p>(&self, label: String, key: &str, rows: impl Iterator<Item = (&'p [C64], f64, f64)>) -> Part {
        let mut num = 0.0f64;
        let mut scale = 0.0f64;
        let mut worst = None;
        let mut samples = 0;
        for (p, diff, mag) in rows {
            samples += 1;
            if worst.is_none() || !(diff <= num) {
                num = diff;
                worst = Some(p.iter().map(|z| [z.re, z.im]).collect());
            }
            scale = scale.max(mag);
        }
        let residual = if scale > 0.0 { num / scale } else { num };
        Part::new(self.cfg, label, key, residual, scale, samples, worst)
    }

    /// An exact comparison: `mismatches` out of `total`.
    fn exact(&self, label: String, key: &str, mismatches: usize, total: usize) -> Part {
        Part::new(self.cfg, label, key, mismatches as f64, total as f64, total, None)
    }
}

/// `(A_1 ⋯ A_r f)(p)` together with Σ |c^1_{g_1}| ⋯ |c^r_{g_r}| |f(⋯)| over
/// all term combinations.
fn abs_apply(d: &RootDatum, chain: &[&Operator], f: &ExpSum, p: &[C64]) -> Result<(C64, f64)> {
    let Some((op, rest)) = chain.split_first() else {
        let v = f.eval(d, p);
        return Ok((v, v.norm()));
    };
    let mut v = C64::new(0.0, 0.0);
    let mut mag = 0.0;
    for (g, c) in op.expand_at(p)? {
        let (w, m) = abs_apply(d, rest, f, &g.inverse_act_on_point(d, p, op.kappa()))?;
        v += c * w;
        mag += c.norm() * m;
    }
    Ok((v, mag))
}

/// One sub-comparison of a check, with its own tolerance key.
#[derive(Clone, Debug, Serialize)]
struct Part {
    label: String,
    tolerance_key: String,
    tolerance: f64,
    residual: f64,
    scale: f64,
    samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    worst_point: Option<Vec<[f64; 2]>>,
}

impl Part {
    fn new(cfg: &ScenarioConfig, label: String, key: &str, residual: f64, scale: f64, samples: usize, worst: Option<Vec<[f64; 2]>>) -> Part {
        // non-finite values fail and stay representable in JSON
        let residual = if residual.is_finite() { residual } else { f64::MAX };
        let scale = if scale.is_finite() { scale } else { f64::MAX };
        Part { label, tolerance_key: key.to_string(), tolerance: cfg.tolerance(key), residual, scale, samples, worst_point: worst }
    }

    fn passes(&self) -> bool {
        self.residual <= self.tolerance
    }

    /// Residual in units of the tolerance (used to pick the worst part).
    fn severity(&self) -> f64 {
        if self.tolerance > 0.0 {
            self.residual / self.tolerance
        } else if self.residual > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    }
}

enum Outcome {
    Parts(Vec<Part>, Map<String, Value>),
    Skipped(String),
}

impl Outcome {
    fn parts(parts: Vec<Part>) -> Result<Outcome> {
        Ok(Outcome::Parts(parts, Map::new()))
    }

    fn into_report(self, name: &str, seconds: f64) -> CheckReport {
        match self {
            Outcome::Skipped(reason) => CheckReport {
                name: name.to_string(),
                status: Status::Skipped,
                residual: 0.0,
                scale: 0.0,
                samples: 0,
                seconds,
                diagnostics: json!({ "reason": reason }),
            },
            Outcome::Parts(parts, mut extra) => {
                let worst = parts.iter().enumerate().fold(None, |acc: Option<(usize, f64)>, (i, p)| match acc {
                    Some((_, s)) if s >= p.severity() => acc,
                    _ => Some((i, p.severity())),
                });
                let status = if parts.iter().all(Part::passes) { Status::Pass } else { Status::Fail };
                let residual = parts.iter().map(|p| p.residual).fold(0.0, f64::max);
                let (scale, worst_point) = match worst {
                    Some((i, _)) => (parts[i].scale, parts[i].worst_point.clone()),
                    None => (0.0, None),
                };
                if let Some((i, _)) = worst {
                    extra.insert("worst_part".into(), json!(parts[i].label));
                }
                if let Some(p) = worst_point {
                    extra.insert("worst_point".into(), json!(p));
                }
                extra.insert("parts".into(), serde_json::to_value(&parts).expect("parts serialize"));
                CheckReport {
                    name: name.to_string(),
                    status,
                    residual,
                    scale,
                    samples: parts.iter().map(|p| p.samples).sum(),
                    seconds,
                    diagnostics: Value::Object(extra),
                }
            }
        }
    }
}

fn braid_order(d: &RootDatum, i: usize, j: usize) -> Option<usize> {
    match d.cartan[i][j] * d.cartan[j][i] {
        0 => Some(2),
        1 => Some(3),
        2 => Some(4),
        3 => Some(6),
        _ => None,
    }
}

fn lambda_label(i: usize) -> String {
    format!("λ_{}", i + 1)
}

/// R̂-chains of the two sides of every braid relation r_i r_j r_i ⋯ = r_j r_i r_j ⋯.
fn yang_baxter(env: &Env, s: &mut Sampler) -> Result<Outcome> {
    let d = &*env.d;
    let f = s.exp_sum(d, 3, 1);
    let mut parts = vec![];
    for i in 0..=d.l {
        for j in (i + 1)..=d.l {
            let Some(m) = braid_order(d, i, j) else { continue };
            let word = |a: usize, b: usize| ReducedWord {
                letters: (0..m).map(|k| if k % 2 == 0 { a } else { b }).collect(),
                omega: ExtendedWeylElement::identity(d.l),
            };
            let lhs = r_chain(&inversion_sequence(d, &word(i, j))?, &env.ctx)?;
            let rhs = r_chain(&inversion_sequence(d, &word(j, i))?, &env.ctx)?;
            parts.push(env.compare(format!("braid ({i},{j}), m = {m}"), "yang_baxter", &lhs, &rhs, &f, s)?);
        }
    }
    Outcome::parts(parts)
}

/// R̂_α R̂_{−α} = u_α · Id for every simple affine root, and R̂_α R̂_{−α} = 0
/// on the locus ⟨ξ,α^∨⟩ = ±μ_α.
fn unitarity(env: &Env, s: &mut Sampler) -> Result<Outcome> {
    let d = env.d.clone();
    let f = s.exp_sum(&d, 3, 1);
    let mut parts = vec![];
    let pair = |a: &AffineRoot, ctx: &Context| -> Result<[Operator; 2]> { Ok([r_matrix(a, ctx)?, r_matrix(&a.neg(), ctx)?]) };
    for i in 0..=d.l {
        let a = d.simple[i].clone();
        let [r, rn] = pair(&a, &env.ctx)?;
        let u = unitarity_scalar(&a, &env.ctx)?;
        if u.norm() > 1e-10 {
            let id = Operator::identity(d.clone(), env.ctx.kappa()).scale(u);
            parts.push(env.compare(format!("α_{i}"), "unitarity", &r.compose(&rn), &id, &f, s)?);
        } else {
            // the scenario's ξ already sits on the degenerate locus
            parts.push(env.annihilates(format!("α_{i}, degenerate"), "unitarity_degenerate", &[&r, &rn], &f, s)?);
        }
    }
    for i in 1..=d.l {
        let a = d.simple[i].clone();
        let mu = env.ctx.couplings.mu_of(&d, &a)?;
        for sign in [1.0, -1.0] {
            let cur = env.ctx.xi_pairing(&a.finite);
            let xi = env.ctx.spectral.xi.iter().zip(&a.finite).map(|(x, c)| x + 0.5 * (sign * mu - cur) * linalg::to_f64(c)).collect();
            let shifted = env.ctx.clone().with_xi(xi);
            let [r, rn] = pair(&a, &shifted)?;
            let label = format!("α_{i} at ⟨ξ,α^∨⟩ = {}μ", if sign > 0.0 { "+" } else { "−" });
            parts.push(env.annihilates(label, "unitarity_degenerate", &[&r, &rn], &f, s)?);
        }
    }
    Outcome::parts(parts)
}

/// Reduced word by greedy left descent with the largest available index.
fn left_greedy_largest(d: &RootDatum, w: &ExtendedWeylElement) -> ReducedWord {
    let mut w = w.clone();
    let mut letters = vec![];
    loop {
        let inv = w.inverse(d);
        let Some(i) = (0..=d.l).rev().find(|&i| !inv.act_on_root(d, &d.simple[i]).is_positive()) else { break };
        letters.push(i);
        w = ExtendedWeylElement::simple_reflection(d, i).mul(d, &w);
    }
    ReducedWord { letters, omega: w }
}

/// Reduced word by greedy right descent (smallest or largest index first),
/// with the length-zero part moved to the right.
fn right_greedy(d: &RootDatum, w: &ExtendedWeylElement, largest: bool) -> Option<ReducedWord> {
    let target = w.clone();
    let mut w = w.clone();
    let mut rev = vec![];
    loop {
        let mut order: Vec<usize> = (0..=d.l).collect();
        if largest {
            order.reverse();
        }
        let Some(i) = order.into_iter().find(|&i| !w.act_on_root(d, &d.simple[i]).is_positive()) else { break };
        rev.push(i);
        w = w.mul(d, &ExtendedWeylElement::simple_reflection(d, i));
    }
    // target = ω · s_{rev[last]} ⋯ s_{rev[0]}; conjugate the letters past ω
    let letters: Vec<usize> = rev.into_iter().rev().collect();
    let perm = w.omega_permutation(d)?;
    let inverse: Vec<usize> = (0..perm.len()).map(|i| perm.iter().position(|&x| x == i).expect("permutation")).collect();
    [perm, inverse].into_iter().map(|p| ReducedWord { letters: letters.iter().map(|&i| p[i]).collect(), omega: w.clone() }).find(|r| r.to_element(d) == target)
}

/// Ŷ^λ built along the canonical reduced word of t_λ and along the first
/// differing alternative word, for the generators and their pairwise sums
/// (translations longer than 16 are left out).
fn reduced_word_independence(env: &Env, s: &mut Sampler) -> Result<Outcome> {
    let d = &*env.d;
    let f = s.exp_sum(d, 3, 1);
    let mut parts = vec![];
    let mut words = vec![];
    let mut weights: Vec<(String, QVec)> = env.gens.iter().enumerate().map(|(i, l)| (lambda_label(i), l.clone())).collect();
    for i in 0..d.l {
        for j in i..d.l {
            let lam = linalg::add(&env.gens[i], &env.gens[j]);
            if translation_length(d, &lam)? <= 16 {
                weights.push((format!("{} + {}", lambda_label(i), lambda_label(j)), lam));
            }
        }
    }
    for (label, lam) in &weights {
        let t = ExtendedWeylElement::translation(lam);
        let w1 = t.reduced_word(d);
        let candidates = [Some(left_greedy_largest(d, &t)), right_greedy(d, &t, false), right_greedy(d, &t, true)];
        let alt = candidates.into_iter().flatten().find(|w| w.letters != w1.letters);
        words.push(json!({ "weight": label, "canonical": w1.letters, "alternative": alt.as_ref().map(|w| w.letters.clone()) }));
        let Some(w2) = alt else { continue };
        let a = y_operator_with_word(lam, &w1, &env.ctx)?;
        let b = y_operator_with_word(lam, &w2, &env.ctx)?;
        parts.push(env.compare(label.clone(), "reduced_word_independence", &a, &b, &f, s)?);
    }
    let mut extra = Map::new();
    extra.insert("words".into(), Value::Array(words));
    Ok(Outcome::Parts(parts, extra))
}

/// [Ŷ^λ_i, Ŷ^λ_j] = 0 and Ŷ^λ_i Ŷ^λ_j = Ŷ^{λ_i+λ_j}; Ŷ^λ Ŷ^λ = Ŷ^{2λ} in rank 1.
fn commutativity(env: &Env, s: &mut Sampler) -> Result<Outcome> {
    let d = &*env.d;
    let f = s.exp_sum(d, 3, 1);
    let ys: Vec<Operator> = env.gens.iter().map(|l| env.y(l)).collect::<Result<_>>()?;
    let mut parts = vec![];
    for i in 0..d.l {
        for j in (i + 1)..d.l {
            let a = ys[i].compose(&ys[j]);
            let b = ys[j].compose(&ys[i]);
            let sum = env.y(&linalg::add(&env.gens[i], &env.gens[j]))?;
            parts.push(env.compare(format!("[Y^{}, Y^{}]", lambda_label(i), lambda_label(j)), "commutativity", &a, &b, &f, s)?);
            parts.push(env.compare(format!("Y^{} Y^{} = Y^sum", lambda_label(i), lambda_label(j)), "commutativity", &a, &sum, &f, s)?);
        }
    }
    if d.l == 1 {
        let a = ys[0].compose(&ys[0]);
        let double = env.y(&linalg::scale(q(2), &env.gens[0]))?;
        parts.push(env.compare("Y^λ Y^λ = Y^2λ".into(), "commutativity", &a, &double, &f, s)?);
    }
    Outcome::parts(parts)
}

/// On W̊-invariant f: Ŷ^λ f is again W̊-invariant and R̂_{−α_j} Ŷ^λ f = 0.
fn weyl_invariance(env: &Env, s: &mut Sampler) -> Result<Outcome> {
    if env.generic() {
        return Ok(Outcome::Skipped("needs ξ = −ρ̊_μ (invariant or manual mode)".into()));
    }
    let d = &*env.d;
    let f = s.symmetric_exp_sum(d, 2, 1);
    let g = |x: &[C64]| Ok(f.eval(d, x));
    let group = finite_weyl_group(d);
    let kappa = env.ctx.kappa();
    let mut parts = vec![];
    let mut supports = vec![];
    for (i, lam) in env.gens.iter().enumerate() {
        let y = env.y(lam)?;
        supports.push(y.support().len());
        let rows = env.evaluate(s, env.n(), |p| {
            let base = y.apply(&g, p)?;
            let moved: Vec<C64> = group.iter().map(|w| y.apply(&g, &w.act_on_point(p, kappa))).collect::<Result<_>>()?;
            Ok((base, moved))
        })?;
        let diffs = rows.iter().flat_map(|(p, (base, moved))| moved.iter().map(move |v| (p.as_slice(), (v - base).norm(), v.norm().max(base.norm()))));
        parts.push(env.part(format!("Y^{} f ∘ w", lambda_label(i)), "weyl_invariance", diffs));
        for j in 1..=d.l {
            let r = r_matrix(&d.simple[j].neg(), &env.ctx)?.compose(&y);
            let rows = env.evaluate(s, env.n(), |p| Ok((r.apply(&g, p)?, y.apply(&g, p)?)))?;
            let label = format!("R_(−α_{j}) Y^{} f", lambda_label(i));
            parts.push(env.part(label, "weyl_invariance", rows.iter().map(|(p, (v, b))| (p.as_slice(), v.norm(), b.norm()))));
        }
    }
    let mut extra = Map::new();
    extra.insert("support_sizes".into(), json!(supports));
    extra.insert("group_order".into(), json!(group.len()));
    Ok(Outcome::Parts(parts, extra))
}

/// Closed forms against Ŷ on W̊-invariant functions: the minuscule form, the
/// quasi-minuscule form and, for A^(1)_{l−1} with l ≤ 4, the Ruijsenaars-type operator.
fn closed_form_equiv(env: &Env, s: &mut Sampler) -> Result<Outcome> {
    if env.generic() {
        return Ok(Outcome::Skipped("closed forms hold at ξ = −ρ̊_μ only (invariant or manual mode)".into()));
    }
    let d = &*env.d;
    let f = s.symmetric_exp_sum(d, 2, 1);
    let mut parts = vec![];
    for (i, lam) in env.gens.iter().enumerate() {
        if is_minuscule(d, &linalg::neg(lam)) {
            let y = env.y(lam)?;
            let m = minuscule_closed_form(lam, &env.ctx)?;
            parts.push(env.compare(format!("minuscule {}", lambda_label(i)), "closed_form_equiv", &y, &m, &f, s)?);
        }
    }
    if !d.ty.is_untwisted_a() {
        let nu = linalg::neg(&quasi_minuscule(d));
        let y = env.y(&nu)?;
        let qm = quasi_minuscule_closed_form(&env.ctx, QminConstant::Reflection)?;
        parts.push(env.compare("quasi-minuscule".into(), "closed_form_equiv", &y, &qm, &f, s)?);
    } else if d.l + 1 <= 4 {
        let y = env.y(&env.gens[0])?;
        let e = explicit_a1_operator(d.l + 1, &env.ctx)?;
        parts.push(env.compare("Ruijsenaars-type operator".into(), "closed_form_equiv", &y, &e, &f, s)?);
    }
    Outcome::parts(parts)
}

/// The bar/hat identity along the words of the generators, gauge independence
/// of R̄_α, and Ȳ^λ = Ŷ^λ when ξ = −ρ̊_μ.
fn bar_representation(env: &Env, s: &mut Sampler) -> Result<Outcome> {
    let d = &*env.d;
    let ctx = &env.ctx;
    let f = s.exp_sum(d, 3, 1);
    let mut parts = vec![];
    for (i, lam) in env.gens.iter().enumerate() {
        let w = ExtendedWeylElement::translation(lam).reduced_word(d);
        let lhs = bar_product(&w, ctx)?;
        let rhs = bar_product_rhs(&w, ctx)?;
        parts.push(env.compare(format!("bar/hat {}", lambda_label(i)), "bar_representation", &lhs, &rhs, &f, s)?);
    }
    for a in d.positive_roots_up_to(q(1)).into_iter().take(4) {
        // a gauge η with ⟨η, ᾱ^∨⟩ = 0
        let v: Vec<C64> = (0..d.l).map(|_| s.complex(1.0)).collect();
        let ac: Vec<C64> = a.finite.iter().map(|x| C64::new(linalg::to_f64(x), 0.0)).collect();
        let coef = d.pair_cc(&v, &ac) / linalg::to_f64(&d.sq(&a.finite));
        let eta: Vec<C64> = v.iter().zip(&ac).map(|(x, y)| x - coef * y).collect();
        let r0 = bar_r_matrix(&a, ctx)?;
        let r1 = bar_r_matrix_with_eta(&a, &eta, ctx)?;
        parts.push(env.compare(format!("gauge {a}"), "bar_representation", &r0, &r1, &f, s)?);
    }
    if ctx.is_invariant_mode() {
        for (i, lam) in env.gens.iter().enumerate() {
            let bar = bar_y_operator(lam, ctx)?;
            let y = env.y(lam)?;
            parts.push(env.compare(format!("Ȳ = Ŷ at {}", lambda_label(i)), "bar_representation", &bar, &y, &f, s)?);
        }
    }
    Outcome::parts(parts)
}

/// Exact length combinatorics: ℓ(w) against breadth-first search up to length
/// 8, translation lengths three ways, reference factor counts, and
/// −Σ_{α∈Δ_{t_λ}} μ_α ᾱ = h^∨_μ λ for random rational couplings.
fn lengths_vs_bfs(env: &Env, s: &mut Sampler) -> Result<Outcome> {
    let d = &*env.d;
    let key = "lengths_vs_bfs";
    let mut parts = vec![];

    let bfs = bfs_word_lengths(d, 8);
    let bad = bfs.iter().filter(|(w, &len)| w.length(d) != len).count();
    parts.push(env.exact("ℓ(w) vs breadth-first search, ℓ ≤ 8".into(), key, bad, bfs.len()));

    let mut weights = env.gens.clone();
    for i in 0..d.l {
        for j in i..d.l {
            weights.push(linalg::add(&env.gens[i], &env.gens[j]));
        }
    }
    let mut bad = 0;
    for lam in &weights {
        let closed = translation_length(d, lam)?;
        let by_set = translation_inversion_set(d, lam)?.len();
        let by_elem = ExtendedWeylElement::translation(lam).length(d);
        bad += usize::from(closed != by_set || closed != by_elem);
    }
    for i in 0..d.l {
        for j in i..d.l {
            let sum = translation_length(d, &linalg::add(&env.gens[i], &env.gens[j]))?;
            bad += usize::from(sum != translation_length(d, &env.gens[i])? + translation_length(d, &env.gens[j])?);
        }
    }
    parts.push(env.exact("translation lengths: closed form, inversion set, element, additivity".into(), key, bad, weights.len() + d.l * (d.l + 1) / 2));

    let name = d.ty.to_string();
    let mut extra = Map::new();
    let lengths: Vec<usize> = env.gens.iter().map(|l| translation_length(d, l)).collect::<Result<_>>()?;
    extra.insert("generator_lengths".into(), json!(lengths));
    if let Some((_, want)) = REFERENCE_LENGTHS.iter().find(|(t, _)| *t == name) {
        let long_first = d.sq(&d.simple_finite(0)) >= d.sq(&d.simple_finite(1));
        let got = if long_first { [lengths[0], lengths[1]] } else { [lengths[1], lengths[0]] };
        let bad = got.iter().zip(want.iter()).filter(|(a, b)| a != b).count();
        parts.push(env.exact("reference factor counts".into(), key, bad, want.len()));
    }

    let mut bad = 0;
    let trials = 100;
    for _ in 0..trials {
        let mu: Vec<Q> = (0..d.num_classes()).map(|_| Q::new(s.integer(-6, 6), s.integer(1, 4))).collect();
        let mut lam = vec![Q::from_integer(0); d.l];
        for g in &env.gens {
            lam = linalg::add(&lam, &linalg::scale(q(s.integer(0, 3)), g));
        }
        let lhs = inversion_mu_sum(d, &lam, &mu)?;
        let rhs = linalg::scale(h_vee_mu(d, &mu)?, &lam);
        bad += usize::from(lhs != rhs);
    }
    parts.push(env.exact("−Σ μ_α ᾱ over Δ_{t_λ} = h^∨_μ λ".into(), key, bad, trials));
    Ok(Outcome::Parts(parts, extra))
}

/// ϑ_1′(0) = 2πη³ at random τ, and the level-k basis under the Heisenberg
/// shifts: periodic under coroots, multiplier under τ·M.
fn theta_quasiperiodicity(env: &Env, s: &mut Sampler) -> Result<Outcome> {
    let d = &*env.d;
    let cfg = &env.ctx.series;
    let key = "theta_quasiperiodicity";
    let mut parts = vec![];

    let lo = cfg.tau_floor.max(0.5);
    let mut taus = vec![env.ctx.tau];
    taus.extend((0..10).map(|_| C64::new(s.uniform(-0.5, 0.5), s.uniform(lo, 1.5))));
    let mut worst: f64 = 0.0;
    for tau in &taus {
        let r = theta1_prime_zero_classical(*tau, cfg)? / eta(*tau, cfg)?.powi(3);
        worst = worst.max((r - 2.0 * PI).norm() / (2.0 * PI));
    }
    parts.push(Part::new(env.cfg, "ϑ_1′(0) / η³ = 2π".into(), key, worst, 2.0 * PI, taus.len(), None));

    let k = env.cfg.level_k;
    let tau = env.ctx.tau;
    let basis = theta_basis(d, k)?;
    let points: Vec<Vec<C64>> = (0..env.n()).map(|_| s.point(d.l, tau).into_iter().map(|z| 0.5 * z).collect()).collect();
    let shift = |p: &[C64], v: &[Q], step: C64| -> Vec<C64> { p.iter().zip(v).map(|(x, c)| x + step * linalg::to_f64(c)).collect() };
    // per point: (relative error, magnitude) for each comparison
    let rows: Vec<Vec<(bool, f64, f64)>> = points
        .par_iter()
        .map(|p| {
            let mut out = vec![];
            for b in &basis {
                let v = b.eval(p, tau, cfg)?;
                for cor in &d.basis.coroots.basis {
                    let w = b.eval(&shift(p, cor, C64::new(1.0, 0.0)), tau, cfg)?;
                    let m = w.norm().max(v.norm());
                    out.push((true, (w - v).norm() / m.max(f64::MIN_POSITIVE), m));
                }
                for m in &d.basis.m.basis {
                    let w = b.eval(&shift(p, m, tau), tau, cfg)?;
                    let want = theta_shift_factor(d, k, m, p, tau) * v;
                    let mag = w.norm().max(want.norm());
                    out.push((false, (w - want).norm() / mag.max(f64::MIN_POSITIVE), mag));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    for (periodic, label) in [(true, "periodicity under coroots"), (false, "multiplier under τ·M")] {
        let it = points.iter().zip(&rows).flat_map(|(p, r)| r.iter().filter(move |x| x.0 == periodic).map(move |x| (p.as_slice(), x.1, x.2)));
        let mut res = 0.0f64;
        let mut scale = 0.0f64;
        let mut worst = None;
        let mut n = 0;
        for (p, rel, mag) in it {
            n += 1;
            if worst.is_none() || !(rel <= res) {
                res = rel;
                worst = Some(p.iter().map(|z| [z.re, z.im]).collect());
            }
            scale = scale.max(mag);
        }
        parts.push(Part::new(env.cfg, format!("level-{k} basis: {label}"), key, res, scale, n, worst));
    }
    let mut extra = Map::new();
    extra.insert("basis_size".into(), json!(basis.len()));
    Ok(Outcome::Parts(parts, extra))
}

/// Least-squares closure of Ŷ^{λ_i} on the W̊-invariant level-k theta span.
fn theta_closure(env: &Env, s: &mut Sampler) -> Result<Outcome> {
    if env.generic() {
        return Ok(Outcome::Skipped("closure requires ξ = −ρ̊_μ and κ = h^∨_μ/k (invariant or manual mode)".into()));
    }
    let d = &*env.d;
    let basis = symmetrize_basis(d, env.cfg.level_k)?;
    let mut parts = vec![];
    let mut fits = vec![];
    for (i, lam) in env.gens.iter().enumerate() {
        let op = env.y(lam)?;
        let fit = fit_closure(&op, &basis, env.ctx.tau, &env.ctx.series, s, 3, 3)?;
        parts.push(Part::new(env.cfg, format!("Y^{}", lambda_label(i)), "theta_closure", fit.residual, fit.scale, fit.samples, None));
        fits.push(json!({ "weight": lambda_label(i), "attempts": fit.attempts, "worst_basis_index": fit.worst, "matrix": fit.matrix }));
    }
    let mut extra = Map::new();
    extra.insert("dimension".into(), json!(basis.len()));
    extra.insert("kappa".into(), json!([env.ctx.kappa().re, env.ctx.kappa().im]));
    extra.insert("fits".into(), Value::Array(fits));
    Ok(Outcome::Parts(parts, extra))
}

/// The coefficient of t_λ in Ŷ^λ equals Π_{α∈Δ_{t_λ}} H_α(μ_α), and distinct
/// generators have distinct leading translations.
fn leading_term_check(env: &Env, s: &mut Sampler) -> Result<Outcome> {
    let d = &*env.d;
    let mut parts = vec![];
    let mut keys: Vec<ExtendedWeylElement> = vec![];
    for (i, lam) in env.gens.iter().enumerate() {
        let y = env.y(lam)?;
        let lt = leading_term(lam, &env.ctx)?;
        let t = ExtendedWeylElement::translation(lam);
        let rows = env.evaluate(s, env.n(), |p| Ok((y.coefficient_at(&t, p)?, lt.eval(p)?)))?;
        parts.push(env.part(lambda_label(i), "leading_term", rows.iter().map(|(p, (a, b))| (p.as_slice(), (a - b).norm(), a.norm().max(b.norm())))));
        if !keys.contains(&t) {
            keys.push(t);
        }
    }
    parts.push(env.exact("distinct leading translations".into(), "leading_term", d.l - keys.len(), d.l));
    Outcome::parts(parts)
}
