use ellroot::harness::sampling::{relative_residual, ExpSum, Sampler};
use ellroot::linalg::{self, q, qf, Q};
use ellroot::operator::*;
use ellroot::root_system::*;
use ellroot::theta::{jacobi_theta, sigma_nu, theta1_prime_zero, theta_upper, SeriesConfig};
use ellroot::weyl::*;
use num_complex::Complex64 as C64;
use std::sync::Arc;

const TAU: C64 = C64 { re: 0.13, im: 1.05 };

fn datum(t: &str) -> Arc<RootDatum> {
    Arc::new(build_root_datum(t.parse().unwrap()).unwrap())
}

fn class_mu(d: &RootDatum) -> Vec<C64> {
    let base = [C64::new(0.31, 0.07), C64::new(0.23, -0.05), C64::new(0.17, 0.04)];
    (0..d.num_classes()).map(|c| base[c]).collect()
}

/// Generic context: class-dependent μ, random generic ξ, κ off any special value.
fn generic_ctx(t: &str, seed: u64) -> (Context, Sampler) {
    let d = datum(t);
    let couplings = Couplings::per_class(&d, class_mu(&d)).unwrap();
    let spectral = Spectral { xi: vec![C64::new(0.0, 0.0); d.l], kappa: C64::new(0.29, 0.03) };
    let ctx = Context::new(d, TAU, couplings, spectral, SeriesConfig::default()).unwrap();
    let mut s = Sampler::new(seed);
    let xi = s.generic_xi(&ctx).unwrap();
    (ctx.with_xi(xi), s)
}

fn invariant_ctx(t: &str, mu: C64, k: u32) -> Context {
    let d = datum(t);
    let couplings = Couplings::uniform(&d, mu);
    Context::invariant(d, TAU, couplings, k, SeriesConfig::default()).unwrap()
}

/// Applies both operators to `f` at `n` regular points and returns the relative residual.
fn compare(a: &Operator, b: &Operator, f: &ExpSum, s: &mut Sampler, ctx: &Context, n: usize) -> f64 {
    let d = ctx.datum.clone();
    let (mut xa, mut xb) = (vec![], vec![]);
    while xa.len() < n {
        let p = s.regular_point(&d, ctx.tau, &ctx.series).unwrap();
        let g = |x: &[C64]| Ok(f.eval(&d, x));
        match (a.apply(&g, &p), b.apply(&g, &p)) {
            (Ok(u), Ok(v)) => {
                xa.push(u);
                xb.push(v);
            }
            (Err(e), _) | (_, Err(e)) => assert!(e.is_numeric(), "{e}"),
        }
    }
    relative_residual(&xa, &xb).0
}

fn braid_word(i: usize, j: usize, m: usize) -> Vec<usize> {
    (0..m).map(|k| if k % 2 == 0 { i } else { j }).collect()
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

#[test]
fn h_matches_sigma_and_direct_forms() {
    let (ctx, mut s) = generic_ctx("G2~1", 1);
    let d = ctx.datum.clone();
    let cfg = &ctx.series;
    for a in d.positive_roots_up_to(q(3)) {
        let class = d.class_of(&a).unwrap();
        let g = linalg::to_f64(&d.classes[class].gamma);
        let mu = ctx.couplings.mu[class];
        let nu = C64::new(0.21, 0.13);
        let p = s.regular_point(&d, ctx.tau, cfg).unwrap();
        let z = d.pair_point(&a.finite, &p) + ctx.kappa() * linalg::to_f64(&a.delta);
        let got = h_alpha_at(&a, nu, &p, &ctx).unwrap();
        let paper = theta_upper(1, -g * mu, g, ctx.tau, cfg).unwrap() / theta1_prime_zero(g, ctx.tau, cfg).unwrap()
            * sigma_nu(g * nu, z, g, ctx.tau, cfg).unwrap();
        let gt = g * ctx.tau;
        let th = |w: C64| jacobi_theta(1, w, gt, cfg).unwrap();
        let direct = th(-g * mu) * th(z - g * nu) / (th(z) * th(-g * nu));
        assert!((got - paper).norm() < 1e-12 * paper.norm(), "{a}");
        assert!((got - direct).norm() < 1e-12 * direct.norm(), "{a}");
    }
}

#[test]
fn h_multi_slot_a2l_short_root() {
    // Four slots (2,1),(2,2),(1,1),(1,½) on the half-root class of A^(2)_4.
    let d = datum("A4~2");
    let half = d.classes.iter().position(|c| c.name == "half").unwrap();
    let zeta = [C64::new(0.7, 0.1), C64::new(-0.3, 0.2), C64::new(0.5, -0.4), C64::new(0.2, 0.3)];
    let couplings = Couplings::per_class(&d, class_mu(&d)).unwrap().with_zeta(&d, half, zeta).unwrap();
    let ctx = Context::new(d.clone(), TAU, couplings, Spectral { xi: vec![C64::new(0.3, 0.1), C64::new(-0.2, 0.05)], kappa: C64::new(0.4, 0.0) }, SeriesConfig::default()).unwrap();
    let a = AffineRoot::new(d.half_roots[0].clone(), qf(1, 2));
    let p = vec![C64::new(0.31, 0.12), C64::new(0.77, -0.2)];
    let nu = C64::new(0.19, -0.08);
    let cfg = &ctx.series;
    let z = d.pair_point(&a.finite, &p) + ctx.kappa() * 0.5;
    let mu = ctx.couplings.mu[half];
    let slots = [(2.0, 1.0), (2.0, 2.0), (1.0, 1.0), (1.0, 0.5)];
    let mut want = C64::new(0.0, 0.0);
    for (j, (m, n)) in slots.iter().enumerate() {
        let g: f64 = *n;
        let a_: f64 = g / m;
        let th = |w: C64| jacobi_theta(1, w, g * ctx.tau, cfg).unwrap();
        want += zeta[j] * th(-a_ * mu) * th(m * z - a_ * nu) / (th(m * z) * th(-a_ * nu));
    }
    let got = h_alpha_at(&a, nu, &p, &ctx).unwrap();
    assert!((got - want).norm() < 1e-12 * want.norm());
    // ζ in a slot outside N_α is rejected.
    let long = d.classes.iter().position(|c| c.name == "long").unwrap();
    let d3 = datum("D3~2");
    let long3 = d3.classes.iter().position(|c| c.name == "long").unwrap();
    assert!(Couplings::uniform(&d3, C64::new(0.3, 0.0)).with_zeta(&d3, long3, [C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)]).is_err());
    assert!(Couplings::uniform(&d, C64::new(0.3, 0.0)).with_zeta(&d, long, zeta).is_ok());
}

#[test]
fn r_matrix_non_reflection_coefficient_is_h_of_mu() {
    let (ctx, mut s) = generic_ctx("C2~1", 2);
    let d = ctx.datum.clone();
    let a = d.simple[1].clone();
    let op = r_matrix(&a, &ctx).unwrap();
    let p = s.regular_point(&d, ctx.tau, &ctx.series).unwrap();
    let id = ExtendedWeylElement::identity(d.l);
    let c = op.coefficient_at(&id, &p).unwrap();
    let mu = ctx.couplings.mu_of(&d, &a).unwrap();
    assert!((c - h_alpha_at(&a, mu, &p, &ctx).unwrap()).norm() < 1e-14);
    let r = ExtendedWeylElement::reflection(&d, &a).unwrap();
    let c = op.coefficient_at(&r, &p).unwrap();
    let nu = ctx.xi_pairing(&a.finite);
    assert!((c + h_alpha_at(&a, nu, &p, &ctx).unwrap()).norm() < 1e-14);
    assert_eq!(op.support().len(), 2);
}

#[test]
fn yang_baxter_rank3() {
    for (n, t) in RANK3_TYPES.iter().enumerate() {
        let (ctx, mut s) = generic_ctx(t, 10 + n as u64);
        let d = ctx.datum.clone();
        let f = s.exp_sum(&d, 4, 2);
        for i in 0..=d.l {
            for j in (i + 1)..=d.l {
                let Some(m) = braid_order(&d, i, j) else { continue };
                let w1 = ReducedWord { letters: braid_word(i, j, m), omega: ExtendedWeylElement::identity(d.l) };
                let w2 = ReducedWord { letters: braid_word(j, i, m), omega: ExtendedWeylElement::identity(d.l) };
                assert_eq!(w1.to_element(&d), w2.to_element(&d));
                let a = r_chain(&inversion_sequence(&d, &w1).unwrap(), &ctx).unwrap();
                let b = r_chain(&inversion_sequence(&d, &w2).unwrap(), &ctx).unwrap();
                let res = compare(&a, &b, &f, &mut s, &ctx, 20);
                assert!(res < 1e-9, "{t} ({i},{j}) m={m}: {res:e}");
            }
        }
    }
}

#[test]
fn unitarity_matches_s_matrix_formula() {
    for (n, t) in SMALL_TYPES.iter().enumerate() {
        let (ctx, mut s) = generic_ctx(t, 40 + n as u64);
        let d = ctx.datum.clone();
        let f = s.exp_sum(&d, 4, 2);
        for i in 0..=d.l {
            let a = d.simple[i].clone();
            let prod = r_matrix(&a, &ctx).unwrap().compose(&r_matrix(&a.neg(), &ctx).unwrap());
            let u = unitarity_scalar(&a, &ctx).unwrap();
            let id = Operator::identity(d.clone(), ctx.kappa()).scale(u);
            let res = compare(&prod, &id, &f, &mut s, &ctx, 10);
            assert!(res < 1e-9, "{t} α_{i}: {res:e}");
        }
    }
}

#[test]
fn unitarity_with_all_admissible_zeta() {
    for (n, t) in ["C2~1", "A4~2", "D3~2", "A5~2", "A2~2"].iter().enumerate() {
        let (ctx, mut s) = generic_ctx(t, 70 + n as u64);
        let d = ctx.datum.clone();
        let mut couplings = ctx.couplings.clone();
        for c in 0..d.num_classes() {
            let rep = d.root_directions().into_iter().find(|a| d.class_of_finite(a) == c).unwrap();
            let delta = if d.is_half_finite(&rep) { qf(1, 2) } else { Q::from_integer(0) };
            let table = n_alpha_table(&d, &AffineRoot::new(rep, delta)).unwrap();
            let mut z = [C64::new(0.0, 0.0); 4];
            for j in 0..4 {
                if table[j].is_some() {
                    z[j] = s.complex(1.0);
                }
            }
            couplings = couplings.with_zeta(&d, c, z).unwrap();
        }
        let ctx = Context { couplings, ..ctx };
        let f = s.exp_sum(&d, 4, 2);
        for i in 0..=d.l {
            let a = d.simple[i].clone();
            let prod = r_matrix(&a, &ctx).unwrap().compose(&r_matrix(&a.neg(), &ctx).unwrap());
            let u = unitarity_scalar(&a, &ctx).unwrap();
            let id = Operator::identity(d.clone(), ctx.kappa()).scale(u);
            let res = compare(&prod, &id, &f, &mut s, &ctx, 10);
            assert!(res < 1e-9, "{t} α_{i}: {res:e} (u = {u})");
        }
    }
}

#[test]
fn unitarity_vanishes_on_degenerate_locus() {
    let (ctx, mut s) = generic_ctx("C2~1", 5);
    let d = ctx.datum.clone();
    let f = s.exp_sum(&d, 4, 2);
    for i in 1..=d.l {
        let a = d.simple[i].clone();
        let mu = ctx.couplings.mu_of(&d, &a).unwrap();
        for sign in [1.0, -1.0] {
            // Shift ξ along ᾱ until ⟨ξ,α^∨⟩ = ±μ_α.
            let cur = ctx.xi_pairing(&a.finite);
            let xi: Vec<C64> = ctx.spectral.xi.iter().zip(&a.finite).map(|(x, c)| x + 0.5 * (sign * mu - cur) * linalg::to_f64(c)).collect();
            let c2 = ctx.clone().with_xi(xi);
            assert!((c2.xi_pairing(&a.finite) - sign * mu).norm() < 1e-12);
            assert!(unitarity_scalar(&a, &c2).unwrap().norm() < 1e-12);
            let prod = r_matrix(&a, &c2).unwrap().compose(&r_matrix(&a.neg(), &c2).unwrap());
            let zero = Operator::zero(d.clone(), c2.kappa());
            let p = s.regular_point(&d, c2.tau, &c2.series).unwrap();
            let g = |x: &[C64]| Ok(f.eval(&d, x));
            let v = prod.apply(&g, &p).unwrap();
            let scale = r_matrix(&a, &c2).unwrap().apply(&g, &p).unwrap().norm().max(1.0);
            assert!(v.norm() < 1e-8 * scale, "{v}");
            assert_eq!(zero.apply(&g, &p).unwrap(), C64::new(0.0, 0.0));
        }
    }
}

#[test]
fn antisymmetrizer_at_rho() {
    let ctx = invariant_ctx("B3~1", C64::new(0.4, 0.1), 2);
    let d = ctx.datum.clone();
    let mut s = Sampler::new(9);
    let f = s.exp_sum(&d, 4, 2);
    for i in 1..=d.l {
        let a = d.simple[i].neg();
        let mu = ctx.couplings.mu_of(&d, &a).unwrap();
        let r = r_matrix(&a, &ctx).unwrap();
        let h = h_alpha(&a, mu, &ctx).unwrap();
        let refl = ExtendedWeylElement::simple_reflection(&d, i);
        let proj = Operator::from_terms(
            d.clone(),
            ctx.kappa(),
            vec![
                Term { coeff: h.clone(), elem: ExtendedWeylElement::identity(d.l) },
                Term { coeff: h.scale(C64::new(-1.0, 0.0)), elem: refl },
            ],
        );
        assert!(compare(&r, &proj, &f, &mut s, &ctx, 5) < 1e-12, "α_{i}");
    }
}

fn lam(d: &RootDatum, i: usize) -> Vec<Q> {
    let mut c = vec![0i64; d.l];
    c[i] = -1;
    weight_from_coords(d, &c)
}

/// Reduced word by greedy descent with the largest available index.
fn reduced_word_largest(d: &RootDatum, w: &ExtendedWeylElement) -> ReducedWord {
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

fn sym_ctx(t: &str) -> Context {
    // ξ = −ρ̊_μ with a κ unrelated to any level
    let d = datum(t);
    let couplings = Couplings::per_class(&d, class_mu(&d)).unwrap();
    Context::invariant(d, TAU, couplings, 1, SeriesConfig::default()).unwrap().with_kappa(C64::new(0.27, 0.02))
}

#[test]
fn y_of_zero_is_identity() {
    let (ctx, _) = generic_ctx("C2~1", 3);
    let d = ctx.datum.clone();
    let y = y_operator(&vec![Q::from_integer(0); d.l], &ctx).unwrap();
    assert_eq!(y.support(), vec![ExtendedWeylElement::identity(d.l)]);
    let p = vec![C64::new(0.3, 0.1), C64::new(0.6, -0.1)];
    assert_eq!(y.coefficient_at(&ExtendedWeylElement::identity(d.l), &p).unwrap(), C64::new(1.0, 0.0));
    assert!(y_operator(&d.basis.lambda[0], &ctx).is_err());
}

#[test]
fn factor_lists_of_rank3_generators() {
    let d = datum("A2~1");
    let t = ExtendedWeylElement::translation(&lam(&d, 0));
    let seq = inversion_sequence(&d, &t.reduced_word(&d)).unwrap();
    let mut fins: Vec<_> = seq.iter().map(|a| (a.finite.clone(), a.delta)).collect();
    fins.sort();
    let a1 = d.simple_finite(0);
    let a12 = linalg::add(&a1, &d.simple_finite(1));
    assert_eq!(fins, vec![(a1, Q::from_integer(0)), (a12, Q::from_integer(0))]);
    // A^(2)_4, short-node weight: four factors, the last ½α + β + ½δ.
    let d = datum("A4~2");
    let t = ExtendedWeylElement::translation(&lam(&d, 0));
    let seq = inversion_sequence(&d, &t.reduced_word(&d)).unwrap();
    assert_eq!(seq.len(), 4);
    let last = seq.last().unwrap();
    let want = linalg::add(&d.simple_finite(0), &linalg::scale(qf(1, 2), &d.simple_finite(1)));
    assert_eq!((last.finite.clone(), last.delta), (want, qf(1, 2)));
}

#[test]
fn composition_laws() {
    let (ctx, mut s) = generic_ctx("C2~1", 4);
    let d = ctx.datum.clone();
    let f = s.exp_sum(&d, 4, 2);
    let a = r_matrix(&d.simple[0], &ctx).unwrap();
    let b = r_matrix(&d.simple[1], &ctx).unwrap();
    let c = r_matrix(&d.simple[2].neg(), &ctx).unwrap();
    let id = Operator::identity(d.clone(), ctx.kappa());
    assert!(compare(&id.compose(&b), &b, &f, &mut s, &ctx, 5) < 1e-15);
    let lhs = a.compose(&b).compose(&c);
    let rhs = a.compose(&b.compose(&c));
    assert!(compare(&lhs, &rhs, &f, &mut s, &ctx, 10) < 1e-11);
    // compose agrees with applying one operator to the result of the other
    let p = s.regular_point(&d, ctx.tau, &ctx.series).unwrap();
    let g = |x: &[C64]| Ok(f.eval(&d, x));
    let inner = |x: &[C64]| b.apply(&g, x);
    let twice = a.apply(&inner, &p).unwrap();
    let once = a.compose(&b).apply(&g, &p).unwrap();
    assert!((twice - once).norm() < 1e-12 * once.norm());
    assert!(a.compose(&b).support().len() <= 4);
}

#[test]
fn reduced_word_independence() {
    for (n, t) in ["C2~1", "G2~1", "A4~2", "D3~2", "A2~1", "D4~3"].iter().enumerate() {
        let (ctx, mut s) = generic_ctx(t, 20 + n as u64);
        let d = ctx.datum.clone();
        let f = s.exp_sum(&d, 4, 2);
        for i in 0..d.l {
            let l = lam(&d, i);
            let t_l = ExtendedWeylElement::translation(&l);
            let w1 = t_l.reduced_word(&d);
            let w2 = reduced_word_largest(&d, &t_l);
            if w1 == w2 {
                continue;
            }
            let a = y_operator_with_word(&l, &w1, &ctx).unwrap();
            let b = y_operator_with_word(&l, &w2, &ctx).unwrap();
            let res = compare(&a, &b, &f, &mut s, &ctx, 10);
            assert!(res < 1e-10, "{t} λ_{}: {res:e}", i + 1);
        }
    }
}

#[test]
fn commutativity_of_generators() {
    for (n, t) in ["A2~1", "C2~1", "A4~2", "D3~2", "G2~1", "D4~3", "A2~2", "A1~1"].iter().enumerate() {
        let (ctx, mut s) = generic_ctx(t, 30 + n as u64);
        let d = ctx.datum.clone();
        let f = s.exp_sum(&d, 3, 1);
        let ys: Vec<Operator> = (0..d.l).map(|i| y_operator(&lam(&d, i), &ctx).unwrap()).collect();
        for i in 0..d.l {
            for j in (i + 1)..d.l {
                let a = ys[i].compose(&ys[j]);
                let b = ys[j].compose(&ys[i]);
                let sum = y_operator(&linalg::add(&lam(&d, i), &lam(&d, j)), &ctx).unwrap();
                assert!(compare(&a, &b, &f, &mut s, &ctx, 6) < 1e-8, "{t} [{i},{j}]");
                assert!(compare(&a, &sum, &f, &mut s, &ctx, 6) < 1e-8, "{t} Y Y = Y sum");
            }
        }
        if d.l == 1 {
            let a = ys[0].compose(&ys[0]);
            let sum = y_operator(&linalg::scale(Q::from_integer(2), &lam(&d, 0)), &ctx).unwrap();
            assert!(compare(&a, &sum, &f, &mut s, &ctx, 6) < 1e-8, "{t} Y² = Y^2λ");
        }
    }
}

#[test]
fn weyl_invariance_at_minus_rho() {
    for t in SMALL_TYPES {
        let ctx = sym_ctx(t);
        let d = ctx.datum.clone();
        let mut s = Sampler::new(77);
        let f = s.symmetric_exp_sum(&d, 2, 1);
        let g = |x: &[C64]| Ok(f.eval(&d, x));
        let group = finite_weyl_group(&d);
        for i in 0..d.l {
            let y = y_operator(&lam(&d, i), &ctx).unwrap();
            let (mut a, mut b) = (vec![], vec![]);
            for _ in 0..3 {
                let p = s.regular_point(&d, ctx.tau, &ctx.series).unwrap();
                let base = y.apply(&g, &p).unwrap();
                for w in &group {
                    let wp = w.act_on_point(&p, ctx.kappa());
                    a.push(y.apply(&g, &wp).unwrap());
                    b.push(base);
                }
            }
            let (res, _) = relative_residual(&a, &b);
            assert!(res < 1e-9, "{t} λ_{}: {res:e}", i + 1);
        }
    }
}

#[test]
fn reflections_annihilate_y_on_invariants() {
    for t in ["C2~1", "G2~1", "A4~2", "D3~2"] {
        let ctx = sym_ctx(t);
        let d = ctx.datum.clone();
        let mut s = Sampler::new(78);
        let f = s.symmetric_exp_sum(&d, 2, 1);
        let g = |x: &[C64]| Ok(f.eval(&d, x));
        for i in 0..d.l {
            let y = y_operator(&lam(&d, i), &ctx).unwrap();
            for j in 1..=d.l {
                let r = r_matrix(&d.simple[j].neg(), &ctx).unwrap().compose(&y);
                let p = s.regular_point(&d, ctx.tau, &ctx.series).unwrap();
                let v = r.apply(&g, &p).unwrap();
                let scale = y.apply(&g, &p).unwrap().norm();
                assert!(v.norm() < 1e-9 * scale, "{t} i={i} j={j}: {:e}", v.norm() / scale);
            }
        }
    }
}

fn compare_sym(a: &Operator, b: &Operator, ctx: &Context, seed: u64, n: usize) -> f64 {
    let d = ctx.datum.clone();
    let mut s = Sampler::new(seed);
    let f = s.symmetric_exp_sum(&d, 2, 1);
    compare(a, b, &f, &mut s, ctx, n)
}

#[test]
fn minuscule_form_matches_y() {
    let mut seen = 0;
    for t in ["A1~1", "A2~1", "A3~1", "C2~1", "B3~1", "D4~1", "A5~2", "D3~2", "C3~1"] {
        let ctx = sym_ctx(t);
        let d = ctx.datum.clone();
        for i in 0..d.l {
            let l = lam(&d, i);
            if !is_minuscule(&d, &linalg::neg(&l)) {
                assert!(minuscule_closed_form(&l, &ctx).is_err());
                continue;
            }
            seen += 1;
            let y = y_operator(&l, &ctx).unwrap();
            let m = minuscule_closed_form(&l, &ctx).unwrap();
            let res = compare_sym(&y, &m, &ctx, 90 + i as u64, 6);
            assert!(res < 1e-9, "{t} λ_{}: {res:e}", i + 1);
        }
    }
    assert!(seen >= 10);
    let d = datum("A2~1");
    assert_eq!(stabilizer_order(&d, &lam(&d, 0)), 2);
}

#[test]
fn quasi_minuscule_form_matches_y() {
    for t in ["C2~1", "G2~1", "A4~2", "D3~2", "D4~3", "B3~1", "A2~2"] {
        let ctx = sym_ctx(t);
        let d = ctx.datum.clone();
        let nu = linalg::neg(&quasi_minuscule(&d));
        let y = y_operator(&nu, &ctx).unwrap();
        let q_refl = quasi_minuscule_closed_form(&ctx, QminConstant::Reflection).unwrap();
        let q_print = quasi_minuscule_closed_form(&ctx, QminConstant::Printed).unwrap();
        let r1 = compare_sym(&y, &q_refl, &ctx, 95, 6);
        let r2 = compare_sym(&y, &q_print, &ctx, 95, 6);
        println!("{t}: reflection constant {r1:e}, printed constant {r2:e}");
        assert!(r1 < 1e-9, "{t}: {r1:e}");
    }
    assert!(quasi_minuscule_closed_form(&sym_ctx("A2~1"), QminConstant::Reflection).is_err());
}

#[test]
fn explicit_a1_matches_minuscule_form() {
    for l in [2usize, 3, 4] {
        let t = format!("A{}~1", l - 1);
        let d = datum(&t);
        let mu = C64::new(0.37, 0.05);
        let ctx = Context::invariant(d.clone(), TAU, Couplings::uniform(&d, mu), 2, SeriesConfig::default()).unwrap();
        assert!((ctx.kappa() - l as f64 * mu / 2.0).norm() < 1e-14);
        let e = explicit_a1_operator(l, &ctx).unwrap();
        let m = minuscule_closed_form(&lam(&d, 0), &ctx).unwrap();
        let res = compare_sym(&e, &m, &ctx, 100 + l as u64, 6);
        assert!(res < 1e-9, "l = {l}: {res:e}");
    }
}

#[test]
fn explicit_a1_shift_convention_and_free_limit() {
    // t_j(κ) moves x_j by +κ (and every x_k by −κ/l).
    let d = datum("A2~1");
    let ctx = Context::invariant(d.clone(), TAU, Couplings::uniform(&d, C64::new(0.0, 0.0)), 1, SeriesConfig::default());
    assert!(matches!(ctx, Err(ellroot::Error::DegenerateHVee)));
    let spectral = Spectral { xi: vec![C64::new(0.0, 0.0); 2], kappa: C64::new(0.3, 0.0) };
    let ctx = Context::new(d.clone(), TAU, Couplings::uniform(&d, C64::new(0.0, 0.0)), spectral, SeriesConfig::default()).unwrap();
    let e = explicit_a1_operator(3, &ctx).unwrap();
    let orth = Orthonormal::type_a(&d).unwrap();
    let p = vec![C64::new(0.2, 0.1), C64::new(0.55, -0.07)];
    for (g, c) in e.expand_at(&p).unwrap() {
        assert!((c - 1.0).norm() < 1e-14);
        let moved = orth.coords(&d, &g.inverse_act_on_point(&d, &p, ctx.kappa()));
        let before = orth.coords(&d, &p);
        let shifts: Vec<f64> = moved.iter().zip(&before).map(|(a, b)| (a - b).re).collect();
        let j = shifts.iter().position(|&s| s > 0.0).unwrap();
        for (k, s) in shifts.iter().enumerate() {
            let want = if k == j { 0.3 - 0.1 } else { -0.1 };
            assert!((s - want).abs() < 1e-14, "{shifts:?}");
        }
    }
}

#[test]
fn permutation_table() {
    assert_eq!(PI_PERMUTATIONS[2], [2, 3, 0, 1]);
    for p in PI_PERMUTATIONS {
        for r in 0..4 {
            assert_eq!(p[p[r]], r);
        }
    }
}

#[test]
fn leading_term_is_coefficient_of_translation() {
    for (n, t) in ["A2~1", "C2~1", "G2~1", "A4~2", "D4~3"].iter().enumerate() {
        let (ctx, mut s) = generic_ctx(t, 110 + n as u64);
        let d = ctx.datum.clone();
        let mut keys = vec![];
        for i in 0..d.l {
            let l = lam(&d, i);
            let y = y_operator(&l, &ctx).unwrap();
            let lt = leading_term(&l, &ctx).unwrap();
            let tl = ExtendedWeylElement::translation(&l);
            assert!(y.support().contains(&tl));
            for _ in 0..3 {
                let p = s.regular_point(&d, ctx.tau, &ctx.series).unwrap();
                let a = y.coefficient_at(&tl, &p).unwrap();
                let b = lt.eval(&p).unwrap();
                assert!((a - b).norm() < 1e-10 * b.norm(), "{t} λ_{}", i + 1);
            }
            keys.push(tl);
        }
        keys.dedup();
        assert_eq!(keys.len(), d.l);
    }
    let (ctx, _) = generic_ctx("A2~1", 1);
    let one = leading_term(&[Q::from_integer(0), Q::from_integer(0)], &ctx).unwrap();
    assert_eq!(one.eval(&[C64::new(0.1, 0.0), C64::new(0.2, 0.0)]).unwrap(), C64::new(1.0, 0.0));
    // A^(1)_2, −λ_1: H_α(μ) H_{α+β}(μ)
    let d = ctx.datum.clone();
    let lt = leading_term(&lam(&d, 0), &ctx).unwrap();
    let p = vec![C64::new(0.13, 0.2), C64::new(0.71, -0.1)];
    let mu = ctx.couplings.mu[0];
    let a = AffineRoot::finite_only(d.simple_finite(0));
    let ab = AffineRoot::finite_only(linalg::add(&d.simple_finite(0), &d.simple_finite(1)));
    let want = h_alpha_at(&a, mu, &p, &ctx).unwrap() * h_alpha_at(&ab, mu, &p, &ctx).unwrap();
    assert!((lt.eval(&p).unwrap() - want).norm() < 1e-14);
}

#[test]
fn bar_hat_identity_generic_xi() {
    for (n, t) in ["A2~1", "C2~1", "G2~1", "A4~2", "D3~2", "D4~3", "A2~2"].iter().enumerate() {
        let (ctx, mut s) = generic_ctx(t, 120 + n as u64);
        let d = ctx.datum.clone();
        let f = s.exp_sum(&d, 3, 1);
        for i in 0..d.l {
            let w = ExtendedWeylElement::translation(&lam(&d, i)).reduced_word(&d);
            let lhs = bar_product(&w, &ctx).unwrap();
            let rhs = bar_product_rhs(&w, &ctx).unwrap();
            let res = compare(&lhs, &rhs, &f, &mut s, &ctx, 6);
            assert!(res < 1e-9, "{t} λ_{}: {res:e}", i + 1);
        }
        // an arbitrary element of Ŵ
        let w = word_element(&d, &[0, 1, 0, d.l]).reduced_word(&d);
        let res = compare(&bar_product(&w, &ctx).unwrap(), &bar_product_rhs(&w, &ctx).unwrap(), &f, &mut s, &ctx, 6);
        assert!(res < 1e-9, "{t} word {:?}: {res:e}", w.letters);
    }
}

#[test]
fn bar_collapses_at_minus_rho() {
    for t in ["A2~1", "C2~1", "G2~1", "A4~2", "D3~2", "D4~3"] {
        let d = datum(t);
        let ctx = Context::invariant(d.clone(), TAU, Couplings::per_class(&d, class_mu(&d)).unwrap(), 2, SeriesConfig::default()).unwrap();
        assert!(ctx.is_invariant_mode());
        assert!(ctx.big_xi().unwrap().iter().all(|x| x.norm() < 1e-15));
        let mut s = Sampler::new(130);
        let f = s.exp_sum(&d, 3, 1);
        for i in 0..d.l {
            let l = lam(&d, i);
            let bar = bar_y_operator(&l, &ctx).unwrap();
            let y = y_operator(&l, &ctx).unwrap();
            let res = compare(&bar, &y, &f, &mut s, &ctx, 6);
            assert!(res < 1e-9, "{t} λ_{}: {res:e}", i + 1);
        }
    }
}

#[test]
fn bar_gauge_independence() {
    let (ctx, mut s) = generic_ctx("G2~1", 140);
    let d = ctx.datum.clone();
    let f = s.exp_sum(&d, 3, 1);
    for a in d.positive_roots_up_to(q(2)).into_iter().take(6) {
        // η orthogonal to ᾱ: project a random vector
        let v: Vec<C64> = (0..d.l).map(|_| s.complex(1.0)).collect();
        let ac: Vec<C64> = a.finite.iter().map(|x| C64::new(linalg::to_f64(x), 0.0)).collect();
        let coef = d.pair_cc(&v, &ac) / linalg::to_f64(&d.sq(&a.finite));
        let eta: Vec<C64> = v.iter().zip(&ac).map(|(x, y)| x - coef * y).collect();
        let r0 = bar_r_matrix(&a, &ctx).unwrap();
        let r1 = bar_r_matrix_with_eta(&a, &eta, &ctx).unwrap();
        assert!(compare(&r0, &r1, &f, &mut s, &ctx, 5) < 1e-12, "{a}");
        assert!(bar_r_matrix_with_eta(&a, &v, &ctx).is_err());
    }
}

#[test]
fn json_export() {
    let (ctx, _) = generic_ctx("A2~1", 150);
    let d = ctx.datum.clone();
    let y = y_operator(&lam(&d, 0), &ctx).unwrap();
    let v = y.to_json();
    assert_eq!(v["type"], "A2~1");
    let terms = v["terms"].as_array().unwrap();
    assert_eq!(terms.len(), y.support().len());
    let lead = terms.iter().find(|t| t["element"]["weyl_word"].as_array().unwrap().is_empty() && t["element"]["shift"] != serde_json::json!(["0", "0"])).unwrap();
    // the pure translation t_λ carries a single monomial: the product of two H factors
    let monos = lead["coefficient"].as_array().unwrap();
    assert!(monos.iter().any(|m| m["factors"].as_array().unwrap().iter().filter(|f| f["label"].get("H").is_some()).count() == 2));
    let text = serde_json::to_string(&v).unwrap();
    let back: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(back, v);
}
