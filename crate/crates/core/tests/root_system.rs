use ellroot::linalg::{self, q, qf, Lattice, Q};
use ellroot::root_system::*;
use num_traits::Zero;
use proptest::prelude::*;

fn datum(t: &str) -> RootDatum {
    build_root_datum(t.parse().unwrap()).unwrap()
}

/// (type, |Δ̊₊|, Σ a_i, Σ a_i^∨) from the standard tables of affine Lie algebras.
const TABLE: &[(&str, usize, i64, i64)] = &[
    ("A1~1", 1, 2, 2),
    ("A2~1", 3, 3, 3),
    ("A5~1", 15, 6, 6),
    ("B3~1", 9, 6, 5),
    ("B4~1", 16, 8, 7),
    ("C2~1", 4, 4, 3),
    ("C3~1", 9, 6, 4),
    ("D4~1", 12, 6, 6),
    ("D5~1", 20, 8, 8),
    ("E6~1", 36, 12, 12),
    ("E7~1", 63, 18, 18),
    ("E8~1", 120, 30, 30),
    ("F4~1", 24, 12, 9),
    ("G2~1", 6, 6, 4),
    ("A2~2", 1, 3, 3),
    ("A4~2", 4, 5, 5),
    ("A6~2", 9, 7, 7),
    ("A5~2", 9, 5, 6),
    ("A7~2", 16, 7, 8),
    ("D3~2", 4, 3, 4),
    ("D5~2", 16, 5, 8),
    ("E6~2", 24, 9, 12),
    ("D4~3", 6, 4, 6),
];

#[test]
fn tables_of_labels_and_root_counts() {
    for &(t, roots, h, hv) in TABLE {
        let d = datum(t);
        assert_eq!(d.pos_roots.len(), roots, "{t}");
        assert_eq!(d.labels.iter().sum::<i64>(), h, "{t}");
        assert_eq!(d.dual_coxeter(), hv, "{t}");
        assert_eq!(d.sq(&d.theta), q(2 * d.a0()), "{t}");
        assert_eq!(d.cartan.len(), d.l + 1);
        for i in 0..=d.l {
            assert_eq!(d.cartan[i][i], 2);
        }
    }
}

#[test]
fn type_validation() {
    for bad in ["B2~1", "C1~1", "D3~1", "E5~1", "E9~1", "F3~1", "G3~1", "A3~2", "A1~2", "B3~2", "D5~3", "A2~4", "", "A~1", "A2", "A2~x"] {
        assert!(bad.parse::<AffineType>().is_err(), "{bad}");
    }
    for good in ["A1~1", "A2~2", "A5~2", "D3~2", "E6~2", "D4~3", "E8~1", "C2~1", "B3~1"] {
        let t: AffineType = good.parse().unwrap();
        assert_eq!(t.to_string(), good);
    }
}

#[test]
fn cartan_matrices_rank3() {
    // Each affine Cartan matrix is read off the extended Dynkin diagram.
    let want: &[(&str, [[i64; 3]; 3])] = &[
        ("A2~1", [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]]),
        ("C2~1", [[2, -1, 0], [-2, 2, -2], [0, -1, 2]]),
        ("G2~1", [[2, 0, -1], [0, 2, -3], [-1, -1, 2]]),
        ("A4~2", [[2, -2, 0], [-1, 2, -2], [0, -1, 2]]),
        ("D3~2", [[2, -2, 0], [-1, 2, -1], [0, -2, 2]]),
        ("D4~3", [[2, -1, 0], [-1, 2, -3], [0, -1, 2]]),
    ];
    for (t, m) in want {
        let d = datum(t);
        let got: Vec<Vec<i64>> = d.cartan.clone();
        assert_eq!(got, m.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), "{t}");
    }
}

#[test]
fn a2_2_lattices() {
    let d = datum("A2~2");
    let eps = d.coroot(&d.theta);
    assert_eq!(d.basis.lambda[0], eps);
    let ze = Lattice::from_generators(&[eps.clone()], 1);
    assert_eq!(d.basis.m, ze);
    assert_eq!(d.basis.m_hat, ze);
    assert_eq!(d.basis.weights, ze);
    // h^∨_μ = 2μ_l + μ_0 with μ_0 the half-root coupling.
    let mu = vec![q(5), q(7)];
    assert_eq!(d.classes[0].name, "half");
    assert_eq!(h_vee_mu(&d, &mu).unwrap(), q(2 * 7 + 5));
}

#[test]
fn lattice_inclusions_and_basis() {
    for &(t, ..) in TABLE {
        let d = datum(t);
        assert!(d.basis.m_hat.contains_lattice(&d.basis.m), "{t}");
        assert_eq!(Lattice::from_generators(&d.basis.lambda, d.l), d.basis.m_hat, "{t}");
        for lam in &d.basis.lambda {
            assert!(d.basis.in_m_hat(lam));
            // (λ_i | α_j) ∈ γ_α ℤ on all real roots
            for a in d.root_directions() {
                let g = d.classes[d.class_of_finite(&a)].gamma;
                let p = d.pair(lam, &a);
                if d.is_half_finite(&a) {
                    assert!((p * q(2)).is_integer(), "{t}");
                } else {
                    assert!((p / g).is_integer(), "{t}: ({:?}|λ) = {p}", a);
                }
            }
        }
    }
}

#[test]
fn h_vee_two_ways_per_class() {
    for &(t, ..) in TABLE {
        let d = datum(t);
        let f = coupling_forms(&d);
        assert_eq!(f.h_vee, f.h_vee_labels, "{t}");
        let ones = vec![Q::from_integer(1); d.num_classes()];
        assert_eq!(h_vee_mu(&d, &ones).unwrap(), q(d.dual_coxeter()), "{t}");
    }
}

#[test]
fn couplings_must_be_class_constant() {
    let d = datum("C2~1");
    // α_0 and α_2 are long, α_1 short.
    assert!(couplings_from_simple(&d, &[1, 2, 1]).is_ok());
    assert!(couplings_from_simple(&d, &[1, 2, 3]).is_err());
    assert!(couplings_from_simple(&d, &[1, 2]).is_err());
    let d = datum("A2~1");
    assert!(couplings_from_simple(&d, &[1, 1, 2]).is_err());
}

#[test]
fn n_alpha_tables_satisfy_conditions() {
    for &(t, ..) in TABLE {
        let d = datum(t);
        for a in d.root_directions() {
            let ar = AffineRoot::finite_only(a.clone());
            let tab = n_alpha_table(&d, &ar).unwrap();
            assert!(tab[0].is_some(), "{t}");
            for (m, n) in tab.iter().flatten() {
                assert!(n_alpha_condition(&d, &ar, *m, *n).unwrap(), "{t}: {:?} slot ({m},{n})", a);
            }
        }
    }
    let d = datum("A4~2");
    let imag = AffineRoot::new(vec![Q::zero(); 2], q(1));
    assert!(n_alpha_table(&d, &imag).is_err());
}

#[test]
fn gamma_values() {
    let d = datum("D4~3");
    let long = d.pos_roots.iter().find(|a| d.is_long_finite(a)).unwrap().clone();
    let short = d.pos_roots.iter().find(|a| !d.is_long_finite(a)).unwrap().clone();
    assert_eq!(gamma(&d, &AffineRoot::finite_only(long)).unwrap(), q(3));
    assert_eq!(gamma(&d, &AffineRoot::finite_only(short)).unwrap(), q(1));
    let d = datum("A4~2");
    assert_eq!(gamma(&d, &d.simple[0]).unwrap(), q(1));
    assert_eq!(gamma(&d, &AffineRoot::finite_only(d.theta.clone())).unwrap(), q(2));
}

#[test]
fn real_roots_membership() {
    let d = datum("A4~2");
    let h = linalg::scale(qf(1, 2), &d.theta);
    assert!(d.is_real_root(&AffineRoot::new(h.clone(), qf(1, 2))));
    assert!(!d.is_real_root(&AffineRoot::new(h, q(1))));
    assert!(!d.is_real_root(&AffineRoot::new(d.theta.clone(), q(1))));
    assert!(d.is_real_root(&AffineRoot::new(d.theta.clone(), q(2))));
    for a in &d.simple {
        assert!(d.is_real_root(a));
    }
}

#[test]
fn antidominance_errors() {
    let d = datum("C2~1");
    let lam = d.basis.lambda[0].clone();
    assert!(matches!(translation_length(&d, &lam), Err(ellroot::Error::NotAntidominant(_))));
    assert!(translation_inversion_set(&d, &lam).is_err());
}

#[test]
fn datum_json() {
    let d = datum("G2~1");
    let v = d.to_json();
    assert_eq!(v["type"], "G2~1");
    assert_eq!(v["positive_roots"].as_array().unwrap().len(), 6);
}

fn any_type() -> impl Strategy<Value = &'static str> {
    prop::sample::select(TABLE.iter().map(|x| x.0).filter(|t| !t.starts_with('E')).collect::<Vec<_>>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// −Σ_{α∈Δ_{t_λ}} μ_α ᾱ = h^∨_μ λ for antidominant λ.
    #[test]
    fn inversion_sum_identity(t in any_type(), c in prop::collection::vec(0i64..4, 8), mu in prop::collection::vec(-5i64..6, 3)) {
        let d = datum(t);
        let coords: Vec<i64> = (0..d.l).map(|i| -c[i]).collect();
        let lam = weight_from_coords(&d, &coords);
        let mu: Vec<Q> = (0..d.num_classes()).map(|k| q(mu[k])).collect();
        let lhs = inversion_mu_sum(&d, &lam, &mu).unwrap();
        let rhs = linalg::scale(h_vee_mu(&d, &mu).unwrap(), &lam);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn length_formula_matches_set(t in any_type(), c in prop::collection::vec(0i64..4, 8)) {
        let d = datum(t);
        let coords: Vec<i64> = (0..d.l).map(|i| -c[i]).collect();
        let lam = weight_from_coords(&d, &coords);
        let set = translation_inversion_set(&d, &lam).unwrap();
        prop_assert_eq!(set.len(), translation_length(&d, &lam).unwrap());
        // additivity over the λ_i basis
        let total: usize = (0..d.l).map(|i| {
            let mut e = vec![0i64; d.l];
            e[i] = -1;
            c[i] as usize * translation_length(&d, &weight_from_coords(&d, &e)).unwrap()
        }).sum();
        prop_assert_eq!(set.len(), total);
        for a in &set {
            prop_assert!(d.is_real_root(a) && a.is_positive());
        }
    }

    #[test]
    fn rho_mu_is_linear(t in any_type(), a in prop::collection::vec(-4i64..5, 3), b in prop::collection::vec(-4i64..5, 3)) {
        let d = datum(t);
        let n = d.num_classes();
        let ma: Vec<Q> = a[..n].iter().map(|&x| q(x)).collect();
        let mb: Vec<Q> = b[..n].iter().map(|&x| q(x)).collect();
        let sum: Vec<Q> = ma.iter().zip(&mb).map(|(x, y)| x + y).collect();
        prop_assert_eq!(rho_mu(&d, &sum), linalg::add(&rho_mu(&d, &ma), &rho_mu(&d, &mb)));
        prop_assert_eq!(h_vee_mu(&d, &sum).unwrap(), h_vee_mu(&d, &ma).unwrap() + h_vee_mu(&d, &mb).unwrap());
    }
}
