//! The extended affine Weyl group Ŵ = W̊ ⋉ T_{M̂}.
//!
//! An element `ẘ t_λ` is stored as the exact matrix of ẘ (acting on
//! ᾱ-coordinates) and the translation λ. Conventions:
//!
//! * product: `(ẘ t_λ)(ẘ′ t_λ′) = (ẘ ẘ′) t_{ẘ′⁻¹λ + λ′}`;
//! * roots: `(ẘ t_λ)(ᾱ + cδ) = ẘᾱ + (c − (ᾱ|λ))δ`;
//! * points: `(ẘ t_λ)·p = ẘ(p + κλ)`, so `z_α(p) = (ᾱ|p) + cκ` is invariant
//!   under simultaneous action on roots and points;
//! * functions: `(w f)(p) = f(w⁻¹·p)`.
//!
//! An element may also carry a complex translation `e` beyond M̂ (used by the
//! bar operators); it only enters the point action, as `ẘ(p + κ(λ + e))`.

use crate::error::{Error, Result};
use crate::linalg::{self, QMat, QVec, Q};
use crate::root_system::{finite_is_positive, AffineRoot, RootDatum};
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};

#[derive(Clone, Serialize, Deserialize)]
pub struct ExtendedWeylElement {
    pub finite: QMat,
    pub translation: QVec,
    /// Optional complex translation added to `translation` in the point action.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extra: Option<Vec<Complex64>>,
}

impl PartialEq for ExtendedWeylElement {
    fn eq(&self, o: &Self) -> bool {
        self.finite == o.finite && self.translation == o.translation && self.extra_bits() == o.extra_bits()
    }
}

impl Eq for ExtendedWeylElement {}

impl Hash for ExtendedWeylElement {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.finite.hash(h);
        self.translation.hash(h);
        self.extra_bits().hash(h);
    }
}

impl fmt::Debug for ExtendedWeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} t{}", self.finite, linalg::fmt_qvec(&self.translation))?;
        if let Some(e) = &self.extra {
            write!(f, " + {:?}", e)?;
        }
        Ok(())
    }
}

fn cz() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl ExtendedWeylElement {
    pub fn identity(l: usize) -> Self {
        ExtendedWeylElement { finite: QMat::identity(l), translation: vec![Q::zero(); l], extra: None }
    }

    pub fn translation(lam: &[Q]) -> Self {
        ExtendedWeylElement { finite: QMat::identity(lam.len()), translation: lam.to_vec(), extra: None }
    }

    /// Translation by a complex weight (stored entirely in `extra`).
    pub fn complex_translation(e: &[Complex64]) -> Self {
        let l = e.len();
        ExtendedWeylElement { finite: QMat::identity(l), translation: vec![Q::zero(); l], extra: Some(e.to_vec()) }
    }

    pub fn finite_part(w: QMat) -> Self {
        let l = w.rows;
        ExtendedWeylElement { finite: w, translation: vec![Q::zero(); l], extra: None }
    }

    /// Finite reflection r_ᾱ.
    pub fn finite_reflection(d: &RootDatum, a: &[Q]) -> Self {
        let l = d.l;
        let cols: Vec<QVec> = (0..l)
            .map(|j| {
                let e = d.simple_finite(j);
                let c = d.coroot_pairing(&e, a);
                linalg::sub(&e, &linalg::scale(c, a))
            })
            .collect();
        Self::finite_part(QMat::from_cols(&cols))
    }

    /// r_{ᾱ+cδ} = r_ᾱ t_{c ν(ᾱ^∨)}.
    pub fn reflection(d: &RootDatum, a: &AffineRoot) -> Result<Self> {
        if a.is_imaginary() {
            return Err(Error::ImaginaryRoot);
        }
        let mut r = Self::finite_reflection(d, &a.finite);
        r.translation = linalg::scale(a.delta, &d.coroot(&a.finite));
        Ok(r)
    }

    /// Simple reflection r_i, i ∈ {0..l}.
    pub fn simple_reflection(d: &RootDatum, i: usize) -> Self {
        Self::reflection(d, &d.simple[i]).expect("simple roots are real")
    }

    pub fn is_identity(&self) -> bool {
        self.finite.is_identity() && linalg::is_zero(&self.translation) && self.extra_bits().iter().all(|&b| b == 0)
    }

    pub fn has_extra(&self) -> bool {
        self.extra.is_some()
    }

    fn extra_bits(&self) -> Vec<u64> {
        match &self.extra {
            None => vec![],
            Some(e) => {
                // -0.0 and 0.0 compare equal
                let norm = |x: f64| if x == 0.0 { 0u64 } else { x.to_bits() };
                let bits: Vec<u64> = e.iter().flat_map(|z| [norm(z.re), norm(z.im)]).collect();
                if bits.iter().all(|&b| b == 0) {
                    vec![]
                } else {
                    bits
                }
            }
        }
    }

    fn extra_or_zero(&self) -> Vec<Complex64> {
        self.extra.clone().unwrap_or_else(|| vec![cz(); self.translation.len()])
    }

    fn apply_finite_c(m: &QMat, v: &[Complex64]) -> Vec<Complex64> {
        (0..m.rows)
            .map(|i| (0..m.cols).map(|j| v[j] * linalg::to_f64(&m.get(i, j))).sum())
            .collect()
    }

    fn finite_inverse(&self, d: &RootDatum) -> QMat {
        // W⁻¹ = B⁻¹ Wᵀ B since W preserves the form.
        d.form_inv.mul(&self.finite.transpose()).mul(&d.form)
    }

    /// Product `self · other`.
    pub fn mul(&self, d: &RootDatum, other: &Self) -> Self {
        let w2inv = other.finite_inverse(d);
        let translation = linalg::add(&w2inv.mul_vec(&self.translation), &other.translation);
        let extra = if self.extra.is_none() && other.extra.is_none() {
            None
        } else {
            let a = Self::apply_finite_c(&w2inv, &self.extra_or_zero());
            let b = other.extra_or_zero();
            Some(a.iter().zip(&b).map(|(x, y)| x + y).collect())
        };
        ExtendedWeylElement { finite: self.finite.mul(&other.finite), translation, extra }
    }

    /// `(ẘ t_λ)⁻¹ = ẘ⁻¹ t_{−ẘλ}`.
    pub fn inverse(&self, d: &RootDatum) -> Self {
        let translation = linalg::neg(&self.finite.mul_vec(&self.translation));
        let extra = self
            .extra
            .as_ref()
            .map(|e| Self::apply_finite_c(&self.finite, e).into_iter().map(|z| -z).collect());
        ExtendedWeylElement { finite: self.finite_inverse(d), translation, extra }
    }

    pub fn act_on_root(&self, d: &RootDatum, a: &AffineRoot) -> AffineRoot {
        AffineRoot::new(self.finite.mul_vec(&a.finite), a.delta - d.pair(&a.finite, &self.translation))
    }

    pub fn act_on_finite(&self, v: &[Q]) -> QVec {
        self.finite.mul_vec(v)
    }

    /// `w·p = ẘ(p + κ(λ + e))`.
    pub fn act_on_point(&self, p: &[Complex64], kappa: Complex64) -> Vec<Complex64> {
        let e = self.extra.as_deref();
        let shifted: Vec<Complex64> = (0..p.len())
            .map(|i| {
                let mut x = p[i] + kappa * linalg::to_f64(&self.translation[i]);
                if let Some(e) = e {
                    x += kappa * e[i];
                }
                x
            })
            .collect();
        Self::apply_finite_c(&self.finite, &shifted)
    }

    /// `w⁻¹·p = ẘ⁻¹p − κ(λ + e)`, the argument at which `(w f)(p)` evaluates f.
    pub fn inverse_act_on_point(&self, d: &RootDatum, p: &[Complex64], kappa: Complex64) -> Vec<Complex64> {
        let winv = self.finite_inverse(d);
        let mut v = Self::apply_finite_c(&winv, p);
        for i in 0..v.len() {
            v[i] -= kappa * linalg::to_f64(&self.translation[i]);
            if let Some(e) = &self.extra {
                v[i] -= kappa * e[i];
            }
        }
        v
    }

    /// Whether the element maps the real root `a` to a negative root.
    fn makes_negative(&self, d: &RootDatum, a: &AffineRoot) -> bool {
        !self.act_on_root(d, a).is_positive()
    }

    /// δ-window sufficient for the inversion set of this element or its inverse.
    fn window(&self, d: &RootDatum) -> Q {
        let wl = self.finite.mul_vec(&self.translation);
        let mut m = Q::zero();
        for a in d.root_directions() {
            m = m.max(d.pair(&a, &self.translation).abs()).max(d.pair(&a, &wl).abs());
        }
        m + Q::one()
    }

    /// Δ_w = {β > 0 : w⁻¹β < 0}, sorted by δ-coefficient then height.
    pub fn inversion_set(&self, d: &RootDatum) -> Vec<AffineRoot> {
        let inv = self.inverse(d);
        let mut out: Vec<AffineRoot> = d
            .positive_roots_up_to(self.window(d))
            .into_iter()
            .filter(|a| inv.makes_negative(d, a))
            .collect();
        out.sort_by(|x, y| {
            x.delta
                .cmp(&y.delta)
                .then(crate::root_system::height(&x.finite).cmp(&crate::root_system::height(&y.finite)))
                .then(x.finite.cmp(&y.finite))
        });
        out
    }

    /// ℓ(w) = |Δ₊ ∩ w Δ₋|.
    pub fn length(&self, d: &RootDatum) -> usize {
        let inv = self.inverse(d);
        d.positive_roots_up_to(self.window(d)).iter().filter(|a| inv.makes_negative(d, a)).count()
    }

    /// Greedy left descent: smallest i with w⁻¹α_i < 0.
    pub fn left_descent(&self, d: &RootDatum) -> Option<usize> {
        let inv = self.inverse(d);
        (0..=d.l).find(|&i| inv.makes_negative(d, &d.simple[i]))
    }

    pub fn reduced_word(&self, d: &RootDatum) -> ReducedWord {
        let mut w = self.clone();
        let mut letters = Vec::new();
        while let Some(i) = w.left_descent(d) {
            letters.push(i);
            w = ExtendedWeylElement::simple_reflection(d, i).mul(d, &w);
        }
        debug_assert_eq!(w.length(d), 0, "no descent found for positive-length element");
        if w.length(d) != 0 {
            panic!("reduced_word: positive-length element without a left descent");
        }
        ReducedWord { letters, omega: w }
    }

    /// Permutation of {0..l} induced on simple roots by a length-0 element.
    pub fn omega_permutation(&self, d: &RootDatum) -> Option<Vec<usize>> {
        (0..=d.l)
            .map(|i| {
                let img = self.act_on_root(d, &d.simple[i]);
                d.simple.iter().position(|s| *s == img)
            })
            .collect()
    }
}

/// `w = r_{i_1} … r_{i_ℓ} ω`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedWord {
    pub letters: Vec<usize>,
    pub omega: ExtendedWeylElement,
}

impl ReducedWord {
    pub fn to_element(&self, d: &RootDatum) -> ExtendedWeylElement {
        word_element(d, &self.letters).mul(d, &self.omega)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(format!("reduced word JSON: {e}")))
    }
}

/// r_{i_1} ⋯ r_{i_k}.
pub fn word_element(d: &RootDatum, letters: &[usize]) -> ExtendedWeylElement {
    letters
        .iter()
        .fold(ExtendedWeylElement::identity(d.l), |w, &i| w.mul(d, &ExtendedWeylElement::simple_reflection(d, i)))
}

/// α^k = r_{i_1} ⋯ r_{i_{k−1}} α_{i_k}; errors unless the word is reduced.
pub fn inversion_sequence(d: &RootDatum, word: &ReducedWord) -> Result<Vec<AffineRoot>> {
    let mut prefix = ExtendedWeylElement::identity(d.l);
    let mut out = Vec::with_capacity(word.letters.len());
    for &i in &word.letters {
        if i > d.l {
            return Err(Error::NotReduced(format!("letter {i} out of range")));
        }
        let a = prefix.act_on_root(d, &d.simple[i]);
        if !a.is_positive() {
            return Err(Error::NotReduced(format!("{:?}", word.letters)));
        }
        out.push(a);
        prefix = prefix.mul(d, &ExtendedWeylElement::simple_reflection(d, i));
    }
    if prefix.length(d) != word.letters.len() {
        return Err(Error::NotReduced(format!("{:?}", word.letters)));
    }
    Ok(out)
}

/// Δ_{t_{−λ}} ⊂ Δ̊₊.
pub fn is_minuscule(d: &RootDatum, lam: &[Q]) -> bool {
    d.basis.in_m_hat(lam)
        && ExtendedWeylElement::translation(&linalg::neg(lam))
            .inversion_set(d)
            .iter()
            .all(|a| a.delta.is_zero())
}

/// ν(θ^∨) = 2θ/(θ|θ).
pub fn quasi_minuscule(d: &RootDatum) -> QVec {
    d.coroot(&d.theta)
}

/// The unique finite node adjacent to α_0 (absent for A^(1)_l, l ≥ 2, and A^(1)_1).
pub fn node_adjacent_to_alpha0(d: &RootDatum) -> Option<usize> {
    let adj: Vec<usize> = (1..=d.l).filter(|&j| d.cartan[0][j] != 0).collect();
    if adj.len() == 1 && !d.ty.is_untwisted_a() {
        Some(adj[0])
    } else {
        None
    }
}

/// All elements of W̊ (finite Weyl group) by closure.
pub fn finite_weyl_group(d: &RootDatum) -> Vec<ExtendedWeylElement> {
    let gens: Vec<ExtendedWeylElement> = (1..=d.l).map(|i| ExtendedWeylElement::simple_reflection(d, i)).collect();
    let id = ExtendedWeylElement::identity(d.l);
    let mut seen: HashSet<QMat> = HashSet::new();
    seen.insert(id.finite.clone());
    let mut out = vec![];
    let mut queue = VecDeque::from([id]);
    while let Some(w) = queue.pop_front() {
        for g in &gens {
            let x = g.mul(d, &w);
            if seen.insert(x.finite.clone()) {
                queue.push_back(x);
            }
        }
        out.push(w);
    }
    out
}

/// Stabilizer order |W̊_λ|.
pub fn stabilizer_order(d: &RootDatum, lam: &[Q]) -> usize {
    finite_weyl_group(d).iter().filter(|w| w.act_on_finite(lam) == lam).count()
}

/// Shortest-word lengths in the Coxeter generators r_0..r_l, for every element
/// reachable with at most `max_len` letters (exhaustive breadth-first search).
pub fn bfs_word_lengths(d: &RootDatum, max_len: usize) -> HashMap<ExtendedWeylElement, usize> {
    let gens: Vec<ExtendedWeylElement> = (0..=d.l).map(|i| ExtendedWeylElement::simple_reflection(d, i)).collect();
    let mut dist = HashMap::new();
    let id = ExtendedWeylElement::identity(d.l);
    dist.insert(id.clone(), 0usize);
    let mut frontier = vec![id];
    for k in 1..=max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for g in &gens {
                let x = w.mul(d, g);
                if !dist.contains_key(&x) {
                    dist.insert(x.clone(), k);
                    next.push(x);
                }
            }
        }
        frontier = next;
    }
    dist
}

/// Whether the finite matrix preserves the form exactly.
pub fn preserves_form(d: &RootDatum, w: &ExtendedWeylElement) -> bool {
    w.finite.transpose().mul(&d.form).mul(&w.finite) == d.form
}

/// The finite part of `a`, made positive.
pub fn positive_part(a: &[Q]) -> QVec {
    if finite_is_positive(a) {
        a.to_vec()
    } else {
        linalg::neg(a)
    }
}

/// t_λ for λ given in the λ_i basis.
pub fn translation_by_coords(d: &RootDatum, c: &[i64]) -> ExtendedWeylElement {
    ExtendedWeylElement::translation(&crate::root_system::weight_from_coords(d, c))
}
