//! Affine root systems of type X_N^(r): Cartan data, labels, the invariant
//! form, real roots (including the half roots of A^(2)_{2l}), the lattices
//! M ⊂ M̂ and the translation-length formulas.
//!
//! Finite weights are stored as rational coordinates in the basis of finite
//! simple roots ᾱ_1..ᾱ_l (Bourbaki numbering), with the form matrix
//! `B_ij = (ᾱ_i|ᾱ_j)`. The form is normalized so that `(θ|θ) = 2 a_0`:
//! long roots have square length 2 for untwisted types, short roots have
//! square length 2 for twisted types, and for A^(2)_{2l} the long roots of
//! the finite C_l have square length 4 (half roots then have length 1).

use crate::error::{Error, Result};
use crate::linalg::{self, pair, q, qf, Lattice, QMat, QVec, Q};
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Family {
    fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
        }
    }
}

/// An affine type X_N^(r), written `"X{N}~{r}"` (e.g. `"A4~2"`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineType {
    pub family: Family,
    pub n: usize,
    pub r: u8,
}

impl AffineType {
    pub fn new(family: Family, n: usize, r: u8) -> Result<AffineType> {
        use Family::*;
        let ok = match r {
            1 => match family {
                A => n >= 1,
                B => n >= 3,
                C => n >= 2,
                D => n >= 4,
                E => (6..=8).contains(&n),
                F => n == 4,
                G => n == 2,
            },
            2 => match family {
                A => n >= 2 && (n % 2 == 0 || n >= 5),
                D => n >= 3,
                E => n == 6,
                _ => false,
            },
            3 => family == D && n == 4,
            _ => false,
        };
        if ok {
            Ok(AffineType { family, n, r })
        } else {
            Err(Error::InvalidType(format!("({}, {}, {})", family.letter(), n, r)))
        }
    }

    /// Rank l = dim h̊*.
    pub fn rank(&self) -> usize {
        match (self.family, self.r) {
            (_, 1) => self.n,
            (Family::A, 2) if self.n % 2 == 0 => self.n / 2,
            (Family::A, 2) => (self.n + 1) / 2,
            (Family::D, 2) => self.n - 1,
            (Family::E, 2) => 4,
            (Family::D, 3) => 2,
            _ => unreachable!(),
        }
    }

    pub fn is_a2l(&self) -> bool {
        self.family == Family::A && self.r == 2 && self.n % 2 == 0
    }

    pub fn is_untwisted_a(&self) -> bool {
        self.family == Family::A && self.r == 1
    }

    /// The finite diagram realized on h̊*.
    pub fn finite_family(&self) -> (Family, usize) {
        let l = self.rank();
        match (self.family, self.r) {
            (f, 1) => (f, self.n),
            (Family::A, 2) => (Family::C, l),
            (Family::D, 2) => (Family::B, l),
            (Family::E, 2) => (Family::F, 4),
            (Family::D, 3) => (Family::G, 2),
            _ => unreachable!(),
        }
    }

    /// Conventional name such as `A^(2)_4`.
    pub fn display_name(&self) -> String {
        format!("{}^({})_{}", self.family.letter(), self.r, self.n)
    }
}

impl fmt::Display for AffineType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}~{}", self.family.letter(), self.n, self.r)
    }
}

impl FromStr for AffineType {
    type Err = Error;

    fn from_str(s: &str) -> Result<AffineType> {
        let s = s.trim();
        let bad = || Error::InvalidType(format!("cannot parse '{s}' (expected e.g. A1~1, A4~2, D4~3)"));
        let mut chars = s.chars();
        let family = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Family::A,
            Some('B') => Family::B,
            Some('C') => Family::C,
            Some('D') => Family::D,
            Some('E') => Family::E,
            Some('F') => Family::F,
            Some('G') => Family::G,
            _ => return Err(bad()),
        };
        let rest: &str = chars.as_str();
        let (n, r) = rest.split_once('~').ok_or_else(bad)?;
        let n: usize = n.parse().map_err(|_| bad())?;
        let r: u8 = r.parse().map_err(|_| bad())?;
        AffineType::new(family, n, r)
    }
}

/// Real or imaginary affine root `ᾱ + c δ`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineRoot {
    pub finite: QVec,
    pub delta: Q,
}

impl AffineRoot {
    pub fn new(finite: QVec, delta: Q) -> AffineRoot {
        AffineRoot { finite, delta }
    }

    pub fn finite_only(finite: QVec) -> AffineRoot {
        AffineRoot { finite, delta: Q::zero() }
    }

    pub fn neg(&self) -> AffineRoot {
        AffineRoot { finite: linalg::neg(&self.finite), delta: -self.delta }
    }

    pub fn is_imaginary(&self) -> bool {
        linalg::is_zero(&self.finite)
    }

    /// Positive: δ-coefficient > 0, or zero with a positive finite part.
    pub fn is_positive(&self) -> bool {
        if self.delta > Q::zero() {
            return true;
        }
        self.delta.is_zero() && finite_is_positive(&self.finite)
    }

    pub fn scaled(&self, s: Q) -> AffineRoot {
        AffineRoot { finite: linalg::scale(s, &self.finite), delta: self.delta * s }
    }
}

impl fmt::Debug for AffineRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for AffineRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", linalg::fmt_qvec(&self.finite))?;
        if !self.delta.is_zero() {
            write!(f, "{:+}δ", self.delta)?;
        }
        Ok(())
    }
}

pub(crate) fn finite_is_positive(v: &[Q]) -> bool {
    match v.iter().find(|x| !x.is_zero()) {
        Some(x) => x.is_positive(),
        None => false,
    }
}

pub fn height(v: &[Q]) -> Q {
    v.iter().fold(Q::zero(), |a, b| a + b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootLength {
    Short,
    Long,
}

/// A Ŵ-orbit of real roots, identified by square length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootClass {
    pub sq_len: Q,
    pub gamma: Q,
    pub name: String,
}

/// Canonical weights and lattices of §M/M̂.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightBasis {
    /// λ_i, i = 1..l.
    pub lambda: Vec<QVec>,
    /// M = ν(ℤ W̊·θ^∨).
    pub m: Lattice,
    /// M̂ = {λ : (α|λ) ∈ γ_α ℤ for all real α}.
    pub m_hat: Lattice,
    /// Finite weight lattice P̊.
    pub weights: Lattice,
    /// ν(Q̊^∨).
    pub coroots: Lattice,
}

/// Exact data of one affine root system.
#[derive(Clone, Debug)]
pub struct RootDatum {
    pub ty: AffineType,
    pub l: usize,
    pub form: QMat,
    pub form_inv: QMat,
    pub form_f64: Vec<f64>,
    /// Affine Cartan matrix a_ij = ⟨α_j, α_i^∨⟩, indices 0..=l.
    pub cartan: Vec<Vec<i64>>,
    pub labels: Vec<i64>,
    pub colabels: Vec<i64>,
    pub theta: QVec,
    pub pos_roots: Vec<QVec>,
    pub pos_root_lengths: Vec<RootLength>,
    /// Positive finite parts ½β of half roots (A^(2)_{2l} only).
    pub half_roots: Vec<QVec>,
    pub classes: Vec<RootClass>,
    pub simple: Vec<AffineRoot>,
    pub basis: WeightBasis,
    long_len: Q,
}

impl RootDatum {
    pub fn a0(&self) -> i64 {
        self.labels[0]
    }

    pub fn dual_coxeter(&self) -> i64 {
        self.colabels.iter().sum()
    }

    pub fn pair(&self, x: &[Q], y: &[Q]) -> Q {
        pair(&self.form, x, y)
    }

    pub fn sq(&self, x: &[Q]) -> Q {
        pair(&self.form, x, x)
    }

    /// Complex pairing `(x|p)` for a point `p` in the ᾱ-basis.
    pub fn pair_point(&self, x: &[Q], p: &[Complex64]) -> Complex64 {
        linalg::pair_c(&self.form_f64, self.l, x, p)
    }

    /// Complex pairing of two complex vectors.
    pub fn pair_cc(&self, x: &[Complex64], p: &[Complex64]) -> Complex64 {
        let n = self.l;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += x[i] * self.form_f64[i * n + j] * p[j];
            }
        }
        acc
    }

    /// ν(α^∨) = 2α/(α|α).
    pub fn coroot(&self, a: &[Q]) -> QVec {
        let s = q(2) / self.sq(a);
        linalg::scale(s, a)
    }

    /// ⟨λ, α^∨⟩ = 2(λ|α)/(α|α).
    pub fn coroot_pairing(&self, lam: &[Q], a: &[Q]) -> Q {
        q(2) * self.pair(lam, a) / self.sq(a)
    }

    pub fn simple_finite(&self, i: usize) -> QVec {
        let mut v = vec![Q::zero(); self.l];
        v[i] = Q::one();
        v
    }

    /// Fundamental weights Λ̄_i with ⟨Λ̄_i, ᾱ_j^∨⟩ = δ_ij.
    pub fn fundamental_weight(&self, i: usize) -> QVec {
        let s = self.sq(&self.simple_finite(i)) / q(2);
        let mut e = vec![Q::zero(); self.l];
        e[i] = s;
        self.form_inv.mul_vec(&e)
    }

    pub fn is_long_finite(&self, a: &[Q]) -> bool {
        self.sq(a) == self.long_len
    }

    /// Index of the Ŵ-orbit containing the real root with this finite part.
    pub fn class_of_finite(&self, a: &[Q]) -> usize {
        let s = self.sq(a);
        self.classes
            .iter()
            .position(|c| c.sq_len == s)
            .unwrap_or_else(|| panic!("no root class of square length {s}"))
    }

    pub fn class_of(&self, a: &AffineRoot) -> Result<usize> {
        if a.is_imaginary() {
            return Err(Error::ImaginaryRoot);
        }
        Ok(self.class_of_finite(&a.finite))
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of_alpha0(&self) -> usize {
        self.class_of_finite(&self.simple[0].finite)
    }

    pub fn is_half_finite(&self, a: &[Q]) -> bool {
        self.ty.is_a2l() && self.sq(a) == q(1)
    }

    /// Whether `a` is a real root.
    pub fn is_real_root(&self, a: &AffineRoot) -> bool {
        if a.is_imaginary() {
            return false;
        }
        let abs: QVec = if finite_is_positive(&a.finite) { a.finite.clone() } else { linalg::neg(&a.finite) };
        if self.is_half_finite(&a.finite) {
            return self.half_roots.contains(&abs) && (a.delta - qf(1, 2)).is_integer();
        }
        if !self.pos_roots.contains(&abs) {
            return false;
        }
        let g = self.classes[self.class_of_finite(&a.finite)].gamma;
        (a.delta / g).is_integer()
    }

    /// All real roots with δ-coefficient in `[lo, hi]`.
    pub fn real_roots_window(&self, lo: Q, hi: Q) -> Vec<AffineRoot> {
        let mut out = Vec::new();
        let mut push_family = |fin: &QVec, step: Q, offset: Q| {
            for sign in [1i64, -1] {
                let f = linalg::scale(q(sign), fin);
                // c = offset + n*step within [lo, hi]
                let nmin = ((lo - offset) / step).ceil().to_integer();
                let nmax = ((hi - offset) / step).floor().to_integer();
                for n in nmin..=nmax {
                    out.push(AffineRoot::new(f.clone(), offset + step * q(n)));
                }
            }
        };
        for a in &self.pos_roots {
            let g = self.classes[self.class_of_finite(a)].gamma;
            push_family(a, g, Q::zero());
        }
        for h in &self.half_roots {
            push_family(h, Q::one(), qf(1, 2));
        }
        out
    }

    /// Positive real roots with δ-coefficient at most `hi`.
    pub fn positive_roots_up_to(&self, hi: Q) -> Vec<AffineRoot> {
        self.real_roots_window(Q::zero(), hi).into_iter().filter(|a| a.is_positive()).collect()
    }

    /// Finite parts of all real roots, up to sign (finite roots and half roots).
    pub fn root_directions(&self) -> Vec<QVec> {
        self.pos_roots.iter().chain(self.half_roots.iter()).cloned().collect()
    }

    /// JSON description: type, Cartan matrix, labels, form, roots.
    pub fn to_json(&self) -> serde_json::Value {
        let qs = |v: &[Q]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        serde_json::json!({
            "type": self.ty.to_string(),
            "name": self.ty.display_name(),
            "rank": self.l,
            "cartan": self.cartan,
            "labels": self.labels,
            "colabels": self.colabels,
            "form": (0..self.l).map(|i| qs(self.form.row(i))).collect::<Vec<_>>(),
            "simple_roots": self.simple.iter().map(|a| serde_json::json!({
                "finite": qs(&a.finite), "delta": a.delta.to_string()})).collect::<Vec<_>>(),
            "theta": qs(&self.theta),
            "positive_roots": self.pos_roots.iter().map(|a| qs(a)).collect::<Vec<_>>(),
            "lambda": self.basis.lambda.iter().map(|a| qs(a)).collect::<Vec<_>>(),
        })
    }
}

/// Dynkin edges (0-based, Bourbaki numbering) and long flags of a finite diagram.
fn finite_diagram(fam: Family, l: usize) -> (Vec<(usize, usize)>, Vec<bool>) {
    use Family::*;
    let chain = |n: usize| (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect::<Vec<_>>();
    match fam {
        A => (chain(l), vec![true; l]),
        B => {
            let mut long = vec![true; l];
            long[l - 1] = false;
            (chain(l), long)
        }
        C => {
            let mut long = vec![false; l];
            long[l - 1] = true;
            (chain(l), long)
        }
        D => {
            let mut e = chain(l - 1);
            e.push((l - 3, l - 1));
            (e, vec![true; l])
        }
        E => {
            let mut e = vec![(0, 2), (1, 3), (2, 3)];
            for i in 3..l - 1 {
                e.push((i, i + 1));
            }
            (e, vec![true; l])
        }
        F => (chain(4), vec![true, true, false, false]),
        G => (vec![(0, 1)], vec![false, true]),
    }
}

fn reflect(b: &QMat, v: &[Q], a: &[Q]) -> QVec {
    let c = q(2) * pair(b, v, a) / pair(b, a, a);
    linalg::sub(v, &linalg::scale(c, a))
}

/// W̊-orbit of a vector under the simple reflections.
pub(crate) fn finite_orbit(b: &QMat, v: &[Q]) -> Vec<QVec> {
    let l = b.rows;
    let simple: Vec<QVec> = (0..l)
        .map(|i| {
            let mut e = vec![Q::zero(); l];
            e[i] = Q::one();
            e
        })
        .collect();
    let mut seen: HashSet<QVec> = HashSet::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(v.to_vec());
    queue.push_back(v.to_vec());
    while let Some(x) = queue.pop_front() {
        for a in &simple {
            let y = reflect(b, &x, a);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
        out.push(x);
    }
    out
}

fn sort_roots(v: &mut [QVec]) {
    v.sort_by(|a, b| height(a).cmp(&height(b)).then_with(|| a.cmp(b)));
}

/// Builds the datum of an affine type.
pub fn build_root_datum(ty: AffineType) -> Result<RootDatum> {
    let l = ty.rank();
    let (fam, _) = ty.finite_family();
    let (edges, long_flags) = finite_diagram(fam, l);
    let ratio: i64 = match fam {
        Family::G => 3,
        Family::B | Family::C | Family::F => 2,
        _ => 1,
    };
    let (short_len, long_len) = if ty.r == 1 {
        (qf(2, ratio), q(2))
    } else if ty.is_a2l() {
        (q(2), q(4))
    } else {
        (q(2), q(2 * ty.r as i64))
    };
    let lens: Vec<Q> = long_flags.iter().map(|&lg| if lg { long_len } else { short_len }).collect();
    let mut form = QMat::zeros(l, l);
    for i in 0..l {
        form.set(i, i, lens[i]);
    }
    for &(i, j) in &edges {
        let v = -std::cmp::max(lens[i], lens[j]) / q(2);
        form.set(i, j, v);
        form.set(j, i, v);
    }
    let form_inv = form.inverse().ok_or_else(|| Error::InvalidType(format!("{ty}: singular form")))?;

    // Finite roots by closure of the simple roots.
    let mut all: HashSet<QVec> = HashSet::new();
    for i in 0..l {
        let mut e = vec![Q::zero(); l];
        e[i] = Q::one();
        for r in finite_orbit(&form, &e) {
            all.insert(r);
        }
    }
    let mut pos: Vec<QVec> = all.into_iter().filter(|r| finite_is_positive(r)).collect();
    sort_roots(&mut pos);
    let pos_lengths: Vec<RootLength> = pos
        .iter()
        .map(|r| if pair(&form, r, r) == long_len { RootLength::Long } else { RootLength::Short })
        .collect();

    let want_long = ty.r == 1 || ty.is_a2l() || ratio == 1;
    let theta = pos
        .iter()
        .zip(&pos_lengths)
        .filter(|(_, &len)| (len == RootLength::Long) == want_long)
        .map(|(r, _)| r.clone())
        .max_by(|a, b| height(a).cmp(&height(b)))
        .expect("root system has roots");
    let a0: i64 = if ty.is_a2l() { 2 } else { 1 };
    if pair(&form, &theta, &theta) != q(2 * a0) {
        return Err(Error::InvalidType(format!("{ty}: form normalization (θ|θ) != 2 a_0")));
    }

    let mut simple = Vec::with_capacity(l + 1);
    simple.push(AffineRoot::new(linalg::scale(-qf(1, a0), &theta), qf(1, a0)));
    for i in 0..l {
        let mut e = vec![Q::zero(); l];
        e[i] = Q::one();
        simple.push(AffineRoot::finite_only(e));
    }
    let mut cartan = vec![vec![0i64; l + 1]; l + 1];
    for i in 0..=l {
        for j in 0..=l {
            let fi = &simple[i].finite;
            let fj = &simple[j].finite;
            let v = q(2) * pair(&form, fi, fj) / pair(&form, fi, fi);
            if !v.is_integer() {
                return Err(Error::InvalidType(format!("{ty}: non-integral Cartan entry")));
            }
            cartan[i][j] = v.to_integer();
        }
    }
    let mut labels = vec![a0];
    for c in &theta {
        if !c.is_integer() {
            return Err(Error::InvalidType(format!("{ty}: non-integral label")));
        }
        labels.push(c.to_integer());
    }
    let mut colabels = Vec::with_capacity(l + 1);
    for i in 0..=l {
        let v = q(labels[i]) * pair(&form, &simple[i].finite, &simple[i].finite) / q(2);
        if !v.is_integer() {
            return Err(Error::InvalidType(format!("{ty}: non-integral colabel")));
        }
        colabels.push(v.to_integer());
    }
    for i in 0..=l {
        let d: i64 = (0..=l).map(|j| cartan[i][j] * labels[j]).sum();
        let c: i64 = (0..=l).map(|j| colabels[j] * cartan[j][i]).sum();
        if d != 0 || c != 0 {
            return Err(Error::InvalidType(format!("{ty}: labels do not annihilate the Cartan matrix")));
        }
    }

    let half_roots: Vec<QVec> = if ty.is_a2l() {
        pos.iter()
            .zip(&pos_lengths)
            .filter(|(_, &len)| len == RootLength::Long)
            .map(|(r, _)| linalg::scale(qf(1, 2), r))
            .collect()
    } else {
        vec![]
    };

    let gamma_for = |s: Q| -> Q {
        if ty.r > 1 && s == long_len {
            q(ty.r as i64)
        } else {
            Q::one()
        }
    };
    let mut lens_set: Vec<Q> = pos.iter().map(|r| pair(&form, r, r)).collect();
    if !half_roots.is_empty() {
        lens_set.push(q(1));
    }
    lens_set.sort();
    lens_set.dedup();
    let classes: Vec<RootClass> = lens_set
        .iter()
        .map(|&s| {
            let name = if ty.is_a2l() && s == q(1) {
                "half"
            } else if s == long_len {
                "long"
            } else {
                "short"
            };
            RootClass { sq_len: s, gamma: gamma_for(s), name: name.to_string() }
        })
        .collect();

    let lambda: Vec<QVec> = (0..l)
        .map(|i| {
            let mut e = vec![Q::zero(); l];
            e[i] = if ty.r == 1 { Q::one() } else { pair(&form, &simple[i + 1].finite, &simple[i + 1].finite) / q(2) };
            form_inv.mul_vec(&e)
        })
        .collect();

    let nu_theta = linalg::scale(q(2) / pair(&form, &theta, &theta), &theta);
    let m = Lattice::from_generators(&finite_orbit(&form, &nu_theta), l);

    // M̂ is dual to the span of ᾱ/γ_α over real-root directions.
    let mut dirs: Vec<QVec> = pos.iter().map(|r| linalg::scale(Q::one() / gamma_for(pair(&form, r, r)), r)).collect();
    dirs.extend(half_roots.iter().cloned());
    let span = Lattice::from_generators(&dirs, l);
    let g = QMat::from_rows(&span.basis).mul(&form);
    let ginv = g.inverse().ok_or_else(|| Error::InvalidType(format!("{ty}: degenerate root span")))?;
    let m_hat = Lattice::from_generators(&(0..l).map(|j| ginv.col(j)).collect::<Vec<_>>(), l);

    let fund: Vec<QVec> = (0..l)
        .map(|i| {
            let mut e = vec![Q::zero(); l];
            e[i] = pair(&form, &simple[i + 1].finite, &simple[i + 1].finite) / q(2);
            form_inv.mul_vec(&e)
        })
        .collect();
    let weights = Lattice::from_generators(&fund, l);
    let coroots = Lattice::from_generators(
        &(1..=l).map(|i| linalg::scale(q(2) / pair(&form, &simple[i].finite, &simple[i].finite), &simple[i].finite)).collect::<Vec<_>>(),
        l,
    );

    let form_f64 = form.to_f64();
    Ok(RootDatum {
        ty,
        l,
        form,
        form_inv,
        form_f64,
        cartan,
        labels,
        colabels,
        theta,
        pos_roots: pos,
        pos_root_lengths: pos_lengths,
        half_roots,
        classes,
        simple,
        basis: WeightBasis { lambda, m, m_hat, weights, coroots },
        long_len,
    })
}

/// Δ̊₊ in canonical order (height, then lexicographic), tagged long/short.
pub fn positive_finite_roots(d: &RootDatum) -> Vec<(QVec, RootLength)> {
    d.pos_roots.iter().cloned().zip(d.pos_root_lengths.iter().copied()).collect()
}

/// γ_α: the twist r for long roots, 1 otherwise.
pub fn gamma(d: &RootDatum, a: &AffineRoot) -> Result<Q> {
    Ok(d.classes[d.class_of(a)?].gamma)
}

pub fn weight_basis(d: &RootDatum) -> &WeightBasis {
    &d.basis
}

impl WeightBasis {
    pub fn in_m(&self, v: &[Q]) -> bool {
        self.m.contains(v)
    }

    pub fn in_m_hat(&self, v: &[Q]) -> bool {
        self.m_hat.contains(v)
    }
}

/// `λ ∈ M̂_−`: in M̂ with (λ|ᾱ_i) ≤ 0 for every finite simple root.
pub fn is_antidominant(d: &RootDatum, lam: &[Q]) -> bool {
    d.basis.in_m_hat(lam) && (1..=d.l).all(|i| d.pair(lam, &d.simple[i].finite) <= Q::zero())
}

/// Expresses λ in the basis λ_1..λ_l.
pub fn lambda_coords(d: &RootDatum, lam: &[Q]) -> QVec {
    (0..d.l)
        .map(|i| {
            let a = &d.simple[i + 1].finite;
            d.pair(lam, a) / d.pair(&d.basis.lambda[i], a)
        })
        .collect()
}

/// Σ c_i λ_i.
pub fn weight_from_coords(d: &RootDatum, c: &[i64]) -> QVec {
    let mut v = vec![Q::zero(); d.l];
    for (i, &ci) in c.iter().enumerate() {
        v = linalg::add(&v, &linalg::scale(q(ci), &d.basis.lambda[i]));
    }
    v
}

/// Per-class decomposition of ρ̊_μ and h^∨_μ; both are linear in μ.
#[derive(Clone, Debug)]
pub struct CouplingLinearForms {
    /// ρ_c = ½ Σ_{α∈Δ̊₊, α∈c} α.
    pub rho: Vec<QVec>,
    /// Coefficient of μ_c in (ρ̊_μ|θ) + μ_{α_0}.
    pub h_vee: Vec<Q>,
    /// Coefficient of μ_c in Σ_i μ_{α_i} a_i^∨.
    pub h_vee_labels: Vec<Q>,
}

pub fn coupling_forms(d: &RootDatum) -> CouplingLinearForms {
    let nc = d.num_classes();
    let mut rho = vec![vec![Q::zero(); d.l]; nc];
    for a in &d.pos_roots {
        let c = d.class_of_finite(a);
        rho[c] = linalg::add(&rho[c], &linalg::scale(qf(1, 2), a));
    }
    let mut h_vee: Vec<Q> = rho.iter().map(|r| d.pair(r, &d.theta)).collect();
    h_vee[d.class_of_alpha0()] += Q::one();
    let mut h_vee_labels = vec![Q::zero(); nc];
    for i in 0..=d.l {
        h_vee_labels[d.class_of_finite(&d.simple[i].finite)] += q(d.colabels[i]);
    }
    CouplingLinearForms { rho, h_vee, h_vee_labels }
}

/// Per-class couplings from values on the simple roots α_0..α_l; rejects
/// values that differ within a class.
pub fn couplings_from_simple<T: Clone + PartialEq + fmt::Debug>(d: &RootDatum, simple: &[T]) -> Result<Vec<Option<T>>> {
    if simple.len() != d.l + 1 {
        return Err(Error::Couplings(format!("expected {} simple-root values, got {}", d.l + 1, simple.len())));
    }
    let mut out: Vec<Option<T>> = vec![None; d.num_classes()];
    for (i, v) in simple.iter().enumerate() {
        let c = d.class_of_finite(&d.simple[i].finite);
        match &out[c] {
            Some(prev) if prev != v => {
                return Err(Error::Couplings(format!("class {} gets {:?} and {:?}", d.classes[c].name, prev, v)));
            }
            _ => out[c] = Some(v.clone()),
        }
    }
    Ok(out)
}

/// ρ̊_μ = ½ Σ_{α∈Δ̊₊} μ_α α for exact per-class couplings.
pub fn rho_mu(d: &RootDatum, mu: &[Q]) -> QVec {
    let f = coupling_forms(d);
    let mut v = vec![Q::zero(); d.l];
    for (c, r) in f.rho.iter().enumerate() {
        v = linalg::add(&v, &linalg::scale(mu[c], r));
    }
    v
}

/// h^∨_μ, computed as (ρ̊_μ|θ)+μ_{α_0} and as Σ μ_{α_i} a_i^∨; errors if they differ.
pub fn h_vee_mu(d: &RootDatum, mu: &[Q]) -> Result<Q> {
    let rho = rho_mu(d, mu);
    let a = d.pair(&rho, &d.theta) + mu[d.class_of_alpha0()];
    let b = (0..=d.l).fold(Q::zero(), |acc, i| acc + mu[d.class_of_finite(&d.simple[i].finite)] * q(d.colabels[i]));
    if a != b {
        return Err(Error::Couplings(format!("h_vee_mu mismatch: {a} vs {b}")));
    }
    Ok(a)
}

pub fn rho_mu_c(d: &RootDatum, mu: &[Complex64]) -> Vec<Complex64> {
    let f = coupling_forms(d);
    let mut v = vec![Complex64::new(0.0, 0.0); d.l];
    for (c, r) in f.rho.iter().enumerate() {
        for i in 0..d.l {
            v[i] += mu[c] * linalg::to_f64(&r[i]);
        }
    }
    v
}

pub fn h_vee_mu_c(d: &RootDatum, mu: &[Complex64]) -> Complex64 {
    let f = coupling_forms(d);
    f.h_vee.iter().zip(mu).map(|(c, m)| m * linalg::to_f64(c)).sum()
}

/// The four slots φ^1..φ^4 = (m, n) of N_α.
pub type NTable = [Option<(Q, Q)>; 4];

pub fn n_alpha_table(d: &RootDatum, a: &AffineRoot) -> Result<NTable> {
    let c = d.class_of(a)?;
    let name = d.classes[c].name.as_str();
    let ty = d.ty;
    let p = |m: Q, n: Q| Some((m, n));
    let one = Q::one();
    let half = qf(1, 2);
    Ok(match (ty.family, ty.r, name) {
        (Family::C, 1, "long") => [p(one, one), p(one, q(2)), p(half, one), p(half, half)],
        (Family::A, 2, "long") if !ty.is_a2l() => [p(one, one), None, None, p(half, half)],
        (Family::D, 2, "short") => [p(one, one), p(one, q(2)), None, None],
        (Family::A, 2, "half") => [p(q(2), one), p(q(2), q(2)), p(one, one), p(one, half)],
        (Family::A, 2, "long") => [p(one, half), p(one, one), p(half, half), p(half, qf(1, 4))],
        _ => [p(one, one), None, None, None],
    })
}

/// The divisibility conditions defining N_α, checked exactly over lattice bases.
pub fn n_alpha_condition(d: &RootDatum, a: &AffineRoot, m: Q, n: Q) -> Result<bool> {
    let g = gamma(d, a)?;
    let ab = &a.finite;
    let cor = d.coroot(ab);
    let c1 = d.basis.coroots.contains(&linalg::scale(Q::one() / m, &cor));
    let c2 = d.basis.coroots.basis.iter().all(|v| (m * d.pair(ab, v)).is_integer());
    let c3 = d.basis.m.contains(&linalg::scale(n * g / m, &cor));
    let c4 = d.basis.m.basis.iter().all(|v| (m * d.pair(v, ab) / (n * g)).is_integer());
    Ok(c1 && c2 && c3 && c4)
}

/// Δ_{t_λ} for λ ∈ M̂_−, in canonical order (δ-coefficient, then height).
pub fn translation_inversion_set(d: &RootDatum, lam: &[Q]) -> Result<Vec<AffineRoot>> {
    if !is_antidominant(d, lam) {
        return Err(Error::NotAntidominant(linalg::fmt_qvec(lam)));
    }
    let mut out = Vec::new();
    for a in &d.pos_roots {
        let g = d.classes[d.class_of_finite(a)].gamma;
        let bound = -d.pair(a, lam);
        let mut c = Q::zero();
        while c < bound {
            out.push(AffineRoot::new(a.clone(), c));
            c += g;
        }
    }
    for h in &d.half_roots {
        let bound = -d.pair(h, lam);
        let mut c = qf(1, 2);
        while c < bound {
            out.push(AffineRoot::new(h.clone(), c));
            c += Q::one();
        }
    }
    out.sort_by(|x, y| x.delta.cmp(&y.delta).then(height(&x.finite).cmp(&height(&y.finite))).then(x.finite.cmp(&y.finite)));
    Ok(out)
}

/// ℓ(t_λ) by the closed-form sum; errors on non-antidominant λ.
pub fn translation_length(d: &RootDatum, lam: &[Q]) -> Result<usize> {
    if !is_antidominant(d, lam) {
        return Err(Error::NotAntidominant(linalg::fmt_qvec(lam)));
    }
    let mut total = Q::zero();
    for a in &d.pos_roots {
        let g = if d.ty.is_a2l() { Q::one() } else { d.classes[d.class_of_finite(a)].gamma };
        total += (d.pair(a, lam) / g).abs();
    }
    Ok(total.to_integer() as usize)
}

/// −Σ_{α∈Δ_{t_λ}} μ_α ᾱ for λ ∈ M̂_−.
pub fn inversion_mu_sum(d: &RootDatum, lam: &[Q], mu: &[Q]) -> Result<QVec> {
    let mut v = vec![Q::zero(); d.l];
    for a in translation_inversion_set(d, lam)? {
        let c = d.class_of_finite(&a.finite);
        v = linalg::sub(&v, &linalg::scale(mu[c], &a.finite));
    }
    Ok(v)
}

/// The six affine types of rank 3 used throughout the fixtures.
pub const RANK3_TYPES: [&str; 6] = ["A2~1", "C2~1", "G2~1", "A4~2", "D3~2", "D4~3"];

/// All supported types with rank l ≤ 2 that are exercised by the default suites.
pub const SMALL_TYPES: [&str; 8] = ["A1~1", "A2~2", "A2~1", "C2~1", "G2~1", "A4~2", "D3~2", "D4~3"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        for s in ["A1~1", "A4~2", "D4~3", "E6~2", "A5~2", "G2~1"] {
            let t: AffineType = s.parse().unwrap();
            assert_eq!(t.to_string(), s);
        }
        assert!("B2~1".parse::<AffineType>().is_err());
        assert!("A3~2".parse::<AffineType>().is_err());
        assert!("X1~1".parse::<AffineType>().is_err());
    }
}
