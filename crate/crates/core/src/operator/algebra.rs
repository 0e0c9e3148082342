//! Difference–reflection operators: finite sums of products of factors,
//! each factor a list of terms `c(p)·g` with `g ∈ Ŵ` (optionally carrying a
//! complex translation) and `c` a coefficient function of the point.
//!
//! Products are kept unexpanded. Evaluation at a point multiplies factors out
//! left to right, merging terms with equal group element after each factor,
//! so the cost grows with the number of distinct elements rather than 2^ℓ.
//!
//! Multiplication rule: `(c g)(c′ g′) = c·(g c′)·(g g′)` where
//! `(g c′)(p) = c′(g⁻¹·p)`; application: `(c g f)(p) = c(p) f(g⁻¹·p)`.

use crate::error::Result;
use crate::linalg;
use crate::root_system::RootDatum;
use crate::weyl::ExtendedWeylElement;
use num_complex::Complex64 as C64;
use serde_json::{json, Value};
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

type CoeffFn = dyn Fn(&[C64]) -> Result<C64> + Send + Sync;

/// The affine map `p ↦ g⁻¹·p = ẘ⁻¹p − κ(λ + e)` in floating point.
#[derive(Clone, Debug)]
struct PointMap {
    l: usize,
    m: Vec<f64>,
    offset: Vec<C64>,
}

impl PointMap {
    fn inverse_of(d: &RootDatum, g: &ExtendedWeylElement, kappa: C64) -> PointMap {
        let l = d.l;
        let winv = g.inverse(d).finite;
        let m = (0..l * l).map(|ij| linalg::to_f64(&winv.get(ij / l, ij % l))).collect();
        let offset = (0..l)
            .map(|i| {
                let e = g.extra.as_ref().map_or(C64::new(0.0, 0.0), |e| e[i]);
                -kappa * (linalg::to_f64(&g.translation[i]) + e)
            })
            .collect();
        PointMap { l, m, offset }
    }

    fn apply(&self, p: &[C64]) -> Vec<C64> {
        let l = self.l;
        (0..l).map(|i| (0..l).map(|j| self.m[i * l + j] * p[j]).sum::<C64>() + self.offset[i]).collect()
    }
}

/// One symbolic factor of a coefficient monomial, evaluated at `at⁻¹·p`.
#[derive(Clone, Debug)]
pub struct FactorLabel {
    pub label: Value,
    pub at: Option<ExtendedWeylElement>,
}

/// A monomial `scalar · Π factors` in the description of a coefficient.
#[derive(Clone, Debug)]
pub struct Monomial {
    pub scalar: C64,
    pub factors: Vec<FactorLabel>,
}

/// A coefficient function together with a symbolic description (a sum of
/// monomials) used for export.
#[derive(Clone)]
pub struct Coefficient {
    f: Arc<CoeffFn>,
    pub monomials: Vec<Monomial>,
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Coefficient({} monomials)", self.monomials.len())
    }
}

impl Coefficient {
    /// A single labelled factor.
    pub fn new(label: Value, f: impl Fn(&[C64]) -> Result<C64> + Send + Sync + 'static) -> Self {
        Coefficient {
            f: Arc::new(f),
            monomials: vec![Monomial { scalar: C64::new(1.0, 0.0), factors: vec![FactorLabel { label, at: None }] }],
        }
    }

    pub fn constant(c: C64) -> Self {
        Coefficient { f: Arc::new(move |_| Ok(c)), monomials: vec![Monomial { scalar: c, factors: vec![] }] }
    }

    pub fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    pub fn eval(&self, p: &[C64]) -> Result<C64> {
        (self.f)(p)
    }

    /// Whether this is the constant 1 (used to skip trivial factors).
    fn is_one(&self) -> bool {
        self.monomials.len() == 1 && self.monomials[0].factors.is_empty() && self.monomials[0].scalar == C64::new(1.0, 0.0)
    }

    pub fn mul(&self, o: &Coefficient) -> Coefficient {
        if self.is_one() {
            return o.clone();
        }
        if o.is_one() {
            return self.clone();
        }
        let (a, b) = (self.f.clone(), o.f.clone());
        let mut monomials = Vec::with_capacity(self.monomials.len() * o.monomials.len());
        for x in &self.monomials {
            for y in &o.monomials {
                let mut factors = x.factors.clone();
                factors.extend(y.factors.iter().cloned());
                monomials.push(Monomial { scalar: x.scalar * y.scalar, factors });
            }
        }
        Coefficient { f: Arc::new(move |p| Ok(a(p)? * b(p)?)), monomials }
    }

    pub fn add(&self, o: &Coefficient) -> Coefficient {
        let (a, b) = (self.f.clone(), o.f.clone());
        let mut monomials = self.monomials.clone();
        monomials.extend(o.monomials.iter().cloned());
        Coefficient { f: Arc::new(move |p| Ok(a(p)? + b(p)?)), monomials }
    }

    pub fn scale(&self, s: C64) -> Coefficient {
        let a = self.f.clone();
        let monomials = self.monomials.iter().map(|m| Monomial { scalar: m.scalar * s, factors: m.factors.clone() }).collect();
        Coefficient { f: Arc::new(move |p| Ok(s * a(p)?)), monomials }
    }

    /// `(g c)(p) = c(g⁻¹·p)`.
    pub fn transport(&self, d: &RootDatum, g: &ExtendedWeylElement, kappa: C64) -> Coefficient {
        if g.is_identity() {
            return self.clone();
        }
        let map = PointMap::inverse_of(d, g, kappa);
        let a = self.f.clone();
        let monomials = self
            .monomials
            .iter()
            .map(|m| Monomial {
                scalar: m.scalar,
                factors: m
                    .factors
                    .iter()
                    .map(|fl| FactorLabel {
                        label: fl.label.clone(),
                        at: Some(match &fl.at {
                            None => g.clone(),
                            Some(h) => g.mul(d, h),
                        }),
                    })
                    .collect(),
            })
            .collect();
        Coefficient { f: Arc::new(move |p| a(&map.apply(p))), monomials }
    }
}

/// A term `c(p)·g`.
#[derive(Clone, Debug)]
pub struct Term {
    pub coeff: Coefficient,
    pub elem: ExtendedWeylElement,
}

#[derive(Clone)]
struct Product {
    scalar: C64,
    factors: Vec<Vec<Term>>,
}

/// A difference–reflection operator on functions of `p ∈ h̊*_ℂ` (ᾱ-coordinates).
#[derive(Clone)]
pub struct Operator {
    datum: Arc<RootDatum>,
    kappa: C64,
    products: Vec<Product>,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Operator({} products, κ = {})", self.products.len(), self.kappa)
    }
}

/// Merges terms with equal elements, preserving first-occurrence order.
fn merge_terms(terms: Vec<Term>) -> Vec<Term> {
    let mut index: HashMap<ExtendedWeylElement, usize> = HashMap::new();
    let mut out: Vec<Term> = Vec::new();
    for t in terms {
        match index.get(&t.elem) {
            Some(&i) => out[i].coeff = out[i].coeff.add(&t.coeff),
            None => {
                index.insert(t.elem.clone(), out.len());
                out.push(t);
            }
        }
    }
    out
}

impl Operator {
    /// The zero operator.
    pub fn zero(datum: Arc<RootDatum>, kappa: C64) -> Self {
        Operator { datum, kappa, products: vec![] }
    }

    pub fn identity(datum: Arc<RootDatum>, kappa: C64) -> Self {
        let l = datum.l;
        Self::element(datum, kappa, ExtendedWeylElement::identity(l))
    }

    /// The group element `g` acting on functions.
    pub fn element(datum: Arc<RootDatum>, kappa: C64, g: ExtendedWeylElement) -> Self {
        Self::from_terms(datum, kappa, vec![Term { coeff: Coefficient::one(), elem: g }])
    }

    /// Multiplication by the function `c`.
    pub fn multiplication(datum: Arc<RootDatum>, kappa: C64, c: Coefficient) -> Self {
        let l = datum.l;
        Self::from_terms(datum, kappa, vec![Term { coeff: c, elem: ExtendedWeylElement::identity(l) }])
    }

    /// A single-factor operator Σ c_i g_i, merged by element.
    pub fn from_terms(datum: Arc<RootDatum>, kappa: C64, terms: Vec<Term>) -> Self {
        let factors = vec![merge_terms(terms)];
        Operator { datum, kappa, products: vec![Product { scalar: C64::new(1.0, 0.0), factors }] }
    }

    pub fn datum(&self) -> &Arc<RootDatum> {
        &self.datum
    }

    pub fn kappa(&self) -> C64 {
        self.kappa
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Operator) -> Operator {
        let mut products = Vec::with_capacity(self.products.len() * other.products.len());
        for a in &self.products {
            for b in &other.products {
                let mut factors = a.factors.clone();
                factors.extend(b.factors.iter().cloned());
                products.push(Product { scalar: a.scalar * b.scalar, factors });
            }
        }
        Operator { datum: self.datum.clone(), kappa: self.kappa, products }
    }

    pub fn add(&self, other: &Operator) -> Operator {
        let mut products = self.products.clone();
        products.extend(other.products.iter().cloned());
        Operator { datum: self.datum.clone(), kappa: self.kappa, products }
    }

    pub fn scale(&self, s: C64) -> Operator {
        let products = self.products.iter().map(|p| Product { scalar: p.scalar * s, factors: p.factors.clone() }).collect();
        Operator { datum: self.datum.clone(), kappa: self.kappa, products }
    }

    pub fn sub(&self, other: &Operator) -> Operator {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// `w ∘ self ∘ w⁻¹`, computed factor by factor.
    pub fn conjugate(&self, w: &ExtendedWeylElement) -> Operator {
        let d = &*self.datum;
        let winv = w.inverse(d);
        let products = self
            .products
            .iter()
            .map(|p| Product {
                scalar: p.scalar,
                factors: p
                    .factors
                    .iter()
                    .map(|f| {
                        f.iter()
                            .map(|t| Term { coeff: t.coeff.transport(d, w, self.kappa), elem: w.mul(d, &t.elem).mul(d, &winv) })
                            .collect()
                    })
                    .collect(),
            })
            .collect();
        Operator { datum: self.datum.clone(), kappa: self.kappa, products }
    }

    /// Number of unexpanded products and the largest factor count among them.
    pub fn shape(&self) -> (usize, usize) {
        (self.products.len(), self.products.iter().map(|p| p.factors.len()).max().unwrap_or(0))
    }

    /// The operator written as Σ_g c_g(p)·g evaluated at `p`: the list of
    /// (g, c_g(p)) with distinct g, in deterministic order.
    pub fn expand_at(&self, p: &[C64]) -> Result<Vec<(ExtendedWeylElement, C64)>> {
        let d = &*self.datum;
        let mut index: HashMap<ExtendedWeylElement, usize> = HashMap::new();
        let mut total: Vec<(ExtendedWeylElement, C64)> = Vec::new();
        for prod in &self.products {
            let mut state: Vec<(ExtendedWeylElement, C64)> = vec![(ExtendedWeylElement::identity(d.l), prod.scalar)];
            for factor in &prod.factors {
                let mut idx: HashMap<ExtendedWeylElement, usize> = HashMap::new();
                let mut next: Vec<(ExtendedWeylElement, C64)> = Vec::new();
                for (g, v) in &state {
                    let q = g.inverse_act_on_point(d, p, self.kappa);
                    for t in factor {
                        let c = t.coeff.eval(&q)?;
                        let h = g.mul(d, &t.elem);
                        match idx.get(&h) {
                            Some(&i) => next[i].1 += v * c,
                            None => {
                                idx.insert(h.clone(), next.len());
                                next.push((h, v * c));
                            }
                        }
                    }
                }
                state = next;
            }
            for (g, v) in state {
                match index.get(&g) {
                    Some(&i) => total[i].1 += v,
                    None => {
                        index.insert(g.clone(), total.len());
                        total.push((g, v));
                    }
                }
            }
        }
        Ok(total)
    }

    /// `(self f)(p) = Σ_g c_g(p) f(g⁻¹·p)`.
    pub fn apply<F>(&self, f: &F, p: &[C64]) -> Result<C64>
    where
        F: Fn(&[C64]) -> Result<C64> + ?Sized,
    {
        let d = &*self.datum;
        let mut s = C64::new(0.0, 0.0);
        for (g, c) in self.expand_at(p)? {
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            s += c * f(&g.inverse_act_on_point(d, p, self.kappa))?;
        }
        Ok(s)
    }

    /// The coefficient of `g` at `p` (zero if `g` does not occur).
    pub fn coefficient_at(&self, g: &ExtendedWeylElement, p: &[C64]) -> Result<C64> {
        Ok(self.expand_at(p)?.into_iter().find(|(h, _)| h == g).map_or(C64::new(0.0, 0.0), |x| x.1))
    }

    /// The set of group elements occurring after symbolic expansion, in
    /// deterministic order (no cancellation is detected).
    pub fn support(&self) -> Vec<ExtendedWeylElement> {
        let d = &*self.datum;
        let mut seen: HashMap<ExtendedWeylElement, ()> = HashMap::new();
        let mut out = Vec::new();
        for prod in &self.products {
            let mut state = vec![ExtendedWeylElement::identity(d.l)];
            for factor in &prod.factors {
                let mut idx: HashMap<ExtendedWeylElement, ()> = HashMap::new();
                let mut next = Vec::new();
                for g in &state {
                    for t in factor {
                        let h = g.mul(d, &t.elem);
                        if idx.insert(h.clone(), ()).is_none() {
                            next.push(h);
                        }
                    }
                }
                state = next;
            }
            for g in state {
                if seen.insert(g.clone(), ()).is_none() {
                    out.push(g);
                }
            }
        }
        out
    }

    /// Fully expanded, merged term list Σ_g c_g g with symbolic coefficients.
    /// The coefficient description grows with the number of expansion paths.
    pub fn terms(&self) -> Vec<Term> {
        let d = &*self.datum;
        let mut all = Vec::new();
        for prod in &self.products {
            let mut state = vec![Term { coeff: Coefficient::constant(prod.scalar), elem: ExtendedWeylElement::identity(d.l) }];
            for factor in &prod.factors {
                let mut next = Vec::new();
                for s in &state {
                    for t in factor {
                        next.push(Term { coeff: s.coeff.mul(&t.coeff.transport(d, &s.elem, self.kappa)), elem: s.elem.mul(d, &t.elem) });
                    }
                }
                state = merge_terms(next);
            }
            all.extend(state);
        }
        merge_terms(all)
    }

    /// JSON export of the expanded term list; see the README for the format.
    pub fn to_json(&self) -> Value {
        let d = &*self.datum;
        let terms: Vec<Value> = self
            .terms()
            .iter()
            .map(|t| {
                json!({
                    "element": element_json(d, &t.elem),
                    "coefficient": t.coeff.monomials.iter().map(|m| json!({
                        "scalar": [m.scalar.re, m.scalar.im],
                        "factors": m.factors.iter().map(|f| json!({
                            "label": f.label,
                            "at": f.at.as_ref().map(|g| element_json(d, g)),
                        })).collect::<Vec<_>>(),
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "type": d.ty.to_string(),
            "kappa": [self.kappa.re, self.kappa.im],
            "terms": terms,
        })
    }
}

/// `{shift, extra_shift, weyl_word, weyl_matrix}` for `g = ẘ t_λ`.
pub fn element_json(d: &RootDatum, g: &ExtendedWeylElement) -> Value {
    let word = ExtendedWeylElement::finite_part(g.finite.clone()).reduced_word(d).letters;
    let matrix: Vec<Vec<String>> = (0..g.finite.rows).map(|i| g.finite.row(i).iter().map(|x| x.to_string()).collect()).collect();
    json!({
        "shift": g.translation.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "extra_shift": g.extra.as_ref().map(|e| e.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()),
        "weyl_word": word,
        "weyl_matrix": matrix,
    })
}
