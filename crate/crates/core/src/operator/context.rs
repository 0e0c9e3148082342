//! Couplings, spectral parameters and the evaluation context of the operators.

use crate::error::{Error, Result};
use crate::linalg::{self, Q};
use crate::root_system::{h_vee_mu_c, n_alpha_table, rho_mu_c, AffineRoot, RootDatum};
use crate::theta::{ModularParam, SeriesConfig};
use num_complex::Complex64 as C64;
use std::sync::Arc;

/// Per-class couplings μ_α and the weights ζ^1..ζ^4 of the H-function slots.
#[derive(Clone, Debug, PartialEq)]
pub struct Couplings {
    /// μ per root class (indexed like `RootDatum::classes`).
    pub mu: Vec<C64>,
    /// ζ^j per root class; slots outside N_α must be zero.
    pub zeta: Vec<[C64; 4]>,
}

fn default_zeta() -> [C64; 4] {
    let z = C64::new(0.0, 0.0);
    [C64::new(1.0, 0.0), z, z, z]
}

/// A real root of the given class, used to look up its N_α table.
pub(crate) fn class_representative(d: &RootDatum, class: usize) -> AffineRoot {
    let a = d
        .root_directions()
        .into_iter()
        .find(|a| d.class_of_finite(a) == class)
        .expect("every class has a root");
    let delta = if d.is_half_finite(&a) { linalg::qf(1, 2) } else { Q::from_integer(0) };
    AffineRoot::new(a, delta)
}

impl Couplings {
    /// The same μ on every class, ζ = (1, 0, 0, 0).
    pub fn uniform(d: &RootDatum, mu: C64) -> Self {
        Couplings { mu: vec![mu; d.num_classes()], zeta: vec![default_zeta(); d.num_classes()] }
    }

    /// Per-class μ with ζ = (1, 0, 0, 0).
    pub fn per_class(d: &RootDatum, mu: Vec<C64>) -> Result<Self> {
        let c = Couplings { zeta: vec![default_zeta(); mu.len()], mu };
        c.validate(d)?;
        Ok(c)
    }

    /// Replaces the ζ weights of one class, validating against N_α.
    pub fn with_zeta(mut self, d: &RootDatum, class: usize, zeta: [C64; 4]) -> Result<Self> {
        if class >= self.zeta.len() {
            return Err(Error::Couplings(format!("no root class {class}")));
        }
        self.zeta[class] = zeta;
        self.validate(d)?;
        Ok(self)
    }

    pub fn validate(&self, d: &RootDatum) -> Result<()> {
        let n = d.num_classes();
        if self.mu.len() != n || self.zeta.len() != n {
            return Err(Error::Couplings(format!("expected {n} classes, got {} μ and {} ζ", self.mu.len(), self.zeta.len())));
        }
        for c in 0..n {
            let table = n_alpha_table(d, &class_representative(d, c))?;
            for j in 0..4 {
                if table[j].is_none() && self.zeta[c][j] != C64::new(0.0, 0.0) {
                    return Err(Error::Couplings(format!("ζ^{} of class {} must vanish: slot not in N_α", j + 1, d.classes[c].name)));
                }
            }
        }
        Ok(())
    }

    pub fn mu_of(&self, d: &RootDatum, a: &AffineRoot) -> Result<C64> {
        Ok(self.mu[d.class_of(a)?])
    }
}

/// Spectral parameter ξ (ᾱ-coordinates) and step κ.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectral {
    pub xi: Vec<C64>,
    pub kappa: C64,
}

/// Everything needed to evaluate operator coefficients.
#[derive(Clone, Debug)]
pub struct Context {
    pub datum: Arc<RootDatum>,
    pub tau: C64,
    pub couplings: Couplings,
    pub spectral: Spectral,
    pub series: SeriesConfig,
}

impl Context {
    pub fn new(datum: Arc<RootDatum>, tau: C64, couplings: Couplings, spectral: Spectral, series: SeriesConfig) -> Result<Self> {
        ModularParam::new(tau, &series)?;
        couplings.validate(&datum)?;
        if spectral.xi.len() != datum.l {
            return Err(Error::Config(format!("ξ has {} coordinates, rank is {}", spectral.xi.len(), datum.l)));
        }
        Ok(Context { datum, tau, couplings, spectral, series })
    }

    /// ξ = −ρ̊_μ and κ = h^∨_μ / k.
    pub fn invariant(datum: Arc<RootDatum>, tau: C64, couplings: Couplings, k: u32, series: SeriesConfig) -> Result<Self> {
        if k == 0 {
            return Err(Error::Config("level must be positive".into()));
        }
        let h = h_vee_mu_c(&datum, &couplings.mu);
        if h.norm() == 0.0 {
            return Err(Error::DegenerateHVee);
        }
        let xi = rho_mu_c(&datum, &couplings.mu).into_iter().map(|x| -x).collect();
        Self::new(datum, tau, couplings, Spectral { xi, kappa: h / k as f64 }, series)
    }

    pub fn with_xi(mut self, xi: Vec<C64>) -> Self {
        self.spectral.xi = xi;
        self
    }

    pub fn with_kappa(mut self, kappa: C64) -> Self {
        self.spectral.kappa = kappa;
        self
    }

    pub fn kappa(&self) -> C64 {
        self.spectral.kappa
    }

    pub fn rho_mu(&self) -> Vec<C64> {
        rho_mu_c(&self.datum, &self.couplings.mu)
    }

    pub fn h_vee_mu(&self) -> C64 {
        h_vee_mu_c(&self.datum, &self.couplings.mu)
    }

    /// Ξ = (ξ + ρ̊_μ)/h^∨_μ.
    pub fn big_xi(&self) -> Result<Vec<C64>> {
        let h = self.h_vee_mu();
        if h.norm() == 0.0 {
            return Err(Error::DegenerateHVee);
        }
        Ok(self.spectral.xi.iter().zip(self.rho_mu()).map(|(x, r)| (x + r) / h).collect())
    }

    /// Whether ξ = −ρ̊_μ to rounding.
    pub fn is_invariant_mode(&self) -> bool {
        let r = self.rho_mu();
        let scale = 1.0 + r.iter().map(|z| z.norm()).fold(0.0, f64::max);
        self.spectral.xi.iter().zip(&r).all(|(x, r)| (x + r).norm() <= 1e-12 * scale)
    }

    /// ⟨ξ, α^∨⟩ = 2(ξ|ᾱ)/(ᾱ|ᾱ).
    pub fn xi_pairing(&self, a: &[Q]) -> C64 {
        let d = &*self.datum;
        let a_c: Vec<C64> = a.iter().map(|x| C64::new(linalg::to_f64(x), 0.0)).collect();
        2.0 * d.pair_cc(&a_c, &self.spectral.xi) / linalg::to_f64(&d.sq(a))
    }
}
