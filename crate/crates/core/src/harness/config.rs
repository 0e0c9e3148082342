//! Scenario configuration: type, level, couplings, spectral mode, sampling and
//! tolerances, read from a key-value file and/or command-line overrides.

use crate::error::{Error, Result};
use crate::operator::{Context, Couplings, Spectral};
use crate::root_system::{build_root_datum, RootDatum};
use crate::theta::SeriesConfig;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

/// Environment variable overriding the default series tail tolerance.
pub const SERIES_TOL_ENV: &str = "ELLROOT_SERIES_TOL";

/// The κ used in generic mode when none is given.
pub const DEFAULT_GENERIC_KAPPA: C64 = C64 { re: 0.29, im: 0.03 };

/// Default τ of every scenario.
pub const DEFAULT_TAU: C64 = C64 { re: 0.13, im: 1.05 };

/// Names of the checks `run_suite` understands, in default execution order.
pub const CHECK_NAMES: [&str; 11] = [
    "yang_baxter",
    "unitarity",
    "reduced_word_independence",
    "commutativity",
    "weyl_invariance",
    "closed_form_equiv",
    "bar_representation",
    "lengths_vs_bfs",
    "theta_quasiperiodicity",
    "theta_closure",
    "leading_term",
];

/// Default tolerance of every tolerance key.
pub fn default_tolerances() -> BTreeMap<String, f64> {
    [
        ("yang_baxter", 1e-9),
        ("unitarity", 1e-9),
        ("unitarity_degenerate", 1e-8),
        ("reduced_word_independence", 1e-10),
        ("commutativity", 1e-8),
        ("weyl_invariance", 1e-9),
        ("closed_form_equiv", 1e-9),
        ("bar_representation", 1e-9),
        ("lengths_vs_bfs", 0.0),
        ("theta_quasiperiodicity", 1e-10),
        ("theta_closure", 1e-7),
        ("leading_term", 1e-10),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

/// How ξ and κ are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// ξ sampled away from the degenerate hyperplanes; κ free.
    Generic,
    /// ξ = −ρ̊_μ and κ = h^∨_μ / k; no overrides accepted.
    Invariant,
    /// ξ and κ given explicitly.
    Manual,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mode> {
        match s.trim() {
            "generic" => Ok(Mode::Generic),
            "invariant" => Ok(Mode::Invariant),
            "manual" => Ok(Mode::Manual),
            other => Err(Error::Config(format!("unknown mode {other:?} (expected generic, invariant or manual)"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Generic => "generic",
            Mode::Invariant => "invariant",
            Mode::Manual => "manual",
        })
    }
}

/// A complete scenario description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    #[serde(rename = "type")]
    pub type_name: String,
    pub level_k: u32,
    /// μ per root class (class order of the datum); `None` means 0.31+0.07i for every class.
    pub mu: Option<Vec<C64>>,
    /// ζ overrides keyed by class index.
    pub zeta: BTreeMap<usize, [C64; 4]>,
    pub mode: Mode,
    /// ξ for manual mode (generic mode samples it).
    pub xi: Option<Vec<C64>>,
    /// κ for manual or generic mode.
    pub kappa: Option<C64>,
    pub tau: C64,
    pub sample_points: usize,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    /// Series tail tolerance (defaults to the environment override, else 1e−15).
    pub series_tol: f64,
    /// Record wall-clock seconds in reports (disable for bit-identical output).
    pub timing: bool,
}

/// Default μ for every class.
pub const DEFAULT_MU: C64 = C64 { re: 0.31, im: 0.07 };

impl ScenarioConfig {
    /// Defaults for a type: invariant mode at level 1, 20 points, seed 1.
    pub fn new(type_name: &str) -> ScenarioConfig {
        let series_tol = std::env::var(SERIES_TOL_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(SeriesConfig::default().tail_tol);
        ScenarioConfig {
            type_name: type_name.to_string(),
            level_k: 1,
            mu: None,
            zeta: BTreeMap::new(),
            mode: Mode::Invariant,
            xi: None,
            kappa: None,
            tau: DEFAULT_TAU,
            sample_points: 20,
            seed: 1,
            tolerances: default_tolerances(),
            series_tol,
            timing: true,
        }
    }

    /// Parses a key-value file (see [`ScenarioConfig::set`] for keys); `#`
    /// starts a comment. `type` must be present unless `base` supplies it.
    pub fn from_kv(text: &str, base: Option<ScenarioConfig>) -> Result<ScenarioConfig> {
        let mut pairs = vec![];
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        let mut cfg = match (base, pairs.iter().find(|(k, _)| k == "type")) {
            (_, Some((_, t))) => ScenarioConfig::new(t),
            (Some(b), None) => b,
            (None, None) => return Err(Error::Config("config file has no `type`".into())),
        };
        for (k, v) in &pairs {
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    /// Sets one key. Keys: `type`, `level`, `mode`, `tau`, `seed`, `samples`,
    /// `mu` (`;`-separated complexes), `zeta.<class>` (four complexes),
    /// `xi` (`;`-separated complexes), `kappa`, `series_tol`, `timing`,
    /// `tol.<name>`. Complexes are written `RE,IM` or `RE`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::Config(format!("{key}: invalid {what} {value:?}"));
        match key {
            "type" => self.type_name = value.to_string(),
            "level" => self.level_k = value.parse().map_err(|_| bad("integer"))?,
            "mode" => self.mode = value.parse()?,
            "tau" => self.tau = parse_complex(value)?,
            "seed" => self.seed = value.parse().map_err(|_| bad("integer"))?,
            "samples" => self.sample_points = value.parse().map_err(|_| bad("integer"))?,
            "mu" => self.mu = Some(parse_complex_list(value)?),
            "xi" => self.xi = Some(parse_complex_list(value)?),
            "kappa" => self.kappa = Some(parse_complex(value)?),
            "series_tol" => self.series_tol = value.parse().map_err(|_| bad("number"))?,
            "timing" => self.timing = value.parse().map_err(|_| bad("boolean"))?,
            _ => {
                if let Some(name) = key.strip_prefix("tol.") {
                    if !self.tolerances.contains_key(name) {
                        return Err(Error::Config(format!("unknown tolerance {name:?}")));
                    }
                    self.tolerances.insert(name.to_string(), value.parse().map_err(|_| bad("number"))?);
                } else if let Some(class) = key.strip_prefix("zeta.") {
                    let class: usize = class.parse().map_err(|_| bad("class index"))?;
                    let z = parse_complex_list(value)?;
                    let z: [C64; 4] = z.try_into().map_err(|_| bad("ζ table (need four entries)"))?;
                    self.zeta.insert(class, z);
                } else {
                    return Err(Error::Config(format!("unknown key {key:?}")));
                }
            }
        }
        Ok(())
    }

    pub fn tolerance(&self, name: &str) -> f64 {
        self.tolerances[name]
    }

    pub fn series(&self) -> SeriesConfig {
        SeriesConfig { tail_tol: self.series_tol, ..SeriesConfig::default() }
    }

    pub fn datum(&self) -> Result<Arc<RootDatum>> {
        Ok(Arc::new(build_root_datum(self.type_name.parse()?)?))
    }

    pub fn couplings(&self, d: &RootDatum) -> Result<Couplings> {
        let mu = match &self.mu {
            Some(m) if m.len() == 1 => vec![m[0]; d.num_classes()],
            Some(m) => m.clone(),
            None => vec![DEFAULT_MU; d.num_classes()],
        };
        let mut c = Couplings::per_class(d, mu)?;
        for (class, z) in &self.zeta {
            c = c.with_zeta(d, *class, *z)?;
        }
        Ok(c)
    }

    /// Checks the mode invariants and the τ floor.
    pub fn validate(&self) -> Result<()> {
        if self.level_k == 0 {
            return Err(Error::Config("level must be positive".into()));
        }
        if self.sample_points == 0 {
            return Err(Error::Config("samples must be positive".into()));
        }
        let floor = self.series().tau_floor;
        if !(self.tau.im >= floor) {
            return Err(Error::Config(format!("Im τ = {} is below the floor {floor}", self.tau.im)));
        }
        match self.mode {
            Mode::Invariant if self.xi.is_some() || self.kappa.is_some() => {
                Err(Error::Config("invariant mode computes ξ and κ; remove the xi/kappa overrides or use manual mode".into()))
            }
            Mode::Generic if self.xi.is_some() => Err(Error::Config("generic mode samples ξ; use manual mode to fix it".into())),
            Mode::Manual if self.xi.is_none() || self.kappa.is_none() => Err(Error::Config("manual mode needs both xi and kappa".into())),
            _ => Ok(()),
        }
    }

    /// The evaluation context of the scenario. Generic mode draws ξ from a
    /// sampler seeded by `seed`.
    pub fn context(&self) -> Result<Context> {
        self.validate()?;
        let d = self.datum()?;
        let couplings = self.couplings(&d)?;
        let series = self.series();
        match self.mode {
            Mode::Invariant => Context::invariant(d, self.tau, couplings, self.level_k, series),
            Mode::Manual => {
                let xi = self.xi.clone().expect("validated");
                if xi.len() != d.l {
                    return Err(Error::Config(format!("xi has {} entries, rank is {}", xi.len(), d.l)));
                }
                Context::new(d, self.tau, couplings, Spectral { xi, kappa: self.kappa.expect("validated") }, series)
            }
            Mode::Generic => {
                let kappa = self.kappa.unwrap_or(DEFAULT_GENERIC_KAPPA);
                let l = d.l;
                let ctx = Context::new(d, self.tau, couplings, Spectral { xi: vec![C64::new(0.0, 0.0); l], kappa }, series)?;
                let xi = super::sampling::Sampler::new(self.seed).generic_xi(&ctx)?;
                Ok(ctx.with_xi(xi))
            }
        }
    }
}

/// Parses `RE,IM` or `RE` into a complex number.
pub fn parse_complex(s: &str) -> Result<C64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |x: &str| x.parse::<f64>().map_err(|_| Error::Config(format!("invalid complex {s:?}")));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(Error::Config(format!("invalid complex {s:?} (expected RE,IM)"))),
    }
}

/// Parses a `;`-separated list of complexes.
pub fn parse_complex_list(s: &str) -> Result<Vec<C64>> {
    s.split(';').map(parse_complex).collect()
}
