//! Closed-form upper bounds on detection capabilities.
//!
//! Every bound has the shape `exp(prefactor_log − exponent_rate · k)`. Values
//! of 1 or more carry no information and are flagged `vacuous`, but are still
//! reported unclamped.

use std::fmt;

use crate::error::{Error, Result};
use crate::quantum::Spectrum;

/// `3 − 2√2 = (√2 − 1)²`, the decay rate of the α = 1 bound.
pub const MIN_RATE: f64 = 3.0 - 2.0 * std::f64::consts::SQRT_2;

pub const DEFAULT_EPS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundResult {
    pub k: usize,
    pub value: f64,
    /// Coefficient of `−k` in the exponent.
    pub exponent_rate: f64,
    /// The `k`-independent part of the log.
    pub prefactor_log: f64,
    pub vacuous: bool,
}

impl BoundResult {
    fn from_log_form(prefactor_log: f64, exponent_rate: f64, k: usize) -> Self {
        let value = (prefactor_log - exponent_rate * k as f64).exp();
        BoundResult {
            k,
            value,
            exponent_rate,
            prefactor_log,
            vacuous: value >= 1.0,
        }
    }

    /// Smallest `k` with a non-vacuous value, `(prefactor_log)/rate`.
    pub fn threshold_k(&self) -> f64 {
        self.prefactor_log / self.exponent_rate
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha >= 1.0) {
        return Err(Error::InvalidBound(format!(
            "alpha must be at least 1 for a valid witness, got {alpha}"
        )));
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidBound(format!("eps must lie in (0, 1), got {eps}")));
    }
    Ok(())
}

/// Single-witness bound `2 exp(−(√(1+α) − 1)² k)`.
pub fn ew_bound(alpha: f64, k: usize) -> Result<BoundResult> {
    check_alpha(alpha)?;
    let rate = ((1.0 + alpha).sqrt() - 1.0).powi(2);
    Ok(BoundResult::from_log_form(std::f64::consts::LN_2, rate, k))
}

/// Union bound over `n` witnesses: `2 n exp(−(√(1+α_min) − 1)² k)`.
pub fn ew_set_bound(n_witnesses: u64, alpha_min: f64, k: usize) -> Result<BoundResult> {
    if n_witnesses == 0 {
        return Err(Error::InvalidBound("witness count must be at least 1".into()));
    }
    let single = ew_bound(alpha_min, k)?;
    let prefactor = single.prefactor_log + (n_witnesses as f64).ln();
    Ok(BoundResult::from_log_form(prefactor, single.exponent_rate, k))
}

/// Positive part `a` and absolute negative part `b` of a spectrum.
fn split_spectrum(spec: &Spectrum) -> (Vec<f64>, Vec<f64>) {
    let pos = spec.values().iter().copied().filter(|&x| x > 0.0).collect();
    let neg = spec.values().iter().filter(|&&x| x < 0.0).map(|x| -x).collect();
    (pos, neg)
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, &x| m.max(x))
}

/// `sqrt(t/(2k))` at the point where the two chi-square tail exponents
/// coincide:
/// `(−(‖a‖₂+‖b‖₂) + sqrt((‖a‖₂+‖b‖₂)² + 2‖b‖_∞ tr O)) / (2‖b‖_∞)`.
fn balanced_root(a: &[f64], b: &[f64], trace: f64) -> f64 {
    let s = norm2(a) + norm2(b);
    let b_inf = norm_inf(b);
    (-s + (s * s + 2.0 * b_inf * trace).sqrt()) / (2.0 * b_inf)
}

/// Spectrum-aware bound `2 exp(−t)` from the Laurent–Massart tails of the
/// Gaussian quadratic form `Σ λ_i (x_i² + y_i²)`, evaluated where the upper
/// and lower tail exponents are equal.
pub fn spectrum_bound(spec: &Spectrum, k: usize) -> Result<BoundResult> {
    let trace = spec.trace();
    if !(trace > 0.0) {
        return Err(Error::InvalidBound(format!(
            "spectrum must have positive trace, got {trace}"
        )));
    }
    let (a, b) = split_spectrum(spec);
    if b.is_empty() {
        return Ok(BoundResult::from_log_form(f64::NEG_INFINITY, 0.0, k));
    }
    let root = balanced_root(&a, &b, trace);
    // t = 2k · root², so the rate per unit k is 2 root²
    let rate = 2.0 * root * root;
    Ok(BoundResult::from_log_form(std::f64::consts::LN_2, rate, k))
}

/// `exp(−t₁) + exp(−t₂)` for an arbitrary split level `c` between the two
/// tails, with `t₁`, `t₂` solving the Laurent–Massart deviation equations
/// `2k‖a‖₁ − 2√(2k)‖a‖₂√t₂ = c` and
/// `2k‖b‖₁ + 2√(2k)‖b‖₂√t₁ + 2‖b‖_∞ t₁ = c`.
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn split_level_tail_bound(spec: &Spectrum, k: usize, c: f64) -> Option<f64> {
    let (a, b) = split_spectrum(spec);
    let kf = k as f64;
    let (a1, a2) = (a.iter().sum::<f64>(), norm2(&a));
    let (b1, b2, binf) = (b.iter().sum::<f64>(), norm2(&b), norm_inf(&b));
    let lo = 2.0 * kf * b1;
    let hi = 2.0 * kf * a1;
    if !(c > lo && c < hi) {
        return None;
    }
    let sqrt_t2 = (hi - c) / (2.0 * (2.0 * kf).sqrt() * a2);
    let t2 = sqrt_t2 * sqrt_t2;
    // 2 binf u² + 2√(2k) b2 u − (c − lo) = 0 with u = √t₁
    let p = 2.0 * (2.0 * kf).sqrt() * b2;
    let u = (-p + (p * p + 8.0 * binf * (c - lo)).sqrt()) / (4.0 * binf);
    let t1 = u * u;
    Some((-t1).exp() + (-t2).exp())
}

/// Parameterized-witness bound `2 exp(C₁ − C₂ k)` with
/// `C₁ = M ln(2√M l d/ε)` and `C₂ = (√(1 + α_min − ε) − 1)²`.
pub fn param_ew_bound(
    m_params: u64,
    lipschitz: f64,
    d: usize,
    alpha_min: f64,
    k: usize,
    eps: f64,
) -> Result<BoundResult> {
    check_eps(eps)?;
    check_alpha(alpha_min)?;
    if m_params == 0 || d == 0 {
        return Err(Error::InvalidBound("parameter count and dimension must be positive".into()));
    }
    if !(lipschitz > 0.0) {
        return Err(Error::InvalidBound(format!("Lipschitz constant must be positive, got {lipschitz}")));
    }
    let m = m_params as f64;
    let c1 = m * (2.0 * m.sqrt() * lipschitz * d as f64 / eps).ln();
    let c2 = ((1.0 + alpha_min - eps).sqrt() - 1.0).powi(2);
    Ok(BoundResult::from_log_form(std::f64::consts::LN_2 + c1, c2, k))
}

/// Positive-map criteria: `M = 2d` real parameters, `ε = 1/2`, giving
/// `C₁ = 2d ln(2^{2.5} d^{1.5} l)` and `C₂ = (√(0.5 + α_min) − 1)²`.
pub fn positive_map_bound(d: usize, lipschitz: f64, alpha_min: f64, k: usize) -> Result<BoundResult> {
    param_ew_bound(2 * d as u64, lipschitz, d, alpha_min, k, DEFAULT_EPS)
}

/// Faithful-ratio criterion: `C₁ = 3d ln 4d`,
/// `C₂ = (√(0.5 + √((d − √d)/2)) − 1)²`; `d` must be a square.
pub fn faithful_ratio_bound(d: usize, k: usize) -> Result<BoundResult> {
    let side = (d as f64).sqrt().round() as usize;
    if d < 4 || side * side != d {
        return Err(Error::InvalidBound(format!("d must be a perfect square ≥ 4, got {d}")));
    }
    let df = d as f64;
    let c1 = 3.0 * df * (4.0 * df).ln();
    let alpha = ((df - df.sqrt()) / 2.0).sqrt();
    let c2 = ((0.5 + alpha).sqrt() - 1.0).powi(2);
    Ok(BoundResult::from_log_form(std::f64::consts::LN_2 + c1, c2, k))
}

/// Single-copy criteria with `m_observables` observables. The normalized
/// identity is appended, so `M = m_observables + 1`;
/// `C₁ = M ln(2√M d/ε)`, `C₂ = (√(2 − ε) − 1)²`.
pub fn single_copy_bound(m_observables: u64, d: usize, k: usize, eps: f64) -> Result<BoundResult> {
    check_eps(eps)?;
    if d == 0 {
        return Err(Error::InvalidBound("dimension must be positive".into()));
    }
    let m = (m_observables + 1) as f64;
    let c1 = m * (2.0 * m.sqrt() * d as f64 / eps).ln();
    let c2 = ((2.0 - eps).sqrt() - 1.0).powi(2);
    Ok(BoundResult::from_log_form(std::f64::consts::LN_2 + c1, c2, k))
}

/// Adaptive sign-oracle protocols with `m` queries: `2^{m+1} exp(−(3 − 2√2) k)`.
pub fn adaptive_bound(m_queries: u64, k: usize) -> BoundResult {
    let prefactor = (m_queries as f64 + 1.0) * std::f64::consts::LN_2;
    BoundResult::from_log_form(prefactor, MIN_RATE, k)
}

/// A bound family with its parameters; dimensions left unset default to the
/// total dimension of the experiment it is attached to.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundSelector {
    Ew { alpha: f64 },
    EwSet { n: u64, alpha_min: f64 },
    Spectrum(Spectrum),
    Param { m: u64, lipschitz: f64, d: Option<usize>, alpha_min: f64, eps: f64 },
    PosMap { d: Option<usize>, lipschitz: f64, alpha_min: f64 },
    Faithful { d: Option<usize> },
    SingleCopy { m: u64, d: Option<usize>, eps: f64 },
    Adaptive { m: u64 },
}

impl BoundSelector {
    pub const TYPES: [&'static str; 8] = [
        "ew", "ewset", "spectrum", "param", "posmap", "faithful", "singlecopy", "adaptive",
    ];

    pub fn evaluate(&self, default_d: usize, k: usize) -> Result<BoundResult> {
        match self {
            BoundSelector::Ew { alpha } => ew_bound(*alpha, k),
            BoundSelector::EwSet { n, alpha_min } => ew_set_bound(*n, *alpha_min, k),
            BoundSelector::Spectrum(spec) => spectrum_bound(spec, k),
            BoundSelector::Param { m, lipschitz, d, alpha_min, eps } => {
                param_ew_bound(*m, *lipschitz, d.unwrap_or(default_d), *alpha_min, k, *eps)
            }
            BoundSelector::PosMap { d, lipschitz, alpha_min } => {
                positive_map_bound(d.unwrap_or(default_d), *lipschitz, *alpha_min, k)
            }
            BoundSelector::Faithful { d } => faithful_ratio_bound(d.unwrap_or(default_d), k),
            BoundSelector::SingleCopy { m, d, eps } => {
                single_copy_bound(*m, d.unwrap_or(default_d), k, *eps)
            }
            BoundSelector::Adaptive { m } => Ok(adaptive_bound(*m, k)),
        }
    }

    /// Parses `TYPE key=value ...`, e.g. `ew alpha=1` or
    /// `spectrum eigenvalues=0.5;0.5;0.5;-0.5`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let ty = tokens
            .next()
            .ok_or_else(|| Error::InvalidBound("empty bound selector".into()))?;
        let mut params = std::collections::BTreeMap::new();
        for tok in tokens {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| Error::InvalidBound(format!("'{tok}' is not key=value")))?;
            if params.insert(k.to_string(), v.to_string()).is_some() {
                return Err(Error::InvalidBound(format!("duplicate key '{k}'")));
            }
        }
        let mut take = |key: &str| params.remove(key);
        let num = |key: &str, v: Option<String>| -> Result<Option<f64>> {
            v.map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::InvalidBound(format!("{key} = '{s}' is not a number")))
            })
            .transpose()
        };
        let count = |key: &str, v: Option<String>| -> Result<Option<u64>> {
            v.map(|s| {
                s.parse::<u64>()
                    .map_err(|_| Error::InvalidBound(format!("{key} = '{s}' is not a count")))
            })
            .transpose()
        };
        let dim = |v: Option<String>| -> Result<Option<usize>> {
            count("d", v).map(|o| o.map(|x| x as usize))
        };
        let required = |key: &str, v: Option<f64>| {
            v.ok_or_else(|| Error::InvalidBound(format!("bound '{ty}' needs {key}")))
        };
        let selector = match ty {
            "ew" => BoundSelector::Ew {
                alpha: num("alpha", take("alpha"))?.unwrap_or(1.0),
            },
            "ewset" => BoundSelector::EwSet {
                n: required("n", count("n", take("n"))?.map(|x| x as f64))? as u64,
                alpha_min: num("alpha", take("alpha"))?.unwrap_or(1.0),
            },
            "spectrum" => {
                let raw = take("eigenvalues")
                    .ok_or_else(|| Error::InvalidBound("bound 'spectrum' needs eigenvalues".into()))?;
                let values = raw
                    .split(';')
                    .map(|s| {
                        s.parse::<f64>()
                            .map_err(|_| Error::InvalidBound(format!("eigenvalue '{s}' is not a number")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                BoundSelector::Spectrum(Spectrum::new(values)?)
            }
            "param" => BoundSelector::Param {
                m: required("m", count("m", take("m"))?.map(|x| x as f64))? as u64,
                lipschitz: required("l", num("l", take("l"))?)?,
                d: dim(take("d"))?,
                alpha_min: num("alpha", take("alpha"))?.unwrap_or(1.0),
                eps: num("eps", take("eps"))?.unwrap_or(DEFAULT_EPS),
            },
            "posmap" => BoundSelector::PosMap {
                d: dim(take("d"))?,
                lipschitz: num("l", take("l"))?.unwrap_or(std::f64::consts::SQRT_2),
                alpha_min: num("alpha", take("alpha"))?.unwrap_or(1.0),
            },
            "faithful" => BoundSelector::Faithful { d: dim(take("d"))? },
            "singlecopy" => BoundSelector::SingleCopy {
                m: required("m", count("m", take("m"))?.map(|x| x as f64))? as u64,
                d: dim(take("d"))?,
                eps: num("eps", take("eps"))?.unwrap_or(DEFAULT_EPS),
            },
            "adaptive" => BoundSelector::Adaptive {
                m: count("m", take("m"))?.unwrap_or(0),
            },
            other => {
                return Err(Error::InvalidBound(format!(
                    "unknown bound type '{other}' (expected one of {})",
                    Self::TYPES.join(", ")
                )))
            }
        };
        if let Some(key) = params.keys().next() {
            return Err(Error::InvalidBound(format!("bound '{ty}' has no parameter '{key}'")));
        }
        Ok(selector)
    }
}

impl fmt::Display for BoundSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = |d: &Option<usize>| d.map(|d| format!(" d={d}")).unwrap_or_default();
        match self {
            BoundSelector::Ew { alpha } => write!(f, "ew alpha={alpha}"),
            BoundSelector::EwSet { n, alpha_min } => write!(f, "ewset n={n} alpha={alpha_min}"),
            BoundSelector::Spectrum(s) => {
                let vals: Vec<String> = s.values().iter().map(|v| v.to_string()).collect();
                write!(f, "spectrum eigenvalues={}", vals.join(";"))
            }
            BoundSelector::Param { m, lipschitz, d: dd, alpha_min, eps } => {
                write!(f, "param m={m} l={lipschitz}{} alpha={alpha_min} eps={eps}", d(dd))
            }
            BoundSelector::PosMap { d: dd, lipschitz, alpha_min } => {
                write!(f, "posmap l={lipschitz}{} alpha={alpha_min}", d(dd))
            }
            BoundSelector::Faithful { d: dd } => write!(f, "faithful{}", d(dd)),
            BoundSelector::SingleCopy { m, d: dd, eps } => write!(f, "singlecopy m={m}{} eps={eps}", d(dd)),
            BoundSelector::Adaptive { m } => write!(f, "adaptive m={m}"),
        }
    }
}
