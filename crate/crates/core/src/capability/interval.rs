//! Binomial confidence intervals.

use statrs::distribution::{Beta, ContinuousCDF, Normal};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IntervalMethod {
    #[default]
    Wilson,
    ClopperPearson,
    /// Clopper–Pearson when `n_detected ≤ 5`, Wilson otherwise.
    Auto,
}

/// Counts at or below this use the exact interval under [`IntervalMethod::Auto`].
pub const EXACT_INTERVAL_MAX_COUNT: u64 = 5;

impl IntervalMethod {
    pub fn name(self) -> &'static str {
        match self {
            IntervalMethod::Wilson => "wilson",
            IntervalMethod::ClopperPearson => "clopper_pearson",
            IntervalMethod::Auto => "auto",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "wilson" => Some(IntervalMethod::Wilson),
            "clopper_pearson" | "exact" => Some(IntervalMethod::ClopperPearson),
            "auto" => Some(IntervalMethod::Auto),
            _ => None,
        }
    }

    pub fn interval(self, n_detected: u64, n: u64, level: f64) -> Result<(f64, f64)> {
        match self {
            IntervalMethod::Wilson => wilson_interval(n_detected, n, level),
            IntervalMethod::ClopperPearson => clopper_pearson_interval(n_detected, n, level),
            IntervalMethod::Auto if n_detected <= EXACT_INTERVAL_MAX_COUNT => {
                clopper_pearson_interval(n_detected, n, level)
            }
            IntervalMethod::Auto => wilson_interval(n_detected, n, level),
        }
    }
}

fn check(n_detected: u64, n: u64, level: f64) -> Result<()> {
    if n == 0 || n_detected > n {
        return Err(Error::invalid(format!("invalid counts {n_detected}/{n}")));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::invalid(format!("confidence level must lie in (0, 1), got {level}")));
    }
    Ok(())
}

/// Two-sided standard normal quantile for `level`.
pub fn normal_quantile(level: f64) -> f64 {
    Normal::standard().inverse_cdf(0.5 + level / 2.0)
}

/// Wilson score interval.
pub fn wilson_interval(n_detected: u64, n: u64, level: f64) -> Result<(f64, f64)> {
    check(n_detected, n, level)?;
    let z = normal_quantile(level);
    let nf = n as f64;
    let p = n_detected as f64 / nf;
    let z2n = z * z / nf;
    let center = (p + z2n / 2.0) / (1.0 + z2n);
    let half = z / (1.0 + z2n) * (p * (1.0 - p) / nf + z2n / (4.0 * nf)).sqrt();
    let low = if n_detected == 0 { 0.0 } else { (center - half).clamp(0.0, p) };
    let high = if n_detected == n { 1.0 } else { (center + half).clamp(p, 1.0) };
    Ok((low, high))
}

/// Exact (Clopper–Pearson) interval from beta quantiles.
pub fn clopper_pearson_interval(n_detected: u64, n: u64, level: f64) -> Result<(f64, f64)> {
    check(n_detected, n, level)?;
    let tail = (1.0 - level) / 2.0;
    let (x, nf) = (n_detected as f64, n as f64);
    let p = x / nf;
    let beta = |a: f64, b: f64| Beta::new(a, b).map_err(|e| Error::invalid(e.to_string()));
    let low = if n_detected == 0 {
        0.0
    } else {
        beta(x, nf - x + 1.0)?.inverse_cdf(tail).clamp(0.0, p)
    };
    let high = if n_detected == n {
        1.0
    } else {
        beta(x + 1.0, nf - x)?.inverse_cdf(1.0 - tail).clamp(p, 1.0)
    };
    Ok((low, high))
}

/// Binomial standard error `sqrt(p(1 − p)/n)`.
pub fn binomial_sigma(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}
