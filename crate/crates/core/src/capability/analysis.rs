//! Post-processing of sweep rows: decay-slope fits and threshold extraction.

use super::SweepRow;
use crate::error::{Error, Result};

/// Rows with fewer detections than this are left out of log-scale fits.
pub const MIN_FIT_COUNT: u64 = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub n_points: usize,
}

/// Least-squares fit of `ln p̂` against `k` over rows with `k ≥ k_min` and at
/// least [`MIN_FIT_COUNT`] detections.
pub fn fit_decay_slope(rows: &[SweepRow], k_min: usize) -> Result<DecayFit> {
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.k >= k_min && r.n_detected.is_some_and(|n| n >= MIN_FIT_COUNT))
        .filter_map(|r| r.p_hat.map(|p| (r.k as f64, p.ln())))
        .collect();
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} qualifying rows (need 3 with k ≥ {k_min} and n_detected ≥ {MIN_FIT_COUNT})",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all qualifying rows share one k".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(DecayFit {
        slope,
        intercept,
        r2,
        n_points: points.len(),
    })
}

/// First `k` at which `p̂` falls below half the plateau (mean `p̂` over the
/// three smallest `k`), linearly interpolated between the bracketing rows.
pub fn threshold_kth(rows: &[SweepRow]) -> Result<f64> {
    let mut points: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.p_hat.map(|p| (r.k as f64, p)))
        .collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    if points.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "{} rows with estimates (need at least 4)",
            points.len()
        )));
    }
    let plateau = points[..3].iter().map(|p| p.1).sum::<f64>() / 3.0;
    let half = plateau / 2.0;
    if !(plateau > 0.0) {
        return Err(Error::NoThreshold);
    }
    let idx = points.iter().position(|p| p.1 < half).ok_or(Error::NoThreshold)?;
    if idx == 0 {
        return Ok(points[0].0);
    }
    let (k0, p0) = points[idx - 1];
    let (k1, p1) = points[idx];
    Ok(k0 + (p0 - half) / (p0 - p1) * (k1 - k0))
}
