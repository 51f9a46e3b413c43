//! Monte Carlo estimation of detection capabilities.
//!
//! Sample `i` of a run draws its state from stream `i` of the master seed and
//! any criterion randomness from a derived stream family, so the detected
//! count is a deterministic function of the configuration whatever the
//! worker count.

mod analysis;
mod interval;

use std::time::Instant;

use rayon::prelude::*;

use crate::bounds::BoundSelector;
use crate::criteria::{detect, faithful_alpha, Criterion, CriterionSpec};
use crate::error::{Error, Result};
use crate::quantum::{hermitian_eigs, Split};
use crate::sampler::{induced_state_with, SeedSpec};

pub use analysis::{fit_decay_slope, threshold_kth, DecayFit, MIN_FIT_COUNT};
pub use interval::{
    binomial_sigma, clopper_pearson_interval, normal_quantile, wilson_interval, IntervalMethod,
    EXACT_INTERVAL_MAX_COUNT,
};

pub const WORKERS_ENV: &str = "ENTCAP_WORKERS";
pub const MIN_SAMPLES: u64 = 100;
pub const DEFAULT_SAMPLES: u64 = 100_000;
pub const DEFAULT_CI_LEVEL: f64 = 0.95;

/// Salt separating criterion randomness from state randomness.
const CRITERION_SALT: u64 = 0x6372_6974_6572_696f;

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateConfig {
    pub criterion: CriterionSpec,
    pub k: usize,
    pub n_samples: u64,
    pub master_seed: u64,
    pub ci_level: f64,
    pub interval: IntervalMethod,
}

impl EstimateConfig {
    pub fn new(criterion: CriterionSpec, k: usize, n_samples: u64, master_seed: u64) -> Result<Self> {
        let cfg = EstimateConfig {
            criterion,
            k,
            n_samples,
            master_seed,
            ci_level: DEFAULT_CI_LEVEL,
            interval: IntervalMethod::Wilson,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_ci_level(mut self, level: f64) -> Result<Self> {
        self.ci_level = level;
        self.validate()?;
        Ok(self)
    }

    pub fn with_interval(mut self, interval: IntervalMethod) -> Self {
        self.interval = interval;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::invalid("k must be at least 1"));
        }
        if self.n_samples < MIN_SAMPLES {
            return Err(Error::invalid(format!(
                "n_samples must be at least {MIN_SAMPLES}, got {}",
                self.n_samples
            )));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(Error::invalid(format!(
                "ci_level must lie in (0, 1), got {}",
                self.ci_level
            )));
        }
        Ok(())
    }

    pub fn split(&self) -> Split {
        self.criterion.split()
    }

    pub fn dim_a(&self) -> usize {
        self.split().dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.split().dim_b
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapabilityEstimate {
    pub n_samples: u64,
    pub n_detected: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    pub bound_value: Option<f64>,
    pub wall_time_s: f64,
}

impl CapabilityEstimate {
    /// `p̂ − 3σ` with the plug-in binomial σ.
    pub fn lower_3sigma(&self) -> f64 {
        self.p_hat - 3.0 * binomial_sigma(self.p_hat, self.n_samples)
    }
}

/// Worker count from `ENTCAP_WORKERS`, else the machine's parallelism.
pub fn workers_from_env() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(Error::invalid(format!(
                "{WORKERS_ENV} must be a positive integer, got '{raw}'"
            ))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Seeds of sample `index`: the state stream and the criterion stream.
pub fn sample_seeds(master_seed: u64, index: u64) -> (SeedSpec, SeedSpec) {
    let state = SeedSpec::new(master_seed, index);
    (state, state.derive(CRITERION_SALT))
}

/// Whether sample `index` of the run is detected.
pub fn detect_sample(spec: &CriterionSpec, k: usize, master_seed: u64, index: u64) -> Result<bool> {
    let (state_seed, criterion_seed) = sample_seeds(master_seed, index);
    let rho = induced_state_with(&mut state_seed.rng(), spec.split(), k)?;
    Ok(detect(spec, &rho, criterion_seed)?.detected)
}

fn count_detections(cfg: &EstimateConfig, workers: usize) -> Result<u64> {
    let one = |i: u64| detect_sample(&cfg.criterion, cfg.k, cfg.master_seed, i).map(u64::from);
    if workers <= 1 {
        return (0..cfg.n_samples).try_fold(0u64, |acc, i| Ok(acc + one(i)?));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        (0..cfg.n_samples)
            .into_par_iter()
            .map(one)
            .try_reduce(|| 0, |a, b| Ok(a + b))
    })
}

pub fn estimate(cfg: &EstimateConfig) -> Result<CapabilityEstimate> {
    estimate_with_workers(cfg, workers_from_env()?)
}

pub fn estimate_with_workers(cfg: &EstimateConfig, workers: usize) -> Result<CapabilityEstimate> {
    cfg.validate()?;
    let start = Instant::now();
    let n_detected = count_detections(cfg, workers)?;
    let (ci_low, ci_high) = cfg.interval.interval(n_detected, cfg.n_samples, cfg.ci_level)?;
    Ok(CapabilityEstimate {
        n_samples: cfg.n_samples,
        n_detected,
        p_hat: n_detected as f64 / cfg.n_samples as f64,
        ci_low,
        ci_high,
        seed: cfg.master_seed,
        bound_value: None,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Bound attached to sweep rows.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundChoice {
    /// The natural bound of each criterion, where one exists.
    Auto,
    Fixed(BoundSelector),
}

impl BoundChoice {
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim() == "auto" {
            Ok(BoundChoice::Auto)
        } else {
            BoundSelector::parse(text).map(BoundChoice::Fixed)
        }
    }

    pub fn resolve(&self, spec: &CriterionSpec) -> Result<Option<BoundSelector>> {
        match self {
            BoundChoice::Fixed(sel) => Ok(Some(sel.clone())),
            BoundChoice::Auto => natural_bound(spec),
        }
    }
}

impl std::fmt::Display for BoundChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundChoice::Auto => f.write_str("auto"),
            BoundChoice::Fixed(sel) => sel.fmt(f),
        }
    }
}

/// Spectrum bound for a fixed witness, `α`-bounds for the re-randomized
/// witness families, nothing for the nonlinear criteria.
pub fn natural_bound(spec: &CriterionSpec) -> Result<Option<BoundSelector>> {
    Ok(match spec.criterion() {
        Criterion::EwFixed { witness, .. } => {
            let spectrum = hermitian_eigs(witness.observable())?;
            (spectrum.trace() > 0.0).then_some(BoundSelector::Spectrum(spectrum))
        }
        Criterion::EwPpt => Some(BoundSelector::Ew { alpha: 1.0 }),
        Criterion::EwFaithful => Some(BoundSelector::Ew {
            alpha: faithful_alpha(spec.split().dim()),
        }),
        _ => None,
    })
}

/// One sweep point before validation.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub criterion: String,
    pub dim_a: usize,
    pub dim_b: usize,
    pub k: usize,
    pub n_samples: u64,
    pub master_seed: u64,
    pub ci_level: f64,
    pub interval: IntervalMethod,
}

impl GridPoint {
    pub fn to_config(&self) -> Result<EstimateConfig> {
        let split = Split::new(self.dim_a, self.dim_b)?;
        let spec = CriterionSpec::parse(&self.criterion, split)?;
        Ok(EstimateConfig::new(spec, self.k, self.n_samples, self.master_seed)?
            .with_ci_level(self.ci_level)?
            .with_interval(self.interval))
    }
}

impl From<&EstimateConfig> for GridPoint {
    fn from(cfg: &EstimateConfig) -> Self {
        GridPoint {
            criterion: cfg.criterion.descriptor(),
            dim_a: cfg.dim_a(),
            dim_b: cfg.dim_b(),
            k: cfg.k,
            n_samples: cfg.n_samples,
            master_seed: cfg.master_seed,
            ci_level: cfg.ci_level,
            interval: cfg.interval,
        }
    }
}

/// One CSV row: the point's identifiers plus its estimate, or an error.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub experiment_id: String,
    pub criterion: String,
    pub d_a: usize,
    pub d_b: usize,
    pub k: usize,
    pub n_samples: u64,
    pub n_detected: Option<u64>,
    pub p_hat: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub master_seed: u64,
    pub bound_value: Option<f64>,
    pub wall_time_s: Option<f64>,
    pub error: Option<String>,
}

impl SweepRow {
    fn from_point(experiment_id: &str, point: &GridPoint) -> Self {
        SweepRow {
            experiment_id: experiment_id.to_string(),
            criterion: point.criterion.clone(),
            d_a: point.dim_a,
            d_b: point.dim_b,
            k: point.k,
            n_samples: point.n_samples,
            n_detected: None,
            p_hat: None,
            ci_low: None,
            ci_high: None,
            master_seed: point.master_seed,
            bound_value: None,
            wall_time_s: None,
            error: None,
        }
    }

    pub fn from_estimate(experiment_id: &str, cfg: &EstimateConfig, est: &CapabilityEstimate) -> Self {
        let mut row = Self::from_point(experiment_id, &GridPoint::from(cfg));
        row.fill(est);
        row
    }

    fn fill(&mut self, est: &CapabilityEstimate) {
        self.n_samples = est.n_samples;
        self.n_detected = Some(est.n_detected);
        self.p_hat = Some(est.p_hat);
        self.ci_low = Some(est.ci_low);
        self.ci_high = Some(est.ci_high);
        self.bound_value = est.bound_value;
        self.wall_time_s = Some(est.wall_time_s);
    }

    /// True when the row carries an estimate.
    pub fn succeeded(&self) -> bool {
        self.p_hat.is_some()
    }

    pub fn dim(&self) -> usize {
        self.d_a * self.d_b
    }

    /// `p̂ − 3σ ≤ bound`; rows without both numbers pass vacuously.
    pub fn bound_consistent(&self) -> bool {
        match (self.p_hat, self.bound_value) {
            (Some(p), Some(b)) => p - 3.0 * binomial_sigma(p, self.n_samples) <= b,
            _ => true,
        }
    }
}

fn run_point(experiment_id: &str, point: &GridPoint, bound: Option<&BoundChoice>, workers: usize) -> SweepRow {
    let mut row = SweepRow::from_point(experiment_id, point);
    let cfg = match point.to_config() {
        Ok(cfg) => cfg,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    match estimate_with_workers(&cfg, workers) {
        Ok(est) => row.fill(&est),
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    }
    if let Some(choice) = bound {
        let value = choice
            .resolve(&cfg.criterion)
            .and_then(|sel| sel.map(|s| s.evaluate(cfg.split().dim(), cfg.k)).transpose());
        match value {
            Ok(v) => row.bound_value = v.map(|b| b.value),
            Err(e) => row.error = Some(format!("bound: {e}")),
        }
    }
    row
}

/// Runs every point in order; failures land in the row's error column.
pub fn sweep(experiment_id: &str, grid: &[GridPoint], bound: Option<&BoundChoice>) -> Result<Vec<SweepRow>> {
    sweep_with_workers(experiment_id, grid, bound, workers_from_env()?)
}

pub fn sweep_with_workers(
    experiment_id: &str,
    grid: &[GridPoint],
    bound: Option<&BoundChoice>,
    workers: usize,
) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::invalid("sweep grid is empty"));
    }
    Ok(grid
        .iter()
        .map(|p| run_point(experiment_id, p, bound, workers))
        .collect())
}
