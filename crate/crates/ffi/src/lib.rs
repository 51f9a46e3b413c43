//! C ABI over the `entcap` engine.
//!
//! Every fallible function returns an [`EntcapStatus`]. On failure the
//! message is kept per thread and can be read with [`entcap_last_error`].
//! Handles are opaque; each `*_new` has a matching `*_free`. Matrices cross
//! the boundary as separate row-major real and imaginary arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use entcap::bounds::BoundSelector;
use entcap::capability::{estimate_with_workers, workers_from_env, CapabilityEstimate, EstimateConfig};
use entcap::criteria::{detect, validate_witness_alpha, CriterionSpec, Witness};
use entcap::quantum::CMatrix;
use entcap::sampler::induced_state;
use entcap::{DensityMatrix, Error, HermitianObservable, SeedSpec, Split, C64};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntcapStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    DimensionMismatch = 4,
    InvalidBound = 5,
    Numerical = 6,
    Io = 7,
    Panic = 8,
}

impl From<&Error> for EntcapStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::Parse { .. } => EntcapStatus::InvalidInput,
            Error::DimensionMismatch { .. } => EntcapStatus::DimensionMismatch,
            Error::InvalidBound(_) => EntcapStatus::InvalidBound,
            Error::InvalidMoments { .. } | Error::InsufficientData(_) | Error::NoThreshold => {
                EntcapStatus::Numerical
            }
            Error::Io(_) | Error::Csv(_) => EntcapStatus::Io,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(EntcapStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(EntcapStatus::from(&e), e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(EntcapStatus::NullPointer, format!("{name} is null"))
}

/// Runs `f`, recording its error or panic as the thread's last error.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> EntcapStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EntcapStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            EntcapStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(EntcapStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(name))
}

unsafe fn read_matrix(re: *const f64, im: *const f64, dim: usize) -> Result<CMatrix, Failure> {
    if re.is_null() {
        return Err(null("re"));
    }
    let len = dim
        .checked_mul(dim)
        .ok_or_else(|| Failure(EntcapStatus::InvalidInput, "dimension overflows".into()))?;
    let re = std::slice::from_raw_parts(re, len);
    let im = if im.is_null() { None } else { Some(std::slice::from_raw_parts(im, len)) };
    Ok(CMatrix::from_fn(dim, dim, |r, c| {
        C64::new(re[r * dim + c], im.map_or(0.0, |v| v[r * dim + c]))
    }))
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn entcap_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static, NUL-terminated version string.
#[no_mangle]
pub extern "C" fn entcap_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Bipartite density matrix.
pub struct EntcapDensityMatrix(DensityMatrix);

/// Criterion bound to a split.
pub struct EntcapCriterion(CriterionSpec);

/// Capability estimate.
pub struct EntcapEstimate(CapabilityEstimate);

/// Builds a density matrix from row-major parts of a `(da*db)²` matrix.
/// `im` may be null for a real matrix.
///
/// # Safety
/// `re` (and `im` if non-null) must point to `(da*db)²` doubles; `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn entcap_density_matrix_new(
    dim_a: usize,
    dim_b: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut EntcapDensityMatrix,
) -> EntcapStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let split = Split::new(dim_a, dim_b)?;
        let m = read_matrix(re, im, split.dim())?;
        let rho = DensityMatrix::new(split, m)?;
        *out = Box::into_raw(Box::new(EntcapDensityMatrix(rho)));
        Ok(())
    })
}

/// Draws a state from the `k`-induced measure.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn entcap_induced_state(
    dim_a: usize,
    dim_b: usize,
    k: usize,
    master_seed: u64,
    stream_index: u64,
    out: *mut *mut EntcapDensityMatrix,
) -> EntcapStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let rho = induced_state(dim_a, dim_b, k, SeedSpec::new(master_seed, stream_index))?;
        *out = Box::into_raw(Box::new(EntcapDensityMatrix(rho)));
        Ok(())
    })
}

/// # Safety
/// `rho` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn entcap_density_matrix_free(rho: *mut EntcapDensityMatrix) {
    if !rho.is_null() {
        drop(Box::from_raw(rho));
    }
}

/// Total dimension `da*db`, or 0 for a null handle.
///
/// # Safety
/// `rho` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn entcap_density_matrix_dim(rho: *const EntcapDensityMatrix) -> usize {
    rho.as_ref().map_or(0, |r| r.0.dim())
}

/// Copies the entries into row-major `re` / `im` arrays of `dim²` doubles.
///
/// # Safety
/// `rho` must be a live handle; `re` and `im` must be writable for `dim²`
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn entcap_density_matrix_entries(
    rho: *const EntcapDensityMatrix,
    re: *mut f64,
    im: *mut f64,
) -> EntcapStatus {
    guard(|| {
        let rho = ref_arg(rho, "rho")?;
        if re.is_null() || im.is_null() {
            return Err(null("re/im"));
        }
        let m = rho.0.entries();
        let d = m.nrows();
        let re = std::slice::from_raw_parts_mut(re, d * d);
        let im = std::slice::from_raw_parts_mut(im, d * d);
        for r in 0..d {
            for c in 0..d {
                re[r * d + c] = m[(r, c)].re;
                im[r * d + c] = m[(r, c)].im;
            }
        }
        Ok(())
    })
}

/// `tr(ρ²)`.
///
/// # Safety
/// `rho` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn entcap_density_matrix_purity(
    rho: *const EntcapDensityMatrix,
    out: *mut f64,
) -> EntcapStatus {
    guard(|| {
        *out_arg(out, "out")? = ref_arg(rho, "rho")?.0.purity();
        Ok(())
    })
}

/// Parses a criterion descriptor such as `"ew_ppt"` or `"fisher(pairs=5)"`
/// for a `dim_a x dim_b` split.
///
/// # Safety
/// `descriptor` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn entcap_criterion_new(
    descriptor: *const c_char,
    dim_a: usize,
    dim_b: usize,
    out: *mut *mut EntcapCriterion,
) -> EntcapStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let descriptor = str_arg(descriptor, "descriptor")?;
        let spec = CriterionSpec::parse(descriptor, Split::new(dim_a, dim_b)?)?;
        *out = Box::into_raw(Box::new(EntcapCriterion(spec)));
        Ok(())
    })
}

/// # Safety
/// `criterion` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn entcap_criterion_free(criterion: *mut EntcapCriterion) {
    if !criterion.is_null() {
        drop(Box::from_raw(criterion));
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EntcapDetection {
    pub detected: bool,
    /// Positive means the separability inequality is violated.
    pub statistic: f64,
    pub threshold: f64,
}

/// Evaluates a criterion on one state. The seed is used only by criteria
/// that draw a witness or observables per state.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn entcap_detect(
    criterion: *const EntcapCriterion,
    rho: *const EntcapDensityMatrix,
    master_seed: u64,
    stream_index: u64,
    out: *mut EntcapDetection,
) -> EntcapStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let spec = &ref_arg(criterion, "criterion")?.0;
        let rho = &ref_arg(rho, "rho")?.0;
        let o = detect(spec, rho, SeedSpec::new(master_seed, stream_index))?;
        *out = EntcapDetection {
            detected: o.detected,
            statistic: o.statistic,
            threshold: o.threshold,
        };
        Ok(())
    })
}

/// Monte Carlo capability estimate. `workers = 0` reads `ENTCAP_WORKERS`
/// (default: all cores). Counts do not depend on the worker count.
///
/// # Safety
/// `criterion` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn entcap_estimate(
    criterion: *const EntcapCriterion,
    k: usize,
    n_samples: u64,
    master_seed: u64,
    ci_level: f64,
    workers: usize,
    out: *mut *mut EntcapEstimate,
) -> EntcapStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let spec = ref_arg(criterion, "criterion")?.0.clone();
        let cfg = EstimateConfig::new(spec, k, n_samples, master_seed)?.with_ci_level(ci_level)?;
        let workers = if workers == 0 { workers_from_env()? } else { workers };
        let est = estimate_with_workers(&cfg, workers)?;
        *out = Box::into_raw(Box::new(EntcapEstimate(est)));
        Ok(())
    })
}

/// # Safety
/// `est` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn entcap_estimate_free(est: *mut EntcapEstimate) {
    if !est.is_null() {
        drop(Box::from_raw(est));
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EntcapEstimateSummary {
    pub n_samples: u64,
    pub n_detected: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub master_seed: u64,
    pub wall_time_s: f64,
}

/// # Safety
/// `est` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn entcap_estimate_summary(
    est: *const EntcapEstimate,
    out: *mut EntcapEstimateSummary,
) -> EntcapStatus {
    guard(|| {
        let e = &ref_arg(est, "est")?.0;
        *out_arg(out, "out")? = EntcapEstimateSummary {
            n_samples: e.n_samples,
            n_detected: e.n_detected,
            p_hat: e.p_hat,
            ci_low: e.ci_low,
            ci_high: e.ci_high,
            master_seed: e.seed,
            wall_time_s: e.wall_time_s,
        };
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EntcapBound {
    pub value: f64,
    pub exponent_rate: f64,
    pub prefactor_log: f64,
    pub vacuous: bool,
}

/// Evaluates a bound selector such as `"ew alpha=1"` or
/// `"faithful d=9"` at `k`. `default_d` fills in a missing dimension.
///
/// # Safety
/// `selector` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn entcap_bound(
    selector: *const c_char,
    default_d: usize,
    k: usize,
    out: *mut EntcapBound,
) -> EntcapStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let sel = BoundSelector::parse(str_arg(selector, "selector")?)?;
        let b = sel.evaluate(default_d, k)?;
        *out = EntcapBound {
            value: b.value,
            exponent_rate: b.exponent_rate,
            prefactor_log: b.prefactor_log,
            vacuous: b.vacuous,
        };
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EntcapWitnessCheck {
    pub alpha: f64,
    pub trace: f64,
    pub inner_ball_value: f64,
    /// `false` proves the operator is not a witness.
    pub passes_inner_ball: bool,
}

/// Necessary-condition check for a candidate witness given as a Hermitian
/// `dim x dim` matrix in row-major parts. `im` may be null.
///
/// # Safety
/// `re` (and `im` if non-null) must point to `dim²` doubles; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn entcap_check_witness(
    re: *const f64,
    im: *const f64,
    dim: usize,
    out: *mut EntcapWitnessCheck,
) -> EntcapStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let w = Witness::custom(HermitianObservable::new(read_matrix(re, im, dim)?)?);
        let c = validate_witness_alpha(&w);
        *out = EntcapWitnessCheck {
            alpha: c.alpha,
            trace: w.observable().trace(),
            inner_ball_value: c.inner_ball_value,
            passes_inner_ball: c.passes_inner_ball,
        };
        Ok(())
    })
}
