//! Fast invariant suite behind the `selftest` subcommand.
//!
//! Every check takes its tolerances from the [`Tolerances`] it is given, so a
//! corrupted tolerance set must make the suite fail.

use std::fmt;

use crate::bounds::{adaptive_bound, ew_bound, param_ew_bound, positive_map_bound, spectrum_bound, MIN_RATE};
use crate::capability::{estimate_with_workers, EstimateConfig};
use crate::criteria::{
    e4, faithful_alpha, faithful_witness, ppt_witness, qfi, realignment_moments, validate_witness_alpha,
    CriterionKind, CriterionSpec,
};
use crate::error::Result;
use crate::quantum::{
    multicopy_swap_expectation, partial_trace, partial_transpose_matrix, realign_matrix, CMatrix,
    CopyPermutation, DensityMatrix, HermitianObservable, Spectrum, Split, Subsystem, C64,
};
use crate::sampler::{
    gue_observable, induced_state, random_max_entangled, random_pure_state, SeedSpec,
};
use crate::tolerance::Tolerances;

const SEED: u64 = 0x5e1f_7e57;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SelftestReport {
    pub checks: Vec<CheckResult>,
}

impl SelftestReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for SelftestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {:<28} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        let failed = self.failures().count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

/// A tolerance set no check can satisfy. Used to exercise the failure path.
#[doc(hidden)]
pub fn corrupted_tolerances() -> Tolerances {
    Tolerances {
        index_oracle: -1.0,
        m4_equivalence: -1.0,
        qfi_oracle: -1.0,
        witness_alpha: -1.0,
        inner_ball: -1.0,
        two_copy: -1.0,
        bound_relative: -1.0,
        ..Tolerances::default()
    }
}

fn seed(i: u64) -> SeedSpec {
    SeedSpec::new(SEED, i)
}

fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().fold(0.0, |m, z| m.max(z.norm()))
}

fn within(name: &'static str, worst: f64, tol: f64) -> CheckResult {
    CheckResult {
        name,
        passed: worst <= tol,
        detail: format!("max deviation {worst:.3e} (tolerance {tol:.1e})"),
    }
}

fn check_partial_trace(tol: &Tolerances) -> Result<CheckResult> {
    let (da, db) = (3, 3);
    let rho = induced_state(da, db, 9, seed(1))?;
    let m = rho.entries();
    let mut keep_a = CMatrix::zeros(da, da);
    let mut keep_b = CMatrix::zeros(db, db);
    for i in 0..da {
        for j in 0..da {
            for b in 0..db {
                keep_a[(i, j)] += m[(i * db + b, j * db + b)];
            }
        }
    }
    for i in 0..db {
        for j in 0..db {
            for a in 0..da {
                keep_b[(i, j)] += m[(a * db + i, a * db + j)];
            }
        }
    }
    let worst = max_diff(partial_trace(&rho, Subsystem::A).entries(), &keep_a)
        .max(max_diff(partial_trace(&rho, Subsystem::B).entries(), &keep_b));
    Ok(within("partial_trace_oracle", worst, tol.index_oracle))
}

fn check_partial_transpose(tol: &Tolerances) -> Result<CheckResult> {
    let split = Split::new(2, 3)?;
    let m = gue_observable(6, seed(2))?.into_entries();
    let (da, db) = (2, 3);
    let mut on_b = CMatrix::zeros(6, 6);
    let mut on_a = CMatrix::zeros(6, 6);
    for i in 0..da {
        for j in 0..da {
            for k in 0..db {
                for l in 0..db {
                    on_b[(i * db + k, j * db + l)] = m[(i * db + l, j * db + k)];
                    on_a[(i * db + k, j * db + l)] = m[(j * db + k, i * db + l)];
                }
            }
        }
    }
    let worst = max_diff(&partial_transpose_matrix(&m, Subsystem::B, split)?, &on_b)
        .max(max_diff(&partial_transpose_matrix(&m, Subsystem::A, split)?, &on_a));
    Ok(within("partial_transpose_oracle", worst, tol.index_oracle))
}

fn check_realignment(tol: &Tolerances) -> Result<CheckResult> {
    let (da, db) = (2, 3);
    let split = Split::new(da, db)?;
    let m = gue_observable(6, seed(3))?.into_entries();
    let mut r = CMatrix::zeros(da * da, db * db);
    for i in 0..da {
        for j in 0..da {
            for k in 0..db {
                for l in 0..db {
                    r[(i * da + j, k * db + l)] = m[(i * db + k, j * db + l)];
                }
            }
        }
    }
    let worst = max_diff(&realign_matrix(&m, split)?, &r);
    Ok(within("realignment_oracle", worst, tol.index_oracle))
}

fn check_m4_equivalence(tol: &Tolerances) -> Result<CheckResult> {
    let split = Split::new(2, 2)?;
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let rho = induced_state(2, 2, 1 + (i % 6) as usize, seed(100 + i))?;
        let perm = multicopy_swap_expectation(&rho, &CopyPermutation::m4())?;
        let (_, m4) = realignment_moments(&rho.as_observable(), split)?;
        worst = worst.max((perm - m4).abs());
    }
    Ok(within("m4_permutation_vs_realign", worst, tol.m4_equivalence))
}

fn check_qfi(tol: &Tolerances) -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let rho = induced_state(2, 2, 1 + (i % 5) as usize, seed(200 + i))?;
        let a = gue_observable(4, seed(300 + i))?;
        let eig = nalgebra::SymmetricEigen::new(rho.entries().clone());
        let mut oracle = 0.0;
        for k in 0..4 {
            for l in 0..4 {
                let (lk, ll) = (eig.eigenvalues[k], eig.eigenvalues[l]);
                if lk + ll <= 1e-12 {
                    continue;
                }
                let vk = eig.eigenvectors.column(k);
                let vl = eig.eigenvectors.column(l);
                let elem: C64 = (vk.adjoint() * a.entries() * vl)[(0, 0)];
                oracle += (lk - ll).powi(2) / (2.0 * (lk + ll)) * elem.norm_sqr();
            }
        }
        worst = worst.max((qfi(&rho, &a)? - oracle).abs());
    }
    Ok(within("qfi_double_loop", worst, tol.qfi_oracle))
}

fn check_e4_lower_bound(tol: &Tolerances) -> Result<CheckResult> {
    let split = Split::new(2, 2)?;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..1000 {
        let x = gue_observable(4, seed(1000 + i))?;
        let (m2, m4) = realignment_moments(&x, split)?;
        let trace_norm: f64 = realign_matrix(x.entries(), split)?
            .singular_values()
            .iter()
            .sum();
        worst = worst.max(e4(m2, m4)? - trace_norm);
    }
    Ok(CheckResult {
        name: "e4_below_trace_norm",
        passed: worst <= tol.m4_equivalence,
        detail: format!("max E4 - trace norm {worst:.3e}"),
    })
}

fn check_ppt_witnesses(tol: &Tolerances) -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    let mut all_pass = true;
    for side in [2usize, 3, 4] {
        let split = Split::square(side)?;
        for i in 0..1000 {
            let phi = random_pure_state(split.dim(), seed(10_000 * side as u64 + i))?;
            let w = ppt_witness(&phi, split)?;
            let check = validate_witness_alpha(&w);
            worst = worst.max((check.alpha - 1.0).abs());
            all_pass &= check.inner_ball_value >= -tol.inner_ball;
        }
    }
    Ok(CheckResult {
        name: "ppt_witness_alpha",
        passed: worst <= tol.witness_alpha && all_pass,
        detail: format!("max |alpha - 1| {worst:.3e}, inner ball {}", if all_pass { "ok" } else { "violated" }),
    })
}

fn check_faithful_witnesses(tol: &Tolerances) -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    let mut all_pass = true;
    for side in [2usize, 3, 4] {
        let split = Split::square(side)?;
        let target = faithful_alpha(split.dim());
        for i in 0..100 {
            let psi = random_max_entangled(side, side, seed(50_000 * side as u64 + i))?;
            let check = validate_witness_alpha(&faithful_witness(&psi, split)?);
            worst = worst.max((check.alpha - target).abs());
            all_pass &= check.inner_ball_value >= -tol.inner_ball;
        }
    }
    Ok(CheckResult {
        name: "faithful_witness_alpha",
        passed: worst <= tol.witness_alpha && all_pass,
        detail: format!("max |alpha - closed form| {worst:.3e}, inner ball {}", if all_pass { "ok" } else { "violated" }),
    })
}

fn check_bound_examples(tol: &Tolerances) -> Result<CheckResult> {
    let bell = Spectrum::new(vec![0.5, 0.5, 0.5, -0.5])?;
    let cases = [
        (ew_bound(1.0, 10)?.value, 0.359_665_238_941_720_8),
        (ew_bound(3f64.sqrt(), 10)?.value, 0.028_169_149_492_548_89),
        (spectrum_bound(&bell, 10)?.value, 0.235_926_032_679_469_95),
        (param_ew_bound(2, 1.0, 4, 1.0, 1000, 0.5)?.value, 1.185_697_673_875_309_3e-19),
        (positive_map_bound(4, 2f64.sqrt(), 1.0, 1000)?.value, 6.518_441_897_264_29e-8),
        (adaptive_bound(10, 100).value, 7.244_604_071_394_906e-5),
    ];
    let worst = cases
        .iter()
        .fold(0.0f64, |m, (got, want)| m.max(((got - want) / want).abs()));
    let identity = (MIN_RATE - (2f64.sqrt() - 1.0).powi(2)).abs();
    Ok(CheckResult {
        name: "bound_reference_values",
        passed: worst <= tol.bound_relative && identity <= 4.0 * f64::EPSILON,
        detail: format!("max relative error {worst:.3e}, rate identity defect {identity:.1e}"),
    })
}

/// Random spectra with positive trace, `α ≥ 1` and at least one negative
/// eigenvalue, by rejection.
pub fn random_witness_spectra(count: usize, seed_value: u64) -> Vec<Spectrum> {
    use rand::Rng;
    let mut rng = SeedSpec::new(seed_value, 0).rng();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let d = rng.random_range(2..=16);
        let shift: f64 = rng.random_range(0.0..1.0);
        let values: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0) + shift).collect();
        let tr: f64 = values.iter().sum();
        let norm = values.iter().map(|x| x * x).sum::<f64>().sqrt();
        if tr > 0.0 && tr >= norm && values.iter().any(|&x| x < 0.0) {
            out.push(Spectrum::new(values).expect("finite values"));
        }
    }
    out
}

fn check_bound_dominance(_tol: &Tolerances) -> Result<CheckResult> {
    let mut violations = 0;
    for spec in random_witness_spectra(1000, SEED) {
        let alpha = spec.alpha();
        for k in [1usize, 10, 100] {
            let s = spectrum_bound(&spec, k)?;
            let e = ew_bound(alpha, k)?;
            if s.exponent_rate < e.exponent_rate - 1e-12 || s.value > e.value * (1.0 + 1e-12) {
                violations += 1;
            }
        }
    }
    Ok(CheckResult {
        name: "spectrum_below_ew_bound",
        passed: violations == 0,
        detail: format!("{violations} violations over 1000 spectra"),
    })
}

fn check_determinism(_tol: &Tolerances) -> Result<CheckResult> {
    let spec = CriterionSpec::simple(CriterionKind::EwPpt, Split::new(2, 2)?)?;
    let cfg = EstimateConfig::new(spec, 3, 10_000, SEED)?;
    let one = estimate_with_workers(&cfg, 1)?.n_detected;
    let eight = estimate_with_workers(&cfg, 8)?.n_detected;
    Ok(CheckResult {
        name: "worker_determinism",
        passed: one == eight,
        detail: format!("n_detected {one} (1 worker) vs {eight} (8 workers)"),
    })
}

fn check_two_copy_purity(tol: &Tolerances) -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let (da, db) = if i % 2 == 0 { (2, 2) } else { (2, 3) };
        let rho: DensityMatrix = induced_state(da, db, 1 + (i % 4) as usize, seed(400 + i))?;
        let stat = rho.purity() - partial_trace(&rho, Subsystem::A).purity();
        let two_copy = multicopy_swap_expectation(&rho, &CopyPermutation::swap_ab())?
            - multicopy_swap_expectation(&rho, &CopyPermutation::swap_a())?;
        worst = worst.max((stat - two_copy).abs());
    }
    Ok(within("purity_two_copy_identity", worst, tol.two_copy))
}

type Check = fn(&Tolerances) -> Result<CheckResult>;

const CHECKS: [(&str, Check); 13] = [
    ("partial_trace_oracle", check_partial_trace),
    ("partial_transpose_oracle", check_partial_transpose),
    ("realignment_oracle", check_realignment),
    ("m4_permutation_vs_realign", check_m4_equivalence),
    ("qfi_double_loop", check_qfi),
    ("e4_below_trace_norm", check_e4_lower_bound),
    ("ppt_witness_alpha", check_ppt_witnesses),
    ("faithful_witness_alpha", check_faithful_witnesses),
    ("bound_reference_values", check_bound_examples),
    ("spectrum_below_ew_bound", check_bound_dominance),
    ("worker_determinism", check_determinism),
    ("purity_two_copy_identity", check_two_copy_purity),
    ("identity_never_detects", check_identity_witness),
];

fn check_identity_witness(_tol: &Tolerances) -> Result<CheckResult> {
    let split = Split::new(2, 2)?;
    let w = HermitianObservable::identity(4).scaled(0.5);
    let spec = CriterionSpec::with_witness(crate::criteria::Witness::custom(w), split)?;
    let cfg = EstimateConfig::new(spec, 2, 1000, SEED)?;
    let n = estimate_with_workers(&cfg, 1)?.n_detected;
    Ok(CheckResult {
        name: "identity_never_detects",
        passed: n == 0,
        detail: format!("{n} detections of 1000"),
    })
}

pub fn run(tol: &Tolerances) -> SelftestReport {
    let checks = CHECKS
        .iter()
        .map(|(name, check)| {
            check(tol).unwrap_or_else(|e| CheckResult {
                name,
                passed: false,
                detail: format!("error: {e}"),
            })
        })
        .collect();
    SelftestReport { checks }
}
