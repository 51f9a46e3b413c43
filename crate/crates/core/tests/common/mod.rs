//! Independent oracles shared by the integration tests. Nothing here calls
//! the library's own subsystem operations.
#![allow(dead_code)]

use entcap::quantum::{CMatrix, C64};

/// `tr_B` or `tr_A` by explicit index sums.
pub fn partial_trace_oracle(m: &CMatrix, da: usize, db: usize, keep_a: bool) -> CMatrix {
    if keep_a {
        CMatrix::from_fn(da, da, |i, j| (0..db).map(|b| m[(i * db + b, j * db + b)]).sum())
    } else {
        CMatrix::from_fn(db, db, |i, j| (0..da).map(|a| m[(a * db + i, a * db + j)]).sum())
    }
}

/// `M_{(i k),(j l)} → M_{(i l),(j k)}` (transpose on B), or on A.
pub fn partial_transpose_oracle(m: &CMatrix, da: usize, db: usize, on_b: bool) -> CMatrix {
    let mut out = CMatrix::zeros(da * db, da * db);
    for i in 0..da {
        for j in 0..da {
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k, j * db + l)] = if on_b {
                        m[(i * db + l, j * db + k)]
                    } else {
                        m[(j * db + k, i * db + l)]
                    };
                }
            }
        }
    }
    out
}

/// `R_{(i j),(k l)} = M_{(i k),(j l)}`.
pub fn realign_oracle(m: &CMatrix, da: usize, db: usize) -> CMatrix {
    let mut out = CMatrix::zeros(da * da, db * db);
    for i in 0..da {
        for j in 0..da {
            for k in 0..db {
                for l in 0..db {
                    out[(i * da + j, k * db + l)] = m[(i * db + k, j * db + l)];
                }
            }
        }
    }
    out
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    CMatrix::from_fn(ra * rb, ca * cb, |r, c| a[(r / rb, c / cb)] * b[(r % rb, c % cb)])
}

/// `tr(P ρ^{⊗n})` with `P = Σ_v |v⟩⟨π(v)|`, `π(v)_c = (a_{σA(c)}, b_{σB(c)})`,
/// from dense matrices.
pub fn dense_permutation_trace(rho: &CMatrix, da: usize, db: usize, sa: &[usize], sb: &[usize]) -> C64 {
    let n = sa.len();
    let d = da * db;
    let mut big = rho.clone();
    for _ in 1..n {
        big = kron(&big, rho);
    }
    let total = d.pow(n as u32);
    let digits = |mut v: usize| {
        let mut out = vec![0usize; n];
        for c in (0..n).rev() {
            out[c] = v % d;
            v /= d;
        }
        out
    };
    let mut p = CMatrix::zeros(total, total);
    for v in 0..total {
        let x = digits(v);
        let mut image = 0;
        for c in 0..n {
            let a = x[sa[c]] / db;
            let b = x[sb[c]] % db;
            image = image * d + a * db + b;
        }
        p[(v, image)] = C64::new(1.0, 0.0);
    }
    (p * big).trace()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Two-sided one-sample Kolmogorov–Smirnov p-value (asymptotic with the
/// Stephens correction).
pub fn ks_pvalue(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(|a, b| a.total_cmp(b));
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i as f64 + 1.0) / n - f);
    }
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    let mut p = 0.0;
    for j in 1..=100 {
        let j = j as f64;
        let sign = if j as i64 % 2 == 1 { 1.0 } else { -1.0 };
        p += 2.0 * sign * (-2.0 * j * j * lambda * lambda).exp();
    }
    p.clamp(0.0, 1.0)
}

/// Mean and standard error of the mean.
pub fn mean_and_sem(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn binomial_sigma(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Two-sample Kolmogorov–Smirnov p-value (asymptotic).
pub fn ks_two_sample_pvalue(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(|x, y| x.total_cmp(y));
    b.sort_by(|x, y| x.total_cmp(y));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = na * nb / (na + nb);
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    let mut p = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        p += 2.0 * sign * (-2.0 * kf * kf * lambda * lambda).exp();
    }
    p.clamp(0.0, 1.0)
}
