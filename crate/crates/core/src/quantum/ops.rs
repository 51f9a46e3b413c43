use nalgebra::SymmetricEigen;

use super::{
    hermitian_defect, CMatrix, DensityMatrix, HermitianObservable, Spectrum, Split,
    Subsystem, C64,
};
use crate::error::{Error, Result};
use crate::tolerance::TOLERANCES;

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Eigenvalues (descending) and matching unit eigenvectors as columns.
pub fn hermitian_eigh(m: &HermitianObservable) -> Result<(Vec<f64>, CMatrix)> {
    let defect = hermitian_defect(m.entries());
    if defect > TOLERANCES.hermitian {
        return Err(Error::invalid(format!(
            "matrix is not Hermitian (defect {defect:.3e})"
        )));
    }
    let eig = SymmetricEigen::new(m.entries().clone());
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

pub fn hermitian_eigs(m: &HermitianObservable) -> Result<Spectrum> {
    let defect = hermitian_defect(m.entries());
    if defect > TOLERANCES.hermitian {
        return Err(Error::invalid(format!(
            "matrix is not Hermitian (defect {defect:.3e})"
        )));
    }
    Spectrum::new(m.entries().clone().symmetric_eigenvalues().iter().copied().collect())
}

/// Reduced state on the kept subsystem.
///
/// Keeping A: `out[i, j] = Σ_k ρ[(i,k), (j,k)]`.
/// Keeping B: `out[k, l] = Σ_i ρ[(i,k), (i,l)]`.
pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> DensityMatrix {
    let Split { dim_a, dim_b } = rho.split();
    let m = rho.entries();
    let (out, side) = match keep {
        Subsystem::A => (
            CMatrix::from_fn(dim_a, dim_a, |i, j| {
                (0..dim_b).map(|k| m[(i * dim_b + k, j * dim_b + k)]).sum()
            }),
            dim_a,
        ),
        Subsystem::B => (
            CMatrix::from_fn(dim_b, dim_b, |k, l| {
                (0..dim_a).map(|i| m[(i * dim_b + k, i * dim_b + l)]).sum()
            }),
            dim_b,
        ),
    };
    DensityMatrix::from_parts_unchecked(Split { dim_a: side, dim_b: 1 }, out)
}

/// Partial transpose on a raw matrix.
///
/// Transposing B: `out[(i,k), (j,l)] = m[(i,l), (j,k)]`.
/// Transposing A: `out[(i,k), (j,l)] = m[(j,k), (i,l)]`.
pub fn partial_transpose_matrix(m: &CMatrix, sub: Subsystem, split: Split) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(Error::invalid("partial transpose needs a square matrix"));
    }
    split.check(m.nrows())?;
    let Split { dim_a, dim_b } = split;
    let idx = |a: usize, b: usize| a * dim_b + b;
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    for i in 0..dim_a {
        for k in 0..dim_b {
            for j in 0..dim_a {
                for l in 0..dim_b {
                    out[(idx(i, k), idx(j, l))] = match sub {
                        Subsystem::B => m[(idx(i, l), idx(j, k))],
                        Subsystem::A => m[(idx(j, k), idx(i, l))],
                    };
                }
            }
        }
    }
    Ok(out)
}

pub fn partial_transpose(
    m: &HermitianObservable,
    sub: Subsystem,
    split: Split,
) -> Result<HermitianObservable> {
    let out = partial_transpose_matrix(m.entries(), sub, split)?;
    Ok(HermitianObservable::from_hermitian_unchecked(out))
}

/// Realignment `R[(i,j), (k,l)] = m[(i,k), (j,l)]`, shape `dim_a² × dim_b²`.
pub fn realign_matrix(m: &CMatrix, split: Split) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(Error::invalid("realignment needs a square matrix"));
    }
    split.check(m.nrows())?;
    let Split { dim_a, dim_b } = split;
    Ok(CMatrix::from_fn(dim_a * dim_a, dim_b * dim_b, |row, col| {
        let (i, j) = (row / dim_a, row % dim_a);
        let (k, l) = (col / dim_b, col % dim_b);
        m[(i * dim_b + k, j * dim_b + l)]
    }))
}

pub fn realign(m: &HermitianObservable, split: Split) -> Result<CMatrix> {
    realign_matrix(m.entries(), split)
}

/// `Re tr(O ρ)`.
pub fn expectation(o: &HermitianObservable, rho: &DensityMatrix) -> Result<f64> {
    if o.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: o.dim(),
        });
    }
    let value = trace_of_product(o.entries(), rho.entries());
    assert!(
        value.im.abs() <= TOLERANCES.expectation_imag,
        "tr(O rho) has imaginary part {:e}",
        value.im
    );
    Ok(value.re)
}

/// `tr(a b)` without forming the product.
pub(crate) fn trace_of_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for r in 0..n {
        for c in 0..n {
            acc += a[(r, c)] * b[(c, r)];
        }
    }
    acc
}
