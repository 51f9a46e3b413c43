//! Dense complex linear algebra and quantum-information primitives.

mod multicopy;
mod ops;

pub use multicopy::{multicopy_swap_expectation, CopyPermutation};
pub use ops::{
    expectation, hermitian_eigh, hermitian_eigs, kron, partial_trace, partial_transpose,
    partial_transpose_matrix, realign, realign_matrix,
};
pub(crate) use ops::trace_of_product;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::tolerance::TOLERANCES;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Which factor of a bipartite space an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
}

/// Dimensions of the two factors of `H_A ⊗ H_B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Split {
    pub dim_a: usize,
    pub dim_b: usize,
}

impl Split {
    pub fn new(dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::invalid("subsystem dimensions must be positive"));
        }
        Ok(Split { dim_a, dim_b })
    }

    /// `d × d` split of a `d²`-dimensional space.
    pub fn square(side: usize) -> Result<Self> {
        Self::new(side, side)
    }

    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn is_square(&self) -> bool {
        self.dim_a == self.dim_b
    }

    pub(crate) fn check(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: dim,
            });
        }
        Ok(())
    }
}

pub(crate) fn hermitian_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for r in 0..n {
        for c in r..n {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// A Hermitian operator on a finite-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianObservable {
    entries: CMatrix,
}

impl HermitianObservable {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::invalid("observable must be a non-empty square matrix"));
        }
        let defect = hermitian_defect(&entries);
        if defect > TOLERANCES.hermitian {
            return Err(Error::invalid(format!(
                "matrix is not Hermitian (defect {defect:.3e})"
            )));
        }
        Ok(HermitianObservable { entries })
    }

    pub(crate) fn from_hermitian_unchecked(entries: CMatrix) -> Self {
        HermitianObservable { entries }
    }

    pub fn identity(dim: usize) -> Self {
        HermitianObservable {
            entries: CMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianObservable {
            entries: CMatrix::zeros(dim, dim),
        }
    }

    /// Diagonal observable with the given real entries.
    pub fn diagonal(values: &[f64]) -> Self {
        let v = CVector::from_iterator(values.len(), values.iter().map(|&x| C64::new(x, 0.0)));
        HermitianObservable {
            entries: CMatrix::from_diagonal(&v),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn trace(&self) -> f64 {
        trace(&self.entries).re
    }

    /// tr(O²), the squared Frobenius norm.
    pub fn trace_sq(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// tr(O) / sqrt(tr(O²)).
    pub fn alpha(&self) -> f64 {
        self.trace() / self.trace_sq().sqrt()
    }

    pub fn scaled(&self, c: f64) -> Self {
        HermitianObservable {
            entries: self.entries.map(|z| z * c),
        }
    }

    /// `self ⊗ other`.
    pub fn kron(&self, other: &HermitianObservable) -> Self {
        HermitianObservable {
            entries: kron(&self.entries, &other.entries),
        }
    }

    /// Unitary conjugation `U O U†`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        let m = u * &self.entries * u.adjoint();
        HermitianObservable {
            entries: hermitize(m),
        }
    }
}

/// `(M + M†)/2`, exact Hermitian projection of a nearly Hermitian matrix.
pub(crate) fn hermitize(m: CMatrix) -> CMatrix {
    let adj = m.adjoint();
    (m + adj).map(|z| z * 0.5)
}

/// A bipartite density matrix: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    split: Split,
    entries: CMatrix,
}

impl DensityMatrix {
    /// Validates all density-matrix invariants (including positivity, which
    /// costs an eigendecomposition).
    pub fn new(split: Split, entries: CMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::invalid("density matrix must be square"));
        }
        split.check(entries.nrows())?;
        let defect = hermitian_defect(&entries);
        if defect > TOLERANCES.hermitian {
            return Err(Error::invalid(format!(
                "density matrix is not Hermitian (defect {defect:.3e})"
            )));
        }
        let tr = trace(&entries);
        if (tr - C64::new(1.0, 0.0)).norm() > TOLERANCES.unit_trace {
            return Err(Error::invalid(format!("trace {tr} is not 1")));
        }
        let obs = HermitianObservable::from_hermitian_unchecked(entries);
        let spec = hermitian_eigs(&obs)?;
        if spec.min() < -TOLERANCES.psd {
            return Err(Error::invalid(format!(
                "density matrix has negative eigenvalue {:.3e}",
                spec.min()
            )));
        }
        Ok(DensityMatrix {
            split,
            entries: obs.into_entries(),
        })
    }

    /// Caller guarantees the invariants hold by construction.
    pub(crate) fn from_parts_unchecked(split: Split, entries: CMatrix) -> Self {
        debug_assert_eq!(split.dim(), entries.nrows());
        DensityMatrix { split, entries }
    }

    pub fn maximally_mixed(split: Split) -> Self {
        let d = split.dim();
        let entries = CMatrix::identity(d, d).map(|z| z / d as f64);
        DensityMatrix { split, entries }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn pure(split: Split, psi: &PureStateVector) -> Result<Self> {
        split.check(psi.dim())?;
        Ok(DensityMatrix {
            split,
            entries: psi.projector().into_entries(),
        })
    }

    /// `ρ_A ⊗ ρ_B`.
    pub fn product(rho_a: &DensityMatrix, rho_b: &DensityMatrix) -> Self {
        let split = Split {
            dim_a: rho_a.dim(),
            dim_b: rho_b.dim(),
        };
        DensityMatrix {
            split,
            entries: kron(&rho_a.entries, &rho_b.entries),
        }
    }

    pub fn split(&self) -> Split {
        self.split
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    /// tr(ρ²).
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn as_observable(&self) -> HermitianObservable {
        HermitianObservable::from_hermitian_unchecked(self.entries.clone())
    }

    /// Reinterpret the same matrix under a different bipartition.
    pub fn with_split(&self, split: Split) -> Result<Self> {
        split.check(self.dim())?;
        Ok(DensityMatrix {
            split,
            entries: self.entries.clone(),
        })
    }
}

/// A normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureStateVector {
    amplitudes: CVector,
}

impl PureStateVector {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::invalid("state vector must be non-empty"));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > TOLERANCES.unit_norm {
            return Err(Error::invalid(format!("state norm {norm} is not 1")));
        }
        Ok(PureStateVector { amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if amplitudes.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::invalid("cannot normalize a zero or non-finite vector"));
        }
        Ok(PureStateVector {
            amplitudes: amplitudes.map(|z| z / norm),
        })
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::invalid("basis index out of range"));
        }
        let mut v = CVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Ok(PureStateVector { amplitudes: v })
    }

    /// `Σ_i |ii⟩ / sqrt(d)` on a `d × d` split.
    pub fn max_entangled_canonical(side: usize) -> Result<Self> {
        if side == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        let d = side * side;
        let amp = 1.0 / (side as f64).sqrt();
        let mut v = CVector::zeros(d);
        for i in 0..side {
            v[i * side + i] = C64::new(amp, 0.0);
        }
        Ok(PureStateVector { amplitudes: v })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> HermitianObservable {
        let v = &self.amplitudes;
        let n = v.len();
        let m = CMatrix::from_fn(n, n, |r, c| v[r] * v[c].conj());
        HermitianObservable::from_hermitian_unchecked(m)
    }

    /// Amplitudes arranged as a `dim_a × dim_b` coefficient matrix, whose
    /// singular values are the Schmidt coefficients.
    pub fn coefficient_matrix(&self, split: Split) -> Result<CMatrix> {
        split.check(self.dim())?;
        Ok(CMatrix::from_fn(split.dim_a, split.dim_b, |i, j| {
            self.amplitudes[i * split.dim_b + j]
        }))
    }
}

/// Real eigenvalues sorted in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn new(mut eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() || eigenvalues.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("spectrum must be non-empty and finite"));
        }
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        Ok(Spectrum { eigenvalues })
    }

    pub fn values(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn min(&self) -> f64 {
        *self.eigenvalues.last().expect("spectrum is non-empty")
    }

    pub fn trace(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    pub fn power_sum(&self, p: i32) -> f64 {
        self.eigenvalues.iter().map(|x| x.powi(p)).sum()
    }

    /// tr(O) / sqrt(tr(O²)).
    pub fn alpha(&self) -> f64 {
        self.trace() / self.power_sum(2).sqrt()
    }
}
