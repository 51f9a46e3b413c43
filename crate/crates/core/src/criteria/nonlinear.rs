//! Spectral and moment functionals used by the nonlinear criteria.

use crate::error::{Error, Result};
use crate::quantum::{
    hermitian_eigh, partial_transpose_matrix, realign, trace_of_product, CMatrix, DensityMatrix,
    HermitianObservable, Split, Subsystem,
};
use crate::tolerance::TOLERANCES;

/// Quantum Fisher information
/// `F(ρ, A) = Σ_{k,l} (λk − λl)² / (2(λk + λl)) |⟨k|A|l⟩|²`.
///
/// Pairs with `λk + λl` below the degeneracy tolerance are skipped.
pub fn qfi(rho: &DensityMatrix, a: &HermitianObservable) -> Result<f64> {
    if a.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: a.dim(),
        });
    }
    let (values, vectors) = hermitian_eigh(&rho.as_observable())?;
    Ok(qfi_in_eigenbasis(&values, &vectors, a.entries()))
}

pub(crate) fn qfi_in_eigenbasis(values: &[f64], vectors: &CMatrix, a: &CMatrix) -> f64 {
    let rotated = vectors.adjoint() * a * vectors;
    let n = values.len();
    let mut total = 0.0;
    for k in 0..n {
        for l in 0..n {
            let sum = values[k] + values[l];
            if sum < TOLERANCES.qfi_degenerate {
                continue;
            }
            let diff = values[k] - values[l];
            total += diff * diff / (2.0 * sum) * rotated[(k, l)].norm_sqr();
        }
    }
    total
}

/// `Δ(A)² = ⟨A²⟩ − ⟨A⟩²`.
pub fn variance(rho: &DensityMatrix, a: &HermitianObservable) -> Result<f64> {
    if a.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: a.dim(),
        });
    }
    let ra = rho.entries() * a.entries();
    let mean = ra.trace().re;
    let second = (&ra * a.entries()).trace().re;
    Ok(second - mean * mean)
}

/// `(tr(R R†), tr((R R†)²))` for `R` the realignment of `x`.
pub fn realignment_moments(x: &HermitianObservable, split: Split) -> Result<(f64, f64)> {
    let r = realign(x, split)?;
    let gram = if r.nrows() <= r.ncols() {
        &r * r.adjoint()
    } else {
        r.adjoint() * &r
    };
    let m2 = gram.trace().re.max(0.0);
    let m4 = gram.iter().map(|z| z.norm_sqr()).sum::<f64>();
    Ok((m2, m4))
}

/// Trace-norm lower estimate from second and fourth singular-value moments:
/// `E₄ = sqrt(q(q M₂ + U)/(q+1)) + sqrt((M₂ − U)/(q+1))` with
/// `q = ⌊M₂²/M₄⌋` and `U = sqrt(q(q+1) M₄ − q M₂²)`.
pub fn e4(m2: f64, m4: f64) -> Result<f64> {
    if !(m2 >= 0.0) || !(m4 >= 0.0) {
        return Err(Error::InvalidMoments {
            m2,
            m4,
            reason: "moments must be nonnegative",
        });
    }
    if m2 == 0.0 {
        return Ok(0.0);
    }
    if m4 == 0.0 {
        return Err(Error::InvalidMoments {
            m2,
            m4,
            reason: "m4 = 0 with m2 > 0",
        });
    }
    let sq = m2 * m2;
    if m4 > sq * (1.0 + TOLERANCES.moments) + TOLERANCES.moments {
        return Err(Error::InvalidMoments {
            m2,
            m4,
            reason: "m4 exceeds m2 squared",
        });
    }
    let q = (sq / m4).floor().max(1.0);
    let u = (q * (q + 1.0) * m4 - q * sq).max(0.0).sqrt();
    let head = (q * (q * m2 + u) / (q + 1.0)).sqrt();
    // (M₂ − U)/(q+1) = (M₂² − q M₄)/(M₂ + U); the right side avoids the
    // cancellation, and residues at rounding level mean a flat spectrum.
    let residue = m2.mul_add(m2, -q * m4);
    let tail = if residue <= 64.0 * f64::EPSILON * sq {
        0.0
    } else {
        (residue / (m2 + u)).sqrt()
    };
    Ok(head + tail)
}

/// `tr((ρ^{T_B})³)`.
pub fn pt_moment3(rho: &DensityMatrix) -> f64 {
    let pt = partial_transpose_matrix(rho.entries(), Subsystem::B, rho.split())
        .expect("density matrix split matches its dimension");
    let sq = &pt * &pt;
    trace_of_product(&sq, &pt).re
}

/// Terms of the optimal third-moment bound for a state of purity `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct D3Terms {
    pub beta: f64,
    pub x: f64,
    pub radicand: f64,
    /// `β x³ + (1 − β x)³`
    pub bound: f64,
}

/// `β = ⌊1/p⌋` (at least 1, since rounding can push `p` a hair above 1 for
/// pure states), `x = (β + sqrt(β((β+1)p − 1)))/(β(β+1))`.
pub fn d3opt_terms(purity: f64) -> D3Terms {
    let beta = (1.0 / purity).floor().max(1.0);
    let radicand = beta * ((beta + 1.0) * purity - 1.0);
    let x = (beta + radicand.max(0.0).sqrt()) / (beta * (beta + 1.0));
    let bound = beta * x.powi(3) + (1.0 - beta * x).powi(3);
    D3Terms {
        beta,
        x,
        radicand,
        bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{PureStateVector, C64};

    fn pauli_x() -> HermitianObservable {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        HermitianObservable::new(CMatrix::from_row_slice(2, 2, &[zero, one, one, zero])).unwrap()
    }

    #[test]
    fn qfi_maximally_mixed_is_zero() {
        let rho = DensityMatrix::maximally_mixed(Split::new(2, 1).unwrap());
        assert!(qfi(&rho, &pauli_x()).unwrap().abs() < 1e-15);
    }

    #[test]
    fn qfi_pure_qubit_equals_variance() {
        let psi = PureStateVector::basis(2, 0).unwrap();
        let rho = DensityMatrix::pure(Split::new(2, 1).unwrap(), &psi).unwrap();
        let f = qfi(&rho, &pauli_x()).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
        assert!((variance(&rho, &pauli_x()).unwrap() - 1.0).abs() < 1e-15);
        assert!(qfi(&rho, &HermitianObservable::identity(3)).is_err());
    }

    #[test]
    fn e4_examples() {
        assert!((e4(1.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((e4(2.0, 2.0).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(e4(0.0, 0.0).unwrap(), 0.0);
        assert!(e4(1.0, 0.0).is_err());
        assert!(e4(1.0, 1.5).is_err());
        assert!(e4(-1.0, 1.0).is_err());
    }

    #[test]
    fn moments_of_zero_and_flat() {
        let split = Split::new(2, 2).unwrap();
        assert_eq!(realignment_moments(&HermitianObservable::zeros(4), split).unwrap(), (0.0, 0.0));
        // |00⟩⟨00| + |11⟩⟨11| realigns to singular values (1, 1)
        let x = HermitianObservable::diagonal(&[1.0, 0.0, 0.0, 0.0])
            .entries()
            .clone()
            + HermitianObservable::diagonal(&[0.0, 0.0, 0.0, 1.0]).entries();
        let (m2, m4) = realignment_moments(&HermitianObservable::new(x).unwrap(), split).unwrap();
        assert!((m2 - 2.0).abs() < 1e-15 && (m4 - 2.0).abs() < 1e-15);
    }

    #[test]
    fn pt_moment3_examples() {
        let split = Split::new(2, 2).unwrap();
        let mixed = DensityMatrix::maximally_mixed(split);
        assert!((pt_moment3(&mixed) - 1.0 / 16.0).abs() < 1e-15);
        let bell = DensityMatrix::pure(split, &PureStateVector::max_entangled_canonical(2).unwrap()).unwrap();
        assert!((pt_moment3(&bell) - 0.25).abs() < 1e-15);
        let product = DensityMatrix::pure(split, &PureStateVector::basis(4, 2).unwrap()).unwrap();
        assert!((pt_moment3(&product) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn d3opt_pure_state_terms() {
        let t = d3opt_terms(1.0);
        assert_eq!(t.beta, 1.0);
        assert!((t.x - 1.0).abs() < 1e-15);
        assert!((t.bound - 1.0).abs() < 1e-15);
        // purity a hair above one still yields beta = 1
        let t = d3opt_terms(1.0 + 1e-15);
        assert_eq!(t.beta, 1.0);
    }

    #[test]
    fn d3opt_maximally_mixed_terms() {
        // p = 1/4: beta = 4, x = 1/4, bound = 4/64 = 1/16 = tr((I/4)^3)
        let t = d3opt_terms(0.25);
        assert_eq!(t.beta, 4.0);
        assert!((t.x - 0.25).abs() < 1e-15);
        assert!((t.bound - 1.0 / 16.0).abs() < 1e-15);
    }
}
