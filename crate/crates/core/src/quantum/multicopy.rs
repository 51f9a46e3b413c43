//! Expectations of copy-permutation operators on `ρ^{⊗n}`.
//!
//! For permutations `σ_A`, `σ_B` of `n` copies, the operator
//! `P = P_A(σ_A) ⊗ P_B(σ_B)` acts as `P |x_1 … x_n⟩ = |x_{σ⁻¹(1)} … x_{σ⁻¹(n)}⟩`
//! on each factor, which gives
//!
//! ```text
//! tr(P ρ^{⊗n}) = Σ_{a,b} Π_c ρ[(a_{σA(c)}, b_{σB(c)}), (a_c, b_c)]
//! ```
//!
//! When both permutations coincide, or one is the identity, the trace
//! factorizes over cycles into `tr(ρ^ℓ)`, `tr(ρ_A^ℓ)` or `tr(ρ_B^ℓ)`. Other
//! pairings are contracted index by index with O(n) working memory; the
//! n-fold tensor power is never formed.

use super::{partial_trace, CMatrix, DensityMatrix, Split, Subsystem, C64};
use crate::error::{Error, Result};
use crate::tolerance::TOLERANCES;

pub const MAX_COPIES: usize = 4;

/// Images of the copy permutation on each subsystem (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopyPermutation {
    a: Vec<usize>,
    b: Vec<usize>,
}

impl CopyPermutation {
    pub fn new(a: Vec<usize>, b: Vec<usize>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::invalid("A and B permutations act on different copy counts"));
        }
        if a.is_empty() || a.len() > MAX_COPIES {
            return Err(Error::invalid(format!(
                "copy count must be in 1..={MAX_COPIES}, got {}",
                a.len()
            )));
        }
        for p in [&a, &b] {
            let mut seen = vec![false; p.len()];
            for &x in p.iter() {
                if x >= p.len() || seen[x] {
                    return Err(Error::invalid(format!("{p:?} is not a permutation")));
                }
                seen[x] = true;
            }
        }
        Ok(CopyPermutation { a, b })
    }

    /// Two copies, swap of both subsystems: `tr(ρ²)`.
    pub fn swap_ab() -> Self {
        CopyPermutation { a: vec![1, 0], b: vec![1, 0] }
    }

    /// Two copies, swap of A only: `tr(ρ_A²)`.
    pub fn swap_a() -> Self {
        CopyPermutation { a: vec![1, 0], b: vec![0, 1] }
    }

    /// Two copies, swap of B only: `tr(ρ_B²)`.
    pub fn swap_b() -> Self {
        CopyPermutation { a: vec![0, 1], b: vec![1, 0] }
    }

    /// Four copies, `S_A(1,2) S_A(3,4) S_B(2,3) S_B(4,1)`: the fourth moment
    /// of the realigned matrix.
    pub fn m4() -> Self {
        CopyPermutation {
            a: vec![1, 0, 3, 2],
            b: vec![3, 2, 1, 0],
        }
    }

    pub fn copies(&self) -> usize {
        self.a.len()
    }

    pub fn on_a(&self) -> &[usize] {
        &self.a
    }

    pub fn on_b(&self) -> &[usize] {
        &self.b
    }
}

fn is_identity(p: &[usize]) -> bool {
    p.iter().enumerate().all(|(i, &x)| i == x)
}

fn cycle_lengths(p: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; p.len()];
    let mut lengths = Vec::new();
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = p[i];
            len += 1;
        }
        lengths.push(len);
    }
    lengths
}

/// Π over cycles of `tr(m^ℓ)`.
fn cycle_trace_product(m: &CMatrix, perm: &[usize]) -> C64 {
    let max_len = cycle_lengths(perm).into_iter().max().unwrap_or(1);
    let mut powers = vec![m.clone()];
    for _ in 1..max_len {
        let next = powers.last().unwrap() * m;
        powers.push(next);
    }
    cycle_lengths(perm)
        .into_iter()
        .map(|len| powers[len - 1].trace())
        .product()
}

fn contract_indices(rho: &CMatrix, split: Split, perm: &CopyPermutation) -> C64 {
    let n = perm.copies();
    let Split { dim_a, dim_b } = split;
    let mut a = vec![0usize; n];
    let mut b = vec![0usize; n];
    let mut total = C64::new(0.0, 0.0);
    loop {
        let mut term = C64::new(1.0, 0.0);
        for c in 0..n {
            let row = a[perm.a[c]] * dim_b + b[perm.b[c]];
            let col = a[c] * dim_b + b[c];
            term *= rho[(row, col)];
            if term == C64::new(0.0, 0.0) {
                break;
            }
        }
        total += term;
        // odometer over (a_1..a_n, b_1..b_n)
        let mut pos = 0;
        loop {
            if pos == 2 * n {
                return total;
            }
            let (digit, base) = if pos < n {
                (&mut a[pos], dim_a)
            } else {
                (&mut b[pos - n], dim_b)
            };
            *digit += 1;
            if *digit < base {
                break;
            }
            *digit = 0;
            pos += 1;
        }
    }
}

/// `tr[(P_A(σ_A) ⊗ P_B(σ_B)) ρ^{⊗n}]`.
pub fn multicopy_swap_expectation(rho: &DensityMatrix, pairing: &CopyPermutation) -> Result<f64> {
    let value = if pairing.a == pairing.b {
        cycle_trace_product(rho.entries(), &pairing.a)
    } else if is_identity(&pairing.b) {
        cycle_trace_product(partial_trace(rho, Subsystem::A).entries(), &pairing.a)
    } else if is_identity(&pairing.a) {
        cycle_trace_product(partial_trace(rho, Subsystem::B).entries(), &pairing.b)
    } else {
        contract_indices(rho.entries(), rho.split(), pairing)
    };
    debug_assert!(value.im.abs() <= TOLERANCES.expectation_imag * 10.0);
    Ok(value.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::PureStateVector;

    #[test]
    fn rejects_malformed_permutations() {
        assert!(CopyPermutation::new(vec![0, 0], vec![0, 1]).is_err());
        assert!(CopyPermutation::new(vec![0, 1], vec![0]).is_err());
        assert!(CopyPermutation::new(vec![0, 2], vec![0, 1]).is_err());
        assert!(CopyPermutation::new(vec![], vec![]).is_err());
        assert!(CopyPermutation::new(vec![0, 1, 2, 3, 4], vec![0, 1, 2, 3, 4]).is_err());
        assert!(CopyPermutation::new(vec![2, 0, 1], vec![0, 2, 1]).is_ok());
    }

    #[test]
    fn cycles() {
        assert_eq!(cycle_lengths(&[1, 0, 3, 2]), vec![2, 2]);
        assert_eq!(cycle_lengths(&[1, 2, 0, 3]), vec![3, 1]);
        assert_eq!(cycle_lengths(&[0, 1]), vec![1, 1]);
    }

    #[test]
    fn purity_of_maximally_mixed() {
        let rho = DensityMatrix::maximally_mixed(Split::new(2, 2).unwrap());
        let v = multicopy_swap_expectation(&rho, &CopyPermutation::swap_ab()).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
    }

    #[test]
    fn marginal_purity_of_product_pure_state() {
        let psi = PureStateVector::basis(4, 1).unwrap();
        let rho = DensityMatrix::pure(Split::new(2, 2).unwrap(), &psi).unwrap();
        let v = multicopy_swap_expectation(&rho, &CopyPermutation::swap_a()).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn general_contraction_matches_fast_path() {
        let phi = PureStateVector::max_entangled_canonical(2).unwrap();
        let rho = DensityMatrix::pure(Split::new(2, 2).unwrap(), &phi).unwrap();
        for perm in [CopyPermutation::swap_ab(), CopyPermutation::swap_a()] {
            let fast = multicopy_swap_expectation(&rho, &perm).unwrap();
            let slow = contract_indices(rho.entries(), rho.split(), &perm).re;
            assert!((fast - slow).abs() < 1e-14);
        }
    }
}
