//! Numerical tolerances shared by every module.

/// The single record of numerical tolerances used across the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max |m[r,c] - conj(m[c,r])| for a matrix to count as Hermitian.
    pub hermitian: f64,
    /// Max |tr(rho) - 1| for a density matrix.
    pub unit_trace: f64,
    /// Smallest admissible eigenvalue of a density matrix is `-psd`.
    pub psd: f64,
    /// Max |‖v‖ - 1| for a pure state.
    pub unit_norm: f64,
    /// Frobenius reconstruction error allowed for eigendecompositions.
    pub eig_reconstruction: f64,
    /// Max imaginary part tolerated in tr(O rho).
    pub expectation_imag: f64,
    /// Agreement of witness alpha factors with their closed forms.
    pub witness_alpha: f64,
    /// Eigenvalue pairs with λk + λl below this are dropped from the QFI sum.
    pub qfi_degenerate: f64,
    /// Relative slack on moment inequalities such as m4 ≤ m2².
    pub moments: f64,
    /// Marginal check for maximally entangled inputs.
    pub max_entangled: f64,
    /// Inner-ball necessary condition tr(W rho0) ≥ -inner_ball.
    pub inner_ball: f64,
    /// Agreement of subsystem operations with brute-force index loops.
    pub index_oracle: f64,
    /// Agreement of the M₄ permutation trace with the realignment moment.
    pub m4_equivalence: f64,
    /// Agreement of the QFI with a double loop over eigenpairs.
    pub qfi_oracle: f64,
    /// Agreement of single-copy statistics with their two-copy observables.
    pub two_copy: f64,
    /// Relative agreement of bound evaluations with reference values.
    pub bound_relative: f64,
}

pub const TOLERANCES: Tolerances = Tolerances {
    hermitian: 1e-12,
    unit_trace: 1e-12,
    psd: 1e-10,
    unit_norm: 1e-12,
    eig_reconstruction: 1e-10,
    expectation_imag: 1e-10,
    witness_alpha: 1e-9,
    qfi_degenerate: 1e-12,
    moments: 1e-12,
    max_entangled: 1e-8,
    inner_ball: 1e-10,
    index_oracle: 1e-12,
    m4_equivalence: 1e-9,
    qfi_oracle: 1e-10,
    two_copy: 1e-10,
    bound_relative: 5e-7,
};

impl Default for Tolerances {
    fn default() -> Self {
        TOLERANCES
    }
}
