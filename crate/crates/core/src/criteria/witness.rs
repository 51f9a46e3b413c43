use crate::error::{Error, Result};
use crate::quantum::{
    expectation, partial_transpose, CMatrix, DensityMatrix, HermitianObservable, PureStateVector,
    Split, Subsystem, C64,
};
use crate::sampler::is_max_entangled;
use crate::tolerance::TOLERANCES;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    /// `|φ⟩⟨φ|^{T_A}`
    PptType,
    /// `I/√d − |Φ⟩⟨Φ|` with `|Φ⟩` maximally entangled
    Faithful,
    Custom,
}

/// An entanglement witness with its cached `α = tr(W)/sqrt(tr(W²))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    observable: HermitianObservable,
    kind: WitnessKind,
    alpha: f64,
}

impl Witness {
    /// Structured witnesses must satisfy the necessary condition `α ≥ 1`.
    pub fn new(observable: HermitianObservable, kind: WitnessKind) -> Result<Self> {
        let alpha = observable.alpha();
        if kind != WitnessKind::Custom && !(alpha >= 1.0 - TOLERANCES.witness_alpha) {
            return Err(Error::invalid(format!(
                "{kind:?} witness has alpha {alpha} < 1"
            )));
        }
        Ok(Witness {
            observable,
            kind,
            alpha,
        })
    }

    pub fn custom(observable: HermitianObservable) -> Self {
        let alpha = observable.alpha();
        Witness {
            observable,
            kind: WitnessKind::Custom,
            alpha,
        }
    }

    pub fn observable(&self) -> &HermitianObservable {
        &self.observable
    }

    pub fn kind(&self) -> WitnessKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `tr(W ρ)`; negative values certify entanglement.
    pub fn value(&self, rho: &DensityMatrix) -> Result<f64> {
        expectation(&self.observable, rho)
    }
}

/// `W = |φ⟩⟨φ|^{T_A}`.
pub fn ppt_witness(phi: &PureStateVector, split: Split) -> Result<Witness> {
    split.check(phi.dim())?;
    let norm = phi.amplitudes().norm();
    if (norm - 1.0).abs() > TOLERANCES.unit_norm {
        return Err(Error::invalid(format!("state norm {norm} is not 1")));
    }
    let w = partial_transpose(&phi.projector(), Subsystem::A, split)?;
    Witness::new(w, WitnessKind::PptType)
}

/// `W = I/√d − |Φ⟩⟨Φ|`.
pub fn faithful_witness(phi: &PureStateVector, split: Split) -> Result<Witness> {
    split.check(phi.dim())?;
    if !is_max_entangled(phi, split)? {
        return Err(Error::invalid(
            "faithful witness needs a maximally entangled state on a square split",
        ));
    }
    let d = split.dim();
    let shift = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    let proj = phi.projector().into_entries();
    let w = CMatrix::identity(d, d).map(|z| z * shift) - proj;
    Witness::new(HermitianObservable::from_hermitian_unchecked(w), WitnessKind::Faithful)
}

/// Closed-form `α` of the faithful witness in dimension `d`.
pub fn faithful_alpha(d: usize) -> f64 {
    let d = d as f64;
    ((d - d.sqrt()) / 2.0).sqrt()
}

/// Outcome of the inner-ball necessary condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaCheck {
    pub alpha: f64,
    /// `tr(W ρ₀)` for the inner-ball state `ρ₀`.
    pub inner_ball_value: f64,
    /// `false` proves `W` is not a witness; `true` proves nothing.
    pub passes_inner_ball: bool,
}

/// Evaluates `W` on `ρ₀ = I/d − σ/(sqrt(d−1)·d)`, where `σ` is the traceless
/// part of `W` rescaled to `tr(σ²) = d`. The state `ρ₀` lies in the ball
/// around `I/d` that contains only separable states, and it is the point of
/// that ball most anti-aligned with `W`, so any valid witness has
/// `tr(W ρ₀) ≥ 0`. This holds exactly when `α ≥ 1` and `tr W > 0`.
///
/// If `W` is a multiple of the identity, `ρ₀ = I/d`.
pub fn validate_witness_alpha(w: &Witness) -> AlphaCheck {
    let m = w.observable().entries();
    let d = m.nrows();
    let df = d as f64;
    let tr = w.observable().trace();
    let alpha = w.observable().alpha();
    let traceless = m - CMatrix::identity(d, d).map(|z| z * (tr / df));
    let traceless_norm = traceless.norm();
    let scale = m.norm().max(f64::MIN_POSITIVE);
    let inner_ball_value = if d < 2 || traceless_norm <= 1e-14 * scale {
        tr / df
    } else {
        // tr(W σ) = tr(W₀ σ) = √d ‖W₀‖_F
        tr / df - df.sqrt() * traceless_norm / ((df - 1.0).sqrt() * df)
    };
    AlphaCheck {
        alpha,
        inner_ball_value,
        passes_inner_ball: inner_ball_value >= -TOLERANCES.inner_ball,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{random_max_entangled, random_pure_state, SeedSpec};

    fn two_by_two() -> Split {
        Split::new(2, 2).unwrap()
    }

    #[test]
    fn bell_ppt_witness() {
        let phi = PureStateVector::max_entangled_canonical(2).unwrap();
        let w = ppt_witness(&phi, two_by_two()).unwrap();
        assert!((w.alpha() - 1.0).abs() < 1e-12);
        assert!((w.observable().trace() - 1.0).abs() < 1e-15);
        assert!((w.observable().trace_sq() - 1.0).abs() < 1e-15);
        let check = validate_witness_alpha(&w);
        assert!(check.passes_inner_ball);
        assert!(check.inner_ball_value.abs() < 1e-10);
    }

    #[test]
    fn product_ppt_witness_is_projector() {
        let phi = PureStateVector::basis(4, 0).unwrap();
        let w = ppt_witness(&phi, two_by_two()).unwrap();
        assert!((w.observable().entries() - phi.projector().entries()).norm() < 1e-15);
        assert!((w.alpha() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_ppt_witness_alpha() {
        for s in 0..20 {
            let phi = random_pure_state(9, SeedSpec::new(1, s)).unwrap();
            let w = ppt_witness(&phi, Split::new(3, 3).unwrap()).unwrap();
            assert!((w.alpha() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn ppt_witness_rejects_bad_norm() {
        let v = PureStateVector::basis(4, 0).unwrap().amplitudes().map(|z| z * 2.0);
        let fake = PureStateVector::normalized(v.clone()).unwrap();
        assert!(ppt_witness(&fake, two_by_two()).is_ok());
        assert!(PureStateVector::new(v).is_err());
    }

    #[test]
    fn faithful_alpha_values() {
        assert!((faithful_alpha(4) - 1.0).abs() < 1e-15);
        assert!((faithful_alpha(9) - 1.7320508075688772).abs() < 1e-12);
        let phi = random_max_entangled(2, 2, SeedSpec::new(3, 3)).unwrap();
        let w = faithful_witness(&phi, two_by_two()).unwrap();
        assert!((w.alpha() - 1.0).abs() < 1e-9);
        assert!((w.observable().trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn faithful_rejects_non_maximal_state() {
        let phi = PureStateVector::basis(4, 0).unwrap();
        assert!(faithful_witness(&phi, two_by_two()).is_err());
    }

    #[test]
    fn inner_ball_trivial_cases() {
        let d = 4usize;
        let pos = Witness::custom(HermitianObservable::identity(d).scaled(1.0 / (d as f64).sqrt()));
        let c = validate_witness_alpha(&pos);
        assert!((c.alpha - 2.0).abs() < 1e-15);
        assert!(c.passes_inner_ball);
        let neg = Witness::custom(HermitianObservable::identity(d).scaled(-1.0));
        assert!(!validate_witness_alpha(&neg).passes_inner_ball);
    }

    #[test]
    fn inner_ball_matches_alpha_condition() {
        // sub-unit alpha fails, super-unit alpha passes
        let bad = Witness::custom(HermitianObservable::diagonal(&[1.0, 1.0, 1.0, -1.5]));
        assert!(bad.alpha() < 1.0);
        assert!(!validate_witness_alpha(&bad).passes_inner_ball);
        let good = Witness::custom(HermitianObservable::diagonal(&[1.0, 1.0, 1.0, -0.2]));
        assert!(good.alpha() > 1.0);
        assert!(validate_witness_alpha(&good).passes_inner_ball);
    }
}
