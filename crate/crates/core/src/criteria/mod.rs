//! Entanglement-detection criteria and their per-state evaluation.
//!
//! A criterion is addressed by a descriptor string: the kind name, optionally
//! followed by parameters, e.g. `ppt`, `ew_fixed(witness=bell)`,
//! `fisher(pairs=10,schedule=per_state)` or `m4(moments=raw)`. Parameters
//! left at their defaults are omitted from the canonical form.

pub mod nonlinear;
pub mod witness;

use std::fmt;
use std::path::PathBuf;

pub use nonlinear::{d3opt_terms, e4, pt_moment3, qfi, realignment_moments, variance, D3Terms};
pub use witness::{
    faithful_alpha, faithful_witness, ppt_witness, validate_witness_alpha, AlphaCheck, Witness,
    WitnessKind,
};

use crate::error::{Error, Result};
use crate::io::matrix_file;
use crate::quantum::{
    hermitian_eigh, hermitian_eigs, partial_trace, partial_transpose, trace_of_product, CMatrix,
    DensityMatrix, HermitianObservable, PureStateVector, Split, Subsystem,
};
use crate::sampler::{
    gue_observable_with, random_max_entangled_with, random_pure_state_with, SeedSpec,
};

pub const DEFAULT_FISHER_PAIRS: usize = 10;

/// Stream used for observable pairs shared by every state of a run.
const SHARED_FISHER_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CriterionKind {
    EwFixed,
    EwPpt,
    EwFaithful,
    Ppt,
    Purity,
    Fisher,
    M4,
    D3Opt,
}

impl CriterionKind {
    pub const ALL: [CriterionKind; 8] = [
        CriterionKind::EwFixed,
        CriterionKind::EwPpt,
        CriterionKind::EwFaithful,
        CriterionKind::Ppt,
        CriterionKind::Purity,
        CriterionKind::Fisher,
        CriterionKind::M4,
        CriterionKind::D3Opt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CriterionKind::EwFixed => "ew_fixed",
            CriterionKind::EwPpt => "ew_ppt",
            CriterionKind::EwFaithful => "ew_faithful",
            CriterionKind::Ppt => "ppt",
            CriterionKind::Purity => "purity",
            CriterionKind::Fisher => "fisher",
            CriterionKind::M4 => "m4",
            CriterionKind::D3Opt => "d3opt",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Whether evaluation consumes randomness beyond the sampled state.
    pub fn rerandomizes(self) -> bool {
        matches!(
            self,
            CriterionKind::EwPpt | CriterionKind::EwFaithful | CriterionKind::Fisher
        )
    }
}

impl fmt::Display for CriterionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where a fixed witness comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum WitnessSource {
    /// PPT witness of the canonical maximally entangled state (square splits).
    Bell,
    /// Faithful witness of the canonical maximally entangled state.
    Faithful,
    /// `I/√d`, a positive operator that never detects.
    Identity,
    /// Matrix file in the plain-text complex format.
    File(PathBuf),
    /// Supplied programmatically; not reproducible from a descriptor.
    Custom,
}

impl WitnessSource {
    fn token(&self) -> String {
        match self {
            WitnessSource::Bell => "bell".into(),
            WitnessSource::Faithful => "faithful".into(),
            WitnessSource::Identity => "identity".into(),
            WitnessSource::File(p) => format!("file:{}", p.display()),
            WitnessSource::Custom => "custom".into(),
        }
    }

    fn parse(token: &str) -> Result<Self> {
        match token {
            "bell" => Ok(WitnessSource::Bell),
            "faithful" => Ok(WitnessSource::Faithful),
            "identity" => Ok(WitnessSource::Identity),
            t if t.starts_with("file:") => Ok(WitnessSource::File(PathBuf::from(&t[5..]))),
            other => Err(Error::invalid(format!(
                "unknown witness '{other}' (expected bell, faithful, identity or file:PATH)"
            ))),
        }
    }

    fn build(&self, split: Split) -> Result<Witness> {
        let canonical = || {
            if !split.is_square() {
                return Err(Error::invalid(format!(
                    "witness '{}' needs d_a = d_b, got {}x{}",
                    self.token(),
                    split.dim_a,
                    split.dim_b
                )));
            }
            PureStateVector::max_entangled_canonical(split.dim_a)
        };
        match self {
            WitnessSource::Bell => ppt_witness(&canonical()?, split),
            WitnessSource::Faithful => faithful_witness(&canonical()?, split),
            WitnessSource::Identity => {
                let d = split.dim();
                Ok(Witness::custom(
                    HermitianObservable::identity(d).scaled(1.0 / (d as f64).sqrt()),
                ))
            }
            WitnessSource::File(path) => {
                let m = matrix_file::read_matrix(path)?;
                split.check(m.nrows())?;
                Ok(Witness::custom(HermitianObservable::new(m)?))
            }
            WitnessSource::Custom => Err(Error::invalid("custom witnesses must be supplied directly")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FisherSchedule {
    /// Fresh observable pairs for every sampled state.
    PerState,
    /// One set of pairs for the whole run.
    PerExperiment,
}

/// Operand of the realignment moments in the M₄ criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentOperand {
    /// `τ = ρ_AB − ρ_A ⊗ ρ_B`
    Centered,
    /// `ρ_AB` itself
    Raw,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Criterion {
    EwFixed { source: WitnessSource, witness: Witness },
    EwPpt,
    EwFaithful,
    Ppt,
    Purity,
    Fisher { pairs: usize, schedule: FisherSchedule },
    M4 { moments: MomentOperand },
    D3Opt,
}

impl Criterion {
    pub fn kind(&self) -> CriterionKind {
        match self {
            Criterion::EwFixed { .. } => CriterionKind::EwFixed,
            Criterion::EwPpt => CriterionKind::EwPpt,
            Criterion::EwFaithful => CriterionKind::EwFaithful,
            Criterion::Ppt => CriterionKind::Ppt,
            Criterion::Purity => CriterionKind::Purity,
            Criterion::Fisher { .. } => CriterionKind::Fisher,
            Criterion::M4 { .. } => CriterionKind::M4,
            Criterion::D3Opt => CriterionKind::D3Opt,
        }
    }
}

/// A criterion bound to a bipartition.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionSpec {
    criterion: Criterion,
    split: Split,
}

fn split_params(descriptor: &str) -> Result<(&str, Vec<(&str, &str)>)> {
    let descriptor = descriptor.trim();
    let (name, rest) = match descriptor.find('(') {
        Some(open) => {
            let inner = descriptor[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| Error::invalid(format!("unbalanced parentheses in '{descriptor}'")))?;
            (&descriptor[..open], inner)
        }
        None => (descriptor, ""),
    };
    let mut params = Vec::new();
    for part in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::invalid(format!("parameter '{part}' is not key=value")))?;
        params.push((k.trim(), v.trim()));
    }
    Ok((name.trim(), params))
}

impl CriterionSpec {
    pub fn new(criterion: Criterion, split: Split) -> Result<Self> {
        match &criterion {
            Criterion::EwFixed { witness, .. } => split.check(witness.observable().dim())?,
            Criterion::EwFaithful if !split.is_square() => {
                return Err(Error::invalid(format!(
                    "ew_faithful needs d_a = d_b, got {}x{}",
                    split.dim_a, split.dim_b
                )))
            }
            Criterion::Fisher { pairs: 0, .. } => {
                return Err(Error::invalid("fisher needs at least one observable pair"))
            }
            _ => {}
        }
        Ok(CriterionSpec { criterion, split })
    }

    pub fn simple(kind: CriterionKind, split: Split) -> Result<Self> {
        let criterion = match kind {
            CriterionKind::EwFixed => {
                let witness = WitnessSource::Bell.build(split)?;
                Criterion::EwFixed {
                    source: WitnessSource::Bell,
                    witness,
                }
            }
            CriterionKind::EwPpt => Criterion::EwPpt,
            CriterionKind::EwFaithful => Criterion::EwFaithful,
            CriterionKind::Ppt => Criterion::Ppt,
            CriterionKind::Purity => Criterion::Purity,
            CriterionKind::Fisher => Criterion::Fisher {
                pairs: DEFAULT_FISHER_PAIRS,
                schedule: FisherSchedule::PerState,
            },
            CriterionKind::M4 => Criterion::M4 {
                moments: MomentOperand::Centered,
            },
            CriterionKind::D3Opt => Criterion::D3Opt,
        };
        Self::new(criterion, split)
    }

    /// Fixed-witness criterion around a programmatically built witness.
    pub fn with_witness(witness: Witness, split: Split) -> Result<Self> {
        Self::new(
            Criterion::EwFixed {
                source: WitnessSource::Custom,
                witness,
            },
            split,
        )
    }

    /// Parses a descriptor such as `fisher(pairs=5,schedule=per_experiment)`.
    pub fn parse(descriptor: &str, split: Split) -> Result<Self> {
        let (name, params) = split_params(descriptor)?;
        let kind = CriterionKind::from_name(name).ok_or_else(|| {
            Error::invalid(format!(
                "unknown criterion '{name}' (expected one of {})",
                CriterionKind::ALL.map(|k| k.name()).join(", ")
            ))
        })?;
        let unknown = |key: &str| Error::invalid(format!("criterion '{name}' has no parameter '{key}'"));
        let criterion = match kind {
            CriterionKind::EwFixed => {
                let mut source = WitnessSource::Bell;
                for (k, v) in params {
                    match k {
                        "witness" => source = WitnessSource::parse(v)?,
                        _ => return Err(unknown(k)),
                    }
                }
                let witness = source.build(split)?;
                Criterion::EwFixed { source, witness }
            }
            CriterionKind::Fisher => {
                let mut pairs = DEFAULT_FISHER_PAIRS;
                let mut schedule = FisherSchedule::PerState;
                for (k, v) in params {
                    match k {
                        "pairs" => {
                            pairs = v
                                .parse()
                                .map_err(|_| Error::invalid(format!("pairs '{v}' is not a count")))?
                        }
                        "schedule" => {
                            schedule = match v {
                                "per_state" => FisherSchedule::PerState,
                                "per_experiment" => FisherSchedule::PerExperiment,
                                _ => return Err(Error::invalid(format!("unknown schedule '{v}'"))),
                            }
                        }
                        _ => return Err(unknown(k)),
                    }
                }
                Criterion::Fisher { pairs, schedule }
            }
            CriterionKind::M4 => {
                let mut moments = MomentOperand::Centered;
                for (k, v) in params {
                    match k {
                        "moments" => {
                            moments = match v {
                                "centered" => MomentOperand::Centered,
                                "raw" => MomentOperand::Raw,
                                _ => return Err(Error::invalid(format!("unknown moments operand '{v}'"))),
                            }
                        }
                        _ => return Err(unknown(k)),
                    }
                }
                Criterion::M4 { moments }
            }
            other => {
                if let Some((k, _)) = params.first() {
                    return Err(unknown(k));
                }
                return Self::simple(other, split);
            }
        };
        Self::new(criterion, split)
    }

    /// Canonical descriptor; parsing it yields an equal spec.
    pub fn descriptor(&self) -> String {
        match &self.criterion {
            Criterion::EwFixed { source, .. } if *source == WitnessSource::Bell => "ew_fixed".into(),
            Criterion::EwFixed { source, .. } => format!("ew_fixed(witness={})", source.token()),
            Criterion::Fisher { pairs, schedule } => {
                let mut params = Vec::new();
                if *pairs != DEFAULT_FISHER_PAIRS {
                    params.push(format!("pairs={pairs}"));
                }
                if *schedule == FisherSchedule::PerExperiment {
                    params.push("schedule=per_experiment".into());
                }
                if params.is_empty() {
                    "fisher".into()
                } else {
                    format!("fisher({})", params.join(","))
                }
            }
            Criterion::M4 {
                moments: MomentOperand::Raw,
            } => "m4(moments=raw)".into(),
            other => other.kind().name().into(),
        }
    }

    pub fn kind(&self) -> CriterionKind {
        self.criterion.kind()
    }

    pub fn criterion(&self) -> &Criterion {
        &self.criterion
    }

    pub fn split(&self) -> Split {
        self.split
    }
}

/// Result of one criterion on one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionOutcome {
    pub detected: bool,
    /// Signed margin; positive means the separability inequality is violated.
    pub statistic: f64,
    /// The separable-side reference value the margin is measured against.
    pub threshold: f64,
}

impl DetectionOutcome {
    pub fn from_margin(statistic: f64, threshold: f64) -> Self {
        DetectionOutcome {
            detected: statistic > 0.0,
            statistic,
            threshold,
        }
    }
}

fn witness_outcome(w: &Witness, rho: &DensityMatrix) -> Result<DetectionOutcome> {
    Ok(DetectionOutcome::from_margin(-w.value(rho)?, 0.0))
}

/// Observable pairs `(A_i, B_i)` on the two factors.
pub fn fisher_pairs(
    split: Split,
    pairs: usize,
    schedule: FisherSchedule,
    seed: SeedSpec,
) -> Result<Vec<(HermitianObservable, HermitianObservable)>> {
    let seed = match schedule {
        FisherSchedule::PerState => seed,
        FisherSchedule::PerExperiment => seed.with_stream(SHARED_FISHER_STREAM),
    };
    let mut rng = seed.rng();
    (0..pairs)
        .map(|_| {
            let a = gue_observable_with(&mut rng, split.dim_a)?;
            let b = gue_observable_with(&mut rng, split.dim_b)?;
            Ok((a, b))
        })
        .collect()
}

/// Margin `F(ρ, A⊗I + I⊗B) − Δ(A⊗I − I⊗B)²` for each pair; the returned
/// outcome carries the largest.
pub fn fisher_outcome(
    rho: &DensityMatrix,
    pairs: &[(HermitianObservable, HermitianObservable)],
) -> Result<DetectionOutcome> {
    let split = rho.split();
    for (a, b) in pairs {
        split.check(a.dim() * b.dim())?;
        if a.dim() != split.dim_a {
            return Err(Error::DimensionMismatch {
                expected: split.dim_a,
                actual: a.dim(),
            });
        }
    }
    let (values, vectors) = hermitian_eigh(&rho.as_observable())?;
    let rho_a = partial_trace(rho, Subsystem::A);
    let rho_b = partial_trace(rho, Subsystem::B);
    let mut best: Option<DetectionOutcome> = None;
    for (a, b) in pairs {
        let f = local_sum_qfi(&values, &vectors, split, a.entries(), b.entries());
        let var = local_difference_variance(rho, &rho_a, &rho_b, a.entries(), b.entries());
        let outcome = DetectionOutcome::from_margin(f - var, var);
        if best.is_none_or(|b| outcome.statistic > b.statistic) {
            best = Some(outcome);
        }
    }
    best.ok_or_else(|| Error::invalid("fisher needs at least one observable pair"))
}

/// `F(ρ, A⊗I + I⊗B)` from the eigendecomposition of `ρ`. The local sum is
/// applied to each eigenvector reshaped as a `d_a × d_b` matrix `M`
/// (`A M + M Bᵀ`), and only columns in the support of `ρ` are formed: pairs
/// outside the support carry no weight.
fn local_sum_qfi(values: &[f64], vectors: &CMatrix, split: Split, a: &CMatrix, b: &CMatrix) -> f64 {
    let (da, db) = (split.dim_a, split.dim_b);
    let n = values.len();
    let tol = crate::tolerance::TOLERANCES.qfi_degenerate;
    let in_support: Vec<bool> = values.iter().map(|&v| v >= tol / 2.0).collect();
    let bt = b.transpose();
    let vectors_adj = vectors.adjoint();
    let mut total = 0.0;
    for l in (0..n).filter(|&l| in_support[l]) {
        let m = CMatrix::from_fn(da, db, |i, j| vectors[(i * db + j, l)]);
        let applied = a * &m + &m * &bt;
        let flat = CMatrix::from_fn(n, 1, |r, _| applied[(r / db, r % db)]);
        let column = &vectors_adj * flat;
        for k in 0..n {
            let sum = values[k] + values[l];
            if sum < tol {
                continue;
            }
            let diff = values[k] - values[l];
            // (k, l) and (l, k) coincide in weight; count the mirror when l's
            // column is the only one formed
            let weight = if in_support[k] { 1.0 } else { 2.0 };
            total += weight * diff * diff / (2.0 * sum) * column[(k, 0)].norm_sqr();
        }
    }
    total
}

/// `Δ(A⊗I − I⊗B)² = tr(ρ_A A²) + tr(ρ_B B²) − 2 tr(ρ A⊗B) − (tr(ρ_A A) − tr(ρ_B B))²`.
fn local_difference_variance(
    rho: &DensityMatrix,
    rho_a: &DensityMatrix,
    rho_b: &DensityMatrix,
    a: &CMatrix,
    b: &CMatrix,
) -> f64 {
    let split = rho.split();
    let db = split.dim_b;
    let m = rho.entries();
    let mean = trace_of_product(rho_a.entries(), a).re - trace_of_product(rho_b.entries(), b).re;
    let a2 = a * a;
    let b2 = b * b;
    let second_local = trace_of_product(rho_a.entries(), &a2).re + trace_of_product(rho_b.entries(), &b2).re;
    // tr(ρ (A⊗B)) = Σ ρ[(i,k),(j,l)] A[j,i] B[l,k]
    let mut cross = crate::quantum::C64::new(0.0, 0.0);
    for i in 0..split.dim_a {
        for j in 0..split.dim_a {
            let aji = a[(j, i)];
            for k in 0..db {
                for l in 0..db {
                    cross += m[(i * db + k, j * db + l)] * aji * b[(l, k)];
                }
            }
        }
    }
    second_local - 2.0 * cross.re - mean * mean
}

/// `E₄(X) − sqrt((1 − tr ρ_A²)(1 − tr ρ_B²))` with `X` per `moments`.
pub fn m4_outcome(rho: &DensityMatrix, moments: MomentOperand) -> Result<DetectionOutcome> {
    let split = rho.split();
    let rho_a = partial_trace(rho, Subsystem::A);
    let rho_b = partial_trace(rho, Subsystem::B);
    let operand: CMatrix = match moments {
        MomentOperand::Centered => {
            rho.entries() - crate::quantum::kron(rho_a.entries(), rho_b.entries())
        }
        MomentOperand::Raw => rho.entries().clone(),
    };
    let operand = HermitianObservable::from_hermitian_unchecked(operand);
    let (m2, m4) = realignment_moments(&operand, split)?;
    let estimate = e4(m2, m4)?;
    let bound = ((1.0 - rho_a.purity()).max(0.0) * (1.0 - rho_b.purity()).max(0.0)).sqrt();
    Ok(DetectionOutcome::from_margin(estimate - bound, bound))
}

/// Evaluates `spec` on `rho`. `seed` is consumed only by kinds that draw a
/// fresh witness or fresh observables per state.
pub fn detect(spec: &CriterionSpec, rho: &DensityMatrix, seed: SeedSpec) -> Result<DetectionOutcome> {
    if rho.split() != spec.split {
        return Err(Error::invalid(format!(
            "criterion is for a {}x{} split but the state is {}x{}",
            spec.split.dim_a,
            spec.split.dim_b,
            rho.split().dim_a,
            rho.split().dim_b
        )));
    }
    let split = spec.split;
    match &spec.criterion {
        Criterion::EwFixed { witness, .. } => witness_outcome(witness, rho),
        Criterion::EwPpt => {
            let phi = random_pure_state_with(&mut seed.rng(), split.dim())?;
            witness_outcome(&ppt_witness(&phi, split)?, rho)
        }
        Criterion::EwFaithful => {
            let psi = random_max_entangled_with(&mut seed.rng(), split)?;
            witness_outcome(&faithful_witness(&psi, split)?, rho)
        }
        Criterion::Ppt => {
            let pt = partial_transpose(&rho.as_observable(), Subsystem::B, split)?;
            let lambda_min = hermitian_eigs(&pt)?.min();
            Ok(DetectionOutcome::from_margin(-lambda_min, 0.0))
        }
        Criterion::Purity => {
            let marginal = partial_trace(rho, Subsystem::A).purity();
            Ok(DetectionOutcome::from_margin(rho.purity() - marginal, marginal))
        }
        Criterion::Fisher { pairs, schedule } => {
            let pairs = fisher_pairs(split, *pairs, *schedule, seed)?;
            fisher_outcome(rho, &pairs)
        }
        Criterion::M4 { moments } => m4_outcome(rho, *moments),
        Criterion::D3Opt => {
            let terms = d3opt_terms(rho.purity());
            let moment = pt_moment3(rho);
            Ok(DetectionOutcome::from_margin(terms.bound - moment, moment))
        }
    }
}
