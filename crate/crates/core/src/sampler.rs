//! Seedable random generation of Ginibre matrices, induced-measure states,
//! Haar unitaries and random observables.
//!
//! Every draw is a pure function of a [`SeedSpec`]. The generator for a
//! `(master_seed, stream_index)` pair is ChaCha8 seeded with `master_seed`
//! (through `SeedableRng::seed_from_u64`) and switched to stream
//! `stream_index`, so sample `i` of a run can be regenerated on its own and
//! parallel workers never share generator state. Normal variates come from
//! `rand_distr::StandardNormal` (ziggurat) over that stream.

use nalgebra::linalg::QR;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::quantum::{
    hermitize, CMatrix, CVector, DensityMatrix, HermitianObservable, PureStateVector, Split, C64,
};
use crate::tolerance::TOLERANCES;

/// Identifies one independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        SeedSpec {
            master_seed,
            stream_index,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }

    /// A stream family decorrelated from this one, keyed by `salt`.
    /// Uses the SplitMix64 finalizer on `master_seed ^ salt`.
    pub fn derive(&self, salt: u64) -> SeedSpec {
        SeedSpec {
            master_seed: splitmix64(self.master_seed ^ salt),
            stream_index: self.stream_index,
        }
    }

    pub fn with_stream(&self, stream_index: u64) -> SeedSpec {
        SeedSpec {
            master_seed: self.master_seed,
            stream_index,
        }
    }
}

pub(crate) fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A `rows × cols` matrix of i.i.d. standard complex Gaussians
/// (real and imaginary parts each N(0, 1)).
#[derive(Debug, Clone, PartialEq)]
pub struct GinibreMatrix {
    entries: CMatrix,
}

impl GinibreMatrix {
    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }
}

fn nonzero(dims: &[usize]) -> Result<()> {
    if dims.iter().any(|&d| d == 0) {
        return Err(Error::invalid("dimensions must be positive"));
    }
    Ok(())
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Column-major fill so a prefix of columns does not depend on `cols`.
pub fn ginibre_with<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Result<GinibreMatrix> {
    nonzero(&[rows, cols])?;
    let mut entries = CMatrix::zeros(rows, cols);
    for c in 0..cols {
        for r in 0..rows {
            entries[(r, c)] = complex_normal(rng);
        }
    }
    Ok(GinibreMatrix { entries })
}

pub fn ginibre(rows: usize, cols: usize, seed: SeedSpec) -> Result<GinibreMatrix> {
    ginibre_with(&mut seed.rng(), rows, cols)
}

/// `ρ = Z Z† / tr(Z Z†)` for a `(d_a d_b) × k` Ginibre matrix `Z`.
pub fn induced_state_with<R: Rng + ?Sized>(rng: &mut R, split: Split, k: usize) -> Result<DensityMatrix> {
    nonzero(&[k])?;
    let z = ginibre_with(rng, split.dim(), k)?.into_entries();
    let zz = hermitize(&z * z.adjoint());
    let norm: f64 = z.iter().map(|x| x.norm_sqr()).sum();
    Ok(DensityMatrix::from_parts_unchecked(split, zz.map(|x| x / norm)))
}

pub fn induced_state(dim_a: usize, dim_b: usize, k: usize, seed: SeedSpec) -> Result<DensityMatrix> {
    let split = Split::new(dim_a, dim_b)?;
    induced_state_with(&mut seed.rng(), split, k)
}

/// Haar unitary from the QR decomposition of a Ginibre matrix, with each
/// column of `Q` multiplied by the phase of the matching diagonal entry of
/// `R` so the result does not depend on the QR sign convention.
pub fn haar_unitary_with<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<CMatrix> {
    let z = ginibre_with(rng, d, d)?.into_entries();
    let qr = QR::new(z);
    let r = qr.r();
    let mut q = qr.q();
    for c in 0..d {
        let diag = r[(c, c)];
        let phase = if diag.norm() > 0.0 {
            diag / diag.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for row in 0..d {
            q[(row, c)] *= phase;
        }
    }
    Ok(q)
}

pub fn haar_unitary(d: usize, seed: SeedSpec) -> Result<CMatrix> {
    haar_unitary_with(&mut seed.rng(), d)
}

/// Haar-random pure state as a normalized complex Gaussian vector.
pub fn random_pure_state_with<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<PureStateVector> {
    nonzero(&[d])?;
    let v = CVector::from_fn(d, |_, _| complex_normal(rng));
    PureStateVector::normalized(v)
}

pub fn random_pure_state(d: usize, seed: SeedSpec) -> Result<PureStateVector> {
    random_pure_state_with(&mut seed.rng(), d)
}

/// `(U_A ⊗ U_B) Σ_i |ii⟩ / sqrt(d_a)`.
pub fn max_entangled_from_unitaries(u_a: &CMatrix, u_b: &CMatrix) -> Result<PureStateVector> {
    let side = u_a.nrows();
    if !u_a.is_square() || u_b.shape() != u_a.shape() || side == 0 {
        return Err(Error::invalid("local unitaries must be square and of equal size"));
    }
    // amplitude (i, j) = Σ_m U_A[i,m] U_B[j,m] / sqrt(d) = (U_A U_Bᵀ)[i,j] / sqrt(d)
    let coeff = u_a * u_b.transpose();
    let scale = 1.0 / (side as f64).sqrt();
    let v = CVector::from_fn(side * side, |idx, _| coeff[(idx / side, idx % side)] * scale);
    PureStateVector::normalized(v)
}

pub fn random_max_entangled_with<R: Rng + ?Sized>(rng: &mut R, split: Split) -> Result<PureStateVector> {
    if !split.is_square() {
        return Err(Error::invalid(format!(
            "maximally entangled states need d_a = d_b, got {}x{}",
            split.dim_a, split.dim_b
        )));
    }
    let u_a = haar_unitary_with(rng, split.dim_a)?;
    let u_b = haar_unitary_with(rng, split.dim_b)?;
    max_entangled_from_unitaries(&u_a, &u_b)
}

pub fn random_max_entangled(dim_a: usize, dim_b: usize, seed: SeedSpec) -> Result<PureStateVector> {
    random_max_entangled_with(&mut seed.rng(), Split::new(dim_a, dim_b)?)
}

/// Gaussian unitary ensemble, unnormalized: `(G + G†)/2`.
pub fn gue_observable_with<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<HermitianObservable> {
    let g = ginibre_with(rng, d, d)?.into_entries();
    Ok(HermitianObservable::from_hermitian_unchecked(hermitize(g)))
}

pub fn gue_observable(d: usize, seed: SeedSpec) -> Result<HermitianObservable> {
    gue_observable_with(&mut seed.rng(), d)
}

/// Checks both marginals of `|ψ⟩⟨ψ|` against `I/d_a`.
pub fn is_max_entangled(psi: &PureStateVector, split: Split) -> Result<bool> {
    if !split.is_square() {
        return Ok(false);
    }
    let rho = DensityMatrix::pure(split, psi)?;
    let target = CMatrix::identity(split.dim_a, split.dim_a).map(|z| z / split.dim_a as f64);
    let tol = TOLERANCES.max_entangled;
    let a = crate::quantum::partial_trace(&rho, crate::quantum::Subsystem::A);
    let b = crate::quantum::partial_trace(&rho, crate::quantum::Subsystem::B);
    Ok((a.entries() - &target).camax() <= tol && (b.entries() - &target).camax() <= tol)
}
