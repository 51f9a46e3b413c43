//! Detection-capability engine for bipartite entanglement criteria.
//!
//! States are drawn from the k-induced measure (partial traces of Haar-random
//! pure states over a k-dimensional environment). Each entanglement criterion
//! in [`criteria`] is evaluated on those samples, [`capability`] turns the
//! detections into probability estimates with confidence intervals, and
//! [`bounds`] evaluates the closed-form exponential upper bounds those
//! estimates are compared against.
//!
//! Basis convention used throughout: a bipartite index `(i, j)` with `i` in
//! subsystem A and `j` in subsystem B maps to the flat row/column
//! `i * dim_b + j` (A is the slow index).

pub mod bounds;
pub mod capability;
pub mod criteria;
pub mod error;
pub mod io;
pub mod quantum;
pub mod sampler;
pub mod selftest;
pub mod tolerance;

pub use error::{Error, Result};
pub use quantum::{
    DensityMatrix, HermitianObservable, PureStateVector, Spectrum, Split, Subsystem, C64,
};
pub use sampler::SeedSpec;
