//! Reconstruction of intersecting surfaces from smooth invariants.
//!
//! A multi-surface is `m` graphs over a box in `R^d`, observed only as
//! value-sorted tuples. The sorted entry functions have cusps wherever two
//! surfaces cross, but their elementary symmetric polynomials stay smooth.
//! This crate fits Chebyshev surrogates to those invariants and recovers the
//! surface values pointwise as eigenvalues of a companion matrix (Frobenius,
//! Schmeisser symmetric tridiagonal, or Chebyshev colleague).
//!
//! The crate is `no_std` and only needs `alloc`. File formats, sweeps and the
//! command line live in the `multisurf` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod math;

pub mod chebfit;
pub mod companions;
pub mod dataset;
pub mod error;
pub mod generators;
pub mod invariants;
pub mod metrics;
pub mod noise;
pub mod poly;
pub mod reconstruct;
pub mod spectra;

pub use chebfit::{ChebSeries, DomainBox, FitReport, Truncation};
pub use companions::{CrossingDiagnostic, SchmeisserOptions};
pub use dataset::{MultiSurfaceDataset, Provenance};
pub use error::{Error, Result};
pub use invariants::{EspVector, ValueTransform};
pub use metrics::{GapWeightedConfig, Metrics};
pub use poly::{ChebyshevPoly, MonicPolynomial};
pub use reconstruct::{FittedModel, Method, MethodConfig, Projection, ReconstructionReport};
pub use spectra::{SymTridiagonal, UpperHessenberg};

pub use num_complex::Complex64;
