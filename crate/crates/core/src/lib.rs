//! Numerical laboratory for arithmetic weights and their analytic behavior:
//! multiplicative sieves, exact rational arc decompositions, major-arc weight
//! models, Gowers uniformity norms, sparse Piatetski-Shapiro weights,
//! oscillation functionals, local Fourier spectra, and bilinear averages
//! along orbits of concrete dynamical systems.
//!
//! Floating kernels are generic over the [`scalar::Scalar`] precision
//! (`f32`/`f64`); integer and rational computations (arcs, Ramanujan and
//! Gauss sums, multiplicity counts) are exact. The aliases at the crate root
//! fix the default double-precision instantiations.

pub mod arcs;
pub mod ergodic;
pub mod error;
pub mod fft;
pub mod gowers;
pub mod major_arc;
pub mod oscillation;
pub mod ps;
pub mod scalar;
pub mod series;
pub mod sieve;
pub mod spectra;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{unit_phase, Scalar};

/// Default double-precision series.
pub type Series = series::WeightSeries<f64>;
/// Single-precision series.
pub type Series32 = series::WeightSeries<f32>;
/// Default double-precision complex number.
pub type C64 = num_complex::Complex<f64>;
/// Double-precision major-arc weight table.
pub type ArcWeight = major_arc::MajorArcWeight<f64>;
/// Double-precision Gowers-norm result.
pub type Gowers = gowers::GowersResult<f64>;
/// Double-precision sparse weight.
pub type Sparse = ps::SparseWeight<f64>;
/// Double-precision sample trace.
pub type SampleTrace = oscillation::Trace<f64>;
