//! Numerical toolkit for approximate interpolation by band-limited functions.
//!
//! The library operates on Paley-Wiener spaces `PW_S` of square-integrable
//! functions whose Fourier transform is supported on a compact union of
//! intervals `S`. Around that core it provides:
//!
//! * [`spectrum`] - spectra as normalized interval unions, with measure and
//!   Minkowski dilation;
//! * [`pointset`] - uniformly discrete node sets with window extraction and
//!   upper / upper-uniform density estimators;
//! * [`pwkernel`] - the reproducing kernel of `PW_S`, Gram systems, ridge
//!   interpolation of delta data, and empirical frame bounds;
//! * [`windows`] - band-limited multiplier windows (Fejer and sinc-product)
//!   behind a common trait, selectable by name;
//! * [`width`] - singular-value based subspace extraction from
//!   near-orthonormal vector families;
//! * [`concentration`] - time-band concentration operators, their eigenvalue
//!   spectra, and the dimension bound for concentrated subspaces;
//! * [`harness`] - end-to-end density-bound verification, the sharp
//!   interpolation example in closed form, and the finite-scale certification
//!   pipeline.
//!
//! All kernel arithmetic is complex; spectra symmetric about the origin yield
//! real kernels up to roundoff, which the test suite checks explicitly.

// Parameter guards are written as `!(x > 0.0)` so NaN is rejected along with
// out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod concentration;
pub mod error;
pub mod harness;
pub mod instance;
pub mod linalg;
pub mod matio;
pub mod pointset;
pub mod pwkernel;
pub mod quad;
pub mod spectrum;
pub mod width;
pub mod windows;

pub use error::{Error, Result};
pub use pointset::{DensityEstimate, DensityKind, Generator, PointSet};
pub use spectrum::Spectrum;
