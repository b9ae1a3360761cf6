//! Grassmann manifold interpolation with maximum-volume (MV) local
//! coordinates and Vandermonde-with-Arnoldi polynomial bases.
//!
//! The pipeline has three stages:
//!
//! 1. [`manifold`]: a Householder-QR chart maps every Stiefel sample to MV
//!    coordinates `Xi = U2 * U1^{-1}` (and coordinate velocities for Hermite
//!    data).
//! 2. [`polybasis`]: the vectorized coordinates are fitted in a discrete
//!    orthonormal polynomial basis produced by the Arnoldi process (V+A), or
//!    its confluent extension (CV+A) when derivatives are available.
//! 3. [`manifold`] again: evaluated coordinates are retracted back to an
//!    orthonormal representative through a Cholesky factor.
//!
//! [`interpolant`] binds the stages together, [`baselines`] holds the
//! comparison methods, and [`experiments`] drives the reproducible sweeps and
//! the `gmiv` command line tool.

pub mod baselines;
pub mod error;
pub mod experiments;
pub mod interpolant;
pub mod kernels;
pub mod manifold;
pub mod polybasis;

pub use error::{Error, Result};
pub use interpolant::{GrassmannInterpolant, HermiteApproach, InterpolationMode, RefIndex};
pub use kernels::DenseMatrix;
pub use manifold::{MvChart, MvCoordinates, StiefelPoint, TangentLift};
pub use polybasis::{ArnoldiModel, BasisKind};
