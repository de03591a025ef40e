//! Alternating projections between the cone of positive semidefinite
//! matrices and an affine subspace: projections, iteration traces, slowest
//! curves for the 3×3 family, truncated power series and rate fits.
//!
//! Most of the numerics are generic over [`Scalar`] (`f32`, `f64` or the
//! double-double [`Dd`]). The aliases below fix the common choices.

// `!(x > y)` is the NaN-rejecting comparison throughout; index loops
// read better than iterator chains in the small dense kernels
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod scalar;
pub mod symcore;
pub mod apengine;
pub mod planes;
pub mod slowcurve;
pub mod series;
pub mod rates;
pub mod builtins;
pub mod verify;

pub use error::{Error, Result};
pub use planes::PlaneSpec;
pub use scalar::{Dd, Scalar};

pub type SymMat64 = symcore::SymMat<f64>;
pub type SymMatDd = symcore::SymMat<Dd>;
pub type AffineSubspace64 = symcore::AffineSubspace<f64>;
pub type AffineSubspaceDd = symcore::AffineSubspace<Dd>;
pub type APTrace64 = apengine::APTrace<f64>;
pub type SlowCurve64 = slowcurve::SlowCurve<f64>;
pub type SlowCurveDd = slowcurve::SlowCurve<Dd>;
pub type TruncSeries64 = series::TruncSeries<f64>;
pub type TruncSeriesDd = series::TruncSeries<Dd>;
