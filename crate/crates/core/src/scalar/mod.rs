//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, NumAssignOps, Signed};

mod dd;
pub use dd::Dd;

/// Real field the library computes in.
///
/// `UNIT_ROUNDOFF` is stated explicitly so tolerances never depend on how a
/// backend defines `Float::epsilon`.
///
/// Conversions go through an unevaluated `hi + lo` pair of `f64`s so that
/// nothing is lost when moving between `f64` and double-double.
pub trait Scalar:
    Float + Signed + NumAssignOps + Debug + Display + LowerExp + Send + Sync + 'static
{
    const UNIT_ROUNDOFF: f64;
    const NAME: &'static str;

    fn from_parts(hi: f64, lo: f64) -> Self;
    fn to_parts(self) -> (f64, f64);

    /// Conversion from an `f64` literal; exact for `f64` and wider.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_parts(x, 0.0)
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        let (hi, lo) = self.to_parts();
        hi + lo
    }

    #[inline]
    fn from_usize(k: usize) -> Self {
        Self::lit(k as f64)
    }

    /// Rescale a tolerance expressed for `f64` to this type's precision.
    #[inline]
    fn scaled_tol(tol_f64: f64) -> Self {
        Self::lit(tol_f64 * (Self::UNIT_ROUNDOFF / f64::UNIT_ROUNDOFF))
    }
}

impl Scalar for f32 {
    const UNIT_ROUNDOFF: f64 = 5.960_464_477_539_063e-8;
    const NAME: &'static str = "f32";

    fn from_parts(hi: f64, lo: f64) -> Self {
        (hi + lo) as f32
    }
    fn to_parts(self) -> (f64, f64) {
        (self as f64, 0.0)
    }
}

impl Scalar for f64 {
    const UNIT_ROUNDOFF: f64 = 1.110_223_024_625_156_5e-16;
    const NAME: &'static str = "f64";

    fn from_parts(hi: f64, lo: f64) -> Self {
        hi + lo
    }
    fn to_parts(self) -> (f64, f64) {
        (self, 0.0)
    }
}

impl Scalar for Dd {
    // 2^-104, a conservative figure for double-double arithmetic
    const UNIT_ROUNDOFF: f64 = 4.930_380_657_631_324e-32;
    const NAME: &'static str = "double-double";

    fn from_parts(hi: f64, lo: f64) -> Self {
        Dd::new(hi, lo)
    }
    fn to_parts(self) -> (f64, f64) {
        (self.hi(), self.lo())
    }
}

/// Convenience for building a fixed-size array of scalars from `f64`s.
pub fn lits<T: Scalar, const N: usize>(xs: [f64; N]) -> [T; N] {
    xs.map(T::lit)
}
