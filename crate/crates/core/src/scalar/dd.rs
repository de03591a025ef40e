//! Double-double scalar.
//!
//! Wraps `twofloat::TwoFloat`, whose add/mul/sqrt are accurate to about
//! 1e-32, but whose division computes the reciprocal residual without a
//! fused multiply-add and so is only `f64`-accurate. Division here is
//! rebuilt on top of the exact multiply with two residual corrections.

use std::cmp::Ordering;
use std::fmt;
use std::num::FpCategory;
use std::ops::{
    Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign,
};

use num_traits::{Float, Num, NumCast, One, Signed, ToPrimitive, Zero};
use twofloat::TwoFloat;

#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct Dd(pub TwoFloat);

impl Dd {
    pub fn new(hi: f64, lo: f64) -> Self {
        Dd(<TwoFloat as From<f64>>::from(hi) + <TwoFloat as From<f64>>::from(lo))
    }

    pub fn hi(self) -> f64 {
        self.0.hi()
    }

    pub fn lo(self) -> f64 {
        self.0.lo()
    }

    fn quotient(x: TwoFloat, y: TwoFloat) -> TwoFloat {
        let yh = y.hi();
        if yh == 0.0 || !yh.is_finite() || !x.hi().is_finite() {
            return <TwoFloat as From<f64>>::from(x.hi() / yh);
        }
        let mut q = <TwoFloat as From<f64>>::from(x.hi() / yh);
        for _ in 0..2 {
            let r = x - q * y;
            q += <TwoFloat as From<f64>>::from(r.hi() / yh);
        }
        q
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&(self.hi() + self.lo()), f)
    }
}

impl fmt::LowerExp for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerExp::fmt(&(self.hi() + self.lo()), f)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident, $op:tt) => {
        impl $tr for Dd {
            type Output = Dd;
            #[inline]
            fn $m(self, rhs: Dd) -> Dd {
                Dd(self.0 $op rhs.0)
            }
        }
        impl $atr for Dd {
            #[inline]
            fn $am(&mut self, rhs: Dd) {
                *self = *self $op rhs;
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign, +);
binop!(Sub, sub, SubAssign, sub_assign, -);
binop!(Mul, mul, MulAssign, mul_assign, *);

impl Div for Dd {
    type Output = Dd;
    #[inline]
    fn div(self, rhs: Dd) -> Dd {
        Dd(Dd::quotient(self.0, rhs.0))
    }
}

impl DivAssign for Dd {
    #[inline]
    fn div_assign(&mut self, rhs: Dd) {
        *self = *self / rhs;
    }
}

impl Rem for Dd {
    type Output = Dd;
    fn rem(self, rhs: Dd) -> Dd {
        let q = (self / rhs).trunc();
        self - q * rhs
    }
}

impl RemAssign for Dd {
    fn rem_assign(&mut self, rhs: Dd) {
        *self = *self % rhs;
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd(-self.0)
    }
}

impl Zero for Dd {
    fn zero() -> Self {
        Dd(TwoFloat::zero())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Dd {
    fn one() -> Self {
        Dd(TwoFloat::one())
    }
}

impl Num for Dd {
    type FromStrRadixErr = <TwoFloat as Num>::FromStrRadixErr;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        TwoFloat::from_str_radix(s, radix).map(Dd)
    }
}

impl ToPrimitive for Dd {
    fn to_i64(&self) -> Option<i64> {
        self.0.to_i64()
    }
    fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }
    fn to_f64(&self) -> Option<f64> {
        Some(self.hi() + self.lo())
    }
}

impl NumCast for Dd {
    fn from<N: ToPrimitive>(n: N) -> Option<Self> {
        <TwoFloat as NumCast>::from(n).map(Dd)
    }
}

impl Signed for Dd {
    fn abs(&self) -> Self {
        Dd(self.0.abs())
    }
    fn abs_sub(&self, other: &Self) -> Self {
        if *self <= *other {
            Dd::zero()
        } else {
            *self - *other
        }
    }
    fn signum(&self) -> Self {
        Dd(Signed::signum(&self.0))
    }
    fn is_positive(&self) -> bool {
        self.0.is_sign_positive() && !self.0.is_zero()
    }
    fn is_negative(&self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }
}

macro_rules! lift0 {
    ($($name:ident),*) => {$(
        #[inline]
        fn $name() -> Self { Dd(<TwoFloat as Float>::$name()) }
    )*};
}

macro_rules! lift1 {
    ($($name:ident),*) => {$(
        #[inline]
        fn $name(self) -> Self { Dd(<TwoFloat as Float>::$name(self.0)) }
    )*};
}

macro_rules! pred {
    ($($name:ident),*) => {$(
        #[inline]
        fn $name(self) -> bool { <TwoFloat as Float>::$name(self.0) }
    )*};
}

impl Float for Dd {
    lift0!(nan, infinity, neg_infinity, neg_zero, min_value, min_positive_value, max_value);
    pred!(is_nan, is_infinite, is_finite, is_normal, is_sign_positive, is_sign_negative);
    lift1!(
        floor, ceil, round, trunc, fract, abs, signum, sqrt, exp, exp2, ln, log2, log10, cbrt,
        sin, cos, tan, asin, acos, atan, exp_m1, ln_1p, sinh, cosh, tanh, asinh, acosh, atanh
    );

    fn epsilon() -> Self {
        Dd::new(<Dd as super::Scalar>::UNIT_ROUNDOFF * 2.0, 0.0)
    }

    fn classify(self) -> FpCategory {
        self.0.classify()
    }

    fn mul_add(self, a: Self, b: Self) -> Self {
        self * a + b
    }

    fn recip(self) -> Self {
        Dd::one() / self
    }

    fn powi(self, n: i32) -> Self {
        let mut base = if n < 0 { self.recip() } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Dd::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }

    fn powf(self, n: Self) -> Self {
        (self.ln() * n).exp()
    }

    fn log(self, base: Self) -> Self {
        self.ln() / base.ln()
    }

    fn max(self, other: Self) -> Self {
        match self.partial_cmp(&other) {
            Some(Ordering::Less) => other,
            Some(_) => self,
            None => if self.is_nan() { other } else { self },
        }
    }

    fn min(self, other: Self) -> Self {
        match self.partial_cmp(&other) {
            Some(Ordering::Greater) => other,
            Some(_) => self,
            None => if self.is_nan() { other } else { self },
        }
    }

    fn abs_sub(self, other: Self) -> Self {
        Signed::abs_sub(&self, &other)
    }

    fn hypot(self, other: Self) -> Self {
        (self * self + other * other).sqrt()
    }

    fn atan2(self, other: Self) -> Self {
        Dd(self.0.atan2(other.0))
    }

    fn sin_cos(self) -> (Self, Self) {
        (self.sin(), self.cos())
    }

    fn integer_decode(self) -> (u64, i16, i8) {
        self.0.integer_decode()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn third_is_double_double_accurate() {
        let x = Dd::one() / Dd::new(3.0, 0.0);
        let r = x * Dd::new(3.0, 0.0) - Dd::one();
        assert!(r.abs().hi() < 1e-31, "{:e}", r.hi());
        assert!(x.lo() != 0.0);
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = Dd::new(0.7, 1.3e-17);
        let b = Dd::new(-3.1, 2.0e-17);
        let q = (a * b) / b;
        assert!((q - a).abs().hi() < 1e-31);
    }

    #[test]
    fn negative_powers() {
        let x = Dd::new(3.0, 0.0);
        let y = x.powi(-2) * Dd::new(9.0, 0.0) - Dd::one();
        assert!(y.abs().hi() < 1e-31);
    }
}
