//! Degree-capped univariate power series, used to certify the low-order
//! Taylor coefficients of the slowest curve independently of pointwise
//! evaluation.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::planes::{type2_basis, PlaneSpec};
use crate::scalar::Scalar;

pub const DEFAULT_CAP: usize = 12;

/// `Σ_{d ≤ cap} coeffs[d] t^d`. Binary operators between series of
/// different caps truncate to the smaller cap, which keeps them exact.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncSeries<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> TruncSeries<T> {
    pub fn zero(cap: usize) -> Self {
        TruncSeries { coeffs: vec![T::zero(); cap + 1] }
    }

    pub fn constant(cap: usize, c: T) -> Self {
        let mut s = Self::zero(cap);
        s.coeffs[0] = c;
        s
    }

    /// The series `t`.
    pub fn var(cap: usize) -> Self {
        let mut s = Self::zero(cap);
        if cap >= 1 {
            s.coeffs[1] = T::one();
        }
        s
    }

    /// Coefficients beyond `cap` are dropped; missing ones are zero.
    pub fn from_coeffs(cap: usize, c: &[T]) -> Self {
        let mut s = Self::zero(cap);
        for (d, &v) in c.iter().enumerate().take(cap + 1) {
            s.coeffs[d] = v;
        }
        s
    }

    pub fn cap(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, d: usize) -> T {
        self.coeffs.get(d).copied().unwrap_or_else(T::zero)
    }

    pub fn scale(&self, k: T) -> Self {
        TruncSeries { coeffs: self.coeffs.iter().map(|&c| c * k).collect() }
    }

    /// Coefficientwise absolute value.
    pub fn abs(&self) -> Self {
        TruncSeries { coeffs: self.coeffs.iter().map(|c| c.abs()).collect() }
    }

    pub fn eval(&self, t: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * t + c)
    }

    fn zip(&self, o: &Self, f: impl Fn(T, T) -> T) -> Self {
        let cap = self.cap().min(o.cap());
        TruncSeries { coeffs: (0..=cap).map(|d| f(self.coeffs[d], o.coeffs[d])).collect() }
    }

    fn cauchy(&self, o: &Self) -> Self {
        let cap = self.cap().min(o.cap());
        let mut out = vec![T::zero(); cap + 1];
        for (i, &a) in self.coeffs.iter().enumerate().take(cap + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate().take(cap + 1 - i) {
                out[i + j] += a * b;
            }
        }
        TruncSeries { coeffs: out }
    }

    fn check_caps(&self, o: &Self) -> Result<()> {
        if self.cap() != o.cap() {
            return Err(Error::SeriesCapMismatch(self.cap(), o.cap()));
        }
        Ok(())
    }

    /// `self / o` by the long-division recurrence.
    pub fn div(&self, o: &Self) -> Result<Self> {
        self.check_caps(o)?;
        let b0 = o.coeffs[0];
        if !(b0.abs() > T::lit(1e-300)) {
            return Err(Error::SeriesNotInvertible);
        }
        let mut q = vec![T::zero(); self.coeffs.len()];
        for k in 0..q.len() {
            let mut s = self.coeffs[k];
            for j in 0..k {
                s -= q[j] * o.coeffs[k - j];
            }
            q[k] = s / b0;
        }
        Ok(TruncSeries { coeffs: q })
    }

    pub fn recip(&self) -> Result<Self> {
        Self::constant(self.cap(), T::one()).div(self)
    }

    /// `self(inner(t))`, by Horner's rule over truncated products.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        self.check_caps(inner)?;
        if !inner.coeffs[0].is_zero() {
            return Err(Error::SeriesInnerConstant);
        }
        let mut acc = Self::zero(self.cap());
        for &c in self.coeffs.iter().rev() {
            acc = &acc.cauchy(inner) + &Self::constant(self.cap(), c);
        }
        Ok(acc)
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::constant(self.cap(), T::one());
        for _ in 0..n {
            acc = acc.cauchy(self);
        }
        acc
    }

    /// Largest coefficient difference over degrees `lo..=hi`.
    pub fn max_diff(&self, o: &Self, lo: usize, hi: usize) -> T {
        (lo..=hi).fold(T::zero(), |m, d| m.max((self.coeff(d) - o.coeff(d)).abs()))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<T: Scalar> $tr for &TruncSeries<T> {
            type Output = TruncSeries<T>;
            fn $m(self, o: Self) -> TruncSeries<T> {
                $body(self, o)
            }
        }
        impl<T: Scalar> $tr for TruncSeries<T> {
            type Output = TruncSeries<T>;
            fn $m(self, o: Self) -> TruncSeries<T> {
                $body(&self, &o)
            }
        }
    };
}

binop!(Add, add, |a: &TruncSeries<T>, b: &TruncSeries<T>| a.zip(b, |x, y| x + y));
binop!(Sub, sub, |a: &TruncSeries<T>, b: &TruncSeries<T>| a.zip(b, |x, y| x - y));
binop!(Mul, mul, |a: &TruncSeries<T>, b: &TruncSeries<T>| a.cauchy(b));

impl<T: Scalar> Neg for &TruncSeries<T> {
    type Output = TruncSeries<T>;
    fn neg(self) -> TruncSeries<T> {
        self.scale(-T::one())
    }
}

/// Series of `w`, `g13`, `g23` for a Type-2 plane (rotation plays no role).
#[derive(Clone, Debug)]
pub struct CurveSeries<T> {
    pub w: TruncSeries<T>,
    pub g13: TruncSeries<T>,
    pub g23: TruncSeries<T>,
}

fn type2_c<T: Scalar>(spec: &PlaneSpec) -> Result<[T; 5]> {
    let c = spec.type2_params()?;
    if c[3] == 0.0 {
        return Err(Error::InvalidSpec("c4 must be nonzero".into()));
    }
    Ok(c.map(T::lit))
}

pub fn expand_curve<T: Scalar>(spec: &PlaneSpec, cap: usize) -> Result<CurveSeries<T>> {
    let [c1, c2, c3, c4, c5] = type2_c::<T>(spec)?;
    let k = |v: T| TruncSeries::constant(cap, v);
    let one = k(T::one());
    let two = T::lit(2.0);
    let t = TruncSeries::var(cap);
    let t2 = &t * &t;
    let t3 = &t2 * &t;
    let a = &one - &t.scale(two * c1);
    let d1 = &a.scale(c4) + &t.scale(c5);
    let inner = &(&a + &t2.scale(c2).div(&d1)?) + &t3.scale(c3 / c4);
    let d2 = &inner.scale(c4) + &t.scale(c5);
    let b = &a + &t2.scale(c2 / c4);
    let d3 = &(&b.scale(c4) + &t.scale(c5)) * &b;
    let w = &(&a + &t2.scale(c2).div(&d2)?) + &t3.scale(c3).div(&d3)?;

    let [b1, b2, b3] = type2_basis([c1, c2, c3, c4, c5]);
    let (n1, b21, b31) = (b1.dot(&b1), b2.dot(&b1), b3.dot(&b1));
    let eight = T::lit(8.0);
    let r0 = (c4 * b31 + c5 * b21) / (eight * c4.powi(5) * n1) + T::one() / (eight * c4.powi(3));
    let dd = &w.scale(two * c4) + &t.scale(two * c5);
    let d4 = dd.powi(4);
    let t6 = t.powi(6);
    let t7 = t.powi(7);
    let gt = &t2.div(&dd)? - &t6.scale(two * (two * c5 * c5 + T::one())).div(&(&d4 * &dd))?;
    let r13 = t7.scale(c5 / c4 * r0 + b21 / (T::lit(16.0) * c4.powi(6) * n1));
    let d4w = &d4 * &w;
    let r23 = &(-&t6.scale(two * c5).div(&d4w)?) + &t7.scale(r0);
    let g13 = &gt + &r13;
    let g23 = &(-&(&gt * &t).div(&w)?) + &r23;
    Ok(CurveSeries { w, g13, g23 })
}

/// `max_{d ≤ 5} |[w]_d − [1 − 2c1 t + 2c2 g13 − 2c3 g23]_d|`. Degree 6 is
/// deliberately left out: the two sides differ there.
pub fn check_lemma64<T: Scalar>(spec: &PlaneSpec, cap: usize) -> Result<T> {
    let [c1, c2, c3, ..] = type2_c::<T>(spec)?;
    let cs = expand_curve::<T>(spec, cap)?;
    let two = T::lit(2.0);
    let rhs = &(&(&TruncSeries::constant(cap, T::one()) - &TruncSeries::var(cap).scale(two * c1))
        + &cs.g13.scale(two * c2))
        - &cs.g23.scale(two * c3);
    Ok(cs.w.max_diff(&rhs, 0, 5.min(cap)))
}

/// Entries of `G(t) − 0` as series in the unrotated frame.
pub fn curve_matrix_series<T: Scalar>(spec: &PlaneSpec, cap: usize) -> Result<[[TruncSeries<T>; 3]; 3]> {
    let c = type2_c::<T>(spec)?;
    let cs = expand_curve::<T>(spec, cap)?;
    let b = type2_basis(c);
    let t = TruncSeries::var(cap);
    let coef = [&t, &cs.g13, &cs.g23];
    Ok(std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let base = if i == 0 && j == 0 { T::one() } else { T::zero() };
            let mut s = TruncSeries::constant(cap, base);
            for (k, bk) in b.iter().enumerate() {
                s = &s + &coef[k].scale(bk.get(i, j));
            }
            s
        })
    }))
}

fn det3_series<T: Scalar>(m: &[[TruncSeries<T>; 3]; 3], abs: bool) -> TruncSeries<T> {
    const PERMS: [([usize; 3], bool); 6] = [
        ([0, 1, 2], true),
        ([1, 2, 0], true),
        ([2, 0, 1], true),
        ([0, 2, 1], false),
        ([2, 1, 0], false),
        ([1, 0, 2], false),
    ];
    let cap = m[0][0].cap();
    let mut acc = TruncSeries::zero(cap);
    for (p, even) in PERMS {
        let e = |i: usize| if abs { m[i][p[i]].abs() } else { m[i][p[i]].clone() };
        let prod = &(&e(0) * &e(1)) * &e(2);
        acc = if even || abs { &acc + &prod } else { &acc - &prod };
    }
    acc
}

/// Determinant series of `G(t)` and a companion series of the same shape
/// holding the coefficientwise magnitudes of all expansion terms, which
/// serves as the scale for relative comparisons.
pub fn det_series<T: Scalar>(spec: &PlaneSpec, cap: usize) -> Result<(TruncSeries<T>, TruncSeries<T>)> {
    if cap < 11 {
        return Err(Error::InvalidArgument("determinant expansion needs cap >= 11".into()));
    }
    let m = curve_matrix_series::<T>(spec, cap)?;
    Ok((det3_series(&m, false), det3_series(&m, true)))
}

/// Expected `G(t)/(1−2t)` for the moment instance, in `s`, through degree 7.
fn moment_pattern(i: usize, j: usize) -> [f64; 8] {
    let (i, j) = if i >= j { (i, j) } else { (j, i) };
    let mut c = [0.0; 8];
    match (i, j) {
        (0, 0) => c[0] = 1.0,
        (1, 0) => c[1] = 1.0,
        (1, 1) => {
            c[2] = 1.0;
            c[6] = -1.0 / 8.0;
        }
        (2, 0) => {
            c[2] = -0.5;
            c[6] = 1.0 / 16.0;
        }
        (2, 1) => {
            c[3] = -0.5;
            c[7] = 3.0 / 16.0;
        }
        _ => {}
    }
    c
}

/// Max deviation of `G(t)/(1−2t)` for `c = (1,0,0,1,0)`, rewritten in
/// `s = t/(1−2t)`, from the perturbed moment-curve pattern through degree 7.
pub fn moment_curve_check<T: Scalar>(cap: usize) -> Result<T> {
    let cap = cap.max(7);
    let spec = PlaneSpec::type2([1.0, 0.0, 0.0, 1.0, 0.0]);
    let m = curve_matrix_series::<T>(&spec, cap)?;
    let s = TruncSeries::<T>::var(cap);
    let two = T::lit(2.0);
    let one = TruncSeries::constant(cap, T::one());
    let w = &one - &s.scale(two);
    // t = s/(1 + 2s) inverts s = t/(1 − 2t)
    let t_of_s = s.div(&(&one + &s.scale(two)))?;
    let mut worst = T::zero();
    for i in 0..3 {
        for j in 0..3 {
            let e = m[i][j].div(&w)?.compose(&t_of_s)?;
            let want = TruncSeries::from_coeffs(cap, &moment_pattern(i, j).map(T::lit));
            worst = worst.max(e.max_diff(&want, 0, 7));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planes::random_type2;
    use crate::scalar::Dd;
    use crate::slowcurve::SlowCurve;
    use num_traits::Float;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type S = TruncSeries<f64>;

    #[test]
    fn geometric_series() {
        let one = S::constant(12, 1.0);
        let g = one.div(&(&one - &S::var(12))).unwrap();
        assert!(g.coeffs().iter().all(|&c| c == 1.0));
        let s = S::var(12).div(&(&one - &S::var(12))).unwrap();
        assert_eq!(s.coeff(0), 0.0);
        assert!(s.coeffs()[1..].iter().all(|&c| c == 1.0));
    }

    #[test]
    fn division_errors() {
        assert_eq!(S::var(5).recip().unwrap_err(), Error::SeriesNotInvertible);
        assert_eq!(S::var(5).compose(&S::constant(5, 1.0)).unwrap_err(), Error::SeriesInnerConstant);
        assert_eq!(S::var(5).div(&S::constant(6, 1.0)).unwrap_err(), Error::SeriesCapMismatch(5, 6));
    }

    #[test]
    fn compose_inverts_the_mobius_map() {
        let one = S::constant(10, 1.0);
        let s = S::var(10);
        let t_of_s = s.div(&(&one + &s.scale(2.0))).unwrap();
        let s_of_t = s.div(&(&one - &s.scale(2.0))).unwrap();
        let id = s_of_t.compose(&t_of_s).unwrap();
        assert!(id.max_diff(&s, 0, 10) < 1e-12);
    }

    #[test]
    fn eval_matches_rational_function() {
        let one = S::constant(12, 1.0);
        let f = one.div(&(&one - &S::var(12).scale(2.0))).unwrap();
        let t = 1e-3;
        assert!((f.eval(t) - 1.0 / (1.0 - 2.0 * t)).abs() < 1e-16);
    }

    #[test]
    fn moment_instance_expansion() {
        let cs = expand_curve::<f64>(&PlaneSpec::type2([1.0, 0.0, 0.0, 1.0, 0.0]), 12).unwrap();
        assert!((cs.w.coeff(0) - 1.0).abs() < 1e-15 && (cs.w.coeff(1) + 2.0).abs() < 1e-15);
        assert!(cs.w.coeffs()[2..].iter().all(|c| c.abs() < 1e-14));
        // t²/(2(1−2t)) − t⁶/(16(1−2t)⁵)
        let want = [0.0, 0.0, 0.5, 1.0, 2.0, 4.0, 8.0 - 1.0 / 16.0];
        assert!(cs.g13.max_diff(&S::from_coeffs(12, &want), 0, 6) < 1e-13);
    }

    #[test]
    fn generic_leading_coefficient() {
        let cs = expand_curve::<f64>(&PlaneSpec::type2([0.3, -0.7, 0.5, 1.2, -0.4]), 12).unwrap();
        assert!((cs.g13.coeff(2) - 1.0 / 2.4).abs() < 1e-15);
        assert_eq!(cs.g13.coeff(0), 0.0);
    }

    #[test]
    fn series_agree_with_pointwise_curve() {
        let spec = PlaneSpec::type2([0.3, -0.7, 0.5, 1.2, -0.4]);
        let cs = expand_curve::<Dd>(&spec, 12).unwrap();
        let sc = SlowCurve::<Dd>::new(&spec).unwrap();
        let t = Dd::lit(1e-3);
        let p = sc.point(t).unwrap();
        for (s, v) in [(&cs.w, p.w), (&cs.g13, p.g13), (&cs.g23, p.g23)] {
            let rel = ((s.eval(t) - v) / v).abs().to_f64_lossy();
            assert!(rel < 1e-12, "{rel}");
        }
    }

    #[test]
    fn w_recursion_through_degree_five() {
        assert_eq!(check_lemma64::<f64>(&PlaneSpec::type2([1.0, 0.0, 0.0, 1.0, 0.0]), 12).unwrap(), 0.0);
        let spec = PlaneSpec::type2([0.3, -0.7, 0.5, 1.2, -0.4]);
        assert!(check_lemma64::<f64>(&spec, 12).unwrap() <= 1e-10);
        // degree 6 differs, which is why it is not compared
        let cs = expand_curve::<f64>(&spec, 12).unwrap();
        let rhs6 = 2.0 * -0.7 * cs.g13.coeff(6) - 2.0 * 0.5 * cs.g23.coeff(6);
        assert!((cs.w.coeff(6) - rhs6).abs() > 1e-6);
    }

    #[test]
    fn determinant_leading_term() {
        let (d, _) = det_series::<f64>(&PlaneSpec::type2([1.0, 0.0, 0.0, 1.0, 0.0]), 12).unwrap();
        assert!((d.coeff(10) - 0.03125).abs() < 1e-12);
        assert!((d.coeff(11) - 7.0 / 16.0).abs() < 1e-10);
        let (d, _) = det_series::<f64>(&PlaneSpec::type2([0.0, 0.0, 0.0, 2.0, 0.0]), 12).unwrap();
        assert!((d.coeff(10) - 4.8828125e-4).abs() < 1e-15);
        assert!(det_series::<f64>(&PlaneSpec::type2([1.0, 0.0, 0.0, 1.0, 0.0]), 10).is_err());
    }

    #[test]
    fn determinant_low_coefficients_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let spec = random_type2(&mut rng);
            let (d, mag) = det_series::<f64>(&spec, 12).unwrap();
            for k in 0..10 {
                assert!(d.coeff(k).abs() <= 1e-10 * mag.coeff(k), "{k}: {:e}", d.coeff(k));
            }
            let want = 1.0 / (32.0 * spec.c[3].powi(6));
            assert!((d.coeff(10) - want).abs() <= 1e-8 * want);
        }
    }

    #[test]
    fn moment_curve_pattern() {
        assert!(moment_curve_check::<f64>(8).unwrap() <= 1e-10);
    }
}
