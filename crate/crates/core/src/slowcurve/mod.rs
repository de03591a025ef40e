//! The rational slowest curve `G(t)` of a Type-2 plane with `c4 ≠ 0`, its
//! closed-form PSD projection and AP image, and the order-of-contact checks
//! that compare them with the numerical projections.

mod gain;
mod newton;
mod tube;

pub use gain::{perturb_gain, PerturbGain};
pub use newton::{newton_slowest_point, SlowestPoint};
pub use tube::{tube_check, TubeReport};

use crate::error::{Error, Result};
use crate::planes::{build_plane, type2_basis, PlaneSpec};
use crate::scalar::Scalar;
use crate::symcore::{orthogonalize, AffineSubspace, SymMat};

/// One point of the curve together with the intermediate quantities.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint<T> {
    pub t: T,
    pub w: T,
    pub g13: T,
    pub g23: T,
    /// `G(t) = U_* + t B1 + g13 B2 + g23 B3` (rotated with the plane).
    pub g: SymMat<T>,
    pub h: T,
}

/// Smallest admissible value of a normalized denominator inside the valid range.
const DENOM_MARGIN: f64 = 0.1;
/// Upper end of the bisection for the valid range.
const T_CAP: f64 = 0.2;

#[derive(Clone, Debug)]
pub struct SlowCurve<T> {
    spec: PlaneSpec,
    c: [T; 5],
    /// `‖B1‖²`, `⟨B2,B1⟩`, `⟨B3,B1⟩` of the unrotated basis.
    n1: T,
    b21: T,
    b31: T,
    rot: Vec<Vec<T>>,
    plane: AffineSubspace<T>,
    constraints: [SymMat<T>; 3],
}

/// Normalized nested denominators of `w` (each is 1 at `t = 0`).
struct Denoms<T> {
    inner: [T; 2],
    outer: [T; 2],
}

impl<T: Scalar> SlowCurve<T> {
    pub fn new(spec: &PlaneSpec) -> Result<Self> {
        let raw = spec.type2_params()?;
        if raw[3] == 0.0 {
            return Err(Error::InvalidSpec("the slowest curve needs c4 != 0".into()));
        }
        let c = raw.map(T::lit);
        let [b1, b2, b3] = type2_basis(c);
        let built = build_plane::<T>(spec)?;
        Ok(SlowCurve {
            spec: spec.clone(),
            c,
            n1: b1.dot(&b1),
            b21: b2.dot(&b1),
            b31: b3.dot(&b1),
            rot: spec.rotation(),
            plane: built.plane,
            constraints: built.constraints,
        })
    }

    pub fn spec(&self) -> &PlaneSpec {
        &self.spec
    }

    pub fn plane(&self) -> &AffineSubspace<T> {
        &self.plane
    }

    pub fn constraints(&self) -> &[SymMat<T>; 3] {
        &self.constraints
    }

    pub fn params(&self) -> [T; 5] {
        self.c
    }

    /// `(‖B1‖², ⟨B2,B1⟩, ⟨B3,B1⟩)`.
    pub fn b1_products(&self) -> (T, T, T) {
        (self.n1, self.b21, self.b31)
    }

    fn parts(&self, t: T) -> (T, T, Denoms<T>) {
        let [c1, c2, c3, c4, c5] = self.c;
        let two = T::lit(2.0);
        let a = T::one() - two * c1 * t;
        let t2 = t * t;
        let t3 = t2 * t;
        let d1 = c4 * a + c5 * t;
        let inner = a + c2 * t2 / d1 + c3 * t3 / c4;
        let d2 = c4 * inner + c5 * t;
        let b = a + c2 * t2 / c4;
        let d3 = c4 * b + c5 * t;
        let w = a + c2 * t2 / d2 + c3 * t3 / (d3 * b);
        (w, a, Denoms { inner: [d1 / c4, b], outer: [d2 / c4, d3 / c4] })
    }

    /// The nested rational function `w(t)`.
    pub fn w(&self, t: T) -> Result<T> {
        let (w, _, d) = self.parts(t);
        let floor = T::lit(1e-12);
        if d.inner.iter().chain(&d.outer).any(|v| !(v.abs() > floor)) || !w.is_finite() {
            return Err(Error::VanishingDenominator { t: t.to_f64_lossy() });
        }
        Ok(w)
    }

    pub fn point(&self, t: T) -> Result<CurvePoint<T>> {
        let w = self.w(t)?;
        let [_, _, _, c4, c5] = self.c;
        let (one, two) = (T::one(), T::lit(2.0));
        let dd = two * c4 * w + two * c5 * t;
        if !((dd / (two * c4)).abs() > T::lit(1e-12)) || !(w.abs() > T::lit(1e-12)) {
            return Err(Error::VanishingDenominator { t: t.to_f64_lossy() });
        }
        let t6 = t.powi(6);
        let t7 = t6 * t;
        let d4 = dd.powi(4);
        let gt = t * t / dd - two * (two * c5 * c5 + one) * t6 / (d4 * dd);
        let r0 = self.r0();
        let r13 = c5 / c4 * r0 * t7 + self.b21 * t7 / (T::lit(16.0) * c4.powi(6) * self.n1);
        let r23 = -two * c5 * t6 / (d4 * w) + r0 * t7;
        let g13 = gt + r13;
        let g23 = -gt * t / w + r23;
        let h = two * t6 / (d4 * w);
        Ok(CurvePoint { t, w, g13, g23, g: self.plane.point(&[t, g13, g23]), h })
    }

    fn r0(&self) -> T {
        let [_, _, _, c4, c5] = self.c;
        let eight = T::lit(8.0);
        (c4 * self.b31 + c5 * self.b21) / (eight * c4.powi(5) * self.n1) + T::one() / (eight * c4.powi(3))
    }

    /// The correction matrix added to `G(t)` by the rank-one projection,
    /// in the unrotated frame.
    pub fn projection_correction(&self, pt: &CurvePoint<T>) -> SymMat<T> {
        let [_, _, _, c4, c5] = self.c;
        let t7 = pt.t.powi(7);
        let eight = T::lit(8.0);
        let q = self.b21 * t7 / (eight * c4.powi(5) * self.n1);
        let mut m = SymMat::zeros(3);
        m.set(1, 0, -t7 / (eight * c4.powi(4)));
        m.set(1, 1, pt.h - q);
        m.set(2, 0, c4 * pt.h);
        m.set(2, 1, c5 * pt.h - c5 * q - self.b31 * t7 / (eight * c4.powi(4) * self.n1));
        m.set(2, 2, pt.g13 * pt.g13 / pt.w);
        m
    }

    /// Closed form of `P_psd(G(t))` through degree 7.
    pub fn psd_projection_formula(&self, t: T) -> Result<SymMat<T>> {
        let pt = self.point(t)?;
        Ok(&pt.g + &self.projection_correction(&pt).conjugate(&self.rot))
    }

    /// Parameter of the next curve point after one AP step, through degree 7.
    pub fn shift(&self, t: T) -> T {
        let c4 = self.c[3];
        t - t.powi(7) / (T::lit(4.0) * c4.powi(4) * self.n1)
    }

    /// Closed form of `P_E(P_psd(G(t)))` through degree 7.
    pub fn ap_image_formula(&self, t: T) -> Result<SymMat<T>> {
        Ok(self.point(self.shift(t))?.g)
    }

    /// `w − (1 − 2c1 t + 2c2 g13 − 2c3 g23)`, which vanishes to sixth order.
    pub fn w_recursion_residual(&self, t: T) -> Result<T> {
        let pt = self.point(t)?;
        let [c1, c2, c3, _, _] = self.c;
        let two = T::lit(2.0);
        Ok(pt.w - (T::one() - two * c1 * t + two * c2 * pt.g13 - two * c3 * pt.g23))
    }

    /// Whether `t` lies in the range where the formulas are evaluated:
    /// every normalized denominator above 0.1 and `det G(t) > 0`.
    pub fn in_valid_range(&self, t: T) -> bool {
        let margin = T::lit(DENOM_MARGIN);
        let (w, _, d) = self.parts(t);
        let [_, _, _, c4, c5] = self.c;
        let two = T::lit(2.0);
        let dd = (two * c4 * w + two * c5 * t) / (two * c4);
        let ok = d.inner.iter().chain(&d.outer).chain([&w, &dd]).all(|&v| v > margin);
        if !ok {
            return false;
        }
        if t <= T::zero() {
            return true;
        }
        self.point(t).map(|p| det3(&p.g) > T::zero()).unwrap_or(false)
    }

    /// Largest `t ≤ 0.2` such that `(0, t]` stays in the valid range, found
    /// on a grid of 200 cells and refined by bisection.
    pub fn t_max(&self) -> T {
        let cap = T::lit(T_CAP);
        let cells = 200;
        let step = cap / T::from_usize(cells);
        let mut good = T::zero();
        for k in 1..=cells {
            let t = step * T::from_usize(k);
            if !self.in_valid_range(t) {
                let mut bad = t;
                for _ in 0..60 {
                    let mid = (good + bad) * T::lit(0.5);
                    if self.in_valid_range(mid) {
                        good = mid;
                    } else {
                        bad = mid;
                    }
                }
                return good;
            }
            good = t;
        }
        cap
    }

    /// Initial guess for the rank-one chart point on the curve at `t`.
    pub fn newton_guess(&self, t: T) -> [T; 3] {
        let [c1, _, _, c4, _] = self.c;
        let two = T::lit(2.0);
        [T::one() - two * c1 * t, t, -t * t / (two * c4)]
    }

    /// The plane with its Gram–Schmidt basis `C1 = B1, C2, C3`.
    pub fn orthogonal_plane(&self) -> Result<AffineSubspace<T>> {
        orthogonalize(&self.plane)
    }

    /// Slowest-curve point from the Newton solver, as a matrix. The chart
    /// slice `x2 = t` is taken in the unrotated frame and the result rotated.
    pub fn newton_point(&self, t: T) -> Result<SymMat<T>> {
        let e0 = AffineSubspace::new(SymMat::unit(3, 0, 0), type2_basis(self.c).to_vec())?;
        let e0 = orthogonalize(&e0)?;
        let sp = newton_slowest_point(&e0, t, Some(self.newton_guess(t)))?;
        Ok(e0.point(&sp.p).conjugate(&self.rot))
    }
}

/// Determinant of a 3×3 symmetric matrix.
pub fn det3<T: Scalar>(m: &SymMat<T>) -> T {
    let g = |i, j| m.get(i, j);
    g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1)) - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
        + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0))
}

/// Mean halving order of a scalar discrepancy. `diff(t)` returns the size
/// of the discrepancy and the magnitude it is measured against.
pub fn halving_order<T: Scalar>(
    mut diff: impl FnMut(T) -> Result<(T, T)>,
    t0: T,
    halvings: usize,
) -> Result<T> {
    if !(t0 > T::zero()) {
        return Err(Error::InvalidArgument("t0 must be positive".into()));
    }
    if halvings < 2 {
        return Err(Error::InvalidArgument("at least two halvings are needed".into()));
    }
    let floor = T::lit(100.0 * T::UNIT_ROUNDOFF);
    let half = T::lit(0.5);
    let mut t = t0;
    let mut ds = Vec::with_capacity(halvings + 1);
    for _ in 0..=halvings {
        let (d, scale) = diff(t)?;
        if !(d > floor * scale.max(T::one())) {
            return Err(Error::BelowPrecision { t: t.to_f64_lossy(), diff: d.to_f64_lossy() });
        }
        ds.push(d);
        t *= half;
    }
    let ln2 = T::lit(2.0).ln();
    let sum = ds.windows(2).fold(T::zero(), |s, w| s + (w[0] / w[1]).ln() / ln2);
    Ok(sum / T::from_usize(halvings))
}

/// Mean of `log₂(‖(f−g)(t_j)‖ / ‖(f−g)(t_{j+1})‖)` over `t_j = t0/2^j`,
/// i.e. the vanishing order of `f − g` at zero.
pub fn residual_order<T: Scalar>(
    mut f: impl FnMut(T) -> Result<SymMat<T>>,
    mut g: impl FnMut(T) -> Result<SymMat<T>>,
    t0: T,
    halvings: usize,
) -> Result<T> {
    halving_order(
        |t| {
            let a = f(t)?;
            let b = g(t)?;
            Ok(((&a - &b).norm(), a.norm()))
        },
        t0,
        halvings,
    )
}
