//! Empirical check that AP iterates started near the slowest curve stay in
//! a thin tube around it while the curve parameter decreases by `c t⁷`.

use super::SlowCurve;
use crate::apengine::ap_step;
use crate::error::{Error, Result};
use crate::planes::PlaneSpec;
use crate::scalar::Scalar;
use crate::symcore::{AffineSubspace, SymMat};

/// Number of leading steps used to fit the bracket constant `K`.
const FIT_STEPS: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct TubeReport<T> {
    pub passed: bool,
    pub steps: usize,
    /// Largest `‖β_k C2 + γ_k C3‖_F` seen.
    pub max_transverse: T,
    /// Bracket constant fitted on the first steps (twice the largest
    /// `|t̃ − (t − c t⁷)| / t⁸` observed there).
    pub k_fit: T,
    /// Largest observed `(t̃ − (t − c t⁷)) / t⁸` in absolute value.
    pub max_bracket: T,
    pub final_t: T,
    /// First step where a condition failed.
    pub first_failure: Option<usize>,
}

struct Chart<'a, T> {
    sc: &'a SlowCurve<T>,
    e: &'a AffineSubspace<T>,
}

impl<T: Scalar> Chart<'_, T> {
    /// Coefficients in the orthogonal basis.
    fn coords(&self, x: &SymMat<T>) -> [T; 3] {
        let d = x - self.e.anchor();
        let b = self.e.basis();
        [0, 1, 2].map(|i| d.dot(&b[i]) / b[i].dot(&b[i]))
    }

    fn p1(&self, tau: T) -> Result<T> {
        Ok(self.coords(&self.sc.point(tau)?.g)[0])
    }

    /// Solves `p1(τ) = target` starting from `tau`.
    fn invert(&self, target: T, mut tau: T) -> Option<T> {
        let u = T::lit(T::UNIT_ROUNDOFF);
        let h0 = T::lit(T::UNIT_ROUNDOFF.cbrt());
        let mut last = T::infinity();
        for _ in 0..50 {
            let f = self.p1(tau).ok()? - target;
            last = f.abs();
            let h = h0 * tau.abs().max(T::lit(1e-3));
            let df = (self.p1(tau + h).ok()? - self.p1(tau - h).ok()?) / (h + h);
            if !(df.abs() > T::zero()) {
                return None;
            }
            let step = f / df;
            tau -= step;
            if !tau.is_finite() {
                return None;
            }
            if step.abs() <= T::lit(64.0) * u * tau.abs() {
                return Some(tau);
            }
        }
        // rounding noise in p1 can keep the last digits moving
        (last <= T::lit(1e3) * u * target.abs()).then_some(tau)
    }
}

/// Runs `steps` AP iterations from `G(t0) + β t0⁷ C2 + γ t0⁷ C3` and checks
/// after each one that the transverse part stays below `eps` and that the
/// recovered parameter `t̃` decreases within `t − c t⁷ ± K t⁸`.
pub fn tube_check<T: Scalar>(
    spec: &PlaneSpec,
    t0: T,
    beta: T,
    gamma: T,
    steps: usize,
    eps: T,
) -> Result<TubeReport<T>> {
    let sc = SlowCurve::<T>::new(spec)?;
    let e = sc.orthogonal_plane()?;
    let chart = Chart { sc: &sc, e: &e };
    let (n2, n3) = (e.basis()[1].dot(&e.basis()[1]), e.basis()[2].dot(&e.basis()[2]));
    let transverse = |b: T, g: T| (b * b * n2 + g * g * n3).sqrt();
    if !(transverse(beta, gamma) < eps) {
        return Err(Error::InvalidArgument("start lies outside the tube".into()));
    }
    if t0.is_zero() {
        let z = T::zero();
        return Ok(TubeReport {
            passed: true,
            steps,
            max_transverse: z,
            k_fit: z,
            max_bracket: z,
            final_t: z,
            first_failure: None,
        });
    }
    let (n1, _, _) = sc.b1_products();
    let c = T::one() / (T::lit(4.0) * sc.params()[3].powi(4) * n1);

    let t7 = t0.powi(7);
    let mut u = sc.point(t0)?.g;
    u.axpy(beta * t7, &e.basis()[1]);
    u.axpy(gamma * t7, &e.basis()[2]);

    let mut t = t0;
    let mut ks = Vec::with_capacity(steps);
    let mut max_transverse = transverse(beta, gamma);
    let mut first_failure = None;
    for k in 1..=steps {
        u = ap_step(&e, &u)?.0;
        let q = chart.coords(&u);
        let tau = chart.invert(q[0], t).ok_or(Error::LeftChart(k))?;
        let on = chart.coords(&sc.point(tau)?.g);
        let t7 = tau.powi(7);
        let tr = transverse((q[1] - on[1]) / t7, (q[2] - on[2]) / t7);
        max_transverse = max_transverse.max(tr);
        ks.push((tau - (t - c * t.powi(7))) / t.powi(8));
        if first_failure.is_none() && !(tr < eps && tau < t && tau > T::zero()) {
            first_failure = Some(k);
        }
        t = tau;
    }

    let two = T::lit(2.0);
    let k_fit = two * ks.iter().take(FIT_STEPS).fold(T::zero(), |m, v| m.max(v.abs()));
    let max_bracket = ks.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if first_failure.is_none() {
        first_failure = ks.iter().position(|v| v.abs() > k_fit).map(|i| i + 1);
    }
    Ok(TubeReport {
        passed: first_failure.is_none(),
        steps,
        max_transverse,
        k_fit,
        max_bracket,
        final_t: t,
        first_failure,
    })
}
