//! Eigenvalue form of one AP step: on an orthogonal basis the step moves
//! each coefficient against the gradient of the negative-eigenvalue energy
//! `½ Σ_{λ<0} λ²`, scaled by `1/‖B_i‖²`. The gradient is taken here by
//! central differences so it can be checked against the direct step.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::symcore::{eig_sym, rank_tol, AffineSubspace};

/// Negative-eigenvalue energy and the number of eigenvalues counted.
pub fn negative_energy<T: Scalar>(e: &AffineSubspace<T>, p: &[T]) -> Result<(T, usize)> {
    let d = eig_sym(&e.point(p))?;
    let lmax = d.values.first().copied().unwrap_or_else(T::zero);
    let tau = rank_tol::<T>() * lmax.abs().max(T::one());
    let half = T::lit(0.5);
    let mut energy = T::zero();
    let mut count = 0;
    for &l in &d.values {
        if l < -tau {
            energy += half * l * l;
            count += 1;
        }
    }
    Ok((energy, count))
}

/// Central-difference version of the eigenvalue formula with step `h`.
///
/// Fails with [`Error::EigenvalueCrossing`] when the negative set differs at
/// any stencil point.
pub fn eig_formula_step<T: Scalar>(e_orth: &AffineSubspace<T>, p: &[T], h: T) -> Result<Vec<T>> {
    if !(h > T::zero()) {
        return Err(Error::InvalidArgument("finite-difference step must be positive".into()));
    }
    if !e_orth.is_orthogonal(T::scaled_tol(1e-12)) {
        return Err(Error::NotOrthogonal);
    }
    let (_, n0) = negative_energy(e_orth, p)?;
    if n0 == 0 {
        // already PSD: the projection is the identity
        return Ok(p.to_vec());
    }
    let two = T::lit(2.0);
    let mut out = p.to_vec();
    let mut q = p.to_vec();
    for i in 0..p.len() {
        q[i] = p[i] + h;
        let (ep, np) = negative_energy(e_orth, &q)?;
        q[i] = p[i] - h;
        let (em, nm) = negative_energy(e_orth, &q)?;
        q[i] = p[i];
        if np != n0 || nm != n0 {
            return Err(Error::EigenvalueCrossing);
        }
        out[i] = p[i] - (ep - em) / (two * h) / e_orth.gram()[i][i];
    }
    Ok(out)
}

/// Retries [`eig_formula_step`] with halved steps (at most 10 times) and
/// combines two clean steps by Richardson extrapolation.
pub fn eig_formula_step_adaptive<T: Scalar>(
    e_orth: &AffineSubspace<T>,
    p: &[T],
    h0: T,
) -> Result<Vec<T>> {
    let half = T::lit(0.5);
    let mut h = h0;
    for _ in 0..=10 {
        match eig_formula_step(e_orth, p, h) {
            Ok(coarse) => {
                return match eig_formula_step(e_orth, p, h * half) {
                    Ok(fine) => {
                        let three = T::lit(3.0);
                        Ok(coarse
                            .iter()
                            .zip(&fine)
                            .map(|(&c, &f)| f + (f - c) / three)
                            .collect())
                    }
                    Err(Error::EigenvalueCrossing) => Ok(coarse),
                    Err(err) => Err(err),
                };
            }
            Err(Error::EigenvalueCrossing) => h *= half,
            Err(err) => return Err(err),
        }
    }
    Err(Error::EigenvalueCrossing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apengine::ap_step_coeffs;
    use crate::symcore::SymMat;

    fn ex32() -> AffineSubspace<f64> {
        let b = SymMat::from_rows(&[
            vec![0.0, 0.0, -1.0],
            vec![0.0, 2.0, 0.0],
            vec![-1.0, 0.0, 0.0],
        ])
        .unwrap();
        AffineSubspace::new(SymMat::unit(3, 0, 0), vec![b]).unwrap()
    }

    #[test]
    fn psd_point_is_unchanged() {
        let e = ex32();
        // p = 0 is the anchor itself
        assert_eq!(eig_formula_step(&e, &[0.0], 1e-5).unwrap(), vec![0.0]);
    }

    #[test]
    fn matches_direct_step_on_the_line() {
        let e = ex32();
        let t = 0.01;
        let fd = eig_formula_step(&e, &[t], 1e-5).unwrap()[0];
        let (direct, _) = ap_step_coeffs(&e, &[t]).unwrap();
        assert!((fd - direct[0]).abs() < 1e-9);
        assert!((fd - (t - t * t * t / 3.0)).abs() < 1e-7);
    }

    #[test]
    fn crossing_detected_and_recovered() {
        // φ(p) = diag(1 + p2, p1): the eigenvalue p1 = -1e-6 turns positive at +h
        let e = AffineSubspace::new(
            SymMat::unit(2, 0, 0),
            vec![SymMat::unit(2, 1, 1), SymMat::unit(2, 0, 0)],
        )
        .unwrap();
        let p = [-1e-6, 0.0];
        assert_eq!(eig_formula_step(&e, &p, 1e-5).unwrap_err(), Error::EigenvalueCrossing);
        let q: Vec<f64> = eig_formula_step_adaptive(&e, &p, 1e-5).unwrap();
        assert!(q[0].abs() < 1e-12 && q[1].abs() < 1e-12);
    }

    #[test]
    fn non_orthogonal_rejected() {
        let b1 = SymMat::unit(3, 0, 1);
        let b2 = &SymMat::unit(3, 0, 1) + &SymMat::unit(3, 1, 1);
        let e = AffineSubspace::new(SymMat::unit(3, 0, 0), vec![b1, b2]).unwrap();
        assert_eq!(eig_formula_step(&e, &[0.1, 0.1], 1e-5).unwrap_err(), Error::NotOrthogonal);
    }
}
