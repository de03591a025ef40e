//! Newton solver for the point of the rank-one ridge whose AP step moves
//! only along the first basis direction.

use crate::apengine::{grad_half_dist2_psi, m_matrix, psi, solve3, RankOneParam};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::symcore::AffineSubspace;

const MAX_ITER: usize = 50;

#[derive(Clone, Debug, PartialEq)]
pub struct SlowestPoint<T> {
    /// Rank-one chart point with `x[1] = t`.
    pub x: [T; 3],
    /// Coefficients of the matching point of `E` in the given basis.
    pub p: Vec<T>,
    pub iterations: usize,
    pub residual: T,
}

/// `F(x) = M(x)⁻¹ ∇ ½ d²(ψ(x), E)`.
fn f_map<T: Scalar>(e: &AffineSubspace<T>, x: [T; 3]) -> Result<[T; 3]> {
    let x = RankOneParam::new(x)?;
    let m = m_matrix(e, &x)?;
    let g = grad_half_dist2_psi(e, &x)?;
    solve3(&m, &g)
}

fn residual<T: Scalar>(e: &AffineSubspace<T>, t: T, z: [T; 2]) -> Result<[T; 2]> {
    let f = f_map(e, [z[0], t, z[1]])?;
    Ok([f[1], f[2]])
}

fn size<T: Scalar>(r: &[T; 2]) -> T {
    r[0].abs().max(r[1].abs())
}

/// Solves `F(x)_2 = F(x)_3 = 0` for `(x1, x3)` with `x2 = t` fixed, by
/// damped Newton with a central-difference Jacobian.
///
/// `e` must have a pairwise orthogonal basis. Without a guess the search
/// starts at `(1, t, 0)`.
pub fn newton_slowest_point<T: Scalar>(
    e: &AffineSubspace<T>,
    t: T,
    guess: Option<[T; 3]>,
) -> Result<SlowestPoint<T>> {
    if !e.is_orthogonal(T::scaled_tol(1e-12)) {
        return Err(Error::NotOrthogonal);
    }
    let g = guess.unwrap_or([T::one(), t, T::zero()]);
    let mut z = [g[0], g[2]];
    let tol = T::scaled_tol(1e-12);
    let h0 = T::lit(T::UNIT_ROUNDOFF.cbrt());
    let half = T::lit(0.5);

    let mut r = residual(e, t, z)?;
    let mut iterations = 0;
    while size(&r) > tol {
        if iterations == MAX_ITER {
            return Err(Error::NewtonFailed { iterations, residual: size(&r).to_f64_lossy() });
        }
        iterations += 1;
        let mut jac = [[T::zero(); 2]; 2];
        for j in 0..2 {
            let h = h0 * z[j].abs().max(T::one());
            let (mut zp, mut zm) = (z, z);
            zp[j] += h;
            zm[j] -= h;
            let (rp, rm) = (residual(e, t, zp)?, residual(e, t, zm)?);
            for i in 0..2 {
                jac[i][j] = (rp[i] - rm[i]) / (h + h);
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        let scale = jac.iter().flatten().fold(T::zero(), |s, v| s.max(v.abs()));
        if !(det.abs() > T::scaled_tol(1e-14) * scale * scale) {
            return Err(Error::SingularJacobian);
        }
        let step = [
            (jac[1][1] * r[0] - jac[0][1] * r[1]) / det,
            (jac[0][0] * r[1] - jac[1][0] * r[0]) / det,
        ];
        // halve the step until the residual decreases
        let mut lambda = T::one();
        let mut accepted = None;
        for _ in 0..30 {
            let zn = [z[0] - lambda * step[0], z[1] - lambda * step[1]];
            if let Ok(rn) = residual(e, t, zn) {
                if size(&rn) < size(&r) {
                    accepted = Some((zn, rn));
                    break;
                }
            }
            lambda *= half;
        }
        match accepted {
            Some((zn, rn)) => {
                z = zn;
                r = rn;
            }
            None => {
                return Err(Error::NewtonFailed { iterations, residual: size(&r).to_f64_lossy() })
            }
        }
    }

    let x = [z[0], t, z[1]];
    let fx = f_map(e, x)?;
    let d = &psi(&RankOneParam::new(x)?) - e.anchor();
    let p = e
        .basis()
        .iter()
        .zip(fx)
        .map(|(b, fi)| d.dot(b) / b.dot(b) + fi)
        .collect();
    Ok(SlowestPoint { x, p, iterations, residual: size(&r) })
}
