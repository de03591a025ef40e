use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::SymMat;

pub const MAX_SWEEPS: usize = 100;

/// Eigenvalues sorted descending with matching orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct EigDecomp<T> {
    pub values: Vec<T>,
    /// `vectors[l]` pairs with `values[l]`.
    pub vectors: Vec<Vec<T>>,
}

impl<T: Scalar> EigDecomp<T> {
    /// `Σ λ_l v_l v_lᵀ` over the selected indices.
    pub fn assemble(&self, keep: impl Fn(usize, T) -> bool) -> SymMat<T> {
        let n = self.values.len();
        let mut out = SymMat::zeros(n);
        for (l, (&lam, v)) in self.values.iter().zip(&self.vectors).enumerate() {
            if keep(l, lam) {
                out.axpy(lam, &SymMat::outer(v));
            }
        }
        out
    }
}

/// Cyclic Jacobi eigensolver.
///
/// Sweeps continue until every off-diagonal entry is exactly zero. Rotations
/// only mix off-diagonal entries among themselves, so they shrink
/// quadratically and underflow after a few extra sweeps; the payoff is that
/// eigenvector components far below `ε·‖A‖` survive, which the slow
/// sublinear AP runs depend on.
pub fn eig_sym<T: Scalar>(a: &SymMat<T>) -> Result<EigDecomp<T>> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.n();
    let mut m = a.to_rows();
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    let two = T::lit(2.0);
    let big = T::lit(1.0 / T::UNIT_ROUNDOFF.sqrt());

    let mut converged = n == 1;
    for _ in 0..MAX_SWEEPS {
        if (0..n).all(|p| (p + 1..n).all(|q| m[p][q].is_zero())) {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p][q];
                if apq.is_zero() {
                    continue;
                }
                let diff = m[q][q] - m[p][p];
                // tangent of the rotation angle, smaller root
                let t = if diff.abs() > apq.abs() * big {
                    apq / diff
                } else {
                    let theta = diff / (two * apq);
                    let t = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    if theta < T::zero() {
                        -t
                    } else {
                        t
                    }
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                let tau = s / (T::one() + c);
                m[p][p] -= t * apq;
                m[q][q] += t * apq;
                m[p][q] = T::zero();
                m[q][p] = T::zero();
                for r in 0..n {
                    if r != p && r != q {
                        let g = m[r][p];
                        let h = m[r][q];
                        let gp = g - s * (h + g * tau);
                        let hq = h + s * (g - h * tau);
                        m[r][p] = gp;
                        m[p][r] = gp;
                        m[r][q] = hq;
                        m[q][r] = hq;
                    }
                    let g = v[r][p];
                    let h = v[r][q];
                    v[r][p] = g - s * (h + g * tau);
                    v[r][q] = h + s * (g - h * tau);
                }
            }
        }
    }
    if !converged && !(0..n).all(|p| (p + 1..n).all(|q| m[p][q].is_zero())) {
        return Err(Error::EigenNoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j][j].partial_cmp(&m[i][i]).expect("finite eigenvalues"));
    let sign_floor = T::lit(1e-8);
    let values = order.iter().map(|&i| m[i][i]).collect();
    let vectors = order
        .iter()
        .map(|&col| {
            let mut x: Vec<T> = (0..n).map(|r| v[r][col]).collect();
            // deterministic sign: first clearly nonzero component positive
            if let Some(&lead) = x.iter().find(|c| c.abs() > sign_floor) {
                if lead < T::zero() {
                    x.iter_mut().for_each(|c| *c = -*c);
                }
            }
            x
        })
        .collect();
    Ok(EigDecomp { values, vectors })
}
