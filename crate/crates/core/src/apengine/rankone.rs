//! Rank-one chart `ψ(x) = x xᵀ / x1` of the determinantal ridge near
//! `diag(1,0,0)`, and the linear relation between consecutive coefficients
//! when the PSD projection lands on it. Indices are 0-based.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::symcore::{clip_eig as clip, eig_sym, project_affine, AffineSubspace, SymMat};

pub type Mat3<T> = [[T; 3]; 3];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankOneParam<T> {
    x: [T; 3],
}

impl<T: Scalar> RankOneParam<T> {
    pub fn new(x: [T; 3]) -> Result<Self> {
        if x[0].is_zero() {
            return Err(Error::ZeroFirstCoordinate);
        }
        Ok(RankOneParam { x })
    }

    pub fn x(&self) -> [T; 3] {
        self.x
    }

    /// Chart point for a rank-one PSD matrix `λ u uᵀ`: `x = λ u1 u`.
    pub fn from_rank_one(lambda: T, u: &[T]) -> Result<Self> {
        let floor = T::lit(1e-8);
        if u[0].abs() < floor {
            return Err(Error::SmallLeadingComponent { value: u[0].to_f64_lossy() });
        }
        let s = lambda * u[0];
        Self::new([s * u[0], s * u[1], s * u[2]])
    }
}

pub fn psi<T: Scalar>(x: &RankOneParam<T>) -> SymMat<T> {
    let [x1, ..] = x.x;
    SymMat::outer(&x.x).scale(T::one() / x1)
}

/// Analytic partial derivative of `ψ` in coordinate `k` (0-based).
pub fn psi_partial<T: Scalar>(x: &RankOneParam<T>, k: usize) -> SymMat<T> {
    assert!(k < 3, "rank-one chart has three coordinates");
    let x1 = x.x[0];
    let inv = T::one() / x1;
    let inv2 = inv * inv;
    SymMat::from_fn(3, |i, j| {
        let mut v = T::zero();
        if i == k {
            v += x.x[j] * inv;
        }
        if j == k {
            v += x.x[i] * inv;
        }
        if k == 0 {
            v -= x.x[i] * x.x[j] * inv2;
        }
        v
    })
}

fn check_plane<T: Scalar>(e: &AffineSubspace<T>) -> Result<()> {
    if e.n() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: e.n() });
    }
    if e.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: e.dim() });
    }
    Ok(())
}

/// `M(x)_{k,i} = ⟨∂_k ψ(x), B_i⟩`.
pub fn m_matrix<T: Scalar>(e: &AffineSubspace<T>, x: &RankOneParam<T>) -> Result<Mat3<T>> {
    check_plane(e)?;
    let mut m = [[T::zero(); 3]; 3];
    for (k, row) in m.iter_mut().enumerate() {
        let dk = psi_partial(x, k);
        for (i, b) in e.basis().iter().enumerate() {
            row[i] = dk.dot(b);
        }
    }
    Ok(m)
}

/// Gradient of `½ d²(ψ(x), E)`; component `k` is `⟨ψ − P_E ψ, ∂_k ψ⟩`.
pub fn grad_half_dist2_psi<T: Scalar>(
    e: &AffineSubspace<T>,
    x: &RankOneParam<T>,
) -> Result<[T; 3]> {
    let y = psi(x);
    let (py, _) = project_affine(e, &y)?;
    let r = &y - &py;
    Ok([0, 1, 2].map(|k| r.dot(&psi_partial(x, k))))
}

/// `‖M(x)(p̃ − p) + ∇ ½d²(ψ(x), E)‖` for the direct AP step `p → p̃`,
/// with `x` read off the rank-one PSD projection of `φ(p)`.
pub fn thm41_residual<T: Scalar>(e: &AffineSubspace<T>, p: &[T]) -> Result<T> {
    check_plane(e)?;
    let d = eig_sym(&e.point(p))?;
    let (v, rank) = clip(&d);
    if rank != 1 {
        return Err(Error::RankNotOne { rank });
    }
    let x = RankOneParam::from_rank_one(d.values[0], &d.vectors[0])?;
    let pt = e.coords(&v)?;
    let m = m_matrix(e, &x)?;
    let g = grad_half_dist2_psi(e, &x)?;
    let mut acc = T::zero();
    for k in 0..3 {
        let mut r = g[k];
        for i in 0..3 {
            r += m[k][i] * (pt[i] - p[i]);
        }
        acc += r * r;
    }
    Ok(acc.sqrt())
}

/// Solves a 3×3 system by Gaussian elimination with partial pivoting.
pub fn solve3<T: Scalar>(a: &Mat3<T>, b: &[T; 3]) -> Result<[T; 3]> {
    let mut m = *a;
    let mut r = *b;
    let scale = m.iter().flatten().fold(T::zero(), |s, v| s.max(v.abs()));
    let floor = T::scaled_tol(1e-14) * scale;
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        if !(m[piv][col].abs() > floor) {
            return Err(Error::SingularJacobian);
        }
        m.swap(col, piv);
        r.swap(col, piv);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for c in col..3 {
                let v = m[col][c];
                m[row][c] -= f * v;
            }
            let v = r[col];
            r[row] -= f * v;
        }
    }
    let mut x = [T::zero(); 3];
    for i in (0..3).rev() {
        let mut s = r[i];
        for c in i + 1..3 {
            s -= m[i][c] * x[c];
        }
        x[i] = s / m[i][i];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::dist2_affine;

    fn ex44() -> AffineSubspace<f64> {
        let b1 = SymMat::from_rows(&[vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0; 3]]);
        let b2 = SymMat::from_rows(&[
            vec![0.0, 0.0, -1.0],
            vec![0.0, 2.0, 0.0],
            vec![-1.0, 0.0, 0.0],
        ]);
        let b3 = SymMat::from_rows(&[
            vec![-2.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.0],
        ]);
        AffineSubspace::new(SymMat::unit(3, 0, 0), vec![b1.unwrap(), b2.unwrap(), b3.unwrap()])
            .unwrap()
    }

    #[test]
    fn chart_basics() {
        let x = RankOneParam::new([1.0, 0.0, 0.0]).unwrap();
        assert_eq!(psi(&x), SymMat::unit(3, 0, 0));
        let x = RankOneParam::new([2.0, 0.0, 0.0]).unwrap();
        assert_eq!(psi(&x), SymMat::unit(3, 0, 0).scale(2.0));
        assert_eq!(psi_partial(&x, 0), SymMat::unit(3, 0, 0));
        assert_eq!(RankOneParam::new([0.0, 1.0, 0.0]).unwrap_err(), Error::ZeroFirstCoordinate);
    }

    #[test]
    fn chart_identity() {
        let x = RankOneParam::new([0.7, -0.3, 0.2]).unwrap();
        let lhs = psi(&x).scale(0.7);
        assert!((&lhs - &SymMat::outer(&x.x())).max_abs() < 1e-16);
    }

    #[test]
    fn partials_match_differences() {
        let x0 = [1.3, 0.4, -0.9];
        let h = 1e-5;
        for k in 0..3 {
            let mut xp = x0;
            let mut xm = x0;
            xp[k] += h;
            xm[k] -= h;
            let fd = (&psi(&RankOneParam::new(xp).unwrap()) - &psi(&RankOneParam::new(xm).unwrap()))
                .scale(0.5 / h);
            let an = psi_partial(&RankOneParam::new(x0).unwrap(), k);
            assert!((&fd - &an).norm() < 1e-8);
        }
    }

    #[test]
    fn m_is_invertible_at_the_intersection_point() {
        let e = ex44();
        let m = m_matrix(&e, &RankOneParam::new([1.0, 0.0, 0.0]).unwrap()).unwrap();
        assert!(solve3(&m, &[1.0, 2.0, 3.0]).is_ok());
    }

    #[test]
    fn gradient_vanishes_on_e_and_matches_differences() {
        let e = ex44();
        let g = grad_half_dist2_psi(&e, &RankOneParam::new([1.0, 0.0, 0.0]).unwrap()).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-15));

        let x0 = [1.1, 0.2, -0.15];
        let g = grad_half_dist2_psi(&e, &RankOneParam::new(x0).unwrap()).unwrap();
        let h = 1e-6;
        for k in 0..3 {
            let mut xp = x0;
            let mut xm = x0;
            xp[k] += h;
            xm[k] -= h;
            let f = |x: [f64; 3]| 0.5 * dist2_affine(&e, &psi(&RankOneParam::new(x).unwrap())).unwrap();
            let fd = (f(xp) - f(xm)) / (2.0 * h);
            assert!((fd - g[k]).abs() < 1e-8);
        }
    }

    #[test]
    fn residual_zero_at_anchor() {
        let e = ex44();
        assert!(thm41_residual(&e, &[0.0, 0.0, 0.0]).unwrap() < 1e-15);
    }

    #[test]
    fn solve3_round_trip() {
        let a = [[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]];
        let x: [f64; 3] = solve3(&a, &[3.0, 5.0, 5.0]).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
        assert!(solve3(&[[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 0.0, 1.0]], &[1.0; 3]).is_err());
    }
}
