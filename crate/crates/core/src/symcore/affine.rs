use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::SymMat;

/// Affine set `anchor + span{B_i}` inside `S^n`.
///
/// The basis need not be orthogonal; projections go through a Cholesky
/// factorization of the Gram matrix. An orthonormal basis of the orthogonal
/// complement is kept alongside for distance computations.
#[derive(Clone, Debug)]
pub struct AffineSubspace<T> {
    anchor: SymMat<T>,
    basis: Vec<SymMat<T>>,
    gram: Vec<Vec<T>>,
    chol: Vec<Vec<T>>,
    complement: Vec<SymMat<T>>,
}

impl<T: Scalar> AffineSubspace<T> {
    pub fn new(anchor: SymMat<T>, basis: Vec<SymMat<T>>) -> Result<Self> {
        let n = anchor.n();
        if basis.is_empty() {
            return Err(Error::InvalidArgument("affine subspace needs a basis".into()));
        }
        for b in &basis {
            if b.n() != n {
                return Err(Error::DimensionMismatch { expected: n, found: b.n() });
            }
        }
        let gram: Vec<Vec<T>> =
            basis.iter().map(|bi| basis.iter().map(|bj| bi.dot(bj)).collect()).collect();
        let chol = cholesky(&gram)?;
        let complement = complement_basis(&basis)?;
        Ok(AffineSubspace { anchor, basis, gram, chol, complement })
    }

    pub fn n(&self) -> usize {
        self.anchor.n()
    }

    /// Number of basis elements.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn anchor(&self) -> &SymMat<T> {
        &self.anchor
    }

    pub fn basis(&self) -> &[SymMat<T>] {
        &self.basis
    }

    pub fn gram(&self) -> &[Vec<T>] {
        &self.gram
    }

    /// Orthonormal basis of the complement of `span{B_i}`.
    pub fn complement(&self) -> &[SymMat<T>] {
        &self.complement
    }

    /// `φ(p) = anchor + Σ p_i B_i`.
    pub fn point(&self, p: &[T]) -> SymMat<T> {
        assert_eq!(p.len(), self.dim(), "coefficient count");
        let mut x = self.anchor.clone();
        for (pi, b) in p.iter().zip(&self.basis) {
            x.axpy(*pi, b);
        }
        x
    }

    fn check_dim(&self, x: &SymMat<T>) -> Result<()> {
        if x.n() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: x.n() });
        }
        Ok(())
    }

    /// Coefficients of the orthogonal projection of `x`.
    pub fn coords(&self, x: &SymMat<T>) -> Result<Vec<T>> {
        self.check_dim(x)?;
        let r = x - &self.anchor;
        let rhs: Vec<T> = self.basis.iter().map(|b| b.dot(&r)).collect();
        Ok(chol_solve(&self.chol, &rhs))
    }

    /// Same affine set with every matrix replaced by `P · M · Pᵀ`.
    pub fn conjugate(&self, p: &[Vec<T>]) -> Result<Self> {
        Self::new(self.anchor.conjugate(p), self.basis.iter().map(|b| b.conjugate(p)).collect())
    }

    pub fn cast<U: Scalar>(&self) -> Result<AffineSubspace<U>> {
        AffineSubspace::new(self.anchor.cast(), self.basis.iter().map(|b| b.cast()).collect())
    }

    /// True when the basis is pairwise orthogonal up to `tol` (relative).
    pub fn is_orthogonal(&self, tol: T) -> bool {
        let m = self.dim();
        (0..m).all(|i| {
            (i + 1..m).all(|j| {
                self.gram[i][j].abs() <= tol * (self.gram[i][i] * self.gram[j][j]).sqrt()
            })
        })
    }
}

/// Orthogonal projection onto `E`, with the coefficients of the result.
pub fn project_affine<T: Scalar>(
    e: &AffineSubspace<T>,
    x: &SymMat<T>,
) -> Result<(SymMat<T>, Vec<T>)> {
    let s = e.coords(x)?;
    Ok((e.point(&s), s))
}

/// Squared distance from `x` to `E`, summed over the complement basis.
pub fn dist2_affine<T: Scalar>(e: &AffineSubspace<T>, x: &SymMat<T>) -> Result<T> {
    e.check_dim(x)?;
    let r = x - &e.anchor;
    Ok(e.complement.iter().fold(T::zero(), |acc, c| {
        let d = c.dot(&r);
        acc + d * d
    }))
}

/// Gram–Schmidt on the basis in order. The first element is kept as is and
/// the results are not normalized.
pub fn orthogonalize<T: Scalar>(e: &AffineSubspace<T>) -> Result<AffineSubspace<T>> {
    let mut out: Vec<SymMat<T>> = Vec::with_capacity(e.dim());
    let floor = T::scaled_tol(1e-20);
    for b in &e.basis {
        let mut c = b.clone();
        // two passes keep the result orthogonal to working precision
        for _ in 0..2 {
            for q in &out {
                let coef = q.dot(&c) / q.dot(q);
                c.axpy(-coef, q);
            }
        }
        if c.dot(&c) <= floor * b.dot(b) {
            return Err(Error::DependentBasis);
        }
        out.push(c);
    }
    AffineSubspace::new(e.anchor.clone(), out)
}

fn cholesky<T: Scalar>(a: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let m = a.len();
    let scale = (0..m).fold(T::zero(), |s, i| s.max(a[i][i]));
    let floor = T::scaled_tol(1e-13) * scale;
    let mut l = vec![vec![T::zero(); m]; m];
    for j in 0..m {
        let mut d = a[j][j];
        for k in 0..j {
            d -= l[j][k] * l[j][k];
        }
        if !(d > floor) {
            return Err(Error::DependentBasis);
        }
        let d = d.sqrt();
        l[j][j] = d;
        for i in j + 1..m {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            l[i][j] = s / d;
        }
    }
    Ok(l)
}

fn chol_solve<T: Scalar>(l: &[Vec<T>], b: &[T]) -> Vec<T> {
    let m = b.len();
    let mut y = b.to_vec();
    for i in 0..m {
        for k in 0..i {
            let lik = l[i][k];
            y[i] = y[i] - lik * y[k];
        }
        y[i] /= l[i][i];
    }
    for i in (0..m).rev() {
        for k in i + 1..m {
            let lki = l[k][i];
            y[i] = y[i] - lki * y[k];
        }
        y[i] /= l[i][i];
    }
    y
}

/// Orthonormal standard basis of `S^n`: `E_ii`, then `(E_ij + E_ji)/√2`.
pub fn standard_basis<T: Scalar>(n: usize) -> Vec<SymMat<T>> {
    let r = T::one() / T::lit(2.0).sqrt();
    let mut out: Vec<SymMat<T>> = (0..n).map(|i| SymMat::unit(n, i, i)).collect();
    for i in 0..n {
        for j in i + 1..n {
            out.push(SymMat::unit(n, i, j).scale(r));
        }
    }
    out
}

/// Pivoted Gram–Schmidt of the standard basis against `span{B_i}`: each
/// round adds the candidate with the largest residual.
fn complement_basis<T: Scalar>(basis: &[SymMat<T>]) -> Result<Vec<SymMat<T>>> {
    let n = basis[0].n();
    let total = n * (n + 1) / 2;
    let mut q: Vec<SymMat<T>> = Vec::with_capacity(total);
    let push_orthonormal = |q: &mut Vec<SymMat<T>>, v: &SymMat<T>| -> T {
        let mut r = v.clone();
        for _ in 0..2 {
            for u in q.iter() {
                let c = u.dot(&r);
                r.axpy(-c, u);
            }
        }
        let nr = r.norm();
        if nr > T::zero() {
            q.push(r.scale(T::one() / nr));
        }
        nr
    };
    for b in basis {
        let nb = b.norm();
        let nr = push_orthonormal(&mut q, b);
        if !(nr > T::scaled_tol(1e-10) * nb) {
            return Err(Error::DependentBasis);
        }
    }
    let m = q.len();
    let mut candidates = standard_basis::<T>(n);
    let drop = T::lit(1e-10);
    while q.len() < total {
        let mut best: Option<(usize, SymMat<T>, T)> = None;
        for (idx, e) in candidates.iter().enumerate() {
            let mut r = e.clone();
            for _ in 0..2 {
                for u in &q {
                    let c = u.dot(&r);
                    r.axpy(-c, u);
                }
            }
            let nr = r.norm();
            if best.as_ref().is_none_or(|(_, _, b)| nr > *b) {
                best = Some((idx, r, nr));
            }
        }
        let (idx, r, nr) = best.ok_or(Error::DependentBasis)?;
        if nr <= drop {
            return Err(Error::DependentBasis);
        }
        q.push(r.scale(T::one() / nr));
        candidates.swap_remove(idx);
    }
    Ok(q.split_off(m))
}
