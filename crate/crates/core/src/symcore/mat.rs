use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense real symmetric matrix. Only the upper triangle is stored, so
/// symmetry holds by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMat<T> {
    n: usize,
    data: Vec<T>,
}

#[inline]
fn packed_len(n: usize) -> usize {
    n * (n + 1) / 2
}

impl<T: Scalar> SymMat<T> {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "SymMat needs n >= 1");
        SymMat { n, data: vec![T::zero(); packed_len(n)] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    /// Builds from a closure evaluated on the upper triangle (i <= j).
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Reads the upper triangle of a square row array; the lower part is ignored.
    pub fn from_upper(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidArgument("empty matrix".into()));
        }
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: r.len() });
            }
        }
        Ok(Self::from_fn(n, |i, j| rows[i][j]))
    }

    /// Like [`from_upper`](Self::from_upper) but rejects asymmetric input.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let m = Self::from_upper(rows)?;
        let scale = rows.iter().flatten().fold(T::one(), |a, x| a.max(x.abs()));
        let tol = T::scaled_tol(1e-12) * scale;
        for i in 0..m.n {
            for j in 0..i {
                if (rows[i][j] - rows[j][i]).abs() > tol {
                    return Err(Error::InvalidArgument(format!(
                        "entry ({i},{j}) breaks symmetry"
                    )));
                }
            }
        }
        Ok(m)
    }

    /// Symmetric unit `E_ij + E_ji` (or `E_ii` on the diagonal).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n);
        m.set(i, j, T::one());
        m
    }

    /// Rank-one matrix `v vᵀ`.
    pub fn outer(v: &[T]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j])
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[self.offset(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let k = self.offset(i, j);
        self.data[k] = v;
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        assert!(j < self.n, "index ({i},{j}) out of range for n={}", self.n);
        // rows 0..i hold n + (n-1) + ... + (n-i+1) entries
        i * self.n - i * i.saturating_sub(1) / 2 + (j - i)
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j)).collect()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn trace(&self) -> T {
        (0..self.n).fold(T::zero(), |s, i| s + self.get(i, i))
    }

    /// Frobenius inner product without the dimension check.
    pub fn dot(&self, other: &Self) -> T {
        debug_assert_eq!(self.n, other.n);
        let mut diag = T::zero();
        let mut off = T::zero();
        for i in 0..self.n {
            diag += self.get(i, i) * other.get(i, i);
            for j in i + 1..self.n {
                off += self.get(i, j) * other.get(i, j);
            }
        }
        diag + off + off
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn scale(&self, s: T) -> Self {
        SymMat { n: self.n, data: self.data.iter().map(|&x| x * s).collect() }
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: T, x: &Self) {
        assert_eq!(self.n, x.n);
        for (d, &v) in self.data.iter_mut().zip(&x.data) {
            *d += a * v;
        }
    }

    /// `P · self · Pᵀ` for a dense square `P` given by rows.
    pub fn conjugate(&self, p: &[Vec<T>]) -> Self {
        let n = self.n;
        assert_eq!(p.len(), n);
        // tmp = P · A
        let mut tmp = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = T::zero();
                for k in 0..n {
                    s += p[i][k] * self.get(k, j);
                }
                tmp[i][j] = s;
            }
        }
        Self::from_fn(n, |i, j| {
            let mut s = T::zero();
            for k in 0..n {
                s += tmp[i][k] * p[j][k];
            }
            s
        })
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| (0..self.n).fold(T::zero(), |s, j| s + self.get(i, j) * v[j]))
            .collect()
    }

    /// Converts between scalar backends (exact when widening).
    pub fn cast<U: Scalar>(&self) -> SymMat<U> {
        SymMat { n: self.n, data: self.data.iter().map(|x| cast_scalar(*x)).collect() }
    }
}

/// Converts one scalar to another backend.
pub fn cast_scalar<T: Scalar, U: Scalar>(x: T) -> U {
    let (hi, lo) = x.to_parts();
    U::from_parts(hi, lo)
}

/// Frobenius inner product `tr(Aᵀ B)`.
pub fn frob_inner<T: Scalar>(a: &SymMat<T>, b: &SymMat<T>) -> Result<T> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch { expected: a.n, found: b.n });
    }
    Ok(a.dot(b))
}

impl<T: Scalar> Add for &SymMat<T> {
    type Output = SymMat<T>;
    fn add(self, rhs: Self) -> SymMat<T> {
        assert_eq!(self.n, rhs.n);
        SymMat { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect() }
    }
}

impl<T: Scalar> Sub for &SymMat<T> {
    type Output = SymMat<T>;
    fn sub(self, rhs: Self) -> SymMat<T> {
        assert_eq!(self.n, rhs.n);
        SymMat { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect() }
    }
}

impl<T: Scalar> Add for SymMat<T> {
    type Output = SymMat<T>;
    fn add(self, rhs: Self) -> SymMat<T> {
        &self + &rhs
    }
}

impl<T: Scalar> Sub for SymMat<T> {
    type Output = SymMat<T>;
    fn sub(self, rhs: Self) -> SymMat<T> {
        &self - &rhs
    }
}

impl<T: Scalar> AddAssign<&SymMat<T>> for SymMat<T> {
    fn add_assign(&mut self, rhs: &SymMat<T>) {
        self.axpy(T::one(), rhs);
    }
}

impl<T: Scalar> SubAssign<&SymMat<T>> for SymMat<T> {
    fn sub_assign(&mut self, rhs: &SymMat<T>) {
        self.axpy(-T::one(), rhs);
    }
}

impl<T: Scalar> Neg for &SymMat<T> {
    type Output = SymMat<T>;
    fn neg(self) -> SymMat<T> {
        self.scale(-T::one())
    }
}

impl<T: Scalar> Mul<T> for &SymMat<T> {
    type Output = SymMat<T>;
    fn mul(self, s: T) -> SymMat<T> {
        self.scale(s)
    }
}

impl<T: Scalar> Mul<T> for SymMat<T> {
    type Output = SymMat<T>;
    fn mul(self, s: T) -> SymMat<T> {
        self.scale(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_indexing_covers_every_slot_once() {
        for n in 1..7 {
            let m = SymMat::<f64>::zeros(n);
            let mut seen = vec![false; packed_len(n)];
            for i in 0..n {
                for j in i..n {
                    let k = m.offset(i, j);
                    assert!(!seen[k]);
                    seen[k] = true;
                    assert_eq!(k, m.offset(j, i));
                }
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn identity_inner_is_dimension() {
        let i3 = SymMat::<f64>::identity(3);
        assert_eq!(frob_inner(&i3, &i3).unwrap(), 3.0);
    }

    #[test]
    fn off_diagonal_counts_twice() {
        let e = SymMat::<f64>::unit(3, 0, 1);
        assert_eq!(e.dot(&e), 2.0);
        assert_eq!(e.get(1, 0), 1.0);
    }

    #[test]
    fn mismatched_dimensions_rejected() {
        let a = SymMat::<f64>::identity(2);
        let b = SymMat::<f64>::identity(3);
        assert!(matches!(frob_inner(&a, &b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn asymmetric_rows_rejected() {
        let rows = vec![vec![1.0, 2.0], vec![3.0, 1.0]];
        assert!(SymMat::<f64>::from_rows(&rows).is_err());
        assert_eq!(SymMat::<f64>::from_upper(&rows).unwrap().get(1, 0), 2.0);
    }

    #[test]
    fn conjugation_by_permutation() {
        let a = SymMat::<f64>::from_rows(&[
            vec![1.0, 2.0, 0.0],
            vec![2.0, 3.0, 4.0],
            vec![0.0, 4.0, 5.0],
        ])
        .unwrap();
        let p = vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]];
        let b = a.conjugate(&p);
        assert_eq!(b.get(0, 0), 3.0);
        assert_eq!(b.get(0, 2), 4.0);
        assert_eq!(b.get(1, 2), 0.0);
    }
}
