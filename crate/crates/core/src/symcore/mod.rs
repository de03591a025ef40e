//! Symmetric-matrix linear algebra: Frobenius geometry, eigendecomposition,
//! and the two projections the AP method alternates between.

mod affine;
mod eig;
mod mat;
mod text;

pub use affine::{dist2_affine, orthogonalize, project_affine, standard_basis, AffineSubspace};
pub use eig::{eig_sym, EigDecomp, MAX_SWEEPS};
pub use mat::{cast_scalar, frob_inner, SymMat};
pub use text::{format_matrix, parse_matrices};
pub(crate) use self::clip as clip_eig;

use crate::error::Result;
use crate::scalar::Scalar;

/// Relative rank tolerance used by [`project_psd`], rescaled per backend.
pub fn rank_tol<T: Scalar>() -> T {
    T::scaled_tol(1e-12)
}

/// Projection onto the PSD cone by spectral clipping. Returns the projection
/// and the number of eigenvalues kept (those above `τ = tol·max(1, λ_max)`).
pub fn project_psd<T: Scalar>(a: &SymMat<T>) -> Result<(SymMat<T>, usize)> {
    let e = eig_sym(a)?;
    Ok(clip(&e))
}

pub(crate) fn clip<T: Scalar>(e: &EigDecomp<T>) -> (SymMat<T>, usize) {
    let lmax = e.values.first().copied().unwrap_or_else(T::zero);
    let tau = rank_tol::<T>() * lmax.max(T::one());
    let rank = e.values.iter().filter(|&&l| l > tau).count();
    (e.assemble(|_, l| l > tau), rank)
}
