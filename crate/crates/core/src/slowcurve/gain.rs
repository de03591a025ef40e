//! The 2×2 gain matrix that maps a transverse deviation from the slowest
//! curve to the deviation after one AP step.

use crate::error::{Error, Result};
use crate::planes::{type2_basis, PlaneSpec};
use crate::scalar::Scalar;
use crate::symcore::{orthogonalize, AffineSubspace, SymMat};

#[derive(Clone, Debug, PartialEq)]
pub struct PerturbGain<T> {
    pub r: [[T; 2]; 2],
    pub spectral_norm: T,
}

fn strip_first<T: Scalar>(c: &SymMat<T>) -> SymMat<T> {
    let mut out = c.clone();
    for j in 0..3 {
        out.set(0, j, T::zero());
    }
    out
}

/// Gain matrix in the Gram–Schmidt basis of `B1, B2, B3`. The rotation
/// `diag(1, P̃)` leaves every entry unchanged, so the unrotated basis is used.
pub fn perturb_gain<T: Scalar>(spec: &PlaneSpec) -> Result<PerturbGain<T>> {
    let c = spec.type2_params()?;
    if c[3] == 0.0 {
        return Err(Error::InvalidSpec("the gain matrix needs c4 != 0".into()));
    }
    let e = AffineSubspace::new(SymMat::unit(3, 0, 0), type2_basis(c.map(T::lit)).to_vec())?;
    let e = orthogonalize(&e)?;
    let (c2, c3) = (&e.basis()[1], &e.basis()[2]);
    let (t2, t3) = (strip_first(c2), strip_first(c3));
    let (n2, n3) = (c2.dot(c2), c3.dot(c3));
    let off = -t2.dot(&t3) / (n2 * n3).sqrt();
    let r = [[T::one() - t2.dot(&t2) / n2, off], [off, T::one() - t3.dot(&t3) / n3]];
    Ok(PerturbGain { spectral_norm: sym2_norm(&r), r })
}

/// Spectral norm of a symmetric 2×2 matrix.
fn sym2_norm<T: Scalar>(r: &[[T; 2]; 2]) -> T {
    let half = T::lit(0.5);
    let mean = (r[0][0] + r[1][1]) * half;
    let rad = ((r[0][0] - r[1][1]) * half).hypot(r[0][1]);
    (mean + rad).abs().max((mean - rad).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planes::random_type2;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn moment_instance_contracts() {
        let g = perturb_gain::<f64>(&PlaneSpec::type2([1.0, 0.0, 0.0, 1.0, 0.0])).unwrap();
        assert!(g.spectral_norm < 1.0);
        assert_eq!(g.r[0][1], g.r[1][0]);
    }

    #[test]
    fn random_specs_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let g = perturb_gain::<f64>(&random_type2(&mut rng)).unwrap();
            assert!(g.spectral_norm < 1.0, "{g:?}");
        }
    }

    #[test]
    fn norm_of_diagonal() {
        assert_eq!(sym2_norm(&[[0.5, 0.0], [0.0, -0.75]]), 0.75);
    }

    #[test]
    fn rejects_c4_zero() {
        assert!(perturb_gain::<f64>(&PlaneSpec::type2([1.0, 0.0, 0.0, 0.0, 0.0])).is_err());
    }
}
