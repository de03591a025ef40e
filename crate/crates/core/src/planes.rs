//! The two families of 3-planes in `S³` that touch the PSD cone only at
//! `U_* = diag(1,0,0)`, their singularity degree, and Plücker coordinates.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::symcore::{eig_sym, AffineSubspace, SymMat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaneKind {
    Type1,
    Type2,
}

/// Parameter record. Type 1 uses `c1..c8` and `mu`; Type 2 uses `c1..c5`.
/// `theta` and `reflect` define the 2×2 orthogonal block acting on the
/// last two coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneSpec {
    pub kind: PlaneKind,
    pub c: Vec<f64>,
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub reflect: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
}

impl PlaneSpec {
    pub fn type2(c: [f64; 5]) -> Self {
        PlaneSpec { kind: PlaneKind::Type2, c: c.to_vec(), theta: 0.0, reflect: false, mu: None }
    }

    pub fn type1(c: [f64; 8], mu: f64) -> Self {
        PlaneSpec { kind: PlaneKind::Type1, c: c.to_vec(), theta: 0.0, reflect: false, mu: Some(mu) }
    }

    pub fn rotated(mut self, theta: f64, reflect: bool) -> Self {
        self.theta = theta;
        self.reflect = reflect;
        self
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: PlaneSpec = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if !self.theta.is_finite() || self.c.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec("non-finite parameter".into()));
        }
        match self.kind {
            PlaneKind::Type2 => {
                if self.c.len() != 5 {
                    return Err(Error::InvalidSpec(format!(
                        "type2 needs 5 parameters, got {}",
                        self.c.len()
                    )));
                }
            }
            PlaneKind::Type1 => {
                if self.c.len() != 8 {
                    return Err(Error::InvalidSpec(format!(
                        "type1 needs 8 parameters, got {}",
                        self.c.len()
                    )));
                }
                match self.mu {
                    Some(mu) if mu > 0.0 && mu.is_finite() => {}
                    _ => return Err(Error::InvalidSpec("type1 needs mu > 0".into())),
                }
                if self.c[4..].iter().all(|&v| v == 0.0) {
                    return Err(Error::InvalidSpec("A2 must be nonzero".into()));
                }
            }
        }
        Ok(())
    }

    /// Type-2 parameters `c1..c5` (0-based array).
    pub fn type2_params(&self) -> Result<[f64; 5]> {
        if self.kind != PlaneKind::Type2 || self.c.len() != 5 {
            return Err(Error::WrongKind);
        }
        Ok([self.c[0], self.c[1], self.c[2], self.c[3], self.c[4]])
    }

    /// The rotation `P = diag(1, P̃)`, orthogonal to working precision.
    pub fn rotation<T: Scalar>(&self) -> Vec<Vec<T>> {
        let (c, s) = (T::lit(self.theta.cos()), T::lit(self.theta.sin()));
        // renormalize so P is orthogonal in the wider backends too
        let r = (c * c + s * s).sqrt();
        let (c, s) = (c / r, s / r);
        let (o, z) = (T::one(), T::zero());
        if self.reflect {
            vec![vec![o, z, z], vec![z, c, s], vec![z, s, -c]]
        } else {
            vec![vec![o, z, z], vec![z, c, -s], vec![z, s, c]]
        }
    }
}

fn sym3<T: Scalar>(rows: [[f64; 3]; 3]) -> SymMat<T> {
    SymMat::from_fn(3, |i, j| T::lit(rows[i][j]))
}

/// Constraint matrices `A1, A2, A3` before the rotation.
fn raw_constraints<T: Scalar>(spec: &PlaneSpec) -> [SymMat<T>; 3] {
    let c = &spec.c;
    match spec.kind {
        PlaneKind::Type1 => [
            sym3([[1.0, c[0], c[1]], [c[0], c[2], c[3]], [c[1], c[3], 0.0]]),
            sym3([[0.0, c[4], c[5]], [c[4], c[6], c[7]], [c[5], c[7], 0.0]]),
            sym3([[0.0, 0.0, 0.0], [0.0, spec.mu.unwrap_or(1.0), 0.0], [0.0, 0.0, 1.0]]),
        ],
        PlaneKind::Type2 => [
            sym3([[1.0, c[0], c[1]], [c[0], 0.0, c[2]], [c[1], c[2], 0.0]]),
            sym3([[0.0, 0.0, c[3]], [0.0, 1.0, c[4]], [c[3], c[4], 0.0]]),
            sym3([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]]),
        ],
    }
}

/// The explicit Type-2 basis `B1, B2, B3` (unrotated), built in `T` directly.
pub fn type2_basis<T: Scalar>(c: [T; 5]) -> [SymMat<T>; 3] {
    let [c1, c2, c3, c4, c5] = c;
    let (o, z, two) = (T::one(), T::zero(), T::lit(2.0));
    let m = |r: [[T; 3]; 3]| SymMat::from_fn(3, |i, j| r[i][j]);
    [
        m([[-two * c1, o, z], [o, z, z], [z, z, z]]),
        m([[two * c2, z, -o], [z, two * c4, z], [-o, z, z]]),
        m([[-two * c3, z, z], [z, -two * c5, o], [z, o, z]]),
    ]
}

/// A built plane with its defining constraints `⟨A_i, X⟩ = (1, 0, 0)_i`.
#[derive(Clone, Debug)]
pub struct BuiltPlane<T> {
    pub plane: AffineSubspace<T>,
    pub constraints: [SymMat<T>; 3],
}

pub fn build_plane<T: Scalar>(spec: &PlaneSpec) -> Result<BuiltPlane<T>> {
    spec.validate()?;
    let p = spec.rotation::<T>();
    let anchor = SymMat::<T>::unit(3, 0, 0);
    let raw = raw_constraints::<T>(spec);
    let basis0: Vec<SymMat<T>> = match spec.kind {
        PlaneKind::Type2 => type2_basis(spec.type2_params()?.map(T::lit)).to_vec(),
        PlaneKind::Type1 => {
            // E − U_* is the orthogonal complement of span{A_i}
            let aux = AffineSubspace::new(anchor.clone(), raw.to_vec())?;
            aux.complement().to_vec()
        }
    };
    let basis = basis0.iter().map(|b| b.conjugate(&p)).collect();
    let constraints = raw.map(|a| a.conjugate(&p));
    Ok(BuiltPlane { plane: AffineSubspace::new(anchor.conjugate(&p), basis)?, constraints })
}

/// Singularity degree by classification: only Type 2 with `c4 ≠ 0` needs two
/// facial-reduction steps.
pub fn singularity_degree(spec: &PlaneSpec) -> u32 {
    match spec.kind {
        PlaneKind::Type2 if spec.c.get(3).is_some_and(|&c4| c4 != 0.0) => 2,
        _ => 1,
    }
}

/// Coordinates of a matrix in the orthonormal basis
/// `E11, E22, E33, (E12+E21)/√2, (E13+E31)/√2, (E23+E32)/√2`.
pub fn s3_coords<T: Scalar>(b: &SymMat<T>) -> [T; 6] {
    let r2 = T::lit(2.0).sqrt();
    [b.get(0, 0), b.get(1, 1), b.get(2, 2), r2 * b.get(0, 1), r2 * b.get(0, 2), r2 * b.get(1, 2)]
}

/// Index triples `(i1 < i2 < i3)` in lexicographic order, 0-based.
pub fn plucker_index() -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity(20);
    for a in 0..6 {
        for b in a + 1..6 {
            for c in b + 1..6 {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// All twenty 3×3 minors of the 3×6 coordinate matrix of the basis.
pub fn plucker_coords<T: Scalar>(e: &AffineSubspace<T>) -> Result<[T; 20]> {
    if e.n() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: e.n() });
    }
    if e.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: e.dim() });
    }
    let rows: Vec<[T; 6]> = e.basis().iter().map(s3_coords).collect();
    let mut out = [T::zero(); 20];
    for (slot, [a, b, c]) in out.iter_mut().zip(plucker_index()) {
        let m = |r: usize, col: usize| rows[r][col];
        *slot = m(0, a) * (m(1, b) * m(2, c) - m(1, c) * m(2, b))
            - m(0, b) * (m(1, a) * m(2, c) - m(1, c) * m(2, a))
            + m(0, c) * (m(1, a) * m(2, b) - m(1, b) * m(2, a));
    }
    Ok(out)
}

/// `p_{abc}` for an arbitrary triple, antisymmetric in its indices.
fn plucker_at<T: Scalar>(coords: &[T; 20], idx: [usize; 3]) -> T {
    let mut v = idx;
    let mut sign = T::one();
    for (a, b) in [(0, 1), (1, 2), (0, 1)] {
        if v[a] > v[b] {
            v.swap(a, b);
            sign = -sign;
        }
    }
    if v[0] == v[1] || v[1] == v[2] {
        return T::zero();
    }
    let pos = plucker_index().iter().position(|t| *t == v).expect("valid triple");
    sign * coords[pos]
}

/// Grassmann–Plücker quadratic relations
/// `Σ_k (−1)^k p_{i1 i2 j_k} p_{j1..ĵ_k..j4} = 0` over all pairs `i` and
/// quadruples `j`.
pub fn plucker_relations<T: Scalar>(coords: &[T; 20]) -> Vec<T> {
    let mut out = Vec::new();
    for i1 in 0..6 {
        for i2 in i1 + 1..6 {
            for j1 in 0..6 {
                for j2 in j1 + 1..6 {
                    for j3 in j2 + 1..6 {
                        for j4 in j3 + 1..6 {
                            let j = [j1, j2, j3, j4];
                            let mut s = T::zero();
                            for k in 0..4 {
                                let rest: Vec<usize> = (0..4).filter(|&m| m != k).map(|m| j[m]).collect();
                                let term = plucker_at(coords, [i1, i2, j[k]])
                                    * plucker_at(coords, [rest[0], rest[1], rest[2]]);
                                if k % 2 == 0 {
                                    s += term;
                                } else {
                                    s -= term;
                                }
                            }
                            out.push(s);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Random Type-2 spec with `|c_i| ≤ 2` and `|c4| ∈ [0.5, 2]`, random
/// rotation and reflection.
pub fn random_type2<R: Rng>(rng: &mut R) -> PlaneSpec {
    let mut c = [0.0; 5];
    for v in c.iter_mut() {
        *v = rng.gen_range(-2.0..=2.0);
    }
    let mag = rng.gen_range(0.5..=2.0);
    c[3] = if rng.gen_bool(0.5) { mag } else { -mag };
    let theta = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    PlaneSpec::type2(c).rotated(theta, rng.gen_bool(0.5))
}

/// Heuristic emptiness check: number of sampled points `φ(p)` with
/// `r_min ≤ ‖p‖ ≤ 1` whose smallest eigenvalue is nonnegative.
pub fn count_psd_samples<R: Rng>(
    e: &AffineSubspace<f64>,
    samples: usize,
    r_min: f64,
    rng: &mut R,
) -> Result<usize> {
    let m = e.dim();
    let mut hits = 0;
    let mut drawn = 0;
    while drawn < samples {
        let p: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let r = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r > 1.0 || r < r_min {
            continue;
        }
        drawn += 1;
        let d = eig_sym(&e.point(&p))?;
        if *d.values.last().expect("n >= 1") >= 0.0 {
            hits += 1;
        }
    }
    Ok(hits)
}
