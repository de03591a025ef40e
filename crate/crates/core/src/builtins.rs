//! Hard-coded example planes with their starting points and the fit that
//! goes with each run.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::apengine::APTrace;
use crate::error::{Error, Result};
use crate::planes::{build_plane, PlaneSpec};
use crate::rates::{fit_geometric, fit_inverse_power, RateFit, Window};
use crate::scalar::Scalar;
use crate::slowcurve::SlowCurve;
use crate::symcore::{AffineSubspace, SymMat};

pub const BUILTIN_IDS: [&str; 5] = ["ex3.2", "ex3.3", "ex3.4", "ex4.4", "ex6.1"];

/// How to start an AP run.
#[derive(Clone, Debug, PartialEq)]
pub enum Start {
    /// Explicit coefficients; a single number is a 1-D start `t0`.
    Coeffs(Vec<f64>),
    /// The rational slowest-curve point `G(t0)` of a Type-2 plane.
    SlowestCurve(f64),
}

impl FromStr for Start {
    type Err = Error;

    /// Accepts `t0`, `a,b,c` and `slowest-curve:t0`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let num = |v: &str| {
            v.trim().parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| Error::Parse(format!("bad number `{v}`")))
        };
        if let Some(rest) = s.strip_prefix("slowest-curve:") {
            return Ok(Start::SlowestCurve(num(rest)?));
        }
        let xs = s.split(',').map(num).collect::<Result<Vec<_>>>()?;
        Ok(Start::Coeffs(xs))
    }
}

impl fmt::Display for Start {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Start::SlowestCurve(t) => write!(f, "slowest-curve:{t}"),
            Start::Coeffs(xs) => {
                let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FitPlan {
    /// Inverse-power fit; `None` means burn-in window over the whole run.
    InversePower(u32, Option<Window>),
    Geometric(Window),
}

/// A plane together with an AP start, an iteration budget and a fit.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub label: String,
    pub plane: AffineSubspace<f64>,
    pub spec: Option<PlaneSpec>,
    pub start: Start,
    pub iters: usize,
    pub fit: FitPlan,
}

fn sym(rows: &[&[f64]]) -> SymMat<f64> {
    let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
    SymMat::from_rows(&rows).expect("builtin matrices are symmetric")
}

fn line(anchor: SymMat<f64>, dir: SymMat<f64>) -> AffineSubspace<f64> {
    AffineSubspace::new(anchor, vec![dir]).expect("builtin planes are valid")
}

fn bad_variant(id: &str, v: &str) -> Error {
    Error::InvalidArgument(format!("unknown variant `{v}` for {id}"))
}

/// Looks up a builtin example. `variant` picks a branch (`pos`/`neg` for the
/// line examples); `None` selects the default.
pub fn builtin(id: &str, variant: Option<&str>) -> Result<Experiment> {
    let v = variant.unwrap_or("");
    let e11 = SymMat::unit(3, 0, 0);
    let exp = |label: &str, plane, spec, start, iters, fit| Experiment {
        label: label.to_string(),
        plane,
        spec,
        start,
        iters,
        fit,
    };
    match id {
        "ex3.2" => {
            let b = sym(&[&[0.0, 0.0, -1.0], &[0.0, 2.0, 0.0], &[-1.0, 0.0, 0.0]]);
            let plane = line(e11, b);
            match v {
                "" | "pos" => Ok(exp(
                    "ex3.2/pos",
                    plane,
                    None,
                    Start::Coeffs(vec![0.1]),
                    100_000,
                    FitPlan::InversePower(2, Some(Window::new(10_000, 100_000))),
                )),
                "neg" => Ok(exp(
                    "ex3.2/neg",
                    plane,
                    None,
                    Start::Coeffs(vec![-0.05]),
                    30,
                    FitPlan::Geometric(Window::new(5, 30)),
                )),
                _ => Err(bad_variant(id, v)),
            }
        }
        "ex3.3" => {
            let b = sym(&[&[-1.0, 0.0, 0.0], &[0.0, 1.0, 1.0], &[0.0, 1.0, 1.0]]);
            match v {
                "" | "neg" => Ok(exp(
                    "ex3.3/neg",
                    line(e11, b),
                    None,
                    Start::Coeffs(vec![-0.1]),
                    20,
                    // dist reaches the absolute rounding floor (~1e-17) near k = 20
                    FitPlan::Geometric(Window::new(1, 10)),
                )),
                // t0 = 1.5 on the same line; the limit is U(1), so measure from there
                "pos" => {
                    let u1 = sym(&[&[0.0, 0.0, 0.0], &[0.0, 1.0, 1.0], &[0.0, 1.0, 1.0]]);
                    Ok(exp(
                        "ex3.3/pos",
                        line(u1, b),
                        None,
                        Start::Coeffs(vec![0.5]),
                        60,
                        FitPlan::Geometric(Window::new(1, 50)),
                    ))
                }
                _ => Err(bad_variant(id, v)),
            }
        }
        "ex3.4" => {
            if !v.is_empty() {
                return Err(bad_variant(id, v));
            }
            let b1 = &SymMat::unit(4, 0, 2) + &SymMat::unit(4, 1, 2);
            let b2 = &SymMat::unit(4, 0, 3) + &SymMat::unit(4, 1, 3);
            let plane = AffineSubspace::new(SymMat::unit(4, 0, 0), vec![b1, b2])?;
            Ok(exp(
                "ex3.4",
                plane,
                None,
                Start::Coeffs(vec![0.05, 0.05]),
                40,
                FitPlan::Geometric(Window::new(10, 40)),
            ))
        }
        "ex4.4" | "ex6.1" => {
            if !v.is_empty() {
                return Err(bad_variant(id, v));
            }
            let c = if id == "ex4.4" { [0.0, 0.0, 1.0, 1.0, 0.0] } else { [1.0, 0.0, 0.0, 1.0, 0.0] };
            let spec = PlaneSpec::type2(c);
            let plane = build_plane::<f64>(&spec)?.plane;
            Ok(exp(id, plane, Some(spec), Start::SlowestCurve(0.1), 100_000, FitPlan::InversePower(6, None)))
        }
        _ => Err(Error::InvalidArgument(format!(
            "unknown example `{id}` (expected one of {})",
            BUILTIN_IDS.join(", ")
        ))),
    }
}

impl Experiment {
    /// Coefficients of the starting point in the plane's basis.
    pub fn start_coeffs(&self) -> Result<Vec<f64>> {
        resolve_start(&self.plane, self.spec.as_ref(), &self.start)
    }

    /// Applies the fit plan, clipping windows to the trace.
    pub fn fit<T: Scalar>(&self, trace: &APTrace<T>) -> Result<RateFit> {
        fit_with_plan(self.fit, trace)
    }
}

pub fn fit_with_plan<T: Scalar>(plan: FitPlan, trace: &APTrace<T>) -> Result<RateFit> {
    let last = trace.last().k;
    let clip = |w: Window| Window::new(w.k_min.min(last), w.k_max.min(last));
    match plan {
        FitPlan::InversePower(p, Some(w)) if w.k_max <= last => fit_inverse_power(trace, p, w),
        FitPlan::InversePower(p, _) => fit_inverse_power(trace, p, Window::burn_in(last)),
        FitPlan::Geometric(w) => fit_geometric(trace, clip(w)),
    }
}

/// Turns a [`Start`] into coefficients. A slowest-curve start needs a
/// Type-2 spec whose plane uses the unscaled `B1, B2, B3` basis.
pub fn resolve_start(plane: &AffineSubspace<f64>, spec: Option<&PlaneSpec>, start: &Start) -> Result<Vec<f64>> {
    match start {
        Start::Coeffs(xs) => {
            if xs.len() != plane.dim() {
                return Err(Error::DimensionMismatch { expected: plane.dim(), found: xs.len() });
            }
            Ok(xs.clone())
        }
        Start::SlowestCurve(t0) => {
            let spec = spec.ok_or_else(|| {
                Error::InvalidArgument("a slowest-curve start needs a type2 plane".into())
            })?;
            let sc = SlowCurve::<f64>::new(spec)?;
            let p = sc.point(*t0)?;
            Ok(vec![*t0, p.g13, p.g23])
        }
    }
}

/// Seeded start with coordinates uniform in `[-radius, radius]`.
pub fn random_start(dim: usize, radius: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..dim).map(|_| rng.gen_range(-radius..=radius)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apengine::run_ap;

    #[test]
    fn random_start_is_seeded() {
        assert_eq!(random_start(3, 0.05, 9), random_start(3, 0.05, 9));
        assert_ne!(random_start(3, 0.05, 9), random_start(3, 0.05, 10));
        assert!(random_start(3, 0.05, 1).iter().all(|v| v.abs() <= 0.05));
    }

    #[test]
    fn start_parsing() {
        assert_eq!("0.1".parse::<Start>().unwrap(), Start::Coeffs(vec![0.1]));
        assert_eq!("1,-2, 3".parse::<Start>().unwrap(), Start::Coeffs(vec![1.0, -2.0, 3.0]));
        assert_eq!("slowest-curve:0.05".parse::<Start>().unwrap(), Start::SlowestCurve(0.05));
        assert!("x".parse::<Start>().is_err());
        assert!("slowest-curve:nan".parse::<Start>().is_err());
    }

    #[test]
    fn every_builtin_resolves() {
        for id in BUILTIN_IDS {
            let ex = builtin(id, None).unwrap();
            assert_eq!(ex.start_coeffs().unwrap().len(), ex.plane.dim());
        }
        assert!(builtin("ex9.9", None).is_err());
        assert!(builtin("ex3.2", Some("sideways")).is_err());
    }

    #[test]
    fn slowest_start_matches_curve_point() {
        let ex = builtin("ex6.1", None).unwrap();
        let p = ex.start_coeffs().unwrap();
        let g = SlowCurve::<f64>::new(ex.spec.as_ref().unwrap()).unwrap().point(0.1).unwrap().g;
        assert!((&ex.plane.point(&p) - &g).norm() < 1e-15);
    }

    #[test]
    fn linear_examples_have_their_ratios() {
        for (id, v, ratio, tol) in
            [("ex3.3", "neg", 0.2, 1e-6), ("ex3.3", "pos", 0.8, 1e-6), ("ex3.2", "neg", 1.0 / 3.0, 1e-3), ("ex3.4", "", 0.75, 0.01)]
        {
            let ex = builtin(id, (!v.is_empty()).then_some(v)).unwrap();
            let tr = run_ap(&ex.plane, &ex.start_coeffs().unwrap(), ex.iters, 0.0).unwrap();
            let f = ex.fit(&tr).unwrap();
            assert!((f.params.1 - ratio).abs() < tol, "{id}/{v}: {}", f.params.1);
        }
    }
}
