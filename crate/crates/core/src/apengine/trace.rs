use std::fmt;

use log::debug;

use crate::error::Result;
use crate::scalar::Scalar;
use crate::symcore::{project_affine, project_psd, AffineSubspace, SymMat};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    MaxIter,
    Tol,
    Stagnation,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::MaxIter => "max_iter",
            StopReason::Tol => "tol",
            StopReason::Stagnation => "stagnation",
        })
    }
}

/// One recorded iterate. `psd_rank` is the rank of `P_psd(U_k)`; `p` is only
/// kept on stride boundaries and for the final iterate.
#[derive(Clone, Debug, PartialEq)]
pub struct TracePoint<T> {
    pub k: usize,
    pub dist: T,
    pub psd_rank: usize,
    pub p: Option<Vec<T>>,
}

#[derive(Clone, Debug)]
pub struct APTrace<T> {
    pub points: Vec<TracePoint<T>>,
    pub stride: usize,
    pub converged: bool,
    pub stop_reason: StopReason,
}

impl<T: Scalar> APTrace<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> &TracePoint<T> {
        self.points.last().expect("trace always holds the start point")
    }

    /// Coefficients of the final iterate.
    pub fn final_coeffs(&self) -> &[T] {
        self.last().p.as_deref().expect("final point keeps coefficients")
    }

    pub fn dist_at(&self, k: usize) -> Option<T> {
        self.points.get(k).filter(|pt| pt.k == k).map(|pt| pt.dist)
    }

    /// Largest increase `dist_{k+1} - dist_k` along the trace (≤ 0 for a
    /// Fejér-monotone run).
    pub fn max_increase(&self) -> T {
        self.points
            .windows(2)
            .fold(T::neg_infinity(), |m, w| m.max(w[1].dist - w[0].dist))
    }

    pub fn is_fejer_monotone(&self, slack: T) -> bool {
        self.points.len() < 2 || self.max_increase() <= slack
    }
}

/// Run limits for [`run_ap_with`].
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub max_iter: usize,
    pub tol: f64,
    /// Keep coefficient vectors every `stride` steps; `None` picks 1 for
    /// short runs and 1000 otherwise.
    pub stride: Option<usize>,
    /// Consecutive non-decreasing steps before giving up.
    pub stagnation_window: usize,
}

impl RunOptions {
    pub fn new(max_iter: usize, tol: f64) -> Self {
        RunOptions { max_iter, tol, stride: None, stagnation_window: 100 }
    }

    fn effective_stride(&self) -> usize {
        match self.stride {
            Some(s) => s.max(1),
            None if self.max_iter <= 1000 => 1,
            None => 1000,
        }
    }
}

/// One AP step `P_E(P_psd(U))`, with the rank of the intermediate projection.
pub fn ap_step<T: Scalar>(e: &AffineSubspace<T>, u: &SymMat<T>) -> Result<(SymMat<T>, usize)> {
    let (v, rank) = project_psd(u)?;
    let (w, _) = project_affine(e, &v)?;
    Ok((w, rank))
}

/// Same as [`ap_step`] but in coefficients of `E`.
pub fn ap_step_coeffs<T: Scalar>(e: &AffineSubspace<T>, p: &[T]) -> Result<(Vec<T>, usize)> {
    let (v, rank) = project_psd(&e.point(p))?;
    Ok((e.coords(&v)?, rank))
}

pub fn run_ap<T: Scalar>(
    e: &AffineSubspace<T>,
    p0: &[T],
    max_iter: usize,
    tol: f64,
) -> Result<APTrace<T>> {
    run_ap_with(e, p0, &RunOptions::new(max_iter, tol))
}

pub fn run_ap_with<T: Scalar>(
    e: &AffineSubspace<T>,
    p0: &[T],
    opts: &RunOptions,
) -> Result<APTrace<T>> {
    let stride = opts.effective_stride();
    let tol = T::lit(opts.tol);
    let stall_tol = T::scaled_tol(1e-16);
    let anchor = e.anchor();

    let mut p = p0.to_vec();
    let mut u = e.point(&p);
    let mut points = Vec::with_capacity(opts.max_iter.min(1 << 20) + 1);
    let mut stalled = 0usize;
    let mut k = 0usize;
    let stop_reason = loop {
        let dist = (&u - anchor).norm();
        let (v, rank) = project_psd(&u)?;
        let keep = k.is_multiple_of(stride);
        if let Some(prev) = points.last().map(|pt: &TracePoint<T>| pt.dist) {
            let rel = if prev > T::zero() { (prev - dist) / prev } else { T::zero() };
            if rel < stall_tol {
                stalled += 1;
            } else {
                stalled = 0;
            }
        }
        points.push(TracePoint { k, dist, psd_rank: rank, p: keep.then(|| p.clone()) });

        if dist < tol {
            break StopReason::Tol;
        }
        if k >= opts.max_iter {
            break StopReason::MaxIter;
        }
        if stalled >= opts.stagnation_window {
            debug!("AP run stagnated at k={k}, dist={dist:e}");
            break StopReason::Stagnation;
        }
        let s = e.coords(&v)?;
        u = e.point(&s);
        p = s;
        k += 1;
    };
    if let Some(last) = points.last_mut() {
        last.p = Some(p);
    }
    Ok(APTrace { points, stride, converged: stop_reason == StopReason::Tol, stop_reason })
}
