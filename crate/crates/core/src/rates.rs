//! Rate fits on AP traces, the trace CSV format, and the recursive model
//! sequence behind the sublinear rate.

use std::fmt;
use std::io::{Read, Write};

use crate::apengine::APTrace;
use crate::error::{Error, Result};
use crate::planes::PlaneSpec;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RateModel {
    /// `dist^{-p} ≈ intercept + slope·k`.
    InversePower(u32),
    /// `dist ≈ amplitude·ratio^k`.
    Geometric,
}

/// Inclusive range of iteration indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub k_min: usize,
    pub k_max: usize,
}

impl Window {
    pub fn new(k_min: usize, k_max: usize) -> Self {
        Window { k_min, k_max }
    }

    /// Everything after the first 10% of `0..=last`.
    pub fn burn_in(last: usize) -> Self {
        Window { k_min: last.div_ceil(10), k_max: last }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateFit {
    pub model: RateModel,
    pub window: Window,
    /// `(intercept, slope)` for inverse powers, `(amplitude, ratio)` for
    /// geometric fits.
    pub params: (f64, f64),
    /// Root-mean-square residual in the transformed coordinates.
    pub rmse: f64,
}

impl RateFit {
    pub fn slope(&self) -> f64 {
        self.params.1
    }
}

impl fmt::Display for RateFit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.params;
        let w = self.window;
        match self.model {
            RateModel::InversePower(p) => write!(
                f,
                "fit 1/dist^{p} = {a:.4} + {b:.6e} k on k in [{}, {}] (rmse {:.3e})",
                w.k_min, w.k_max, self.rmse
            ),
            RateModel::Geometric => write!(
                f,
                "fit dist = {a:.4e} * {b:.6}^k on k in [{}, {}] (rmse {:.3e})",
                w.k_min, w.k_max, self.rmse
            ),
        }
    }
}

/// `(k, dist)` pairs of a trace, as `f64`.
pub fn trace_samples<T: Scalar>(trace: &APTrace<T>) -> Vec<(usize, f64)> {
    trace.points.iter().map(|p| (p.k, p.dist.to_f64_lossy())).collect()
}

fn window_points(samples: &[(usize, f64)], w: Window) -> Result<Vec<(usize, f64)>> {
    let pts: Vec<_> = samples.iter().copied().filter(|&(k, _)| k >= w.k_min && k <= w.k_max).collect();
    if pts.is_empty() {
        return Err(Error::EmptyWindow(w.k_min, w.k_max));
    }
    if let Some(&(k, _)) = pts.iter().find(|&&(_, d)| !(d > 0.0)) {
        return Err(Error::ZeroDistance(k));
    }
    Ok(pts)
}

/// Ordinary least squares line; returns `(intercept, slope, rmse)`.
fn line_fit(xy: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let icpt = my - slope * mx;
    let sse: f64 = xy.iter().map(|p| (p.1 - icpt - slope * p.0).powi(2)).sum();
    (icpt, slope, (sse / n).sqrt())
}

pub fn fit_inverse_power_samples(samples: &[(usize, f64)], p: u32, window: Window) -> Result<RateFit> {
    let pts = window_points(samples, window)?;
    let xy: Vec<_> = pts.iter().map(|&(k, d)| (k as f64, d.powi(-(p as i32)))).collect();
    let (a, b, rmse) = line_fit(&xy);
    Ok(RateFit { model: RateModel::InversePower(p), window, params: (a, b), rmse })
}

pub fn fit_geometric_samples(samples: &[(usize, f64)], window: Window) -> Result<RateFit> {
    let pts = window_points(samples, window)?;
    let xy: Vec<_> = pts.iter().map(|&(k, d)| (k as f64, d.ln())).collect();
    let (a, b, rmse) = line_fit(&xy);
    Ok(RateFit { model: RateModel::Geometric, window, params: (a.exp(), b.exp()), rmse })
}

/// Least-squares line through `(k, dist_k^{-p})`.
pub fn fit_inverse_power<T: Scalar>(trace: &APTrace<T>, p: u32, window: Window) -> Result<RateFit> {
    fit_inverse_power_samples(&trace_samples(trace), p, window)
}

/// Least-squares line through `(k, ln dist_k)`.
pub fn fit_geometric<T: Scalar>(trace: &APTrace<T>, window: Window) -> Result<RateFit> {
    fit_geometric_samples(&trace_samples(trace), window)
}

/// `constant · k^{1/6} · dist_k` at each requested `k` present in the samples.
pub fn scaled_products(samples: &[(usize, f64)], constant: f64, ks: &[usize]) -> Vec<(usize, f64)> {
    ks.iter()
        .filter_map(|&k| {
            samples.iter().find(|s| s.0 == k).map(|&(_, d)| (k, constant * (k as f64).powf(1.0 / 6.0) * d))
        })
        .collect()
}

/// `(3 / (32 c4⁴ (2c1² + 1)⁴))^{1/6}`, the limit constant of
/// `k^{1/6} ‖U_k − U_*‖` along the slowest curve.
pub fn thm71_constant(spec: &PlaneSpec) -> Result<f64> {
    let [c1, _, _, c4, _] = spec.type2_params()?;
    if c4 == 0.0 {
        return Err(Error::InvalidSpec("c4 must be nonzero".into()));
    }
    Ok((3.0 / (32.0 * c4.powi(4) * (2.0 * c1 * c1 + 1.0).powi(4))).powf(1.0 / 6.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Noise {
    Plus,
    Minus,
    /// `+` on even steps, `−` on odd ones.
    Alternating,
}

#[derive(Clone, Debug)]
pub struct RecursiveRun {
    /// `x_0, …, x_n`.
    pub seq: Vec<f64>,
    /// `(qC)^{1/q} n^{1/q} x_n`.
    pub limit_product: f64,
    /// Whether `x_{k+1} < x_k` held at every step.
    pub monotone: bool,
}

impl RecursiveRun {
    /// `(qC)^{1/q} k^{1/q} x_k` for the given `k`.
    pub fn product_at(&self, k: usize, c: f64, q: u32) -> f64 {
        let q = q as f64;
        (q * c).powf(1.0 / q) * (k as f64).powf(1.0 / q) * self.seq[k]
    }
}

/// Iterates `x_{k+1} = x_k (1 − C x_k^q ± K x_k^{q+1})`.
pub fn recursive_sequence(c: f64, k: f64, q: u32, x0: f64, n: usize, noise: Noise) -> Result<RecursiveRun> {
    if q == 0 || !(c > 0.0) || k < 0.0 {
        return Err(Error::InvalidArgument("need q >= 1, C > 0 and K >= 0".into()));
    }
    let qf = q as f64;
    if !(x0 > 0.0) || !((qf + 1.0) * c - (qf + 2.0) * k * x0 > 0.0) {
        return Err(Error::HypothesisViolated(format!(
            "(q+1)C - (q+2)K x0 = {} with x0 = {x0}",
            (qf + 1.0) * c - (qf + 2.0) * k * x0
        )));
    }
    let mut seq = Vec::with_capacity(n + 1);
    let mut x = x0;
    let mut monotone = true;
    seq.push(x);
    for i in 0..n {
        let sign = match noise {
            Noise::Plus => 1.0,
            Noise::Minus => -1.0,
            Noise::Alternating if i % 2 == 0 => 1.0,
            Noise::Alternating => -1.0,
        };
        let xq = x.powi(q as i32);
        let next = x * (1.0 - c * xq + sign * k * xq * x);
        monotone &= next < x;
        x = next;
        seq.push(x);
    }
    let limit_product = (qf * c).powf(1.0 / qf) * (n as f64).powf(1.0 / qf) * x;
    Ok(RecursiveRun { seq, limit_product, monotone })
}

/// One parsed CSV row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub k: usize,
    pub dist: f64,
    pub psd_rank: usize,
}

pub const CSV_HEADER: [&str; 5] = ["k", "dist", "psd_rank", "inv2", "inv6"];

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Writes `k,dist,psd_rank,inv2,inv6` with 17 significant digits.
pub fn write_trace_csv<T: Scalar, W: Write>(trace: &APTrace<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for p in &trace.points {
        let d = p.dist.to_f64_lossy();
        w.write_record([
            p.k.to_string(),
            format!("{d:.16e}"),
            p.psd_rank.to_string(),
            format!("{:.16e}", d.powi(-2)),
            format!("{:.16e}", d.powi(-6)),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_trace_csv<R: Read>(input: R) -> Result<Vec<TraceRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let field = |i: usize| rec.get(i).ok_or_else(|| Error::Parse("short row".into()));
        let bad = |e: &dyn fmt::Display| Error::Parse(e.to_string());
        rows.push(TraceRow {
            k: field(0)?.parse().map_err(|e| bad(&e))?,
            dist: field(1)?.parse().map_err(|e| bad(&e))?,
            psd_rank: field(2)?.parse().map_err(|e| bad(&e))?,
        });
    }
    Ok(rows)
}

pub fn row_samples(rows: &[TraceRow]) -> Vec<(usize, f64)> {
    rows.iter().map(|r| (r.k, r.dist)).collect()
}
