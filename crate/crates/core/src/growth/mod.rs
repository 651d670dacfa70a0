//! Order and exponent estimators, plus numerical checks of the difference
//! analogues of the logarithmic derivative lemma.
//!
//! Asymptotic `O(·)` claims are checked by fitting the unknown constants on
//! the smallest admissible radii and then requiring the inequality at every
//! larger sampled radius.

mod counterexample;
mod lemmas;
mod shift;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcalg::{parse_spec_str, Divisor, FuncExpr, Kind, Order};
use crate::nevanlinna::CharacteristicCurve;
use crate::scalar::Real;

pub use counterexample::{counterexample_counting, infinite_order_counterexample};
pub use lemmas::{c_alpha, circle_average_bound_check, two_point_log_bound_check, CircleAverage, PointCheck};
pub use shift::{
    fund_est_lhs, fund_est_rhs, verify_fund_est, verify_quotient_proximity, verify_shift_characteristic,
    verify_shift_counting, BoundParams, FundEst, GOLDBERG_SLACK,
};

/// Default `ε` in every `r^{σ-1+ε}` bound.
pub const DEFAULT_EPSILON: f64 = 0.1;

/// Default radial sampling density.
pub const POINTS_PER_DECADE: usize = 24;

/// The counting fit is used when `N ≥ COUNTING_SHARE · T` at the top of the
/// window.
pub const COUNTING_SHARE: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Slope of `log T` against `log r`.
    SlopeFit,
    /// Slope of `log N` against `log r`.
    CountingFit,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GrowthEstimate {
    pub order: f64,
    pub fit_window: (f64, f64),
    /// Largest deviation of the fitted quantity from the fitted line.
    pub residual: f64,
    pub method: Method,
}

/// Least-squares line through `(x, y)`; returns `(slope, intercept, max |residual|)`.
pub(crate) fn line_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64, f64)> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let res = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - icpt).abs()).fold(0.0, f64::max);
    Some((slope, icpt, res))
}

/// `true` for trees built from polynomials, rationals and exponentials of
/// polynomials, whose order is known exactly.
fn elementary<T: Real>(f: &FuncExpr<T>) -> bool {
    match f.kind() {
        Kind::Const(_) | Kind::Poly(_) | Kind::Rational { .. } => true,
        Kind::ExpOf(g) => g.as_polynomial().is_some(),
        Kind::Shift { inner, .. } | Kind::Power(inner, _) => elementary(inner),
        Kind::Product(fs) => fs.iter().all(elementary),
        Kind::Quotient(n, d) => elementary(n) && elementary(d),
        Kind::RationalInF { inner, .. } => elementary(inner),
        Kind::Gamma | Kind::HyperbolicGamma { .. } | Kind::HaymanThatcher { .. } => false,
    }
}

/// Samples with `r` in the top half-decade of the curve.
fn top_window<T: Real>(curve: &CharacteristicCurve<T>) -> Vec<(f64, f64, f64)> {
    let rmax = curve.samples.last().map_or(0.0, |s| s.r.as_f64());
    let lo = rmax / 10f64.sqrt();
    curve.samples.iter().filter(|s| s.r.as_f64() >= lo).map(|s| (s.r.as_f64(), s.t.as_f64(), s.n.as_f64())).collect()
}

fn check_span<T: Real>(curve: &CharacteristicCurve<T>) -> Result<()> {
    let s = &curve.samples;
    if s.len() < 8 || s[s.len() - 1].r < s[0].r * T::lit(10.0) * T::lit(1.0 - 1e-9) {
        return Err(Error::Precondition("order fits need at least 8 samples spanning a decade".into()));
    }
    Ok(())
}

/// Slope of `log T` over the top half-decade.
pub fn fit_order<T: Real>(curve: &CharacteristicCurve<T>) -> Result<GrowthEstimate> {
    check_span(curve)?;
    slope_of(curve, |t, _| t, Method::SlopeFit)
}

/// Slope of `log N(r, f)` over the top half-decade.
pub fn fit_counting_order<T: Real>(curve: &CharacteristicCurve<T>) -> Result<GrowthEstimate> {
    check_span(curve)?;
    slope_of(curve, |_, n| n, Method::CountingFit)
}

fn slope_of<T: Real>(
    curve: &CharacteristicCurve<T>,
    pick: impl Fn(f64, f64) -> f64,
    method: Method,
) -> Result<GrowthEstimate> {
    let w = top_window(curve);
    if w.iter().any(|&(_, t, n)| !(pick(t, n) > 0.0)) {
        return Err(Error::Precondition("fitted quantity must be positive on the window".into()));
    }
    let xs: Vec<f64> = w.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = w.iter().map(|&(_, t, n)| pick(t, n).ln()).collect();
    let (slope, _, residual) =
        line_fit(&xs, &ys).ok_or_else(|| Error::Precondition("window too small for a fit".into()))?;
    Ok(GrowthEstimate { order: slope.max(0.0), fit_window: (w[0].0, w[w.len() - 1].0), residual, method })
}

/// Order of the curve's function: closed form for elementary trees, otherwise
/// a counting fit when poles carry at least a quarter of `T`, otherwise a
/// slope fit of `log T`.
pub fn estimate_order<T: Real>(curve: &CharacteristicCurve<T>) -> Result<GrowthEstimate> {
    check_span(curve)?;
    let window = {
        let w = top_window(curve);
        (w[0].0, w[w.len() - 1].0)
    };
    let closed = |order: f64| GrowthEstimate { order, fit_window: window, residual: 0.0, method: Method::ClosedForm };
    if let Ok(f) = parse_spec_str::<T>(&curve.subject) {
        if elementary(&f) {
            if let Order::Exact(s) = f.order() {
                return Ok(closed(s));
            }
        }
    }
    let w = top_window(curve);
    if w.iter().all(|&(_, t, _)| t <= 0.0) {
        return Ok(closed(0.0));
    }
    let &(_, t_top, n_top) = w.last().expect("window is nonempty");
    if n_top > 0.0 && n_top >= COUNTING_SHARE * t_top && w.iter().all(|s| s.2 > 0.0) {
        fit_counting_order(curve)
    } else {
        fit_order(curve)
    }
}

/// Finite order from the tree, or `None` when the tree says the order is
/// infinite or cannot tell.
pub(crate) fn known_order<T: Real>(f: &FuncExpr<T>) -> Option<f64> {
    match f.order() {
        Order::Exact(s) | Order::AtMost(s) => Some(s),
        Order::Infinite | Order::Unknown => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PoleExponent {
    /// Fitted exponent of convergence of the poles.
    pub lambda: f64,
    pub residual: f64,
    /// `(r, Σ_{0<|b|<r} 1/|b|)` over the poles `b`, with multiplicity.
    pub holder_sums: Vec<(f64, f64)>,
}

/// Slope of `log n(r)` (multiplicity-weighted pole count) against `log r`
/// over the top half-decade of `radii`. A finite pole set gives 0.
pub fn estimate_pole_exponent<T: Real>(div: &Divisor<T>, radii: &[T]) -> Result<PoleExponent> {
    let Some(&rmax) = radii.last() else {
        return Err(Error::Precondition("no radii".into()));
    };
    if rmax > div.radius() {
        return Err(Error::Precondition("divisor must be enumerated out to the largest radius".into()));
    }
    let mut poles: Vec<(f64, u32)> = div.poles().map(|(b, m)| (b.norm().as_f64(), m)).collect();
    poles.sort_by(|a, b| a.0.total_cmp(&b.0));
    let holder_sums = radii
        .iter()
        .map(|r| {
            let r = r.as_f64();
            let s = poles.iter().filter(|p| p.0 > 0.0 && p.0 < r).map(|p| p.1 as f64 / p.0).sum();
            (r, s)
        })
        .collect();
    let lo = rmax.as_f64() / 10f64.sqrt();
    let pts: Vec<(f64, f64)> = radii
        .iter()
        .map(|r| r.as_f64())
        .filter(|&r| r >= lo)
        .map(|r| (r, poles.iter().filter(|p| p.0 < r).map(|p| p.1 as f64).sum::<f64>()))
        .filter(|p| p.1 > 0.0)
        .collect();
    let (lambda, residual) = if pts.len() < 2 || pts.iter().all(|p| p.1 == pts[0].1) {
        (0.0, 0.0)
    } else {
        let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
        let (s, _, res) = line_fit(&xs, &ys).expect("at least two distinct radii");
        (s.max(0.0), res)
    };
    Ok(PoleExponent { lambda, residual, holder_sums })
}

/// Nonnegative `(c1, c2)` so that `c1·g1 + c2·g2` matches `lhs` at the two
/// fit radii. A negative constant whose term is below `noise` is taken as
/// zero; otherwise the single term whose growth between the fit radii is
/// closest to the observed growth is used, scaled to cover both radii.
pub(crate) fn fit_two(lhs: [f64; 2], g1: [f64; 2], g2: [f64; 2], noise: f64) -> (f64, f64) {
    let only = |g: [f64; 2]| (lhs[0] / g[0]).max(lhs[1] / g[1]).max(0.0);
    let det = g1[0] * g2[1] - g1[1] * g2[0];
    if det.abs() > 1e-14 * (g1[0] * g2[1]).abs() {
        let c1 = (lhs[0] * g2[1] - lhs[1] * g2[0]) / det;
        let c2 = (g1[0] * lhs[1] - g1[1] * lhs[0]) / det;
        let small = |c: f64, g: [f64; 2]| -c * g[0].max(g[1]) <= noise;
        match (c1 >= 0.0, c2 >= 0.0) {
            (true, true) => return (c1, c2),
            (false, true) if small(c1, g1) => return (0.0, only(g2)),
            (true, false) if small(c2, g2) => return (only(g1), 0.0),
            _ => {}
        }
    }
    if !(lhs[0] > 0.0 && lhs[1] > 0.0) {
        return (only(g1), 0.0);
    }
    let seen = (lhs[1] / lhs[0]).ln();
    let miss = |g: [f64; 2]| ((g[1] / g[0]).ln() - seen).abs();
    if miss(g1) <= miss(g2) {
        (only(g1), 0.0)
    } else {
        (0.0, only(g2))
    }
}

/// One-term analogue of [`fit_two`].
pub(crate) fn fit_one(lhs: f64, g: f64) -> f64 {
    (lhs / g).max(0.0)
}
