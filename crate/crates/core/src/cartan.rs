//! Cartan exclusion disks and the pointwise bound for `f(z+η)/f(z)` off them.

use std::f64::consts::TAU;

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcalg::{to_spec, FuncExpr};
use crate::growth::known_order;
use crate::nevanlinna::{characteristic_curve, nudge, NEAR_BAND};
use crate::report::{BoundSample, Report};
use crate::scalar::{to_pair, Real};

/// Exceptional-disk budget as a fraction of the smallest radius.
pub const BUDGET_FRACTION: f64 = 0.05;

/// Points sampled per circle.
pub const CIRCLE_SAMPLES: usize = 64;

/// The pointwise constant `A` is fitted on clean radii up to this multiple of
/// the smallest one.
pub const FIT_OCTAVE: f64 = 2.0;

/// Relative slack when deciding that a point lies in a closed disk.
const MEMBER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk<T> {
    pub center: Complex<T>,
    pub radius: T,
}

impl<T: Real> Disk<T> {
    /// Closed-disk membership.
    pub fn contains(&self, z: Complex<T>) -> bool {
        (z - self.center).norm() <= self.radius
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExclusionSet<T> {
    pub disks: Vec<Disk<T>>,
    pub budget: T,
    pub source_points: usize,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct DiskJson {
    center: [f64; 2],
    radius: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ExclusionJson {
    disks: Vec<DiskJson>,
    log_measure: f64,
}

impl<T: Real> ExclusionSet<T> {
    pub fn total_radius(&self) -> T {
        self.disks.iter().map(|d| d.radius).sum()
    }

    pub fn contains(&self, z: Complex<T>) -> bool {
        self.disks.iter().any(|d| d.contains(z))
    }

    /// `{disks: [{center: [re, im], radius}], logMeasure}`.
    pub fn to_json(&self) -> String {
        let j = ExclusionJson {
            disks: self
                .disks
                .iter()
                .map(|d| DiskJson { center: to_pair(d.center), radius: d.radius.as_f64() })
                .collect(),
            log_measure: project_radii(self).log_measure,
        };
        serde_json::to_string_pretty(&j).expect("finite numbers")
    }
}

/// Sorted distances from `z` satisfy `d_(l) > B·l/p` for `l = 1..p`.
pub fn sorted_distance_ok<T: Real>(points: &[Complex<T>], budget: T, z: Complex<T>) -> bool {
    let p = T::count(points.len());
    let mut d: Vec<T> = points.iter().map(|&w| (z - w).norm()).collect();
    d.sort_by(T::total_order);
    d.iter().enumerate().all(|(i, &dl)| dl > budget * T::count(i + 1) / p)
}

/// A closed disk of radius `rho` holding at least `k` of `pts`, as
/// `(center, members)`.
fn disk_with_at_least<T: Real>(pts: &[Complex<T>], rho: T, k: usize) -> Option<(Complex<T>, Vec<usize>)> {
    if k <= 1 {
        return pts.first().map(|&c| (c, vec![0]));
    }
    let reach = rho * T::lit(2.0 * (1.0 + MEMBER_TOL));
    let tau = T::TAU();
    let mut events: Vec<(T, i32)> = Vec::new();
    for (i, &pi) in pts.iter().enumerate() {
        events.clear();
        let mut base = 1i32;
        let mut wrap = 0i32;
        for (j, &pj) in pts.iter().enumerate() {
            if i == j {
                continue;
            }
            let v = pj - pi;
            let d = v.norm();
            if d > reach {
                continue;
            }
            if d == T::zero() {
                base += 1;
                continue;
            }
            let half = (d / (rho * T::lit(2.0))).min(T::one()).acos();
            let mut s = v.im.atan2(v.re) - half;
            if s < T::zero() {
                s = s + tau;
            }
            let e = s + half * T::lit(2.0);
            events.push((s, 1));
            if e >= tau {
                wrap += 1;
                events.push((e - tau, -1));
            } else {
                events.push((e, -1));
            }
        }
        if (base + wrap) as usize >= k || (base as usize + events.len() / 2) >= k {
            events.sort_by(|a, b| a.0.total_order(&b.0).then(b.1.cmp(&a.1)));
            let mut count = base + wrap;
            let mut best = (count, T::zero(), events.first().map_or(tau, |e| e.0));
            for (idx, &(angle, step)) in events.iter().enumerate() {
                count += step;
                if count > best.0 {
                    let next = events.get(idx + 1).map_or(tau, |e| e.0);
                    best = (count, angle, next);
                }
            }
            if best.0 as usize >= k {
                let theta = (best.1 + best.2) * T::lit(0.5);
                let c = pi + Complex::from_polar(rho, theta);
                let lim = rho * T::lit(1.0 + MEMBER_TOL);
                let mut members: Vec<usize> = (0..pts.len()).filter(|&m| (pts[m] - c).norm() <= lim).collect();
                if members.len() >= k {
                    members.sort_by(|&a, &b| (pts[a] - c).norm().total_order(&(pts[b] - c).norm()));
                    return Some((c, members));
                }
            }
        }
    }
    None
}

/// Greedy disk system: repeatedly take the largest `λ` for which some closed
/// disk of radius `λB/p` holds `λ` remaining points, retire those points and
/// keep the disk with doubled radius. Radii sum to `2B`, and outside the
/// disks the sorted distances to the points exceed `B·l/p`.
pub fn cartan_disks<T: Real>(points: &[Complex<T>], budget: T) -> Result<ExclusionSet<T>> {
    if points.is_empty() {
        return Err(Error::Precondition("Cartan disks need at least one point".into()));
    }
    if !(budget > T::zero()) || !budget.is_finite() {
        return Err(Error::Precondition("budget B must be positive".into()));
    }
    let p = points.len();
    let unit = budget / T::count(p);
    let mut rest: Vec<Complex<T>> = points.to_vec();
    let mut disks = Vec::new();
    let mut cap = p;
    while !rest.is_empty() {
        let top = cap.min(rest.len());
        let (lambda, center, members) = (1..=top)
            .rev()
            .find_map(|lam| disk_with_at_least(&rest, unit * T::count(lam), lam).map(|(c, m)| (lam, c, m)))
            .expect("a single point always fits");
        let mut take: Vec<usize> = members.into_iter().take(lambda).collect();
        take.sort_unstable_by(|a, b| b.cmp(a));
        for i in take {
            rest.swap_remove(i);
        }
        disks.push(Disk { center, radius: unit * T::count(2 * lambda) });
        cap = lambda;
    }
    Ok(ExclusionSet { disks, budget, source_points: p })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RadialShadow {
    /// Merged `[|c| - ρ, |c| + ρ]` intervals.
    pub intervals: Vec<(f64, f64)>,
    /// `Σ log(hi/lo)` over the part of the intervals inside `[1, ∞)`.
    pub log_measure: f64,
}

impl RadialShadow {
    pub fn covers(&self, r: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo <= r && r <= hi)
    }
}

pub fn project_radii<T: Real>(es: &ExclusionSet<T>) -> RadialShadow {
    let mut iv: Vec<(f64, f64)> = es
        .disks
        .iter()
        .map(|d| {
            let m = d.center.norm().as_f64();
            let rho = d.radius.as_f64();
            ((m - rho).max(0.0), m + rho)
        })
        .collect();
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in iv {
        match merged.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    let log_measure = merged.iter().filter(|iv| iv.1 > 1.0).map(|&(lo, hi)| (hi / lo.max(1.0)).ln()).sum::<f64>() + 0.0;
    RadialShadow { intervals: merged, log_measure }
}

/// `exp(-b) ≤ |q| ≤ exp(b)` given `log|q|`; symmetric under `q ↦ 1/q`.
pub fn two_sided(log_q: f64, bound: f64) -> bool {
    -bound <= log_q && log_q <= bound
}

#[derive(Debug, Clone)]
pub struct PointwiseOutcome<T> {
    pub report: Report,
    pub exclusion: ExclusionSet<T>,
    pub shadow: RadialShadow,
    /// Smallest clean radius from which `|log|f(z+η)/f(z)|| ≤ r^{σ-1+ε}` holds
    /// at every larger clean radius.
    pub threshold: Option<f64>,
}

struct CircleRow {
    r: f64,
    max_abs: f64,
    gauge: f64,
    gauge_error: f64,
    kept: usize,
}

/// Pointwise bound off the Cartan disks of zeros, poles and their `-η`
/// translates:
/// `|log|f(z+η)/f(z)|| ≤ A (T(γr,f)/r + n(γr) log^γ r log⁺ n(γr) / r)` with
/// `A` fitted over the first octave of clean radii, and the two-sided
/// `exp(∓r^{σ-1+ε})` bound from a reported threshold on.
pub fn pointwise_quotient_check<T: Real>(
    f: &FuncExpr<T>,
    eta: Complex<T>,
    gamma: T,
    radii: &[T],
    epsilon: T,
) -> Result<PointwiseOutcome<T>> {
    if !(gamma > T::one()) {
        return Err(Error::Precondition("gamma must exceed 1".into()));
    }
    if radii.is_empty() || radii.windows(2).any(|w| !(w[1] > w[0])) || !(radii[0] > T::one()) {
        return Err(Error::Precondition("radii must be increasing and exceed 1".into()));
    }
    let rmin = radii[0];
    let rmax = radii[radii.len() - 1];
    let reach = gamma * gamma * rmax;
    let div = f.divisor_in_disk(reach * T::lit(1.0 + 2.0 * NEAR_BAND))?;
    let mut pts = Vec::new();
    for &(c, m) in div.entries() {
        if c.norm() < reach {
            for _ in 0..m.unsigned_abs() {
                pts.push(c);
                pts.push(c - eta);
            }
        }
    }
    let budget = T::lit(BUDGET_FRACTION) * rmin;
    let exclusion = if pts.is_empty() {
        ExclusionSet { disks: Vec::new(), budget, source_points: 0 }
    } else {
        cartan_disks(&pts, budget)?
    };
    let shadow = project_radii(&exclusion);

    let mut report = Report::new("pointwise", to_spec(f).to_string());
    report
        .param("eta", to_pair(eta))
        .param("gamma", gamma.as_f64())
        .param("epsilon", epsilon.as_f64())
        .param("B", budget.as_f64())
        .param("disks", exclusion.disks.len())
        .param("logMeasure", shadow.log_measure);
    let sigma = match known_order(f) {
        Some(s) => s,
        None => {
            report.fail_with("non-finite-order");
            return Ok(PointwiseOutcome { report: report.finish(), exclusion, shadow, threshold: None });
        }
    };
    report.param("sigma", sigma);

    let clean: Vec<T> = radii.iter().copied().filter(|r| !shadow.covers(r.as_f64())).collect();
    report.param("exceptionalRadii", radii.len() - clean.len());
    if clean.is_empty() {
        report.flag("all-radii-exceptional");
        return Ok(PointwiseOutcome { report: report.finish(), exclusion, shadow, threshold: None });
    }
    let big: Vec<T> = clean.iter().map(|&r| nudge(&[&div], gamma * r)).collect();
    let tcurve = characteristic_curve(f, &big)?;
    let g = FuncExpr::shift(f.clone(), eta)?;
    let rows = clean
        .par_iter()
        .zip(tcurve.samples.par_iter())
        .map(|(&r, ts)| {
            let mut max_abs = T::zero();
            let mut kept = 0;
            for j in 0..CIRCLE_SAMPLES {
                let z = Complex::from_polar(r, T::lit(TAU * j as f64 / CIRCLE_SAMPLES as f64));
                if exclusion.contains(z) {
                    continue;
                }
                let v = g.eval_log_abs(z)? - f.eval_log_abs(z)?;
                max_abs = max_abs.max(v.abs());
                kept += 1;
            }
            let (n_p, n_z) = div.counts(ts.r);
            let n = T::lit((n_p + n_z) as f64);
            let lr = r.ln();
            let gauge = ts.t / r + n * lr.powf(gamma) * n.ln().max(T::zero()) / r;
            Ok(CircleRow {
                r: r.as_f64(),
                max_abs: max_abs.as_f64(),
                gauge: gauge.as_f64(),
                gauge_error: (ts.quad_error / r).as_f64(),
                kept,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<CircleRow> = rows.into_iter().filter(|c| c.kept > 0).collect();
    if rows.is_empty() {
        report.flag("all-samples-excluded");
        return Ok(PointwiseOutcome { report: report.finish(), exclusion, shadow, threshold: None });
    }
    // A is fitted over the first octave of clean radii, judged beyond it
    let fit_end = rows[0].r * FIT_OCTAVE;
    let a =
        rows.iter().filter(|c| c.r <= fit_end).map(|c| crate::growth::fit_one(c.max_abs, c.gauge)).fold(0.0, f64::max);
    report.param("A", a).param("fitEnd", fit_end);
    for c in &rows {
        let s = BoundSample::new(c.r, c.max_abs, a * c.gauge, a * c.gauge_error)
            .check("pointwise")
            .detail("kept", c.kept as f64);
        report.push(if c.r <= fit_end { s.fitting() } else { s });
    }
    let expo = sigma - 1.0 + epsilon.as_f64();
    let holds: Vec<bool> = rows.iter().map(|c| two_sided(c.max_abs, c.r.powf(expo))).collect();
    let from = holds.iter().rposition(|h| !h).map_or(0, |i| i + 1);
    let threshold = rows.get(from).map(|c| c.r);
    report.param("threshold", threshold);
    match threshold {
        Some(_) => {
            for c in &rows[from..] {
                report.push(BoundSample::new(c.r, c.max_abs, c.r.powf(expo), 0.0).check("two-sided"));
            }
        }
        None => {
            report.flag("two-sided-threshold-not-reached");
        }
    }
    Ok(PointwiseOutcome { report: report.finish(), exclusion, shadow, threshold })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn single_point() {
        let es = cartan_disks(&[c(0.0, 0.0)], 1.0).unwrap();
        assert_eq!(es.disks.len(), 1);
        assert_eq!(es.disks[0].radius, 2.0);
        assert!(es.disks[0].center.norm() < 1e-12);
    }

    #[test]
    fn separated_pair() {
        let pts = [c(0.0, 0.0), c(10.0, 0.0)];
        let es = cartan_disks(&pts, 1.0).unwrap();
        assert!((es.total_radius() - 2.0).abs() < 1e-12);
        assert!(!es.contains(c(5.0, 0.0)));
        assert!(sorted_distance_ok(&pts, 1.0, c(5.0, 0.0)));
    }

    #[test]
    fn clustered_points_share_a_disk() {
        let pts = [c(0.0, 0.0), c(0.01, 0.0), c(0.0, 0.01), c(5.0, 5.0)];
        let es = cartan_disks(&pts, 1.0).unwrap();
        assert_eq!(es.disks.len(), 2);
        assert!((es.total_radius() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn shadows() {
        let one =
            ExclusionSet { disks: vec![Disk { center: c(10.0, 0.0), radius: 1.0 }], budget: 0.5, source_points: 1 };
        let s = project_radii(&one);
        assert_eq!(s.intervals, vec![(9.0, 11.0)]);
        assert!((s.log_measure - (11.0f64 / 9.0).ln()).abs() < 1e-15);
        let nested = ExclusionSet {
            disks: vec![Disk { center: c(10.0, 0.0), radius: 1.0 }, Disk { center: c(10.1, 0.0), radius: 0.05 }],
            budget: 0.5,
            source_points: 2,
        };
        assert_eq!(project_radii(&nested).intervals, vec![(9.0, 11.0)]);
        let apart = ExclusionSet {
            disks: vec![Disk { center: c(3.0, 0.0), radius: 0.1 }, Disk { center: c(0.0, 7.0), radius: 0.2 }],
            budget: 0.15,
            source_points: 2,
        };
        assert_eq!(project_radii(&apart).intervals.len(), 2);
    }

    #[test]
    fn two_sided_is_reciprocal_symmetric() {
        for (v, b) in [(0.3, 0.5), (-0.7, 0.5), (2.0, 2.0), (-2.0, 2.0)] {
            assert_eq!(two_sided(v, b), two_sided(-v, b));
        }
    }
}
