//! Nevanlinna functionals `m(r, f)`, `N(r, f)`, `T(r, f)` and the
//! Poisson–Jensen reconstruction.

mod circle;

use std::fmt::Write as _;

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::funcalg::{to_spec, Divisor, FuncExpr};
use crate::quadrature::{integrate, QuadSettings};
use crate::scalar::{angle_0_2pi, Real};

pub use circle::{COLLISION, NEAR_BAND};

/// Radii closer than this fraction to a divisor modulus are moved outward by
/// the same fraction.
pub const NUDGE: f64 = 1e-6;

/// Quadrature settings for circle averages.
pub fn default_settings() -> QuadSettings {
    QuadSettings { initial_panels: 32, rel_tol: 1e-11, abs_tol: 1e-13, max_evals: 1 << 17 }
}

/// `m(r, f)` and `m(r, 1/f)` from one pass over the circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProximityPair<T> {
    pub m: T,
    pub m_inv: T,
    pub quad_error: T,
    pub quad_error_inv: T,
    pub nodes: usize,
    pub converged: bool,
}

/// Divisor on a disk slightly larger than `r`, or `None` when the tree cannot
/// enumerate it (evaluation still works, without collision checks).
pub(crate) fn guard_divisor<T: Real>(f: &FuncExpr<T>, r: T) -> Result<Option<Divisor<T>>> {
    let reach = r * T::lit(1.0 + 2.0 * NEAR_BAND);
    match f.divisor_in_disk(reach) {
        Ok(d) => Ok(Some(d)),
        Err(Error::Unsupported(_) | Error::Precondition(_) | Error::RootIsolation { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn proximity_pair<T: Real>(f: &FuncExpr<T>, r: T) -> Result<ProximityPair<T>> {
    check_radius(r)?;
    let div = guard_divisor(f, r)?;
    proximity_with(f, r, div.as_ref(), &default_settings())
}

pub(crate) fn proximity_with<T: Real>(
    f: &FuncExpr<T>,
    r: T,
    div: Option<&Divisor<T>>,
    settings: &QuadSettings,
) -> Result<ProximityPair<T>> {
    let est = circle::log_parts(f, r, div, settings)?;
    Ok(ProximityPair {
        m: est.value[0],
        m_inv: est.value[1],
        quad_error: est.error[0],
        quad_error_inv: est.error[1],
        nodes: est.evals,
        converged: est.converged,
    })
}

/// `(m(r, f), quadError)`.
pub fn proximity<T: Real>(f: &FuncExpr<T>, r: T) -> Result<(T, T)> {
    let p = proximity_pair(f, r)?;
    Ok((p.m, p.quad_error))
}

/// `N(r, f)` from the exact divisor.
pub fn counting<T: Real>(f: &FuncExpr<T>, r: T) -> Result<T> {
    check_radius(r)?;
    Ok(f.divisor_in_disk(r)?.counting_poles(r))
}

/// Multiplicity-weighted `(poles, zeros)` with modulus below `r`.
pub fn unintegrated_counting<T: Real>(f: &FuncExpr<T>, r: T) -> Result<(u64, u64)> {
    check_radius(r)?;
    Ok(f.divisor_in_disk(r)?.counts(r))
}

fn check_radius<T: Real>(r: T) -> Result<()> {
    if r > T::zero() && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Precondition("radius must be positive and finite".into()))
    }
}

/// One radius of a characteristic curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicSample<T> {
    pub r: T,
    pub m: T,
    /// `N(r, f)`.
    pub n: T,
    /// `T(r, f) = m + N`.
    pub t: T,
    pub quad_error: T,
    pub nodes: usize,
    /// `m(r, 1/f)`.
    pub m_inv: T,
    /// `N(r, 1/f)`.
    pub n_inv: T,
    pub quad_error_inv: T,
    pub converged: bool,
    /// Requested radius when it was moved off a divisor modulus.
    pub nudged_from: Option<T>,
}

impl<T: Real> CharacteristicSample<T> {
    /// `T(r, 1/f) = m(r, 1/f) + N(r, 1/f)`.
    pub fn t_inv(&self) -> T {
        self.m_inv + self.n_inv
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicCurve<T> {
    pub samples: Vec<CharacteristicSample<T>>,
    /// JSON spec of the function.
    pub subject: String,
}

impl<T: Real> CharacteristicCurve<T> {
    pub fn radii(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.r).collect()
    }

    /// CSV with header `r,m,N,T,quadError,nodes`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,m,N,T,quadError,nodes\n");
        for s in &self.samples {
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                s.r.as_f64(),
                // `+ 0.0` turns an exact -0 into 0
                s.m.as_f64() + 0.0,
                s.n.as_f64() + 0.0,
                s.t.as_f64() + 0.0,
                s.quad_error.as_f64(),
                s.nodes
            );
        }
        out
    }
}

/// Moves `r` outward in steps of `NUDGE · r` until no divisor modulus is
/// within half a step.
pub(crate) fn nudge<T: Real>(divs: &[&Divisor<T>], r: T) -> T {
    let mut r = r;
    for _ in 0..16 {
        let close = divs.iter().flat_map(|d| d.moduli()).any(|a| (a - r).abs() < T::lit(0.5 * NUDGE) * r);
        if !close {
            break;
        }
        r = r + T::lit(NUDGE) * r;
    }
    r
}

/// Samples `(m, N, T)` on the given radii, in parallel.
pub fn characteristic_curve<T: Real>(f: &FuncExpr<T>, radii: &[T]) -> Result<CharacteristicCurve<T>> {
    characteristic_curve_with(f, radii, &default_settings())
}

pub fn characteristic_curve_with<T: Real>(
    f: &FuncExpr<T>,
    radii: &[T],
    settings: &QuadSettings,
) -> Result<CharacteristicCurve<T>> {
    if radii.is_empty() {
        return Err(Error::Precondition("no radii".into()));
    }
    for w in radii.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Precondition("radii must be strictly increasing".into()));
        }
    }
    check_radius(radii[0])?;
    let rmax = radii[radii.len() - 1];
    check_radius(rmax)?;
    let div = f.divisor_in_disk(rmax * T::lit(1.0 + 2.0 * NEAR_BAND))?;
    let samples = radii
        .par_iter()
        .map(|&r0| {
            let r = nudge(&[&div], r0);
            let p = proximity_with(f, r, Some(&div), settings)?;
            let n = div.counting_poles(r);
            let n_inv = div.counting_zeros(r);
            Ok(CharacteristicSample {
                r,
                m: p.m,
                n,
                t: p.m + n,
                quad_error: p.quad_error,
                nodes: p.nodes,
                m_inv: p.m_inv,
                n_inv,
                quad_error_inv: p.quad_error_inv,
                converged: p.converged,
                nudged_from: (r != r0).then_some(r0),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CharacteristicCurve { samples, subject: to_spec(f).to_string() })
}

/// `k` log-spaced radii per decade from `r_min` to `r_max` (both included).
pub fn log_grid<T: Real>(r_min: T, r_max: T, per_decade: usize) -> Vec<T> {
    let decades = (r_max / r_min).log10();
    let n = (decades * T::count(per_decade)).ceil().as_f64().max(1.0) as usize;
    (0..=n).map(|k| r_min * (decades * T::count(k) / T::count(n) * T::LN_10()).exp()).collect()
}

/// Right side of the Poisson–Jensen formula at `z`, `|z| < big_r`.
pub fn poisson_jensen_reconstruct<T: Real>(f: &FuncExpr<T>, big_r: T, z: Complex<T>) -> Result<T> {
    Ok(poisson_jensen_with_error(f, big_r, z)?.0)
}

/// Reconstruction together with its quadrature error estimate.
pub fn poisson_jensen_with_error<T: Real>(f: &FuncExpr<T>, big_r: T, z: Complex<T>) -> Result<(T, T)> {
    check_radius(big_r)?;
    if !(z.norm() < big_r) {
        return Err(Error::Precondition("reconstruction point must lie inside the disk".into()));
    }
    let div = f.divisor_in_disk(big_r * T::lit(1.0 + 2.0 * NEAR_BAND))?;
    let mut bps = circle::breakpoints(Some(&div), big_r)?;
    if z.norm() > T::lit(0.3) * big_r {
        bps.push(angle_0_2pi(z));
    }
    let r2 = big_r * big_r;
    let inner = r2 - z.norm_sqr();
    let settings = QuadSettings { initial_panels: 32, rel_tol: 1e-12, abs_tol: 1e-13, max_evals: 1 << 17 };
    let est = integrate(
        |phi: T| {
            let w = Complex::from_polar(big_r, phi);
            let u = f.eval_log_abs(w)?;
            Ok(([u * inner / (w - z).norm_sqr()], T::one()))
        },
        T::zero(),
        T::TAU(),
        &bps,
        false,
        &settings,
    )?;
    if !est.converged {
        return Err(Error::Quadrature { estimate: est.value[0].as_f64(), error: est.total_error().as_f64() });
    }
    let mut acc = est.value[0] / T::TAU();
    for &(a, m) in div.entries() {
        if a.norm() < big_r {
            let blaschke = ((Complex::new(r2, T::zero()) - a.conj() * z) / ((z - a) * big_r)).norm().ln();
            acc = acc - blaschke * T::lit(m as f64);
        }
    }
    Ok((acc, est.total_error() / T::TAU()))
}
