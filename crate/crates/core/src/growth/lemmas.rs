//! The three elementary inequalities behind the proximity estimate.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadSettings};
use crate::scalar::{angle_0_2pi, Real};

/// `max_{x>0} log(1+x) / x^α` for `0 < α ≤ 1`; exactly 1 at `α = 1`.
///
/// Golden-section search in `t = log x`, where the target is unimodal. The
/// maximizer sits near `log(1+x) ≈ 1/α`, so the window reaches `t = 2/α`.
pub fn c_alpha<T: Real>(alpha: T) -> Result<T> {
    if !(alpha > T::zero() && alpha <= T::one()) {
        return Err(Error::Domain("c_alpha needs 0 < alpha <= 1".into()));
    }
    if alpha == T::one() {
        return Ok(T::one());
    }
    // log of the target, to keep the search well scaled
    let softplus = |t: T| if t > T::zero() { t + (-t).exp().ln_1p() } else { t.exp().ln_1p() };
    let g = |t: T| softplus(t).ln() - alpha * t;
    let inv_phi = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let (mut a, mut b) = (T::lit(1e-6).ln(), T::lit(1e6).ln().max(T::lit(2.0) / alpha));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    let tol = T::attainable(1e-12, 16.0);
    while b - a > tol {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    Ok(g((a + b) * T::lit(0.5)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl PointCheck {
    /// Rounding slack: `1e-12 · (1 + rhs)`.
    pub fn passes(&self) -> bool {
        self.lhs <= self.rhs + 1e-12 * (1.0 + self.rhs)
    }
}

/// `|log|z1/z2|| ≤ C_α (|z1-z2|/|z2|)^α + C_α (|z2-z1|/|z1|)^α`.
pub fn two_point_log_bound_check<T: Real>(z1: Complex<T>, z2: Complex<T>, alpha: T) -> Result<PointCheck> {
    if z1.norm() == T::zero() || z2.norm() == T::zero() {
        return Err(Error::Domain("two-point bound needs nonzero points".into()));
    }
    let c = c_alpha(alpha)?;
    let d = (z1 - z2).norm();
    let lhs = (z1.norm() / z2.norm()).ln().abs();
    let rhs = c * (d / z2.norm()).powf(alpha) + c * (d / z1.norm()).powf(alpha);
    Ok(PointCheck { lhs: lhs.as_f64(), rhs: rhs.as_f64() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CircleAverage {
    pub lhs: f64,
    pub rhs: f64,
    pub quad_error: f64,
}

impl CircleAverage {
    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }

    pub fn passes(&self) -> bool {
        self.margin() >= -crate::report::MARGIN_FACTOR * self.quad_error
    }
}

/// `(1/2π) ∫ dθ / |re^{iθ} - w|^α` against `1 / ((1-α) r^α)`.
pub fn circle_average_bound_check<T: Real>(w: Complex<T>, r: T, alpha: T) -> Result<CircleAverage> {
    if !(r > T::zero() && alpha > T::zero() && alpha < T::one()) {
        return Err(Error::Domain("circle average needs r > 0 and 0 < alpha < 1".into()));
    }
    let near = (w.norm() - r).abs() < T::lit(0.05) * r;
    let bps = if near { vec![angle_0_2pi(w)] } else { Vec::new() };
    let settings = QuadSettings { initial_panels: 16, rel_tol: 1e-10, abs_tol: 1e-12, max_evals: 1 << 17 };
    let est = integrate(
        |t: T| {
            let d = (Complex::from_polar(r, t) - w).norm();
            if d == T::zero() {
                return Err(Error::Quadrature { estimate: f64::INFINITY, error: f64::INFINITY });
            }
            Ok(([d.powf(-alpha)], T::one()))
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
    let lhs = est.value[0] / T::TAU();
    let rhs = T::one() / ((T::one() - alpha) * r.powf(alpha));
    Ok(CircleAverage { lhs: lhs.as_f64(), rhs: rhs.as_f64(), quad_error: (est.total_error() / T::TAU()).as_f64() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_alpha_half_matches_stationary_point() {
        // α log(1+x) = x/(1+x) at α = 1/2, solved by bisection
        let (mut lo, mut hi) = (1.0f64, 10.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if 0.5 * mid.ln_1p() - mid / (1.0 + mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let x = 0.5 * (lo + hi);
        assert!((x - 3.92).abs() < 0.01);
        let want = x.ln_1p() / x.sqrt();
        assert!((c_alpha(0.5f64).unwrap() - want).abs() < 1e-10);
        // the commonly quoted 0.8045 is rounded loosely; the maximum is 0.80474
        assert!((want - 0.804742).abs() < 1e-6);
    }

    #[test]
    fn c_alpha_rejects_out_of_range() {
        assert!(c_alpha(0.0f64).is_err());
        assert!(c_alpha(1.5f64).is_err());
        assert_eq!(c_alpha(1.0f64).unwrap(), 1.0);
    }

    #[test]
    fn two_point_examples() {
        let one = Complex::new(1.0f64, 0.0);
        let c = two_point_log_bound_check(one * 2.0, one, 1.0).unwrap();
        assert!((c.lhs - 2f64.ln()).abs() < 1e-15 && (c.rhs - 1.5).abs() < 1e-15 && c.passes());
        let c = two_point_log_bound_check(one, one, 0.5).unwrap();
        assert_eq!((c.lhs, c.rhs), (0.0, 0.0));
        assert!(c.passes());
        assert!(two_point_log_bound_check(one * 0.0, one, 0.5).is_err());
    }

    #[test]
    fn circle_average_examples() {
        let c = circle_average_bound_check(Complex::new(0.0f64, 0.0), 1.0, 0.5).unwrap();
        assert!((c.lhs - 1.0).abs() < 1e-12 && c.rhs == 2.0);
        let c = circle_average_bound_check(Complex::new(6.0f64, 0.0), 3.0, 0.5).unwrap();
        assert!(c.lhs <= 1.0 / 3f64.sqrt() && c.passes());
    }
}
