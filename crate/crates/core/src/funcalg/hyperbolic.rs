//! Hyperbolic gamma function `G(a, b; z)`.
//!
//! In the strip `|Im z| < (a+b)/2`, `G(z) = exp(i I(z))` with
//!
//! ```text
//! I(z) = ∫_0^∞ dy/y [ sin(2yz) / (2 sinh(ay) sinh(by)) - z/(aby) ].
//! ```
//!
//! Elsewhere `G` is continued by `G(z + ia/2) = 2cosh(πz/b) G(z - ia/2)`.
//! Poles sit at `-i((k+½)a + (l+½)b)` and zeros at `+i((k+½)a + (l+½)b)`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadSettings};
use crate::scalar::{ln_2cosh, Real};

/// Divisor guard used for evaluation.
pub const LATTICE_GUARD: f64 = 1e-12;

/// Upper bound on continuation steps before giving up.
const MAX_RUNGS: usize = 1_000_000;

/// Above `|Re z| > ASYMPTOTIC_REACH * max(a, b)` the strip value is taken from
/// the quadratic asymptotics; the neglected term is below `e^{-12π}`.
const ASYMPTOTIC_REACH: f64 = 6.0;

/// `log |G(a, b; z)|`.
pub fn hyperbolic_gamma_log_abs<T: Real>(a: T, b: T, z: Complex<T>) -> Result<T> {
    Ok(log_hyperbolic_gamma(a, b, z)?.re)
}

/// Nearest lattice point within the guard, as `(point, distance)`.
pub(crate) fn lattice_hit<T: Real>(a: T, b: T, z: Complex<T>) -> Option<(Complex<T>, T)> {
    let tol = T::lit(LATTICE_GUARD);
    if z.re.abs() >= tol {
        return None;
    }
    let h = z.im.abs();
    let half = T::lit(0.5);
    let mut k = T::zero();
    while (k + half) * a + half * b <= h + tol {
        let rest = h - (k + half) * a;
        let l = (rest / b - half).round().max(T::zero());
        let y = (k + half) * a + (l + half) * b;
        let d = Complex::new(z.re, z.im.abs() - y).norm();
        if d < tol {
            return Some((Complex::new(T::zero(), y * z.im.signum()), d));
        }
        k = k + T::one();
    }
    None
}

pub(crate) fn log_hyperbolic_gamma<T: Real>(a: T, b: T, z: Complex<T>) -> Result<Complex<T>> {
    if !(a > T::zero() && b > T::zero()) {
        return Err(Error::Domain("hyperbolic gamma needs a > 0 and b > 0".into()));
    }
    if let Some((p, d)) = lattice_hit(a, b, z) {
        return Err(Error::DivisorHit { re: p.re.as_f64(), im: p.im.as_f64(), distance: d.as_f64() });
    }
    let half_a = a * T::lit(0.5);
    let ia = Complex::new(T::zero(), a);
    let ia2 = Complex::new(T::zero(), half_a);
    let pi_b = T::PI() / b;
    let mut w = z;
    let mut acc = Complex::new(T::zero(), T::zero());
    let mut rungs = 0usize;
    while w.im > half_a {
        acc = acc + ln_2cosh((w - ia2) * pi_b);
        w = w - ia;
        rungs += 1;
        if rungs > MAX_RUNGS {
            return Err(Error::Domain("continuation ladder too long".into()));
        }
    }
    while w.im < -half_a {
        acc = acc - ln_2cosh((w + ia2) * pi_b);
        w = w + ia;
        rungs += 1;
        if rungs > MAX_RUNGS {
            return Err(Error::Domain("continuation ladder too long".into()));
        }
    }
    Ok(acc + strip_log(a, b, w)?)
}

/// `log G` for `|Im w| ≤ a/2`.
fn strip_log<T: Real>(a: T, b: T, w: Complex<T>) -> Result<Complex<T>> {
    if w.re.abs() > T::lit(ASYMPTOTIC_REACH) * a.max(b) {
        Ok(asymptotic_log(a, b, w))
    } else {
        integral_log(a, b, w)
    }
}

fn asymptotic_log<T: Real>(a: T, b: T, w: Complex<T>) -> Complex<T> {
    let ab = a * b;
    let chi = w * w * (T::PI() / (T::lit(2.0) * ab))
        + Complex::new(T::PI() * (a * a + b * b) / (T::lit(24.0) * ab), T::zero());
    let i = Complex::new(T::zero(), T::one());
    if w.re > T::zero() {
        -i * chi
    } else {
        i * chi
    }
}

fn integral_log<T: Real>(a: T, b: T, z: Complex<T>) -> Result<Complex<T>> {
    let decay = a + b - T::lit(2.0) * z.im.abs();
    if decay <= T::zero() {
        return Err(Error::Domain("integral representation outside its strip".into()));
    }
    let y_max = T::lit(37.0) / decay;
    let settings = QuadSettings { initial_panels: 24, rel_tol: 1e-13, abs_tol: 1e-13, max_evals: 1 << 16 };
    let est = integrate(
        |y: T| {
            let g = integrand(a, b, z, y);
            Ok(([g.re, g.im], T::one()))
        },
        T::zero(),
        y_max,
        &[],
        false,
        &settings,
    )?;
    if !est.converged && est.total_error() > T::lit(1e-10) {
        return Err(Error::Quadrature { estimate: est.value[0].as_f64(), error: est.total_error().as_f64() });
    }
    // the correction term -z/(aby) integrates to -z/(abY) past Y
    let tail = -z / (a * b * y_max);
    let integral = Complex::new(est.value[0], est.value[1]) + tail;
    Ok(Complex::new(T::zero(), T::one()) * integral)
}

fn integrand<T: Real>(a: T, b: T, z: Complex<T>, y: T) -> Complex<T> {
    let ab = a * b;
    if y == T::zero() {
        return -z * (z * z * T::lit(4.0) + a * a + b * b) / (T::lit(6.0) * ab);
    }
    if (a + b) * y < T::lit(30.0) {
        let s = sinc_m1(z * (T::lit(2.0) * y));
        let al = sinhc_m1(a * y);
        let be = sinhc_m1(b * y);
        z * (s - al - be - al * be) / (ab * y * y * (T::one() + al) * (T::one() + be))
    } else {
        let i = Complex::new(T::zero(), T::one());
        let damp = -(a + b) * y;
        let e1 = (i * z * (T::lit(2.0) * y) + damp).exp();
        let e2 = (-i * z * (T::lit(2.0) * y) + damp).exp();
        let sin_damped = (e1 - e2) / (i * T::lit(2.0));
        let den = (T::one() - (T::lit(-2.0) * a * y).exp()) * (T::one() - (T::lit(-2.0) * b * y).exp());
        (sin_damped * T::lit(2.0) / den - z / (ab * y)) / y
    }
}

/// `sin(x)/x - 1`.
fn sinc_m1<T: Real>(x: Complex<T>) -> Complex<T> {
    if x.norm() < T::lit(0.5) {
        let x2 = x * x;
        let mut term = Complex::new(T::one(), T::zero());
        let mut sum = Complex::new(T::zero(), T::zero());
        for k in 1..=7usize {
            term = -term * x2 / T::count((2 * k) * (2 * k + 1));
            sum = sum + term;
        }
        sum
    } else {
        x.sin() / x - T::one()
    }
}

/// `sinh(t)/t - 1`.
fn sinhc_m1<T: Real>(t: T) -> T {
    if t.abs() < T::lit(0.5) {
        let t2 = t * t;
        let mut term = T::one();
        let mut sum = T::zero();
        for k in 1..=7usize {
            term = term * t2 / T::count((2 * k) * (2 * k + 1));
            sum = sum + term;
        }
        sum
    } else {
        t.sinh() / t - T::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn unit_at_origin_and_unimodular_on_real_axis() {
        assert!(hyperbolic_gamma_log_abs(1.0, 1.0, c(0.0, 0.0)).unwrap().abs() < 1e-12);
        for x in [0.3, -1.7, 4.0, 9.0] {
            assert!(hyperbolic_gamma_log_abs(1.0, 1.3, c(x, 0.0)).unwrap().abs() < 1e-11);
        }
    }

    #[test]
    fn functional_equation() {
        for (a, b) in [(1.0, 1.0), (0.7, 1.6)] {
            for z in [c(0.3, 0.0), c(-1.2, 0.1), c(2.5, -0.2)] {
                let up = log_hyperbolic_gamma(a, b, z + c(0.0, a / 2.0)).unwrap();
                let dn = log_hyperbolic_gamma(a, b, z - c(0.0, a / 2.0)).unwrap();
                let want = ((z * std::f64::consts::PI / b).cosh() * 2.0).norm().ln();
                assert!((up.re - dn.re - want).abs() < 1e-10, "a={a} b={b} z={z}");
            }
        }
    }

    #[test]
    fn dual_functional_equation() {
        // G(z + ib/2) = 2cosh(πz/a) G(z - ib/2), with b inside the strip
        let (a, b) = (1.0, 0.8);
        let z = c(0.4, 0.05);
        let up = hyperbolic_gamma_log_abs(a, b, z + c(0.0, b / 2.0)).unwrap();
        let dn = hyperbolic_gamma_log_abs(a, b, z - c(0.0, b / 2.0)).unwrap();
        let want = ((z * std::f64::consts::PI / a).cosh() * 2.0).norm().ln();
        assert!((up - dn - want).abs() < 1e-10);
    }

    #[test]
    fn asymptotic_matches_integral_at_switch() {
        let (a, b) = (1.0, 1.2);
        for w in [c(6.5, 0.2), c(-7.5, -0.4)] {
            let q = integral_log(a, b, w).unwrap();
            let s = asymptotic_log(a, b, w);
            assert!((q - s).norm() < 1e-11, "{q} vs {s}");
        }
    }

    #[test]
    fn ladder_round_trip() {
        let z = c(0.3, 2.2);
        let v = log_hyperbolic_gamma(1.0, 1.0, z).unwrap().re;
        let down = log_hyperbolic_gamma(1.0, 1.0, z - c(0.0, 1.0)).unwrap().re;
        let step = ln_2cosh((z - c(0.0, 0.5)) * std::f64::consts::PI).re;
        assert!((down + step - v).abs() < 1e-9);
    }

    #[test]
    fn lattice_points_rejected() {
        assert!(matches!(log_hyperbolic_gamma(1.0, 1.0, c(0.0, -1.0)), Err(Error::DivisorHit { .. })));
        assert!(matches!(log_hyperbolic_gamma(1.0, 2.0, c(0.0, 2.5)), Err(Error::DivisorHit { .. })));
        assert!(log_hyperbolic_gamma(1.0, 1.0, c(0.0, -1.5)).is_ok());
    }
}
