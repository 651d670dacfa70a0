//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the kernels are generic over. Implemented for `f32` and `f64`.
///
/// Tolerances inside the crate are written for `f64`; the `f32` instantiation
/// works, but relative accuracies degrade to roughly `1e-5`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Converts an integer count.
    #[inline]
    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Total order through the `f64` image (NaN sorts last).
    #[inline]
    fn total_order(&self, other: &Self) -> std::cmp::Ordering {
        self.as_f64().total_cmp(&other.as_f64())
    }

    /// `max(tol, k * epsilon)`: keeps a requested tolerance attainable in the
    /// scalar's precision.
    #[inline]
    fn attainable(tol: f64, k: f64) -> Self {
        let floor = Self::epsilon() * Self::lit(k);
        Self::lit(tol).max(floor)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Point of the complex plane. Constructors in this crate reject non-finite
/// components.
pub type ComplexPoint<T> = Complex<T>;

pub(crate) fn is_finite<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

pub(crate) fn cplx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

pub(crate) fn to_pair<T: Real>(z: Complex<T>) -> [f64; 2] {
    [z.re.as_f64(), z.im.as_f64()]
}

/// Argument mapped to `[0, 2π)`.
pub(crate) fn angle_0_2pi<T: Real>(z: Complex<T>) -> T {
    let a = z.im.atan2(z.re);
    if a < T::zero() {
        a + T::TAU()
    } else {
        a
    }
}

/// `log(1 + x)` for complex `x`, accurate when `|x|` is small.
pub(crate) fn ln_1p<T: Real>(x: Complex<T>) -> Complex<T> {
    let ax = x.norm();
    if ax < T::lit(1e-4) {
        // x - x^2/2 + x^3/3 - x^4/4
        let x2 = x * x;
        x - x2 * T::lit(0.5) + x2 * x / T::lit(3.0) - x2 * x2 * T::lit(0.25)
    } else {
        (Complex::new(T::one(), T::zero()) + x).ln()
    }
}

/// `log(1 + e^w)` without overflow.
pub(crate) fn ln_1p_exp<T: Real>(w: Complex<T>) -> Complex<T> {
    if w.re > T::zero() {
        w + ln_1p((-w).exp())
    } else {
        ln_1p(w.exp())
    }
}

/// `log(2 cosh w)` without overflow.
pub(crate) fn ln_2cosh<T: Real>(w: Complex<T>) -> Complex<T> {
    if w.re >= T::zero() {
        w + ln_1p((w * T::lit(-2.0)).exp())
    } else {
        -w + ln_1p((w * T::lit(2.0)).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_2cosh_matches_direct_and_survives_overflow() {
        let w = Complex::new(0.7_f64, -0.4);
        let direct = (w.cosh() * 2.0).ln();
        assert!((ln_2cosh(w) - direct).norm() < 1e-14);
        let big = ln_2cosh(Complex::new(900.0_f64, 0.0));
        assert!((big.re - 900.0).abs() < 1e-12);
    }

    #[test]
    fn ln_1p_small_argument() {
        let x = Complex::new(1e-9_f64, 2e-9);
        assert!((ln_1p(x) - x).norm() < 1e-17);
    }
}
