//! Complex log-gamma (Lanczos, g = 7, n = 9) with reflection.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cplx, ln_1p, Real};

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Principal `log Γ(z)` as `(log|Γ(z)|, arg Γ(z))`, the argument in `(-π, π]`.
pub fn lgamma_complex<T: Real>(z: Complex<T>) -> Result<(T, T)> {
    let l = lgamma(z)?;
    Ok((l.re, wrap_pi(l.im)))
}

fn wrap_pi<T: Real>(a: T) -> T {
    let tau = T::TAU();
    let mut w = a - tau * (a / tau).round();
    if w <= -T::PI() {
        w = w + tau;
    }
    w
}

/// A branch of `log Γ(z)`; the imaginary part is not reduced.
pub(crate) fn lgamma<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    if z.re < T::lit(0.5) {
        // log Γ(z) = log π - log sin(πz) - log Γ(1 - z)
        let one = Complex::new(T::one(), T::zero());
        let ls = ln_sin_pi(z)?;
        Ok(Complex::new(T::PI().ln(), T::zero()) - ls - lanczos(one - z))
    } else {
        Ok(lanczos(z))
    }
}

fn lanczos<T: Real>(z: Complex<T>) -> Complex<T> {
    let z = z - T::one();
    let mut x = Complex::new(T::lit(LANCZOS[0]), T::zero());
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x = x + Complex::new(T::lit(c), T::zero()) / (z + T::count(i));
    }
    let t = z + T::lit(LANCZOS_G + 0.5);
    let half_ln_2pi = T::lit(0.918_938_533_204_672_8);
    (z + T::lit(0.5)) * t.ln() - t + half_ln_2pi + x.ln()
}

/// A branch of `log sin(πz)`, computed after reducing `z` by the nearest
/// integer so large real parts lose no accuracy.
pub(crate) fn ln_sin_pi<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    let n = z.re.round();
    let w = Complex::new(z.re - n, z.im);
    if w.re == T::zero() && w.im == T::zero() {
        return Err(Error::GammaPole(n.as_f64()));
    }
    let pi = T::PI();
    let ipi = Complex::new(T::zero(), pi);
    // sin(πz) = (-1)^n sin(πw)
    let parity = if (n.as_f64() as i64).rem_euclid(2) == 1 { ipi } else { Complex::new(T::zero(), T::zero()) };
    let core = if w.im > T::one() {
        // sin(πw) = e^{-iπw}(1 - e^{2πiw})/(-2i)
        -ipi * w + ln_1p(-(ipi * w * T::lit(2.0)).exp()) - cplx::<T>(0.0, -2.0).ln()
    } else if w.im < -T::one() {
        // sin(πw) = e^{iπw}(1 - e^{-2πiw})/(2i)
        ipi * w + ln_1p(-(-ipi * w * T::lit(2.0)).exp()) - cplx::<T>(0.0, 2.0).ln()
    } else {
        (w * pi).sin().ln()
    };
    Ok(core + parity)
}
