//! Truncated product `F(z) = ∏_{n≥1} (1 + H^{z-n})^{-1}`, which solves
//! `F(z) = (1 + H^z) F(z + 1)` and has simple poles at
//! `n + (2k+1)πi / ln H` for `n ≥ 1`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{ln_1p_exp, Real};

/// Largest tolerated tail bound during evaluation.
pub const TAIL_LIMIT: f64 = 1e-8;

/// Bound on `Σ_{n>N} |log(1 + H^{z-n})|`.
pub fn tail_bound<T: Real>(h: T, truncation: usize, z: Complex<T>) -> T {
    let q = h.powf(z.re - T::count(truncation) - T::one());
    if q >= T::one() {
        return T::infinity();
    }
    q / ((T::one() - h.recip()) * (T::one() - q))
}

/// `log F_N(z)` for the truncated product.
pub(crate) fn log_hayman<T: Real>(h: T, truncation: usize, z: Complex<T>) -> Result<Complex<T>> {
    let tail = tail_bound(h, truncation, z);
    if !(tail <= T::lit(TAIL_LIMIT)) {
        return Err(Error::Domain(format!("product truncated at {truncation} is not accurate at Re z = {}", z.re)));
    }
    let lnh = h.ln();
    let mut acc = Complex::new(T::zero(), T::zero());
    for n in 1..=truncation {
        acc = acc - ln_1p_exp((z - T::count(n)) * lnh);
    }
    Ok(acc)
}

/// `(|log|F(z)| - log|1 + H^z| - log|F(z+1)||, tail budget)` for the
/// truncated product; the residual stays within the budget up to rounding.
pub fn functional_residual<T: Real>(h: T, truncation: usize, z: Complex<T>) -> Result<(T, T)> {
    let lhs = log_hayman(h, truncation, z)?.re;
    let rhs = ln_1p_exp(z * h.ln()).re + log_hayman(h, truncation, z + T::one())?.re;
    Ok(((lhs - rhs).abs(), tail_bound(h, truncation, z) + tail_bound(h, truncation, z + T::one())))
}

/// Pole nearest to `z` if it lies within `guard`.
pub(crate) fn pole_hit<T: Real>(h: T, z: Complex<T>, guard: T) -> Option<(Complex<T>, T)> {
    let n = z.re.round().max(T::one());
    let step = T::TAU() / h.ln();
    let k = ((z.im - step * T::lit(0.5)) / step).round();
    let p = Complex::new(n, (k + T::lit(0.5)) * step);
    let d = (z - p).norm();
    (d < guard).then_some((p, d))
}

/// Poles `n + (2k+1)πi/ln H` with modulus below `r`.
pub(crate) fn poles_within<T: Real>(h: T, r: T) -> Vec<Complex<T>> {
    let step = T::TAU() / h.ln();
    let mut out = Vec::new();
    let mut n = T::one();
    while n < r {
        let reach = (r * r - n * n).sqrt();
        let kmax = (reach / step - T::lit(0.5)).ceil();
        let mut k = -kmax - T::one();
        while k <= kmax {
            let p = Complex::new(n, (k + T::lit(0.5)) * step);
            if p.norm() < r {
                out.push(p);
            }
            k = k + T::one();
        }
        n = n + T::one();
    }
    out
}
