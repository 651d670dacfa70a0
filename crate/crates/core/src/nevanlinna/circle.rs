//! Circle averages of `log⁺|f|` and `log⁻|f|`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::funcalg::{Divisor, FuncExpr};
use crate::quadrature::{integrate, Estimate, QuadSettings};
use crate::scalar::{angle_0_2pi, Real};

/// Divisor points within this fraction of `r` from the circle get a panel
/// breakpoint at their argument.
pub const NEAR_BAND: f64 = 0.05;

/// A divisor point closer than this fraction of `r` to the circle is a
/// collision.
pub const COLLISION: f64 = 1e-7;

/// Panel breakpoints for the circle `|z| = r`, after checking that no divisor
/// point lies on it.
pub(crate) fn breakpoints<T: Real>(div: Option<&Divisor<T>>, r: T) -> Result<Vec<T>> {
    let Some(div) = div else { return Ok(Vec::new()) };
    let mut out = Vec::new();
    for &(z, _) in div.entries() {
        let gap = (z.norm() - r).abs();
        if gap < T::lit(COLLISION) * r {
            return Err(Error::DivisorOnCircle { r: r.as_f64(), modulus: z.norm().as_f64() });
        }
        if gap < T::lit(NEAR_BAND) * r {
            out.push(angle_0_2pi(z));
        }
    }
    Ok(out)
}

/// `[(1/2π)∫ log⁺|f|, (1/2π)∫ log⁻|f|]` over `|z| = r`.
///
/// `div` should cover the closed disk of radius slightly above `r`; when it
/// is `None` no collision check or breakpoint placement happens.
pub(crate) fn log_parts<T: Real>(
    f: &FuncExpr<T>,
    r: T,
    div: Option<&Divisor<T>>,
    settings: &QuadSettings,
) -> Result<Estimate<T, 2>> {
    let bps = breakpoints(div, r)?;
    let quiet = T::lit(64.0) * T::epsilon();
    let mut est = integrate(
        |t: T| {
            let u = f.eval_log_abs(Complex::from_polar(r, t))?;
            let signal = if u.abs() <= quiet { T::zero() } else { u };
            Ok(([u.max(T::zero()), (-u).max(T::zero())], signal))
        },
        T::zero(),
        T::TAU(),
        &bps,
        true,
        settings,
    )?;
    for k in 0..2 {
        est.value[k] = est.value[k] / T::TAU();
        est.error[k] = est.error[k] / T::TAU();
    }
    Ok(est)
}
