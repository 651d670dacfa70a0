//! An infinite-order function whose shift changes `N(r, f)` by a factor of at
//! least two: poles at `k = 2, 3, …` with multiplicity `γ_k = 2^{k-2}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::{BoundSample, Report};

/// `γ_k` overflows `f64` shortly after this radius.
pub const MAX_RADIUS: f64 = 1000.0;

/// Relative agreement demanded between the direct difference and its
/// rearranged form.
pub const IDENTITY_TOL: f64 = 1e-12;

fn gamma_k(k: u32) -> f64 {
    2f64.powi(k as i32 - 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CounterexampleCounts {
    pub r: f64,
    /// `N(r, f)`.
    pub n: f64,
    /// `N(r, f(z+1))`.
    pub n_shift: f64,
    /// `γ_2 log r + Σ_{2≤k<r} (γ_{k+1} - γ_k) log(r/k)`.
    pub rearranged: f64,
}

impl CounterexampleCounts {
    /// `(N(r, f(z+1)) - N(r, f)) / N(r, f)`.
    pub fn ratio(&self) -> f64 {
        (self.n_shift - self.n) / self.n
    }

    pub fn identity_error(&self) -> f64 {
        let direct = self.n_shift - self.n;
        (direct - self.rearranged).abs() / direct.abs().max(f64::MIN_POSITIVE)
    }
}

/// Exact divisor sums at radius `r`.
pub fn counterexample_counting(r: f64) -> Result<CounterexampleCounts> {
    if !(r > 2.0 && r <= MAX_RADIUS) {
        return Err(Error::Precondition(format!("radius must lie in (2, {MAX_RADIUS}]")));
    }
    let below = |k: u32| (k as f64) < r;
    // poles of f(z+1) sit at k-1 with multiplicity γ_k
    let n: f64 = (2..).take_while(|&k| below(k)).map(|k| gamma_k(k) * (r / k as f64).ln()).sum();
    let n_shift: f64 = (1..).take_while(|&j| below(j)).map(|j| gamma_k(j + 1) * (r / j as f64).ln()).sum();
    let rearranged = gamma_k(2) * r.ln()
        + (2..).take_while(|&k| below(k)).map(|k| (gamma_k(k + 1) - gamma_k(k)) * (r / k as f64).ln()).sum::<f64>();
    Ok(CounterexampleCounts { r, n, n_shift, rearranged })
}

/// Ratio `≥ 1` and the rearrangement identity on `samples` log-spaced radii in
/// `[3, r_max]`.
pub fn infinite_order_counterexample(r_max: f64, samples: usize) -> Result<Report> {
    if !(r_max >= 3.0) || samples < 2 {
        return Err(Error::Precondition("need r_max >= 3 and at least two radii".into()));
    }
    let mut report = Report::new("counterexample", "poles at k>=2 with multiplicity 2^(k-2)");
    report.param("rMax", r_max).param("samples", samples);
    let step = (r_max / 3.0).ln() / (samples - 1) as f64;
    for i in 0..samples {
        let r = if i + 1 == samples { r_max } else { 3.0 * (step * i as f64).exp() };
        let c = counterexample_counting(r)?;
        let err = c.identity_error();
        if !(err <= IDENTITY_TOL) {
            report.fail_with("identity-mismatch");
        }
        report.push(
            BoundSample::new(r, 1.0, c.ratio(), 0.0)
                .detail("N", c.n)
                .detail("NShift", c.n_shift)
                .detail("identityError", err),
        );
    }
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_term_value_at_three() {
        let c = counterexample_counting(3.0).unwrap();
        assert!((c.n - 1.5f64.ln()).abs() < 1e-15);
        assert!((c.n_shift - (3f64.ln() + 2.0 * 1.5f64.ln())).abs() < 1e-15);
        assert!((c.ratio() - (3f64.ln() + 1.5f64.ln()) / 1.5f64.ln()).abs() < 1e-14);
    }
}
