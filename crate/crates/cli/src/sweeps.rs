//! Seeded random sweeps behind the lemma and Cartan entries of the registry.

use std::f64::consts::TAU;

use nevlab::cartan::{cartan_disks, sorted_distance_ok};
use nevlab::growth::{c_alpha, circle_average_bound_check};
use nevlab::{BoundSample, Complex64, Report};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::CliError;

/// Relative rounding slack granted to `log(1+x) ≤ C_α x^α`.
const CALPHA_SLACK: f64 = 1e-12;

/// Tolerance on `Σ radii = 2B`.
const RADIUS_SUM_TOL: f64 = 1e-12;

/// Outside points tested per random point set.
const OUTSIDE_PER_SET: usize = 1000;

pub const ALPHA_GRID: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

/// One row per `α`: the largest ratio `log(1+x)/x^α` seen over `samples`
/// random `x ∈ (0, 1e6)`, half of them log-uniform, against `C_α`.
pub fn calpha(alphas: &[f64], samples: usize, seed: u64) -> Result<Report, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::new("lemma-calpha", "log(1+x)");
    report.param("seed", seed).param("samples", samples).param("C1", c_alpha(1.0f64)?);
    for &alpha in alphas {
        let ca = c_alpha(alpha)?;
        let (mut worst_x, mut worst) = (f64::NAN, 0.0f64);
        for i in 0..samples {
            let x = if i % 2 == 0 { rng.random_range(0.0..1e6) } else { 10f64.powf(rng.random_range(-9.0..6.0)) };
            if x == 0.0 {
                continue;
            }
            let ratio = x.ln_1p() / x.powf(alpha);
            if ratio > worst {
                (worst_x, worst) = (x, ratio);
            }
        }
        report.push(
            BoundSample::new(worst_x, worst, ca * (1.0 + CALPHA_SLACK), 0.0).detail("alpha", alpha).detail("C", ca),
        );
    }
    Ok(report.finish())
}

/// Random `(w, r, α)` triples; `alpha` pins the exponent when given.
pub fn circle_average(alpha: Option<f64>, samples: usize, seed: u64) -> Result<Report, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::new("lemma-circle-average", "|re^{it} - w|^{-alpha}");
    report.param("seed", seed).param("samples", samples);
    for _ in 0..samples {
        let r = rng.random_range(0.1..50.0);
        let a = alpha.unwrap_or_else(|| rng.random_range(0.01..0.99));
        let w = Complex64::from_polar(rng.random_range(0.0..3.0 * r), rng.random_range(0.0..TAU));
        let ca = circle_average_bound_check(w, r, a)?;
        report.push(
            BoundSample::new(r, ca.lhs, ca.rhs, ca.quad_error)
                .detail("alpha", a)
                .detail("wRe", w.re)
                .detail("wIm", w.im),
        );
    }
    Ok(report.finish())
}

/// Random point sets in the unit square: the disk radii must sum to `2B` and
/// every sampled point outside the disks must satisfy the sorted-distance
/// criterion. Rows are indexed by `B`.
pub fn cartan_lemma(sets: usize, seed: u64) -> Result<Report, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::new("cartan-lemma", "random point sets");
    report.param("seed", seed).param("sets", sets).param("outsidePerSet", OUTSIDE_PER_SET);
    for _ in 0..sets {
        let p = rng.random_range(1..=50);
        let pts: Vec<Complex64> =
            (0..p).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let b = rng.random_range(0.01..2.0);
        let es = cartan_disks(&pts, b)?;
        let sum_err = (es.total_radius() - 2.0 * b).abs();
        let mut violations = 0usize;
        let mut seen = 0;
        while seen < OUTSIDE_PER_SET {
            let z = Complex64::new(rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0));
            if es.contains(z) {
                continue;
            }
            seen += 1;
            if !sorted_distance_ok(&pts, b, z) {
                violations += 1;
            }
        }
        report.push(BoundSample::new(b, sum_err, RADIUS_SUM_TOL, 0.0).check("total-radius").detail("points", p as f64));
        report.push(
            BoundSample::new(b, violations as f64, 0.0, 0.0)
                .check("sorted-distance")
                .detail("disks", es.disks.len() as f64),
        );
    }
    Ok(report.finish())
}
