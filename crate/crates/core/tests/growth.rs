use std::f64::consts::{E, PI};

use nevlab::funcalg::{FuncExpr, Polynomial};
use nevlab::growth::*;
use nevlab::nevanlinna::{characteristic_curve, log_grid};
use nevlab::{Complex64, FuncExpr64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn exp_poly(coeffs: &[f64]) -> FuncExpr64 {
    FuncExpr::exp_of(FuncExpr::poly_real(coeffs).unwrap()).unwrap()
}

#[test]
fn c_alpha_values() {
    assert_eq!(c_alpha(1.0f64).unwrap(), 1.0);
    // stationary point of log(1+x)/sqrt(x): x/(1+x) = log(1+x)/2
    let x: f64 = 3.921553; // root of 2x = (1+x) log(1+x), found by bisection offline
    assert!((2.0 * x - (1.0 + x) * x.ln_1p()).abs() < 1e-5);
    assert!((c_alpha(0.5f64).unwrap() - x.ln_1p() / x.sqrt()).abs() < 1e-9);
}

#[test]
fn c_alpha_is_not_monotone_on_grid() {
    // falls until α = 0.7, then rises back to C_1 = 1
    let vals: Vec<f64> = (1..=10).map(|k| c_alpha(k as f64 / 10.0).unwrap()).collect();
    assert!(vals[..7].windows(2).all(|w| w[1] < w[0]), "{vals:?}");
    assert!(vals[6..].windows(2).all(|w| w[1] > w[0]), "{vals:?}");
}

#[test]
fn c_alpha_small_exponent() {
    // the maximizer of log(1+x)/x^0.05 lies near x = e^20, far outside [1e-6, 1e6]
    let alpha = 0.05f64;
    let brute = (0..4000).map(|i| (i as f64 * 0.01).exp()).map(|x| x.ln_1p() / x.powf(alpha)).fold(0.0, f64::max);
    let ca = c_alpha(alpha).unwrap();
    assert!(ca >= brute * (1.0 - 1e-14) && ca - brute < 1e-6, "{ca} {brute}");
}

#[test]
fn two_point_random_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let polar = |rng: &mut ChaCha8Rng| {
        Complex64::from_polar(10f64.powf(rng.random_range(-3.0..3.0)), rng.random_range(0.0..std::f64::consts::TAU))
    };
    for alpha in [0.25, 0.5, 0.75, 1.0] {
        for _ in 0..25_000 {
            let (z1, z2) = (polar(&mut rng), polar(&mut rng));
            let p = two_point_log_bound_check(z1, z2, alpha).unwrap();
            assert!(p.passes(), "{z1} {z2} {alpha}: {p:?}");
        }
    }
}

#[test]
fn circle_average_far_point() {
    let r = 3.0;
    let ca = circle_average_bound_check(c(2.0 * r, 0.0), r, 0.5).unwrap();
    assert!(ca.lhs <= 1.0 / r.sqrt() && ca.passes());
}

#[test]
fn circle_average_random_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..300 {
        let r = rng.random_range(0.1..20.0);
        let alpha = rng.random_range(0.05..0.95);
        let w = Complex64::from_polar(rng.random_range(0.0..3.0 * r), rng.random_range(0.0..std::f64::consts::TAU));
        let ca = circle_average_bound_check(w, r, alpha).unwrap();
        assert!(ca.passes(), "{w} {r} {alpha}: {ca:?}");
    }
}

#[test]
fn fund_est_closed_form() {
    let f = exp_poly(&[0.0, 1.0]);
    let p = BoundParams { alpha: 0.5, big_r: 20.0, big_r_prime: 30.0, eta: c(1.0, 0.0), epsilon: 0.1, gamma: 2.0 };
    let est = fund_est_rhs(&f, 10.0, &p).unwrap();
    // m(R, e^z) = m(R, e^{-z}) = R/π and no divisor
    assert!((est.proximity_sum - 40.0 / PI).abs() < 1e-9);
    assert_eq!(est.counting_sum, 0.0);
    assert!((est.rhs - 40.0 / 81.0 * 40.0 / PI).abs() < 1e-9, "{}", est.rhs);
    let (lhs, qe) = fund_est_lhs(&f, c(1.0, 0.0), 10.0).unwrap();
    assert!((lhs - 1.0).abs() < 1e-9 && qe < 1e-9);
}

#[test]
fn fund_est_gamma_example() {
    let p = BoundParams { alpha: 0.5, big_r: 25.0, big_r_prime: 40.0, eta: c(1.0, 0.0), epsilon: 0.1, gamma: 2.0 };
    let f = FuncExpr64::gamma();
    let est = fund_est_rhs(&f, 10.0, &p).unwrap();
    let (lhs, qe) = fund_est_lhs(&f, c(1.0, 0.0), 10.0).unwrap();
    assert!((lhs - 10f64.ln()).abs() < 1e-6 + 3.0 * qe);
    assert!(lhs <= est.rhs);
}

#[test]
fn quotient_proximity_examples() {
    let radii = log_grid(10.0, 100.0, 12);
    let rep = verify_quotient_proximity(&FuncExpr64::gamma(), c(1.0, 0.0), &radii, 0.1).unwrap();
    assert!(rep.passed(), "{}", rep.to_json());
    let rep = verify_quotient_proximity(&exp_poly(&[0.0, 0.0, 1.0]), c(1.0, 0.0), &radii, 0.1).unwrap();
    assert!(rep.passed(), "{}", rep.to_json());
}

#[test]
fn infinite_order_input_is_flagged() {
    let g = FuncExpr::exp_of(exp_poly(&[0.0, 1.0])).unwrap();
    let rep = verify_quotient_proximity(&g, c(2f64.ln(), 0.0), &[2.0, 3.0, 4.0], 0.1).unwrap();
    assert!(!rep.passed());
    assert!(rep.flags.iter().any(|f| f == "non-finite-order"));
}

#[test]
fn counting_shift_examples() {
    let radii = log_grid(5.0, 100.0, 12);
    let rep = verify_shift_counting(&FuncExpr64::gamma(), c(1.0, 0.0), &radii, 0.1).unwrap();
    assert!(rep.passed(), "{}", rep.to_json());
    // N(r, Γ) - N(r, Γ(z+1)) = log r exactly
    for s in rep.samples.iter().filter(|s| s.check.as_deref() == Some("counting")) {
        assert!((s.lhs - s.r.ln()).abs() < 1e-9, "{s:?}");
    }
    let entire = verify_shift_counting(&exp_poly(&[0.0, 1.0]), c(1.0, 0.0), &radii, 0.1).unwrap();
    assert!(entire.samples.iter().all(|s| s.lhs == 0.0));
}

#[test]
fn counting_shift_two_term_rational() {
    let f = FuncExpr64::rational_from_roots(c(1.0, 0.0), &[], &[(c(5.0, 0.0), 1)]).unwrap();
    let rep = verify_shift_counting(&f, c(1.0, 0.0), &[6.0, 8.0, 10.0], 0.1).unwrap();
    let last = rep.samples.iter().rfind(|s| s.check.as_deref() == Some("counting")).unwrap();
    assert!((last.lhs - 1.25f64.ln()).abs() < 1e-12, "{last:?}");
}

#[test]
fn characteristic_shift_examples() {
    let radii = log_grid(5.0, 100.0, 12);
    let rep = verify_shift_characteristic(&exp_poly(&[0.0, 1.0]), c(0.0, 1.0), &radii, 0.1).unwrap();
    assert!(rep.passed(), "{}", rep.to_json());
    let rep = verify_shift_characteristic(&FuncExpr64::gamma(), c(1.0, 0.0), &radii, 0.1).unwrap();
    assert!(rep.passed(), "{}", rep.to_json());
    let k = FuncExpr64::real_constant(3.0).unwrap();
    let rep = verify_shift_characteristic(&k, c(1.0, 0.0), &radii, 0.1).unwrap();
    assert!(rep.samples.iter().filter(|s| s.check.as_deref() == Some("characteristic")).all(|s| s.lhs == 0.0));
}

#[test]
fn exponential_shift_has_equal_characteristic() {
    let f = exp_poly(&[0.0, 1.0]);
    let g = FuncExpr::shift(f.clone(), c(0.0, 1.0)).unwrap();
    let radii = [3.0, 10.0, 30.0];
    let (a, b) = (characteristic_curve(&f, &radii).unwrap(), characteristic_curve(&g, &radii).unwrap());
    for (x, y) in a.samples.iter().zip(&b.samples) {
        assert!((x.t - y.t).abs() <= 3.0 * (x.quad_error + y.quad_error) + 1e-12);
    }
}

#[test]
fn order_estimates() {
    let radii = log_grid(10.0, 200.0, 24);
    let ez = estimate_order(&characteristic_curve(&exp_poly(&[0.0, 1.0]), &radii).unwrap()).unwrap();
    assert!((ez.order - 1.0).abs() <= 0.02);
    let gamma = estimate_order(&characteristic_curve(&FuncExpr64::gamma(), &radii).unwrap()).unwrap();
    assert!((gamma.order - 1.0).abs() <= 0.05, "{gamma:?}");
    assert_eq!(gamma.method, Method::CountingFit);
    let hyp = FuncExpr64::hyperbolic_gamma(1.0, 1.0).unwrap();
    let radii = log_grid(10.0, 100.0, 24);
    let h = estimate_order(&characteristic_curve(&hyp, &radii).unwrap()).unwrap();
    assert!((h.order - 2.0).abs() <= 0.1, "{h:?}");
}

#[test]
fn order_fit_needs_a_decade() {
    let curve = characteristic_curve(&FuncExpr64::gamma(), &log_grid(10.0, 50.0, 24)).unwrap();
    assert!(estimate_order(&curve).is_err());
}

#[test]
fn pole_exponents() {
    let radii = log_grid(10.0, 200.0, 24);
    let g = FuncExpr64::gamma().divisor_in_disk(201.0).unwrap();
    assert!((estimate_pole_exponent(&g, &radii).unwrap().lambda - 1.0).abs() <= 0.05);
    let ht = FuncExpr64::hayman_thatcher(E, 300).unwrap().divisor_in_disk(201.0).unwrap();
    assert!((estimate_pole_exponent(&ht, &radii).unwrap().lambda - 2.0).abs() <= 0.1);
    let f = FuncExpr64::rational_from_roots(c(1.0, 0.0), &[], &[(c(3.0, 0.0), 2)]).unwrap();
    let d = f.divisor_in_disk(201.0).unwrap();
    assert_eq!(estimate_pole_exponent(&d, &radii).unwrap().lambda, 0.0);
}

#[test]
fn counterexample_examples() {
    let c3 = counterexample_counting(3.0).unwrap();
    assert!((c3.ratio() - (3f64.ln() + 1.5f64.ln()) / 1.5f64.ln()).abs() < 1e-12);
    assert!((c3.ratio() - 3.71).abs() < 0.01);
    assert!(counterexample_counting(10.0).unwrap().identity_error() <= 1e-12);
    let rep = infinite_order_counterexample(1000.0, 50).unwrap();
    assert!(rep.passed() && rep.samples.len() == 50);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn c_alpha_dominates_log(x in 1e-9..1e6f64, k in 0usize..4) {
        let alpha = [0.25, 0.5, 0.75, 1.0][k];
        let ca = c_alpha(alpha).unwrap();
        prop_assert!(x.ln_1p() <= ca * x.powf(alpha) * (1.0 + 1e-12));
    }

    #[test]
    fn closed_form_and_fitted_orders_agree(d in 1usize..=4) {
        let mut coeffs = vec![0.0; d + 1];
        coeffs[d] = 1.0;
        let f = FuncExpr::exp_of(FuncExpr::poly(Polynomial::from_real(&coeffs)).unwrap()).unwrap();
        let radii = log_grid(2.0, 20.0, 24);
        let curve = characteristic_curve(&f, &radii).unwrap();
        let closed = estimate_order(&curve).unwrap();
        let fitted = fit_order(&curve).unwrap();
        prop_assert_eq!(closed.method, Method::ClosedForm);
        prop_assert!((closed.order - d as f64).abs() < 1e-12);
        prop_assert!((fitted.order - closed.order).abs() < 0.1, "{:?}", fitted);
    }
}
