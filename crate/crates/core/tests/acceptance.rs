//! Acceptance suite. Every criterion runs sequentially inside one test so
//! that wall-clock limits are measured without contention from sibling
//! tests; each prints one PASS/FAIL line.

use std::f64::consts::{E, LN_2, PI, TAU};
use std::time::{Duration, Instant};

use nevlab::cartan::{cartan_disks, sorted_distance_ok};
use nevlab::diffeq::{
    analyze_equation, delta_to_shift, mohonko_check, residual_check, whittaker_solve, DeltaBase,
    LinearDifferenceEquation,
};
use nevlab::funcalg::hayman::functional_residual;
use nevlab::funcalg::{FuncExpr, Polynomial};
use nevlab::growth::{
    c_alpha, circle_average_bound_check, estimate_order, estimate_pole_exponent, fund_est_lhs, fund_est_rhs,
    infinite_order_counterexample, verify_fund_est, verify_quotient_proximity, verify_shift_characteristic,
    verify_shift_counting, BoundParams,
};
use nevlab::nevanlinna::{characteristic_curve, log_grid, poisson_jensen_reconstruct, proximity_pair};
use nevlab::report::MARGIN_FACTOR;
use nevlab::{Complex64, FuncExpr64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Tolerances, pinned.
const C1_ABS_TOL: f64 = 1e-6;
const C2_REL_TOL: f64 = 1e-6;
const C3_REL_TOL: f64 = 1e-7;
const C4_ROUNDING: f64 = 1e-12;
const C6_CLOSED_FORM: f64 = 40.0 / 81.0 * 40.0 / PI;
const C6_CLOSED_FORM_TOL: f64 = 1e-9;
const C7_R_MAX: f64 = 200.0;
const C7_FIT_RADII: [f64; 2] = [10.0, 40.0];
const C7_HAYMAN_TRUNCATION: usize = 300;
const C8_IDENTITY_TOL: f64 = 1e-12;
const C9_REL_TOL: f64 = 1e-9;
const C10_SUM_TOL: f64 = 1e-12;
const C11_RESIDUAL_TOL: f64 = 1e-9;
const C11_ORDER_TOL: f64 = 0.05;
const C14_ROUNDING: f64 = 1e-10;
const C14_EXPONENT_TOL: f64 = 0.1;

type Outcome = Result<String, String>;

/// `(id, name, time limit in seconds, runner)`.
type Criterion = (u32, &'static str, u64, fn() -> Outcome);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn exp_poly(coeffs: &[f64]) -> FuncExpr64 {
    FuncExpr::exp_of(FuncExpr::poly_real(coeffs).unwrap()).unwrap()
}

fn rational_fixture() -> FuncExpr64 {
    FuncExpr64::rational_from_roots(
        c(1.0, 0.0),
        &[(c(9.9, 0.5), 1), (c(-3.0, 19.95), 2)],
        &[(c(-2.5, 0.3), 1), (c(0.2, -30.1), 1)],
    )
    .unwrap()
}

fn c1() -> Outcome {
    let q = FuncExpr64::gamma().shift_quotient(c(1.0, 0.0)).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for r in [10.0, 50.0, 100.0] {
        let p = proximity_pair(&q, r).map_err(|e| e.to_string())?;
        let err = (p.m - r.ln()).abs();
        let tol = C1_ABS_TOL.max(MARGIN_FACTOR * p.quad_error);
        ensure(err <= tol, || format!("r={r}: |m - log r| = {err:e} > {tol:e}"))?;
        worst = worst.max(err);
    }
    Ok(format!("max |m - log r| = {worst:.1e}"))
}

fn c2() -> Outcome {
    let f = exp_poly(&[0.0, 1.0]);
    let curve = characteristic_curve(&f, &[PI, 10.0 * PI]).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for s in &curve.samples {
        let rel = (s.t - s.r / PI).abs() / (s.r / PI);
        ensure(rel <= C2_REL_TOL, || format!("r={}: relative error {rel:e}", s.r))?;
        worst = worst.max(rel);
    }
    Ok(format!("max relative error {worst:.1e}"))
}

fn random_rational(rng: &mut ChaCha8Rng) -> FuncExpr64 {
    loop {
        let nz = rng.random_range(0..=6);
        let np = rng.random_range(0..=6);
        let mut root = || (Complex64::from_polar(rng.random_range(0.05..3.5), rng.random_range(0.0..TAU)), 1u32);
        let zs: Vec<_> = (0..nz).map(|_| root()).collect();
        let ps: Vec<_> = (0..np).map(|_| root()).collect();
        let lead = c(rng.random_range(0.2..5.0), rng.random_range(-1.0..1.0));
        if let Ok(f) = FuncExpr64::rational_from_roots(lead, &zs, &ps) {
            return f;
        }
    }
}

fn c3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let big_r = 4.0;
    let mut worst = 0.0f64;
    let mut checked = 0;
    for _ in 0..100 {
        let f = random_rational(&mut rng);
        let mut done = 0;
        while done < 100 {
            let z = Complex64::from_polar(big_r * rng.random::<f64>().sqrt() * 0.95, rng.random_range(0.0..TAU));
            let Ok(exact) = f.eval_log_abs(z) else { continue };
            let got = poisson_jensen_reconstruct(&f, big_r, z).map_err(|e| e.to_string())?;
            let rel = (got - exact).abs() / (1.0 + exact.abs());
            ensure(rel <= C3_REL_TOL, || format!("{} at {z}: scaled error {rel:e}", nevlab::funcalg::to_spec(&f)))?;
            worst = worst.max(rel);
            done += 1;
            checked += 1;
        }
    }
    Ok(format!("{checked} points, max scaled error {worst:.1e}"))
}

fn c4() -> Outcome {
    ensure(c_alpha(1.0f64).map_err(|e| e.to_string())? == 1.0, || "c_alpha(1) != 1".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut tightest = f64::INFINITY;
    for alpha in [0.25, 0.5, 0.75, 1.0] {
        let ca = c_alpha(alpha).map_err(|e| e.to_string())?;
        for i in 0..10_000 {
            // half uniform on (0, 1e6), half log-uniform down to 1e-9
            let x = if i % 2 == 0 { rng.random_range(0.0..1e6) } else { 10f64.powf(rng.random_range(-9.0..6.0)) };
            if x == 0.0 {
                continue;
            }
            let (l, r) = (x.ln_1p(), ca * x.powf(alpha));
            ensure(l <= r * (1.0 + C4_ROUNDING), || format!("alpha={alpha}, x={x}: {l} > {r}"))?;
            tightest = tightest.min(r / l);
        }
    }
    Ok(format!("40000 samples, tightest ratio {tightest:.6}"))
}

fn c5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = f64::INFINITY;
    for _ in 0..1000 {
        let r = rng.random_range(0.1..50.0);
        let alpha = rng.random_range(0.01..0.99);
        let w = Complex64::from_polar(rng.random_range(0.0..3.0 * r), rng.random_range(0.0..TAU));
        let ca = circle_average_bound_check(w, r, alpha).map_err(|e| e.to_string())?;
        ensure(ca.passes(), || format!("w={w}, r={r}, alpha={alpha}: {ca:?}"))?;
        worst = worst.min(ca.margin());
    }
    Ok(format!("1000 triples, smallest margin {worst:.3e}"))
}

fn c6() -> Outcome {
    let eta = c(1.0, 0.0);
    let f = exp_poly(&[0.0, 1.0]);
    let p = BoundParams { alpha: 0.5, big_r: 20.0, big_r_prime: 30.0, eta, epsilon: 0.1, gamma: 2.0 };
    let rhs = fund_est_rhs(&f, 10.0, &p).map_err(|e| e.to_string())?.rhs;
    let (lhs, _) = fund_est_lhs(&f, eta, 10.0).map_err(|e| e.to_string())?;
    ensure((rhs - C6_CLOSED_FORM).abs() <= C6_CLOSED_FORM_TOL, || format!("closed-form rhs {rhs}"))?;
    ensure((lhs - 1.0).abs() <= C6_CLOSED_FORM_TOL && lhs <= rhs, || format!("closed-form lhs {lhs}"))?;
    let second = FuncExpr64::rational_from_roots(c(2.0, 0.0), &[(c(5.0, 5.0), 1)], &[(c(-7.0, 0.5), 2)]).unwrap();
    let radii = log_grid(10.0, 100.0, 11);
    let mut rows = 0;
    for g in [f, FuncExpr64::gamma(), rational_fixture(), second] {
        let rep = verify_fund_est(&g, eta, &radii, 0.5, (2.0, 3.0)).map_err(|e| e.to_string())?;
        ensure(rep.samples.len() == 12 && rep.passed(), || rep.to_json())?;
        rows += rep.samples.len();
    }
    Ok(format!("closed form 1 <= {rhs:.4}; {rows} rows pass"))
}

fn c7() -> Outcome {
    let mut radii = C7_FIT_RADII.to_vec();
    radii.extend(log_grid(C7_FIT_RADII[1], C7_R_MAX, 24).into_iter().skip(1));
    let fs = [
        FuncExpr64::gamma(),
        exp_poly(&[0.0, 0.0, 1.0]),
        FuncExpr64::hayman_thatcher(E, C7_HAYMAN_TRUNCATION).unwrap(),
        rational_fixture(),
    ];
    let eta = c(1.0, 0.0);
    let mut judged = 0;
    for f in &fs {
        for rep in [
            verify_shift_characteristic(f, eta, &radii, 0.1).map_err(|e| e.to_string())?,
            verify_shift_counting(f, eta, &radii, 0.1).map_err(|e| e.to_string())?,
        ] {
            ensure(rep.passed(), || rep.to_json())?;
            judged += rep.samples.iter().filter(|s| !s.fit).count();
        }
    }
    Ok(format!("4 functions, {judged} judged rows above r = {}", C7_FIT_RADII[1]))
}

fn c8() -> Outcome {
    let rep = infinite_order_counterexample(1000.0, 50).map_err(|e| e.to_string())?;
    let worst = rep.samples.iter().map(|s| s.details["identityError"]).fold(0.0, f64::max);
    let min_ratio = rep.samples.iter().map(|s| s.rhs).fold(f64::INFINITY, f64::min);
    ensure(rep.samples.len() == 50 && rep.passed() && worst <= C8_IDENTITY_TOL, || rep.to_json())?;
    Ok(format!("min ratio {min_ratio:.3}, max identity error {worst:.1e}"))
}

fn c9() -> Outcome {
    let eta = c(LN_2, 0.0);
    let g = FuncExpr::exp_of(exp_poly(&[0.0, 1.0])).unwrap();
    let q = g.shift_quotient(eta).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for r in [2.0, 3.0, 4.0] {
        let mq = proximity_pair(&q, r).map_err(|e| e.to_string())?.m;
        let mg = proximity_pair(&g, r).map_err(|e| e.to_string())?.m;
        let want = (eta.re.exp() - 1.0) * mg;
        let rel = (mq - want).abs() / want;
        ensure(rel <= C9_REL_TOL, || format!("r={r}: relative error {rel:e}"))?;
        worst = worst.max(rel);
    }
    let rep = verify_quotient_proximity(&g, eta, &[2.0, 3.0, 4.0], 0.1).map_err(|e| e.to_string())?;
    ensure(!rep.passed() && rep.flags.iter().any(|f| f == "non-finite-order"), || rep.to_json())?;
    Ok(format!("identity to {worst:.1e}; finite-order check reports {:?}", rep.verdict))
}

fn c10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut tested = 0u64;
    for _ in 0..1000 {
        let p = rng.random_range(1..=50);
        let pts: Vec<Complex64> = (0..p).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let b = rng.random_range(0.01..2.0);
        let es = cartan_disks(&pts, b).map_err(|e| e.to_string())?;
        let sum_err = (es.total_radius() - 2.0 * b).abs();
        ensure(sum_err <= C10_SUM_TOL, || format!("total radius off by {sum_err:e}"))?;
        let mut seen = 0;
        while seen < 1000 {
            let z = c(rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0));
            if es.contains(z) {
                continue;
            }
            seen += 1;
            ensure(sorted_distance_ok(&pts, b, z), || format!("criterion fails at {z} for B={b}"))?;
        }
        tested += seen;
    }
    Ok(format!("1000 sets, {tested} outside points"))
}

fn c11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let mut root = || (Complex64::from_polar(rng.random_range(0.0..10.0), rng.random_range(0.0..TAU)), 1u32);
        let zs: Vec<_> = (0..3).map(|_| root()).collect();
        let ps: Vec<_> = (0..2).map(|_| root()).collect();
        let lead = c(rng.random_range(0.2..5.0), rng.random_range(-3.0..3.0));
        let psi = FuncExpr64::rational_from_roots(lead, &zs, &ps).map_err(|e| e.to_string())?;
        let sol = whittaker_solve(&psi).map_err(|e| e.to_string())?;
        let mut pts = Vec::new();
        while pts.len() < 100 {
            let z = Complex64::from_polar(rng.random_range(0.0..20.0), rng.random_range(0.0..TAU));
            if residual_check(&sol, &psi, &[z]).is_ok() {
                pts.push(z);
            }
        }
        let res = residual_check(&sol, &psi, &pts).map_err(|e| e.to_string())?;
        ensure(res <= C11_RESIDUAL_TOL, || format!("residual {res:e}"))?;
        worst = worst.max(res);
    }
    let f = whittaker_solve(&FuncExpr64::z()).and_then(|s| s.to_expr()).map_err(|e| e.to_string())?;
    let curve = characteristic_curve(&f, &log_grid(10.0, 200.0, 24)).map_err(|e| e.to_string())?;
    let est = estimate_order(&curve).map_err(|e| e.to_string())?;
    ensure((est.order - 1.0).abs() <= C11_ORDER_TOL, || format!("order {est:?}"))?;
    Ok(format!("max residual {worst:.1e}; order of built F = {:.3} ({:?})", est.order, est.method))
}

fn c12() -> Outcome {
    let p = |cs: &[f64]| Polynomial::<f64>::from_real(cs);
    let gamma_eq =
        LinearDifferenceEquation::from_polynomials(&[p(&[0.0, -1.0]), p(&[1.0])]).map_err(|e| e.to_string())?;
    let v = analyze_equation(&gamma_eq).map_err(|e| e.to_string())?;
    ensure(v.lower_bound == Some(1.0), || format!("{v:?}"))?;
    let iy = [p(&[1.0, 1.0]), p(&[0.0, 1.0]), p(&[0.0, -1.0, 1.0]), p(&[0.0, 2.0, -3.0, 1.0])];
    let eq = delta_to_shift(&iy, DeltaBase::Lagged).map_err(|e| e.to_string())?;
    let degs: Vec<_> = eq.polynomials().unwrap_or_default().iter().map(|q| q.degree()).collect();
    ensure(degs == vec![Some(3); 4], || format!("degrees {degs:?}"))?;
    let w = analyze_equation(&eq).map_err(|e| e.to_string())?;
    ensure(w.lower_bound.is_none() && w.to_json()["lowerBound"] == "no-bound", || format!("{w:?}"))?;
    Ok("bound 1 for F(z+1) = zF(z); no bound with all degrees 3".into())
}

fn c13() -> Outcome {
    let one = Polynomial::constant(c(1.0, 0.0));
    let zero = Polynomial::constant(c(0.0, 0.0));
    let rat =
        FuncExpr::rational_in_f(vec![zero.clone(), zero, one.clone()], vec![one.clone(), one], exp_poly(&[0.0, 1.0]))
            .map_err(|e| e.to_string())?;
    let rep = mohonko_check(&rat, &log_grid(10.0, 100.0, 24)).map_err(|e| e.to_string())?;
    ensure(rep.passed() && rep.samples[0].r == 10.0, || rep.to_json())?;
    Ok(format!("C = {}, {} rows", rep.params["C"], rep.samples.len()))
}

fn c14() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..50 {
        let z = c(rng.random_range(-30.0..30.0), rng.random_range(-30.0..30.0));
        let (res, budget) = functional_residual(E, C7_HAYMAN_TRUNCATION, z).map_err(|e| e.to_string())?;
        ensure(res <= budget + C14_ROUNDING, || format!("{z}: residual {res:e} > {budget:e}"))?;
        worst = worst.max(res - budget);
    }
    let f = FuncExpr64::hayman_thatcher(E, C7_HAYMAN_TRUNCATION).unwrap();
    let d = f.divisor_in_disk(C7_R_MAX * 1.01).map_err(|e| e.to_string())?;
    let lambda = estimate_pole_exponent(&d, &log_grid(10.0, C7_R_MAX, 24)).map_err(|e| e.to_string())?.lambda;
    ensure((lambda - 2.0).abs() <= C14_EXPONENT_TOL, || format!("pole exponent {lambda}"))?;
    Ok(format!("max residual - budget {worst:.1e}; pole exponent {lambda:.3}"))
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 14] = [
        (1, "gamma quotient proximity", 5, c1),
        (2, "exponential characteristic", 2, c2),
        (3, "Poisson-Jensen reconstruction", 60, c3),
        (4, "C_alpha", 5, c4),
        (5, "circle average bound", 30, c5),
        (6, "explicit proximity estimate", 60, c6),
        (7, "fitted shift bounds", 300, c7),
        (8, "infinite-order counterexample", 2, c8),
        (9, "double exponential failure mode", 10, c9),
        (10, "Cartan lemma", 60, c10),
        (11, "first-order solutions", 60, c11),
        (12, "equation analyzer", 1, c12),
        (13, "Mohon'ko instance", 60, c13),
        (14, "Hayman-Thatcher product", 30, c14),
    ];
    let mut failed = Vec::new();
    for (id, name, limit, run) in criteria {
        let t = Instant::now();
        let outcome = run();
        let took = t.elapsed();
        let outcome = match outcome {
            Ok(msg) if took > Duration::from_secs(limit) => Err(format!("{msg}; over the {limit} s limit")),
            other => other,
        };
        let (tag, msg) = match &outcome {
            Ok(m) => ("PASS", m.as_str()),
            Err(m) => ("FAIL", m.as_str()),
        };
        println!("criterion {id:>2} {tag} {name} [{:.2} s / {limit} s]: {msg}", took.as_secs_f64());
        if outcome.is_err() {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
