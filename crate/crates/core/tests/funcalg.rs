use nevlab::funcalg::{hyperbolic_gamma_log_abs, lgamma_complex, FuncExpr, Polynomial};
use nevlab::{Error, FuncExpr64};
use num_complex::Complex;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

#[test]
fn eval_constant_and_exponentials() {
    let two = FuncExpr64::real_constant(2.0).unwrap();
    assert!((two.eval_log_abs(c(7.0, -3.0)).unwrap() - 2f64.ln()).abs() < 1e-15);
    let ez = FuncExpr64::exp_of(FuncExpr::z()).unwrap();
    assert!((ez.eval_log_abs(c(3.0, 0.0)).unwrap() - 3.0).abs() < 1e-15);
    // log|e^{e^z}| = Re e^z
    let eez = FuncExpr64::exp_of(ez.clone()).unwrap();
    let want = 5f64.exp();
    assert!((eez.eval_log_abs(c(5.0, 0.0)).unwrap() - want).abs() < 1e-12 * want);
    // far beyond f64 range for |f| itself
    assert!((eez.eval_log_abs(c(700.0, 0.0)).unwrap() - 700f64.exp()).abs() <= 1e-12 * 700f64.exp());
}

#[test]
fn lgamma_examples() {
    assert!(lgamma_complex(c(1.0, 0.0)).unwrap().0.abs() < 1e-15);
    assert!((lgamma_complex(c(0.5, 0.0)).unwrap().0 - 0.572_364_942_924_700_1).abs() < 1e-14);
    // Γ(3.5) = 2.5 · 1.5 · 0.5 · √π
    let oracle = (2.5f64 * 1.5 * 0.5 * std::f64::consts::PI.sqrt()).ln();
    assert!((lgamma_complex(c(3.5, 0.0)).unwrap().0 - oracle).abs() < 1e-13);
    assert!(matches!(lgamma_complex(c(-3.0, 0.0)), Err(Error::GammaPole(_))));
}

#[test]
fn divisor_examples() {
    let r = FuncExpr64::rational_from_roots(c(1.0, 0.0), &[], &[(c(1.0, 0.0), 1), (c(2.0, 0.0), 1)]).unwrap();
    let d = r.divisor_in_disk(4.0).unwrap();
    assert_eq!(d.entries(), &[(c(1.0, 0.0), -1), (c(2.0, 0.0), -1)]);

    let sg = FuncExpr64::shift(FuncExpr::gamma(), c(1.0, 0.0)).unwrap();
    let d = sg.divisor_in_disk(2.5).unwrap();
    assert_eq!(d.entries(), &[(c(-1.0, 0.0), -1), (c(-2.0, 0.0), -1)]);

    // poles at -i(k+l+1), zeros at +i(k+l+1); k + l = n has n + 1 representations
    let hg = FuncExpr64::hyperbolic_gamma(1.0, 1.0).unwrap();
    let d = hg.divisor_in_disk(3.5).unwrap();
    let mut want = Vec::new();
    for n in 1..=3 {
        want.push((c(0.0, n as f64), n));
        want.push((c(0.0, -(n as f64)), -n));
    }
    want.sort_by(|a, b| a.0.norm().total_cmp(&b.0.norm()).then(arg(a.0).total_cmp(&arg(b.0))));
    assert_eq!(d.entries(), want.as_slice());
}

fn arg(z: Complex<f64>) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + std::f64::consts::TAU
    } else {
        a
    }
}

#[test]
fn hyperbolic_examples() {
    assert!(hyperbolic_gamma_log_abs(1.0, 1.0, c(0.0, 0.0)).unwrap().abs() < 1e-12);
    let z = c(0.3, 0.0);
    let up = hyperbolic_gamma_log_abs(1.0, 1.0, z + c(0.0, 0.5)).unwrap();
    let dn = hyperbolic_gamma_log_abs(1.0, 1.0, z - c(0.0, 0.5)).unwrap();
    assert!((up - dn - (2.0 * (std::f64::consts::PI * 0.3).cosh()).ln()).abs() < 1e-10);
    // continuing down one rung and back
    let w = c(0.2, -0.3);
    let there = hyperbolic_gamma_log_abs(1.0, 1.0, w - c(0.0, 1.0)).unwrap();
    let step = (2.0 * ((w - c(0.0, 0.5)) * std::f64::consts::PI).cosh()).norm().ln();
    assert!((there + step - hyperbolic_gamma_log_abs(1.0, 1.0, w).unwrap()).abs() < 1e-9);
}

#[test]
fn divisor_hits_are_reported() {
    let g = FuncExpr64::gamma();
    assert!(matches!(g.eval_log_abs(c(-2.0 + 1e-13, 0.0)), Err(Error::DivisorHit { .. })));
    let p = FuncExpr64::poly_real(&[-1.0, 0.0, 1.0]).unwrap();
    assert!(matches!(p.eval_log_abs(c(1.0, 5e-13)), Err(Error::DivisorHit { .. })));
    assert!(p.eval_log_abs(c(1.0, 1e-9)).is_ok());
}

#[test]
fn constructor_validation() {
    assert!(FuncExpr64::real_constant(0.0).is_err());
    assert!(FuncExpr64::exp_of(FuncExpr::gamma()).is_err());
    let zm1 = Polynomial::from_real(&[-1.0, 1.0]);
    let z2m1 = Polynomial::from_real(&[-1.0, 0.0, 1.0]);
    assert!(FuncExpr64::rational(zm1, z2m1).is_err());
    assert!(FuncExpr64::hyperbolic_gamma(0.0, 1.0).is_err());
    assert!(FuncExpr64::hayman_thatcher(1.0, 10).is_err());
    assert!(FuncExpr64::shift(FuncExpr::gamma(), c(f64::NAN, 0.0)).is_err());
}

#[test]
fn rational_in_exponential_divisor() {
    // e^{2z} / (1 + e^z): poles where e^z = -1
    let ez = FuncExpr64::exp_of(FuncExpr::z()).unwrap();
    let k = |x: f64| Polynomial::from_real(&[x]);
    let r = FuncExpr64::rational_in_f(vec![k(0.0), k(0.0), k(1.0)], vec![k(1.0), k(1.0)], ez).unwrap();
    let d = r.divisor_in_disk(10.0).unwrap();
    let pi = std::f64::consts::PI;
    assert_eq!(d.entries().len(), 4);
    for &(z, m) in d.entries() {
        assert_eq!(m, -1);
        assert!(z.re.abs() < 1e-12);
        let odd = z.im / pi;
        assert!((odd - odd.round()).abs() < 1e-12 && (odd.round() as i64).rem_euclid(2) == 1);
    }
}

#[test]
fn tangent_fixture_divisor() {
    // tan(πz/2) = (i - i w)/(1 + w), w = e^{iπz}
    let w = FuncExpr64::exp_of(
        FuncExpr::poly(Polynomial::new(vec![c(0.0, 0.0), c(0.0, std::f64::consts::PI)]).unwrap()).unwrap(),
    )
    .unwrap();
    let k = |z: Complex<f64>| Polynomial::new(vec![z]).unwrap();
    let tan = FuncExpr64::rational_in_f(vec![k(c(0.0, 1.0)), k(c(0.0, -1.0))], vec![k(c(1.0, 0.0)), k(c(1.0, 0.0))], w)
        .unwrap();
    let z = c(0.37, 0.21);
    let direct = (z * std::f64::consts::FRAC_PI_2).tan();
    assert!((tan.value(z).unwrap() - direct).norm() < 1e-13);
    let d = tan.divisor_in_disk(4.5).unwrap();
    let got: Vec<(f64, i32)> = d.entries().iter().map(|&(z, m)| (z.re, m)).collect();
    let want = [(0.0, 1), (1.0, -1), (-1.0, -1), (2.0, 1), (-2.0, 1), (3.0, -1), (-3.0, -1), (4.0, 1), (-4.0, 1)];
    assert_eq!(got.len(), want.len());
    for ((x, m), (wx, wm)) in got.iter().zip(want.iter()) {
        assert!((x - wx).abs() < 1e-12 && m == wm, "{got:?}");
    }
}

#[test]
fn generic_over_f32() {
    let g = FuncExpr::<f32>::shift(FuncExpr::gamma(), Complex::new(1.0, 0.0)).unwrap();
    let q = FuncExpr::<f32>::quotient(g, FuncExpr::gamma()).unwrap();
    let v = q.eval_log_abs(Complex::new(3.0, 4.0)).unwrap();
    assert!((v - 5f32.ln()).abs() < 1e-4);
}

fn root_strategy() -> impl Strategy<Value = Complex<f64>> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(x, y)| c(x, y))
}

fn rational_strategy() -> impl Strategy<Value = FuncExpr64> {
    (
        prop::collection::vec(root_strategy(), 0..4),
        prop::collection::vec(root_strategy(), 0..4),
        (0.2..3.0f64, -3.0..3.0f64),
    )
        .prop_filter_map("distinct roots", |(zs, ps, (m, a))| {
            let zs: Vec<_> = zs.into_iter().map(|z| (z, 1)).collect();
            let ps: Vec<_> = ps.into_iter().map(|z| (z, 1)).collect();
            let all: Vec<_> = zs.iter().chain(ps.iter()).map(|e| e.0).collect();
            for i in 0..all.len() {
                for j in i + 1..all.len() {
                    if (all[i] - all[j]).norm() < 1e-3 {
                        return None;
                    }
                }
            }
            FuncExpr64::rational_from_roots(Complex::from_polar(m, a), &zs, &ps).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn log_domain_matches_direct(f in rational_strategy(), g in rational_strategy(), z in root_strategy()) {
        let eg = FuncExpr64::exp_of(FuncExpr::poly_real(&[0.1, -0.4, 0.2]).unwrap()).unwrap();
        let h = FuncExpr64::product(vec![f.clone(), FuncExpr64::shift(g.clone(), c(0.5, -0.25)).unwrap(), eg]).unwrap();
        let h = FuncExpr64::quotient(h, FuncExpr64::power(f.clone(), 2).unwrap()).unwrap();
        if let (Ok(l), Ok(v)) = (h.eval_log_abs(z), h.value(z)) {
            if l.abs() <= 200.0 {
                prop_assert!((l.exp() - v.norm()).abs() <= 1e-9 * v.norm());
            }
        }
    }

    #[test]
    fn product_is_sum_of_parts(f in rational_strategy(), g in rational_strategy(), z in root_strategy()) {
        let h = FuncExpr64::product(vec![f.clone(), g.clone(), FuncExpr::gamma()]).unwrap();
        if let (Ok(a), Ok(b), Ok(c)) = (f.eval_log_abs(z), g.eval_log_abs(z), FuncExpr64::gamma().eval_log_abs(z)) {
            prop_assert!((h.eval_log_abs(z).unwrap() - (a + b + c)).abs() <= 1e-12 * (1.0 + (a + b + c).abs()));
        }
        let dh = h.divisor_in_disk(5.0).unwrap();
        let mut raw: Vec<_> = f.divisor_in_disk(5.0).unwrap().entries().to_vec();
        raw.extend_from_slice(g.divisor_in_disk(5.0).unwrap().entries());
        raw.extend_from_slice(FuncExpr64::gamma().divisor_in_disk(5.0).unwrap().entries());
        prop_assert_eq!(dh, nevlab::funcalg::Divisor::from_raw(raw, 5.0));
    }

    #[test]
    fn shift_translates_divisor(f in rational_strategy(), ex in -2.0..2.0f64, ey in -2.0..2.0f64, r in 0.5..6.0f64) {
        let eta = c(ex, ey);
        let shifted = FuncExpr64::shift(FuncExpr64::product(vec![f.clone(), FuncExpr::gamma()]).unwrap(), eta).unwrap();
        let direct = shifted.divisor_in_disk(r).unwrap();
        let base = FuncExpr64::product(vec![f, FuncExpr::gamma()]).unwrap().divisor_in_disk(r + eta.norm()).unwrap();
        let moved = nevlab::funcalg::Divisor::from_raw(base.entries().iter().map(|&(z, m)| (z - eta, m)), r);
        prop_assert_eq!(direct, moved);
    }

    #[test]
    fn canonical_order_is_stable(f in rational_strategy(), g in rational_strategy()) {
        let a = FuncExpr64::product(vec![f.clone(), g.clone()]).unwrap().divisor_in_disk(4.0).unwrap();
        let b = FuncExpr64::product(vec![g, f]).unwrap().divisor_in_disk(4.0).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn exponential_preimages_solve(wr in 0.1..5.0f64, wa in -3.0..3.0f64) {
        let f = FuncExpr64::exp_of(FuncExpr::poly_real(&[0.5, 1.0, 0.3]).unwrap()).unwrap();
        let w = Complex::from_polar(wr, wa);
        for (z, m) in f.preimages(w, 6.0).unwrap() {
            prop_assert_eq!(m, 1);
            prop_assert!(z.norm() < 6.0);
            prop_assert!((f.value(z).unwrap() - w).norm() < 1e-9 * w.norm());
        }
    }
}
