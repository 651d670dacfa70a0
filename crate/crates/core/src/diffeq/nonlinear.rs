//! Instance checks for rational functions of a meromorphic `f`: the
//! characteristic of `R(z, f)` and the degree bound for equations
//! `Σ f(z + c_i) = R(z, f(z))`.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::funcalg::{parse_spec, to_spec, FuncExpr, Kind, Order, Polynomial};
use crate::growth::{fit_one, known_order};
use crate::nevanlinna::{characteristic_curve, CharacteristicCurve};
use crate::report::{BoundSample, Report};
use crate::scalar::{to_pair, Real};

/// Radius of the circle on which a fixture's equation is verified.
pub const RESIDUAL_RADIUS: f64 = 1.7;

/// Relative residual a fixture may leave in its equation.
pub const RESIDUAL_TOL: f64 = 1e-9;

fn check_radii<T: Real>(radii: &[T]) -> Result<()> {
    if radii.len() < 2 || !(radii[0] > T::one()) || radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Precondition("need at least two increasing radii above 1".into()));
    }
    Ok(())
}

/// Rounding floor for a characteristic value: quadrature error plus a few
/// ulps of the exact counting part.
fn t_error<T: Real>(c: &CharacteristicCurve<T>, i: usize) -> f64 {
    let s = &c.samples[i];
    s.quad_error.as_f64() + 64.0 * f64::EPSILON * s.n.as_f64().abs()
}

/// `|T(r, R(z,f)) - max{p,q}·T(r,f)| ≤ C log r`, with `C` fitted at the
/// smallest radius. Coefficients must be constant so that the divisor of
/// `R(z, f)` is computable.
pub fn mohonko_check<T: Real>(rat: &FuncExpr<T>, radii: &[T]) -> Result<Report> {
    let Kind::RationalInF { inner, .. } = rat.kind() else {
        return Err(Error::Precondition("expected a rational function of f".into()));
    };
    if inner.as_polynomial().is_some() || matches!(inner.order(), Order::Exact(s) if s == 0.0) {
        return Err(Error::Precondition("the inner function must be transcendental".into()));
    }
    check_radii(radii)?;
    let (d, p, q) = rat.degrees_in_f().expect("rational-in-f node");
    let cr = characteristic_curve(rat, radii)?;
    let cf = characteristic_curve(inner, &cr.radii())?;
    let dd = d as f64;
    let mut report = Report::new("mohonko", to_spec(rat).to_string());
    report.param("p", p).param("q", q).param("maxPQ", d);
    let lhs = |i: usize| (cr.samples[i].t.as_f64() - dd * cf.samples[i].t.as_f64()).abs();
    let err = |i: usize| t_error(&cr, i) + dd * t_error(&cf, i);
    let r0 = cr.samples[0].r.as_f64();
    let c = fit_one(lhs(0), r0.ln());
    report.param("C", c);
    for i in 0..cr.samples.len() {
        let r = cr.samples[i].r.as_f64();
        let s = BoundSample::new(r, lhs(i), c * r.ln(), err(i))
            .check("mohonko")
            .detail("TR", cr.samples[i].t.as_f64())
            .detail("Tf", cf.samples[i].t.as_f64());
        report.push(if i == 0 { s.fitting() } else { s });
    }
    Ok(report.finish())
}

/// How the shifted copies of `f` are combined on the left side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combination {
    Sum,
    Product,
}

/// `Σ f(z + c_i) = R(z, f(z))` (or the product form), with `R` given by
/// polynomial coefficient lists in `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct AhhEquation<T> {
    pub shifts: Vec<Complex<T>>,
    pub combination: Combination,
    pub num: Vec<Polynomial<T>>,
    pub den: Vec<Polynomial<T>>,
}

impl<T: Real> AhhEquation<T> {
    /// `R(z, f)` for the candidate `f`.
    pub fn right_side(&self, f: &FuncExpr<T>) -> Result<FuncExpr<T>> {
        FuncExpr::rational_in_f(self.num.clone(), self.den.clone(), f.clone())
    }

    /// Reads `{shifts: [[re, im], …], combination?: "sum" | "product", num: […], den: […]}`
    /// with coefficient entries as in a rational-in-f function spec.
    pub fn from_json(v: &Value) -> Result<Self> {
        let spec_err = |path: &str, msg: &str| Error::Spec { path: path.into(), message: msg.into() };
        let obj = v.as_object().ok_or_else(|| spec_err("$", "expected an object"))?;
        let shifts = obj
            .get("shifts")
            .and_then(Value::as_array)
            .ok_or_else(|| spec_err("$.shifts", "expected an array"))?
            .iter()
            .enumerate()
            .map(|(i, s)| match s.as_array().map(|a| a.iter().map(Value::as_f64).collect::<Vec<_>>()) {
                Some(a) if a.len() == 2 && a.iter().all(Option::is_some) => {
                    Ok(Complex::new(T::lit(a[0].unwrap_or(0.0)), T::lit(a[1].unwrap_or(0.0))))
                }
                _ => s
                    .as_f64()
                    .map(|x| Complex::new(T::lit(x), T::zero()))
                    .ok_or_else(|| spec_err(&format!("$.shifts[{i}]"), "expected a number or [re, im]")),
            })
            .collect::<Result<Vec<_>>>()?;
        let combination = match obj.get("combination").and_then(Value::as_str).unwrap_or("sum") {
            "sum" => Combination::Sum,
            "product" => Combination::Product,
            other => return Err(spec_err("$.combination", &format!("unknown combination \"{other}\""))),
        };
        let probe = json!({
            "kind": "rational-in-f",
            "num": obj.get("num").cloned().unwrap_or(Value::Null),
            "den": obj.get("den").cloned().unwrap_or_else(|| json!([[1.0, 0.0]])),
            "inner": {"kind": "z"},
        });
        let parsed: FuncExpr<T> = parse_spec(&probe)?;
        let Kind::RationalInF { num, den, .. } = parsed.kind() else { unreachable!("parsed as rational-in-f") };
        let eq = Self { shifts, combination, num: num.clone(), den: den.clone() };
        if eq.shifts.is_empty() {
            return Err(spec_err("$.shifts", "need at least one shift"));
        }
        Ok(eq)
    }

    /// Left side at `z`.
    fn left_value(&self, f: &FuncExpr<T>, z: Complex<T>) -> Result<Complex<T>> {
        let vals = self.shifts.iter().map(|&c| f.value(z + c));
        match self.combination {
            Combination::Sum => vals.sum(),
            Combination::Product => vals.product(),
        }
    }

    /// Largest relative residual of the equation on `|z| = RESIDUAL_RADIUS`,
    /// skipping points that land on a zero or pole.
    pub fn residual(&self, f: &FuncExpr<T>) -> Result<f64> {
        let r = self.right_side(f)?;
        let mut worst = 0.0f64;
        let mut used = 0;
        for j in 0..32 {
            let z = Complex::from_polar(T::lit(RESIDUAL_RADIUS), T::lit(0.1 + std::f64::consts::TAU * j as f64 / 32.0));
            let (Ok(a), Ok(b)) = (self.left_value(f, z), r.value(z)) else { continue };
            used += 1;
            let scale = a.norm() + b.norm() + T::one();
            worst = worst.max(((a - b).norm() / scale).as_f64());
        }
        if used == 0 {
            return Err(Error::Precondition("no usable point to verify the equation".into()));
        }
        Ok(worst)
    }
}

/// Reproduces the chain `max{p,q}·T(r,f) = T(r, R(z,f)) + S(r,f) ≤ n·T(r,f) + S(r,f)`
/// at each radius. Rows:
/// - `left-side`: `T(r, R(z,f))` against `Σ T(r, f(z+c_i))` (plus `log n` for sums);
/// - `degree`: `max{p,q}·T(r,f)` against `n·T(r,f) + C(r^{σ-1+ε} + log r)`,
///   `C` fitted at the smallest radius.
pub fn ahh_degree_check<T: Real>(eq: &AhhEquation<T>, f: &FuncExpr<T>, radii: &[T], epsilon: T) -> Result<Report> {
    check_radii(radii)?;
    let residual = eq.residual(f)?;
    if !(residual <= RESIDUAL_TOL) {
        return Err(Error::Precondition(format!("fixture does not satisfy the equation (residual {residual:e})")));
    }
    let rhs = eq.right_side(f)?;
    let (d, p, q) = rhs.degrees_in_f().expect("rational-in-f node");
    let n = eq.shifts.len();
    let mut report = Report::new("ahh-degree", to_spec(f).to_string());
    report
        .param("shifts", eq.shifts.iter().map(|&c| to_pair(c)).collect::<Vec<_>>())
        .param("combination", if eq.combination == Combination::Sum { "sum" } else { "product" })
        .param("p", p)
        .param("q", q)
        .param("maxPQ", d)
        .param("n", n)
        .param("residual", residual);
    if d > n {
        report.flag("degree-exceeds-shift-count");
    }
    let Some(sigma) = known_order(f) else {
        report.fail_with("non-finite-order");
        return Ok(report.finish());
    };
    report.param("sigma", sigma);
    let cr = characteristic_curve(&rhs, radii)?;
    let rs = cr.radii();
    let cf = characteristic_curve(f, &rs)?;
    let shifted = eq
        .shifts
        .iter()
        .map(|&c| characteristic_curve(&FuncExpr::shift(f.clone(), c)?, &rs))
        .collect::<Result<Vec<_>>>()?;
    let log_n = if eq.combination == Combination::Sum { (n as f64).ln() } else { 0.0 };
    let (dd, nn) = (d as f64, n as f64);
    let expo = sigma - 1.0 + epsilon.as_f64();
    let gauge = |r: f64| r.powf(expo) + r.ln();
    let excess = |i: usize| (dd - nn) * cf.samples[i].t.as_f64();
    let r0 = rs[0].as_f64();
    let c = fit_one(excess(0), gauge(r0));
    report.param("C", c);
    for (i, r) in rs.iter().enumerate() {
        let r = r.as_f64();
        let tf = cf.samples[i].t.as_f64();
        let shift_sum: f64 = shifted.iter().map(|s| s.samples[i].t.as_f64()).sum();
        let shift_err: f64 = shifted.iter().map(|s| t_error(s, i)).sum();
        report.push(
            BoundSample::new(r, cr.samples[i].t.as_f64(), shift_sum + log_n, t_error(&cr, i) + shift_err)
                .check("left-side"),
        );
        let s = BoundSample::new(r, dd * tf, nn * tf + c * gauge(r), (dd + nn) * t_error(&cf, i))
            .check("degree")
            .detail("TR", cr.samples[i].t.as_f64())
            .detail("Tf", tf);
        report.push(if i == 0 { s.fitting() } else { s });
    }
    Ok(report.finish())
}

/// `tan(πz/2)` as a rational function of `e^{iπz}`.
pub fn tan_half_pi<T: Real>() -> Result<FuncExpr<T>> {
    let i = Complex::new(T::zero(), T::one());
    let c = |z: Complex<T>| Polynomial::constant(z);
    let g = FuncExpr::exp_of(FuncExpr::poly(Polynomial::new(vec![Complex::zero(), i * T::PI()])?)?)?;
    FuncExpr::rational_in_f(vec![c(-Complex::one()), c(Complex::one())], vec![c(i), c(i)], g)
}
