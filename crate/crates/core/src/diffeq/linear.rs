//! Linear difference equations `Σ A_j(z) f(z+j) = 0` with entire
//! coefficients, and order lower bounds for their meromorphic solutions.

use num_complex::Complex;
use num_traits::One;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::funcalg::{parse_spec, to_spec, FuncExpr, Kind, Polynomial};
use crate::scalar::Real;

/// `Σ_{j=0}^{n} A_j(z) f(z+j) = 0`; `None` marks an identically zero `A_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearDifferenceEquation<T> {
    coefficients: Vec<Option<FuncExpr<T>>>,
}

impl<T: Real> LinearDifferenceEquation<T> {
    pub fn new(coefficients: Vec<Option<FuncExpr<T>>>) -> Result<Self> {
        if coefficients.len() < 2 {
            return Err(Error::Precondition("an equation needs at least two coefficients".into()));
        }
        if coefficients[0].is_none() || coefficients[coefficients.len() - 1].is_none() {
            return Err(Error::Precondition("A_0 and A_n must not vanish identically".into()));
        }
        Ok(Self { coefficients })
    }

    /// Polynomial coefficients; zero polynomials become `None`.
    pub fn from_polynomials(ps: &[Polynomial<T>]) -> Result<Self> {
        let cs = ps.iter().map(|p| if p.is_zero() { Ok(None) } else { FuncExpr::poly(p.clone()).map(Some) });
        Self::new(cs.collect::<Result<_>>()?)
    }

    pub fn coefficients(&self) -> &[Option<FuncExpr<T>>] {
        &self.coefficients
    }

    /// The largest shift `n`.
    pub fn shift_count(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Coefficients as polynomials, when they all are.
    pub fn polynomials(&self) -> Option<Vec<Polynomial<T>>> {
        self.coefficients
            .iter()
            .map(|c| match c {
                None => Some(Polynomial::new(Vec::new()).expect("zero polynomial")),
                Some(f) => f.as_polynomial(),
            })
            .collect()
    }

    pub fn to_json(&self) -> Value {
        let cs: Vec<Value> = self.coefficients.iter().map(|c| c.as_ref().map_or(Value::Null, to_spec)).collect();
        json!({"coeffs": cs, "form": "shift"})
    }
}

/// `P(z) · e^{Q(z)}` with polynomials `P`, `Q`.
struct Normal<T> {
    p: Polynomial<T>,
    q: Polynomial<T>,
}

fn normal_form<T: Real>(f: &FuncExpr<T>) -> Result<Normal<T>> {
    let zero = || Polynomial::new(Vec::new()).expect("zero polynomial");
    let one = || Polynomial::constant(Complex::one());
    Ok(match f.kind() {
        Kind::Const(_) | Kind::Poly(_) | Kind::Rational { .. } => match f.as_polynomial() {
            Some(p) => Normal { p, q: zero() },
            None => return Err(Error::Unsupported("coefficients must be entire".into())),
        },
        Kind::ExpOf(g) => match g.as_polynomial() {
            Some(q) => Normal { p: one(), q },
            None => return Err(Error::Unsupported("exponent must be a polynomial".into())),
        },
        Kind::Shift { inner, eta } => {
            let n = normal_form(inner)?;
            Normal { p: n.p.shift_arg(*eta), q: n.q.shift_arg(*eta) }
        }
        Kind::Power(inner, k) => {
            let n = normal_form(inner)?;
            Normal { p: n.p.pow(*k), q: n.q.scale(Complex::new(T::count(*k as usize), T::zero())) }
        }
        Kind::Product(fs) => {
            let mut acc = Normal { p: one(), q: zero() };
            for f in fs {
                let n = normal_form(f)?;
                acc = Normal { p: acc.p.mul(&n.p), q: acc.q.add(&n.q) };
            }
            acc
        }
        _ => return Err(Error::Unsupported("coefficients must be polynomials or polynomial exponentials".into())),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    /// One coefficient has strictly larger order than the rest: `σ(f) ≥ σ(A_ℓ) + 1`.
    DominantOrder,
    /// Polynomial coefficients, one of strictly larger degree: `σ(f) ≥ 1`.
    DominantDegree,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EquationVerdict {
    pub dominant_index: Option<usize>,
    pub theorem: Option<Theorem>,
    /// Lower bound on the order of every meromorphic solution, if any.
    pub lower_bound: Option<f64>,
    /// Orders of the nonzero coefficients.
    pub orders: Vec<Option<f64>>,
    /// Degrees, when every coefficient is a polynomial.
    pub degrees: Option<Vec<Option<usize>>>,
    pub reason: String,
}

impl EquationVerdict {
    pub fn to_json(&self) -> Value {
        json!({
            "dominantIndex": self.dominant_index,
            "theorem": self.theorem,
            "lowerBound": self.lower_bound.map_or(json!("no-bound"), |b| json!(b)),
            "orders": self.orders,
            "degrees": self.degrees,
            "reason": self.reason,
        })
    }
}

/// Index of the strict maximum among the `Some` entries.
fn strict_max<K: PartialOrd + Copy>(xs: &[Option<K>]) -> Option<usize> {
    let (best, &top) = xs.iter().enumerate().filter_map(|(i, x)| x.as_ref().map(|x| (i, x))).fold(
        None::<(usize, &K)>,
        |acc, (i, x)| match acc {
            Some((_, y)) if !(x > y) => acc,
            _ => Some((i, x)),
        },
    )?;
    let ties = xs.iter().flatten().filter(|&&x| !(x < top)).count();
    (ties == 1).then_some(best)
}

/// Order lower bound from the dominant coefficient. Only a lower bound: the
/// equation need not have a meromorphic solution at all.
pub fn analyze_equation<T: Real>(eq: &LinearDifferenceEquation<T>) -> Result<EquationVerdict> {
    let forms: Vec<Option<Normal<T>>> =
        eq.coefficients.iter().map(|c| c.as_ref().map(normal_form).transpose()).collect::<Result<_>>()?;
    let orders: Vec<Option<f64>> = forms
        .iter()
        .map(|n| n.as_ref().map(|n| if n.q.is_constant() { 0.0 } else { n.q.degree().unwrap_or(0) as f64 }))
        .collect();
    let all_poly = orders.iter().flatten().all(|&s| s == 0.0);
    let degrees: Option<Vec<Option<usize>>> =
        all_poly.then(|| forms.iter().map(|n| n.as_ref().and_then(|n| n.p.degree())).collect());
    let verdict = |idx, theorem, bound, reason: &str| EquationVerdict {
        dominant_index: idx,
        theorem,
        lower_bound: bound,
        orders: orders.clone(),
        degrees: degrees.clone(),
        reason: reason.to_string(),
    };
    Ok(if all_poly {
        let ds = degrees.as_deref().expect("polynomial case");
        match strict_max(ds) {
            Some(l) => {
                verdict(Some(l), Some(Theorem::DominantDegree), Some(1.0), "unique coefficient of largest degree")
            }
            None => verdict(None, None, None, "no bound: no unique coefficient of largest degree"),
        }
    } else {
        match strict_max(&orders) {
            Some(l) => {
                let s = orders[l].expect("dominant coefficient is nonzero");
                verdict(Some(l), Some(Theorem::DominantOrder), Some(s + 1.0), "unique coefficient of largest order")
            }
            None => verdict(None, None, None, "no bound: no unique coefficient of largest order"),
        }
    })
}

/// How the difference terms of an equation are anchored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaBase {
    /// `Σ Q_m(z) Δ^m f(z)`.
    Forward,
    /// `Σ Q_m(z) Δ^m f(z - m)`, rewritten after `z ↦ z + n`.
    Lagged,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64).round()
}

fn signed<T: Real>(x: f64) -> Complex<T> {
    Complex::new(T::lit(x), T::zero())
}

/// Shift-form coefficients `P_0..P_n` of a difference-form equation, with
/// zero coefficients trimmed from both ends (the low end by re-indexing).
pub fn delta_to_shift_polys<T: Real>(q: &[Polynomial<T>], base: DeltaBase) -> Vec<Polynomial<T>> {
    let n = q.len().saturating_sub(1);
    let mut p = vec![Polynomial::new(Vec::new()).expect("zero polynomial"); n + 1];
    for (m, qm) in q.iter().enumerate() {
        let (qm, offset) = match base {
            DeltaBase::Forward => (qm.clone(), 0),
            DeltaBase::Lagged => (qm.shift_arg(signed(n as f64)), n - m),
        };
        for j in 0..=m {
            let c = binomial(m, j) * if (m - j) % 2 == 0 { 1.0 } else { -1.0 };
            p[offset + j] = p[offset + j].add(&qm.scale(signed(c)));
        }
    }
    while p.last().is_some_and(Polynomial::is_zero) {
        p.pop();
    }
    let low = p.iter().take_while(|c| c.is_zero()).count();
    p.into_iter().skip(low).map(|c| c.shift_arg(signed(-(low as f64)))).collect()
}

pub fn delta_to_shift<T: Real>(q: &[Polynomial<T>], base: DeltaBase) -> Result<LinearDifferenceEquation<T>> {
    LinearDifferenceEquation::from_polynomials(&delta_to_shift_polys(q, base))
}

/// Inverse of the forward conversion: `f(z+k) = Σ_j C(k, j) Δ^j f(z)`.
pub fn shift_to_delta<T: Real>(p: &[Polynomial<T>]) -> Vec<Polynomial<T>> {
    (0..p.len())
        .map(|j| {
            p.iter().enumerate().skip(j).fold(Polynomial::new(Vec::new()).expect("zero polynomial"), |acc, (k, pk)| {
                acc.add(&pk.scale(signed(binomial(k, j))))
            })
        })
        .collect()
}

/// Reads `{coeffs: [...], form: "shift" | "delta", lagged?: bool}`. In the
/// difference form every coefficient must be a polynomial; `null` entries
/// are zero coefficients.
pub fn parse_equation<T: Real>(v: &Value) -> Result<LinearDifferenceEquation<T>> {
    let spec_err = |path: &str, msg: &str| Error::Spec { path: path.into(), message: msg.into() };
    let obj = v.as_object().ok_or_else(|| spec_err("$", "expected an object"))?;
    let coeffs =
        obj.get("coeffs").and_then(Value::as_array).ok_or_else(|| spec_err("$.coeffs", "expected an array"))?;
    let parsed: Vec<Option<FuncExpr<T>>> = coeffs
        .iter()
        .map(|c| match c {
            Value::Null => Ok(None),
            Value::Number(x) if x.as_f64() == Some(0.0) => Ok(None),
            _ => parse_spec(c).map(Some),
        })
        .collect::<Result<_>>()?;
    match obj.get("form").and_then(Value::as_str).unwrap_or("shift") {
        "shift" => LinearDifferenceEquation::new(parsed),
        "delta" => {
            let base = if obj.get("lagged").and_then(Value::as_bool).unwrap_or(false) {
                DeltaBase::Lagged
            } else {
                DeltaBase::Forward
            };
            let polys = parsed
                .iter()
                .enumerate()
                .map(|(i, c)| match c {
                    None => Ok(Polynomial::new(Vec::new()).expect("zero polynomial")),
                    Some(f) => f.as_polynomial().ok_or_else(|| {
                        spec_err(&format!("$.coeffs[{i}]"), "difference-form coefficients must be polynomials")
                    }),
                })
                .collect::<Result<Vec<_>>>()?;
            delta_to_shift(&polys, base)
        }
        other => Err(spec_err("$.form", &format!("unknown form \"{other}\""))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(p: &[f64]) -> Polynomial<f64> {
        Polynomial::from_real(p)
    }

    #[test]
    fn first_and_second_differences() {
        let p = delta_to_shift_polys(&[c(&[]), c(&[1.0])], DeltaBase::Forward);
        assert_eq!(p, vec![c(&[-1.0]), c(&[1.0])]);
        let p = delta_to_shift_polys(&[c(&[]), c(&[]), c(&[1.0])], DeltaBase::Forward);
        assert_eq!(p, vec![c(&[1.0]), c(&[-2.0]), c(&[1.0])]);
    }

    #[test]
    fn zero_low_coefficients_are_reindexed() {
        // Δf + f = f(z+1), which is f(z) after re-indexing
        let p = delta_to_shift_polys(&[c(&[1.0]), c(&[1.0])], DeltaBase::Forward);
        assert_eq!(p, vec![c(&[1.0])]);
    }

    #[test]
    fn strict_max_needs_uniqueness() {
        assert_eq!(strict_max(&[Some(1), Some(3), None]), Some(1));
        assert_eq!(strict_max(&[Some(3), Some(3)]), None);
        assert_eq!(strict_max::<usize>(&[None, None]), None);
    }
}
