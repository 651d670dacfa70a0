//! Expression trees for meromorphic functions.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::Serialize;

use super::divisor::Divisor;
use super::hayman::{self, log_hayman};
use super::hyperbolic::log_hyperbolic_gamma;
use super::lgamma::lgamma;
use super::poly::Polynomial;
use crate::error::{Error, Result};
use crate::scalar::{is_finite, Real};

/// Distance below which an evaluation point counts as a zero or pole.
pub const DIVISOR_GUARD: f64 = 1e-12;

/// Cap on the number of logarithm branches scanned for exponential preimages.
const BRANCH_CAP: i64 = 1_000_000;

/// Polynomial factor with its roots computed once at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFactor<T> {
    poly: Polynomial<T>,
    roots: Result<Vec<(Complex<T>, u32)>>,
}

impl<T: Real> PolyFactor<T> {
    fn new(poly: Polynomial<T>) -> Result<Self> {
        if poly.is_zero() {
            return Err(Error::InvalidExpr("polynomial is identically zero".into()));
        }
        let roots = if poly.is_constant() { Ok(Vec::new()) } else { poly.roots() };
        Ok(Self { poly, roots })
    }

    fn from_roots(lead: Complex<T>, roots: &[(Complex<T>, u32)]) -> Result<Self> {
        if lead.is_zero() || !is_finite(lead) || roots.iter().any(|(r, _)| !is_finite(*r)) {
            return Err(Error::InvalidExpr("bad leading coefficient or root".into()));
        }
        let flat: Vec<Complex<T>> = roots.iter().flat_map(|&(r, m)| std::iter::repeat_n(r, m as usize)).collect();
        if flat.len() > super::poly::DEGREE_CAP {
            return Err(Error::DegreeCap(flat.len()));
        }
        let poly = Polynomial::from_roots(lead, &flat);
        let mut merged: Vec<(Complex<T>, u32)> = Vec::new();
        for &(r, m) in roots.iter().filter(|(_, m)| *m > 0) {
            match merged.iter_mut().find(|(w, _)| *w == r) {
                Some(e) => e.1 += m,
                None => merged.push((r, m)),
            }
        }
        Ok(Self { poly, roots: Ok(merged) })
    }

    pub fn poly(&self) -> &Polynomial<T> {
        &self.poly
    }

    pub fn roots(&self) -> Result<&[(Complex<T>, u32)]> {
        self.roots.as_deref().map_err(Clone::clone)
    }

    fn guard(&self, z: Complex<T>) -> Result<()> {
        match &self.roots {
            Ok(rs) => {
                for &(r, _) in rs {
                    let d = (z - r).norm();
                    if d < T::lit(DIVISOR_GUARD) {
                        return Err(hit(r, d));
                    }
                }
                Ok(())
            }
            Err(_) if self.poly.eval(z).is_zero() => Err(hit(z, T::zero())),
            Err(_) => Ok(()),
        }
    }
}

fn hit<T: Real>(p: Complex<T>, d: T) -> Error {
    Error::DivisorHit { re: p.re.as_f64(), im: p.im.as_f64(), distance: d.as_f64() }
}

/// Closed-form order information.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum Order {
    Exact(f64),
    AtMost(f64),
    Infinite,
    Unknown,
}

impl Order {
    pub fn exact(self) -> Option<f64> {
        match self {
            Order::Exact(s) => Some(s),
            _ => None,
        }
    }

    /// Finite upper bound, if any.
    pub fn upper(self) -> Option<f64> {
        match self {
            Order::Exact(s) | Order::AtMost(s) => Some(s),
            _ => None,
        }
    }
}

/// Node kinds. Read access only; build through [`FuncExpr`] constructors.
#[derive(Debug, Clone, PartialEq)]
pub enum Kind<T> {
    Const(Complex<T>),
    Poly(PolyFactor<T>),
    Rational {
        num: PolyFactor<T>,
        den: PolyFactor<T>,
    },
    ExpOf(Box<FuncExpr<T>>),
    Gamma,
    HyperbolicGamma {
        a: T,
        b: T,
    },
    HaymanThatcher {
        h: T,
        truncation: usize,
    },
    Shift {
        inner: Box<FuncExpr<T>>,
        eta: Complex<T>,
    },
    Product(Vec<FuncExpr<T>>),
    Quotient(Box<FuncExpr<T>>, Box<FuncExpr<T>>),
    Power(Box<FuncExpr<T>>, u32),
    /// `Σ a_i(z) f^i / Σ b_j(z) f^j` with polynomial coefficients.
    RationalInF {
        num: Vec<Polynomial<T>>,
        den: Vec<Polynomial<T>>,
        inner: Box<FuncExpr<T>>,
    },
}

/// A meromorphic function described by an expression tree.
#[derive(Debug, Clone, PartialEq)]
pub struct FuncExpr<T> {
    kind: Kind<T>,
}

fn finite_point<T: Real>(z: Complex<T>, what: &str) -> Result<()> {
    if is_finite(z) {
        Ok(())
    } else {
        Err(Error::InvalidExpr(format!("{what} must be finite")))
    }
}

impl<T: Real> FuncExpr<T> {
    pub fn kind(&self) -> &Kind<T> {
        &self.kind
    }

    pub fn constant(c: Complex<T>) -> Result<Self> {
        finite_point(c, "constant")?;
        if c.is_zero() {
            return Err(Error::InvalidExpr("constant must be nonzero".into()));
        }
        Ok(Self { kind: Kind::Const(c) })
    }

    pub fn real_constant(c: f64) -> Result<Self> {
        Self::constant(Complex::new(T::lit(c), T::zero()))
    }

    /// The identity function `z`.
    pub fn z() -> Self {
        Self::poly(Polynomial::z()).expect("identity polynomial")
    }

    pub fn poly(p: Polynomial<T>) -> Result<Self> {
        Ok(Self { kind: Kind::Poly(PolyFactor::new(p)?) })
    }

    pub fn poly_real(coeffs: &[f64]) -> Result<Self> {
        Self::poly(Polynomial::from_real(coeffs))
    }

    /// `lead · ∏ (z - r)^m`, with the roots taken as exact.
    pub fn poly_from_roots(lead: Complex<T>, roots: &[(Complex<T>, u32)]) -> Result<Self> {
        Ok(Self { kind: Kind::Poly(PolyFactor::from_roots(lead, roots)?) })
    }

    pub fn rational(num: Polynomial<T>, den: Polynomial<T>) -> Result<Self> {
        Self::rational_factors(PolyFactor::new(num)?, PolyFactor::new(den)?)
    }

    /// `lead · ∏(z - a)^m / ∏(z - b)^n`, with exact roots.
    pub fn rational_from_roots(
        lead: Complex<T>,
        zeros: &[(Complex<T>, u32)],
        poles: &[(Complex<T>, u32)],
    ) -> Result<Self> {
        Self::rational_factors(PolyFactor::from_roots(lead, zeros)?, PolyFactor::from_roots(Complex::one(), poles)?)
    }

    fn rational_factors(num: PolyFactor<T>, den: PolyFactor<T>) -> Result<Self> {
        if let (Ok(a), Ok(b)) = (&num.roots, &den.roots) {
            for &(x, _) in a {
                for &(y, _) in b {
                    if (x - y).norm() < T::lit(1e-9) * (T::one() + x.norm()) {
                        return Err(Error::InvalidExpr(format!("numerator and denominator share the root {x}")));
                    }
                }
            }
        }
        Ok(Self { kind: Kind::Rational { num, den } })
    }

    /// `e^{g}`; `g` must be entire.
    pub fn exp_of(inner: Self) -> Result<Self> {
        if !inner.is_entire() {
            return Err(Error::InvalidExpr("exponent of exp must be entire".into()));
        }
        Ok(Self { kind: Kind::ExpOf(Box::new(inner)) })
    }

    pub fn gamma() -> Self {
        Self { kind: Kind::Gamma }
    }

    pub fn hyperbolic_gamma(a: T, b: T) -> Result<Self> {
        if !(a > T::zero() && b > T::zero() && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidExpr("hyperbolic gamma needs finite a > 0 and b > 0".into()));
        }
        Ok(Self { kind: Kind::HyperbolicGamma { a, b } })
    }

    pub fn hayman_thatcher(h: T, truncation: usize) -> Result<Self> {
        if !(h > T::one() && h.is_finite()) {
            return Err(Error::InvalidExpr("Hayman-Thatcher base must satisfy H > 1".into()));
        }
        if truncation == 0 {
            return Err(Error::InvalidExpr("truncation must be positive".into()));
        }
        Ok(Self { kind: Kind::HaymanThatcher { h, truncation } })
    }

    /// `z ↦ f(z + η)`.
    pub fn shift(inner: Self, eta: Complex<T>) -> Result<Self> {
        finite_point(eta, "shift")?;
        Ok(Self { kind: Kind::Shift { inner: Box::new(inner), eta } })
    }

    pub fn product(factors: Vec<Self>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidExpr("empty product".into()));
        }
        Ok(Self { kind: Kind::Product(factors) })
    }

    pub fn quotient(num: Self, den: Self) -> Result<Self> {
        Ok(Self { kind: Kind::Quotient(Box::new(num), Box::new(den)) })
    }

    pub fn power(inner: Self, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidExpr("power must be positive".into()));
        }
        Ok(Self { kind: Kind::Power(Box::new(inner), k) })
    }

    /// `Σ a_i(z) f^i / Σ b_j(z) f^j`.
    ///
    /// Irreducibility in `f` is verified when all coefficients are constant.
    pub fn rational_in_f(num: Vec<Polynomial<T>>, den: Vec<Polynomial<T>>, inner: Self) -> Result<Self> {
        let trim = |mut v: Vec<Polynomial<T>>| {
            while v.last().is_some_and(|p| p.is_zero()) {
                v.pop();
            }
            v
        };
        let (num, den) = (trim(num), trim(den));
        if num.is_empty() || den.is_empty() {
            return Err(Error::InvalidExpr("numerator and denominator in f must be nonzero".into()));
        }
        let node = Self { kind: Kind::RationalInF { num, den, inner: Box::new(inner) } };
        if let Some((p, q)) = node.constant_coefficients() {
            if !p.is_constant() && !q.is_constant() {
                let (rp, rq) = (p.roots()?, q.roots()?);
                for &(x, _) in &rp {
                    for &(y, _) in &rq {
                        if (x - y).norm() < T::lit(1e-9) * (T::one() + x.norm()) {
                            return Err(Error::InvalidExpr("rational function in f is reducible".into()));
                        }
                    }
                }
            }
        }
        Ok(node)
    }

    /// `f(z + η) / f(z)`.
    pub fn shift_quotient(&self, eta: Complex<T>) -> Result<Self> {
        Self::quotient(Self::shift(self.clone(), eta)?, self.clone())
    }

    /// `1 / f`.
    pub fn recip(&self) -> Self {
        let one = Self { kind: Kind::Const(Complex::one()) };
        Self { kind: Kind::Quotient(Box::new(one), Box::new(self.clone())) }
    }

    /// `(max{p, q}, p, q)` for a rational-in-f node.
    pub fn degrees_in_f(&self) -> Option<(usize, usize, usize)> {
        match &self.kind {
            Kind::RationalInF { num, den, .. } => {
                let (p, q) = (num.len() - 1, den.len() - 1);
                Some((p.max(q), p, q))
            }
            _ => None,
        }
    }

    /// Numerator and denominator as polynomials in `f` when every coefficient
    /// is constant.
    fn constant_coefficients(&self) -> Option<(Polynomial<T>, Polynomial<T>)> {
        let Kind::RationalInF { num, den, .. } = &self.kind else { return None };
        let flat = |v: &[Polynomial<T>]| -> Option<Polynomial<T>> {
            let mut cs = Vec::with_capacity(v.len());
            for p in v {
                if !p.is_constant() {
                    return None;
                }
                cs.push(p.coeffs().first().copied().unwrap_or_else(Complex::zero));
            }
            Polynomial::new(cs).ok()
        };
        Some((flat(num)?, flat(den)?))
    }

    /// `true` when the expression is structurally known to have no poles.
    pub fn is_entire(&self) -> bool {
        match &self.kind {
            Kind::Const(_) | Kind::Poly(_) | Kind::ExpOf(_) => true,
            Kind::Rational { den, .. } => den.poly.is_constant(),
            Kind::Gamma | Kind::HyperbolicGamma { .. } | Kind::HaymanThatcher { .. } => false,
            Kind::Shift { inner, .. } | Kind::Power(inner, _) => inner.is_entire(),
            Kind::Product(fs) => fs.iter().all(Self::is_entire),
            Kind::Quotient(n, d) => n.is_entire() && d.is_entire() && d.is_zero_free(),
            Kind::RationalInF { den, inner, .. } => den.len() == 1 && den[0].is_constant() && inner.is_entire(),
        }
    }

    /// `true` when the expression is structurally known to have no zeros.
    pub fn is_zero_free(&self) -> bool {
        match &self.kind {
            Kind::Const(_) | Kind::ExpOf(_) | Kind::HaymanThatcher { .. } => true,
            Kind::Poly(p) => p.poly.is_constant(),
            Kind::Rational { num, .. } => num.poly.is_constant(),
            Kind::Gamma => true,
            Kind::HyperbolicGamma { .. } => false,
            Kind::Shift { inner, .. } | Kind::Power(inner, _) => inner.is_zero_free(),
            Kind::Product(fs) => fs.iter().all(Self::is_zero_free),
            Kind::Quotient(n, d) => n.is_zero_free() && d.is_entire(),
            Kind::RationalInF { num, inner, .. } => num.len() == 1 && num[0].is_constant() && inner.is_entire(),
        }
    }

    /// The expression as a polynomial in `z`, when it is one structurally.
    pub fn as_polynomial(&self) -> Option<Polynomial<T>> {
        match &self.kind {
            Kind::Const(c) => Some(Polynomial::constant(*c)),
            Kind::Poly(p) => Some(p.poly.clone()),
            Kind::Rational { num, den } if den.poly.is_constant() => Some(num.poly.scale(den.poly.leading().inv())),
            Kind::Shift { inner, eta } => inner.as_polynomial().map(|p| p.shift_arg(*eta)),
            Kind::Product(fs) => fs
                .iter()
                .try_fold(Polynomial::constant(Complex::one()), |acc, f| f.as_polynomial().map(|p| acc.mul(&p))),
            Kind::Power(inner, k) => inner.as_polynomial().map(|p| p.pow(*k)),
            _ => None,
        }
    }

    /// Closed-form order when the tree determines it.
    pub fn order(&self) -> Order {
        match &self.kind {
            Kind::Const(_) | Kind::Poly(_) | Kind::Rational { .. } => Order::Exact(0.0),
            Kind::ExpOf(g) => match g.as_polynomial() {
                Some(p) => Order::Exact(p.degree().unwrap_or(0) as f64),
                None if g.is_entire() => Order::Infinite,
                None => Order::Unknown,
            },
            Kind::Gamma => Order::Exact(1.0),
            Kind::HyperbolicGamma { .. } | Kind::HaymanThatcher { .. } => Order::Exact(2.0),
            Kind::Shift { inner, .. } | Kind::Power(inner, _) => inner.order(),
            Kind::Product(fs) => combine_orders(fs.iter()),
            Kind::Quotient(n, d) => combine_orders([n.as_ref(), d.as_ref()].into_iter()),
            Kind::RationalInF { inner, .. } => match self.degrees_in_f() {
                Some((0, _, _)) => Order::Exact(0.0),
                _ => inner.order(),
            },
        }
    }

    /// A branch of `log f(z)`.
    pub fn log_value(&self, z: Complex<T>) -> Result<Complex<T>> {
        if !is_finite(z) {
            return Err(Error::Domain("evaluation point must be finite".into()));
        }
        let v = self.log_value_raw(z)?;
        if v.re.is_nan() || v.re == T::neg_infinity() {
            return Err(hit(z, T::zero()));
        }
        Ok(v)
    }

    fn log_value_raw(&self, z: Complex<T>) -> Result<Complex<T>> {
        match &self.kind {
            Kind::Const(c) => Ok(c.ln()),
            Kind::Poly(p) => {
                p.guard(z)?;
                Ok(p.poly.log_eval(z))
            }
            Kind::Rational { num, den } => {
                num.guard(z)?;
                den.guard(z)?;
                Ok(num.poly.log_eval(z) - den.poly.log_eval(z))
            }
            Kind::ExpOf(g) => g.value(z),
            Kind::Gamma => {
                let n = z.re.round();
                if n <= T::zero() {
                    let d = (z - n).norm();
                    if d < T::lit(DIVISOR_GUARD) {
                        return Err(hit(Complex::new(n, T::zero()), d));
                    }
                }
                lgamma(z)
            }
            Kind::HyperbolicGamma { a, b } => log_hyperbolic_gamma(*a, *b, z),
            Kind::HaymanThatcher { h, truncation } => {
                if let Some((p, d)) = hayman::pole_hit(*h, z, T::lit(DIVISOR_GUARD)) {
                    return Err(hit(p, d));
                }
                log_hayman(*h, *truncation, z)
            }
            Kind::Shift { inner, eta } => inner.log_value(z + eta),
            Kind::Product(fs) => fs.iter().try_fold(Complex::zero(), |acc, f| Ok(acc + f.log_value(z)?)),
            Kind::Quotient(n, d) => Ok(n.log_value(z)? - d.log_value(z)?),
            Kind::Power(inner, k) => Ok(inner.log_value(z)? * T::count(*k as usize)),
            Kind::RationalInF { num, den, inner } => {
                let l = inner.log_value(z)?;
                Ok(log_sum_powers(num, z, l) - log_sum_powers(den, z, l))
            }
        }
    }

    /// `log |f(z)|`.
    pub fn eval_log_abs(&self, z: Complex<T>) -> Result<T> {
        Ok(self.log_value(z)?.re)
    }

    /// `f(z)`; fails on overflow.
    pub fn value(&self, z: Complex<T>) -> Result<Complex<T>> {
        let v = match &self.kind {
            Kind::Const(c) => *c,
            Kind::Poly(p) => {
                p.guard(z)?;
                p.poly.eval(z)
            }
            Kind::Rational { num, den } => {
                num.guard(z)?;
                den.guard(z)?;
                num.poly.eval(z) / den.poly.eval(z)
            }
            Kind::ExpOf(g) => g.value(z)?.exp(),
            Kind::Shift { inner, eta } => inner.value(z + eta)?,
            Kind::Product(fs) => fs.iter().try_fold(Complex::one(), |acc, f| Ok(acc * f.value(z)?))?,
            Kind::Quotient(n, d) => n.value(z)? / d.value(z)?,
            Kind::Power(inner, k) => inner.value(z)?.powi(*k as i32),
            _ => self.log_value(z)?.exp(),
        };
        if !is_finite(v) {
            return Err(Error::Domain(format!("value overflows at {z}")));
        }
        Ok(v)
    }

    /// Zeros and poles in `|z| < r`.
    pub fn divisor_in_disk(&self, r: T) -> Result<Divisor<T>> {
        if !(r > T::zero() && r.is_finite()) {
            return Err(Error::Precondition("disk radius must be positive and finite".into()));
        }
        let mut raw = Vec::new();
        self.collect(r, &mut raw)?;
        Ok(Divisor::from_raw(raw, r))
    }

    fn collect(&self, r: T, out: &mut Vec<(Complex<T>, i32)>) -> Result<()> {
        match &self.kind {
            Kind::Const(_) | Kind::ExpOf(_) => {}
            Kind::Poly(p) => push_roots(p.roots()?, r, 1, out),
            Kind::Rational { num, den } => {
                push_roots(num.roots()?, r, 1, out);
                push_roots(den.roots()?, r, -1, out);
            }
            Kind::Gamma => {
                let mut k = T::zero();
                while k < r {
                    out.push((Complex::new(-k, T::zero()), -1));
                    k = k + T::one();
                }
            }
            Kind::HyperbolicGamma { a, b } => {
                let half = T::lit(0.5);
                let mut k = T::zero();
                while (k + half) * *a + half * *b < r {
                    let mut l = T::zero();
                    loop {
                        let y = (k + half) * *a + (l + half) * *b;
                        if y >= r {
                            break;
                        }
                        out.push((Complex::new(T::zero(), -y), -1));
                        out.push((Complex::new(T::zero(), y), 1));
                        l = l + T::one();
                    }
                    k = k + T::one();
                }
            }
            Kind::HaymanThatcher { h, truncation } => {
                if r > T::count(*truncation) {
                    return Err(Error::Precondition(format!(
                        "disk radius exceeds the product truncation {truncation}"
                    )));
                }
                out.extend(hayman::poles_within(*h, r).into_iter().map(|p| (p, -1)));
            }
            Kind::Shift { inner, eta } => {
                let mut tmp = Vec::new();
                inner.collect(r + eta.norm(), &mut tmp)?;
                out.extend(tmp.into_iter().map(|(z, m)| (z - eta, m)).filter(|(z, _)| z.norm() < r));
            }
            Kind::Product(fs) => {
                for f in fs {
                    f.collect(r, out)?;
                }
            }
            Kind::Quotient(n, d) => {
                n.collect(r, out)?;
                let mut tmp = Vec::new();
                d.collect(r, &mut tmp)?;
                out.extend(tmp.into_iter().map(|(z, m)| (z, -m)));
            }
            Kind::Power(inner, k) => {
                let mut tmp = Vec::new();
                inner.collect(r, &mut tmp)?;
                out.extend(tmp.into_iter().map(|(z, m)| (z, m * *k as i32)));
            }
            Kind::RationalInF { inner, .. } => {
                let (_, p, q) = self.degrees_in_f().expect("rational-in-f node");
                let (_, den) = self
                    .constant_coefficients()
                    .ok_or_else(|| Error::Unsupported("divisor of R(z, f) with non-constant coefficients".into()))?;
                out.extend(self.preimages(Complex::zero(), r)?.into_iter().map(|(z, m)| (z, m as i32)));
                if !den.is_constant() {
                    for &(u, mu) in &den.roots()? {
                        for (z, nu) in inner.preimages(u, r)? {
                            out.push((z, -((mu * nu) as i32)));
                        }
                    }
                }
                if p > q {
                    let poles = inner.divisor_in_disk(r)?;
                    out.extend(poles.poles().map(|(z, m)| (z, -((m as usize * (p - q)) as i32))));
                }
            }
        }
        Ok(())
    }

    /// Solutions of `f(z) = w` in `|z| < r`, with multiplicities.
    pub fn preimages(&self, w: Complex<T>, r: T) -> Result<Vec<(Complex<T>, u32)>> {
        let within = |v: Vec<(Complex<T>, u32)>| v.into_iter().filter(|(z, _)| z.norm() < r).collect::<Vec<_>>();
        match &self.kind {
            Kind::Const(c) => {
                if (*c - w).norm() <= T::epsilon() * (T::one() + c.norm()) {
                    Err(Error::Domain("constant takes the value everywhere".into()))
                } else {
                    Ok(Vec::new())
                }
            }
            Kind::Poly(_) | Kind::Rational { .. } => {
                let (num, den) = match &self.kind {
                    Kind::Poly(p) => (p.poly.clone(), Polynomial::constant(Complex::one())),
                    Kind::Rational { num, den } => (num.poly.clone(), den.poly.clone()),
                    _ => unreachable!(),
                };
                let target = num.sub(&den.scale(w));
                if target.is_zero() {
                    return Err(Error::Domain("function is constant".into()));
                }
                if target.is_constant() {
                    return Ok(Vec::new());
                }
                Ok(within(target.roots()?))
            }
            Kind::ExpOf(g) => {
                let p = g
                    .as_polynomial()
                    .ok_or_else(|| Error::Unsupported("preimages of exp of a non-polynomial".into()))?;
                if w.is_zero() {
                    return Ok(Vec::new());
                }
                if p.is_constant() {
                    let c = Self { kind: Kind::Const(p.leading().exp()) };
                    return c.preimages(w, r);
                }
                let bound: T = p.coeffs().iter().rev().fold(T::zero(), |acc, c| acc * r + c.norm());
                let l0 = w.ln();
                let tau = T::TAU();
                let k_lo = ((-bound - l0.im) / tau).ceil().as_f64() as i64;
                let k_hi = ((bound - l0.im) / tau).floor().as_f64() as i64;
                if k_hi - k_lo > BRANCH_CAP {
                    return Err(Error::Unsupported("too many logarithm branches".into()));
                }
                let mut out = Vec::new();
                for k in k_lo..=k_hi {
                    let target = l0 + Complex::new(T::zero(), tau * T::lit(k as f64));
                    let q = p.sub(&Polynomial::constant(target));
                    out.extend(within(q.roots()?));
                }
                Ok(out)
            }
            Kind::Shift { inner, eta } => {
                let v = inner.preimages(w, r + eta.norm())?;
                Ok(within(v.into_iter().map(|(z, m)| (z - eta, m)).collect()))
            }
            Kind::RationalInF { inner, .. } => {
                let (num, den) = self
                    .constant_coefficients()
                    .ok_or_else(|| Error::Unsupported("preimages of R(z, f) with non-constant coefficients".into()))?;
                let (top, _, _) = self.degrees_in_f().expect("rational-in-f node");
                let target = num.sub(&den.scale(w));
                if target.is_zero() {
                    return Err(Error::Domain("R(z, f) is constant".into()));
                }
                let mut out = Vec::new();
                if !target.is_constant() {
                    for (u, mu) in target.roots()? {
                        out.extend(inner.preimages(u, r)?.into_iter().map(|(z, nu)| (z, mu * nu)));
                    }
                }
                let deficit = top - target.degree().unwrap_or(0);
                if deficit > 0 {
                    let d = inner.divisor_in_disk(r)?;
                    out.extend(d.poles().map(|(z, m)| (z, m * deficit as u32)));
                }
                Ok(out)
            }
            _ => Err(Error::Unsupported("preimages for this node kind".into())),
        }
    }
}

fn push_roots<T: Real>(roots: &[(Complex<T>, u32)], r: T, sign: i32, out: &mut Vec<(Complex<T>, i32)>) {
    out.extend(roots.iter().filter(|(z, _)| z.norm() < r).map(|&(z, m)| (z, sign * m as i32)));
}

/// `log Σ a_i(z) e^{iL}` by a complex log-sum-exp.
fn log_sum_powers<T: Real>(coeffs: &[Polynomial<T>], z: Complex<T>, l: Complex<T>) -> Complex<T> {
    let terms: Vec<Complex<T>> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .map(|(i, p)| p.log_eval(z) + l * T::count(i))
        .filter(|t| t.re.is_finite())
        .collect();
    let Some(top) = terms.iter().copied().max_by(|a, b| a.re.total_order(&b.re)) else {
        return Complex::new(T::neg_infinity(), T::zero());
    };
    let s: Complex<T> = terms.iter().fold(Complex::zero(), |acc, &t| acc + (t - top).exp());
    top + s.ln()
}

fn combine_orders<'a, T: Real>(fs: impl Iterator<Item = &'a FuncExpr<T>>) -> Order {
    let orders: Vec<Order> = fs.map(FuncExpr::order).collect();
    let infinite = orders.iter().filter(|o| matches!(o, Order::Infinite)).count();
    if orders.iter().any(|o| matches!(o, Order::Unknown)) || infinite > 1 {
        return Order::Unknown;
    }
    if infinite == 1 {
        return Order::Infinite;
    }
    let max = orders.iter().filter_map(|o| o.upper()).fold(0.0, f64::max);
    if max == 0.0 {
        return Order::Exact(0.0);
    }
    let exact_at_max = orders.iter().filter(|o| matches!(o, Order::Exact(s) if *s == max)).count();
    let at_most_at_max = orders.iter().filter(|o| matches!(o, Order::AtMost(s) if *s == max)).count();
    if exact_at_max == 1 && at_most_at_max == 0 && orders.iter().filter(|o| o.upper() == Some(max)).count() == 1 {
        Order::Exact(max)
    } else {
        Order::AtMost(max)
    }
}
