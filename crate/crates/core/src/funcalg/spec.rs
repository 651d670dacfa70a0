//! JSON function specs and a small rational-expression syntax.
//!
//! ```json
//! {"kind": "shift", "eta": [1, 0], "inner": {"kind": "gamma"}}
//! ```
//!
//! Complex numbers are `[re, im]` pairs or plain numbers. A JSON string is read
//! as a rational expression in `z`, e.g. `"3(z-1)/(z+2)"`.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use super::expr::{FuncExpr, Kind};
use super::poly::Polynomial;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default truncation of the Hayman–Thatcher product.
pub const DEFAULT_TRUNCATION: usize = 200;

fn err(path: &str, message: impl Into<String>) -> Error {
    Error::Spec { path: path.to_string(), message: message.into() }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| err(path, format!("missing field \"{key}\"")))
}

fn complex<T: Real>(v: &Value, path: &str) -> Result<Complex<T>> {
    match v {
        Value::Number(n) => Ok(Complex::new(T::lit(n.as_f64().unwrap_or(f64::NAN)), T::zero())),
        Value::Array(a) if a.len() == 2 => {
            let re = a[0].as_f64().ok_or_else(|| err(&format!("{path}[0]"), "expected a number"))?;
            let im = a[1].as_f64().ok_or_else(|| err(&format!("{path}[1]"), "expected a number"))?;
            if !(re.is_finite() && im.is_finite()) {
                return Err(err(path, "complex number must be finite"));
            }
            Ok(Complex::new(T::lit(re), T::lit(im)))
        }
        _ => Err(err(path, "expected a number or an [re, im] pair")),
    }
}

fn real<T: Real>(v: &Value, path: &str) -> Result<T> {
    v.as_f64().filter(|x| x.is_finite()).map(T::lit).ok_or_else(|| err(path, "expected a finite number"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| err(path, "expected an array"))
}

fn coeffs<T: Real>(v: &Value, path: &str) -> Result<Polynomial<T>> {
    let cs = array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, c)| complex(c, &format!("{path}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    Polynomial::new(cs).map_err(|e| err(path, e.to_string()))
}

fn roots<T: Real>(v: &Value, path: &str) -> Result<Vec<(Complex<T>, u32)>> {
    let mut out: Vec<(Complex<T>, u32)> = Vec::new();
    for (i, r) in array(v, path)?.iter().enumerate() {
        let z = complex(r, &format!("{path}[{i}]"))?;
        match out.iter_mut().find(|(w, _)| *w == z) {
            Some(e) => e.1 += 1,
            None => out.push((z, 1)),
        }
    }
    Ok(out)
}

/// Parses a function spec.
pub fn parse_spec<T: Real>(v: &Value) -> Result<FuncExpr<T>> {
    parse_at(v, "$")
}

/// Parses a spec given as JSON text, or as a bare rational expression when the
/// text is not JSON.
pub fn parse_spec_str<T: Real>(text: &str) -> Result<FuncExpr<T>> {
    match serde_json::from_str::<Value>(text) {
        Ok(v) => parse_spec(&v),
        Err(_) => parse_rational(text),
    }
}

fn parse_at<T: Real>(v: &Value, path: &str) -> Result<FuncExpr<T>> {
    match v {
        Value::String(s) => return parse_rational(s).map_err(|e| err(path, e.to_string())),
        Value::Number(_) => return FuncExpr::constant(complex(v, path)?).map_err(|e| err(path, e.to_string())),
        _ => {}
    }
    let obj = v.as_object().ok_or_else(|| err(path, "expected an object, a number or a string"))?;
    let kind = field(obj, "kind", path)?.as_str().ok_or_else(|| err(&format!("{path}.kind"), "expected a string"))?;
    let sub = |key: &str| -> Result<FuncExpr<T>> { parse_at(field(obj, key, path)?, &format!("{path}.{key}")) };
    let at = |key: &str| format!("{path}.{key}");
    let wrap = |r: Result<FuncExpr<T>>| {
        r.map_err(|e| if matches!(e, Error::Spec { .. }) { e } else { err(path, e.to_string()) })
    };
    match kind {
        "const" => wrap(FuncExpr::constant(complex(field(obj, "value", path)?, &at("value"))?)),
        "z" => Ok(FuncExpr::z()),
        "poly" => {
            if let Some(cs) = obj.get("coeffs") {
                wrap(FuncExpr::poly(coeffs(cs, &at("coeffs"))?))
            } else {
                let lead = obj.get("lead").map(|l| complex(l, &at("lead"))).transpose()?.unwrap_or_else(Complex::one);
                wrap(FuncExpr::poly_from_roots(lead, &roots(field(obj, "roots", path)?, &at("roots"))?))
            }
        }
        "rational" => {
            if obj.contains_key("num") {
                wrap(FuncExpr::rational(
                    coeffs(field(obj, "num", path)?, &at("num"))?,
                    coeffs(field(obj, "den", path)?, &at("den"))?,
                ))
            } else {
                let lead = obj.get("lead").map(|l| complex(l, &at("lead"))).transpose()?.unwrap_or_else(Complex::one);
                let zs = obj.get("zeros").map(|v| roots(v, &at("zeros"))).transpose()?.unwrap_or_default();
                let ps = obj.get("poles").map(|v| roots(v, &at("poles"))).transpose()?.unwrap_or_default();
                wrap(FuncExpr::rational_from_roots(lead, &zs, &ps))
            }
        }
        "exp" => wrap(FuncExpr::exp_of(sub("inner")?)),
        "gamma" => Ok(FuncExpr::gamma()),
        "hyperbolic-gamma" => wrap(FuncExpr::hyperbolic_gamma(
            real(field(obj, "a", path)?, &at("a"))?,
            real(field(obj, "b", path)?, &at("b"))?,
        )),
        "hayman-thatcher" => {
            let h = obj.get("H").or_else(|| obj.get("h")).ok_or_else(|| err(path, "missing field \"H\""))?;
            let n = match obj.get("truncation") {
                None => DEFAULT_TRUNCATION,
                Some(t) => t.as_u64().ok_or_else(|| err(&at("truncation"), "expected a positive integer"))? as usize,
            };
            wrap(FuncExpr::hayman_thatcher(real(h, &at("H"))?, n))
        }
        "shift" => wrap(FuncExpr::shift(sub("inner")?, complex(field(obj, "eta", path)?, &at("eta"))?)),
        "product" => {
            let fs = array(field(obj, "factors", path)?, &at("factors"))?
                .iter()
                .enumerate()
                .map(|(i, f)| parse_at(f, &format!("{path}.factors[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            wrap(FuncExpr::product(fs))
        }
        "quotient" => wrap(FuncExpr::quotient(sub("num")?, sub("den")?)),
        "power" => {
            let k = field(obj, "k", path)?.as_u64().ok_or_else(|| err(&at("k"), "expected a positive integer"))?;
            let k = u32::try_from(k).map_err(|_| err(&at("k"), "power too large"))?;
            wrap(FuncExpr::power(sub("inner")?, k))
        }
        "rational-in-f" => {
            let list = |key: &str| -> Result<Vec<Polynomial<T>>> {
                array(field(obj, key, path)?, &at(key))?
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        let p = format!("{path}.{key}[{i}]");
                        match c {
                            Value::Array(a) if a.iter().all(|x| x.is_array()) => coeffs(c, &p),
                            _ => Ok(Polynomial::constant(complex(c, &p)?)),
                        }
                    })
                    .collect()
            };
            wrap(FuncExpr::rational_in_f(list("num")?, list("den")?, sub("inner")?))
        }
        other => Err(err(&at("kind"), format!("unknown kind \"{other}\""))),
    }
}

fn pair<T: Real>(z: Complex<T>) -> Value {
    json!([z.re.as_f64(), z.im.as_f64()])
}

fn coeff_list<T: Real>(p: &Polynomial<T>) -> Value {
    Value::Array(p.coeffs().iter().map(|&c| pair(c)).collect())
}

/// Serializes an expression back to the spec format.
pub fn to_spec<T: Real>(f: &FuncExpr<T>) -> Value {
    let root_list = |rs: &[(Complex<T>, u32)]| {
        Value::Array(rs.iter().flat_map(|&(r, m)| std::iter::repeat_n(pair(r), m as usize)).collect())
    };
    match f.kind() {
        Kind::Const(c) => json!({"kind": "const", "value": pair(*c)}),
        Kind::Poly(p) => match p.roots() {
            Ok(rs) => json!({"kind": "poly", "lead": pair(p.poly().leading()), "roots": root_list(rs)}),
            Err(_) => json!({"kind": "poly", "coeffs": coeff_list(p.poly())}),
        },
        Kind::Rational { num, den } => match (num.roots(), den.roots()) {
            (Ok(a), Ok(b)) => json!({
                "kind": "rational",
                "lead": pair(num.poly().leading() / den.poly().leading()),
                "zeros": root_list(a),
                "poles": root_list(b),
            }),
            _ => json!({"kind": "rational", "num": coeff_list(num.poly()), "den": coeff_list(den.poly())}),
        },
        Kind::ExpOf(g) => json!({"kind": "exp", "inner": to_spec(g)}),
        Kind::Gamma => json!({"kind": "gamma"}),
        Kind::HyperbolicGamma { a, b } => json!({"kind": "hyperbolic-gamma", "a": a.as_f64(), "b": b.as_f64()}),
        Kind::HaymanThatcher { h, truncation } => {
            json!({"kind": "hayman-thatcher", "H": h.as_f64(), "truncation": truncation})
        }
        Kind::Shift { inner, eta } => json!({"kind": "shift", "eta": pair(*eta), "inner": to_spec(inner)}),
        Kind::Product(fs) => json!({"kind": "product", "factors": fs.iter().map(to_spec).collect::<Vec<_>>()}),
        Kind::Quotient(n, d) => json!({"kind": "quotient", "num": to_spec(n), "den": to_spec(d)}),
        Kind::Power(inner, k) => json!({"kind": "power", "k": k, "inner": to_spec(inner)}),
        Kind::RationalInF { num, den, inner } => json!({
            "kind": "rational-in-f",
            "num": num.iter().map(coeff_list).collect::<Vec<_>>(),
            "den": den.iter().map(coeff_list).collect::<Vec<_>>(),
            "inner": to_spec(inner),
        }),
    }
}

// ---- rational expressions in z ----

/// Rational function kept factored while only products and quotients of
/// linear factors occur, so repeated roots stay exact.
#[derive(Debug, Clone)]
enum Rat<T> {
    Factored { lead: Complex<T>, zeros: Vec<(Complex<T>, i32)> },
    Expanded { num: Polynomial<T>, den: Polynomial<T> },
}

impl<T: Real> Rat<T> {
    fn constant(c: Complex<T>) -> Self {
        Rat::Factored { lead: c, zeros: Vec::new() }
    }

    fn expand(&self) -> (Polynomial<T>, Polynomial<T>) {
        match self {
            Rat::Expanded { num, den } => (num.clone(), den.clone()),
            Rat::Factored { lead, zeros } => {
                let mut num = Polynomial::constant(*lead);
                let mut den = Polynomial::constant(Complex::one());
                for &(r, m) in zeros {
                    let lin = Polynomial::new(vec![-r, Complex::one()]).expect("finite root");
                    let p = lin.pow(m.unsigned_abs());
                    if m > 0 {
                        num = num.mul(&p);
                    } else {
                        den = den.mul(&p);
                    }
                }
                (num, den)
            }
        }
    }

    fn normalize(num: Polynomial<T>, den: Polynomial<T>) -> Self {
        if den.is_constant() && num.degree().is_some_and(|d| d <= 1) {
            let lead = num.leading() / den.leading();
            if num.degree() == Some(1) {
                let root = -num.coeffs()[0] / num.coeffs()[1];
                return Rat::Factored { lead, zeros: vec![(root, 1)] };
            }
            return Rat::constant(lead);
        }
        Rat::Expanded { num, den }
    }

    fn mul(&self, other: &Self) -> Self {
        match (self, other) {
            (Rat::Factored { lead: a, zeros: za }, Rat::Factored { lead: b, zeros: zb }) => {
                let mut zeros = za.clone();
                for &(r, m) in zb {
                    match zeros.iter_mut().find(|(w, _)| *w == r) {
                        Some(e) => e.1 += m,
                        None => zeros.push((r, m)),
                    }
                }
                zeros.retain(|(_, m)| *m != 0);
                Rat::Factored { lead: *a * *b, zeros }
            }
            _ => {
                let (n1, d1) = self.expand();
                let (n2, d2) = other.expand();
                Rat::normalize(n1.mul(&n2), d1.mul(&d2))
            }
        }
    }

    fn inv(&self) -> Option<Self> {
        match self {
            Rat::Factored { lead, zeros } if !lead.is_zero() => {
                Some(Rat::Factored { lead: lead.inv(), zeros: zeros.iter().map(|&(r, m)| (r, -m)).collect() })
            }
            Rat::Expanded { num, den } if !num.is_zero() => Some(Rat::normalize(den.clone(), num.clone())),
            _ => None,
        }
    }

    fn add(&self, other: &Self, sign: T) -> Self {
        let (n1, d1) = self.expand();
        let (n2, d2) = other.expand();
        let s = Complex::new(sign, T::zero());
        if d1 == d2 {
            return Rat::normalize(n1.add(&n2.scale(s)), d1);
        }
        Rat::normalize(n1.mul(&d2).add(&n2.mul(&d1).scale(s)), d1.mul(&d2))
    }

    fn into_expr(self) -> Result<FuncExpr<T>> {
        match self {
            Rat::Factored { lead, zeros } => {
                if lead.is_zero() {
                    return Err(Error::InvalidExpr("expression is identically zero".into()));
                }
                let zs: Vec<_> = zeros.iter().filter(|e| e.1 > 0).map(|&(r, m)| (r, m as u32)).collect();
                let ps: Vec<_> = zeros.iter().filter(|e| e.1 < 0).map(|&(r, m)| (r, (-m) as u32)).collect();
                match (zs.is_empty(), ps.is_empty()) {
                    (true, true) => FuncExpr::constant(lead),
                    (_, true) => FuncExpr::poly_from_roots(lead, &zs),
                    _ => FuncExpr::rational_from_roots(lead, &zs, &ps),
                }
            }
            Rat::Expanded { num, den } => {
                if num.is_zero() {
                    return Err(Error::InvalidExpr("expression is identically zero".into()));
                }
                if den.is_constant() {
                    FuncExpr::poly(num.scale(den.leading().inv()))
                } else {
                    FuncExpr::rational(num, den)
                }
            }
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

/// Parses a rational expression in `z`: numbers, `z`, `i`, `+ - * / ^`,
/// parentheses and implicit multiplication, e.g. `3(z-1)/(z+2)^2`.
pub fn parse_rational<T: Real>(text: &str) -> Result<FuncExpr<T>> {
    let mut p = Parser { s: text.as_bytes(), pos: 0 };
    let r: Rat<T> = p.expr()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(p.fail("unexpected trailing input"));
    }
    r.into_expr()
}

impl Parser<'_> {
    fn fail(&self, msg: &str) -> Error {
        Error::InvalidExpr(format!("{msg} at offset {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expr<T: Real>(&mut self) -> Result<Rat<T>> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Rat::constant(Complex::new(-T::one(), T::zero())).mul(&self.term()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?, T::one());
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?, -T::one());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term<T: Real>(&mut self) -> Result<Rat<T>> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.power()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.power()?;
                    acc = acc.mul(&d.inv().ok_or_else(|| self.fail("division by zero"))?);
                }
                Some(c) if c == b'(' || c == b'z' || c == b'i' || c.is_ascii_digit() || c == b'.' => {
                    acc = acc.mul(&self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power<T: Real>(&mut self) -> Result<Rat<T>> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let k: u32 = std::str::from_utf8(&self.s[start..self.pos])
                .ok()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| self.fail("expected a non-negative integer exponent"))?;
            return Ok((0..k).fold(Rat::constant(Complex::one()), |acc, _| acc.mul(&base)));
        }
        Ok(base)
    }

    fn atom<T: Real>(&mut self) -> Result<Rat<T>> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.fail("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'z') => {
                self.pos += 1;
                Ok(Rat::Factored { lead: Complex::one(), zeros: vec![(Complex::zero(), 1)] })
            }
            Some(b'i') => {
                self.pos += 1;
                Ok(Rat::constant(Complex::new(T::zero(), T::one())))
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.s.len() && (self.s[self.pos].is_ascii_digit() || self.s[self.pos] == b'.') {
                    self.pos += 1;
                }
                if self.pos < self.s.len() && (self.s[self.pos] == b'e' || self.s[self.pos] == b'E') {
                    self.pos += 1;
                    if self.pos < self.s.len() && (self.s[self.pos] == b'-' || self.s[self.pos] == b'+') {
                        self.pos += 1;
                    }
                    while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                }
                let x: f64 = std::str::from_utf8(&self.s[start..self.pos])
                    .ok()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| self.fail("malformed number"))?;
                Ok(Rat::constant(Complex::new(T::lit(x), T::zero())))
            }
            _ => Err(self.fail("expected a number, z, i or '('")),
        }
    }
}
