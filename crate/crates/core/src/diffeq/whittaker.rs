//! Explicit meromorphic solutions of `F(z+1) = Ψ(z) F(z)` for rational `Ψ`.

use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcalg::{FuncExpr, Kind, Polynomial};
use crate::scalar::{to_pair, Real};

/// `F(z) = e^{az} · ∏ Γ(z - b_j) / ∏ Γ(z - c_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WhittakerSolution<T> {
    pub a: Complex<T>,
    /// The `b_j`, repeated by multiplicity.
    pub gamma_zeros: Vec<Complex<T>>,
    /// The `c_k`, repeated by multiplicity.
    pub gamma_poles: Vec<Complex<T>>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Wire {
    a: [f64; 2],
    gamma_zeros: Vec<[f64; 2]>,
    gamma_poles: Vec<[f64; 2]>,
}

impl<T: Real> WhittakerSolution<T> {
    pub fn to_expr(&self) -> Result<FuncExpr<T>> {
        let gammas = |pts: &[Complex<T>]| -> Result<Vec<FuncExpr<T>>> {
            pts.iter()
                .map(|&b| if b.is_zero() { Ok(FuncExpr::gamma()) } else { FuncExpr::shift(FuncExpr::gamma(), -b) })
                .collect()
        };
        let mut top = gammas(&self.gamma_zeros)?;
        if !self.a.is_zero() {
            let exponent = FuncExpr::poly(Polynomial::new(vec![Complex::zero(), self.a])?)?;
            top.insert(0, FuncExpr::exp_of(exponent)?);
        }
        let bottom = gammas(&self.gamma_poles)?;
        let num = match top.len() {
            0 => FuncExpr::real_constant(1.0)?,
            1 => top.pop().expect("one factor"),
            _ => FuncExpr::product(top)?,
        };
        if bottom.is_empty() {
            return Ok(num);
        }
        let den =
            if bottom.len() == 1 { bottom.into_iter().next().expect("one factor") } else { FuncExpr::product(bottom)? };
        FuncExpr::quotient(num, den)
    }

    /// `log |F(z)|`.
    pub fn log_abs(&self, z: Complex<T>) -> Result<T> {
        self.to_expr()?.eval_log_abs(z)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let list = |v: &[Complex<T>]| v.iter().map(|&c| to_pair(c)).collect();
        serde_json::to_value(Wire {
            a: to_pair(self.a),
            gamma_zeros: list(&self.gamma_zeros),
            gamma_poles: list(&self.gamma_poles),
        })
        .expect("plain data serializes")
    }
}

fn flatten<T: Real>(roots: &[(Complex<T>, u32)]) -> Vec<Complex<T>> {
    roots.iter().flat_map(|&(r, m)| std::iter::repeat_n(r, m as usize)).collect()
}

/// Writes `Ψ = C ∏(z - b_j) / ∏(z - c_k)` and returns `a = Log C` (principal
/// branch) with the `b_j` and `c_k`.
pub fn whittaker_solve<T: Real>(psi: &FuncExpr<T>) -> Result<WhittakerSolution<T>> {
    let (lead, zeros, poles) = match psi.kind() {
        Kind::Const(c) => (*c, Vec::new(), Vec::new()),
        Kind::Poly(p) => (p.poly().leading(), flatten(p.roots()?), Vec::new()),
        Kind::Rational { num, den } => {
            (num.poly().leading() / den.poly().leading(), flatten(num.roots()?), flatten(den.roots()?))
        }
        _ => return Err(Error::Unsupported("the coefficient must be a rational function".into())),
    };
    if lead.is_zero() {
        return Err(Error::Domain("the coefficient is identically zero".into()));
    }
    Ok(WhittakerSolution { a: lead.ln(), gamma_zeros: zeros, gamma_poles: poles })
}

/// `max |log|F(z+1)| - log|F(z)| - log|Ψ(z)||` over `samples`.
pub fn residual_check<T: Real>(sol: &WhittakerSolution<T>, psi: &FuncExpr<T>, samples: &[Complex<T>]) -> Result<T> {
    let f = sol.to_expr()?;
    samples.iter().try_fold(T::zero(), |acc, &z| {
        let lhs = f.eval_log_abs(z + T::one())? - f.eval_log_abs(z)?;
        Ok(acc.max((lhs - psi.eval_log_abs(z)?).abs()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_coefficient_gives_gamma() {
        let sol = whittaker_solve(&FuncExpr::<f64>::z()).unwrap();
        assert_eq!(sol.a, Complex::new(0.0, 0.0));
        assert_eq!(sol.gamma_zeros.len(), 1);
        assert!(sol.gamma_zeros[0].norm() < 1e-12);
        let z = Complex::new(2.5, 0.0);
        let d = sol.log_abs(z + 1.0).unwrap() - sol.log_abs(z).unwrap();
        assert!((d - 2.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn rejects_transcendental() {
        assert!(whittaker_solve(&FuncExpr::<f64>::gamma()).is_err());
    }
}
