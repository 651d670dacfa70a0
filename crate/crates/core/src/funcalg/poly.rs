//! Dense polynomials with complex coefficients.

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{is_finite, Real};

/// Largest degree the root finder accepts.
pub const DEGREE_CAP: usize = 64;

/// Roots closer than this are reported instead of merged.
pub const ROOT_SEPARATION: f64 = 1e-9;

/// Polynomial with coefficients stored in ascending order.
///
/// Trailing zero coefficients are trimmed on construction, so the zero
/// polynomial has an empty coefficient vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> Polynomial<T> {
    pub fn new(mut coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.iter().any(|c| !is_finite(*c)) {
            return Err(Error::InvalidExpr("non-finite polynomial coefficient".into()));
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex::new(T::lit(c), T::zero())).collect())
            .expect("finite literal coefficients")
    }

    pub fn constant(c: Complex<T>) -> Self {
        Self::new(vec![c]).expect("finite constant")
    }

    /// The identity polynomial `z`.
    pub fn z() -> Self {
        Self::from_real(&[0.0, 1.0])
    }

    /// `∏ (z - r)` over the given roots, times `lead`.
    pub fn from_roots(lead: Complex<T>, roots: &[Complex<T>]) -> Self {
        let mut p = Self::constant(lead);
        for &r in roots {
            p = p.mul(&Self { coeffs: vec![-r, Complex::one()] });
        }
        p
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Complex<T> {
        self.coeffs.last().copied().unwrap_or_else(Complex::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        self.coeffs.iter().rev().fold(Complex::zero(), |acc, &c| acc * z + c)
    }

    /// A branch of `log p(z)`, evaluated in reversed Horner form for `|z| > 1`
    /// so large arguments cannot overflow.
    pub fn log_eval(&self, z: Complex<T>) -> Complex<T> {
        let n = match self.degree() {
            None => return Complex::new(T::neg_infinity(), T::zero()),
            Some(n) => n,
        };
        if z.norm() <= T::one() || n == 0 {
            return self.eval(z).ln();
        }
        let w = z.inv();
        let scaled = self.coeffs.iter().fold(Complex::zero(), |acc, &c| acc * w + c);
        z.ln() * T::count(n) + scaled.ln()
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * T::count(k)).collect();
        Self::new(coeffs).expect("finite")
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| {
                self.coeffs.get(k).copied().unwrap_or_else(Complex::zero)
                    + other.coeffs.get(k).copied().unwrap_or_else(Complex::zero)
            })
            .collect();
        Self::new(coeffs).expect("finite")
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect()).expect("finite")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex::new(-T::one(), T::zero())))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self { coeffs: Vec::new() };
        }
        let mut out = vec![Complex::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j] + a * b;
            }
        }
        Self::new(out).expect("finite")
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(Complex::one()), |acc, _| acc.mul(self))
    }

    /// The polynomial `z ↦ p(z + c)` (Taylor shift).
    pub fn shift_arg(&self, c: Complex<T>) -> Self {
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                a[j] = a[j] + c * a[j + 1];
            }
        }
        Self::new(a).expect("finite")
    }

    /// Roots with multiplicities.
    ///
    /// Roots at the origin are deflated exactly. The remaining roots come from
    /// the eigenvalues of the companion matrix and are polished by Newton
    /// iteration on the original polynomial. Two non-zero roots closer than
    /// [`ROOT_SEPARATION`] yield [`Error::RootIsolation`].
    pub fn roots(&self) -> Result<Vec<(Complex<T>, u32)>> {
        let n = match self.degree() {
            None => return Err(Error::Domain("roots of the zero polynomial".into())),
            Some(n) => n,
        };
        if n > DEGREE_CAP {
            return Err(Error::DegreeCap(n));
        }
        let zeros_at_origin = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        let deflated = Self { coeffs: self.coeffs[zeros_at_origin..].to_vec() };
        let mut out = Vec::with_capacity(n);
        if zeros_at_origin > 0 {
            out.push((Complex::zero(), zeros_at_origin as u32));
        }
        let m = n - zeros_at_origin;
        if m == 0 {
            return Ok(out);
        }
        let lead = deflated.leading();
        let guesses: Vec<Complex<T>> =
            if m == 1 { vec![-deflated.coeffs[0] / lead] } else { companion_eigenvalues(&deflated)? };
        let dp = deflated.derivative();
        let polished: Vec<Complex<T>> = guesses.into_iter().map(|z0| newton_polish(&deflated, &dp, z0)).collect();
        for i in 0..polished.len() {
            for j in (i + 1)..polished.len() {
                let sep = (polished[i] - polished[j]).norm();
                if sep < T::lit(ROOT_SEPARATION) {
                    return Err(Error::RootIsolation { separation: sep.as_f64() });
                }
            }
        }
        // A root whose forward-error estimate exceeds the separation threshold
        // is part of an unresolved cluster (e.g. a multiple root).
        let eps = T::epsilon() * T::count(4 * m);
        for (i, &z) in polished.iter().enumerate() {
            let size = deflated.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * z.norm() + c.norm());
            let slope = dp.eval(z).norm();
            let fwd = if slope > T::zero() { eps * size / slope } else { T::infinity() };
            if fwd > T::lit(ROOT_SEPARATION) * T::lit(0.1) * (T::one() + z.norm()) {
                let sep = polished
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, w)| (z - w).norm())
                    .fold(T::infinity(), T::min);
                return Err(Error::RootIsolation { separation: sep.as_f64() });
            }
        }
        out.extend(polished.into_iter().map(|z| (z, 1)));
        Ok(out)
    }
}

fn companion_eigenvalues<T: Real>(p: &Polynomial<T>) -> Result<Vec<Complex<T>>> {
    let m = p.degree().unwrap_or(0);
    let lead = p.leading();
    let lead64 = Complex::new(lead.re.as_f64(), lead.im.as_f64());
    let mut c = DMatrix::<Complex<f64>>::zeros(m, m);
    for i in 1..m {
        c[(i, i - 1)] = Complex::new(1.0, 0.0);
    }
    for i in 0..m {
        let a = p.coeffs[i];
        c[(i, m - 1)] = -Complex::new(a.re.as_f64(), a.im.as_f64()) / lead64;
    }
    let schur = nalgebra::linalg::Schur::try_new(c, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Domain("companion-matrix eigenvalue iteration failed".into()))?;
    let ev = schur.eigenvalues().ok_or_else(|| Error::Domain("companion-matrix Schur form not triangular".into()))?;
    Ok(ev.iter().map(|z| Complex::new(T::lit(z.re), T::lit(z.im))).collect())
}

fn newton_polish<T: Real>(p: &Polynomial<T>, dp: &Polynomial<T>, z0: Complex<T>) -> Complex<T> {
    let tol = T::attainable(1e-15, 4.0);
    let mut z = z0;
    let mut best = (z0, p.eval(z0).norm());
    for _ in 0..40 {
        let d = dp.eval(z);
        if d.is_zero() {
            break;
        }
        let step = p.eval(z) / d;
        z = z - step;
        let res = p.eval(z).norm();
        if res < best.1 {
            best = (z, res);
        }
        if step.norm() <= tol * (T::one() + z.norm()) {
            break;
        }
    }
    best.0
}
