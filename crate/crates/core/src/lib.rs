//! Numerical value-distribution toolkit: Nevanlinna functionals of
//! expression-described meromorphic functions, growth estimates and checks of
//! difference-analogue estimates.
//!
//! Every kernel is generic over the scalar (`f32` or `f64`); the `*64`
//! aliases below fix it to `f64`.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cartan;
pub mod diffeq;
pub mod error;
pub mod funcalg;
pub mod growth;
pub mod nevanlinna;
pub mod quadrature;
pub mod report;
pub mod scalar;

pub use error::{Error, Result};
pub use funcalg::{Divisor, FuncExpr, Order};
pub use nevanlinna::{CharacteristicCurve, CharacteristicSample};
pub use report::{BoundSample, Report, Verdict};
pub use scalar::{ComplexPoint, Real};

pub type FuncExpr64 = FuncExpr<f64>;
pub type Divisor64 = Divisor<f64>;
pub type Complex64 = num_complex::Complex<f64>;
pub type CharacteristicCurve64 = CharacteristicCurve<f64>;
