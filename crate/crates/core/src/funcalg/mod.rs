//! Expression algebra for meromorphic functions.

pub mod divisor;
pub mod expr;
pub mod hayman;
pub mod hyperbolic;
pub mod lgamma;
pub mod poly;
pub mod spec;

pub use divisor::Divisor;
pub use expr::{FuncExpr, Kind, Order};
pub use hyperbolic::hyperbolic_gamma_log_abs;
pub use lgamma::lgamma_complex;
pub use poly::Polynomial;
pub use spec::{parse_rational, parse_spec, parse_spec_str, to_spec};
