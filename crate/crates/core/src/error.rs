use thiserror::Error;

/// Errors raised by the numerical kernels and checkers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point ({re}, {im}) lies on a zero or pole (distance {distance:e})")]
    DivisorHit { re: f64, im: f64, distance: f64 },

    #[error("log-gamma pole at non-positive integer {0}")]
    GammaPole(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("polynomial roots not isolated: two roots {separation:e} apart")]
    RootIsolation { separation: f64 },

    #[error("polynomial degree {0} exceeds the cap of 64")]
    DegreeCap(usize),

    #[error("quadrature did not converge: estimate {estimate}, error {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("divisor point of modulus {modulus} lies on the circle |z| = {r}")]
    DivisorOnCircle { r: f64, modulus: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid expression: {0}")]
    InvalidExpr(String),

    #[error("{path}: {message}")]
    Spec { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
