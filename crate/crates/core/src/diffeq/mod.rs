//! Difference equations: explicit first-order solutions, order bounds for
//! linear equations, and instance checks for rational right sides.

mod linear;
mod nonlinear;
mod whittaker;

pub use linear::{
    analyze_equation, delta_to_shift, delta_to_shift_polys, parse_equation, shift_to_delta, DeltaBase, EquationVerdict,
    LinearDifferenceEquation, Theorem,
};
pub use nonlinear::{
    ahh_degree_check, mohonko_check, tan_half_pi, AhhEquation, Combination, RESIDUAL_RADIUS, RESIDUAL_TOL,
};
pub use whittaker::{residual_check, whittaker_solve, WhittakerSolution};
