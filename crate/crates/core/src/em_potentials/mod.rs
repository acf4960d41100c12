//! Potential models, gauge transformations and line integrals of `A`.
//!
//! Geometry is planar: the solenoid axis is the out-of-plane direction, so
//! `A` is a 2-vector and `B = ∂ₓA_y − ∂ᵧA_x` a scalar.

mod field;
mod gauge;
mod path;
mod quadrature;

pub use field::{numeric_curl, PotentialField, SolenoidSpec};
pub use gauge::{GaugeFunction, GaugeSpec};
pub use path::Path;
pub use quadrature::{
    adaptive_simpson, line_integral_a, line_integral_a_estimate, line_integral_a_quadrature, QuadratureEstimate,
    QuadratureOptions,
};
