//! Shared numerical kernels: stencils, quadrature, convergence fits and
//! fixed-size dense linear algebra.

pub mod dense;
pub mod order;
pub mod quad;
pub mod stencil;

pub use dense::{det4, expm4, Mat4};
pub use order::{observed_order, observed_order_with_floor, SATURATION_FLOOR};
pub use quad::{cumulative_simpson, simpson, simpson_with_estimate, Quadrature};
pub use stencil::{diff, Differentiator, Stencil};
