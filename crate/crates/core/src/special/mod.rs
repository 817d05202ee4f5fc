//! Numerical kernels shared by the analytic engine.

mod bessel;
mod gamma;
mod laplace;
mod quadrature;
mod sine_integral;

pub use bessel::{bessel_j0, bessel_k0, bessel_k0_scaled, bessel_k1, bessel_k1_scaled};
pub(crate) use bessel::k01_scaled;
pub use gamma::{upper_incomplete_gamma, upper_incomplete_gamma_complex};
pub use laplace::{inverse_laplace, talbot, IltSpec};
pub use quadrature::{gcq_rule, integrate_adaptive, NeumaierSum, QuadratureRule};
pub use sine_integral::sine_integral;
