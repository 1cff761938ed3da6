//! Special functions and quadrature kernels shared by the other modules.

pub mod dd;
pub mod oscillatory;
pub mod quadrature;
pub mod special;

pub use dd::DoubleDouble;
pub use oscillatory::{integrate_oscillatory, integrate_oscillatory_extended, EnvelopeScalar};
pub use quadrature::{integrate_adaptive, Integrator, QuadratureResult};
pub use special::{
    inv_reg_inc_gamma_lower, inv_reg_inc_gamma_upper, log_gamma, reg_inc_gamma_lower,
    reg_inc_gamma_upper,
};
