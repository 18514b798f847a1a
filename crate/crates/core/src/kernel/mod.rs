//! Numerical kernel: quadrature oracle, special functions, and the `h`
//! function.

mod hfunc;
pub mod quadrature;
pub mod special;

pub use hfunc::HEvaluator;
pub use quadrature::{
    integrate, integrate_log_singular, integrate_log_singular_with_breaks, integrate_with_breaks,
    QuadratureResult,
};
pub use special::{exp_moment, gamma, gamma_upper, gamma_upper_scaled, EULER_GAMMA};

use crate::error::Result;

/// `h(r)` for exponent `p`; see [`HEvaluator`].
pub fn h_eval(ev: &HEvaluator, r: f64) -> Result<f64> {
    ev.h(r)
}
