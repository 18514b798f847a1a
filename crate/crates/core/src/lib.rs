//! Hardy-type oscillation operators `H - I` and `H* - I` on the cone of
//! nonnegative, nonincreasing functions on `(0, ∞)`.
//!
//! The crate computes operator images exactly on piecewise representations,
//! evaluates the sharp constant `C_p = ∫_0^1 |1 + ln x|^p dx` and the
//! `L^p` norms that enter the sharp inequalities, and checks those
//! inequalities with randomized sweeps, analytic test families, and a
//! derivative-free extremal search.
//!
//! Module map:
//! - [`kernel`]: quadrature, gamma-type special functions, the `h` function
//! - [`cone`]: step functions, tagged piecewise functions, test families
//! - [`operators`]: `H`, `H*` and their oscillation versions
//! - [`norms`]: exact `L^p` norms of functions and operator images
//! - [`constants`]: `C_p`, its derivative, limits, and sharp-constant records
//! - [`extremal`]: cone-constrained search and family scans
//! - [`verify`]: lemma checks and bundled verification suites

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cone;
pub mod constants;
mod error;
pub mod exec;
pub mod extremal;
pub mod kernel;
pub mod norms;
pub mod operators;
pub mod output;
pub mod plot;
pub mod verify;

pub use error::{Error, Result};
