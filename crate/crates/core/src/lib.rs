//! Nonlinear Young integrals `∫ W(dt, φ_t)` computed by a fractional-calculus
//! representation and by Riemann sums of the germ `W(t, φ_s) - W(s, φ_s)`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod error;
pub mod frac_calc;
pub mod grid_fields;
pub mod iterated;
pub mod nonlinear_young;
pub mod pinned;

pub use error::{Error, Result};
pub(crate) use error::arg_err;
pub mod stats;
pub mod young_core;
