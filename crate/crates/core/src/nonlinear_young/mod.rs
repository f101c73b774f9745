//! `∫_a^b W(dt, φ_t)` by the fractional representation and by sewing, with the
//! associated regularity and stability estimates.

pub mod bounds;
pub mod fractional;
pub mod germ;
pub mod indefinite;
pub mod report;
pub mod sewing;
pub mod stability;

pub use bounds::{
    centered_bound_check, kappa_centered, kappa_centered_at_start, kappa_holder, min_over_window, path_range,
    refined_bound_check, CenteredCheck, FieldNorms, RefinedCheck,
};
pub use fractional::{integrate_fractional, Evaluation, FractionalIntegrator, Terms, DEFAULT_CELLS, GENERIC_NODES};
pub use germ::Germ;
pub use indefinite::{alpha_independence, holder_regression, indefinite_integral, AlphaSpread, IndefiniteIntegral};
pub use report::{IntegralReport, Method, SewingTrace};
pub use sewing::{integrate_sewing, riemann_sum};
pub use stability::{kappa_path, stability_in_medium, stability_in_path, StabilityCheck};
