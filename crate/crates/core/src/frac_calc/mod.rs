//! Fractional integrals and derivatives with endpoint-aware quadrature.

pub mod gamma;
pub mod ops;
pub mod quadrature;
pub mod toeplitz;

pub use gamma::{beta, gamma, ln_gamma, reflection_factor};
pub use ops::{
    frac_integral_left, frac_integral_right, fractional_pairing, graded_gauss_nodes, graded_gauss_nodes_singular, smooth_parts_identity_check,
    stieltjes_romberg, weyl_left, weyl_right, FracResult, OuterNode, SmoothPartsReport,
};
pub use toeplitz::{backward_sums, convolve, forward_sums};
pub use quadrature::{
    cell_moments, gauss_legendre_01, graded_distances, singular_weights, two_sided_weights, unit_hat_weights, Grading,
    QuadratureConfig, UnitHatWeights,
};
