//! Deterministic Weierstrass media and paths used by the test suites and the CLI.

use std::sync::Arc;

use crate::grid_fields::{make_product_field, ClosureFn, Elementary, Regularity, Scaled, SharedField, SharedFn, Weierstrass};
use crate::Result;

/// Scales of the time factor and of the path.
pub const SCALES: usize = 12;
/// Scales of the space factor when `λ < 1`.
pub const SPACE_SCALES: usize = 4;
/// Scales of the self-similar family.
pub const SELF_SIMILAR_SCALES: usize = 16;

#[derive(Clone, Debug)]
pub struct PinnedCase {
    pub name: String,
    pub reg: Regularity,
    pub field: SharedField,
    pub path: SharedFn,
    pub a: f64,
    pub b: f64,
}

/// Phases `2π frac(seed + k φ)` with `φ` the golden ratio.
pub fn phases(seed: f64, n: usize) -> Vec<f64> {
    let g = 0.618_033_988_749_894_9;
    (0..n).map(|k| std::f64::consts::TAU * (seed + k as f64 * g).fract()).collect()
}

/// Weierstrass time factor of exponent `tau` with the given phase seed.
pub fn time_factor(tau: f64, seed: f64) -> Result<Weierstrass> {
    Weierstrass::new(tau, SCALES, 2.0, &phases(seed, SCALES))
}

/// Half-amplitude Weierstrass path of exponent `gamma`.
pub fn weierstrass_path(gamma: f64, seed: f64) -> Result<SharedFn> {
    let w = Weierstrass::new(gamma, SCALES, 2.0, &phases(seed, SCALES))?;
    Ok(Arc::new(Scaled { factor: 0.5, inner: Arc::new(w) }))
}

/// `g_τ(t) h_λ(x)` with `h_λ(x) = x` for `λ = 1`, a Weierstrass function of exponent `λ` otherwise.
pub fn weierstrass_field(tau: f64, lambda: f64, seed: f64) -> Result<SharedField> {
    let g: SharedFn = Arc::new(time_factor(tau, seed)?);
    let h: SharedFn = if lambda >= 1.0 {
        Elementary::identity().shared()
    } else {
        Arc::new(Weierstrass::new(lambda, SPACE_SCALES, 2.0, &phases(seed + 0.5, SPACE_SCALES))?)
    };
    Ok(Arc::new(make_product_field(g, h)))
}

pub fn case(tau: f64, lambda: f64, gamma: f64) -> Result<PinnedCase> {
    let reg = Regularity::new(tau, lambda, gamma);
    reg.validate()?;
    Ok(PinnedCase {
        name: format!("weierstrass tau={tau} lambda={lambda} gamma={gamma}"),
        reg,
        field: weierstrass_field(tau, lambda, 0.13)?,
        path: weierstrass_path(gamma, 0.71)?,
        a: 0.0,
        b: 1.0,
    })
}

/// Exponents `(τ, λ, γ)` of the six pinned cases; `τ + λγ` is 1.2, 1.3 or 1.5.
pub const EXPONENTS: [(f64, f64, f64); 6] =
    [(0.5, 1.0, 0.7), (0.6, 1.0, 0.7), (0.8, 1.0, 0.7), (0.6, 0.8, 0.75), (0.7, 0.8, 0.75), (0.8, 0.875, 0.8)];

pub fn pinned_cases() -> Vec<PinnedCase> {
    EXPONENTS.iter().map(|&(t, l, g)| case(t, l, g).expect("pinned exponents are admissible")).collect()
}

/// The `τ + λγ = 1.3` case with `τ = 0.6` and a linear space factor.
pub fn reference_case() -> PinnedCase {
    pinned_cases().swap_remove(1)
}

/// Zero-phase variant on `[0, 1]`, self-similar under `t -> t / 2` about `t = 0`. For `λ < 1`
/// the space factor is `|x - φ(0)|^λ`, so that `h ∘ φ` keeps its exponent at every scale.
pub fn self_similar_case(tau: f64, lambda: f64, gamma: f64, scales: usize) -> Result<PinnedCase> {
    let reg = Regularity::new(tau, lambda, gamma);
    reg.validate()?;
    let path: SharedFn = Arc::new(Scaled { factor: 0.5, inner: Arc::new(Weierstrass::new(gamma, scales, 2.0, &[])?) });
    let x0 = path.value(0.0);
    let g: SharedFn = Arc::new(Weierstrass::new(tau, scales, 2.0, &[])?);
    let h: SharedFn = if lambda >= 1.0 {
        Elementary::identity().shared()
    } else {
        Arc::new(ClosureFn::new(format!("|x - {x0}|^{lambda}"), move |x: f64| (x - x0).abs().powf(lambda)))
    };
    Ok(PinnedCase {
        name: format!("self-similar tau={tau} lambda={lambda} gamma={gamma}"),
        reg,
        field: Arc::new(make_product_field(g, h)),
        path,
        a: 0.0,
        b: 1.0,
    })
}

/// The self-similar variants of the six pinned exponent triples.
pub fn self_similar_cases() -> Vec<PinnedCase> {
    EXPONENTS
        .iter()
        .map(|&(t, l, g)| self_similar_case(t, l, g, SELF_SIMILAR_SCALES).expect("pinned exponents are admissible"))
        .collect()
}
