//! Stability of the nonlinear integral under changes of the medium and of the path.

use serde::{Deserialize, Serialize};

use super::bounds::{kappa_centered_at_start, min_over_window, path_range, PATH_PROBE};
use super::fractional::FractionalIntegrator;
use crate::frac_calc::{beta, reflection_factor, QuadratureConfig};
use crate::grid_fields::func::uniform_node;
use crate::grid_fields::{holder_seminorm_field, holder_seminorm_fn, Field, Func1, Regularity, SharedField, SumField};
use crate::{arg_err, Error, Result};

/// `lhs` against the two-term bound `C₁ term1 + C₂ term2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityCheck {
    pub lhs: f64,
    pub terms: (f64, f64),
    pub constants: (f64, f64),
    /// `C₁ term1 + C₂ term2`
    pub bound: f64,
    /// combined error estimate of the two integrals
    pub error_estimate: f64,
    pub holds: bool,
}

impl StabilityCheck {
    fn new(lhs: f64, terms: (f64, f64), constants: (f64, f64), error_estimate: f64) -> Self {
        let bound = constants.0 * terms.0 + constants.1 * terms.1;
        StabilityCheck { lhs, terms, constants, bound, error_estimate, holds: lhs <= bound + error_estimate }
    }

    /// Smallest factor `c` with `lhs <= term1 + c term2` (the fitted constant).
    pub fn fitted_constant(&self) -> f64 {
        let excess = (self.lhs - self.constants.0 * self.terms.0).max(0.0);
        if self.terms.1 > 0.0 {
            excess / self.terms.1
        } else if excess <= self.error_estimate {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Compares `∫W₁(ds, φ_s)` and `∫W₂(ds, φ_s)`. The field difference enters through
/// its rectangular seminorm; the constant is the centred one, minimised over `α`.
pub fn stability_in_medium(
    w1: SharedField,
    w2: SharedField,
    phi: &dyn Func1,
    reg: &Regularity,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<StabilityCheck> {
    let fi = FractionalIntegrator::new(*cfg).diagnostics(false);
    let e1 = fi.evaluate(w1.as_ref(), phi, reg, a, b)?;
    let e2 = fi.evaluate(w2.as_ref(), phi, reg, a, b)?;
    let pa = phi.value(a);
    let term1 = (w1.increment_t(a, b, pa) - w2.increment_t(a, b, pa)).abs();
    let diff = SumField::difference(w1, w2);
    let rect = holder_seminorm_field(&diff, reg.tau, reg.lambda, a, b, path_range(phi, a, b), fi.probe)?.rect;
    let path = holder_seminorm_fn(phi, reg.gamma, a, b, PATH_PROBE)?.seminorm;
    let term2 = rect * path.powf(reg.lambda) * (b - a).powf(reg.tau + reg.lambda * reg.gamma);
    let c = min_over_window(reg, kappa_centered_at_start);
    Ok(StabilityCheck::new(
        (e1.value - e2.value).abs(),
        (term1, term2),
        (1.0, c),
        e1.error_estimate + e2.error_estimate,
    ))
}

/// `C₁` of the path-stability bound at order `α ∈ (1 - τ, θλγ)`.
pub fn kappa_path(reg: &Regularity, theta: f64) -> f64 {
    let (tau, alpha) = (reg.tau, reg.alpha);
    let tlg = theta * reg.lambda * reg.gamma;
    let common = reflection_factor(alpha) * tau / (tau + alpha - 1.0);
    let first = beta(tau + alpha, 1.0 - alpha);
    let second = beta(tau + alpha, 1.0 + tlg - alpha) * alpha / (tlg - alpha);
    common * first.max(second)
}

/// Compares `∫_u^v W(ds, φ¹_s)` and `∫_u^v W(ds, φ²_s)`.
#[allow(clippy::too_many_arguments)]
pub fn stability_in_path(
    w: &dyn Field,
    phi1: &dyn Func1,
    phi2: &dyn Func1,
    reg: &Regularity,
    theta: f64,
    u: f64,
    v: f64,
    cfg: &QuadratureConfig,
) -> Result<StabilityCheck> {
    if !(theta > 0.0 && theta < 1.0) {
        return arg_err(format!("θ = {theta} must lie in (0, 1)"));
    }
    let tlg = theta * reg.lambda * reg.gamma;
    if reg.tau + tlg <= 1.0 {
        return Err(Error::Regularity(format!("τ + θλγ = {} must exceed 1", reg.tau + tlg)));
    }
    let fi = FractionalIntegrator::new(*cfg).diagnostics(false);
    let e1 = fi.evaluate(w, phi1, reg, u, v)?;
    let e2 = fi.evaluate(w, phi2, reg, u, v)?;
    let gap = (0..=PATH_PROBE)
        .map(|i| {
            let t = uniform_node(u, v, PATH_PROBE, i);
            (phi1.value(t) - phi2.value(t)).abs()
        })
        .fold(0.0, f64::max);
    let (l1, h1) = path_range(phi1, u, v);
    let (l2, h2) = path_range(phi2, u, v);
    let rect = holder_seminorm_field(w, reg.tau, reg.lambda, u, v, (l1.min(l2), h1.max(h2)), fi.probe)?.rect;
    let n1 = holder_seminorm_fn(phi1, reg.gamma, u, v, PATH_PROBE)?.seminorm;
    let n2 = holder_seminorm_fn(phi2, reg.gamma, u, v, PATH_PROBE)?.seminorm;
    let len = v - u;
    let lam = reg.lambda;
    let term1 = rect * gap.powf(lam) * len.powf(reg.tau);
    let term2 = rect * gap.powf(lam * (1.0 - theta)) * len.powf(reg.tau + tlg);
    let lo = 1.0 - reg.tau;
    let c1 = (1..200)
        .map(|k| lo + (tlg - lo) * k as f64 / 200.0)
        .map(|a| kappa_path(&reg.with_alpha(a), theta))
        .filter(|k| k.is_finite())
        .fold(f64::INFINITY, f64::min);
    let c2 = (1.0 - theta).exp2() * c1 * (n1.powf(lam) + n2.powf(lam)).powf(theta);
    Ok(StabilityCheck::new(
        (e1.value - e2.value).abs(),
        (term1, term2),
        (c1, c2),
        e1.error_estimate + e2.error_estimate,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_fields::{make_product_field, Elementary};
    use std::sync::Arc;

    #[test]
    fn equal_media_give_zero() {
        let reg = Regularity::new(1.0, 1.0, 1.0);
        let w: SharedField = Arc::new(make_product_field(Elementary::Sin.shared(), Elementary::identity().shared()));
        let s = stability_in_medium(w.clone(), w, &Elementary::Cos, &reg, 0.0, 1.0, &QuadratureConfig::default()).unwrap();
        assert!(s.lhs <= 2.0 * s.error_estimate + 1e-15);
        assert!(s.terms.0 == 0.0 && s.terms.1 == 0.0 && s.holds);
    }

    #[test]
    fn shifted_path_in_a_linear_medium() {
        // W = sin(t) x: the integrals differ by δ (sin v - sin u)
        let reg = Regularity::new(1.0, 1.0, 1.0);
        let w = make_product_field(Elementary::Sin.shared(), Elementary::identity().shared());
        let p1 = Elementary::Poly(vec![0.0, 0.0, 1.0]);
        let p2 = Elementary::Poly(vec![0.25, 0.0, 1.0]);
        let s = stability_in_path(&w, &p1, &p2, &reg, 0.5, 0.2, 0.9, &QuadratureConfig::default()).unwrap();
        let exact = 0.25 * (0.9f64.sin() - 0.2f64.sin());
        assert!((s.lhs - exact).abs() < 1e-7, "{s:?}");
        assert!(s.holds, "{s:?}");
    }
}
