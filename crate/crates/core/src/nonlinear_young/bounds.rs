//! Regularity bounds for the nonlinear integral: explicit constants, the
//! global Hölder bound, the centred bound and its refinement for pinned paths.

use serde::{Deserialize, Serialize};

use super::fractional::{range, FractionalIntegrator};
use crate::frac_calc::{beta, reflection_factor, QuadratureConfig};
use crate::grid_fields::func::uniform_node;
use crate::grid_fields::{holder_seminorm_field, holder_seminorm_fn, Field, FieldHolderReport, FieldProbe, Func1, Regularity};
use crate::{arg_err, Error, Result};

/// Probe points for path seminorms and sup norms.
pub const PATH_PROBE: usize = 4096;

/// `(sin πα / π) τ / (τ + α - 1)`, shared by every constant below.
fn common(tau: f64, alpha: f64) -> f64 {
    reflection_factor(alpha) * tau / (tau + alpha - 1.0)
}

/// Constant in `|∫W| ≤ κ (||W|| (b-a)^τ + ||W|| ||φ||^λ (b-a)^{τ+λγ})`.
pub fn kappa_holder(reg: &Regularity) -> f64 {
    let (tau, alpha, lg) = (reg.tau, reg.alpha, reg.lambda * reg.gamma);
    let first = beta(tau + alpha, 1.0 - alpha);
    let second = alpha / (lg - alpha) * beta(tau + alpha, 1.0 + lg - alpha);
    common(tau, alpha) * first.max(second)
}

/// Constant of the centred bound with `c = a`.
pub fn kappa_centered_at_start(reg: &Regularity) -> f64 {
    let (tau, alpha, lg) = (reg.tau, reg.alpha, reg.lambda * reg.gamma);
    common(tau, alpha) * lg / (lg - alpha) * beta(tau + alpha, 1.0 + lg - alpha)
}

/// Constant of the centred bound for an arbitrary `c ∈ [a, b]`.
pub fn kappa_centered(reg: &Regularity) -> f64 {
    let (tau, alpha, lg) = (reg.tau, reg.alpha, reg.lambda * reg.gamma);
    common(tau, alpha) * (beta(tau + alpha, 1.0 - alpha) + alpha / (lg - alpha) * beta(tau + alpha, 1.0 + lg - alpha))
}

/// Smallest value of `kappa(reg.with_alpha(α))` over a grid strictly inside the window.
pub fn min_over_window(reg: &Regularity, kappa: impl Fn(&Regularity) -> f64) -> f64 {
    reg.alpha_grid(199, 1e-3)
        .into_iter()
        .map(|a| kappa(&reg.with_alpha(a)))
        .filter(|k| k.is_finite())
        .fold(f64::INFINITY, f64::min)
}

/// Estimated seminorms entering the bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldNorms {
    pub field: FieldHolderReport,
    /// `||φ||_{γ; a, b}`
    pub path: f64,
    pub space_box: (f64, f64),
}

impl FieldNorms {
    pub fn estimate(w: &dyn Field, phi: &dyn Func1, reg: &Regularity, a: f64, b: f64, probe: FieldProbe) -> Result<Self> {
        let space_box = path_range(phi, a, b);
        let field = holder_seminorm_field(w, reg.tau, reg.lambda, a, b, space_box, probe)?;
        let path = holder_seminorm_fn(phi, reg.gamma, a, b, PATH_PROBE)?.seminorm;
        Ok(FieldNorms { field, path, space_box })
    }

    pub fn holder_scale(&self, reg: &Regularity, len: f64) -> f64 {
        let w = self.field.total;
        w * len.powf(reg.tau) + w * self.path.powf(reg.lambda) * len.powf(reg.tau + reg.lambda * reg.gamma)
    }

    /// Only rectangular increments enter the centred remainder, so its scale uses `[W]`.
    pub fn centered_scale(&self, reg: &Regularity, len: f64) -> f64 {
        self.field.rect * self.path.powf(reg.lambda) * len.powf(reg.tau + reg.lambda * reg.gamma)
    }
}

/// Range of `φ` sampled on the probe grid of `[a, b]`.
pub fn path_range(phi: &dyn Func1, a: f64, b: f64) -> (f64, f64) {
    let vs: Vec<f64> = (0..=PATH_PROBE).map(|i| phi.value(uniform_node(a, b, PATH_PROBE, i))).collect();
    range(&vs)
}

/// `num / den`, read as zero when both vanish to within `slack`.
pub(crate) fn safe_ratio(num: f64, den: f64, slack: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num <= slack {
        0.0
    } else {
        f64::INFINITY
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenteredCheck {
    pub ratio: f64,
    /// `|∫_a^b W(dt, φ_t) - W(b, φ_c) + W(a, φ_c)|`
    pub numerator: f64,
    /// `[W] ||φ||_γ^λ (b - a)^{τ+λγ}` with `[W]` the rectangular seminorm
    pub scale: f64,
    pub value: f64,
    pub error_estimate: f64,
    pub kappa: f64,
}

/// Ratio of the centred remainder to its scale.
pub fn centered_bound_check(
    w: &dyn Field,
    phi: &dyn Func1,
    reg: &Regularity,
    a: f64,
    b: f64,
    c: f64,
    cfg: &QuadratureConfig,
) -> Result<CenteredCheck> {
    if !(a <= c && c <= b) {
        return arg_err(format!("c = {c} outside [{a}, {b}]"));
    }
    let fi = FractionalIntegrator::new(*cfg).diagnostics(false);
    let ev = fi.evaluate(w, phi, reg, a, b)?;
    let numerator = (ev.value - w.increment_t(a, b, phi.value(c))).abs();
    let norms = FieldNorms::estimate(w, phi, reg, a, b, fi.probe)?;
    let scale = norms.centered_scale(reg, b - a);
    Ok(CenteredCheck {
        ratio: safe_ratio(numerator, scale, 10.0 * ev.error_estimate),
        numerator,
        scale,
        value: ev.value,
        error_estimate: ev.error_estimate,
        kappa: if c == a { kappa_centered_at_start(reg) } else { kappa_centered(reg) },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinedCheck {
    /// numerator over `(b - a)^beta_target`
    pub ratio: f64,
    pub numerator: f64,
    /// `1 + (λγ + τ - 1) ℓ / γ`
    pub beta_threshold: f64,
    pub beta_admissible: bool,
    pub value: f64,
    pub error_estimate: f64,
}

/// Refined centred bound for paths with `|φ(s) - φ(a)| ≤ L (s - a)^ℓ`.
/// A `beta_target` at or above the threshold is evaluated but flagged.
#[allow(clippy::too_many_arguments)]
pub fn refined_bound_check(
    w: &dyn Field,
    phi: &dyn Func1,
    reg: &Regularity,
    a: f64,
    b: f64,
    ell: f64,
    big_l: f64,
    beta_target: f64,
    cfg: &QuadratureConfig,
) -> Result<RefinedCheck> {
    if !(ell > reg.gamma) {
        return arg_err(format!("ell = {ell} must exceed gamma = {}", reg.gamma));
    }
    if !(big_l >= 0.0) {
        return arg_err(format!("L = {big_l} must be non-negative"));
    }
    if !(a < b) {
        return arg_err(format!("need a < b, got [{a}, {b}]"));
    }
    let pa = phi.value(a);
    for i in 1..=PATH_PROBE {
        let s = uniform_node(a, b, PATH_PROBE, i);
        let dev = (phi.value(s) - pa).abs();
        let allowed = big_l * (s - a).powf(ell);
        if dev > 1.05 * allowed + 1e-14 {
            return Err(Error::Hypothesis(format!(
                "|φ({s}) - φ({a})| = {dev:e} exceeds L (s - a)^ℓ = {allowed:e} by more than 5%"
            )));
        }
    }
    let fi = FractionalIntegrator::new(*cfg).diagnostics(false);
    let ev = fi.evaluate(w, phi, reg, a, b)?;
    let numerator = (ev.value - w.increment_t(a, b, pa)).abs();
    let beta_threshold = 1.0 + reg.epsilon() * ell / reg.gamma;
    Ok(RefinedCheck {
        ratio: numerator / (b - a).powf(beta_target),
        numerator,
        beta_threshold,
        beta_admissible: beta_target < beta_threshold,
        value: ev.value,
        error_estimate: ev.error_estimate,
    })
}
