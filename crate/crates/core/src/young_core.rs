//! Classical Young integrals `∫ f dg` through the fractional pairing
//! `-∫ D^γ_{a+} f · D^{1-γ}_{b-} g_{b-} dt`.

use serde::{Deserialize, Serialize};

use crate::frac_calc::{fractional_pairing, QuadratureConfig};
use crate::grid_fields::func::Func1;
use crate::grid_fields::holder::{holder_seminorm_fn, sup_norm};
use crate::grid_fields::func::uniform_node;
use crate::{Error, Result};

/// Probe points per direction for the seminorms in `bound_ratio`.
pub const SEMINORM_PROBE: usize = 2048;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct YoungResult {
    pub value: f64,
    pub gamma_used: f64,
    pub error_estimate: f64,
    pub bound_ratio: f64,
    pub converged: bool,
}

/// Declared Hölder exponents of the integrand and integrator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct YoungExponents {
    pub alpha_f: f64,
    pub beta_g: f64,
}

impl YoungExponents {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha_f", self.alpha_f), ("beta_g", self.beta_g)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::Regularity(format!("{name} = {v} must lie in (0, 1]")));
            }
        }
        if self.alpha_f + self.beta_g <= 1.0 {
            return Err(Error::Regularity(format!(
                "alpha_f + beta_g = {} must exceed 1",
                self.alpha_f + self.beta_g
            )));
        }
        Ok(())
    }

    /// `(1 - beta_g, alpha_f)`.
    pub fn window(&self) -> (f64, f64) {
        (1.0 - self.beta_g, self.alpha_f)
    }

    pub fn default_gamma(&self) -> f64 {
        let (lo, hi) = self.window();
        0.5 * (lo + hi)
    }

    pub fn check_gamma(&self, gamma: f64) -> Result<()> {
        let (lo, hi) = self.window();
        if !(gamma > lo && gamma < hi && gamma < 1.0) {
            return Err(Error::Regularity(format!("γ = {gamma} outside the window ({lo}, {hi})")));
        }
        Ok(())
    }
}

/// `‖g‖_β (‖f‖_∞ (b-a)^β + ‖f‖_α (b-a)^{α+β})` from probe estimates.
pub fn young_bound(f: &dyn Func1, g: &dyn Func1, exps: YoungExponents, a: f64, b: f64) -> Result<f64> {
    let n = SEMINORM_PROBE;
    let g_semi = holder_seminorm_fn(g, exps.beta_g, a, b, n)?.seminorm;
    let f_semi = holder_seminorm_fn(f, exps.alpha_f, a, b, n)?.seminorm;
    let ts: Vec<f64> = (0..=n).map(|i| uniform_node(a, b, n, i)).collect();
    let f_sup = sup_norm(f, &ts, a, b);
    let l = b - a;
    Ok(g_semi * (f_sup * l.powf(exps.beta_g) + f_semi * l.powf(exps.alpha_f + exps.beta_g)))
}

/// `∫_a^b f dg` for `f` `alpha_f`-Hölder and `g` `beta_g`-Hölder with
/// `alpha_f + beta_g > 1`. The order `gamma` defaults to the window midpoint.
pub fn young_integral(
    f: &dyn Func1,
    g: &dyn Func1,
    exps: YoungExponents,
    a: f64,
    b: f64,
    gamma: Option<f64>,
    cfg: &QuadratureConfig,
) -> Result<YoungResult> {
    exps.validate()?;
    let gamma = gamma.unwrap_or_else(|| exps.default_gamma());
    exps.check_gamma(gamma)?;
    let r = fractional_pairing(f, g, gamma, a, b, cfg)?;
    let bound = young_bound(f, g, exps, a, b)?;
    let bound_ratio = if bound > 0.0 { r.value.abs() / bound } else { 0.0 };
    Ok(YoungResult {
        value: r.value,
        gamma_used: gamma,
        error_estimate: r.error_estimate,
        bound_ratio,
        converged: r.converged,
    })
}

/// Largest pairwise difference of [`young_integral`] across `gammas`.
pub fn young_gamma_independence(
    f: &dyn Func1,
    g: &dyn Func1,
    exps: YoungExponents,
    a: f64,
    b: f64,
    gammas: &[f64],
    cfg: &QuadratureConfig,
) -> Result<f64> {
    exps.validate()?;
    for &gm in gammas {
        exps.check_gamma(gm)?;
    }
    let values = gammas
        .iter()
        .map(|&gm| fractional_pairing(f, g, gm, a, b, cfg).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?;
    Ok(crate::stats::spread(&values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_fields::func::Elementary;

    const SMOOTH: YoungExponents = YoungExponents { alpha_f: 1.0, beta_g: 1.0 };

    #[test]
    fn closed_form_cases() {
        let cfg = QuadratureConfig::default();
        let cases = [
            (Elementary::Const(1.0), Elementary::identity(), 1.0, 1e-6),
            (Elementary::Poly(vec![0.0, 0.0, 0.0, 1.0]), Elementary::Poly(vec![0.0, 0.0, 1.0]), 0.4, 1e-5),
            (Elementary::Poly(vec![0.0, 0.0, 1.0]), Elementary::Sin, 2.0 * 1f64.cos() - 1f64.sin(), 1e-5),
        ];
        for (f, g, exact, tol) in cases {
            let r = young_integral(&f, &g, SMOOTH, 0.0, 1.0, None, &cfg).unwrap();
            assert!((r.value - exact).abs() < tol, "{f:?} d{g:?}: {} vs {exact}", r.value);
            assert_eq!(r.gamma_used, 0.5);
            assert!(r.bound_ratio >= 0.0);
        }
    }

    #[test]
    fn gamma_spread_for_polynomials() {
        let cfg = QuadratureConfig::default();
        let f = Elementary::Poly(vec![0.0, 0.0, 0.0, 1.0]);
        let g = Elementary::Poly(vec![0.0, 0.0, 1.0]);
        let s = young_gamma_independence(&f, &g, SMOOTH, 0.0, 1.0, &[0.35, 0.5, 0.65], &cfg).unwrap();
        assert!(s < 1e-5, "{s}");
        let s = young_gamma_independence(&Elementary::Const(1.0), &Elementary::identity(), SMOOTH, 0.0, 1.0, &[0.2, 0.5, 0.8], &cfg).unwrap();
        assert!(s < 1e-8, "{s}");
    }

    #[test]
    fn rejects_subcritical_exponents_and_bad_gamma() {
        let cfg = QuadratureConfig::default();
        let low = YoungExponents { alpha_f: 0.4, beta_g: 0.5 };
        let e = young_integral(&Elementary::Sin, &Elementary::Cos, low, 0.0, 1.0, None, &cfg).unwrap_err();
        assert!(matches!(e, Error::Regularity(_)));
        let ok = YoungExponents { alpha_f: 0.8, beta_g: 0.8 };
        let e = young_integral(&Elementary::Sin, &Elementary::Cos, ok, 0.0, 1.0, Some(0.1), &cfg).unwrap_err();
        assert!(matches!(e, Error::Regularity(_)));
    }
}
