//! Iterated nonlinear integrals: diagonal integrals `∫ρ(s)F(ds, s)`, the stage
//! recursion, the factorial identity and the growth exponents.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::frac_calc::QuadratureConfig;
use crate::grid_fields::func::{intersect, uniform_node};
use crate::grid_fields::{
    holder_seminorm_field, Elementary, Field, FieldProbe, Func1, ProductFn, ProductTerm, Regularity, SampledPath,
    SharedField, SharedFn,
};
use crate::nonlinear_young::{holder_regression, integrate_sewing, FractionalIntegrator, IntegralReport, Method};
use crate::stats::ols;
use crate::{arg_err, Error, Result};

/// A field `F(s, t)` on `[a, b]²` with joint exponents `(τ, λ)`: the second
/// argument plays the role of the space variable.
#[derive(Clone, Debug)]
pub struct JointField {
    pub field: SharedField,
    pub tau: f64,
    pub lambda: f64,
}

impl JointField {
    pub fn new(field: SharedField, tau: f64, lambda: f64) -> Result<Self> {
        for (name, v) in [("tau", tau), ("lambda", lambda)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::Regularity(format!("{name} = {v} must lie in (0, 1]")));
            }
        }
        if tau + lambda <= 1.0 {
            return Err(Error::Regularity(format!("tau + lambda = {} must exceed 1", tau + lambda)));
        }
        Ok(JointField { field, tau, lambda })
    }

    /// Estimated `||F||_{τ,λ; a, b}` on `[a, b]²`.
    pub fn seminorm(&self, a: f64, b: f64, probe: FieldProbe) -> Result<f64> {
        Ok(holder_seminorm_field(self.field.as_ref(), self.tau, self.lambda, a, b, (a, b), probe)?.total)
    }
}

/// `G(s, x) = ρ(x) F(s, x)`, whose nonlinear integral along `φ_t = t` is `∫ρ(s)F(ds, s)`.
#[derive(Clone)]
pub struct DiagonalField {
    pub f: SharedField,
    pub rho: SharedFn,
}

impl fmt::Debug for DiagonalField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiagonalField({})", self.describe())
    }
}

impl Field for DiagonalField {
    fn eval(&self, s: f64, x: f64) -> f64 {
        self.rho.value(x) * self.f.eval(s, x)
    }
    fn increment_t(&self, s: f64, t: f64, x: f64) -> f64 {
        self.rho.value(x) * self.f.increment_t(s, t, x)
    }
    fn increment_rect(&self, s: f64, t: f64, x: f64, y: f64) -> f64 {
        // ρ(x) [F]_rect + (ρ(x) - ρ(y)) (F(s, y) - F(t, y))
        self.rho.value(x) * self.f.increment_rect(s, t, x, y) + self.rho.diff(x, y) * self.f.increment_t(s, t, y)
    }
    fn separable(&self) -> Option<Vec<ProductTerm>> {
        let terms = self.f.separable()?;
        Some(
            terms
                .into_iter()
                .map(|p| ProductTerm { time: p.time, space: Arc::new(ProductFn { left: self.rho.clone(), right: p.space }) })
                .collect(),
        )
    }
    fn time_domain(&self) -> Option<(f64, f64)> {
        self.f.time_domain()
    }
    fn space_domain(&self) -> Option<(f64, f64)> {
        intersect(self.f.space_domain(), self.rho.domain())
    }
    fn describe(&self) -> String {
        format!("diag[{}; {}]", self.rho.describe(), self.f.describe())
    }
}

/// Growth exponents for iterated integrals with `ρ(a) = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthParams {
    pub tau: f64,
    pub lambda: f64,
    /// `(λ + τ - 1) / λ`
    pub beta: f64,
}

impl GrowthParams {
    pub fn new(tau: f64, lambda: f64) -> Self {
        GrowthParams { tau, lambda, beta: (lambda + tau - 1.0) / lambda }
    }

    /// `ℓ_n = (β^{n-1} - 1)/(β - 1) + β^{n-1}(τ + λ)`, with `n - 1` for the first part when `β = 1`.
    pub fn ell(&self, n: usize) -> f64 {
        let k = n.saturating_sub(1) as i32;
        let b = self.beta;
        let geometric = if (b - 1.0).abs() < 1e-12 { k as f64 } else { (b.powi(k) - 1.0) / (b - 1.0) };
        geometric + b.powi(k) * (self.tau + self.lambda)
    }

    pub fn ells(&self, n: usize) -> Vec<f64> {
        (1..=n).map(|k| self.ell(k)).collect()
    }
}

/// How stage `k + 1` consumes stage `k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IterMode {
    /// `I^{(k+1)}_s = ∫_a^s I^{(k)}_r F_{k+1}(dr, r)`
    #[default]
    Diagonal,
    /// `I^{(k+1)}_s = ∫_a^s F_{k+1}(dr, I^{(k)}_r)`, first stage `∫ρ(r)F_1(dr, r)`
    Nested,
    /// as `Nested` with first stage `∫F_1(dr, ρ(r))`
    NestedPathBase,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterConfig {
    pub mode: IterMode,
    pub method: Method,
    /// stage paths live on `2^m + 1` uniform points
    pub m: usize,
    /// per-cell quadrature for the fractional method
    pub quad: QuadratureConfig,
    /// dyadic levels per cell for the sewing method
    pub sewing_levels: usize,
}

impl Default for IterConfig {
    fn default() -> Self {
        IterConfig {
            mode: IterMode::Diagonal,
            method: Method::Fractional,
            m: 9,
            quad: QuadratureConfig::with_nodes(4096),
            sewing_levels: 10,
        }
    }
}

impl IterConfig {
    pub fn validate(&self) -> Result<()> {
        if !(2..=16).contains(&self.m) {
            return arg_err(format!("m = {} must lie in 2..=16", self.m));
        }
        if !(2..=24).contains(&self.sewing_levels) {
            return arg_err(format!("sewing_levels = {} must lie in 2..=24", self.sewing_levels));
        }
        self.quad.validate()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageStats {
    pub stage: usize,
    /// `I^{(k)}_{a, b}`
    pub value: f64,
    /// Hölder regression slope of the stage path
    pub slope: f64,
    /// exponent `λ` or `γ` handed to the next stage
    pub exponent: f64,
    pub error_estimate: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IteratedIntegral {
    pub value: f64,
    pub stage_paths: Vec<SampledPath>,
    pub stages: Vec<StageStats>,
    pub error_estimate: f64,
    pub converged: bool,
}

/// Regularity exponent of sampled values read from their Hölder regression,
/// capped at 1. Constant samples count as Lipschitz.
fn sample_exponent(ts: &[f64], vs: &[f64]) -> (f64, f64) {
    let (slope, _, _) = holder_regression(ts, vs);
    let e = if slope.is_finite() { slope.clamp(0.0, 1.0) } else { 1.0 };
    (slope, e)
}

fn func_exponent(f: &dyn Func1, a: f64, b: f64, n: usize) -> f64 {
    let ts: Vec<f64> = (0..=n).map(|i| uniform_node(a, b, n, i)).collect();
    let vs: Vec<f64> = ts.iter().map(|&t| f.value(t)).collect();
    sample_exponent(&ts, &vs).1
}

fn stage_regularity(tau: f64, lambda: f64, what: &str) -> Result<Regularity> {
    if tau + lambda <= 1.0 {
        return Err(Error::Regularity(format!(
            "stage not admissible: tau + {what} = {tau} + {lambda:.4} must exceed 1"
        )));
    }
    Ok(Regularity::new(tau, lambda, 1.0))
}

/// `∫_a^b ρ(s) F(ds, s)` through `G(s, t) = ρ(t) F(s, t)` integrated along `φ_t = t`.
pub fn diagonal_integral(f: &JointField, rho: SharedFn, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<IntegralReport> {
    if !(a < b) {
        return arg_err(format!("need a < b, got [{a}, {b}]"));
    }
    let lam = f.lambda.min(func_exponent(rho.as_ref(), a, b, 4096));
    let reg = stage_regularity(f.tau, lam, "lambda")?;
    let g = DiagonalField { f: f.field.clone(), rho };
    let mut rep = FractionalIntegrator::new(*cfg).diagnostics(false).integrate(&g, &Elementary::identity(), &reg, a, b)?;
    rep.param("lambda_used", lam);
    Ok(rep)
}

/// Cumulative integral of `w` along `phi` over the cells of `ts`.
fn stage_values(
    w: &dyn Field,
    phi: &dyn Func1,
    reg: &Regularity,
    ts: &[f64],
    cfg: &IterConfig,
) -> Result<(Vec<f64>, f64, bool)> {
    let fi = FractionalIntegrator::new(cfg.quad).diagnostics(false);
    let cells: Vec<(f64, f64, bool)> = (0..ts.len() - 1)
        .into_par_iter()
        .map(|i| match cfg.method {
            Method::Fractional => {
                let ev = fi.evaluate(w, phi, reg, ts[i], ts[i + 1])?;
                Ok((ev.value, ev.error_estimate, ev.converged))
            }
            Method::Sewing => {
                let (rep, _) = integrate_sewing(w, phi, ts[i], ts[i + 1], cfg.sewing_levels, 0.0)?;
                Ok((rep.value, rep.error_estimate, rep.converged))
            }
        })
        .collect::<Result<_, Error>>()?;
    let mut vs = Vec::with_capacity(ts.len());
    let mut acc = 0.0;
    vs.push(0.0);
    for c in &cells {
        acc += c.0;
        vs.push(acc);
    }
    Ok((vs, cells.iter().map(|c| c.1).sum(), cells.iter().all(|c| c.2)))
}

/// `I^{(n)}_{a, b}(F_1, .., F_n)` with all stage paths `s ↦ I^{(k)}_{a, s}`.
pub fn iterated_integral(fs: &[JointField], rho: SharedFn, a: f64, b: f64, cfg: &IterConfig) -> Result<IteratedIntegral> {
    cfg.validate()?;
    if fs.is_empty() {
        return arg_err("need at least one field");
    }
    if !(a < b) {
        return arg_err(format!("need a < b, got [{a}, {b}]"));
    }
    let n = 1usize << cfg.m;
    let ts: Vec<f64> = (0..=n).map(|i| uniform_node(a, b, n, i)).collect();
    let identity = Elementary::identity();
    let mut paths: Vec<SampledPath> = Vec::with_capacity(fs.len());
    let mut stages = Vec::with_capacity(fs.len());
    for (k, f) in fs.iter().enumerate() {
        let prev: SharedFn = match paths.last() {
            Some(p) => Arc::new(p.clone()),
            None => rho.clone(),
        };
        let pts = ts.iter().map(|&t| prev.value(t)).collect::<Vec<_>>();
        let prev_exp = sample_exponent(&ts, &pts).1;
        let nested = k > 0 && cfg.mode != IterMode::Diagonal || k == 0 && cfg.mode == IterMode::NestedPathBase;
        let (vs, err, conv, exponent) = if nested {
            // F(dr, prev(r)) with γ read from the previous stage
            let reg = Regularity::new(f.tau, f.lambda, prev_exp.max(1e-3));
            if reg.epsilon() <= 0.0 {
                return Err(Error::Regularity(format!(
                    "stage {} not admissible: tau + lambda*gamma = {} + {}·{prev_exp:.4} must exceed 1",
                    k + 1,
                    f.tau,
                    f.lambda
                )));
            }
            let (vs, e, c) = stage_values(f.field.as_ref(), prev.as_ref(), &reg, &ts, cfg)?;
            (vs, e, c, prev_exp)
        } else {
            let lam = f.lambda.min(prev_exp);
            let reg = stage_regularity(f.tau, lam, &format!("lambda at stage {}", k + 1))?;
            let g = DiagonalField { f: f.field.clone(), rho: prev };
            let (vs, e, c) = stage_values(&g, &identity, &reg, &ts, cfg)?;
            (vs, e, c, lam)
        };
        let (slope, _) = sample_exponent(&ts, &vs);
        stages.push(StageStats { stage: k + 1, value: vs[n], slope, exponent, error_estimate: err, converged: conv });
        paths.push(SampledPath::linear(ts.clone(), vs)?);
    }
    let last = stages.last().expect("at least one stage");
    Ok(IteratedIntegral {
        value: last.value,
        error_estimate: stages.iter().map(|s| s.error_estimate).sum(),
        converged: stages.iter().all(|s| s.converged),
        stage_paths: paths,
        stages,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthCheck {
    pub scales: Vec<f64>,
    pub values: Vec<f64>,
    /// `|I_{a, a+h}| / h^{gamma_n}`
    pub ratios: Vec<f64>,
    /// log-log slope of the ratios against `h`
    pub slope: f64,
    /// largest ratio, the fitted constant `C_n`
    pub constant: f64,
    pub gamma_n: f64,
    pub ell_n: f64,
    /// `slope >= -0.1`
    pub bounded: bool,
}

/// Evaluates `I^{(n)}_{a, a+h}` across `scales` and tests `|I| ≤ C h^{gamma_n}`.
/// `ρ(a)` must vanish and `gamma_n` must stay below `ℓ_n`.
pub fn growth_check(
    fs: &[JointField],
    rho: SharedFn,
    a: f64,
    scales: &[f64],
    gamma_n: f64,
    cfg: &IterConfig,
) -> Result<GrowthCheck> {
    if scales.len() < 2 || scales.iter().any(|h| !(*h > 0.0)) {
        return arg_err("need at least two positive scales");
    }
    if rho.value(a).abs() > 1e-12 {
        return Err(Error::Hypothesis(format!("rho(a) = {} must vanish", rho.value(a))));
    }
    let tau = fs.iter().map(|f| f.tau).fold(1.0, f64::min);
    let lambda = fs.iter().map(|f| f.lambda).fold(1.0, f64::min);
    let ell_n = GrowthParams::new(tau, lambda).ell(fs.len());
    if !(gamma_n < ell_n) {
        return arg_err(format!("gamma_n = {gamma_n} must be below ell_n = {ell_n}"));
    }
    let values = scales
        .iter()
        .map(|&h| iterated_integral(fs, rho.clone(), a, a + h, cfg).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = values.iter().zip(scales).map(|(v, h)| v.abs() / h.powf(gamma_n)).collect();
    let usable: Vec<(f64, f64)> =
        scales.iter().zip(&ratios).filter(|(_, r)| **r > 0.0).map(|(h, r)| (h.ln(), r.ln())).collect();
    // all-zero values carry no trend
    let slope = if usable.len() >= 2 {
        let (x, y): (Vec<f64>, Vec<f64>) = usable.into_iter().unzip();
        ols(&x, &y).0
    } else {
        0.0
    };
    Ok(GrowthCheck {
        scales: scales.to_vec(),
        values,
        constant: ratios.iter().copied().fold(0.0, f64::max),
        ratios,
        slope,
        gamma_n,
        ell_n,
        bounded: slope >= -0.1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_fields::make_product_field;

    fn time_only(f: Elementary) -> JointField {
        JointField::new(Arc::new(make_product_field(f.shared(), Elementary::Const(1.0).shared())), 1.0, 1.0).unwrap()
    }

    fn linear_in_x(f: Elementary) -> JointField {
        JointField::new(Arc::new(make_product_field(f.shared(), Elementary::identity().shared())), 1.0, 1.0).unwrap()
    }

    fn one() -> SharedFn {
        Elementary::Const(1.0).shared()
    }

    #[test]
    fn ell_closed_form_matches_the_recursion() {
        for (tau, lambda) in [(0.6, 0.8), (1.0, 1.0), (0.9, 0.5), (0.7, 1.0)] {
            let g = GrowthParams::new(tau, lambda);
            assert!((g.ell(1) - (tau + lambda)).abs() < 1e-15);
            for n in 1..8 {
                assert!((g.ell(n + 1) - (1.0 + g.beta * g.ell(n))).abs() < 1e-12 * g.ell(n + 1));
            }
            if g.beta > 1.0 {
                assert!(g.ells(6).windows(2).all(|w| w[1] > w[0]));
            }
        }
    }

    #[test]
    fn diagonal_examples() {
        let cfg = QuadratureConfig::with_nodes(1 << 14);
        let r = diagonal_integral(&time_only(Elementary::Sin), one(), 0.0, 1.0, &cfg).unwrap();
        assert!((r.value - 1f64.sin()).abs() < 1e-6);
        let r = diagonal_integral(&time_only(Elementary::identity()), Elementary::identity().shared(), 0.0, 1.0, &cfg).unwrap();
        assert!((r.value - 0.5).abs() < 1e-5, "{}", r.value);
        let r = diagonal_integral(&linear_in_x(Elementary::Sin), one(), 0.0, 1.0, &cfg).unwrap();
        let exact = 1f64.cos() + 1f64.sin() - 1.0;
        assert!((r.value - exact).abs() < 1e-5, "{} {exact}", r.value);
    }

    #[test]
    fn diagonal_rectangle_matches_four_point_difference() {
        let f = make_product_field(Elementary::Sin.shared(), Elementary::Poly(vec![0.0, 1.0, 1.0]).shared());
        let g = DiagonalField { f: Arc::new(f), rho: Elementary::Cos.shared() };
        let (s, t, x, y) = (0.1, 0.7, 0.3, 0.9);
        let direct = g.eval(s, x) - g.eval(t, x) - g.eval(s, y) + g.eval(t, y);
        assert!((g.increment_rect(s, t, x, y) - direct).abs() < 1e-15);
        let terms = g.separable().unwrap();
        let from_terms: f64 = terms.iter().map(|p| p.time.value(s) * p.space.value(x)).sum();
        assert!((from_terms - g.eval(s, x)).abs() < 1e-15);
    }

    #[test]
    fn single_stage_is_the_diagonal_integral() {
        let f = linear_in_x(Elementary::Sin);
        let cfg = IterConfig { m: 4, ..Default::default() };
        let it = iterated_integral(std::slice::from_ref(&f), one(), 0.0, 1.0, &cfg).unwrap();
        let d = diagonal_integral(&f, one(), 0.0, 1.0, &QuadratureConfig::with_nodes(1 << 14)).unwrap();
        assert!((it.value - d.value).abs() < 1e-6, "{} {}", it.value, d.value);
        assert_eq!(it.stage_paths.len(), 1);
    }

    #[test]
    fn nested_modes_agree_on_linear_media() {
        // F_1 = f, F_k = f(s) x: I^{(k)} = f^k / k! in every mode
        let fs = [time_only(Elementary::identity()), linear_in_x(Elementary::identity()), linear_in_x(Elementary::identity())];
        let cfg = IterConfig { mode: IterMode::Nested, m: 6, ..Default::default() };
        let it = iterated_integral(&fs, one(), 0.0, 1.0, &cfg).unwrap();
        assert!((it.value - 1.0 / 6.0).abs() < 1e-4, "{}", it.value);
        let fs = [linear_in_x(Elementary::identity()), linear_in_x(Elementary::identity())];
        let cfg = IterConfig { mode: IterMode::NestedPathBase, m: 6, ..Default::default() };
        let it = iterated_integral(&fs, one(), 0.0, 1.0, &cfg).unwrap();
        assert!((it.value - 0.5).abs() < 1e-4, "{}", it.value);
    }

    #[test]
    fn order_of_the_fields_matters() {
        let fs = [time_only(Elementary::identity()), time_only(Elementary::Sin)];
        let cfg = IterConfig { m: 6, ..Default::default() };
        let x = iterated_integral(&fs, one(), 0.0, 1.0, &cfg).unwrap();
        let rev = [fs[1].clone(), fs[0].clone()];
        let y = iterated_integral(&rev, one(), 0.0, 1.0, &cfg).unwrap();
        assert!((x.value - (1f64.cos() + 1f64.sin() - 1.0)).abs() < 1e-4);
        assert!((y.value - (1.0 - 1f64.cos())).abs() < 1e-4);
    }

    #[test]
    fn growth_of_the_first_stage() {
        let rho = Elementary::identity().shared();
        let cfg = IterConfig { m: 4, ..Default::default() };
        let scales: Vec<f64> = (0..5).map(|j| 0.5f64.powi(j)).collect();
        let g = growth_check(&[time_only(Elementary::identity())], rho.clone(), 0.0, &scales, 1.9, &cfg).unwrap();
        assert!((g.slope - 0.1).abs() < 1e-3 && g.bounded, "{g:?}");
        assert!(growth_check(&[time_only(Elementary::identity())], rho, 0.0, &scales, 2.1, &cfg).is_err());
        let z = growth_check(&[time_only(Elementary::identity())], Elementary::Const(0.0).shared(), 0.0, &scales, 1.9, &cfg)
            .unwrap();
        assert!(z.values.iter().all(|v| v.abs() < 1e-15) && z.bounded);
        assert!(matches!(
            growth_check(&[time_only(Elementary::identity())], one(), 0.0, &scales, 1.9, &cfg),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn rejects_inadmissible_exponents() {
        let w: SharedField = Arc::new(make_product_field(Elementary::Sin.shared(), Elementary::identity().shared()));
        assert!(matches!(JointField::new(w.clone(), 0.4, 0.5), Err(Error::Regularity(_))));
        assert!(JointField::new(w, 0.6, 0.5).is_ok());
    }
}
