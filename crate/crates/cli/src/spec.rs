//! Experiment files and the reports produced from them.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use nlyoung::frac_calc::QuadratureConfig;
use nlyoung::grid_fields::{parse_field, parse_path, Regularity};
use nlyoung::nonlinear_young::{
    alpha_independence, integrate_sewing, AlphaSpread, FractionalIntegrator, IntegralReport, Method, DEFAULT_CELLS,
};

use crate::{Failure, Status};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularitySpec {
    pub tau: f64,
    pub lambda: f64,
    pub gamma: f64,
    /// defaults to the midpoint of `(1 - τ, λγ)`
    #[serde(default)]
    pub alpha: Option<f64>,
}

impl RegularitySpec {
    pub fn resolve(&self) -> Regularity {
        let r = Regularity::new(self.tau, self.lambda, self.gamma);
        self.alpha.map_or(r, |a| r.with_alpha(a))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadSpec {
    /// cells of the fractional evaluator
    pub n_nodes: usize,
    pub tol: f64,
    pub sewing_levels: usize,
    /// stop refining once consecutive Riemann sums differ by less
    pub sewing_tol: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec { n_nodes: DEFAULT_CELLS, tol: 1e-8, sewing_levels: 20, sewing_tol: 0.0 }
    }
}

impl QuadSpec {
    pub fn config(&self) -> QuadratureConfig {
        QuadratureConfig { n_nodes: self.n_nodes, tol: self.tol, ..QuadratureConfig::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// `|frac - sewing| <= factor (err_frac + err_sewing)`
    pub cross_method_factor: f64,
    pub cross_method_relative: f64,
    /// α spread against the largest error estimate
    pub alpha_spread_factor: f64,
    /// closed-form value, when one is known
    pub expected: Option<f64>,
    pub expected_relative: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            cross_method_factor: 5.0,
            cross_method_relative: 0.02,
            alpha_spread_factor: 20.0,
            expected: None,
            expected_relative: 1e-4,
        }
    }
}

fn both_methods() -> Vec<Method> {
    vec![Method::Fractional, Method::Sewing]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    /// field descriptor or `.json` grid file
    pub field: String,
    /// path descriptor or `.csv` file
    pub path: String,
    pub regularity: RegularitySpec,
    pub interval: [f64; 2],
    #[serde(default = "both_methods")]
    pub methods: Vec<Method>,
    /// orders for a cross-α comparison
    #[serde(default)]
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub quadrature: QuadSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// report file name under `--out`
    #[serde(default)]
    pub output: Option<String>,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self, Failure> {
        serde_json::from_str(text).map_err(|e| Failure::Invalid(format!("spec: {e}")))
    }

    /// A copy with every default made explicit.
    pub fn effective(&self) -> Self {
        let mut s = self.clone();
        s.regularity.alpha = Some(self.regularity.resolve().alpha);
        s
    }

    pub fn validate(&self) -> Result<(), Failure> {
        let [a, b] = self.interval;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Failure::Invalid(format!("interval [{a}, {b}] must satisfy a < b")));
        }
        if self.methods.is_empty() {
            return Err(Failure::Invalid("no method requested".into()));
        }
        let reg = self.regularity.resolve();
        reg.validate()?;
        for &al in &self.alphas {
            reg.check_alpha(al)?;
        }
        self.quadrature.config().validate()?;
        if !(2..=30).contains(&self.quadrature.sewing_levels) {
            return Err(Failure::Invalid(format!("sewing_levels = {} must lie in 2..=30", self.quadrature.sewing_levels)));
        }
        Ok(())
    }
}

/// A number, its limit and whether `value <= limit`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check { name: name.into(), value, limit, pass: value <= limit }
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check { name: name.into(), value, limit, pass: value >= limit }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub spec: ExperimentSpec,
    pub reports: Vec<IntegralReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_spread: Option<AlphaSpread>,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<f64>,
}

impl RunReport {
    pub fn status(&self) -> Status {
        Status { converged: self.converged, passed: self.pass }
    }

    fn report(&self, m: Method) -> Option<&IntegralReport> {
        self.reports.iter().find(|r| r.method == m)
    }
}

/// Runs every method of `spec` and evaluates its declared tolerances.
pub fn run(spec: &ExperimentSpec) -> Result<RunReport, Failure> {
    let start = Instant::now();
    spec.validate()?;
    let w = parse_field(&spec.field)?;
    let phi = parse_path(&spec.path)?;
    let reg = spec.regularity.resolve();
    let [a, b] = spec.interval;
    let cfg = spec.quadrature.config();
    let mut reports = Vec::new();
    for &m in &spec.methods {
        let r = match m {
            Method::Fractional => FractionalIntegrator::new(cfg).integrate(w.as_ref(), phi.as_ref(), &reg, a, b)?,
            Method::Sewing => {
                let q = &spec.quadrature;
                integrate_sewing(w.as_ref(), phi.as_ref(), a, b, q.sewing_levels, q.sewing_tol)?.0
            }
        };
        reports.push(r);
    }
    let alpha_spread = if spec.alphas.is_empty() {
        None
    } else {
        Some(alpha_independence(w.as_ref(), phi.as_ref(), &reg, a, b, &spec.alphas, &cfg)?)
    };
    let mut out = RunReport {
        spec: spec.effective(),
        reports,
        alpha_spread,
        checks: Vec::new(),
        pass: true,
        converged: true,
        wall_clock_ms: None,
    };
    let tol = &spec.tolerances;
    if let (Some(f), Some(s)) = (out.report(Method::Fractional), out.report(Method::Sewing)) {
        let d = (f.value - s.value).abs();
        let checks = [
            Check::at_most("cross_method", d, tol.cross_method_factor * (f.error_estimate + s.error_estimate)),
            Check::at_most("cross_method_relative", d / f.value.abs().max(f64::MIN_POSITIVE), tol.cross_method_relative),
        ];
        out.checks.extend(checks);
    }
    if let Some(x) = tol.expected {
        let scale = if x != 0.0 { x.abs() } else { 1.0 };
        let rows: Vec<Check> = out
            .reports
            .iter()
            .map(|r| Check::at_most(format!("expected_{}", r.method), (r.value - x).abs() / scale, tol.expected_relative))
            .collect();
        out.checks.extend(rows);
    }
    if let Some(s) = &out.alpha_spread {
        out.checks.push(Check::at_most("alpha_spread", s.spread, tol.alpha_spread_factor * s.max_error));
    }
    out.pass = out.checks.iter().all(|c| c.pass);
    out.converged = out.reports.iter().all(|r| r.converged);
    out.wall_clock_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> &'static str {
        r#"{"name": "tx", "field": "id*id", "path": "id",
            "regularity": {"tau": 1, "lambda": 1, "gamma": 1}, "interval": [0, 1]}"#
    }

    #[test]
    fn defaults_round_trip() {
        let s = ExperimentSpec::from_json(minimal()).unwrap();
        assert_eq!(s.methods, both_methods());
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(ExperimentSpec::from_json(&text).unwrap(), s);
        let e = s.effective();
        assert_eq!(e.regularity.alpha, Some(0.5));
        assert_eq!(ExperimentSpec::from_json(&serde_json::to_string(&e).unwrap()).unwrap(), e);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = minimal().replace("\"name\"", "\"colour\": 1, \"name\"");
        assert!(matches!(ExperimentSpec::from_json(&bad), Err(Failure::Invalid(_))));
        let bad = minimal().replace("\"gamma\": 1", "\"gamma\": 1, \"beta\": 2");
        assert!(ExperimentSpec::from_json(&bad).is_err());
    }

    #[test]
    fn inadmissible_exponents_fail_validation() {
        let s = ExperimentSpec::from_json(&minimal().replace("\"tau\": 1, \"lambda\": 1", "\"tau\": 0.2, \"lambda\": 0.5")).unwrap();
        match s.validate() {
            Err(Failure::Invalid(m)) => assert!(m.contains("must exceed 1"), "{m}"),
            other => panic!("{other:?}"),
        }
    }
}
