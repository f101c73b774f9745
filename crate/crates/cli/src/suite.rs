//! Named suites of pinned experiments.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use nlyoung::frac_calc::QuadratureConfig;
use nlyoung::grid_fields::{make_product_field, Elementary, Func1, Regularity, SharedField, Weierstrass};
use nlyoung::iterated::{iterated_integral, IterConfig, JointField};
use nlyoung::nonlinear_young::{centered_bound_check, integrate_sewing, refined_bound_check, Method, DEFAULT_CELLS};
use nlyoung::pinned::{pinned_cases, reference_case, self_similar_cases, PinnedCase};
use nlyoung::stats::theil_sen;

use crate::spec::{run, Check, ExperimentSpec, QuadSpec, RegularitySpec, RunReport, Tolerances};
use crate::{Failure, Status};

/// Quadrature tolerance of the pinned Weierstrass specs, which converge slowly in the cell count.
pub const PINNED_TOL: f64 = 1e-4;

pub const SUITES: [&str; 5] = ["reduction", "alpha", "convergence", "bounds", "iterated"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub runs: Vec<RunReport>,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<f64>,
}

impl SuiteReport {
    pub fn status(&self) -> Status {
        Status { converged: self.converged, passed: self.pass }
    }
}

fn reg_spec(r: &Regularity) -> RegularitySpec {
    RegularitySpec { tau: r.tau, lambda: r.lambda, gamma: r.gamma, alpha: None }
}

fn pinned_spec(c: &PinnedCase, methods: Vec<Method>) -> ExperimentSpec {
    ExperimentSpec {
        name: c.name.clone(),
        field: c.field.describe(),
        path: c.path.describe(),
        regularity: reg_spec(&c.reg),
        interval: [c.a, c.b],
        methods,
        alphas: Vec::new(),
        quadrature: QuadSpec { tol: PINNED_TOL, ..QuadSpec::default() },
        tolerances: Tolerances::default(),
        output: None,
    }
}

/// The specs behind a suite; empty for the purely computed suites.
pub fn suite_specs(name: &str) -> Result<Vec<ExperimentSpec>, Failure> {
    let both = vec![Method::Fractional, Method::Sewing];
    let specs = match name {
        "reduction" => [("id", "id", 0.5), ("poly:c=0/0/1", "poly:c=0/0/0/1", 0.4), ("sin", "poly:c=0/0/1", 2.0 * 1f64.cos() - 1f64.sin())]
            .iter()
            .map(|&(g, phi, x)| ExperimentSpec {
                name: format!("reduction {g} / {phi}"),
                field: format!("{g}*id"),
                path: phi.to_string(),
                regularity: RegularitySpec { tau: 1.0, lambda: 1.0, gamma: 1.0, alpha: None },
                interval: [0.0, 1.0],
                methods: both.clone(),
                alphas: Vec::new(),
                quadrature: QuadSpec::default(),
                tolerances: Tolerances { expected: Some(x), ..Tolerances::default() },
                output: None,
            })
            .collect(),
        "alpha" => pinned_cases()
            .iter()
            .map(|c| ExperimentSpec { alphas: c.reg.alpha_grid(5, 0.05), ..pinned_spec(c, vec![Method::Fractional]) })
            .collect(),
        "convergence" => pinned_cases().iter().map(|c| pinned_spec(c, both.clone())).collect(),
        "bounds" | "iterated" => Vec::new(),
        other => return Err(Failure::Invalid(format!("unknown suite `{other}` (expected one of {SUITES:?})"))),
    };
    Ok(specs)
}

fn dyadic_slope(ratios: &[f64]) -> f64 {
    let js: Vec<f64> = (0..ratios.len()).map(|j| j as f64).collect();
    let ls: Vec<f64> = ratios.iter().map(|r| r.log2()).collect();
    theil_sen(&js, &ls)
}

fn bound_checks() -> Result<Vec<Check>, Failure> {
    let cfg = QuadratureConfig::with_nodes(DEFAULT_CELLS);
    let mut checks = Vec::new();
    for c in self_similar_cases() {
        let ratios = (0..=6)
            .map(|j| {
                let b = c.a + (c.b - c.a) * 0.5f64.powi(j);
                centered_bound_check(c.field.as_ref(), c.path.as_ref(), &c.reg, c.a, b, c.a, &cfg).map(|r| r.ratio)
            })
            .collect::<Result<Vec<_>, _>>()?;
        checks.push(Check::at_most(format!("centered slope |{}|", c.name), dyadic_slope(&ratios).abs(), 0.15));
    }
    let reg = Regularity::new(0.6, 1.0, 0.7);
    let w = make_product_field(Arc::new(Weierstrass::new(0.6, 16, 2.0, &[])?), Elementary::identity().shared());
    let phi = Elementary::identity();
    let threshold = 1.0 + reg.epsilon() / reg.gamma;
    for (beta, below) in [(0.9 * threshold, true), (2.1, false)] {
        let ratios = (0..=6)
            .map(|j| refined_bound_check(&w, &phi, &reg, 0.0, 0.5f64.powi(j), 1.0, 1.0, beta, &cfg).map(|r| r.ratio))
            .collect::<Result<Vec<_>, _>>()?;
        let s = dyadic_slope(&ratios);
        checks.push(if below {
            Check::at_most(format!("refined slope, beta = {beta:.4}"), s, 0.15)
        } else {
            Check { name: format!("refined slope, beta = {beta} (negative control)"), value: s, limit: 0.1, pass: s > 0.1 }
        });
    }
    Ok(checks)
}

fn iterated_checks() -> Result<Vec<Check>, Failure> {
    let mut checks = Vec::new();
    for method in [Method::Fractional, Method::Sewing] {
        let cfg = IterConfig { method, m: 11, quad: QuadratureConfig::with_nodes(2048), ..Default::default() };
        for f in [Elementary::identity(), Elementary::Sin] {
            let field: SharedField = Arc::new(make_product_field(f.clone().shared(), Elementary::Const(1.0).shared()));
            let fs = vec![JointField::new(field, 1.0, 1.0)?; 5];
            let it = iterated_integral(&fs, Elementary::Const(1.0).shared(), 0.0, 1.0, &cfg)?;
            let d = f.value(1.0) - f.value(0.0);
            let mut factorial = 1.0;
            for (k, s) in it.stages.iter().enumerate() {
                factorial *= (k + 1) as f64;
                let target = d.powi(k as i32 + 1) / factorial;
                checks.push(Check::at_most(
                    format!("factorial {method} f={} n={}", f.describe(), k + 1),
                    (s.value - target).abs(),
                    1e-5 * target.abs() + 1e-9,
                ));
            }
        }
    }
    Ok(checks)
}

/// Runs a named suite. Independent specs run in parallel; the report keeps their order.
pub fn suite(name: &str) -> Result<SuiteReport, Failure> {
    let start = Instant::now();
    let specs = suite_specs(name)?;
    let runs = specs.par_iter().map(run).collect::<Result<Vec<_>, _>>()?;
    let mut checks = match name {
        "bounds" => bound_checks()?,
        "iterated" => iterated_checks()?,
        _ => Vec::new(),
    };
    if name == "convergence" {
        let c = reference_case();
        let (_, trace) = integrate_sewing(c.field.as_ref(), c.path.as_ref(), c.a, c.b, 20, 0.0)?;
        let p = trace.fitted_order(8, 14).unwrap_or(f64::NAN);
        checks.push(Check::at_least("sewing order over levels 8-14", p, c.reg.epsilon() - 0.1));
    }
    Ok(SuiteReport {
        suite: name.to_string(),
        pass: runs.iter().all(|r| r.pass) && checks.iter().all(|c| c.pass),
        converged: runs.iter().all(|r| r.converged),
        runs,
        checks,
        wall_clock_ms: Some(start.elapsed().as_secs_f64() * 1e3),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nlyoung::grid_fields::{parse_field, parse_path};

    #[test]
    fn pinned_descriptors_reproduce_the_cases() {
        for c in pinned_cases() {
            let s = pinned_spec(&c, vec![Method::Fractional]);
            let (w, p) = (parse_field(&s.field).unwrap(), parse_path(&s.path).unwrap());
            for &(t, x) in &[(0.1, 0.2), (0.77, -0.4)] {
                assert_eq!(w.eval(t, x), c.field.eval(t, x));
                assert_eq!(p.value(t), c.path.value(t));
            }
        }
    }

    #[test]
    fn unknown_suite_is_invalid() {
        assert!(matches!(suite_specs("nope"), Err(Failure::Invalid(_))));
        for s in SUITES {
            assert!(suite_specs(s).is_ok());
        }
    }
}
