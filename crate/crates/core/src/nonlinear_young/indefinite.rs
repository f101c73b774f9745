//! Indefinite integrals `t ↦ ∫_a^t W(ds, φ_s)` and the α-independence study.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fractional::FractionalIntegrator;
use crate::frac_calc::QuadratureConfig;
use crate::grid_fields::func::uniform_node;
use crate::grid_fields::{Field, Func1, Regularity, SampledPath};
use crate::stats::ols;
use crate::{arg_err, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct IndefiniteIntegral {
    pub path: SampledPath,
    /// log-log slope of the RMS increment against the dyadic lag
    pub slope: f64,
    pub lags: Vec<f64>,
    pub rms_increments: Vec<f64>,
    /// sum of the per-cell error estimates
    pub error_estimate: f64,
    pub converged: bool,
}

/// RMS increments of uniformly sampled values over dyadic lags `1, 2, 4, ..`
/// up to a quarter of the samples, and the slope of their log-log fit.
pub fn holder_regression(ts: &[f64], vs: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
    let n = vs.len() - 1;
    let h = (ts[n] - ts[0]) / n as f64;
    let (mut lags, mut rms) = (Vec::new(), Vec::new());
    let mut lag = 1;
    while lag <= (n / 4).max(1) {
        let m = n + 1 - lag;
        let s: f64 = (0..m).map(|i| (vs[i + lag] - vs[i]).powi(2)).sum::<f64>() / m as f64;
        lags.push(lag as f64 * h);
        rms.push(s.sqrt());
        lag *= 2;
    }
    let usable: Vec<(f64, f64)> = lags.iter().zip(&rms).filter(|(_, r)| **r > 0.0).map(|(l, r)| (l.ln(), r.ln())).collect();
    let slope = if usable.len() >= 2 {
        let (x, y): (Vec<f64>, Vec<f64>) = usable.into_iter().unzip();
        ols(&x, &y).0
    } else {
        f64::NAN
    };
    (slope, lags, rms)
}

/// `t_i ↦ ∫_a^{t_i} W(ds, φ_s)` on `n_points` uniform points, accumulated from
/// the fractional integral over each cell.
pub fn indefinite_integral(
    w: &dyn Field,
    phi: &dyn Func1,
    reg: &Regularity,
    a: f64,
    b: f64,
    n_points: usize,
    cfg: &QuadratureConfig,
) -> Result<IndefiniteIntegral> {
    if n_points < 9 {
        return arg_err(format!("n_points = {n_points} must be at least 9"));
    }
    let n = n_points - 1;
    let fi = FractionalIntegrator::new(*cfg).diagnostics(false);
    let cells: Vec<(f64, f64, bool)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let ev = fi.evaluate(w, phi, reg, uniform_node(a, b, n, i), uniform_node(a, b, n, i + 1))?;
            Ok((ev.value, ev.error_estimate, ev.converged))
        })
        .collect::<Result<_, Error>>()?;
    let ts: Vec<f64> = (0..=n).map(|i| uniform_node(a, b, n, i)).collect();
    let mut vs = Vec::with_capacity(n + 1);
    vs.push(0.0);
    let mut acc = 0.0;
    for c in &cells {
        acc += c.0;
        vs.push(acc);
    }
    let (slope, lags, rms_increments) = holder_regression(&ts, &vs);
    Ok(IndefiniteIntegral {
        path: SampledPath::linear(ts, vs)?,
        slope,
        lags,
        rms_increments,
        error_estimate: cells.iter().map(|c| c.1).sum(),
        converged: cells.iter().all(|c| c.2),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaSpread {
    pub alphas: Vec<f64>,
    pub values: Vec<f64>,
    pub error_estimates: Vec<f64>,
    /// largest pairwise difference of the values
    pub spread: f64,
    pub max_error: f64,
}

/// The fractional integral at each order in `alphas`.
pub fn alpha_independence(
    w: &dyn Field,
    phi: &dyn Func1,
    reg: &Regularity,
    a: f64,
    b: f64,
    alphas: &[f64],
    cfg: &QuadratureConfig,
) -> Result<AlphaSpread> {
    if alphas.is_empty() {
        return arg_err("empty α list");
    }
    for &al in alphas {
        reg.check_alpha(al)?;
    }
    let fi = FractionalIntegrator::new(*cfg).diagnostics(false);
    let evs = alphas
        .iter()
        .map(|&al| fi.evaluate(w, phi, &reg.with_alpha(al), a, b))
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = evs.iter().map(|e| e.value).collect();
    let error_estimates: Vec<f64> = evs.iter().map(|e| e.error_estimate).collect();
    Ok(AlphaSpread {
        alphas: alphas.to_vec(),
        spread: crate::stats::spread(&values),
        max_error: error_estimates.iter().copied().fold(0.0, f64::max),
        values,
        error_estimates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_fields::{make_product_field, Elementary};

    #[test]
    fn linear_medium_gives_half_squares() {
        let reg = Regularity::new(1.0, 1.0, 1.0);
        let w = make_product_field(Elementary::identity().shared(), Elementary::identity().shared());
        let r = indefinite_integral(&w, &Elementary::identity(), &reg, 0.0, 1.0, 17, &QuadratureConfig::with_nodes(4096))
            .unwrap();
        for (t, v) in r.path.ts().iter().zip(r.path.values()) {
            assert!((v - t * t / 2.0).abs() < 1e-5, "{t} {v}");
        }
    }

    #[test]
    fn regression_of_a_power() {
        let ts: Vec<f64> = (0..=1024).map(|i| i as f64 / 1024.0).collect();
        let vs: Vec<f64> = ts.iter().map(|t| t.sqrt()).collect();
        let (slope, lags, _) = holder_regression(&ts, &vs);
        assert_eq!(lags.len(), 9);
        assert!(slope > 0.5 && slope < 1.0, "{slope}");
    }

    #[test]
    fn spread_is_small_for_polynomial_data() {
        let reg = Regularity::new(1.0, 1.0, 1.0);
        let w = make_product_field(Elementary::Sin.shared(), Elementary::identity().shared());
        let phi = Elementary::Poly(vec![0.0, 0.0, 1.0]);
        let cfg = QuadratureConfig { tol: 1e-6, ..QuadratureConfig::with_nodes(super::super::DEFAULT_CELLS) };
        let s = alpha_independence(&w, &phi, &reg, 0.0, 1.0, &reg.alpha_grid(5, 0.1), &cfg).unwrap();
        assert!(s.spread <= 10.0 * cfg.tol * s.values[0].abs(), "{s:?}");
        assert!(s.max_error <= 10.0 * cfg.tol);
        assert!(alpha_independence(&w, &phi, &reg, 0.0, 1.0, &[1.2], &cfg).is_err());
    }
}
