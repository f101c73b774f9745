use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Fractional,
    Sewing,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Fractional => "fractional",
            Method::Sewing => "sewing",
        })
    }
}

/// Result of one evaluation of `∫_a^b W(dt, φ_t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralReport {
    pub value: f64,
    pub method: Method,
    /// fractional order, fractional method only
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// dyadic levels, sewing method only
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels_used: Option<usize>,
    pub error_estimate: f64,
    pub converged: bool,
    pub bound_ratios: BTreeMap<String, f64>,
    pub params: BTreeMap<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

impl IntegralReport {
    pub(crate) fn new(method: Method, value: f64, error_estimate: f64, converged: bool) -> Self {
        IntegralReport {
            value,
            method,
            alpha: None,
            levels_used: None,
            error_estimate,
            converged,
            bound_ratios: BTreeMap::new(),
            params: BTreeMap::new(),
            runtime_ms: None,
        }
    }

    pub(crate) fn param(&mut self, key: &str, v: impl Into<serde_json::Value>) {
        self.params.insert(key.to_string(), v.into());
    }

    /// Inserts a ratio when it is finite and non-negative.
    pub(crate) fn ratio(&mut self, key: &str, v: f64) {
        if v.is_finite() && v >= 0.0 {
            self.bound_ratios.insert(key.to_string(), v);
        }
    }
}

/// Dyadic Riemann sums `J_k` over `2^k` cells and their observed orders.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct SewingTrace {
    pub sums: Vec<f64>,
    /// `log2(|J_{k-1} - J_{k-2}| / |J_k - J_{k-1}|)` at index `k`, where defined
    pub orders: Vec<Option<f64>>,
    pub extrapolated: f64,
    pub order_used: Option<f64>,
}

impl SewingTrace {
    /// `|J_k - J_{k-1}|` for `k >= 1`; index 0 is zero.
    pub fn differences(&self) -> Vec<f64> {
        let mut d = vec![0.0];
        d.extend(self.sums.windows(2).map(|w| (w[1] - w[0]).abs()));
        d
    }

    /// Least-squares slope of `-log2 |J_k - J_{k-1}|` against `k` over `lo..=hi`,
    /// skipping vanishing differences. `None` with fewer than two usable levels.
    pub fn fitted_order(&self, lo: usize, hi: usize) -> Option<f64> {
        let d = self.differences();
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for (k, &dk) in d.iter().enumerate().take(hi + 1).skip(lo.max(1)) {
            if dk > 0.0 {
                xs.push(k as f64);
                ys.push(-dk.log2());
            }
        }
        if xs.len() < 2 {
            return None;
        }
        Some(crate::stats::ols(&xs, &ys).0)
    }
}
