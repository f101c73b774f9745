//! Riemann sums `J_π = Σ μ(t_i, t_{i+1})` of the germ over dyadic partitions.

use std::time::Instant;

use rayon::prelude::*;

use super::germ::Germ;
use super::report::{IntegralReport, Method, SewingTrace};
use crate::grid_fields::func::{check_covers, uniform_node};
use crate::grid_fields::{Field, Func1};
use crate::{arg_err, Result};

/// Levels computed before the stopping rule is consulted.
pub const MIN_LEVELS: usize = 4;

const CHUNK: usize = 4096;

/// Sum of `μ` over the `2^k` uniform cells of `[a, b]`, with the sum of `|μ|`.
pub fn riemann_sum(germ: &Germ<'_>, a: f64, b: f64, k: usize) -> (f64, f64) {
    let n = 1usize << k;
    let parts: Vec<(f64, f64)> = (0..n)
        .step_by(CHUNK)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|start| {
            let (mut s, mut m) = (0.0, 0.0);
            for i in start..(start + CHUNK).min(n) {
                let v = germ.eval(uniform_node(a, b, n, i), uniform_node(a, b, n, i + 1));
                s += v;
                m += v.abs();
            }
            (s, m)
        })
        .collect();
    parts.iter().fold((0.0, 0.0), |(s, m), &(x, y)| (s + x, m + y))
}

/// Order estimate from three consecutive sums, `None` when a difference vanishes.
fn observed_order(j0: f64, j1: f64, j2: f64) -> Option<f64> {
    let (d1, d2) = ((j1 - j0).abs(), (j2 - j1).abs());
    if d1 > 0.0 && d2 > 0.0 {
        Some((d1 / d2).log2())
    } else {
        None
    }
}

fn usable(p: Option<f64>) -> Option<f64> {
    p.filter(|p| p.is_finite() && *p > 0.05 && *p <= 4.0)
}

/// `∫_a^b W(dt, φ_t)` as the limit of dyadic Riemann sums.
pub fn integrate_sewing(
    w: &dyn Field,
    phi: &dyn Func1,
    a: f64,
    b: f64,
    max_levels: usize,
    tol: f64,
) -> Result<(IntegralReport, SewingTrace)> {
    let start = Instant::now();
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return arg_err(format!("need a < b, got [{a}, {b}]"));
    }
    if !(2..=30).contains(&max_levels) {
        return arg_err(format!("max_levels = {max_levels} must lie in 2..=30"));
    }
    if !(tol >= 0.0) {
        return arg_err(format!("tol = {tol} must be non-negative"));
    }
    check_covers(phi, a, b)?;
    let germ = Germ::new(w, phi);
    let mut sums = Vec::new();
    let mut mass = 0.0;
    for k in 0..=max_levels {
        let (s, m) = riemann_sum(&germ, a, b, k);
        sums.push(s);
        mass = m;
        if k >= MIN_LEVELS.min(max_levels) && (sums[k] - sums[k - 1]).abs() < tol {
            break;
        }
    }
    let last = sums.len() - 1;
    let mut orders = vec![None; sums.len()];
    for k in 2..sums.len() {
        orders[k] = observed_order(sums[k - 2], sums[k - 1], sums[k]);
    }
    let d_last = (sums[last] - sums[last - 1]).abs();
    let order_used = usable(orders[last]);
    let (value, correction) = match order_used {
        Some(p) => {
            let c = (sums[last] - sums[last - 1]) / (p.exp2() - 1.0);
            (sums[last] + c, c.abs())
        }
        None => (sums[last], d_last),
    };
    let floor = 4.0 * f64::EPSILON * mass * ((1usize << last) as f64).sqrt();
    let diffs: Vec<f64> = sums.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    // the last three differences all failing to decrease
    let tail = &diffs[diffs.len().saturating_sub(4)..];
    let stalled = tail.len() == 4 && tail.windows(2).all(|w| w[1] >= w[0]) && tail[3] > floor;
    let mut rep = IntegralReport::new(Method::Sewing, value, correction + floor, !stalled);
    rep.levels_used = Some(last);
    rep.param("a", a);
    rep.param("b", b);
    rep.param("max_levels", max_levels);
    rep.param("tol", tol);
    rep.param("field", w.describe());
    rep.param("path", phi.describe());
    if let Some(p) = order_used {
        rep.param("order", p);
    }
    rep.runtime_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    let trace = SewingTrace { sums, orders, extrapolated: value, order_used };
    Ok((rep, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_fields::{make_product_field, Elementary};

    #[test]
    fn additive_germ_telescopes_at_every_level() {
        let w = make_product_field(Elementary::Sin.shared(), Elementary::Const(1.0).shared());
        let (rep, trace) = integrate_sewing(&w, &Elementary::Cos, 0.0, 1.0, 10, 0.0).unwrap();
        for s in &trace.sums {
            assert!((s - 1f64.sin()).abs() < 1e-14);
        }
        assert!((rep.value - 1f64.sin()).abs() < 1e-14 && rep.converged);
    }

    #[test]
    fn linear_medium_converges_at_first_order() {
        let w = make_product_field(Elementary::identity().shared(), Elementary::identity().shared());
        let (rep, trace) = integrate_sewing(&w, &Elementary::identity(), 0.0, 1.0, 12, 0.0).unwrap();
        assert!((rep.value - 0.5).abs() < 1e-10, "{}", rep.value);
        let p = trace.fitted_order(4, 12).unwrap();
        assert!((p - 1.0).abs() < 0.05, "{p}");
        // J_k = 1/2 - 2^{-k-1} exactly
        assert!((trace.sums[3] - (0.5 - 1.0 / 16.0)).abs() < 1e-15);
    }

    #[test]
    fn stops_at_tolerance() {
        let w = make_product_field(Elementary::identity().shared(), Elementary::identity().shared());
        let (rep, _) = integrate_sewing(&w, &Elementary::identity(), 0.0, 1.0, 25, 1e-3).unwrap();
        assert!(rep.levels_used.unwrap() < 12);
    }
}
