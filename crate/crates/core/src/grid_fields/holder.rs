//! Hölder seminorm estimates as suprema over finite, deterministic probe sets.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::{Field, ProductTerm};
use super::func::{uniform_node, Func1};
use super::path::SampledPath;
use crate::{arg_err, Error, Result};

/// Above this many samples the pair set is thinned by a fixed lag schedule.
pub const ALL_PAIRS_LIMIT: usize = 2048;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    pub seminorm: f64,
    pub exponent: f64,
    pub arg_pair: (f64, f64),
    pub n_pairs_checked: u64,
}

/// `|f(t) - f(s)| / |t - s|^exponent`, evaluated exactly as the estimators do.
#[inline]
pub fn holder_ratio(s: f64, fs: f64, t: f64, ft: f64, exponent: f64) -> f64 {
    (ft - fs).abs() / (t - s).abs().powf(exponent)
}

/// Lags probed for a sample set of length `n`: every lag up to 256, then a
/// geometric progression with ratio 1.02. The schedule does not depend on `n`.
pub fn lag_schedule(n: usize) -> Vec<usize> {
    if n <= ALL_PAIRS_LIMIT {
        return (1..n).collect();
    }
    let mut lags: Vec<usize> = (1..=256.min(n - 1)).collect();
    let mut l = 256.0f64;
    loop {
        l *= 1.02;
        let k = l.floor() as usize;
        if k >= n {
            break;
        }
        if k > *lags.last().unwrap() {
            lags.push(k);
        }
    }
    lags
}

#[derive(Clone, Copy)]
struct Best {
    value: f64,
    i: usize,
    j: usize,
}

fn better(a: Best, b: Best) -> Best {
    // ties resolved toward the lexicographically first pair
    if b.value > a.value || (b.value == a.value && (b.i, b.j) < (a.i, a.j)) {
        b
    } else {
        a
    }
}

/// Seminorm of raw samples; `ts` sorted, lengths equal, at least two entries.
pub fn holder_seminorm_samples(ts: &[f64], vs: &[f64], exponent: f64) -> Result<HolderReport> {
    if !(exponent > 0.0 && exponent <= 1.0) {
        return arg_err(format!("Hölder exponent {exponent} must lie in (0, 1]"));
    }
    let n = ts.len();
    if n < 2 || vs.len() != n {
        return arg_err("seminorm estimation needs at least two samples");
    }
    let lags = lag_schedule(n);
    let n_pairs: u64 = lags.iter().map(|&l| (n - l) as u64).sum();
    let best = lags
        .par_iter()
        .map(|&l| {
            let mut b = Best { value: 0.0, i: 0, j: l };
            for i in 0..n - l {
                let r = holder_ratio(ts[i], vs[i], ts[i + l], vs[i + l], exponent);
                if r > b.value {
                    b = Best { value: r, i, j: i + l };
                }
            }
            b
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Best { value: 0.0, i: 0, j: 1 }, better);
    Ok(HolderReport {
        seminorm: best.value,
        exponent,
        arg_pair: (ts[best.i], ts[best.j]),
        n_pairs_checked: n_pairs,
    })
}

/// `||p||_{exponent; a, b}` over the samples of `p` lying in `[a, b]`.
pub fn holder_seminorm_path(p: &SampledPath, exponent: f64, a: f64, b: f64) -> Result<HolderReport> {
    if !(exponent > 0.0 && exponent <= 1.0) {
        return arg_err(format!("Hölder exponent {exponent} must lie in (0, 1]"));
    }
    if a < p.start() || b > p.end() || !(a < b) {
        return Err(Error::Domain(format!(
            "[{a}, {b}] not covered by samples on [{}, {}]",
            p.start(),
            p.end()
        )));
    }
    let lo = p.ts().partition_point(|&t| t < a);
    let hi = p.ts().partition_point(|&t| t <= b);
    if hi - lo < 2 {
        return arg_err("fewer than two samples inside the interval");
    }
    holder_seminorm_samples(&p.ts()[lo..hi], &p.values()[lo..hi], exponent)
}

/// Seminorm of a closed-form function probed on `n + 1` uniform points.
pub fn holder_seminorm_fn(f: &dyn Func1, exponent: f64, a: f64, b: f64, n: usize) -> Result<HolderReport> {
    if !(a < b) || n < 1 {
        return arg_err("need a < b and n >= 1");
    }
    super::func::check_covers(f, a, b)?;
    let ts: Vec<f64> = (0..=n).map(|i| uniform_node(a, b, n, i)).collect();
    let vs: Vec<f64> = ts.iter().map(|&t| f.value(t)).collect();
    holder_seminorm_samples(&ts, &vs, exponent)
}

/// Largest `|p|` over the samples in `[a, b]` and the interpolated end values.
pub fn sup_norm(p: &dyn Func1, ts: &[f64], a: f64, b: f64) -> f64 {
    ts.iter()
        .filter(|&&t| t >= a && t <= b)
        .map(|&t| p.value(t).abs())
        .fold(p.value(a).abs().max(p.value(b).abs()), f64::max)
}

/// Probe resolution for field seminorms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldProbe {
    pub nt: usize,
    pub nx: usize,
    /// cells per direction for rank-one product fields, whose suprema factorise
    pub fine: usize,
}

impl Default for FieldProbe {
    fn default() -> Self {
        FieldProbe { nt: 33, nx: 33, fine: 4096 }
    }
}

/// The three suprema of the medium seminorm and their sum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldHolderReport {
    /// rectangular term, the bracket seminorm `[W]`
    pub rect: f64,
    pub time: f64,
    pub space: f64,
    pub total: f64,
    /// `(s, t, x, y)` attaining the rectangular sup
    pub rect_arg: (f64, f64, f64, f64),
    pub n_tuples_checked: u64,
}

/// Estimates `||W||_{tau, lambda; a, b}` with `x, y` restricted to `space_box`.
pub fn holder_seminorm_field(
    w: &dyn Field,
    tau: f64,
    lambda: f64,
    a: f64,
    b: f64,
    space_box: (f64, f64),
    probe: FieldProbe,
) -> Result<FieldHolderReport> {
    if probe.nt < 2 || probe.nx < 1 || !(a < b) {
        return arg_err("empty probe grid");
    }
    let (x0, x1) = space_box;
    if !(x0 <= x1) || !x0.is_finite() || !x1.is_finite() {
        return arg_err("empty space box");
    }
    if let Some(terms) = w.separable() {
        if terms.len() == 1 && probe.fine >= 1 {
            return factored_field_seminorm(&terms[0], tau, lambda, a, b, space_box, probe.fine);
        }
    }
    let nx = if x0 == x1 { 1 } else { probe.nx.max(2) };
    let ts: Vec<f64> = (0..probe.nt).map(|i| uniform_node(a, b, probe.nt - 1, i)).collect();
    let xs: Vec<f64> = if nx == 1 { vec![x0] } else { (0..nx).map(|i| uniform_node(x0, x1, nx - 1, i)).collect() };

    // rectangular term over all time pairs and space pairs
    let rect_rows: Vec<(f64, (f64, f64, f64, f64))> = (0..ts.len())
        .into_par_iter()
        .map(|i| {
            let mut best = (0.0, (ts[0], ts[1], xs[0], xs[0]));
            for j in i + 1..ts.len() {
                let dt = (ts[j] - ts[i]).powf(tau);
                for p in 0..xs.len() {
                    for q in p + 1..xs.len() {
                        let r = w.increment_rect(ts[i], ts[j], xs[p], xs[q]).abs() / (dt * (xs[q] - xs[p]).powf(lambda));
                        if r > best.0 {
                            best = (r, (ts[i], ts[j], xs[p], xs[q]));
                        }
                    }
                }
            }
            best
        })
        .collect();
    let (rect, rect_arg) = rect_rows
        .into_iter()
        .fold((0.0, (ts[0], ts[1], xs[0], xs[0])), |acc, r| if r.0 > acc.0 { r } else { acc });

    let time_rows: Vec<f64> = xs
        .par_iter()
        .map(|&x| {
            let mut m: f64 = 0.0;
            for i in 0..ts.len() {
                for j in i + 1..ts.len() {
                    m = m.max(w.increment_t(ts[i], ts[j], x).abs() / (ts[j] - ts[i]).powf(tau));
                }
            }
            m
        })
        .collect();
    let time = time_rows.into_iter().fold(0.0, f64::max);

    let space_rows: Vec<f64> = ts
        .par_iter()
        .map(|&t| {
            let mut m: f64 = 0.0;
            for p in 0..xs.len() {
                for q in p + 1..xs.len() {
                    m = m.max(w.increment_x(t, xs[p], xs[q]).abs() / (xs[q] - xs[p]).powf(lambda));
                }
            }
            m
        })
        .collect();
    let space = space_rows.into_iter().fold(0.0, f64::max);

    let nt = ts.len() as u64;
    let nxx = xs.len() as u64;
    let tp = nt * (nt - 1) / 2;
    let xp = nxx * (nxx.saturating_sub(1)) / 2;
    Ok(FieldHolderReport {
        rect,
        time,
        space,
        total: rect + time + space,
        rect_arg,
        n_tuples_checked: tp * xp + tp * nxx + nt * xp,
    })
}

/// For `W = g(t) h(x)` every supremum splits into one-variable suprema.
fn factored_field_seminorm(
    term: &ProductTerm,
    tau: f64,
    lambda: f64,
    a: f64,
    b: f64,
    (x0, x1): (f64, f64),
    n: usize,
) -> Result<FieldHolderReport> {
    let g = holder_seminorm_fn(term.time.as_ref(), tau, a, b, n)?;
    let ts: Vec<f64> = (0..=n).map(|i| uniform_node(a, b, n, i)).collect();
    let g_sup = sup_norm(term.time.as_ref(), &ts, a, b);
    if x0 == x1 {
        let h_sup = term.space.value(x0).abs();
        return Ok(FieldHolderReport {
            rect: 0.0,
            time: g.seminorm * h_sup,
            space: 0.0,
            total: g.seminorm * h_sup,
            rect_arg: (g.arg_pair.0, g.arg_pair.1, x0, x0),
            n_tuples_checked: g.n_pairs_checked,
        });
    }
    let h = holder_seminorm_fn(term.space.as_ref(), lambda, x0, x1, n)?;
    let xs: Vec<f64> = (0..=n).map(|i| uniform_node(x0, x1, n, i)).collect();
    let h_sup = sup_norm(term.space.as_ref(), &xs, x0, x1);
    let rect = g.seminorm * h.seminorm;
    let time = g.seminorm * h_sup;
    let space = g_sup * h.seminorm;
    Ok(FieldHolderReport {
        rect,
        time,
        space,
        total: rect + time + space,
        rect_arg: (g.arg_pair.0, g.arg_pair.1, h.arg_pair.0, h.arg_pair.1),
        n_tuples_checked: g.n_pairs_checked * h.n_pairs_checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_fields::field::{make_product_field, ClosureField};
    use crate::grid_fields::func::{Elementary, SharedFn};
    use crate::grid_fields::weierstrass::Weierstrass;
    use std::sync::Arc;

    #[test]
    fn linear_path_has_unit_lipschitz_constant() {
        let p = SampledPath::sample(&Elementary::identity(), 0.0, 1.0, 1024).unwrap();
        let r = holder_seminorm_path(&p, 1.0, 0.0, 1.0).unwrap();
        assert!((r.seminorm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn square_root_on_graded_samples() {
        let ts: Vec<f64> = (0..=1024).map(|k| (k as f64 / 1024.0).powi(2)).collect();
        let vs: Vec<f64> = ts.iter().map(|t| t.sqrt()).collect();
        let p = SampledPath::linear(ts, vs).unwrap();
        let r = holder_seminorm_path(&p, 0.5, 0.0, 1.0).unwrap();
        assert!((r.seminorm - 1.0).abs() < 1e-12, "{}", r.seminorm);
    }

    #[test]
    fn arg_pair_reproduces_seminorm() {
        let w = Weierstrass::standard(0.7, 12).unwrap();
        let r = holder_seminorm_fn(&w, 0.7, 0.0, 1.0, 700).unwrap();
        let (s, t) = r.arg_pair;
        assert_eq!(holder_ratio(s, w.value(s), t, w.value(t), 0.7), r.seminorm);
        assert_eq!(r.n_pairs_checked, 701 * 700 / 2);
    }

    #[test]
    fn lag_schedule_is_thinned_and_monotone() {
        let lags = lag_schedule(100_000);
        assert_eq!(lags[255], 256);
        assert!(lags.windows(2).all(|w| w[1] > w[0]));
        assert!(*lags.last().unwrap() < 100_000);
        assert!(lags.len() < 1000);
    }

    #[test]
    fn rejects_bad_exponent_and_domain() {
        let p = SampledPath::sample(&Elementary::identity(), 0.0, 1.0, 8).unwrap();
        assert!(matches!(holder_seminorm_path(&p, 0.0, 0.0, 1.0), Err(Error::Argument(_))));
        assert!(matches!(holder_seminorm_path(&p, 1.5, 0.0, 1.0), Err(Error::Argument(_))));
        assert!(matches!(holder_seminorm_path(&p, 0.5, -1.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn product_field_terms() {
        let w = make_product_field(Elementary::identity().shared(), Elementary::identity().shared());
        let r = holder_seminorm_field(&w, 1.0, 1.0, 0.0, 1.0, (0.0, 1.0), FieldProbe::default()).unwrap();
        assert!((r.rect - 1.0).abs() < 1e-9);
        assert!((r.time - 1.0).abs() < 1e-9);
        assert!((r.space - 1.0).abs() < 1e-9);
        let c = ClosureField::new("const", |_, _| 3.0);
        let r = holder_seminorm_field(&c, 0.5, 0.5, 0.0, 1.0, (0.0, 1.0), FieldProbe::default()).unwrap();
        assert_eq!((r.rect, r.time, r.space), (0.0, 0.0, 0.0));
    }

    #[test]
    fn rectangular_term_factorises_for_weierstrass_products() {
        let g: SharedFn = Arc::new(Weierstrass::standard(0.6, 12).unwrap());
        let h: SharedFn = Arc::new(Weierstrass::standard(0.8, 12).unwrap());
        let w = make_product_field(g.clone(), h.clone());
        let r = holder_seminorm_field(&w, 0.6, 0.8, 0.0, 1.0, (0.0, 1.0), FieldProbe::default()).unwrap();
        // the generic grid route agrees on its own probe set
        let coarse = FieldProbe { nt: 33, nx: 33, fine: 0 };
        let rc = holder_seminorm_field(&w, 0.6, 0.8, 0.0, 1.0, (0.0, 1.0), coarse).unwrap();
        let ts: Vec<f64> = (0..33).map(|i| i as f64 / 32.0).collect();
        let g33 = holder_seminorm_samples(&ts, &ts.iter().map(|&t| g.value(t)).collect::<Vec<_>>(), 0.6).unwrap();
        let h33 = holder_seminorm_samples(&ts, &ts.iter().map(|&t| h.value(t)).collect::<Vec<_>>(), 0.8).unwrap();
        assert!((rc.rect - g33.seminorm * h33.seminorm).abs() <= 1e-12 * rc.rect);
        // brute-force oracle on each factor at a finer resolution
        let sg = holder_seminorm_fn(g.as_ref(), 0.6, 0.0, 1.0, 1024).unwrap().seminorm;
        let sh = holder_seminorm_fn(h.as_ref(), 0.8, 0.0, 1.0, 1024).unwrap().seminorm;
        let rel = (r.rect - sg * sh).abs() / (sg * sh);
        assert!(rel < 0.15, "rect {} vs {} ({rel})", r.rect, sg * sh);
    }
}
