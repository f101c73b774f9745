//! Quadrature configuration, graded meshes and product-integration weights
//! for integrands carrying the algebraic kernels `u^{-p}`.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::{arg_err, Error, Result};

/// Grading exponent of the near-zone mesh.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Grading {
    Auto,
    Fixed(f64),
}

impl Grading {
    /// Auto grading is 2: combined with product weights it resolves the
    /// endpoint behaviour without crowding nodes into the roundoff regime.
    pub fn exponent(&self) -> f64 {
        match self {
            Grading::Auto => 2.0,
            Grading::Fixed(q) => q.min(MAX_GRADING),
        }
    }
}

/// Larger exponents put the first node below `1e-30` of the interval for typical `n`.
pub const MAX_GRADING: f64 = 8.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    pub n_nodes: usize,
    pub grading: Grading,
    pub split_radius: f64,
    pub tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { n_nodes: 4096, grading: Grading::Auto, split_radius: 1.0 / 16.0, tol: 1e-8 }
    }
}

impl QuadratureConfig {
    pub fn with_nodes(n_nodes: usize) -> Self {
        QuadratureConfig { n_nodes, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_nodes < 8 {
            return arg_err(format!("n_nodes = {} must be at least 8", self.n_nodes));
        }
        if let Grading::Fixed(q) = self.grading {
            if !(q >= 1.0) {
                return arg_err(format!("grading = {q} must be at least 1"));
            }
        }
        if !(self.split_radius > 0.0 && self.split_radius < 1.0) {
            return arg_err(format!("split_radius = {} must lie in (0, 1)", self.split_radius));
        }
        if !(self.tol > 0.0) {
            return arg_err(format!("tol = {} must be positive", self.tol));
        }
        Ok(())
    }

    /// Node count rounded up to a multiple of four, so that the half and quarter
    /// meshes are node subsets.
    pub fn n_rounded(&self) -> usize {
        self.n_nodes.div_ceil(4) * 4
    }
}

impl fmt::Display for QuadratureConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = match self.grading {
            Grading::Auto => "auto".to_string(),
            Grading::Fixed(q) => q.to_string(),
        };
        write!(f, "n={},grading={},split={},tol={:e}", self.n_nodes, g, self.split_radius, self.tol)
    }
}

impl FromStr for QuadratureConfig {
    type Err = Error;

    /// Parses `n=4096,grading=auto,tol=1e-8[,split=0.0625]`; missing keys keep defaults.
    fn from_str(s: &str) -> Result<Self> {
        let mut cfg = QuadratureConfig::default();
        for kv in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Argument(format!("quadrature fragment `{kv}` is not key=value")))?;
            let num = |v: &str| v.trim().parse::<f64>().map_err(|_| Error::Argument(format!("`{k}={v}` is not a number")));
            match k.trim() {
                "n" => {
                    cfg.n_nodes = v.trim().parse().map_err(|_| Error::Argument(format!("`n={v}` is not a count")))?
                }
                "grading" => {
                    cfg.grading = if v.trim() == "auto" { Grading::Auto } else { Grading::Fixed(num(v)?) }
                }
                "split" => cfg.split_radius = num(v)?,
                "tol" => cfg.tol = num(v)?,
                other => return arg_err(format!("unknown quadrature key `{other}`")),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Twelve-point Gauss–Legendre rule on `[0, 1]`.
pub fn gauss_legendre_01() -> &'static [(f64, f64); 12] {
    static RULE: OnceLock<[(f64, f64); 12]> = OnceLock::new();
    RULE.get_or_init(|| {
        const N: usize = 12;
        let mut rule = [(0.0, 0.0); N];
        for (i, slot) in rule.iter_mut().enumerate() {
            let mut x = libm::cos(std::f64::consts::PI * (i as f64 + 0.75) / (N as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=N {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = N as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            *slot = (0.5 * (1.0 - x), 0.5 * w);
        }
        rule.sort_by(|a, b| a.0.total_cmp(&b.0));
        rule
    })
}

/// `(∫ u^{-p} du, ∫ (u - a) u^{-p} du)` over `[a, b]`, `a > 0`.
pub fn cell_moments(a: f64, b: f64, p: f64) -> (f64, f64) {
    let h = b - a;
    if h <= a {
        let mut m0 = 0.0;
        let mut m1 = 0.0;
        for &(x, w) in gauss_legendre_01() {
            let u = a + h * x;
            let k = w * h * u.powf(-p);
            m0 += k;
            m1 += k * (h * x);
        }
        return (m0, m1);
    }
    let m0 = if (1.0 - p).abs() < 1e-10 {
        (b / a).ln()
    } else {
        (b.powf(1.0 - p) - a.powf(1.0 - p)) / (1.0 - p)
    };
    let m1 = if (2.0 - p).abs() < 1e-10 {
        (b / a).ln()
    } else {
        (b.powf(2.0 - p) - a.powf(2.0 - p)) / (2.0 - p)
    } - a * m0;
    (m0, m1)
}

/// Product-integration weights for `∫_0^{u_n} F(u) u^{-p} du` with `F`
/// piecewise linear on `0 = u_0 < u_1 < ... < u_n`. For `p >= 1` the weight
/// of `u_0` is zero and `F(0) = 0` is assumed.
pub fn singular_weights(us: &[f64], p: f64) -> Vec<f64> {
    let n = us.len();
    let mut w = vec![0.0; n];
    if n < 2 {
        return w;
    }
    let h = us[1];
    let m1 = h.powf(2.0 - p) / (2.0 - p);
    w[1] += m1 / h;
    if p < 1.0 {
        w[0] += h.powf(1.0 - p) / (1.0 - p) - m1 / h;
    }
    for j in 1..n - 1 {
        let (a, b) = (us[j], us[j + 1]);
        let (m0, m1) = cell_moments(a, b, p);
        let hj = b - a;
        w[j] += m0 - m1 / hj;
        w[j + 1] += m1 / hj;
    }
    w
}

/// Distances from the singular point: `n/2` intervals graded with exponent
/// `q` on `[0, r L]`, and `n/2` intervals on `[r L, L]` graded quadratically
/// toward `L`. Every other node is the mesh of half the size.
pub fn graded_distances(len: f64, n: usize, q: f64, r: f64) -> Vec<f64> {
    let m = n / 2;
    let mut us = Vec::with_capacity(n + 1);
    let near = r * len;
    for k in 0..=m {
        us.push(near * (k as f64 / m as f64).powf(q));
    }
    for k in 1..=m {
        let v = 1.0 - k as f64 / m as f64;
        us.push(if k == m { len } else { len - (len - near) * v * v });
    }
    us
}

/// Unit-spacing hat weights. `full[d] = ∫ hat_d(u) u^{-p} du` for the interior
/// hat centred at `d >= 1`; `left[d]` keeps only its half on `[d - 1, d]`.
/// `full[0]` holds the half hat at the origin (zero for `p >= 1`).
#[derive(Clone, Debug)]
pub struct UnitHatWeights {
    pub p: f64,
    pub full: Vec<f64>,
    pub left: Vec<f64>,
}

pub fn unit_hat_weights(p: f64, n: usize) -> UnitHatWeights {
    // cell j = [j, j + 1]
    let cells: Vec<(f64, f64)> = (0..=n)
        .map(|j| {
            if j == 0 {
                let m1 = 1.0 / (2.0 - p);
                let m0 = if p < 1.0 { 1.0 / (1.0 - p) } else { f64::NAN };
                (m0, m1)
            } else {
                cell_moments(j as f64, j as f64 + 1.0, p)
            }
        })
        .collect();
    let mut full = vec![0.0; n + 1];
    let mut left = vec![0.0; n + 1];
    full[0] = if p < 1.0 { cells[0].0 - cells[0].1 } else { 0.0 };
    for d in 1..=n {
        left[d] = cells[d - 1].1;
        full[d] = left[d] + cells[d].0 - cells[d].1;
    }
    UnitHatWeights { p, full, left }
}

/// Weights for `∫_a^b F(t) (t - a)^{-pa} (b - t)^{-pb} dt` with `F` piecewise
/// linear on `n` uniform cells; `pa, pb < 1`.
pub fn two_sided_weights(n: usize, len: f64, pa: f64, pb: f64) -> Vec<f64> {
    assert!(n >= 2, "two-sided weights need at least two cells");
    let h = len / n as f64;
    let mut w = vec![0.0; n + 1];
    let rule = gauss_legendre_01();
    for j in 1..n - 1 {
        let (mut w0, mut w1) = (0.0, 0.0);
        for &(x, gw) in rule {
            let u = (j as f64 + x) * h;
            let k = gw * h * weight_fn(u, len - u, pa, pb);
            w0 += k * (1.0 - x);
            w1 += k * x;
        }
        w[j] += w0;
        w[j + 1] += w1;
    }
    let (e0, e1) = end_cell(h, len, pa, pb);
    w[0] += e0;
    w[1] += e1;
    let (e0, e1) = end_cell(h, len, pb, pa);
    w[n] += e0;
    w[n - 1] += e1;
    w
}

#[inline]
fn weight_fn(u: f64, v: f64, pa: f64, pb: f64) -> f64 {
    let x = if pa == 0.0 { 1.0 } else { u.powf(-pa) };
    let y = if pb == 0.0 { 1.0 } else { v.powf(-pb) };
    x * y
}

/// Hat moments on the end cell `[0, h]` of `u^{-ps} (len - u)^{-po}`, the smooth
/// factor expanded in its binomial series. Returns (end node, inner node).
fn end_cell(h: f64, len: f64, ps: f64, po: f64) -> (f64, f64) {
    let (mut e0, mut e1) = (0.0, 0.0);
    let mut c = 1.0;
    let ratio = h / len;
    let mut rk = 1.0;
    let base = len.powf(-po) * h.powf(1.0 - ps);
    for k in 0..200 {
        let kf = k as f64;
        let t1 = 1.0 / (kf + 2.0 - ps);
        let t0 = 1.0 / ((kf + 1.0 - ps) * (kf + 2.0 - ps));
        let term = c * rk;
        e1 += term * t1;
        e0 += term * t0;
        if term.abs() < 1e-18 * e1.abs().max(1e-300) {
            break;
        }
        c *= (po + kf) / (kf + 1.0);
        rk *= ratio;
    }
    let e0 = if ps < 1.0 { base * e0 } else { 0.0 };
    (e0, base * e1)
}
