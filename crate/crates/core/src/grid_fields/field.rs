//! Two-variable media `W(t, x)` with exact increment evaluation.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::func::{Func1, Scaled, SharedFn};
use super::path::SampledPath;
use crate::{arg_err, Error, Result};

/// One rank-one piece `g(t) h(x)` of a separable field.
#[derive(Clone, Debug)]
pub struct ProductTerm {
    pub time: SharedFn,
    pub space: SharedFn,
}

/// A medium `W(t, x)` with scalar space variable.
pub trait Field: Send + Sync + fmt::Debug {
    fn eval(&self, t: f64, x: f64) -> f64;

    /// `W(t, x) - W(s, x)`.
    fn increment_t(&self, s: f64, t: f64, x: f64) -> f64 {
        self.eval(t, x) - self.eval(s, x)
    }

    /// `W(t, y) - W(t, x)`.
    fn increment_x(&self, t: f64, x: f64, y: f64) -> f64 {
        self.eval(t, y) - self.eval(t, x)
    }

    /// `W(s, x) - W(t, x) - W(s, y) + W(t, y)`.
    fn increment_rect(&self, s: f64, t: f64, x: f64, y: f64) -> f64 {
        (self.eval(s, x) - self.eval(t, x)) - (self.eval(s, y) - self.eval(t, y))
    }

    /// Finite decomposition `W = sum_k g_k(t) h_k(x)`, when one is known.
    fn separable(&self) -> Option<Vec<ProductTerm>> {
        None
    }

    fn time_domain(&self) -> Option<(f64, f64)> {
        None
    }

    fn space_domain(&self) -> Option<(f64, f64)> {
        None
    }

    fn describe(&self) -> String;
}

pub type SharedField = Arc<dyn Field>;

/// Checks that `[a, b] x [lo, hi]` lies inside the field's domain.
pub fn check_field_covers(w: &dyn Field, a: f64, b: f64, lo: f64, hi: f64) -> Result<()> {
    if let Some((t0, t1)) = w.time_domain() {
        if a < t0 || b > t1 {
            return Err(Error::Domain(format!("time interval [{a}, {b}] outside field domain [{t0}, {t1}]")));
        }
    }
    if let Some((x0, x1)) = w.space_domain() {
        if lo < x0 || hi > x1 {
            return Err(Error::Domain(format!("space range [{lo}, {hi}] outside field domain [{x0}, {x1}]")));
        }
    }
    Ok(())
}

/// `W(t, x) = g(t) h(x)`; increments are taken in factored form.
#[derive(Clone, Debug)]
pub struct ProductField {
    pub g: SharedFn,
    pub h: SharedFn,
}

/// Builds the product medium `g(t) h(x)`.
pub fn make_product_field(g: SharedFn, h: SharedFn) -> ProductField {
    ProductField { g, h }
}

impl Field for ProductField {
    fn eval(&self, t: f64, x: f64) -> f64 {
        self.g.value(t) * self.h.value(x)
    }
    fn increment_t(&self, s: f64, t: f64, x: f64) -> f64 {
        self.g.diff(s, t) * self.h.value(x)
    }
    fn increment_x(&self, t: f64, x: f64, y: f64) -> f64 {
        self.g.value(t) * self.h.diff(x, y)
    }
    fn increment_rect(&self, s: f64, t: f64, x: f64, y: f64) -> f64 {
        self.g.diff(t, s) * self.h.diff(y, x)
    }
    fn separable(&self) -> Option<Vec<ProductTerm>> {
        Some(vec![ProductTerm { time: self.g.clone(), space: self.h.clone() }])
    }
    fn time_domain(&self) -> Option<(f64, f64)> {
        self.g.domain()
    }
    fn space_domain(&self) -> Option<(f64, f64)> {
        self.h.domain()
    }
    fn describe(&self) -> String {
        format!("{}*{}", self.g.describe(), self.h.describe())
    }
}

/// Linear combination `sum_i c_i W_i`.
#[derive(Clone, Debug, Default)]
pub struct SumField {
    pub parts: Vec<(f64, SharedField)>,
}

impl SumField {
    pub fn new(parts: Vec<(f64, SharedField)>) -> Self {
        SumField { parts }
    }

    /// `W1 - W2`.
    pub fn difference(w1: SharedField, w2: SharedField) -> Self {
        SumField { parts: vec![(1.0, w1), (-1.0, w2)] }
    }
}

impl Field for SumField {
    fn eval(&self, t: f64, x: f64) -> f64 {
        self.parts.iter().map(|(c, w)| c * w.eval(t, x)).sum()
    }
    fn increment_t(&self, s: f64, t: f64, x: f64) -> f64 {
        self.parts.iter().map(|(c, w)| c * w.increment_t(s, t, x)).sum()
    }
    fn increment_x(&self, t: f64, x: f64, y: f64) -> f64 {
        self.parts.iter().map(|(c, w)| c * w.increment_x(t, x, y)).sum()
    }
    fn increment_rect(&self, s: f64, t: f64, x: f64, y: f64) -> f64 {
        self.parts.iter().map(|(c, w)| c * w.increment_rect(s, t, x, y)).sum()
    }
    fn separable(&self) -> Option<Vec<ProductTerm>> {
        let mut out = Vec::new();
        for (c, w) in &self.parts {
            for term in w.separable()? {
                let time: SharedFn = if *c == 1.0 {
                    term.time
                } else {
                    Arc::new(Scaled { factor: *c, inner: term.time })
                };
                out.push(ProductTerm { time, space: term.space });
            }
        }
        Some(out)
    }
    fn time_domain(&self) -> Option<(f64, f64)> {
        self.parts.iter().fold(None, |acc, (_, w)| super::func::intersect(acc, w.time_domain()))
    }
    fn space_domain(&self) -> Option<(f64, f64)> {
        self.parts.iter().fold(None, |acc, (_, w)| super::func::intersect(acc, w.space_domain()))
    }
    fn describe(&self) -> String {
        let parts: Vec<String> = self
            .parts
            .iter()
            .map(|(c, w)| if *c == 1.0 { w.describe() } else { format!("{c}·({})", w.describe()) })
            .collect();
        parts.join(" + ")
    }
}

/// A field given by a plain closure; no structure is assumed.
#[derive(Clone)]
pub struct ClosureField {
    name: String,
    f: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
}

impl ClosureField {
    pub fn new(name: impl Into<String>, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        ClosureField { name: name.into(), f: Arc::new(f) }
    }
}

impl fmt::Debug for ClosureField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ClosureField({})", self.name)
    }
}

impl Field for ClosureField {
    fn eval(&self, t: f64, x: f64) -> f64 {
        (self.f)(t, x)
    }
    fn describe(&self) -> String {
        self.name.clone()
    }
}

/// Piecewise-linear hat function of node `j` on a sorted grid; held constant
/// beyond the ends.
#[derive(Clone, Debug)]
pub struct Hat {
    nodes: Arc<Vec<f64>>,
    j: usize,
}

impl Func1 for Hat {
    fn value(&self, x: f64) -> f64 {
        let xs = &self.nodes;
        let j = self.j;
        let n = xs.len();
        if x <= xs[0] {
            return if j == 0 { 1.0 } else { 0.0 };
        }
        if x >= xs[n - 1] {
            return if j == n - 1 { 1.0 } else { 0.0 };
        }
        if j > 0 && x >= xs[j - 1] && x <= xs[j] {
            return (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
        }
        if j + 1 < n && x >= xs[j] && x <= xs[j + 1] {
            return (xs[j + 1] - x) / (xs[j + 1] - xs[j]);
        }
        0.0
    }
    fn describe(&self) -> String {
        format!("hat[{}]", self.j)
    }
}

/// Bilinear interpolation of values on a tensor grid, `values[i][j] = W(ts[i], xs[j])`.
#[derive(Clone, Debug)]
pub struct GridField {
    ts: Vec<f64>,
    xs: Arc<Vec<f64>>,
    // column j as a function of t
    columns: Vec<SampledPath>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFieldFile {
    pub ts: Vec<f64>,
    pub xs: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl GridField {
    pub fn new(ts: Vec<f64>, xs: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != ts.len() {
            return arg_err(format!("grid has {} time stamps but {} rows", ts.len(), values.len()));
        }
        if xs.len() < 2 || xs.windows(2).any(|w| w[1] <= w[0]) || xs.iter().any(|x| !x.is_finite()) {
            return arg_err("grid xs must be finite, strictly increasing, at least two");
        }
        if let Some(row) = values.iter().find(|r| r.len() != xs.len()) {
            return arg_err(format!("grid row has {} entries, expected {}", row.len(), xs.len()));
        }
        let columns = (0..xs.len())
            .map(|j| SampledPath::linear(ts.clone(), values.iter().map(|r| r[j]).collect()))
            .collect::<Result<Vec<_>>>()?;
        Ok(GridField { ts, xs: Arc::new(xs), columns })
    }

    pub fn from_file(file: GridFieldFile) -> Result<Self> {
        Self::new(file.ts, file.xs, file.values)
    }

    pub fn to_file(&self) -> GridFieldFile {
        let values = (0..self.ts.len())
            .map(|i| self.columns.iter().map(|c| c.values()[i]).collect())
            .collect();
        GridFieldFile { ts: self.ts.clone(), xs: self.xs.to_vec(), values }
    }

    /// Samples a field on a tensor grid.
    pub fn sample(w: &dyn Field, ts: Vec<f64>, xs: Vec<f64>) -> Result<Self> {
        let values = ts.iter().map(|&t| xs.iter().map(|&x| w.eval(t, x)).collect()).collect();
        Self::new(ts, xs, values)
    }

    /// Two neighbouring columns around `x` with their interpolation weights.
    fn space_weights(&self, x: f64) -> [(usize, f64); 2] {
        let xs = &self.xs;
        let n = xs.len();
        if x <= xs[0] {
            return [(0, 1.0), (1, 0.0)];
        }
        if x >= xs[n - 1] {
            return [(n - 2, 0.0), (n - 1, 1.0)];
        }
        let j = xs.partition_point(|&v| v <= x).saturating_sub(1).min(n - 2);
        let w = (x - xs[j]) / (xs[j + 1] - xs[j]);
        [(j, 1.0 - w), (j + 1, w)]
    }
}

impl Field for GridField {
    fn eval(&self, t: f64, x: f64) -> f64 {
        self.space_weights(x).iter().map(|&(j, w)| w * self.columns[j].value(t)).sum()
    }

    fn increment_t(&self, s: f64, t: f64, x: f64) -> f64 {
        self.space_weights(x).iter().map(|&(j, w)| w * self.columns[j].diff(s, t)).sum()
    }

    fn increment_rect(&self, s: f64, t: f64, x: f64, y: f64) -> f64 {
        // sum_j (b_j(x) - b_j(y)) (c_j(s) - c_j(t)), over the at most four touched columns
        let wx = self.space_weights(x);
        let wy = self.space_weights(y);
        let mut cols: [(usize, f64); 4] = [(0, 0.0); 4];
        let mut n = 0;
        for &(j, w) in &wx {
            cols[n] = (j, w);
            n += 1;
        }
        for &(j, w) in &wy {
            if let Some(c) = cols[..n].iter_mut().find(|c| c.0 == j) {
                c.1 -= w;
            } else {
                cols[n] = (j, -w);
                n += 1;
            }
        }
        cols[..n]
            .iter()
            .filter(|c| c.1 != 0.0)
            .map(|&(j, dw)| dw * self.columns[j].diff(t, s))
            .sum()
    }

    fn separable(&self) -> Option<Vec<ProductTerm>> {
        Some(
            self.columns
                .iter()
                .enumerate()
                .map(|(j, c)| ProductTerm {
                    time: Arc::new(c.clone()),
                    space: Arc::new(Hat { nodes: self.xs.clone(), j }),
                })
                .collect(),
        )
    }

    fn time_domain(&self) -> Option<(f64, f64)> {
        Some((self.ts[0], self.ts[self.ts.len() - 1]))
    }

    fn space_domain(&self) -> Option<(f64, f64)> {
        Some((self.xs[0], self.xs[self.xs.len() - 1]))
    }

    fn describe(&self) -> String {
        format!("grid[{}x{}]", self.ts.len(), self.xs.len())
    }
}
