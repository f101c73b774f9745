//! One-variable functions used as paths, time factors and space factors.
//!
//! Every function exposes a difference call `diff(s, t) = f(t) - f(s)`. The
//! closed forms below override it with cancellation-free formulas so that
//! increments over very short intervals keep their relative accuracy.

use std::fmt;
use std::sync::Arc;

/// A real function of one real variable.
pub trait Func1: Send + Sync + fmt::Debug {
    fn value(&self, t: f64) -> f64;

    /// `f(t) - f(s)`.
    fn diff(&self, s: f64, t: f64) -> f64 {
        self.value(t) - self.value(s)
    }

    /// Closed interval on which the function is defined, `None` for the whole line.
    fn domain(&self) -> Option<(f64, f64)> {
        None
    }

    fn describe(&self) -> String;
}

pub type SharedFn = Arc<dyn Func1>;

/// Checks that `[a, b]` lies inside `f`'s domain.
pub fn check_covers(f: &dyn Func1, a: f64, b: f64) -> crate::Result<()> {
    if let Some((lo, hi)) = f.domain() {
        if a < lo || b > hi {
            return Err(crate::Error::Domain(format!(
                "[{a}, {b}] is not covered by {} (domain [{lo}, {hi}])",
                f.describe()
            )));
        }
    }
    Ok(())
}

/// Elementary closed forms.
#[derive(Clone, Debug, PartialEq)]
pub enum Elementary {
    Const(f64),
    /// `c0 + c1 t`
    Affine { c0: f64, c1: f64 },
    /// `(t - shift)^mu` on `[shift, inf)`
    Power { mu: f64, shift: f64 },
    /// `sum_k c[k] t^k`
    Poly(Vec<f64>),
    Sin,
    Cos,
}

impl Elementary {
    pub fn identity() -> Self {
        Elementary::Affine { c0: 0.0, c1: 1.0 }
    }

    pub fn shared(self) -> SharedFn {
        Arc::new(self)
    }
}

fn poly_value(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * t + ck)
}

impl Func1 for Elementary {
    fn value(&self, t: f64) -> f64 {
        match self {
            Elementary::Const(c) => *c,
            Elementary::Affine { c0, c1 } => c0 + c1 * t,
            Elementary::Power { mu, shift } => (t - shift).max(0.0).powf(*mu),
            Elementary::Poly(c) => poly_value(c, t),
            Elementary::Sin => libm::sin(t),
            Elementary::Cos => libm::cos(t),
        }
    }

    fn diff(&self, s: f64, t: f64) -> f64 {
        if s == t {
            return 0.0;
        }
        match self {
            Elementary::Const(_) => 0.0,
            Elementary::Affine { c1, .. } => c1 * (t - s),
            Elementary::Power { mu, shift } => {
                let u = (s - shift).max(0.0);
                let v = (t - shift).max(0.0);
                if u == 0.0 || v == 0.0 {
                    return v.powf(*mu) - u.powf(*mu);
                }
                // v^mu - u^mu = u^mu * expm1(mu * ln(v/u))
                let r = (v - u) / u;
                if r.abs() < 0.5 {
                    u.powf(*mu) * libm::expm1(mu * libm::log1p(r))
                } else {
                    v.powf(*mu) - u.powf(*mu)
                }
            }
            Elementary::Poly(c) => {
                // t^k - s^k = (t - s) * sum_{j<k} t^j s^(k-1-j)
                let mut acc = 0.0;
                for (k, &ck) in c.iter().enumerate().skip(1) {
                    let mut inner = 0.0;
                    let mut tj = 1.0;
                    for j in 0..k {
                        inner += tj * s.powi((k - 1 - j) as i32);
                        tj *= t;
                    }
                    acc += ck * inner;
                }
                acc * (t - s)
            }
            Elementary::Sin => 2.0 * libm::cos(0.5 * (t + s)) * libm::sin(0.5 * (t - s)),
            Elementary::Cos => -2.0 * libm::sin(0.5 * (t + s)) * libm::sin(0.5 * (t - s)),
        }
    }

    fn domain(&self) -> Option<(f64, f64)> {
        match self {
            Elementary::Power { shift, .. } => Some((*shift, f64::INFINITY)),
            _ => None,
        }
    }

    fn describe(&self) -> String {
        match self {
            Elementary::Const(c) => format!("const:c={c}"),
            Elementary::Affine { c0, c1 } if *c0 == 0.0 && *c1 == 1.0 => "id".into(),
            Elementary::Affine { c0, c1 } => format!("affine:c0={c0},c1={c1}"),
            Elementary::Power { mu, shift } => format!("pow:mu={mu},shift={shift}"),
            Elementary::Poly(c) => {
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                format!("poly:c={}", parts.join("/"))
            }
            Elementary::Sin => "sin".into(),
            Elementary::Cos => "cos".into(),
        }
    }
}

/// `c * f`.
#[derive(Clone, Debug)]
pub struct Scaled {
    pub factor: f64,
    pub inner: SharedFn,
}

impl Func1 for Scaled {
    fn value(&self, t: f64) -> f64 {
        self.factor * self.inner.value(t)
    }
    fn diff(&self, s: f64, t: f64) -> f64 {
        self.factor * self.inner.diff(s, t)
    }
    fn domain(&self) -> Option<(f64, f64)> {
        self.inner.domain()
    }
    fn describe(&self) -> String {
        format!("{}*({})", self.factor, self.inner.describe())
    }
}

/// Pointwise product `f * g`.
#[derive(Clone, Debug)]
pub struct ProductFn {
    pub left: SharedFn,
    pub right: SharedFn,
}

impl Func1 for ProductFn {
    fn value(&self, t: f64) -> f64 {
        self.left.value(t) * self.right.value(t)
    }
    fn diff(&self, s: f64, t: f64) -> f64 {
        // f(t)g(t) - f(s)g(s) = (f(t)-f(s)) g(t) + f(s) (g(t)-g(s))
        self.left.diff(s, t) * self.right.value(t) + self.left.value(s) * self.right.diff(s, t)
    }
    fn domain(&self) -> Option<(f64, f64)> {
        intersect(self.left.domain(), self.right.domain())
    }
    fn describe(&self) -> String {
        format!("({})·({})", self.left.describe(), self.right.describe())
    }
}

/// Composition `outer(inner(t))`.
#[derive(Clone, Debug)]
pub struct Composed {
    pub outer: SharedFn,
    pub inner: SharedFn,
}

impl Func1 for Composed {
    fn value(&self, t: f64) -> f64 {
        self.outer.value(self.inner.value(t))
    }
    fn diff(&self, s: f64, t: f64) -> f64 {
        self.outer.diff(self.inner.value(s), self.inner.value(t))
    }
    fn domain(&self) -> Option<(f64, f64)> {
        self.inner.domain()
    }
    fn describe(&self) -> String {
        format!("({})∘({})", self.outer.describe(), self.inner.describe())
    }
}

/// A function given by a plain closure.
#[derive(Clone)]
pub struct ClosureFn {
    name: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    domain: Option<(f64, f64)>,
}

impl ClosureFn {
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ClosureFn { name: name.into(), f: Arc::new(f), domain: None }
    }

    pub fn on(mut self, lo: f64, hi: f64) -> Self {
        self.domain = Some((lo, hi));
        self
    }
}

impl fmt::Debug for ClosureFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ClosureFn({})", self.name)
    }
}

impl Func1 for ClosureFn {
    fn value(&self, t: f64) -> f64 {
        (self.f)(t)
    }
    fn domain(&self) -> Option<(f64, f64)> {
        self.domain
    }
    fn describe(&self) -> String {
        self.name.clone()
    }
}

pub(crate) fn intersect(a: Option<(f64, f64)>, b: Option<(f64, f64)>) -> Option<(f64, f64)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some((a0, a1)), Some((b0, b1))) => Some((a0.max(b0), a1.min(b1))),
    }
}

/// Values of `f` on `[a, b]` split into `n` equal cells (`n + 1` points).
pub fn uniform_samples(f: &dyn Func1, a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let ts: Vec<f64> = (0..=n).map(|i| uniform_node(a, b, n, i)).collect();
    let vs = ts.iter().map(|&t| f.value(t)).collect();
    (ts, vs)
}

/// `a + i (b - a) / n`, hitting `b` exactly at `i = n`.
#[inline]
pub fn uniform_node(a: f64, b: f64, n: usize, i: usize) -> f64 {
    if i == n {
        b
    } else {
        a + (b - a) * (i as f64 / n as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn differences_match_subtraction() {
        let fs = [
            Elementary::Sin,
            Elementary::Cos,
            Elementary::Poly(vec![1.0, -2.0, 0.5, 3.0]),
            Elementary::Power { mu: 0.3, shift: 0.0 },
            Elementary::Affine { c0: 1.0, c1: -2.5 },
        ];
        for f in &fs {
            for &(s, t) in &[(0.1, 0.7), (0.5, 0.5000001), (0.9, 0.2), (0.0, 0.3)] {
                let d = f.diff(s, t);
                let naive = f.value(t) - f.value(s);
                assert!((d - naive).abs() < 1e-12, "{f:?} {s} {t}: {d} vs {naive}");
            }
        }
    }

    #[test]
    fn short_increments_keep_relative_accuracy() {
        let f = Elementary::Sin;
        let h = 1e-12;
        let d = f.diff(0.3, 0.3 + h);
        let exact = libm::cos(0.3) * h;
        assert!(((d - exact) / exact).abs() < 1e-3);
        let p = Elementary::Power { mu: 0.5, shift: 0.0 };
        let d = p.diff(0.25, 0.25 + h);
        assert!(((d - h) / h).abs() < 1e-3);
    }

    #[test]
    fn product_and_composition() {
        let f = ProductFn { left: Elementary::Sin.shared(), right: Elementary::identity().shared() };
        assert!((f.diff(0.2, 0.9) - (0.9 * libm::sin(0.9) - 0.2 * libm::sin(0.2))).abs() < 1e-15);
        let g = Composed { outer: Elementary::Cos.shared(), inner: Elementary::Poly(vec![0.0, 0.0, 1.0]).shared() };
        assert!((g.value(0.5) - libm::cos(0.25)).abs() < 1e-15);
    }
}
