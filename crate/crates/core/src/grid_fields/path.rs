use serde::{Deserialize, Serialize};

use super::func::Func1;
use crate::{arg_err, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Interpolation {
    #[default]
    Linear,
    Nearest,
}

/// A function known through sorted samples.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledPath {
    ts: Vec<f64>,
    values: Vec<f64>,
    interpolation: Interpolation,
    // (t0, dt) when the stamps are uniform, for O(1) lookup
    uniform: Option<(f64, f64)>,
}

impl SampledPath {
    pub fn new(ts: Vec<f64>, values: Vec<f64>, interpolation: Interpolation) -> Result<Self> {
        if ts.len() != values.len() {
            return arg_err(format!("{} time stamps but {} values", ts.len(), values.len()));
        }
        if ts.len() < 2 {
            return arg_err("a sampled path needs at least two samples");
        }
        if ts.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return arg_err("sampled path contains a non-finite number");
        }
        if ts.windows(2).any(|w| w[1] <= w[0]) {
            return arg_err("time stamps must be strictly increasing");
        }
        let n = ts.len() - 1;
        let dt = (ts[n] - ts[0]) / n as f64;
        let uniform = ts
            .iter()
            .enumerate()
            .all(|(i, &t)| (t - (ts[0] + dt * i as f64)).abs() <= 1e-12 * dt.max(ts[n].abs()))
            .then_some((ts[0], dt));
        Ok(SampledPath { ts, values, interpolation, uniform })
    }

    pub fn linear(ts: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(ts, values, Interpolation::Linear)
    }

    /// Samples `f` at `n + 1` uniform points of `[a, b]`.
    pub fn sample(f: &dyn Func1, a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 1 || !(a < b) {
            return arg_err("sampling needs a < b and n >= 1");
        }
        let (ts, vs) = super::func::uniform_samples(f, a, b, n);
        Self::linear(ts, vs)
    }

    pub fn ts(&self) -> &[f64] {
        &self.ts
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn start(&self) -> f64 {
        self.ts[0]
    }

    pub fn end(&self) -> f64 {
        self.ts[self.ts.len() - 1]
    }

    /// Evaluation with a domain check.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= self.start() && t <= self.end()) {
            return Err(Error::Domain(format!(
                "t = {t} outside sampled range [{}, {}]",
                self.start(),
                self.end()
            )));
        }
        Ok(self.value(t))
    }

    /// Index `i` with `ts[i] <= t <= ts[i + 1]`, clamped to the sample range.
    fn segment(&self, t: f64) -> usize {
        let last = self.ts.len() - 2;
        if let Some((t0, dt)) = self.uniform {
            let k = ((t - t0) / dt).floor();
            if k <= 0.0 {
                return 0;
            }
            let mut i = (k as usize).min(last);
            // guard against rounding at cell borders
            while i > 0 && t < self.ts[i] {
                i -= 1;
            }
            while i < last && t > self.ts[i + 1] {
                i += 1;
            }
            return i;
        }
        self.ts.partition_point(|&s| s <= t).saturating_sub(1).min(last)
    }

    /// Smallest and largest value on `[a, b]` (samples plus interpolated endpoints).
    pub fn range_on(&self, a: f64, b: f64) -> (f64, f64) {
        let mut lo = self.value(a).min(self.value(b));
        let mut hi = self.value(a).max(self.value(b));
        for (&t, &v) in self.ts.iter().zip(&self.values) {
            if t > a && t < b {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }

    /// Multiplies all values by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.ts.clone(), self.values.iter().map(|v| v * c).collect(), self.interpolation)
    }
}

impl Func1 for SampledPath {
    /// Interpolated value; outside the sample range the end value is held.
    fn value(&self, t: f64) -> f64 {
        if t <= self.ts[0] {
            return self.values[0];
        }
        if t >= self.end() {
            return self.values[self.values.len() - 1];
        }
        let i = self.segment(t);
        let (t0, t1) = (self.ts[i], self.ts[i + 1]);
        let (v0, v1) = (self.values[i], self.values[i + 1]);
        match self.interpolation {
            Interpolation::Linear => {
                let w = (t - t0) / (t1 - t0);
                v0 + w * (v1 - v0)
            }
            Interpolation::Nearest => {
                if t - t0 <= t1 - t {
                    v0
                } else {
                    v1
                }
            }
        }
    }

    fn diff(&self, s: f64, t: f64) -> f64 {
        if self.interpolation == Interpolation::Linear {
            let lo = self.start();
            let hi = self.end();
            let (sc, tc) = (s.clamp(lo, hi), t.clamp(lo, hi));
            let i = self.segment(sc);
            if i == self.segment(tc) {
                let slope = (self.values[i + 1] - self.values[i]) / (self.ts[i + 1] - self.ts[i]);
                return slope * (tc - sc);
            }
        }
        self.value(t) - self.value(s)
    }

    fn domain(&self) -> Option<(f64, f64)> {
        Some((self.start(), self.end()))
    }

    fn describe(&self) -> String {
        format!("sampled[{} pts on [{}, {}]]", self.ts.len(), self.start(), self.end())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_samples() {
        assert!(SampledPath::linear(vec![0.0], vec![1.0]).is_err());
        assert!(SampledPath::linear(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(SampledPath::linear(vec![0.0, 1.0], vec![1.0, f64::NAN]).is_err());
        assert!(SampledPath::linear(vec![0.0, 1.0], vec![1.0]).is_err());
    }

    #[test]
    fn evaluation_and_domain() {
        let p = SampledPath::linear(vec![0.0, 1.0, 3.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(p.eval(0.5).unwrap(), 1.0);
        assert_eq!(p.eval(2.0).unwrap(), 1.0);
        assert_eq!(p.eval(3.0).unwrap(), 0.0);
        assert!(matches!(p.eval(3.5), Err(Error::Domain(_))));
        assert!(matches!(p.eval(-0.1), Err(Error::Domain(_))));
        assert_eq!(p.diff(0.25, 0.75), 1.0);
        assert_eq!(p.diff(0.5, 2.0), 0.0);
        let q = SampledPath::new(vec![0.0, 1.0], vec![0.0, 1.0], Interpolation::Nearest).unwrap();
        assert_eq!(q.value(0.4), 0.0);
        assert_eq!(q.value(0.6), 1.0);
    }

    #[test]
    fn uniform_lookup_agrees_with_search() {
        let ts: Vec<f64> = (0..=100).map(|i| i as f64 * 0.01).collect();
        let vs: Vec<f64> = ts.iter().map(|t| t * t).collect();
        let p = SampledPath::linear(ts.clone(), vs.clone()).unwrap();
        assert!(p.uniform.is_some());
        for k in 0..1000 {
            let t = k as f64 * 0.001;
            let i = ts.partition_point(|&s| s <= t).saturating_sub(1).min(99);
            let w = (t - ts[i]) / (ts[i + 1] - ts[i]);
            let expect = vs[i] + w * (vs[i + 1] - vs[i]);
            assert!((p.value(t) - expect).abs() < 1e-15);
        }
    }
}
