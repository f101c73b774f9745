//! Deterministic Weierstrass-type test functions with a prescribed Hölder exponent.

use super::func::Func1;
use crate::{arg_err, Result};

/// `f(t) = sum_{k < scales} base^(-k H) cos(base^k t + phase_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Weierstrass {
    hurst: f64,
    base: f64,
    phases: Vec<f64>,
    amps: Vec<f64>,
    freqs: Vec<f64>,
}

impl Weierstrass {
    pub fn new(hurst: f64, scales: usize, base: f64, phases: &[f64]) -> Result<Self> {
        if !(hurst > 0.0 && hurst < 1.0) {
            return arg_err(format!("Weierstrass exponent H = {hurst} must lie in (0, 1)"));
        }
        if !(base >= 2.0) {
            return arg_err(format!("Weierstrass base {base} must be >= 2"));
        }
        if scales == 0 {
            return arg_err("Weierstrass function needs at least one scale");
        }
        if phases.len() > scales {
            return arg_err("more phases than scales");
        }
        let mut freqs = Vec::with_capacity(scales);
        let mut f = 1.0;
        for _ in 0..scales {
            freqs.push(f);
            f *= base;
        }
        let amps = freqs.iter().map(|w| w.powf(-hurst)).collect();
        let mut ph = phases.to_vec();
        ph.resize(scales, 0.0);
        Ok(Weierstrass { hurst, base, phases: ph, amps, freqs })
    }

    /// Base 2, zero phases.
    pub fn standard(hurst: f64, scales: usize) -> Result<Self> {
        Self::new(hurst, scales, 2.0, &[])
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn scales(&self) -> usize {
        self.freqs.len()
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }
}

impl Func1 for Weierstrass {
    fn value(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for ((a, w), p) in self.amps.iter().zip(&self.freqs).zip(&self.phases) {
            acc += a * libm::cos(w * t + p);
        }
        acc
    }

    fn diff(&self, s: f64, t: f64) -> f64 {
        if s == t {
            return 0.0;
        }
        let half = 0.5 * (t - s);
        let mid = 0.5 * (t + s);
        let mut acc = 0.0;
        for ((a, w), p) in self.amps.iter().zip(&self.freqs).zip(&self.phases) {
            acc -= 2.0 * a * libm::sin(w * mid + p) * libm::sin(w * half);
        }
        acc
    }

    fn describe(&self) -> String {
        let mut d = format!("weierstrass:H={},scales={},base={}", self.hurst, self.scales(), self.base);
        if self.phases.iter().any(|&p| p != 0.0) {
            let p: Vec<String> = self.phases.iter().map(|x| x.to_string()).collect();
            d.push_str(&format!(",phases={}", p.join("/")));
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_scale_is_cosine() {
        let f = Weierstrass::new(0.5, 1, 2.0, &[0.0]).unwrap();
        assert_eq!(f.value(0.0), 1.0);
        assert!((f.value(0.7) - 0.7f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn two_scale_value_at_zero() {
        let f = Weierstrass::new(0.5, 2, 2.0, &[0.0, 0.0]).unwrap();
        assert!((f.value(0.0) - (1.0 + 2f64.powf(-0.5))).abs() < 1e-15);
        assert!((f.value(0.0) - 1.70711).abs() < 1e-5);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Weierstrass::standard(0.0, 3).is_err());
        assert!(Weierstrass::standard(1.0, 3).is_err());
        assert!(Weierstrass::new(0.5, 3, 1.5, &[]).is_err());
        assert!(Weierstrass::new(0.5, 0, 2.0, &[]).is_err());
    }

    #[test]
    fn deterministic_and_diff_consistent() {
        let f = Weierstrass::new(0.7, 12, 2.0, &[0.1, 0.2]).unwrap();
        let g = Weierstrass::new(0.7, 12, 2.0, &[0.1, 0.2]).unwrap();
        for k in 0..100 {
            let t = k as f64 * 0.0137;
            assert_eq!(f.value(t).to_bits(), g.value(t).to_bits());
            let d = f.diff(0.31, t);
            assert!((d - (f.value(t) - f.value(0.31))).abs() < 1e-12);
        }
    }
}
