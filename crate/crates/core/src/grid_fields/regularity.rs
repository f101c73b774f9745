use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Exponent bundle `(tau, lambda, gamma, alpha)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regularity {
    pub tau: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub alpha: f64,
}

impl Regularity {
    /// Bundle with `alpha` at the midpoint of the admissible window.
    pub fn new(tau: f64, lambda: f64, gamma: f64) -> Self {
        let mut r = Regularity { tau, lambda, gamma, alpha: 0.0 };
        r.alpha = r.default_alpha();
        r
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        Regularity { alpha, ..self }
    }

    /// `(1 - tau, lambda * gamma)`.
    pub fn window(&self) -> (f64, f64) {
        (1.0 - self.tau, self.lambda * self.gamma)
    }

    pub fn default_alpha(&self) -> f64 {
        let (lo, hi) = self.window();
        0.5 * (lo + hi)
    }

    /// `tau + lambda gamma - 1`.
    pub fn epsilon(&self) -> f64 {
        self.tau + self.lambda * self.gamma - 1.0
    }

    pub fn alpha_in_window(&self, alpha: f64) -> bool {
        let (lo, hi) = self.window();
        alpha > lo && alpha < hi
    }

    pub fn admissible(&self) -> bool {
        self.epsilon() > 0.0 && self.alpha_in_window(self.alpha)
    }

    /// Checks ranges and admissibility, with a message naming the failed condition.
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if v > 0.0 && v <= 1.0 {
                Ok(())
            } else {
                Err(Error::Regularity(format!("{name} = {v} must lie in (0, 1]")))
            }
        };
        unit("tau", self.tau)?;
        unit("lambda", self.lambda)?;
        unit("gamma", self.gamma)?;
        if self.epsilon() <= 0.0 {
            return Err(Error::Regularity(format!(
                "tau + lambda*gamma = {} must exceed 1",
                self.tau + self.lambda * self.gamma
            )));
        }
        self.check_alpha(self.alpha)
    }

    pub fn check_alpha(&self, alpha: f64) -> Result<()> {
        if !self.alpha_in_window(alpha) {
            let (lo, hi) = self.window();
            return Err(Error::Regularity(format!("alpha = {alpha} outside the window ({lo}, {hi})")));
        }
        Ok(())
    }

    /// `n` equally spaced orders strictly inside the window (the ends are shrunk by `margin` of its width).
    pub fn alpha_grid(&self, n: usize, margin: f64) -> Vec<f64> {
        let (lo, hi) = self.window();
        let w = hi - lo;
        let (lo, hi) = (lo + margin * w, hi - margin * w);
        if n == 1 {
            return vec![0.5 * (lo + hi)];
        }
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }
}
