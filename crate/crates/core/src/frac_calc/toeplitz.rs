//! Lower/upper Toeplitz sums by FFT convolution, with direct reference versions.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Below this length the direct sums are cheaper.
const DIRECT_LIMIT: usize = 64;

/// Linear convolution `z[k] = Σ_j y[j] x[k - j]`, length `y.len() + x.len() - 1`.
pub fn convolve(y: &[f64], x: &[f64]) -> Vec<f64> {
    let len = y.len() + x.len() - 1;
    let size = len.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let mut a: Vec<Complex<f64>> = y.iter().map(|&v| Complex::new(v, 0.0)).collect();
    a.resize(size, Complex::new(0.0, 0.0));
    let mut b: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    b.resize(size, Complex::new(0.0, 0.0));
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (u, v) in a.iter_mut().zip(&b) {
        *u *= v;
    }
    inv.process(&mut a);
    let s = 1.0 / size as f64;
    a[..len].iter().map(|c| c.re * s).collect()
}

/// `c[i] = Σ_{d=1}^{i} w[d] x[i - d]` for `i = 0..x.len()`.
pub fn backward_sums(w: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n <= DIRECT_LIMIT {
        return backward_sums_direct(w, x);
    }
    let mut y = vec![0.0; n];
    y[1..n].copy_from_slice(&w[1..n]);
    let z = convolve(&y, x);
    z[..n].to_vec()
}

/// `c[i] = Σ_{d=1}^{n-1-i} w[d] x[i + d]` for `i = 0..n`, `n = x.len()`.
pub fn forward_sums(w: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n <= DIRECT_LIMIT {
        return forward_sums_direct(w, x);
    }
    let mut y = vec![0.0; n];
    y[1..n].copy_from_slice(&w[1..n]);
    let xr: Vec<f64> = x.iter().rev().copied().collect();
    let z = convolve(&y, &xr);
    (0..n).map(|i| z[n - 1 - i]).collect()
}

pub fn backward_sums_direct(w: &[f64], x: &[f64]) -> Vec<f64> {
    (0..x.len()).map(|i| (1..=i).map(|d| w[d] * x[i - d]).sum()).collect()
}

pub fn forward_sums_direct(w: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n).map(|i| (1..n - i).map(|d| w[d] * x[i + d]).sum()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fft_sums_match_direct_sums() {
        let n = 300;
        let w: Vec<f64> = (0..=n).map(|d| 1.0 / (1.0 + d as f64).powf(1.3)).collect();
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let a = backward_sums(&w, &x);
        let b = backward_sums_direct(&w, &x);
        let c = forward_sums(&w, &x);
        let d = forward_sums_direct(&w, &x);
        for i in 0..n {
            assert!((a[i] - b[i]).abs() < 1e-12, "{i}");
            assert!((c[i] - d[i]).abs() < 1e-12, "{i}");
        }
        assert!(a[0].abs() < 1e-15);
        assert!(c[n - 1].abs() < 1e-15);
    }
}
