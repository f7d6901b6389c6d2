//! Riemann-Liouville half-derivative of sampled functions.
//!
//! D^{1/2} f(y) = (1/Gamma(1/2)) d/dy integral_{y0}^{y} (y - s)^{-1/2} f(s) ds,
//! with f taken to vanish before the first sample.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Samples of a function on a uniform grid `x0 + k * dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction1D {
    pub x0: f64,
    pub dx: f64,
    pub values: Vec<f64>,
}

impl SampledFunction1D {
    /// Builds from a uniform grid. Fails with `NonUniformGrid` when consecutive
    /// spacings differ by more than 1e-9 relative.
    pub fn from_samples(xs: &[f64], values: Vec<f64>) -> Result<Self> {
        if xs.len() != values.len() || xs.len() < 2 {
            return Err(Error::InvalidInput("need at least two samples with matching lengths".into()));
        }
        let dx = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
        if dx <= 0.0 {
            return Err(Error::NonUniformGrid);
        }
        for w in xs.windows(2) {
            if ((w[1] - w[0]) - dx).abs() > 1e-9 * dx {
                return Err(Error::NonUniformGrid);
            }
        }
        Ok(SampledFunction1D { x0: xs[0], dx, values })
    }

    pub fn from_fn(x0: f64, dx: f64, n: usize, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..n).map(|k| f(x0 + dx * k as f64)).collect();
        SampledFunction1D { x0, dx, values }
    }

    pub fn x(&self, k: usize) -> f64 {
        self.x0 + self.dx * k as f64
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Linear convolution via FFT, truncated to the first `out_len` entries.
pub(crate) fn convolve(a: &[f64], b: &[f64], out_len: usize) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return vec![0.0; out_len];
    }
    if a.len().min(b.len()) <= 32 {
        let mut out = vec![0.0; out_len];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                if i + j < out_len {
                    out[i + j] += x * y;
                }
            }
        }
        return out;
    }
    let n = (a.len() + b.len() - 1).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut fa: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fa.resize(n, Complex64::new(0.0, 0.0));
    let mut fb: Vec<Complex64> = b.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fb.resize(n, Complex64::new(0.0, 0.0));
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inv.process(&mut fa);
    let scale = 1.0 / n as f64;
    fa.iter().take(out_len).map(|z| z.re * scale).collect()
}

/// Half-derivative by product integration of the piecewise-linear interpolant
/// (exact for piecewise-linear data), evaluated as an FFT Toeplitz convolution.
/// A nonzero first sample acts as a jump at the grid start; the value at the
/// first node is then infinite.
pub fn half_derivative(f: &SampledFunction1D) -> SampledFunction1D {
    let n = f.len();
    let mut out = vec![0.0; n];
    if n == 0 {
        return SampledFunction1D { x0: f.x0, dx: f.dx, values: out };
    }
    let g = PI.sqrt();
    let d: Vec<f64> = f.values.windows(2).map(|w| w[1] - w[0]).collect();
    let w: Vec<f64> = (0..n).map(|m| ((m + 1) as f64).sqrt() - (m as f64).sqrt()).collect();
    let conv = convolve(&d, &w, n.saturating_sub(1));
    let c = 2.0 / (g * f.dx.sqrt());
    let f0 = f.values[0];
    out[0] = if f0 == 0.0 { 0.0 } else { f64::INFINITY.copysign(f0) };
    for k in 1..n {
        out[k] = c * conv[k - 1] + f0 / (g * (f.dx * k as f64).sqrt());
    }
    SampledFunction1D { x0: f.x0, dx: f.dx, values: out }
}

/// Half-derivative by the Fourier multiplier (i xi)^{1/2} (principal branch)
/// on a zero-padded grid. Accurate for smooth data that vanishes at both ends.
pub fn half_derivative_spectral(f: &SampledFunction1D) -> SampledFunction1D {
    let n = f.len();
    let m = (32 * n).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let mut buf: Vec<Complex64> = f.values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    buf.resize(m, Complex64::new(0.0, 0.0));
    fwd.process(&mut buf);
    let base = 2.0 * PI / (m as f64 * f.dx);
    let rot = Complex64::from_polar(1.0, PI / 4.0);
    for (k, z) in buf.iter_mut().enumerate() {
        let mult = if k == 0 {
            Complex64::new(0.0, 0.0)
        } else if 2 * k < m {
            rot * (base * k as f64).sqrt()
        } else if 2 * k > m {
            rot.conj() * (base * (m - k) as f64).sqrt()
        } else {
            Complex64::new((base * k as f64).sqrt() * rot.re, 0.0)
        };
        *z *= mult;
    }
    inv.process(&mut buf);
    let values = buf.iter().take(n).map(|z| z.re / m as f64).collect();
    SampledFunction1D { x0: f.x0, dx: f.dx, values }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramp_has_exact_half_derivative() {
        // D^{1/2}[H(y) y] = 2 sqrt(y / pi).
        let f = SampledFunction1D::from_fn(-1.0, 0.01, 301, |y| y.max(0.0));
        let d = half_derivative(&f);
        for k in 0..f.len() {
            let y = f.x(k);
            let exact = if y > 0.0 { 2.0 * (y / PI).sqrt() } else { 0.0 };
            assert!((d.values[k] - exact).abs() < 1e-12, "y={y}");
        }
    }

    #[test]
    fn step_gives_inverse_square_root() {
        let f = SampledFunction1D::from_fn(0.0, 0.1, 50, |_| 1.0);
        let d = half_derivative(&f);
        for k in 1..50 {
            let exact = 1.0 / (PI * f.x(k)).sqrt();
            assert!((d.values[k] - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn non_uniform_grid_is_rejected() {
        let xs = [0.0, 0.1, 0.25, 0.3];
        assert_eq!(SampledFunction1D::from_samples(&xs, vec![0.0; 4]), Err(Error::NonUniformGrid));
    }

    #[test]
    fn convolution_matches_direct_sum() {
        let a: Vec<f64> = (0..100).map(|i| (i as f64 * 0.37).sin()).collect();
        let b: Vec<f64> = (0..80).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let fast = convolve(&a, &b, 179);
        for k in 0..179 {
            let mut s = 0.0;
            for i in 0..100 {
                if k >= i && k - i < 80 {
                    s += a[i] * b[k - i];
                }
            }
            assert!((fast[k] - s).abs() < 1e-12);
        }
    }
}
