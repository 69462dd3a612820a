//! Discrete approximation of the continuum transform
//! F(k) = (2 pi)^{-1/2} \int e^{iku} f(u) du on a uniform grid.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Increasing frequencies, symmetric about zero.
    pub k: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl Spectrum {
    pub fn dk(&self) -> f64 {
        self.k[1] - self.k[0]
    }
}

/// Transform of samples at `u0 + j du`, zero-extended with `padding` extra zeros.
pub fn fourier_uniform(u0: f64, du: f64, samples: &[Complex64], padding: usize) -> Spectrum {
    let n = samples.len() + padding;
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    buf[..samples.len()].copy_from_slice(samples);
    // e^{+i k u} is the inverse direction in rustfft's convention
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(n).process(&mut buf);
    let dk = 2.0 * PI / (n as f64 * du);
    let scale = du / (2.0 * PI).sqrt();
    let half = n / 2;
    let mut k = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    // frequencies -half .. n-half-1, ordered increasing
    for i in 0..n {
        let m = i as isize - half as isize;
        let idx = m.rem_euclid(n as isize) as usize;
        let km = m as f64 * dk;
        k.push(km);
        values.push(buf[idx] * Complex64::from_polar(scale, km * u0));
    }
    Spectrum { k, values }
}

/// Same as [`fourier_uniform`] for an explicit grid, which must be uniform.
pub fn fourier_interval(grid: &[f64], samples: &[Complex64], padding: usize) -> Result<Spectrum> {
    if grid.len() != samples.len() || grid.len() < 2 {
        return Err(Error::NonUniformGrid);
    }
    let du = grid[1] - grid[0];
    let tol = 1e-9 * du.abs().max(1e-300) * grid.len() as f64;
    for (j, &u) in grid.iter().enumerate() {
        if (u - (grid[0] + j as f64 * du)).abs() > tol || du <= 0.0 {
            return Err(Error::NonUniformGrid);
        }
    }
    Ok(fourier_uniform(grid[0], du, samples, padding))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss_grid(w: f64) -> (Vec<f64>, Vec<Complex64>) {
        let n = 512;
        let du = 16.0 / n as f64;
        let g: Vec<f64> = (0..n).map(|j| -8.0 + j as f64 * du).collect();
        let v = g
            .iter()
            .map(|u| Complex64::new((-(u - 0.5) * (u - 0.5) / (2.0 * w * w)).exp(), 0.0))
            .collect();
        (g, v)
    }

    #[test]
    fn zero_in_zero_out() {
        let g: Vec<f64> = (0..16).map(|j| j as f64 * 0.1).collect();
        let s = fourier_interval(&g, &vec![Complex64::new(0.0, 0.0); 16], 16).unwrap();
        assert!(s.values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn gaussian_pair() {
        let w = 0.7;
        let (g, v) = gauss_grid(w);
        let s = fourier_interval(&g, &v, 512).unwrap();
        for (k, val) in s.k.iter().zip(&s.values) {
            let want = Complex64::from_polar(w * (-0.5 * w * w * k * k).exp(), 0.5 * k);
            assert!((val - want).norm() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn parseval_and_reality() {
        let (g, v) = gauss_grid(0.4);
        let s = fourier_interval(&g, &v, 100).unwrap();
        let du = g[1] - g[0];
        let lhs: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>() * du;
        let rhs: f64 = s.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * s.dk();
        assert!((lhs - rhs).abs() < 1e-8 * lhs);
        let n = s.k.len();
        let half = n / 2;
        for m in 1..half {
            let a = s.values[half + m];
            let b = s.values[half - m];
            assert!((a - b.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_uniform() {
        let g = vec![0.0, 0.1, 0.25, 0.3];
        let v = vec![Complex64::new(1.0, 0.0); 4];
        assert_eq!(fourier_interval(&g, &v, 0), Err(Error::NonUniformGrid));
    }
}
