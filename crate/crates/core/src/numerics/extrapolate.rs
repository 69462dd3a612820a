//! Regularization schedules and polynomial extrapolation to eps = 0.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsSchedule {
    pub eps_values: Vec<f64>,
    pub extrapolation_order: usize,
}

impl EpsSchedule {
    /// eps_n = eps0 * ratio^n for n < count.
    pub fn geometric(eps0: f64, ratio: f64, count: usize, order: usize) -> Result<Self> {
        let eps_values = (0..count).map(|n| eps0 * ratio.powi(n as i32)).collect();
        Self::new(eps_values, order)
    }

    pub fn new(eps_values: Vec<f64>, extrapolation_order: usize) -> Result<Self> {
        let ok = !eps_values.is_empty()
            && eps_values.iter().all(|&e| e > 0.0 && e.is_finite())
            && eps_values.windows(2).all(|w| w[1] < w[0]);
        if !ok {
            return Err(Error::Config(
                "eps schedule must be positive and strictly decreasing".into(),
            ));
        }
        Ok(Self {
            eps_values,
            extrapolation_order,
        })
    }

    /// Default schedule for a grid whose characteristic spacing is `h`.
    pub fn for_spacing(h: f64) -> Self {
        Self::geometric(0.1 * h, 0.5, 6, 2).expect("valid default")
    }
}

/// Value at eps = 0 of the polynomial through `pts`.
fn neville_at_zero(pts: &[(f64, Complex64)]) -> Complex64 {
    let mut p: Vec<Complex64> = pts.iter().map(|s| s.1).collect();
    let n = pts.len();
    for lvl in 1..n {
        for i in 0..n - lvl {
            let (xi, xj) = (pts[i].0, pts[i + lvl].0);
            p[i] = (p[i + 1] * xi - p[i] * xj) / (xi - xj);
        }
    }
    p[0]
}

/// Extrapolated limit and the spread of the last two extrapolants.
pub fn eps_extrapolate_order(
    samples: &[(f64, Complex64)],
    order: usize,
) -> Result<(Complex64, f64)> {
    if samples.len() < 3 {
        return Err(Error::InsufficientSamples {
            needed: 3,
            got: samples.len(),
        });
    }
    for i in 0..samples.len() {
        for j in 0..i {
            if samples[i].0 == samples[j].0 {
                return Err(Error::Config("duplicate eps in samples".into()));
            }
        }
    }
    let order = order.min(samples.len() - 2).max(1);
    let ex: Vec<Complex64> = samples
        .windows(order + 1)
        .map(neville_at_zero)
        .collect();
    let last = ex[ex.len() - 1];
    let prev = ex[ex.len() - 2];
    Ok((last, (last - prev).norm()))
}

pub fn eps_extrapolate(samples: &[(f64, Complex64)], sched: &EpsSchedule) -> Result<(Complex64, f64)> {
    eps_extrapolate_order(samples, sched.extrapolation_order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn exact_on_polynomials() {
        let eps = [0.1, 0.05, 0.025, 0.0125];
        let lin: Vec<_> = eps.iter().map(|&e| (e, c(2.0 + 3.0 * e))).collect();
        let (l, err) = eps_extrapolate_order(&lin, 1).unwrap();
        assert!((l.re - 2.0).abs() < 1e-12 && err < 1e-12);
        let quad: Vec<_> = eps.iter().map(|&e| (e, Complex64::new(-1.0 + e * e, 0.5 - e))).collect();
        let (l, _) = eps_extrapolate_order(&quad, 2).unwrap();
        assert!((l - Complex64::new(-1.0, 0.5)).norm() < 1e-12);
    }

    #[test]
    fn insufficient() {
        assert!(eps_extrapolate_order(&[(0.1, c(1.0)), (0.05, c(1.0))], 1).is_err());
    }

    #[test]
    fn schedule_validation() {
        assert!(EpsSchedule::new(vec![0.1, 0.2], 1).is_err());
        assert!(EpsSchedule::new(vec![0.1, -0.2], 1).is_err());
        let s = EpsSchedule::geometric(0.1, 0.5, 6, 2).unwrap();
        assert_eq!(s.eps_values.len(), 6);
        assert!((s.eps_values[5] - 0.1 / 32.0).abs() < 1e-15);
    }
}
