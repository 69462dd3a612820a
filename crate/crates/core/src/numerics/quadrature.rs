//! Gauss–Legendre rules, composite panels and the product sphere grid.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Nodes and weights of a one-dimensional rule on `[a, b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quadrature1D {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub a: f64,
    pub b: f64,
}

impl Quadrature1D {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Legendre polynomial P_n(x) and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Reference nodes on [-1, 1] in increasing order.
fn reference_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Gauss–Legendre rule with `n` nodes on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<Quadrature1D> {
    if n == 0 || !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInterval { n, a, b });
    }
    let (x, w) = reference_rule(n);
    let h = 0.5 * (b - a);
    let c = 0.5 * (b + a);
    Ok(Quadrature1D {
        nodes: x.iter().map(|&xi| c + h * xi).collect(),
        weights: w.iter().map(|&wi| h * wi).collect(),
        a,
        b,
    })
}

/// Barycentric weights of the Gauss–Legendre nodes, up to a common factor.
pub fn gauss_barycentric_weights(q: &Quadrature1D) -> Vec<f64> {
    let h = 0.5 * (q.b - q.a);
    let c = 0.5 * (q.b + q.a);
    q.nodes
        .iter()
        .zip(&q.weights)
        .enumerate()
        .map(|(j, (&x, &w))| {
            let xr = (x - c) / h;
            let s = if j % 2 == 0 { 1.0 } else { -1.0 };
            s * ((1.0 - xr * xr) * w / h).sqrt()
        })
        .collect()
}

/// Composite rule: `n` Gauss nodes on each panel between consecutive breakpoints.
pub fn composite(breaks: &[f64], n: usize) -> Result<Quadrature1D> {
    if breaks.len() < 2 {
        return Err(Error::InvalidInterval { n, a: 0.0, b: 0.0 });
    }
    let (x, w) = reference_rule(n);
    let mut nodes = Vec::with_capacity(n * (breaks.len() - 1));
    let mut weights = Vec::with_capacity(nodes.capacity());
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if !(a < b) {
            return Err(Error::InvalidInterval { n, a, b });
        }
        let h = 0.5 * (b - a);
        let c = 0.5 * (b + a);
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(c + h * xi);
            weights.push(h * wi);
        }
    }
    Ok(Quadrature1D {
        nodes,
        weights,
        a: breaks[0],
        b: *breaks.last().unwrap(),
    })
}

/// Breakpoints on `[a, b]` refined geometrically towards `a` (ratio 2) until
/// the innermost panel is shorter than `h_min`.
pub fn graded_breaks_toward_left(a: f64, b: f64, h_min: f64) -> Vec<f64> {
    let mut inner = vec![b];
    let mut w = b - a;
    while w > h_min.max(1e-300) && inner.len() < 60 {
        w *= 0.5;
        inner.push(a + w);
    }
    inner.push(a);
    inner.reverse();
    inner
}

/// Product rule on the unit sphere: Gauss–Legendre in cos(theta), trapezoid in phi.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereGrid {
    pub n_theta: usize,
    pub n_phi: usize,
    pub directions: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl SphereGrid {
    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn integrate<F: FnMut([f64; 3]) -> f64>(&self, mut f: F) -> f64 {
        self.directions
            .iter()
            .zip(&self.weights)
            .map(|(&d, &w)| w * f(d))
            .sum()
    }
}

pub fn sphere_grid(n_theta: usize, n_phi: usize) -> Result<SphereGrid> {
    if n_theta < 1 || n_phi < 2 {
        return Err(Error::InvalidCounts { n_theta, n_phi });
    }
    let gl = gauss_legendre(n_theta, -1.0, 1.0)?;
    let dphi = 2.0 * PI / n_phi as f64;
    let mut directions = Vec::with_capacity(n_theta * n_phi);
    let mut weights = Vec::with_capacity(n_theta * n_phi);
    for (&ct, &wt) in gl.nodes.iter().zip(&gl.weights) {
        let st = (1.0 - ct * ct).max(0.0).sqrt();
        for j in 0..n_phi {
            // half-step offset keeps directions off the coordinate planes
            let phi = (j as f64 + 0.5) * dphi;
            directions.push([st * phi.cos(), st * phi.sin(), ct]);
            weights.push(wt * dphi);
        }
    }
    Ok(SphereGrid {
        n_theta,
        n_phi,
        directions,
        weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn midpoint_and_two_point() {
        let q = gauss_legendre(1, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(q.nodes[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(q.weights[0], 1.0, epsilon = 1e-15);
        let q = gauss_legendre(2, -1.0, 1.0).unwrap();
        assert_abs_diff_eq!(q.nodes[1], 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(q.nodes[0], -1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(q.weights[0], 1.0, epsilon = 1e-15);
        let q = gauss_legendre(2, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(q.integrate(|u| u * u * u), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn weights_sum_and_exactness() {
        for n in [3, 17, 96, 200] {
            let q = gauss_legendre(n, -0.3, 2.2).unwrap();
            assert_abs_diff_eq!(q.weights.iter().sum::<f64>(), 2.5, epsilon = 1e-12);
            let d = 2 * n - 1;
            let exact = (2.2f64.powi(d as i32 + 1) - (-0.3f64).powi(d as i32 + 1)) / (d as f64 + 1.0);
            let got = q.integrate(|x| x.powi(d as i32));
            assert!((got - exact).abs() <= 1e-10 * exact.abs().max(1.0), "n={n}");
        }
    }

    #[test]
    fn bad_interval() {
        assert!(gauss_legendre(0, 0.0, 1.0).is_err());
        assert!(gauss_legendre(3, 1.0, 1.0).is_err());
        assert!(sphere_grid(0, 4).is_err());
        assert!(sphere_grid(2, 1).is_err());
    }

    #[test]
    fn sphere_moments() {
        let g = sphere_grid(8, 16).unwrap();
        assert_abs_diff_eq!(g.integrate(|_| 1.0), 4.0 * PI, epsilon = 1e-12);
        assert_abs_diff_eq!(g.integrate(|w| w[2]), 0.0, epsilon = 1e-12);
        let a = [0.3, -1.2, 0.7];
        let b = [2.0, 0.1, -0.4];
        let dot = |u: [f64; 3], v: [f64; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
        let got = g.integrate(|w| dot(w, a) * dot(w, b));
        assert_abs_diff_eq!(got, 4.0 * PI / 3.0 * dot(a, b), epsilon = 1e-12);
    }

    #[test]
    fn composite_graded() {
        let br = graded_breaks_toward_left(0.2, 1.0, 1e-7);
        assert_abs_diff_eq!(br[0], 0.2);
        assert!(br[1] - br[0] <= 1e-7);
        let q = composite(&br, 8).unwrap();
        assert_abs_diff_eq!(q.integrate(|x| (x - 0.2).sqrt()), 2.0 / 3.0 * 0.8f64.powf(1.5), epsilon = 1e-9);
    }
}
