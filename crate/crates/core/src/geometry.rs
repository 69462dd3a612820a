//! Coordinates and causal geometry of the unit double cone
//! D = {|t - 1| + |x| < 1}, its lower null boundary V, and the conformal
//! Killing field X whose flow preserves both.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type Vec3 = [f64; 3];

#[inline]
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(s: f64, a: Vec3) -> Vec3 {
    [s * a[0], s * a[1], s * a[2]]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub t: f64,
    pub x: Vec3,
}

impl SpacetimePoint {
    pub const fn new(t: f64, x: Vec3) -> Self {
        Self { t, x }
    }

    /// The point of V at parameter `u` along direction `omega`.
    pub fn on_cone(u: f64, omega: Vec3) -> Self {
        Self::new(u, scale(u, omega))
    }

    pub fn r(&self) -> f64 {
        norm(self.x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LightconeCoord {
    pub u: f64,
    pub v: f64,
    pub omega: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KillingSample {
    /// (X^t, X^x, X^y, X^z)
    pub vector: [f64; 4],
    pub divergence: f64,
}

pub fn to_lightcone(p: SpacetimePoint) -> Result<LightconeCoord> {
    let r = p.r();
    if r == 0.0 {
        return Err(Error::DegenerateOrigin);
    }
    Ok(LightconeCoord {
        u: 0.5 * (p.t + r),
        v: 0.5 * (p.t - r),
        omega: scale(1.0 / r, p.x),
    })
}

pub fn from_lightcone(c: LightconeCoord) -> SpacetimePoint {
    SpacetimePoint::new(c.u + c.v, scale(c.u - c.v, c.omega))
}

/// Signed squared interval, positive for spacelike separation.
pub fn sigma_distance(p: SpacetimePoint, q: SpacetimePoint) -> f64 {
    let dt = p.t - q.t;
    let d = sub(p.x, q.x);
    -dt * dt + dot(d, d)
}

/// Interval with a complex time at the first argument.
pub fn sigma_complex(tc: Complex64, x: Vec3, q: SpacetimePoint) -> Complex64 {
    let dt = tc - q.t;
    let d = sub(x, q.x);
    -dt * dt + dot(d, d)
}

pub fn in_double_cone(p: SpacetimePoint) -> bool {
    (p.t - 1.0).abs() + p.r() < 1.0
}

pub fn killing_x(p: SpacetimePoint) -> KillingSample {
    let r2 = dot(p.x, p.x);
    let s = p.t - 1.0;
    KillingSample {
        vector: [0.5 * (p.t * p.t + r2) - p.t, s * p.x[0], s * p.x[1], s * p.x[2]],
        divergence: 4.0 * s,
    }
}

/// Flow of u(u-1) d/du on [0, 1]: the parameter of V reached after time `tau`.
pub fn flow_u(tau: f64, u: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Domain(u));
    }
    Ok(flow_u_unchecked(tau, u))
}

#[inline]
pub(crate) fn flow_u_unchecked(tau: f64, u: f64) -> f64 {
    u / (u + tau.exp() * (1.0 - u))
}

/// Parameter on V of the ray in direction `omega` that is null separated from `p`.
pub fn u_star(p: SpacetimePoint, omega: Vec3) -> Result<f64> {
    if !in_double_cone(p) {
        return Err(Error::OutsideCone { t: p.t, r: p.r() });
    }
    let den = p.t - dot(omega, p.x);
    debug_assert!(den > 0.0);
    let u = (p.t * p.t - dot(p.x, p.x)) / (2.0 * den);
    debug_assert!(u > 0.0 && u < 1.0);
    Ok(u)
}

/// Gradient (d/dt, d/dx) of `u_star` in `p` at fixed `omega`.
pub fn u_star_gradient(p: SpacetimePoint, omega: Vec3) -> [f64; 4] {
    let num = p.t * p.t - dot(p.x, p.x);
    let den = 2.0 * (p.t - dot(omega, p.x));
    let d2 = den * den;
    let mut g = [2.0 * p.t / den - 2.0 * num / d2, 0.0, 0.0, 0.0];
    for i in 0..3 {
        g[i + 1] = -2.0 * p.x[i] / den + 2.0 * num * omega[i] / d2;
    }
    g
}

/// Gradient of sigma(p, q) in p; the gradient in q is its negative.
pub fn sigma_gradient(p: SpacetimePoint, q: SpacetimePoint) -> [f64; 4] {
    [
        -2.0 * (p.t - q.t),
        2.0 * (p.x[0] - q.x[0]),
        2.0 * (p.x[1] - q.x[1]),
        2.0 * (p.x[2] - q.x[2]),
    ]
}

#[inline]
pub fn contract(a: [f64; 4], b: [f64; 4]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

/// |X_p sigma + X_q sigma - (div X(p) + div X(q)) sigma / 4|.
pub fn conformal_identity_residual(p: SpacetimePoint, q: SpacetimePoint) -> f64 {
    let g = sigma_gradient(p, q);
    let xp = killing_x(p);
    let xq = killing_x(q);
    let lhs = contract(xp.vector, g) - contract(xq.vector, g);
    (lhs - 0.25 * (xp.divergence + xq.divergence) * sigma_distance(p, q)).abs()
}

/// Right-hand side of dq/ds = sign * X(q).
#[inline]
fn flow_rhs(q: SpacetimePoint, sign: f64) -> ([f64; 4], f64) {
    let k = killing_x(q);
    (
        [sign * k.vector[0], sign * k.vector[1], sign * k.vector[2], sign * k.vector[3]],
        sign * k.divergence,
    )
}

/// Integrates the flow of X for time `tau` with classical RK4.
/// Returns the end point and the accumulated integral of div X along the path.
pub fn flow_bulk(p: SpacetimePoint, tau: f64, max_step: f64) -> (SpacetimePoint, f64) {
    if tau == 0.0 {
        return (p, 0.0);
    }
    let n = (tau.abs() / max_step).ceil().max(1.0) as usize;
    let h = tau.abs() / n as f64;
    let sign = tau.signum();
    let mut q = p;
    let mut lnj = 0.0;
    let shift = |q: SpacetimePoint, d: [f64; 4], s: f64| {
        SpacetimePoint::new(
            q.t + s * d[0],
            [q.x[0] + s * d[1], q.x[1] + s * d[2], q.x[2] + s * d[3]],
        )
    };
    for _ in 0..n {
        let (k1, j1) = flow_rhs(q, sign);
        let (k2, j2) = flow_rhs(shift(q, k1, 0.5 * h), sign);
        let (k3, j3) = flow_rhs(shift(q, k2, 0.5 * h), sign);
        let (k4, j4) = flow_rhs(shift(q, k3, h), sign);
        let mut d = [0.0; 4];
        for i in 0..4 {
            d[i] = (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
        }
        q = shift(q, d, h);
        lnj += h * (j1 + 2.0 * j2 + 2.0 * j3 + j4) / 6.0;
    }
    (q, lnj)
}

/// Residual |u(1-u) + X^a d_a u*| at u = u*(p, omega).
pub fn boundary_term_residual(p: SpacetimePoint, omega: Vec3) -> Result<f64> {
    let u = u_star(p, omega)?;
    debug_assert!(p.t - dot(omega, p.x) > 0.0);
    let g = u_star_gradient(p, omega);
    Ok((u * (1.0 - u) + contract(killing_x(p).vector, g)).abs())
}
