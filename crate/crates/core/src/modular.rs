//! The flow generated by X on boundary data, its one-particle unitary in the
//! h representation, the induced bulk flow and KMS checks at inverse temperature 2 pi.

use crate::boundary::{m_weight, thermal_weight, BoundaryData, ConeGrid, HSpectrum};
use crate::bulk::{evaluate_solution, KgSolution};
use crate::error::{Error, Result};
use crate::geometry::{flow_bulk, flow_u_unchecked, SpacetimePoint};
use crate::goursat::{goursat_solve, GoursatSpec};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowParams {
    pub tau: f64,
    pub mass: f64,
}

/// Geometric flow parameter for a modular parameter t (the modular group runs at -2 pi tau).
pub fn geometric_from_modular(t: f64) -> f64 {
    -t / (2.0 * PI)
}

/// (beta_tau Phi)(w, u) = Phi(w, u / (u + e^{-tau}(1 - u))), resampled on the same grid.
pub fn beta_flow_boundary(phi: &BoundaryData, tau: f64) -> BoundaryData {
    if tau == 0.0 {
        return phi.clone();
    }
    let g = &phi.grid;
    let n = g.n_u();
    let cap = phi.support_cap;
    let src: Vec<f64> = g.u.nodes.iter().map(|&u| flow_u_unchecked(-tau, u)).collect();
    let values: Vec<f64> = (0..g.n_dir())
        .into_par_iter()
        .flat_map_iter(|d| {
            let ray = phi.ray(d);
            src.iter()
                .map(|&v| if v >= cap { 0.0 } else { g.eval(ray, v) })
                .collect::<Vec<_>>()
        })
        .collect();
    debug_assert_eq!(values.len(), n * g.n_dir());
    BoundaryData::from_values(g.clone(), values)
}

/// beta_tau applied to the restriction of a known solution, sampled exactly at the flowed parameters.
pub fn beta_flow_restriction(s: &KgSolution, grid: &Arc<ConeGrid>, tau: f64) -> BoundaryData {
    BoundaryData::from_fn(grid.clone(), |w, u| {
        let v = flow_u_unchecked(-tau, u);
        v * evaluate_solution(s, SpacetimePoint::on_cone(v, w))
    })
}

/// The flow in the h representation: a translation by tau in l, i.e. multiplication by e^{-i tau h}.
pub fn modular_unitary_hspace(spec: &HSpectrum, tau: f64) -> HSpectrum {
    spec.map_phase(|h| Complex64::from_polar(1.0, -tau * h))
}

/// s_tau on boundary data: reconstruct the bulk solution from the flowed data.
pub fn s_tau(phi: &BoundaryData, params: FlowParams, points: &[SpacetimePoint]) -> Result<Vec<f64>> {
    let spec = GoursatSpec::new(params.mass, phi.grid.clone())?;
    goursat_solve(&beta_flow_boundary(phi, params.tau), &spec, points)
}

fn in_closure(p: SpacetimePoint) -> bool {
    (p.t - 1.0).abs() + p.r() <= 1.0 + 1e-9
}

/// Massless bulk flow: phi pulled back along the flow of X for time -tau with
/// the conformal weight exp(\int div X / 4).
pub fn s_tau_massless_bulk(s: &KgSolution, tau: f64, p: SpacetimePoint) -> Result<f64> {
    if s.mass != 0.0 {
        return Err(Error::MassMismatch(s.mass, 0.0));
    }
    if !in_closure(p) {
        return Err(Error::OutsideCone { t: p.t, r: p.r() });
    }
    let (q, lnj) = flow_bulk(p, -tau, 1e-3);
    let (q2, lnj2) = flow_bulk(p, -tau, 5e-4);
    let drift = (q.t - q2.t).abs() + (0..3).map(|i| (q.x[i] - q2.x[i]).abs()).sum::<f64>() + (lnj - lnj2).abs();
    if !in_closure(q2) || drift > 1e-8 {
        return Err(Error::FlowLeftCone);
    }
    Ok((0.25 * lnj2).exp() * evaluate_solution(s, q2))
}

/// sup over the grid of sqrt(m(-h)) |Phi~(w, h) - conj Phi~(w, -h)|, the residual of
/// e^{-pi h} Phi~ + j(Phi~) measured in the weight of the h representation.
pub fn kms_reality_check(spec: &HSpectrum) -> f64 {
    let n = spec.h.len();
    let mut worst: f64 = 0.0;
    for d in 0..spec.sphere_weights.len() {
        let v = spec.at(d);
        for i in 0..n {
            let j = n - 1 - i;
            debug_assert!((spec.h[i] + spec.h[j]).abs() < 1e-9);
            let r = (v[i] - v[j].conj()).norm() * m_weight(-spec.h[i]).sqrt();
            worst = worst.max(r);
        }
    }
    worst
}

/// F(tau) = \int dw dh m(h) conj(Phi1~) e^{i tau h} Phi2~ for 0 <= Im tau <= 2 pi.
pub fn two_point_flowed(a: &HSpectrum, b: &HSpectrum, tau: Complex64) -> Result<Complex64> {
    if !(0.0..=2.0 * PI).contains(&tau.im) {
        return Err(Error::StripViolation(tau.im));
    }
    let n = a.h.len();
    let mut acc = Complex64::new(0.0, 0.0);
    let wts: Vec<Complex64> = a
        .h
        .iter()
        .map(|&h| Complex64::from_polar(thermal_weight(h, tau.im) * a.dh, tau.re * h))
        .collect();
    for d in 0..a.sphere_weights.len() {
        let (x, y) = (a.at(d), b.at(d));
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..n {
            s += x[i].conj() * y[i] * wts[i];
        }
        acc += s * a.sphere_weights[d];
    }
    Ok(acc)
}

/// One row of the strip-boundary comparison.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct KmsRow {
    pub s: f64,
    pub lower: Complex64,
    pub upper: Complex64,
    /// two_point_flowed(Phi2, Phi1, -s)
    pub swapped_reversed: Complex64,
    /// two_point_flowed(Phi2, Phi1, s)
    pub swapped_same: Complex64,
}

pub fn kms_traces(a: &HSpectrum, b: &HSpectrum, s_values: &[f64]) -> Result<Vec<KmsRow>> {
    s_values
        .iter()
        .map(|&s| {
            Ok(KmsRow {
                s,
                lower: two_point_flowed(a, b, Complex64::new(s, 0.0))?,
                upper: two_point_flowed(a, b, Complex64::new(s, 2.0 * PI))?,
                swapped_reversed: two_point_flowed(b, a, Complex64::new(-s, 0.0))?,
                swapped_same: two_point_flowed(b, a, Complex64::new(s, 0.0))?,
            })
        })
        .collect()
}

/// Which swapped correlation matches F(s + 2 pi i), with the worst relative mismatch of each.
#[derive(Debug, Clone, serde::Serialize)]
pub struct KmsVerdict {
    pub matching: &'static str,
    pub reversed_residual: f64,
    pub same_residual: f64,
}

pub fn kms_compare(rows: &[KmsRow]) -> KmsVerdict {
    let scale = rows.iter().map(|r| r.lower.norm().max(r.upper.norm())).fold(0.0, f64::max).max(1e-300);
    let rev = rows.iter().map(|r| (r.upper - r.swapped_reversed).norm()).fold(0.0, f64::max) / scale;
    let same = rows.iter().map(|r| (r.upper - r.swapped_same).norm()).fold(0.0, f64::max) / scale;
    KmsVerdict {
        matching: if rev <= same { "F(s+2pi i) = <Phi2, V_{-s} Phi1>" } else { "F(s+2pi i) = <Phi2, V_s Phi1>" },
        reversed_residual: rev,
        same_residual: same,
    }
}

/// sup |F| over a rectangular grid of the closed strip.
pub fn strip_sup(a: &HSpectrum, b: &HSpectrum, re: &[f64], n_im: usize) -> Result<f64> {
    let mut sup: f64 = 0.0;
    for &x in re {
        for k in 0..=n_im {
            let y = 2.0 * PI * k as f64 / n_im as f64;
            sup = sup.max(two_point_flowed(a, b, Complex64::new(x, y))?.norm());
        }
    }
    Ok(sup)
}
