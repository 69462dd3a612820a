//! Reconstruction of the solution in the double cone from its data on V.

use crate::boundary::{restrict_to_v, BoundaryData, ConeGrid};
use crate::bulk::{evaluate_solution, propagator_complex, KgSolution};
use crate::error::{Error, Result};
use crate::generator::mass_correction_with;
use crate::geometry::{dot, in_double_cone, u_star, SpacetimePoint};
use crate::numerics::extrapolate::{eps_extrapolate, EpsSchedule};
use crate::numerics::quadrature::{composite, graded_breaks_toward_left, Quadrature1D};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

const PANEL_NODES: usize = 12;

#[derive(Debug, Clone)]
pub struct GoursatSpec {
    pub mass: f64,
    pub sched: EpsSchedule,
    pub grid: Arc<ConeGrid>,
}

impl GoursatSpec {
    /// Schedule scaled to the u spacing of `grid`.
    pub fn new(mass: f64, grid: Arc<ConeGrid>) -> Result<Self> {
        if mass < 0.0 {
            return Err(Error::NegativeMass(mass));
        }
        let sched = EpsSchedule::for_spacing(1.0 / grid.n_u() as f64);
        Ok(Self { mass, sched, grid })
    }
}

/// u rule on [0, cap] graded toward `us` from both sides.
fn graded_rule(us: f64, cap: f64, h_min: f64) -> Result<Quadrature1D> {
    let c = us.clamp(0.0, cap);
    let mut breaks: Vec<f64> = if c > 0.0 {
        graded_breaks_toward_left(-c, 0.0, h_min).into_iter().map(|x| -x).rev().collect()
    } else {
        vec![0.0]
    };
    if c < cap {
        let right = graded_breaks_toward_left(c, cap, h_min);
        breaks.extend_from_slice(&right[1..]);
    }
    composite(&breaks, PANEL_NODES)
}

/// Per-eps values of -2 \int dw du Delta_m((t - i eps, x), (u, u w)) u d_u Phi.
fn goursat_samples(phi: &BoundaryData, dphi: &[f64], mass: f64, eps: &[f64], p: SpacetimePoint) -> Result<Vec<Complex64>> {
    let g = &phi.grid;
    let n = g.n_u();
    let cap = phi.support_cap;
    let h_min = 0.05 * eps.iter().cloned().fold(f64::INFINITY, f64::min);
    let per_dir: Vec<Result<Vec<Complex64>>> = (0..g.n_dir())
        .into_par_iter()
        .map(|d| {
            let ray = &dphi[d * n..(d + 1) * n];
            let mut acc = vec![Complex64::new(0.0, 0.0); eps.len()];
            if cap == 0.0 || ray.iter().all(|v| *v == 0.0) {
                return Ok(acc);
            }
            let w = g.sphere.directions[d];
            let q = graded_rule(u_star(p, w)?, cap, h_min)?;
            for (&u, &wu) in q.nodes.iter().zip(&q.weights) {
                let h = u * g.eval(ray, u) * wu;
                if h == 0.0 {
                    continue;
                }
                let on_v = SpacetimePoint::on_cone(u, w);
                for (a, &e) in acc.iter_mut().zip(eps) {
                    *a += propagator_complex(mass, Complex64::new(p.t, -e), p.x, on_v)? * h;
                }
            }
            Ok(acc.into_iter().map(|a| a * (-2.0 * g.sphere.weights[d])).collect())
        })
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); eps.len()];
    for r in per_dir {
        for (o, v) in out.iter_mut().zip(r?) {
            *o += v;
        }
    }
    Ok(out)
}

/// The solution determined by `phi` at each point.
///
/// The massless part is eps-regularized and extrapolated. For m > 0 the
/// difference of the propagators is added as the real integral of its smooth
/// kernel over the timelike range [0, u*]; this is the eps -> 0 limit of
/// [`goursat_solve_regularized`] at a fraction of the cost.
pub fn goursat_solve(phi: &BoundaryData, spec: &GoursatSpec, points: &[SpacetimePoint]) -> Result<Vec<f64>> {
    check_inputs(phi, spec, points)?;
    let dphi = phi.derivative();
    points
        .iter()
        .map(|&p| {
            let v = extrapolated(phi, &dphi, 0.0, spec, p)?;
            if spec.mass == 0.0 {
                return Ok(v);
            }
            Ok(v + mass_correction_with(phi, &dphi, spec.mass, p)?)
        })
        .collect()
}

/// The solution determined by `phi`, with the full massive propagator
/// eps-regularized and extrapolated.
pub fn goursat_solve_regularized(phi: &BoundaryData, spec: &GoursatSpec, points: &[SpacetimePoint]) -> Result<Vec<f64>> {
    check_inputs(phi, spec, points)?;
    let dphi = phi.derivative();
    points.iter().map(|&p| extrapolated(phi, &dphi, spec.mass, spec, p)).collect()
}

fn check_inputs(phi: &BoundaryData, spec: &GoursatSpec, points: &[SpacetimePoint]) -> Result<()> {
    if !(Arc::ptr_eq(&phi.grid, &spec.grid) || *phi.grid == *spec.grid) {
        return Err(Error::GridMismatch);
    }
    if let Some(p) = points.iter().find(|p| !in_double_cone(**p)) {
        return Err(Error::OutsideCone { t: p.t, r: p.r() });
    }
    Ok(())
}

fn extrapolated(phi: &BoundaryData, dphi: &[f64], mass: f64, spec: &GoursatSpec, p: SpacetimePoint) -> Result<f64> {
    let scale = phi.max_ratio_to_u();
    let vals = goursat_samples(phi, dphi, mass, &spec.sched.eps_values, p)?;
    let samples: Vec<(f64, Complex64)> = spec.sched.eps_values.iter().copied().zip(vals).collect();
    let (v, err) = eps_extrapolate(&samples, &spec.sched)?;
    let tol = 1e-3 * v.norm().max(scale);
    if err > tol {
        return Err(Error::ExtrapolationUnstable { estimate: err, tolerance: tol });
    }
    if v.im.abs() > 1e-8 * v.re.abs().max(scale) {
        return Err(Error::ImaginaryResidue(v.im));
    }
    Ok(v.re)
}

/// Massless reconstruction from the explicit kernel:
/// phi(p) = (1/2pi) \int dw u* d_u Phi(w, u*) / (t - w.x).
pub fn goursat_massless_direct(phi: &BoundaryData, points: &[SpacetimePoint]) -> Result<Vec<f64>> {
    let g = &phi.grid;
    let n = g.n_u();
    let dphi = phi.derivative();
    points
        .iter()
        .map(|&p| {
            let mut acc = 0.0;
            for d in 0..g.n_dir() {
                let w = g.sphere.directions[d];
                let us = u_star(p, w)?;
                let du = g.eval(&dphi[d * n..(d + 1) * n], us);
                acc += g.sphere.weights[d] * us * du / (p.t - dot(w, p.x));
            }
            Ok(acc / (2.0 * PI))
        })
        .collect()
}

/// sup |goursat(restriction) - exact| / sup |exact| over the probes.
pub fn roundtrip_residual(s: &KgSolution, spec: &GoursatSpec, probes: &[SpacetimePoint]) -> Result<f64> {
    if (s.mass - spec.mass).abs() > 0.0 {
        return Err(Error::MassMismatch(s.mass, spec.mass));
    }
    let phi = restrict_to_v(s, &spec.grid);
    let got = goursat_solve(&phi, spec, probes)?;
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for (p, g) in probes.iter().zip(&got) {
        let e = evaluate_solution(s, *p);
        num = num.max((g - e).abs());
        den = den.max(e.abs());
    }
    Ok(if den == 0.0 { num } else { num / den })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bulk::Bump;

    fn probes() -> Vec<SpacetimePoint> {
        vec![
            SpacetimePoint::new(1.0, [0.1, -0.1, 0.2]),
            SpacetimePoint::new(0.8, [0.2, 0.1, 0.0]),
            SpacetimePoint::new(1.3, [-0.1, 0.0, 0.15]),
        ]
    }

    #[test]
    fn zero_data_and_constant_field() {
        let g = ConeGrid::with_panels(4, 12, 8, 16).unwrap();
        let spec = GoursatSpec::new(0.0, g.clone()).unwrap();
        let z = BoundaryData::zero(g.clone());
        assert!(goursat_solve(&z, &spec, &probes()).unwrap().iter().all(|v| *v == 0.0));
        // phi = 1 restricts to Phi = u
        let one = BoundaryData::from_fn(g.clone(), |_, u| u);
        for v in goursat_massless_direct(&one, &probes()).unwrap() {
            assert!((v - 1.0).abs() < 1e-10, "{v}");
        }
        for v in goursat_solve(&one, &spec, &probes()).unwrap() {
            assert!((v - 1.0).abs() < 1e-6, "{v}");
        }
        let out = SpacetimePoint::new(0.1, [0.5, 0.0, 0.0]);
        assert!(matches!(goursat_solve(&one, &spec, &[out]), Err(Error::OutsideCone { .. })));
    }

    #[test]
    fn roundtrip_and_massless_kernel() {
        let g = ConeGrid::with_panels(16, 16, 16, 32).unwrap();
        let b = Bump::new([0.1, -0.1, 0.1], 0.45, 1.0, -0.5).unwrap();
        for m in [0.0, 1.0] {
            let s = KgSolution::from_bumps(m, vec![b.clone()]).unwrap();
            let spec = GoursatSpec::new(m, g.clone()).unwrap();
            let r = roundtrip_residual(&s, &spec, &probes()).unwrap();
            assert!(r < 1e-3, "m={m} residual {r}");
            if m == 0.0 {
                let phi = restrict_to_v(&s, &g);
                let a = goursat_solve(&phi, &spec, &probes()).unwrap();
                let d = goursat_massless_direct(&phi, &probes()).unwrap();
                for (x, y) in a.iter().zip(&d) {
                    assert!((x - y).abs() < 1e-3 * phi.max_ratio_to_u(), "{x} {y}");
                }
            }
        }
    }

    #[test]
    fn linear_in_the_data() {
        let g = ConeGrid::with_panels(4, 12, 8, 16).unwrap();
        let spec = GoursatSpec::new(0.7, g.clone()).unwrap();
        let a = BoundaryData::from_fn(g.clone(), |w, u| u * (1.0 - u).powi(3) * (1.0 + 0.2 * w[0]));
        let b = BoundaryData::from_fn(g.clone(), |w, u| u * u * (1.0 - u).powi(4) * (1.0 - 0.3 * w[2]));
        let c = a.combine(2.0, &b, -0.5).unwrap();
        let pa = goursat_solve(&a, &spec, &probes()).unwrap();
        let pb = goursat_solve(&b, &spec, &probes()).unwrap();
        let pc = goursat_solve(&c, &spec, &probes()).unwrap();
        for i in 0..pa.len() {
            let want = 2.0 * pa[i] - 0.5 * pb[i];
            assert!((pc[i] - want).abs() <= 1e-8 * want.abs().max(1e-3));
        }
    }
}
