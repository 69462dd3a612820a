//! Infinitesimal generators of the boundary-induced flow on solutions, the
//! mass-dependent correction to the geometric generator, and its symbol.

use crate::boundary::{BoundaryData, ConeGrid};
use crate::goursat::{goursat_solve, GoursatSpec};
use crate::bulk::{evaluate_x_derivative, Field, FieldSample, KgSolution};
use crate::error::{Error, Result};
use crate::geometry::{dot, killing_x, sigma_distance, sigma_gradient, contract, u_star, SpacetimePoint, Vec3};
use crate::modular::{beta_flow_restriction, s_tau, FlowParams};
use crate::numerics::quadrature::{composite, gauss_legendre, sphere_grid, SphereGrid};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

pub use crate::geometry::boundary_term_residual;

/// F_m(z) = (m^2 / 8 pi) sum_k (m^2 z / 4)^k / (k! (k+1)!) and its derivative.
pub fn fm_eval(m: f64, z: f64) -> (f64, f64) {
    if m == 0.0 {
        return (0.0, 0.0);
    }
    let a = 0.25 * m * m * z;
    let (mut s, mut ds) = (1.0, 0.5);
    let (mut t, mut dt) = (1.0, 0.5);
    for k in 1..200 {
        let kf = k as f64;
        t *= a / (kf * (kf + 1.0));
        dt *= a / (kf * (kf + 2.0));
        s += t;
        ds += dt;
        if t.abs() < 1e-16 * s.abs() && dt.abs() < 1e-16 * ds.abs() {
            break;
        }
    }
    let c = m * m / (8.0 * PI);
    (c * s, c * 0.25 * m * m * ds)
}

/// The same function from Bessel functions: m I1(m sqrt z) / (4 pi sqrt z) for z > 0,
/// m J1(m sqrt(-z)) / (4 pi sqrt(-z)) for z < 0.
pub fn fm_bessel(m: f64, z: f64) -> f64 {
    if z == 0.0 {
        return m * m / (8.0 * PI);
    }
    let r = z.abs().sqrt();
    let x = m * r;
    let ratio = if z > 0.0 {
        crate::numerics::bessel::bessel_i01(x).1 / x
    } else {
        crate::numerics::bessel_j_scaled(x).1
    };
    m * m * ratio / (4.0 * PI)
}

/// gamma^X phi = -X(phi) - (t - 1) phi.
pub fn gamma_x(s: &impl Field, p: SpacetimePoint) -> f64 {
    -evaluate_x_derivative(s, p) - (p.t - 1.0) * s.sample(p).value
}

/// u rule on [0, us] following the panel breaks of the boundary grid.
fn clipped_panels(phi: &BoundaryData, us: f64) -> Result<crate::numerics::Quadrature1D> {
    let mut breaks: Vec<f64> = phi.grid.interp.breaks.iter().copied().filter(|&b| b < us).collect();
    breaks.push(us);
    composite(&breaks, 16)
}

/// \int dw \int_0^{u*} du u kernel(sigma, u) d_u Phi(w, u).
fn cone_integral(phi: &BoundaryData, p: SpacetimePoint, kernel: impl Fn(f64, f64) -> f64 + Sync) -> Result<f64> {
    cone_integral_with(phi, &phi.derivative(), p, kernel)
}

fn cone_integral_with(
    phi: &BoundaryData,
    dphi: &[f64],
    p: SpacetimePoint,
    kernel: impl Fn(f64, f64) -> f64 + Sync,
) -> Result<f64> {
    if !crate::geometry::in_double_cone(p) {
        return Err(Error::OutsideCone { t: p.t, r: p.r() });
    }
    let g = &phi.grid;
    let n = g.n_u();
    let parts: Vec<Result<f64>> = (0..g.n_dir())
        .into_par_iter()
        .map(|d| {
            let ray = &dphi[d * n..(d + 1) * n];
            if ray.iter().all(|v| *v == 0.0) {
                return Ok(0.0);
            }
            let w = g.sphere.directions[d];
            let us = u_star(p, w)?.min(phi.support_cap);
            if us <= 0.0 {
                return Ok(0.0);
            }
            let q = clipped_panels(phi, us)?;
            let mut acc = 0.0;
            for (&u, &wu) in q.nodes.iter().zip(&q.weights) {
                let sig = sigma_distance(p, SpacetimePoint::on_cone(u, w));
                acc += wu * u * kernel(sig, u) * g.eval(ray, u);
            }
            Ok(acc * g.sphere.weights[d])
        })
        .collect();
    parts.into_iter().sum()
}

/// Difference between the massive and massless reconstructions of the same data:
/// G_m Phi - G_0 Phi = -2 \int dw \int_0^{u*} F_m(sigma) u d_u Phi du,
/// since Delta_m - Delta_0 = F_m(sigma) on the past of the evaluation point.
pub fn mass_correction(phi: &BoundaryData, m: f64, p: SpacetimePoint) -> Result<f64> {
    if m < 0.0 {
        return Err(Error::NegativeMass(m));
    }
    if m == 0.0 {
        return Ok(0.0);
    }
    mass_correction_with(phi, &phi.derivative(), m, p)
}

/// [`mass_correction`] with the u derivative of `phi` supplied.
pub fn mass_correction_with(phi: &BoundaryData, dphi: &[f64], m: f64, p: SpacetimePoint) -> Result<f64> {
    if m < 0.0 {
        return Err(Error::NegativeMass(m));
    }
    if m == 0.0 {
        return Ok(0.0);
    }
    Ok(-2.0 * cone_integral_with(phi, dphi, p, |s, _| fm_eval(m, s).0)?)
}

/// (delta^(m) - delta^(0)) phi at p:
/// 2 \int dw \int_0^{u*} u [2 - (t + u)] [F_m + sigma F_m'] d_u Phi du.
/// Defined for any boundary data; it is a generator of the flow only on restrictions of solutions.
pub fn delta_diff(phi: &BoundaryData, m: f64, p: SpacetimePoint) -> Result<f64> {
    if m < 0.0 {
        return Err(Error::NegativeMass(m));
    }
    if m == 0.0 {
        if !crate::geometry::in_double_cone(p) {
            return Err(Error::OutsideCone { t: p.t, r: p.r() });
        }
        return Ok(0.0);
    }
    let v = cone_integral(phi, p, |s, u| {
        let (f, fp) = fm_eval(m, s);
        (2.0 - (p.t + u)) * (f + s * fp)
    })?;
    Ok(2.0 * v)
}

/// delta^(m) phi = gamma^X phi + (delta^(m) - delta^(0)) phi, with `phi` the restriction of `s`.
pub fn delta_m(s: &KgSolution, phi: &BoundaryData, p: SpacetimePoint) -> Result<f64> {
    Ok(gamma_x(s, p) + delta_diff(phi, s.mass, p)?)
}

/// Central difference (s_h - s_{-h}) / 2h of the boundary-induced flow at the points.
pub fn flow_central_difference(phi: &BoundaryData, m: f64, h: f64, points: &[SpacetimePoint]) -> Result<Vec<f64>> {
    let plus = s_tau(phi, FlowParams { tau: h, mass: m }, points)?;
    let minus = s_tau(phi, FlowParams { tau: -h, mass: m }, points)?;
    Ok(plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * h)).collect())
}

/// The same difference for a known solution, with the flowed data sampled exactly
/// instead of interpolated, so that the quadrature sees data smooth in the step.
pub fn solution_flow_central_difference(
    s: &KgSolution,
    grid: &Arc<ConeGrid>,
    h: f64,
    points: &[SpacetimePoint],
) -> Result<Vec<f64>> {
    let spec = GoursatSpec::new(s.mass, grid.clone())?;
    let plus = goursat_solve(&beta_flow_restriction(s, grid, h), &spec, points)?;
    let minus = goursat_solve(&beta_flow_restriction(s, grid, -h), &spec, points)?;
    Ok(plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * h)).collect())
}

/// Least-squares slope of ln y against ln x, with the rms residual of the fit.
pub fn loglog_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    let res = (lx.iter().zip(&ly).map(|(a, b)| (b - my - slope * (a - mx)).powi(2)).sum::<f64>() / n).sqrt();
    (slope, res)
}

/// |gamma_p F + gamma_q F + (div X(p) + div X(q)) (F + sigma F') / 4| for F = F_m(sigma(p, q)),
/// with gamma acting as -X - div X / 4 in each argument.
pub fn conformal_kernel_residual(m: f64, p: SpacetimePoint, q: SpacetimePoint) -> f64 {
    let s = sigma_distance(p, q);
    let (f, fp) = fm_eval(m, s);
    let g = sigma_gradient(p, q);
    let (xp, xq) = (killing_x(p), killing_x(q));
    let xf = fp * (contract(xp.vector, g) - contract(xq.vector, g));
    let div = xp.divergence + xq.divergence;
    let gammas = -xf - 0.25 * div * f;
    (gammas + 0.25 * div * (f + s * fp)).abs()
}

/// Wraps a closure as a field, for applying differential operators to test functions.
pub struct FieldFn<F>(pub F);

impl<F: Fn(SpacetimePoint) -> FieldSample> Field for FieldFn<F> {
    fn sample(&self, p: SpacetimePoint) -> FieldSample {
        (self.0)(p)
    }
}

/// (1 + t d_t + x . grad) phi.
pub fn z_apply(s: &impl Field, p: SpacetimePoint) -> f64 {
    let f = s.sample(p);
    f.value + p.t * f.dt + dot(p.x, f.grad)
}

/// Quadrature used for one evaluation of the symbol.
#[derive(Debug, Clone)]
pub struct SymbolQuadrature {
    pub sphere: SphereGrid,
    pub n_u: usize,
}

impl SymbolQuadrature {
    /// Resolves oscillations of frequency |k| on the sphere and along u.
    pub fn for_frequency(k_norm: f64) -> Result<Self> {
        let nt = 16 + (0.5 * k_norm).ceil() as usize;
        Ok(Self {
            sphere: sphere_grid(nt, 2 * nt)?,
            n_u: 10 + (3.0 * k_norm).ceil() as usize,
        })
    }
}

pub fn k_norm(k: [f64; 4]) -> f64 {
    k.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// b(p, k) = e^{-i <k, p>} \int dw \int_0^{u*} du e^{i (k0 u + u k.w)} g(p, w, u),
/// g = (2 pi)^-4 u [2 - (t + u)] [F_m + sigma F_m'].
pub fn symbol_b_with(p: SpacetimePoint, k: [f64; 4], m: f64, quad: &SymbolQuadrature) -> Result<Complex64> {
    if !crate::geometry::in_double_cone(p) {
        return Err(Error::OutsideCone { t: p.t, r: p.r() });
    }
    if m == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let q = gauss_legendre(quad.n_u, 0.0, 1.0)?;
    let kv: Vec3 = [k[1], k[2], k[3]];
    let parts: Vec<Result<Complex64>> = (0..quad.sphere.len())
        .into_par_iter()
        .map(|d| {
            let w = quad.sphere.directions[d];
            let us = u_star(p, w)?;
            let freq = k[0] + dot(kv, w);
            let mut acc = Complex64::new(0.0, 0.0);
            for (&x, &wx) in q.nodes.iter().zip(&q.weights) {
                let u = us * x;
                let s = sigma_distance(p, SpacetimePoint::on_cone(u, w));
                let (f, fp) = fm_eval(m, s);
                let g = u * (2.0 - (p.t + u)) * (f + s * fp);
                acc += Complex64::from_polar(wx * us * g, freq * u);
            }
            Ok(acc * quad.sphere.weights[d])
        })
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    for r in parts {
        total += r?;
    }
    let phase = -(k[0] * p.t + dot(kv, p.x));
    Ok(total * Complex64::from_polar((2.0 * PI).powi(-4), phase))
}

pub fn symbol_b(p: SpacetimePoint, k: [f64; 4], m: f64) -> Result<Complex64> {
    symbol_b_with(p, k, m, &SymbolQuadrature::for_frequency(k_norm(k))?)
}

/// Multi-indices of an x derivative (t, x1, x2, x3) and a k derivative (k0, k1, k2, k3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DerivativeOrder {
    pub alpha: [usize; 4],
    pub beta: [usize; 4],
}

impl DerivativeOrder {
    pub fn new(alpha: [usize; 4], beta: [usize; 4]) -> Self {
        Self { alpha, beta }
    }

    pub fn x_order(&self) -> usize {
        self.alpha.iter().sum()
    }

    pub fn k_order(&self) -> usize {
        self.beta.iter().sum()
    }

    /// Exponent predicted for the symbol class of order -1.
    pub fn expected_slope(&self) -> f64 {
        -1.0 + self.x_order() as f64 - self.k_order() as f64
    }
}

const FD_STEP: f64 = 1e-3;

fn fd_derivative(p: SpacetimePoint, k: [f64; 4], m: f64, quad: &SymbolQuadrature, ord: DerivativeOrder) -> Result<Complex64> {
    if let Some(i) = ord.alpha.iter().position(|&a| a > 0) {
        let mut o = ord;
        o.alpha[i] -= 1;
        let shift = |s: f64| {
            let mut q = p;
            if i == 0 {
                q.t += s;
            } else {
                q.x[i - 1] += s;
            }
            q
        };
        let a = fd_derivative(shift(FD_STEP), k, m, quad, o)?;
        let b = fd_derivative(shift(-FD_STEP), k, m, quad, o)?;
        return Ok((a - b) / (2.0 * FD_STEP));
    }
    if let Some(i) = ord.beta.iter().position(|&b| b > 0) {
        let mut o = ord;
        o.beta[i] -= 1;
        let (mut kp, mut km) = (k, k);
        kp[i] += FD_STEP;
        km[i] -= FD_STEP;
        let a = fd_derivative(p, kp, m, quad, o)?;
        let b = fd_derivative(p, km, m, quad, o)?;
        return Ok((a - b) / (2.0 * FD_STEP));
    }
    symbol_b_with(p, k, m, quad)
}

/// One row of a decay table.
#[derive(Debug, Clone, Serialize)]
pub struct SymbolSample {
    pub k_norm: f64,
    pub direction: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayFit {
    pub order: DerivativeOrder,
    pub slope: f64,
    pub residual: f64,
    pub table: Vec<SymbolSample>,
}

/// Log-spaced magnitudes between kmin and kmax.
pub fn k_samples(kmin: f64, kmax: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| kmin * (kmax / kmin).powf(i as f64 / (count - 1) as f64))
        .collect()
}

/// Fitted exponent of sup over directions of |d_x^alpha d_k^beta b| against |k|.
pub fn symbol_decay_fit(
    p: SpacetimePoint,
    m: f64,
    directions: &[[f64; 4]],
    k_range: (f64, f64),
    orders: &[DerivativeOrder],
    samples: usize,
) -> Result<Vec<DecayFit>> {
    if k_range.0 < 2.0 || k_range.1 <= k_range.0 || samples < 3 {
        return Err(Error::Config(format!("bad k range {:?}", k_range)));
    }
    let ks = k_samples(k_range.0, k_range.1, samples);
    let unit: Vec<[f64; 4]> = directions
        .iter()
        .map(|d| {
            let n = k_norm(*d);
            [d[0] / n, d[1] / n, d[2] / n, d[3] / n]
        })
        .collect();
    let quads: Vec<SymbolQuadrature> = ks.iter().map(|&k| SymbolQuadrature::for_frequency(k)).collect::<Result<_>>()?;
    orders
        .iter()
        .map(|&ord| {
            let mut table = Vec::new();
            let mut sup = Vec::new();
            for (kn, quad) in ks.iter().zip(&quads) {
                let mut best: f64 = 0.0;
                for (j, d) in unit.iter().enumerate() {
                    let k = [kn * d[0], kn * d[1], kn * d[2], kn * d[3]];
                    let v = fd_derivative(p, k, m, quad, ord)?.norm();
                    table.push(SymbolSample { k_norm: *kn, direction: j, value: v });
                    best = best.max(v);
                }
                sup.push(best);
            }
            let (slope, residual) = loglog_fit(&ks, &sup);
            if !residual.is_finite() || residual > 0.5 {
                return Err(Error::FitUnstable(residual));
            }
            Ok(DecayFit { order: ord, slope, residual, table })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{restrict_to_v, ConeGrid};
    use crate::bulk::{evaluate_solution, propagator_complex, Bump};
    use crate::modular::s_tau_massless_bulk;

    #[test]
    fn fm_series_and_bessel() {
        let (f, fp) = fm_eval(1.3, 0.0);
        assert!((f - 1.3f64.powi(2) / (8.0 * PI)).abs() < 1e-16);
        assert!((fp - 1.3f64.powi(4) / (64.0 * PI)).abs() < 1e-16);
        assert_eq!(fm_eval(0.0, 0.7), (0.0, 0.0));
        for i in 0..20 {
            let m = 0.2 + 0.1 * i as f64;
            let z = -3.5 + 0.37 * i as f64;
            let (f, fp) = fm_eval(m, z);
            let b = fm_bessel(m, z);
            assert!((f - b).abs() < 1e-10 * b.abs(), "m={m} z={z}");
            let h = 1e-5;
            let d = (fm_eval(m, z + h).0 - fm_eval(m, z - h).0) / (2.0 * h);
            assert!((fp - d).abs() < 1e-8 * fp.abs().max(1e-3));
        }
    }

    #[test]
    fn propagator_difference_is_the_kernel() {
        // p in the future of q, timelike separated
        let q = SpacetimePoint::on_cone(0.3, [0.0, 0.6, 0.8]);
        let p = SpacetimePoint::new(1.1, [0.1, 0.0, 0.2]);
        let s = sigma_distance(p, q);
        assert!(s < 0.0);
        for m in [0.5, 1.0, 2.0] {
            let e = 1e-9;
            let dm = propagator_complex(m, Complex64::new(p.t, -e), p.x, q).unwrap();
            let d0 = propagator_complex(0.0, Complex64::new(p.t, -e), p.x, q).unwrap();
            let diff = dm - d0;
            let f = fm_eval(m, s).0;
            assert!((diff.re - f).abs() < 1e-6 * f, "m={m} {diff} {f}");
        }
    }

    fn probes() -> Vec<SpacetimePoint> {
        vec![
            SpacetimePoint::new(1.0, [0.1, -0.1, 0.2]),
            SpacetimePoint::new(0.8, [0.2, 0.1, 0.0]),
            SpacetimePoint::new(1.3, [-0.1, 0.0, 0.15]),
        ]
    }

    #[test]
    fn mass_correction_matches_reconstructions() {
        let g = ConeGrid::with_panels(8, 12, 8, 16).unwrap();
        let phi = BoundaryData::from_fn(g.clone(), |w, u| u * (1.0 - u).powi(3) * (1.0 + 0.2 * w[0]));
        let pts = probes();
        let a = crate::goursat::goursat_solve_regularized(&phi, &GoursatSpec::new(1.0, g.clone()).unwrap(), &pts).unwrap();
        let b = goursat_solve(&phi, &GoursatSpec::new(0.0, g.clone()).unwrap(), &pts).unwrap();
        for (i, p) in pts.iter().enumerate() {
            let c = mass_correction(&phi, 1.0, *p).unwrap();
            assert!((a[i] - b[i] - c).abs() < 1e-6, "{} {}", a[i] - b[i], c);
        }
    }

    #[test]
    fn generator_pieces() {
        let z = KgSolution::zero(1.0);
        let p = SpacetimePoint::new(1.1, [0.1, 0.0, -0.2]);
        assert_eq!(gamma_x(&z, p), 0.0);
        let b = Bump::new([0.1, 0.0, -0.1], 0.45, 1.0, 0.4).unwrap();
        let s = KgSolution::from_bumps(0.0, vec![b]).unwrap();
        // the vector term vanishes at the tip
        let tip = SpacetimePoint::new(2.0, [0.0; 3]);
        let v = evaluate_solution(&s, tip);
        assert!((gamma_x(&s, tip) + v).abs() < 1e-12);
        let g0 = gamma_x(&s, p);
        let mut errs = Vec::new();
        for h in [1e-2, 5e-3, 2.5e-3] {
            let fd = (s_tau_massless_bulk(&s, h, p).unwrap() - evaluate_solution(&s, p)) / h;
            errs.push((fd - g0).abs());
        }
        let (slope, _) = loglog_fit(&[1e-2, 5e-3, 2.5e-3], &errs);
        assert!((slope - 1.0).abs() < 0.2, "{errs:?}");
        let g = ConeGrid::with_panels(8, 12, 4, 8).unwrap();
        let phi = BoundaryData::from_fn(g.clone(), |_, u| u * (1.0 - u).powi(3));
        assert_eq!(delta_diff(&phi, 0.0, p).unwrap(), 0.0);
        assert_eq!(delta_diff(&BoundaryData::zero(g.clone()), 1.0, p).unwrap(), 0.0);
        let c = phi.combine(2.0, &BoundaryData::from_fn(g.clone(), |w, u| u * u * (1.0 - u).powi(2) * w[1]), -1.0).unwrap();
        let a1 = delta_diff(&phi, 1.0, p).unwrap();
        let a2 = delta_diff(&BoundaryData::from_fn(g.clone(), |w, u| u * u * (1.0 - u).powi(2) * w[1]), 1.0, p).unwrap();
        let ac = delta_diff(&c, 1.0, p).unwrap();
        assert!((ac - (2.0 * a1 - a2)).abs() < 1e-10 * ac.abs().max(1e-6));
    }

    #[test]
    fn full_generator_against_flow_difference() {
        let g = ConeGrid::with_panels(16, 16, 12, 24).unwrap();
        let b = Bump::new([0.05, 0.1, 0.0], 0.4, 1.0, -0.5).unwrap();
        let s = KgSolution::from_bumps(1.0, vec![b]).unwrap();
        let phi = restrict_to_v(&s, &g);
        let p = probes()[0];
        let d = delta_m(&s, &phi, p).unwrap();
        let fd = flow_central_difference(&phi, 1.0, 0.05, &[p]).unwrap()[0];
        assert!((d - fd).abs() < 1e-2 * d.abs().max(phi.max_ratio_to_u()), "{d} {fd}");
    }

    #[test]
    fn z_on_cone_and_constant() {
        let one = FieldFn(|_p: SpacetimePoint| FieldSample { value: 1.0, dt: 0.0, grad: [0.0; 3] });
        assert_eq!(z_apply(&one, SpacetimePoint::new(0.7, [0.1, 0.2, 0.0])), 1.0);
        assert_eq!(z_apply(&KgSolution::zero(0.5), SpacetimePoint::new(1.0, [0.0; 3])), 0.0);
        let g = ConeGrid::with_panels(96, 16, 2, 4).unwrap();
        let b = Bump::new([0.1, -0.1, 0.0], 0.45, 1.0, 0.3).unwrap();
        let s = KgSolution::from_bumps(0.5, vec![b]).unwrap();
        let phi = restrict_to_v(&s, &g);
        let d = phi.derivative();
        let n = g.n_u();
        let w = g.sphere.directions[3];
        for (i, &u) in g.u.nodes.iter().enumerate().step_by(7) {
            let z = z_apply(&s, SpacetimePoint::on_cone(u, w));
            assert!((z - d[3 * n + i]).abs() < 1e-6, "u={u} {z} {}", d[3 * n + i]);
        }
    }

    #[test]
    fn conformal_kernel_identity() {
        let p = SpacetimePoint::new(1.2, [0.1, -0.2, 0.3]);
        let q = SpacetimePoint::new(0.7, [-0.2, 0.1, 0.05]);
        assert!(conformal_kernel_residual(1.0, p, q) < 1e-12);
    }

    #[test]
    fn symbol_at_zero_frequency() {
        let p = SpacetimePoint::new(1.1, [0.1, 0.0, -0.1]);
        assert_eq!(symbol_b(p, [1.0, 2.0, 0.0, 0.0], 0.0).unwrap(), Complex64::new(0.0, 0.0));
        let a = symbol_b(p, [0.0; 4], 1.0).unwrap();
        let fine = SymbolQuadrature { sphere: sphere_grid(24, 48).unwrap(), n_u: 40 };
        let b = symbol_b_with(p, [0.0; 4], 1.0, &fine).unwrap();
        assert!(a.im.abs() < 1e-15 && (a.re - b.re).abs() < 1e-12 * b.re.abs(), "{a} {b}");
        let out = SpacetimePoint::new(0.1, [0.5, 0.0, 0.0]);
        assert!(symbol_b(out, [0.0; 4], 1.0).is_err());
    }
}
