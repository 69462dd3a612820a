//! Boundary data on the null cone V, its symplectic form, and the boundary
//! two-point function in three representations: the regularized kernel, the
//! null-momentum representation and the log-coordinate (h) representation.

use crate::bulk::{evaluate_solution, KgSolution};
use crate::error::{Error, Result};
use crate::geometry::SpacetimePoint;
use crate::numerics::extrapolate::{eps_extrapolate, EpsSchedule};
use crate::numerics::fourier::fourier_uniform;
use crate::numerics::interp::PiecewiseBarycentric;
use crate::numerics::quadrature::{composite, sphere_grid, Quadrature1D, SphereGrid};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

/// Sphere grid times composite Gauss panels on u in [0, 1], with cached operators.
#[derive(Debug)]
pub struct ConeGrid {
    pub sphere: SphereGrid,
    pub u: Quadrature1D,
    pub interp: PiecewiseBarycentric,
    krule: OnceLock<KRule>,
}

impl PartialEq for ConeGrid {
    fn eq(&self, o: &Self) -> bool {
        self.sphere == o.sphere && self.u == o.u
    }
}

impl ConeGrid {
    /// A single Gauss panel of `n_u` nodes.
    pub fn new(n_u: usize, n_theta: usize, n_phi: usize) -> Result<Arc<Self>> {
        Self::with_panels(1, n_u, n_theta, n_phi)
    }

    /// `panels` equal panels of `per_panel` Gauss nodes each.
    pub fn with_panels(panels: usize, per_panel: usize, n_theta: usize, n_phi: usize) -> Result<Arc<Self>> {
        if panels == 0 || per_panel < 2 {
            return Err(Error::InvalidInterval { n: per_panel, a: 0.0, b: 1.0 });
        }
        let breaks: Vec<f64> = (0..=panels).map(|i| i as f64 / panels as f64).collect();
        let u = composite(&breaks, per_panel)?;
        let interp = PiecewiseBarycentric::new(&breaks, &u, per_panel);
        Ok(Arc::new(Self {
            sphere: sphere_grid(n_theta, n_phi)?,
            u,
            interp,
            krule: OnceLock::new(),
        }))
    }

    /// 24 panels of 16 Gauss nodes in u, 48 x 96 directions. Resolves restricted
    /// bump data well enough for 1e-6 symplectic comparisons.
    pub fn default_grid() -> Arc<Self> {
        Self::with_panels(24, 16, 48, 96).expect("valid default")
    }

    /// 16 panels of 16 nodes, 16 x 32 directions, for comparisons made entirely on V.
    pub fn coarse_grid() -> Arc<Self> {
        Self::with_panels(16, 16, 16, 32).expect("valid default")
    }

    pub fn n_u(&self) -> usize {
        self.u.len()
    }

    pub fn n_dir(&self) -> usize {
        self.sphere.len()
    }

    /// d/du of samples on the u nodes.
    pub fn differentiate(&self, ray: &[f64]) -> Vec<f64> {
        self.interp.differentiate(ray)
    }

    /// Interpolated value of a ray at u.
    pub fn eval(&self, ray: &[f64], u: f64) -> f64 {
        self.interp.eval(ray, u)
    }

    fn krule(&self) -> &KRule {
        self.krule.get_or_init(|| KRule::new(&self.u))
    }
}

/// Samples of Phi(omega, u) = u phi(u, u omega), direction-major.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    pub grid: Arc<ConeGrid>,
    pub values: Vec<f64>,
    pub support_cap: f64,
}

impl BoundaryData {
    pub fn from_values(grid: Arc<ConeGrid>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.n_u() * grid.n_dir());
        let support_cap = detect_cap(&grid, &values);
        Self {
            grid,
            values,
            support_cap,
        }
    }

    pub fn from_fn<F: Fn([f64; 3], f64) -> f64 + Sync>(grid: Arc<ConeGrid>, f: F) -> Self {
        let nu = grid.n_u();
        let values: Vec<f64> = (0..grid.n_dir())
            .into_par_iter()
            .flat_map_iter(|d| {
                let w = grid.sphere.directions[d];
                let f = &f;
                grid.u.nodes.iter().map(move |&u| f(w, u)).collect::<Vec<_>>()
            })
            .collect();
        debug_assert_eq!(values.len(), nu * grid.n_dir());
        Self::from_values(grid, values)
    }

    pub fn zero(grid: Arc<ConeGrid>) -> Self {
        let n = grid.n_u() * grid.n_dir();
        Self::from_values(grid, vec![0.0; n])
    }

    pub fn ray(&self, d: usize) -> &[f64] {
        let n = self.grid.n_u();
        &self.values[d * n..(d + 1) * n]
    }

    /// d/du Phi on every ray.
    pub fn derivative(&self) -> Vec<f64> {
        let n = self.grid.n_u();
        (0..self.grid.n_dir())
            .flat_map(|d| self.grid.differentiate(&self.values[d * n..(d + 1) * n]))
            .collect()
    }

    pub fn combine(&self, a: f64, other: &BoundaryData, b: f64) -> Result<BoundaryData> {
        same_grid(self, other)?;
        let v = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(Self::from_values(self.grid.clone(), v))
    }

    pub fn scaled(&self, c: f64) -> BoundaryData {
        Self::from_values(self.grid.clone(), self.values.iter().map(|v| c * v).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// sup |Phi / u| over the grid.
    pub fn max_ratio_to_u(&self) -> f64 {
        let n = self.grid.n_u();
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| (v / self.grid.u.nodes[i % n]).abs())
            .fold(0.0, f64::max)
    }
}

fn detect_cap(grid: &ConeGrid, values: &[f64]) -> f64 {
    let n = grid.n_u();
    let tol = 1e-14 * values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut last = None;
    for d in 0..grid.n_dir() {
        for i in (0..n).rev() {
            if values[d * n + i].abs() > tol {
                last = Some(last.map_or(i, |l: usize| l.max(i)));
                break;
            }
        }
    }
    match last {
        None => 0.0,
        Some(i) if i + 1 < n => grid.u.nodes[i + 1],
        Some(_) => 1.0,
    }
}

fn same_grid(a: &BoundaryData, b: &BoundaryData) -> Result<()> {
    if Arc::ptr_eq(&a.grid, &b.grid) || a.grid == b.grid {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// Phi(omega, u) = u phi(u, u omega) on the cone grid.
pub fn restrict_to_v(s: &KgSolution, grid: &Arc<ConeGrid>) -> BoundaryData {
    BoundaryData::from_fn(grid.clone(), |w, u| {
        u * evaluate_solution(s, SpacetimePoint::on_cone(u, w))
    })
}

/// \int dw \int du (Phi2 d_u Phi1 - Phi1 d_u Phi2).
pub fn sigma_boundary(p1: &BoundaryData, p2: &BoundaryData) -> Result<f64> {
    same_grid(p1, p2)?;
    let g = &p1.grid;
    let n = g.n_u();
    Ok((0..g.n_dir())
        .into_par_iter()
        .map(|d| {
            let a = p1.ray(d);
            let b = p2.ray(d);
            let da = g.differentiate(a);
            let db = g.differentiate(b);
            let s: f64 = (0..n).map(|i| g.u.weights[i] * (b[i] * da[i] - a[i] * db[i])).sum();
            g.sphere.weights[d] * s
        })
        .sum())
}

/// Momentum nodes on [0, K] and the phase table e^{i k u_j}.
#[derive(Debug)]
struct KRule {
    k: Vec<f64>,
    w: Vec<f64>,
    phase: Vec<Complex64>,
    k_cut: f64,
}

impl KRule {
    fn new(u: &Quadrature1D) -> Self {
        let n = u.len();
        // the Gauss rule integrates e^{iku} Phi reliably up to roughly k ~ n
        let k_cut = (1.15 * n as f64).round().max(8.0);
        let panels = (k_cut / 2.0).ceil() as usize;
        let breaks: Vec<f64> = (0..=panels).map(|i| k_cut * i as f64 / panels as f64).collect();
        let q = composite(&breaks, 12).expect("valid rule");
        let mut phase = Vec::with_capacity(q.len() * n);
        for &k in &q.nodes {
            for (&uj, &wj) in u.nodes.iter().zip(&u.weights) {
                phase.push(Complex64::from_polar(wj / (2.0 * PI).sqrt(), k * uj));
            }
        }
        Self {
            k: q.nodes,
            w: q.weights,
            phase,
            k_cut,
        }
    }
}

/// Phi_hat(omega, k) = (2 pi)^{-1/2} \int_0^1 e^{iku} Phi du for k in [0, K],
/// with the endpoint derivatives Phi'(0) .. Phi''''(0) per direction
/// for the analytic large-k tail.
#[derive(Debug, Clone)]
pub struct BoundarySpectrum {
    pub k: Vec<f64>,
    pub k_weights: Vec<f64>,
    pub k_cut: f64,
    pub values: Vec<Complex64>,
    pub endpoint: Vec<[f64; 4]>,
    pub sphere_weights: Vec<f64>,
}

impl BoundarySpectrum {
    pub fn at(&self, d: usize) -> &[Complex64] {
        let n = self.k.len();
        &self.values[d * n..(d + 1) * n]
    }

    /// a * self + b * other; the transform is linear in the data.
    pub fn combine(&self, a: f64, other: &BoundarySpectrum, b: f64) -> Result<BoundarySpectrum> {
        if self.k != other.k || self.sphere_weights != other.sphere_weights {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(x, y)| x * a + y * b).collect();
        let endpoint = self
            .endpoint
            .iter()
            .zip(&other.endpoint)
            .map(|(x, y)| [0, 1, 2, 3].map(|i| a * x[i] + b * y[i]))
            .collect();
        Ok(BoundarySpectrum { values, endpoint, ..self.clone() })
    }
}

pub fn k_transform(p: &BoundaryData) -> BoundarySpectrum {
    let g = &p.grid;
    let kr = g.krule();
    let nu = g.n_u();
    let nk = kr.k.len();
    let (zo, zero_row) = g.interp.row(0.0);
    let per_dir: Vec<(Vec<Complex64>, [f64; 4])> = (0..g.n_dir())
        .into_par_iter()
        .map(|d| {
            let ray = p.ray(d);
            let spec: Vec<Complex64> = (0..nk)
                .map(|ik| {
                    let row = &kr.phase[ik * nu..(ik + 1) * nu];
                    row.iter().zip(ray).map(|(ph, v)| ph * v).sum()
                })
                .collect();
            let d1 = g.differentiate(ray);
            let d2 = g.differentiate(&d1);
            let d3 = g.differentiate(&d2);
            let d4 = g.differentiate(&d3);
            let at0 = |v: &[f64]| zero_row.iter().zip(&v[zo..]).map(|(a, b)| a * b).sum::<f64>();
            (spec, [at0(&d1), at0(&d2), at0(&d3), at0(&d4)])
        })
        .collect();
    let mut values = Vec::with_capacity(nk * g.n_dir());
    let mut endpoint = Vec::with_capacity(g.n_dir());
    for (s, e) in per_dir {
        values.extend(s);
        endpoint.push(e);
    }
    BoundarySpectrum {
        k: kr.k.clone(),
        k_weights: kr.w.clone(),
        k_cut: kr.k_cut,
        values,
        endpoint,
        sphere_weights: g.sphere.weights.clone(),
    }
}

/// \int dw \int_0^inf 2k conj(Phi1_hat) Phi2_hat dk, unrealified.
pub fn kspace_product_spectra(a: &BoundarySpectrum, b: &BoundarySpectrum) -> Complex64 {
    let kc = a.k_cut;
    let mut acc = Complex64::new(0.0, 0.0);
    for d in 0..a.sphere_weights.len() {
        let (x, y) = (a.at(d), b.at(d));
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..a.k.len() {
            s += x[i].conj() * y[i] * (2.0 * a.k[i] * a.k_weights[i]);
        }
        // Phi_hat ~ (2 pi)^{-1/2} (-a/k^2 - i b/k^3 + c/k^4 + i e/k^5) past the cut
        let [a1, b1, c1, e1] = a.endpoint[d];
        let [a2, b2, c2, e2] = b.endpoint[d];
        let re = a1 * a2 / (2.0 * kc * kc) + (b1 * b2 - a1 * c2 - c1 * a2) / (4.0 * kc.powi(4));
        let im = (a1 * b2 - a2 * b1) / (3.0 * kc.powi(3))
            + (b1 * c2 - c1 * b2 + e1 * a2 - a1 * e2) / (5.0 * kc.powi(5));
        s += Complex64::new(re, im) / PI;
        acc += s * a.sphere_weights[d];
    }
    acc
}

pub fn kspace_product(p1: &BoundaryData, p2: &BoundaryData) -> Result<Complex64> {
    same_grid(p1, p2)?;
    Ok(kspace_product_spectra(&k_transform(p1), &k_transform(p2)))
}

/// Real part of the null-momentum representation.
pub fn mu_lambda_kspace(p1: &BoundaryData, p2: &BoundaryData) -> Result<f64> {
    Ok(kspace_product(p1, p2)?.re)
}

/// Per-eps values of -(1/pi) \int dw du du' Phi1(u) Phi2(u') / (u - u' - i eps)^2.
pub fn kernel_product_samples(p1: &BoundaryData, p2: &BoundaryData, eps: &[f64]) -> Result<Vec<Complex64>> {
    same_grid(p1, p2)?;
    let g = &p1.grid;
    let n = g.n_u();
    let u = &g.u.nodes;
    let w = &g.u.weights;
    let per_dir: Vec<Vec<Complex64>> = (0..g.n_dir())
        .into_par_iter()
        .map(|d| {
            let a = p1.ray(d);
            let b = p2.ray(d);
            if a.iter().all(|v| *v == 0.0) || b.iter().all(|v| *v == 0.0) {
                return vec![Complex64::new(0.0, 0.0); eps.len()];
            }
            let db = g.differentiate(b);
            let ddb = g.differentiate(&db);
            eps.iter()
                .map(|&e| {
                    let ie = Complex64::new(0.0, e);
                    let mut tot = Complex64::new(0.0, 0.0);
                    for i in 0..n {
                        if a[i] == 0.0 {
                            continue;
                        }
                        let ui = u[i];
                        let mut j_acc = Complex64::new(0.0, 0.0);
                        for j in 0..n {
                            let r = if i == j {
                                Complex64::new(0.5 * ddb[i], 0.0)
                            } else {
                                let num = b[j] - b[i] - (u[j] - ui) * db[i];
                                let den = Complex64::new(ui - u[j], 0.0) - ie;
                                num / (den * den)
                            };
                            j_acc += r * w[j];
                        }
                        let z1 = Complex64::new(ui - 1.0, -e);
                        let z0 = Complex64::new(ui, -e);
                        let big_a = z1.inv() - z0.inv();
                        let big_c = z1.ln() - z0.ln() - ie * big_a;
                        j_acc += big_a * b[i] + big_c * db[i];
                        tot += j_acc * (w[i] * a[i]);
                    }
                    tot * (-1.0 / PI) * g.sphere.weights[d]
                })
                .collect()
        })
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); eps.len()];
    for v in per_dir {
        for (o, x) in out.iter_mut().zip(v) {
            *o += x;
        }
    }
    Ok(out)
}

/// Kernel representation: eps-extrapolated, complex. Returns (value, error estimate).
pub fn kernel_product(p1: &BoundaryData, p2: &BoundaryData, sched: &EpsSchedule) -> Result<(Complex64, f64)> {
    let vals = kernel_product_samples(p1, p2, &sched.eps_values)?;
    let samples: Vec<(f64, Complex64)> = sched.eps_values.iter().copied().zip(vals).collect();
    eps_extrapolate(&samples, sched)
}

/// Default regularization schedule for the kernel representation on `grid`.
pub fn kernel_schedule(grid: &ConeGrid) -> EpsSchedule {
    EpsSchedule::for_spacing(1.0 / grid.n_u() as f64)
}

/// Real part of the kernel representation; fails when the extrapolation
/// spread exceeds `1e-6` relative to the value.
pub fn mu_lambda_kernel(p1: &BoundaryData, p2: &BoundaryData, sched: &EpsSchedule) -> Result<f64> {
    let (v, err) = kernel_product(p1, p2, sched)?;
    let tol = 1e-6 * v.norm().max(1e-12);
    if err > tol {
        return Err(Error::ExtrapolationUnstable { estimate: err, tolerance: tol });
    }
    Ok(v.re)
}

/// Thermal weight 2h / (1 - e^{-2 pi h}) multiplied by e^{-c h}, evaluated stably.
pub fn thermal_weight(h: f64, c: f64) -> f64 {
    if h == 0.0 {
        return 1.0 / PI;
    }
    let a = h.abs();
    let base = 2.0 * a / (-(-2.0 * PI * a).exp_m1());
    if h > 0.0 {
        base * (-c * h).exp()
    } else {
        base * ((c - 2.0 * PI) * a).exp()
    }
}

/// The weight of the h representation.
pub fn m_weight(h: f64) -> f64 {
    thermal_weight(h, 0.0)
}

/// Uniform grid in l = ln(u / (1 - u)) and the interpolation rows onto it.
#[derive(Debug, Clone)]
pub struct LogGridSpec {
    pub half_width: f64,
    pub n: usize,
    pub padding: usize,
    pub h_max: f64,
}

impl Default for LogGridSpec {
    fn default() -> Self {
        Self {
            half_width: 24.0,
            n: 4096,
            padding: 4096,
            h_max: 150.0,
        }
    }
}

/// Phi_tilde(omega, h) = (2 pi)^{-1/2} \int e^{ihl} Phi(omega, u(l)) dl.
#[derive(Debug, Clone)]
pub struct HSpectrum {
    pub h: Vec<f64>,
    pub dh: f64,
    pub values: Vec<Complex64>,
    pub sphere_weights: Vec<f64>,
}

impl HSpectrum {
    pub fn at(&self, d: usize) -> &[Complex64] {
        let n = self.h.len();
        &self.values[d * n..(d + 1) * n]
    }

    pub fn map_phase<F: Fn(f64) -> Complex64>(&self, f: F) -> HSpectrum {
        let n = self.h.len();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| v * f(self.h[i % n]))
            .collect();
        HSpectrum { values, ..self.clone() }
    }

    /// \int dw dh weight(h) conj(self) other.
    pub fn weighted_product<F: Fn(f64) -> f64>(&self, other: &HSpectrum, weight: F) -> Complex64 {
        let n = self.h.len();
        let wts: Vec<f64> = self.h.iter().map(|&h| weight(h) * self.dh).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for d in 0..self.sphere_weights.len() {
            let (a, b) = (self.at(d), other.at(d));
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..n {
                s += a[i].conj() * b[i] * wts[i];
            }
            acc += s * self.sphere_weights[d];
        }
        acc
    }
}

pub fn ell_resample(p: &BoundaryData, spec: &LogGridSpec) -> Result<HSpectrum> {
    let g = &p.grid;
    let dl = 2.0 * spec.half_width / (spec.n - 1) as f64;
    let l0 = -spec.half_width;
    // beyond the detected cap the data vanish; the interpolant would only add noise there
    let rows: Vec<Option<(usize, Vec<f64>)>> = (0..spec.n)
        .map(|i| {
            let l = l0 + i as f64 * dl;
            let u = 1.0 / (1.0 + (-l).exp());
            (u < p.support_cap).then(|| {
                let (o, mut r) = g.interp.row(u);
                // near the apex interpolate Phi/u, which stays finite, so samples vanish like u
                if o == 0 {
                    for (w, x) in r.iter_mut().zip(&g.u.nodes) {
                        *w *= u / x;
                    }
                }
                (o, r)
            })
        })
        .collect();
    let peak = p.max_abs();
    let per_dir: Vec<Result<(Vec<f64>, Vec<Complex64>)>> = (0..g.n_dir())
        .into_par_iter()
        .map(|d| {
            let ray = p.ray(d);
            let samples: Vec<Complex64> = rows
                .iter()
                .map(|r| match r {
                    Some((o, r)) => Complex64::new(r.iter().zip(&ray[*o..]).map(|(a, b)| a * b).sum(), 0.0),
                    None => Complex64::new(0.0, 0.0),
                })
                .collect();
            let edge = samples[0].re.abs().max(samples[spec.n - 1].re.abs());
            if peak > 0.0 && edge > 1e-8 * peak {
                return Err(Error::ResampleFailure(edge / peak));
            }
            let s = fourier_uniform(l0, dl, &samples, spec.padding);
            let keep: Vec<usize> = (0..s.k.len()).filter(|&i| s.k[i].abs() <= spec.h_max).collect();
            Ok((keep.iter().map(|&i| s.k[i]).collect(), keep.iter().map(|&i| s.values[i]).collect()))
        })
        .collect();
    let mut h = Vec::new();
    let mut values = Vec::with_capacity(g.n_dir() * 1024);
    for r in per_dir {
        let (hh, v) = r?;
        if h.is_empty() {
            h = hh;
        }
        values.extend(v);
    }
    let n_tot = spec.n + spec.padding;
    Ok(HSpectrum {
        h,
        dh: 2.0 * PI / (n_tot as f64 * dl),
        values,
        sphere_weights: g.sphere.weights.clone(),
    })
}

/// \int dw dh m(h) conj(Phi1_tilde) Phi2_tilde, unrealified.
pub fn hspace_product(a: &HSpectrum, b: &HSpectrum) -> Complex64 {
    a.weighted_product(b, m_weight)
}

pub fn mu_lambda_hspace(p1: &BoundaryData, p2: &BoundaryData) -> Result<f64> {
    same_grid(p1, p2)?;
    let spec = LogGridSpec::default();
    Ok(hspace_product(&ell_resample(p1, &spec)?, &ell_resample(p2, &spec)?).re)
}

/// exp(-mu(Phi, Phi)/2) with the momentum representation.
pub fn weyl_expectation_lambda(p: &BoundaryData) -> Result<f64> {
    Ok((-0.5 * mu_lambda_kspace(p, p)?).exp())
}

/// Both sides of lambda(W(Phi1) W(Phi2)) = e^{i sigma/2} lambda(W(Phi1 + Phi2)):
/// (bilinear expansion, direct evaluation on the sum).
pub fn weyl_product_check(p1: &BoundaryData, p2: &BoundaryData) -> Result<(Complex64, Complex64)> {
    let s = sigma_boundary(p1, p2)?;
    let phase = Complex64::from_polar(1.0, 0.5 * s);
    let m11 = mu_lambda_kspace(p1, p1)?;
    let m22 = mu_lambda_kspace(p2, p2)?;
    let m12 = mu_lambda_kspace(p1, p2)?;
    let lhs = phase * (-0.5 * (m11 + m22) - m12).exp();
    let sum = p1.combine(1.0, p2, 1.0)?;
    let rhs = phase * weyl_expectation_lambda(&sum)?;
    Ok((lhs, rhs))
}

/// One-dimensional test family for the regulator-independence lemma.
pub struct SochockijFamily {
    pub name: &'static str,
    pub interval: (f64, f64),
    pub root: f64,
    pub f: fn(f64) -> f64,
    pub h: fn(f64) -> f64,
    pub g: fn(f64) -> f64,
}

pub fn sochockij_families() -> Vec<SochockijFamily> {
    fn f1(x: f64) -> f64 {
        x
    }
    fn h1(x: f64) -> f64 {
        2.0 + x.sin()
    }
    fn g1(x: f64) -> f64 {
        (-x * x / 0.5).exp()
    }
    fn f2(x: f64) -> f64 {
        x + 0.3 * x * x
    }
    fn h2(x: f64) -> f64 {
        1.0 + x * x
    }
    fn g2(x: f64) -> f64 {
        (-(x - 0.4) * (x - 0.4) / 0.3).exp()
    }
    const LP: f64 = 0.3;
    fn f3(l: f64) -> f64 {
        (0.5 * (l - LP)).sinh()
    }
    fn h3(l: f64) -> f64 {
        (0.5 * l).cosh() * (0.5 * LP).cosh()
    }
    fn g3(l: f64) -> f64 {
        (-(l - 0.1) * (l - 0.1) / 2.0).exp()
    }
    vec![
        SochockijFamily { name: "linear", interval: (-8.0, 8.0), root: 0.0, f: f1, h: h1, g: g1 },
        SochockijFamily { name: "quadratic", interval: (-2.0, 3.0), root: 0.0, f: f2, h: h2, g: g2 },
        SochockijFamily { name: "sinh-cosh", interval: (-12.0, 12.0), root: LP, f: f3, h: h3, g: g3 },
    ]
}

/// Extrapolated \int g/(f + i eps h)^2 and \int g/(f + i eps)^2.
pub fn sochockij_compare(fam: &SochockijFamily, sched: &EpsSchedule) -> Result<(Complex64, Complex64)> {
    let eps_min = *sched.eps_values.last().unwrap();
    let (a, b) = fam.interval;
    let x0 = fam.root;
    let hmin = 0.05 * eps_min;
    let mut breaks: Vec<f64> = crate::numerics::quadrature::graded_breaks_toward_left(x0, b, hmin);
    let left: Vec<f64> = crate::numerics::quadrature::graded_breaks_toward_left(-x0, -a, hmin)
        .into_iter()
        .map(|x| -x)
        .rev()
        .collect();
    let mut all = left;
    all.pop();
    all.append(&mut breaks);
    let q = composite(&all, 16)?;
    let run = |with_h: bool| -> Result<Complex64> {
        let samples: Vec<(f64, Complex64)> = sched
            .eps_values
            .iter()
            .map(|&e| {
                let v: Complex64 = q
                    .nodes
                    .iter()
                    .zip(&q.weights)
                    .map(|(&x, &w)| {
                        let reg = if with_h { e * (fam.h)(x) } else { e };
                        let den = Complex64::new((fam.f)(x), reg);
                        (den * den).inv() * (w * (fam.g)(x))
                    })
                    .sum();
                (e, v)
            })
            .collect();
        Ok(eps_extrapolate(&samples, sched)?.0)
    };
    Ok((run(true)?, run(false)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bulk::{sigma_bulk, Bump, DiscGrid};

    fn grid() -> Arc<ConeGrid> {
        ConeGrid::new(96, 8, 16).unwrap()
    }

    fn smooth_pair(g: &Arc<ConeGrid>) -> (BoundaryData, BoundaryData) {
        let chi = |w: [f64; 3]| 1.0 + 0.3 * w[0] - 0.2 * w[2] * w[1];
        let p1 = BoundaryData::from_fn(g.clone(), move |w, u| u * (1.0 - u).powi(4) * chi(w) * (1.0 + u));
        let p2 = BoundaryData::from_fn(g.clone(), move |w, u| {
            u * (1.0 - u).powi(4) * (1.0 - 0.5 * w[1]) * (2.0 - 3.0 * u + u * u)
        });
        (p1, p2)
    }

    #[test]
    fn sigma_closed_form() {
        // Phi2 = u Phi1 with Phi1 = u(1-u)^2 chi: per ray \int (Phi2 Phi1' - Phi1 Phi2') = -\int Phi1^2 = -1/105
        let g = grid();
        let chi = |w: [f64; 3]| (1.0 + w[2]).powi(2);
        let p1 = BoundaryData::from_fn(g.clone(), move |w, u| u * (1.0 - u).powi(2) * chi(w));
        let p2 = BoundaryData::from_fn(g.clone(), move |w, u| u * u * (1.0 - u).powi(2) * chi(w));
        // \int chi^2 dw = 2pi \int (1+z)^4 dz = 2pi 32/5
        let want = -1.0 / 105.0 * 2.0 * PI * 32.0 / 5.0;
        let got = sigma_boundary(&p1, &p2).unwrap();
        assert!((got - want).abs() < 1e-12, "{got} {want}");
        assert_eq!(sigma_boundary(&p1, &p1).unwrap(), 0.0);
        assert!((sigma_boundary(&p2, &p1).unwrap() + got).abs() < 1e-14);
    }

    #[test]
    fn restriction_basics() {
        let g = grid();
        let z = restrict_to_v(&KgSolution::zero(1.0), &g);
        assert!(z.values.iter().all(|v| *v == 0.0));
        let b = Bump::new([0.1, 0.0, 0.2], 0.4, 1.0, 0.5).unwrap();
        let s = KgSolution::from_bumps(0.5, vec![b]).unwrap();
        let p = restrict_to_v(&s, &g);
        assert!(p.support_cap < 1.0 && p.support_cap > 0.0);
        assert!(p.max_ratio_to_u().is_finite());
        // linearity
        let s2 = s.scaled(-2.0);
        let p2 = restrict_to_v(&s2, &g);
        for (a, b) in p.values.iter().zip(&p2.values) {
            assert!((b + 2.0 * a).abs() < 1e-13);
        }
    }

    #[test]
    fn kspace_parseval_and_reality() {
        let g = grid();
        let (p1, _) = smooth_pair(&g);
        let sp = k_transform(&p1);
        for d in [0usize, 7, 33] {
            let ray = p1.ray(d);
            let lhs: f64 = g.u.weights.iter().zip(ray).map(|(w, v)| w * v * v).sum();
            let s = sp.at(d);
            let [a, b, c, _] = sp.endpoint[d];
            let body: f64 = (0..sp.k.len()).map(|i| sp.k_weights[i] * s[i].norm_sqr()).sum();
            // full line = twice the half line for real Phi, plus the a^2/k^4 tail
            let kc = sp.k_cut;
            let tail = (a * a / (3.0 * kc.powi(3)) + (b * b - 2.0 * a * c) / (5.0 * kc.powi(5))) / (2.0 * PI);
            let rhs = 2.0 * (body + tail);
            assert!((lhs - rhs).abs() < 1e-8 * lhs, "{lhs} {rhs}");
        }
        // reality on the full line: Phi_hat(-k) = conj Phi_hat(k) by direct evaluation
        let ray = p1.ray(3);
        let k = 7.3;
        let f = |k: f64| -> Complex64 {
            g.u.nodes.iter().zip(&g.u.weights).zip(ray).map(|((&u, &w), &v)| Complex64::from_polar(w * v, k * u)).sum()
        };
        assert!((f(-k) - f(k).conj()).norm() < 1e-15);
    }

    #[test]
    fn imaginary_part_is_minus_half_sigma() {
        let g = grid();
        let (p1, p2) = smooth_pair(&g);
        let c = kspace_product(&p1, &p2).unwrap();
        let s = sigma_boundary(&p1, &p2).unwrap();
        assert!((-2.0 * c.im - s).abs() < 1e-8 * s.abs(), "{} {}", -2.0 * c.im, s);
        assert!(mu_lambda_kspace(&p1, &p1).unwrap() > 0.0);
        assert_eq!(mu_lambda_kspace(&p1, &BoundaryData::zero(g.clone())).unwrap(), 0.0);
    }

    #[test]
    fn three_representations_agree() {
        let g = grid();
        let (p1, p2) = smooth_pair(&g);
        let k = mu_lambda_kspace(&p1, &p2).unwrap();
        let h = mu_lambda_hspace(&p1, &p2).unwrap();
        let sched = kernel_schedule(&g);
        let (kv, _) = kernel_product(&p1, &p2, &sched).unwrap();
        assert!((k - h).abs() < 1e-6 * k.abs(), "k {k} h {h}");
        assert!((k - kv.re).abs() < 1e-5 * k.abs(), "k {k} kernel {}", kv.re);
        // the kernel carries the same imaginary part
        let s = sigma_boundary(&p1, &p2).unwrap();
        assert!((-2.0 * kv.im - s).abs() < 1e-5 * s.abs().max(1e-3));
    }

    #[test]
    fn weight_limits() {
        assert!((m_weight(0.0) - 1.0 / PI).abs() < 1e-15);
        assert!((m_weight(1e-9) - 1.0 / PI).abs() < 1e-8);
        for h in [0.3, 1.7, 5.0] {
            // detailed balance at inverse temperature 2 pi
            assert!((m_weight(h) * (-2.0 * PI * h).exp() - m_weight(-h)).abs() < 1e-14);
            assert!((thermal_weight(-h, 1.2) - m_weight(-h) * (1.2 * h).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn weyl_relations() {
        let g = grid();
        let (p1, p2) = smooth_pair(&g);
        let z = BoundaryData::zero(g.clone());
        assert_eq!(weyl_expectation_lambda(&z).unwrap(), 1.0);
        let w1 = weyl_expectation_lambda(&p1).unwrap();
        assert!(w1 > 0.0 && w1 <= 1.0);
        let w2 = weyl_expectation_lambda(&p1.scaled(2.0)).unwrap();
        assert!((w2 - w1.powi(4)).abs() < 1e-12);
        let (l, r) = weyl_product_check(&p1, &p2).unwrap();
        assert!((l - r).norm() < 1e-6);
        let (l, r) = weyl_product_check(&p1, &z).unwrap();
        assert!((l - r).norm() < 1e-14 && (l.re - w1).abs() < 1e-14);
    }

    #[test]
    fn ell_resample_reality_and_failure() {
        let g = grid();
        let (p1, _) = smooth_pair(&g);
        let hs = ell_resample(&p1, &LogGridSpec::default()).unwrap();
        let n = hs.h.len();
        for d in 0..4 {
            let v = hs.at(d);
            for i in 0..n {
                assert!((v[i] - v[n - 1 - i].conj()).norm() < 1e-10);
            }
        }
        // a ray that does not decay at u -> 1 is truncated
        let bad = BoundaryData::from_fn(g.clone(), |_, u| u);
        assert!(matches!(ell_resample(&bad, &LogGridSpec::default()), Err(Error::ResampleFailure(_))));
    }

    #[test]
    fn restriction_preserves_symplectic_form() {
        let g = ConeGrid::coarse_grid();
        let a = KgSolution::from_bumps(1.0, vec![Bump::new([0.1, -0.1, 0.2], 0.4, 1.0, -0.5).unwrap()]).unwrap();
        let b = KgSolution::from_bumps(1.0, vec![Bump::new([-0.1, 0.2, 0.0], 0.35, 0.3, 0.8).unwrap()]).unwrap();
        let sv = sigma_boundary(&restrict_to_v(&a, &g), &restrict_to_v(&b, &g)).unwrap();
        let sd = sigma_bulk(&a, &b, &DiscGrid::composite(8, 16, 48, 96).unwrap()).unwrap();
        assert!((sv - sd).abs() < 1e-3 * sd.abs(), "{sv} {sd}");
    }

    #[test]
    fn massless_vacuum_matches_boundary_state() {
        // centred bumps give data independent of the direction
        let g = ConeGrid::with_panels(32, 16, 2, 4).unwrap();
        let b1 = Bump::new([0.0; 3], 0.4, 1.0, 0.0).unwrap();
        let b2 = Bump::new([0.0; 3], 0.45, 0.0, 1.0).unwrap();
        let a = KgSolution::from_bumps(0.0, vec![b1.clone()]).unwrap();
        let b = KgSolution::from_bumps(0.0, vec![b2.clone()]).unwrap();
        let (pa, pb) = (restrict_to_v(&a, &g), restrict_to_v(&b, &g));
        for (x, y, bx, by) in [(&pa, &pa, &b1, &b1), (&pb, &pb, &b2, &b2), (&pa, &pb, &b1, &b2)] {
            let bulk = crate::bulk::bump_one_particle_product(0.0, &[bx.clone()], &[by.clone()]);
            let k = kspace_product(x, y).unwrap();
            assert!((k - bulk).norm() < 1e-6 * bulk.norm().max(1e-3), "{k} {bulk}");
        }
    }

    #[test]
    fn sochockij_families_agree() {
        let sched = EpsSchedule::geometric(0.02, 0.5, 6, 2).unwrap();
        for fam in sochockij_families() {
            let (a, b) = sochockij_compare(&fam, &sched).unwrap();
            assert!((a - b).norm() <= 1e-4 * b.norm(), "{}: {a} {b}", fam.name);
        }
        // h = 1 gives identical integrands
        let mut fam = sochockij_families().remove(0);
        fn one(_: f64) -> f64 {
            1.0
        }
        fam.h = one;
        let (a, b) = sochockij_compare(&fam, &sched).unwrap();
        assert_eq!(a, b);
    }
}
