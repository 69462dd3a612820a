//! Klein–Gordon solutions in the double cone, the symplectic form on the
//! t = 1 disc, the vacuum one-particle product and the regularized causal
//! propagator.
//!
//! Solutions come in two flavours. A superposition of radially symmetric
//! bumps is evaluated exactly in position space through the Riemann function
//! of the radial equation, which keeps every downstream comparison free of
//! spectral truncation. A [`ModeAmplitude`] on a momentum grid is the generic
//! representation.

use crate::error::{Error, Result};
use crate::geometry::{dot, killing_x, norm, sigma_complex, sub, SpacetimePoint, Vec3};
use crate::numerics::bessel::{bessel_j_scaled, bessel_k1_complex};
use crate::numerics::quadrature::{composite, gauss_legendre, sphere_grid, Quadrature1D, SphereGrid};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Profile exp(-1/(1-s^2)) on |s| < 1 and its derivative.
#[inline]
pub fn bump_profile(s: f64) -> (f64, f64) {
    let a = s.abs();
    if a >= 1.0 {
        return (0.0, 0.0);
    }
    let d = 1.0 - s * s;
    let b = (-1.0 / d).exp();
    (b, b * (-2.0 * s / (d * d)))
}

/// Radially symmetric Cauchy datum at t = 1:
/// f = amp_f * profile(|x-c|/radius), d_t f = amp_g * profile(|x-c|/radius).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: Vec3,
    pub radius: f64,
    pub amp_f: f64,
    pub amp_g: f64,
}

impl Bump {
    pub fn new(center: Vec3, radius: f64, amp_f: f64, amp_g: f64) -> Result<Self> {
        let reach = norm(center) + radius;
        if !(radius > 0.0) || reach >= 1.0 {
            return Err(Error::SupportLeavesDisc(reach));
        }
        Ok(Self {
            center,
            radius,
            amp_f,
            amp_g,
        })
    }

    /// y * amp * profile(|y|/r) and its derivative: the odd radial extension.
    #[inline]
    fn odd(&self, amp: f64, y: f64) -> (f64, f64) {
        let (b, db) = bump_profile(y / self.radius);
        (amp * y * b, amp * (b + y / self.radius * db))
    }
}

/// Product grid on the t = 1 disc: Gauss nodes in radius times a sphere grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscGrid {
    pub radial: Quadrature1D,
    pub sphere: SphereGrid,
}

impl DiscGrid {
    pub fn new(n_radial: usize, n_theta: usize, n_phi: usize) -> Result<Self> {
        Ok(Self {
            radial: gauss_legendre(n_radial, 0.0, 1.0)?,
            sphere: sphere_grid(n_theta, n_phi)?,
        })
    }

    /// Composite radial rule with `panels` equal panels of `n` nodes.
    pub fn composite(panels: usize, n: usize, n_theta: usize, n_phi: usize) -> Result<Self> {
        let breaks: Vec<f64> = (0..=panels).map(|i| i as f64 / panels as f64).collect();
        Ok(Self {
            radial: composite(&breaks, n)?,
            sphere: sphere_grid(n_theta, n_phi)?,
        })
    }

    pub fn points(&self) -> impl Iterator<Item = (Vec3, f64)> + '_ {
        self.radial
            .nodes
            .iter()
            .zip(&self.radial.weights)
            .flat_map(move |(&r, &wr)| {
                self.sphere
                    .directions
                    .iter()
                    .zip(&self.sphere.weights)
                    .map(move |(w, &ww)| ([r * w[0], r * w[1], r * w[2]], r * r * wr * ww))
            })
    }
}

/// Field samples on a disc grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyData {
    pub grid: DiscGrid,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub support_radius: f64,
}

pub fn make_bump_cauchy(
    center: Vec3,
    radius: f64,
    amplitude_f: f64,
    amplitude_g: f64,
    grid: &DiscGrid,
) -> Result<CauchyData> {
    let b = Bump::new(center, radius, amplitude_f, amplitude_g)?;
    let (f, g) = grid
        .points()
        .map(|(x, _)| {
            let p = bump_profile(norm(sub(x, center)) / radius).0;
            (b.amp_f * p, b.amp_g * p)
        })
        .unzip();
    Ok(CauchyData {
        grid: grid.clone(),
        f,
        g,
        support_radius: norm(center) + radius,
    })
}

/// Momentum grid: Gauss nodes on [0, k_max] times a sphere grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumGrid {
    pub radial: Quadrature1D,
    pub sphere: SphereGrid,
}

impl MomentumGrid {
    pub fn new(n_radial: usize, k_max: f64, n_theta: usize, n_phi: usize) -> Result<Self> {
        Ok(Self {
            radial: gauss_legendre(n_radial, 0.0, k_max)?,
            sphere: sphere_grid(n_theta, n_phi)?,
        })
    }

    /// Default resolution: 64 radial nodes up to 24, 16 x 32 directions.
    pub fn default_grid() -> Self {
        Self::new(64, 24.0, 16, 32).expect("valid default")
    }

    pub fn k_max(&self) -> f64 {
        self.radial.b
    }

    /// (k vector, |k|, measure weight) in radial-major order.
    pub fn points(&self) -> impl Iterator<Item = (Vec3, f64, f64)> + '_ {
        self.radial
            .nodes
            .iter()
            .zip(&self.radial.weights)
            .flat_map(move |(&k, &wk)| {
                self.sphere
                    .directions
                    .iter()
                    .zip(&self.sphere.weights)
                    .map(move |(w, &ww)| ([k * w[0], k * w[1], k * w[2]], k, k * k * wk * ww))
            })
    }

    pub fn len(&self) -> usize {
        self.radial.len() * self.sphere.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One-particle amplitude on a momentum grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeAmplitude {
    pub mass: f64,
    pub grid: MomentumGrid,
    pub values: Vec<Complex64>,
}

impl ModeAmplitude {
    pub fn k_max(&self) -> f64 {
        self.grid.k_max()
    }

    pub fn l2_norm(&self) -> f64 {
        self.grid
            .points()
            .zip(&self.values)
            .map(|((_, _, w), a)| w * a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

#[inline]
fn energy(m: f64, k: f64) -> f64 {
    (m * m + k * k).sqrt()
}

/// a(k) = e^{iE}/2 (2 pi)^{-3/2} \int [sqrt(2E) f + i sqrt(2/E) g] e^{-ik.x} dx.
pub fn modes_from_cauchy(data: &CauchyData, m: f64, kgrid: &MomentumGrid) -> Result<ModeAmplitude> {
    if m < 0.0 {
        return Err(Error::NegativeMass(m));
    }
    let pts: Vec<(Vec3, f64, f64, f64)> = data
        .grid
        .points()
        .zip(data.f.iter().zip(&data.g))
        .filter(|(_, (f, g))| **f != 0.0 || **g != 0.0)
        .map(|((x, w), (&f, &g))| (x, w, f, g))
        .collect();
    let pre = 0.5 * (2.0 * PI).powf(-1.5);
    let values = kgrid
        .points()
        .map(|(k, kn, _)| {
            let e = energy(m, kn);
            let (mut fh, mut gh) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
            for &(x, w, f, g) in &pts {
                let ph = Complex64::from_polar(w, -dot(k, x));
                fh += ph * f;
                gh += ph * g;
            }
            Complex64::from_polar(pre, e) * (fh * (2.0 * e).sqrt() + Complex64::i() * gh * (2.0 / e).sqrt())
        })
        .collect();
    Ok(ModeAmplitude {
        mass: m,
        grid: kgrid.clone(),
        values,
    })
}

/// 4 pi \int_0^1 profile(s) s^2 sinc(q s) ds: transform of the unit-radius profile.
pub fn profile_transform(q: f64) -> f64 {
    thread_local! {
        static RULE: Quadrature1D = {
            let breaks: Vec<f64> = (0..=24).map(|i| i as f64 / 24.0).collect();
            composite(&breaks, 24).expect("valid rule")
        };
    }
    RULE.with(|r| {
        4.0 * PI
            * r.integrate(|s| {
                let qs = q * s;
                let sinc = if qs.abs() < 1e-8 { 1.0 - qs * qs / 6.0 } else { qs.sin() / qs };
                bump_profile(s).0 * s * s * sinc
            })
    })
}

/// Exact amplitudes of a bump superposition sampled on a momentum grid.
pub fn modes_from_bumps(bumps: &[Bump], m: f64, kgrid: &MomentumGrid) -> Result<ModeAmplitude> {
    if m < 0.0 {
        return Err(Error::NegativeMass(m));
    }
    let pre = 0.5 * (2.0 * PI).powf(-1.5);
    let values = kgrid
        .points()
        .map(|(k, kn, _)| {
            let e = energy(m, kn);
            let mut acc = Complex64::new(0.0, 0.0);
            for b in bumps {
                let r3 = b.radius.powi(3);
                let tr = r3 * profile_transform(kn * b.radius);
                let ph = Complex64::from_polar(1.0, -dot(k, b.center));
                acc += ph
                    * tr
                    * Complex64::new((2.0 * e).sqrt() * b.amp_f, (2.0 / e).sqrt() * b.amp_g);
            }
            Complex64::from_polar(pre, e) * acc
        })
        .collect();
    Ok(ModeAmplitude {
        mass: m,
        grid: kgrid.clone(),
        values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Representation {
    Bumps(Vec<Bump>),
    Modes(ModeAmplitude),
}

/// A solution of (box + m^2) phi = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KgSolution {
    pub mass: f64,
    pub repr: Representation,
}

/// Value, time derivative and spatial gradient at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldSample {
    pub value: f64,
    pub dt: f64,
    pub grad: Vec3,
}

/// Anything that can be sampled with first derivatives.
pub trait Field {
    fn sample(&self, p: SpacetimePoint) -> FieldSample;
}

const RADIAL_NODES: usize = 96;
const RHO_MIN: f64 = 1e-5;

/// (psi, d_s psi, d_rho psi) for psi = rho * phi of one bump, s = t - 1 >= 0,
/// with `gsign` flipping the velocity datum for backward evolution.
fn radial_solution(b: &Bump, m: f64, rho: f64, s: f64, gsign: f64) -> (f64, f64, f64) {
    let r = b.radius;
    let ag = gsign * b.amp_g;
    let (fp, dfp) = b.odd(b.amp_f, rho + s);
    let (fm, dfm) = b.odd(b.amp_f, rho - s);
    if s < 1e-14 {
        let (g0, _) = b.odd(ag, rho);
        return (fp, g0, dfp);
    }
    let mut psi = 0.5 * (fp + fm);
    let mut psi_r = 0.5 * (dfp + dfm);
    let mut psi_s = 0.5 * (dfp - dfm);
    let lo = (rho - s).max(-r);
    let hi = (rho + s).min(r);
    if hi <= lo {
        return (psi, psi_s, psi_r);
    }
    thread_local! {
        static REF: Quadrature1D = gauss_legendre(RADIAL_NODES, -1.0, 1.0).expect("valid rule");
    }
    let m2 = m * m;
    let (mut ig, mut ifj, mut idg, mut idf) = (0.0, 0.0, 0.0, 0.0);
    let (mut s_g, mut s_gx, mut s_f, mut s_fx) = (0.0, 0.0, 0.0, 0.0);
    REF.with(|q| {
        let h = 0.5 * (hi - lo);
        let c = 0.5 * (hi + lo);
        for (&x, &w) in q.nodes.iter().zip(&q.weights) {
            let y = c + h * x;
            let wy = h * w;
            let xi = (y - rho) / s;
            let q2 = (1.0 - xi * xi).max(0.0);
            let (g, dg) = b.odd(ag, y);
            let (f, df) = b.odd(b.amp_f, y);
            if m == 0.0 {
                ig += wy * g;
                idg += wy * dg;
                s_gx += wy * xi * dg;
                continue;
            }
            let z = m * s * q2.sqrt();
            let (j0, j1c, j2c) = bessel_j_scaled(z);
            let dj0 = -m2 * q2 * s * j1c;
            let dj1c = -m2 * q2 * s * j2c;
            ig += wy * g * j0;
            idg += wy * dg * j0;
            ifj += wy * f * j1c;
            idf += wy * df * j1c;
            s_g += wy * g * dj0;
            s_gx += wy * xi * dg * j0;
            s_f += wy * f * dj1c;
            s_fx += wy * xi * df * j1c;
        }
    });
    // integrals over y; d xi = dy / s
    psi += 0.5 * ig - 0.5 * m2 * s * ifj;
    psi_r += 0.5 * idg - 0.5 * m2 * s * idf;
    psi_s += 0.5 * ig / s + 0.5 * (s_gx + s_g) - m2 * ifj - 0.5 * m2 * s * (s_fx + s_f);
    (psi, psi_s, psi_r)
}

/// Sample of one bump's solution at a point.
fn bump_sample(b: &Bump, m: f64, p: SpacetimePoint) -> FieldSample {
    let d = sub(p.x, b.center);
    let rho_true = norm(d);
    let s = p.t - 1.0;
    if rho_true >= b.radius + s.abs() {
        return FieldSample::default();
    }
    let rho = rho_true.max(RHO_MIN);
    let (psi, psi_s, psi_r) = if s >= 0.0 {
        radial_solution(b, m, rho, s, 1.0)
    } else {
        let (a, bs, c) = radial_solution(b, m, rho, -s, -1.0);
        (a, -bs, c)
    };
    let value = psi / rho;
    let dt = psi_s / rho;
    let drho = (rho * psi_r - psi) / (rho * rho);
    let grad = if rho_true > RHO_MIN {
        [drho * d[0] / rho_true, drho * d[1] / rho_true, drho * d[2] / rho_true]
    } else {
        // phi is even in rho: its radial slope is linear near the centre
        [drho * d[0] / rho, drho * d[1] / rho, drho * d[2] / rho]
    };
    FieldSample { value, dt, grad }
}

fn modes_sample(a: &ModeAmplitude, p: SpacetimePoint) -> FieldSample {
    let pre = (2.0 * PI).powf(-1.5);
    let (mut v, mut vt) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    let mut vg = [Complex64::new(0.0, 0.0); 3];
    for ((k, kn, w), amp) in a.grid.points().zip(&a.values) {
        let e = energy(a.mass, kn);
        let c = amp * Complex64::from_polar(w / (2.0 * e).sqrt(), dot(k, p.x) - p.t * e);
        v += c;
        vt += c * Complex64::new(0.0, -e);
        for i in 0..3 {
            vg[i] += c * Complex64::new(0.0, k[i]);
        }
    }
    FieldSample {
        value: 2.0 * pre * v.re,
        dt: 2.0 * pre * vt.re,
        grad: [2.0 * pre * vg[0].re, 2.0 * pre * vg[1].re, 2.0 * pre * vg[2].re],
    }
}

impl KgSolution {
    pub fn from_bumps(mass: f64, bumps: Vec<Bump>) -> Result<Self> {
        if mass < 0.0 {
            return Err(Error::NegativeMass(mass));
        }
        Ok(Self {
            mass,
            repr: Representation::Bumps(bumps),
        })
    }

    pub fn from_modes(modes: ModeAmplitude) -> Self {
        Self {
            mass: modes.mass,
            repr: Representation::Modes(modes),
        }
    }

    pub fn zero(mass: f64) -> Self {
        Self {
            mass,
            repr: Representation::Bumps(Vec::new()),
        }
    }

    pub fn bumps(&self) -> Option<&[Bump]> {
        match &self.repr {
            Representation::Bumps(b) => Some(b),
            Representation::Modes(_) => None,
        }
    }

    /// Linear combination of two bump solutions of equal mass.
    pub fn combine(&self, a: f64, other: &KgSolution, b: f64) -> Result<KgSolution> {
        check_mass(self, other)?;
        match (&self.repr, &other.repr) {
            (Representation::Bumps(x), Representation::Bumps(y)) => {
                let mut v: Vec<Bump> = x
                    .iter()
                    .map(|c| Bump { amp_f: a * c.amp_f, amp_g: a * c.amp_g, ..*c })
                    .collect();
                v.extend(y.iter().map(|c| Bump { amp_f: b * c.amp_f, amp_g: b * c.amp_g, ..*c }));
                KgSolution::from_bumps(self.mass, v)
            }
            (Representation::Modes(x), Representation::Modes(y)) if x.grid == y.grid => {
                let values = x.values.iter().zip(&y.values).map(|(p, q)| p * a + q * b).collect();
                Ok(KgSolution::from_modes(ModeAmplitude { values, ..x.clone() }))
            }
            _ => Err(Error::GridMismatch),
        }
    }

    pub fn scaled(&self, c: f64) -> KgSolution {
        match &self.repr {
            Representation::Bumps(x) => KgSolution {
                mass: self.mass,
                repr: Representation::Bumps(
                    x.iter().map(|b| Bump { amp_f: c * b.amp_f, amp_g: c * b.amp_g, ..*b }).collect(),
                ),
            },
            Representation::Modes(x) => KgSolution::from_modes(ModeAmplitude {
                values: x.values.iter().map(|v| v * c).collect(),
                ..x.clone()
            }),
        }
    }

    /// Same solution sampled on a momentum grid.
    pub fn to_modes(&self, kgrid: &MomentumGrid) -> Result<ModeAmplitude> {
        match &self.repr {
            Representation::Bumps(b) => modes_from_bumps(b, self.mass, kgrid),
            Representation::Modes(a) => Ok(a.clone()),
        }
    }
}

impl Field for KgSolution {
    fn sample(&self, p: SpacetimePoint) -> FieldSample {
        match &self.repr {
            Representation::Bumps(bs) => {
                let mut acc = FieldSample::default();
                for b in bs {
                    let s = bump_sample(b, self.mass, p);
                    acc.value += s.value;
                    acc.dt += s.dt;
                    for i in 0..3 {
                        acc.grad[i] += s.grad[i];
                    }
                }
                acc
            }
            Representation::Modes(a) => modes_sample(a, p),
        }
    }
}

pub fn evaluate_solution(s: &KgSolution, p: SpacetimePoint) -> f64 {
    match &s.repr {
        Representation::Bumps(_) => s.sample(p).value,
        Representation::Modes(a) => modes_sample(a, p).value,
    }
}

pub fn evaluate_dt(s: &KgSolution, p: SpacetimePoint) -> f64 {
    s.sample(p).dt
}

/// X^a d_a phi at p.
pub fn evaluate_x_derivative(s: &impl Field, p: SpacetimePoint) -> f64 {
    let f = s.sample(p);
    let x = killing_x(p).vector;
    x[0] * f.dt + x[1] * f.grad[0] + x[2] * f.grad[1] + x[3] * f.grad[2]
}

fn check_mass(a: &KgSolution, b: &KgSolution) -> Result<()> {
    if a.mass != b.mass {
        return Err(Error::MassMismatch(a.mass, b.mass));
    }
    Ok(())
}

/// \int_{t=1} (phi2 d_t phi1 - phi1 d_t phi2) d^3x on the disc grid.
pub fn sigma_bulk(s1: &KgSolution, s2: &KgSolution, grid: &DiscGrid) -> Result<f64> {
    check_mass(s1, s2)?;
    Ok(grid
        .points()
        .map(|(x, w)| {
            let p = SpacetimePoint::new(1.0, x);
            let a = s1.sample(p);
            let b = s2.sample(p);
            w * (b.value * a.dt - a.value * b.dt)
        })
        .sum())
}

/// Panels for radial momentum integrals of bump pairs.
fn momentum_rule(r_min: f64) -> Quadrature1D {
    let k_top = 260.0 / r_min;
    let panels = (k_top / 1.5).ceil() as usize;
    let breaks: Vec<f64> = (0..=panels).map(|i| k_top * i as f64 / panels as f64).collect();
    composite(&breaks, 12).expect("valid rule")
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Complex product <a1, a2> of two bump superpositions, evaluated through the
/// angular-averaged closed form. Real part is the vacuum product; the
/// imaginary part is -sigma/2.
pub fn bump_one_particle_product(m: f64, b1: &[Bump], b2: &[Bump]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for x in b1 {
        for y in b2 {
            let d = norm(sub(x.center, y.center));
            let q = momentum_rule(x.radius.min(y.radius));
            let (mut re, mut im) = (0.0, 0.0);
            for (&k, &w) in q.nodes.iter().zip(&q.weights) {
                let e = energy(m, k);
                let tx = x.radius.powi(3) * profile_transform(k * x.radius);
                let ty = y.radius.powi(3) * profile_transform(k * y.radius);
                let c = w * k * k * sinc(k * d);
                re += c * (e * x.amp_f * y.amp_f + x.amp_g * y.amp_g / e) * tx * ty;
                im += c * (x.amp_f * y.amp_g - x.amp_g * y.amp_f) * tx * ty;
            }
            acc += Complex64::new(re, im) / (4.0 * PI * PI);
        }
    }
    acc
}

/// Re \int conj(a1) a2 dk.
pub fn mu_vacuum(s1: &KgSolution, s2: &KgSolution) -> Result<f64> {
    check_mass(s1, s2)?;
    match (&s1.repr, &s2.repr) {
        (Representation::Bumps(a), Representation::Bumps(b)) => Ok(bump_one_particle_product(s1.mass, a, b).re),
        (Representation::Modes(a), Representation::Modes(b)) if a.grid == b.grid => Ok(a
            .grid
            .points()
            .zip(a.values.iter().zip(&b.values))
            .map(|((_, _, w), (x, y))| w * (x.conj() * y).re)
            .sum()),
        (Representation::Modes(a), _) => mu_vacuum(s1, &KgSolution::from_modes(s2.to_modes(&a.grid)?)),
        (_, Representation::Modes(b)) => mu_vacuum(&KgSolution::from_modes(s1.to_modes(&b.grid)?), s2),
    }
}

/// Delta_m((tc, x), q) with Im tc != 0:
/// (i m / 4pi^2)[K1(m sqrt(s+))/sqrt(s+) - K1(m sqrt(s-))/sqrt(s-)],
/// s+- the interval at conj(tc) and tc respectively.
pub fn propagator_complex(m: f64, tc: Complex64, x: Vec3, q: SpacetimePoint) -> Result<Complex64> {
    if tc.im == 0.0 {
        return Err(Error::Unregularized);
    }
    let kern = |sg: Complex64| -> Result<Complex64> {
        if m == 0.0 {
            return Ok(sg.inv());
        }
        let r = sg.sqrt();
        Ok(bessel_k1_complex(r * m)? * m / r)
    };
    let sp = sigma_complex(tc.conj(), x, q);
    let sm = sigma_complex(tc, x, q);
    Ok(Complex64::new(0.0, 1.0 / (4.0 * PI * PI)) * (kern(sp)? - kern(sm)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::in_double_cone;

    fn b1() -> Bump {
        Bump::new([0.1, -0.2, 0.05], 0.4, 1.3, -0.7).unwrap()
    }

    #[test]
    fn bump_examples() {
        let g = DiscGrid::new(8, 4, 8).unwrap();
        let z = make_bump_cauchy([0.0; 3], 0.5, 0.0, 0.0, &g).unwrap();
        assert!(z.f.iter().chain(&z.g).all(|v| *v == 0.0));
        let b = Bump::new([0.0; 3], 0.5, 2.0, 0.0).unwrap();
        let s = KgSolution::from_bumps(1.0, vec![b]).unwrap();
        let v = evaluate_solution(&s, SpacetimePoint::new(1.0, [0.0; 3]));
        assert!((v - 2.0 * (-1.0f64).exp()).abs() < 1e-9);
        assert_eq!(evaluate_solution(&s, SpacetimePoint::new(1.0, [0.95, 0.0, 0.0])), 0.0);
        assert!(Bump::new([0.6, 0.0, 0.0], 0.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn initial_data_reproduced() {
        let b = b1();
        for m in [0.0, 0.7] {
            let s = KgSolution::from_bumps(m, vec![b]).unwrap();
            for &x in &[[0.1, -0.1, 0.0], [0.3, 0.0, 0.2], [0.1, -0.2, 0.05]] {
                let f = s.sample(SpacetimePoint::new(1.0, x));
                let prof = bump_profile(norm(sub(x, b.center)) / b.radius).0;
                assert!((f.value - b.amp_f * prof).abs() < 1e-9);
                assert!((f.dt - b.amp_g * prof).abs() < 1e-9);
                // continuity across t = 1
                let up = s.sample(SpacetimePoint::new(1.0 + 1e-9, x));
                let dn = s.sample(SpacetimePoint::new(1.0 - 1e-9, x));
                assert!((up.value - dn.value).abs() < 1e-7);
                assert!((up.dt - dn.dt).abs() < 1e-6);
            }
        }
    }

    fn kg_residual(s: &KgSolution, p: SpacetimePoint, h: f64) -> f64 {
        let e = |dt: f64, d: Vec3| {
            evaluate_solution(s, SpacetimePoint::new(p.t + dt, [p.x[0] + d[0], p.x[1] + d[1], p.x[2] + d[2]]))
        };
        let c = e(0.0, [0.0; 3]);
        let dtt = (e(h, [0.0; 3]) - 2.0 * c + e(-h, [0.0; 3])) / (h * h);
        let mut lap = 0.0;
        for i in 0..3 {
            let mut d = [0.0; 3];
            d[i] = h;
            let mut dm = [0.0; 3];
            dm[i] = -h;
            lap += (e(0.0, d) - 2.0 * c + e(0.0, dm)) / (h * h);
        }
        -dtt + lap - s.mass * s.mass * c
    }

    #[test]
    fn satisfies_kg_equation() {
        for m in [0.0, 0.5, 1.0] {
            let s = KgSolution::from_bumps(m, vec![b1()]).unwrap();
            for p in [
                SpacetimePoint::new(1.3, [0.2, -0.1, 0.1]),
                SpacetimePoint::new(0.6, [0.0, 0.1, -0.2]),
                SpacetimePoint::new(1.5, [0.1, 0.1, 0.1]),
            ] {
                assert!(in_double_cone(p));
                let r1 = kg_residual(&s, p, 2e-3).abs();
                let r2 = kg_residual(&s, p, 1e-3).abs();
                let scale = evaluate_solution(&s, p).abs().max(1.0);
                assert!(r2 < 1e-3 * scale, "m={m} r={r2}");
                // second-order decay of the discretization error
                if r1 > 1e-6 {
                    assert!((r1 / r2).log2() > 1.8, "m={m} order={}", (r1 / r2).log2());
                }
            }
        }
    }

    #[test]
    fn derivatives_match_differences() {
        let s = KgSolution::from_bumps(0.8, vec![b1()]).unwrap();
        let p = SpacetimePoint::new(1.35, [0.2, -0.15, 0.3]);
        let f = s.sample(p);
        let h = 1e-5;
        let dt = (evaluate_solution(&s, SpacetimePoint::new(p.t + h, p.x))
            - evaluate_solution(&s, SpacetimePoint::new(p.t - h, p.x)))
            / (2.0 * h);
        assert!((dt - f.dt).abs() < 1e-7, "{dt} {}", f.dt);
        for i in 0..3 {
            let mut a = p.x;
            let mut b = p.x;
            a[i] += h;
            b[i] -= h;
            let d = (evaluate_solution(&s, SpacetimePoint::new(p.t, a))
                - evaluate_solution(&s, SpacetimePoint::new(p.t, b)))
                / (2.0 * h);
            assert!((d - f.grad[i]).abs() < 1e-7);
        }
    }

    #[test]
    fn finite_propagation_speed() {
        let b = Bump::new([0.3, 0.0, 0.0], 0.2, 1.0, 1.0).unwrap();
        let s = KgSolution::from_bumps(1.0, vec![b]).unwrap();
        // spacelike to the whole support
        let p = SpacetimePoint::new(1.2, [-0.4, 0.0, 0.0]);
        assert_eq!(evaluate_solution(&s, p), 0.0);
    }

    #[test]
    fn symplectic_form_basics() {
        let g = DiscGrid::new(24, 12, 24).unwrap();
        let a = KgSolution::from_bumps(1.0, vec![b1()]).unwrap();
        let b = KgSolution::from_bumps(1.0, vec![Bump::new([-0.2, 0.1, 0.0], 0.35, 0.4, 1.1).unwrap()]).unwrap();
        assert_eq!(sigma_bulk(&a, &a, &g).unwrap(), 0.0);
        let x = sigma_bulk(&a, &b, &g).unwrap();
        let y = sigma_bulk(&b, &a, &g).unwrap();
        assert!((x + y).abs() < 1e-12);
        let c = KgSolution::from_bumps(0.5, vec![b1()]).unwrap();
        assert!(sigma_bulk(&a, &c, &g).is_err());
    }

    #[test]
    fn closed_form_products() {
        // the angular-averaged momentum integral reproduces the disc symplectic form
        let x = b1();
        let y = Bump::new([-0.2, 0.1, 0.3], 0.35, 0.4, 1.1).unwrap();
        let m = 0.5;
        let c = bump_one_particle_product(m, &[x], &[y]);
        let a = KgSolution::from_bumps(m, vec![x]).unwrap();
        let b = KgSolution::from_bumps(m, vec![y]).unwrap();
        let g = DiscGrid::composite(8, 16, 48, 96).unwrap();
        let s = sigma_bulk(&a, &b, &g).unwrap();
        assert!((c.im + 0.5 * s).abs() < 1e-8, "{} {}", c.im, s);
        assert!(bump_one_particle_product(m, &[x], &[x]).re > 0.0);
    }

    #[test]
    fn mode_path_converges_to_exact() {
        let b = Bump::new([0.1, 0.0, -0.1], 0.45, 1.0, 0.6).unwrap();
        let s = KgSolution::from_bumps(1.0, vec![b]).unwrap();
        let pts = [SpacetimePoint::new(1.0, [0.1, 0.0, -0.1]), SpacetimePoint::new(1.4, [0.3, 0.1, 0.0])];
        let mut errs = Vec::new();
        for (n, kmax) in [(32, 12.0), (64, 24.0), (96, 48.0)] {
            let kg = MomentumGrid::new(n, kmax, 24, 48).unwrap();
            let sm = KgSolution::from_modes(modes_from_bumps(&[b], 1.0, &kg).unwrap());
            let e = pts
                .iter()
                .map(|&p| (evaluate_solution(&sm, p) - evaluate_solution(&s, p)).abs())
                .fold(0.0, f64::max);
            errs.push(e);
        }
        // truncation of the slowly decaying bump spectrum dominates
        assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
        assert!(errs[2] < 0.05, "{errs:?}");
    }

    #[test]
    fn cauchy_quadrature_matches_closed_form_modes() {
        let b = Bump::new([0.1, 0.2, 0.0], 0.4, 0.8, -0.5).unwrap();
        let disc = DiscGrid::composite(6, 12, 32, 64).unwrap();
        let data = make_bump_cauchy(b.center, b.radius, b.amp_f, b.amp_g, &disc).unwrap();
        let kg = MomentumGrid::new(6, 10.0, 4, 8).unwrap();
        let a = modes_from_cauchy(&data, 0.5, &kg).unwrap();
        let c = modes_from_bumps(&[b], 0.5, &kg).unwrap();
        let err = a.values.iter().zip(&c.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-6 * c.l2_norm().max(1e-3), "{err}");
        let z = make_bump_cauchy(b.center, b.radius, 0.0, 0.0, &disc).unwrap();
        assert_eq!(modes_from_cauchy(&z, 0.5, &kg).unwrap().l2_norm(), 0.0);
        assert!(modes_from_cauchy(&z, -1.0, &kg).is_err());
    }

    #[test]
    fn mode_path_time_derivative_and_reality() {
        let b = Bump::new([0.0, 0.1, 0.0], 0.5, 1.0, 0.3).unwrap();
        let kg = MomentumGrid::new(24, 12.0, 12, 24).unwrap();
        let sm = KgSolution::from_modes(modes_from_bumps(&[b], 0.7, &kg).unwrap());
        let p = SpacetimePoint::new(1.2, [0.1, 0.2, -0.1]);
        let h = 1e-4;
        let fd = (evaluate_solution(&sm, SpacetimePoint::new(p.t + h, p.x))
            - evaluate_solution(&sm, SpacetimePoint::new(p.t - h, p.x)))
            / (2.0 * h);
        assert!((fd - evaluate_dt(&sm, p)).abs() < 1e-6);
        assert_eq!(evaluate_solution(&KgSolution::zero(0.7), p), 0.0);
    }

    #[test]
    fn propagator_symmetries() {
        let q = SpacetimePoint::new(0.4, [0.1, 0.2, 0.0]);
        let x = [0.0, -0.1, 0.3];
        for m in [0.0, 0.5, 1.3] {
            for tc in [Complex64::new(1.1, -0.03), Complex64::new(0.7, 0.2)] {
                let a = propagator_complex(m, tc, x, q).unwrap();
                let b = propagator_complex(m, tc.conj(), x, q).unwrap();
                assert!((a.conj() + b).norm() < 1e-14 * a.norm().max(1.0));
            }
        }
        assert_eq!(
            propagator_complex(1.0, Complex64::new(1.0, 0.0), x, q),
            Err(Error::Unregularized)
        );
        // spacelike separation: the two boundary values agree as eps -> 0
        let far = [0.9, 0.0, 0.0];
        let v = propagator_complex(0.0, Complex64::new(0.5, -1e-7), far, q).unwrap();
        assert!(v.norm() < 1e-5);
        // small-mass continuity
        let tc = Complex64::new(0.9, -0.05);
        let a = propagator_complex(1e-3, tc, x, q).unwrap();
        let b = propagator_complex(0.0, tc, x, q).unwrap();
        assert!((a - b).norm() < 1e-6 * b.norm().max(1.0));
    }
}
