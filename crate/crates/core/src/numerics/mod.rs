//! Quadrature, transforms, special functions and eps-extrapolation.

pub mod bessel;
pub mod extrapolate;
pub mod fourier;
pub mod interp;
pub mod quadrature;

pub use bessel::{bessel_j_scaled, bessel_k0_complex, bessel_k1_complex};
pub use extrapolate::{eps_extrapolate, eps_extrapolate_order, EpsSchedule};
pub use fourier::{fourier_interval, fourier_uniform, Spectrum};
pub use interp::{Barycentric, PiecewiseBarycentric};
pub use quadrature::{composite, gauss_legendre, sphere_grid, Quadrature1D, SphereGrid};
