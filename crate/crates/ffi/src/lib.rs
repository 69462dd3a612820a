//! C ABI over `conekg`.
//!
//! Objects are opaque handles created by `*_new` functions and released with
//! the matching `*_free`. Every fallible call returns a [`ConekgStatus`]; on
//! failure the message is available from [`conekg_last_error`] on the same
//! thread. Output pointers are written only on success.

use conekg::boundary::{kspace_product, restrict_to_v, sigma_boundary, BoundaryData, ConeGrid};
use conekg::bulk::{evaluate_solution, mu_vacuum, Bump, KgSolution};
use conekg::geometry::{flow_u, sigma_distance, u_star, SpacetimePoint};
use conekg::goursat::{goursat_solve, GoursatSpec};
use conekg::modular::{s_tau, FlowParams};
use conekg::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConekgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutsideCone = 3,
    MassMismatch = 4,
    GridMismatch = 5,
    Numerical = 6,
    Panic = 7,
}

/// Radial bump initial data: center, radius and the amplitudes of the field
/// and of its time derivative.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ConekgBump {
    pub center: [f64; 3],
    pub radius: f64,
    pub amp_f: f64,
    pub amp_g: f64,
}

/// Spacetime point (t, x).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct ConekgPoint {
    pub t: f64,
    pub x: [f64; 3],
}

/// Klein-Gordon solution in the double cone.
pub struct ConekgSolution(KgSolution);
/// Discretization of the null boundary.
pub struct ConekgGrid(Arc<ConeGrid>);
/// Field data restricted to the null boundary.
pub struct ConekgBoundaryData(BoundaryData);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> ConekgStatus {
    match e {
        Error::OutsideCone { .. } | Error::FlowLeftCone => ConekgStatus::OutsideCone,
        Error::MassMismatch(..) => ConekgStatus::MassMismatch,
        Error::GridMismatch => ConekgStatus::GridMismatch,
        Error::ExtrapolationUnstable { .. }
        | Error::ResampleFailure(_)
        | Error::ImaginaryResidue(_)
        | Error::FitUnstable(_)
        | Error::BranchCut { .. }
        | Error::Unregularized => ConekgStatus::Numerical,
        _ => ConekgStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (ConekgStatus, String)>) -> ConekgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ConekgStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            ConekgStatus::Panic
        }
    }
}

fn lib<T>(r: conekg::Result<T>) -> Result<T, (ConekgStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null() -> (ConekgStatus, String) {
    (ConekgStatus::NullPointer, "null pointer argument".into())
}

unsafe fn as_ref<'a, T>(p: *const T) -> Result<&'a T, (ConekgStatus, String)> {
    p.as_ref().ok_or_else(null)
}

unsafe fn slice<'a, T>(p: *const T, n: usize) -> Result<&'a [T], (ConekgStatus, String)> {
    if n == 0 {
        Ok(&[])
    } else if p.is_null() {
        Err(null())
    } else {
        Ok(std::slice::from_raw_parts(p, n))
    }
}

unsafe fn put<T>(out: *mut T, v: T) -> Result<(), (ConekgStatus, String)> {
    if out.is_null() {
        return Err(null());
    }
    out.write(v);
    Ok(())
}

fn point(p: &ConekgPoint) -> SpacetimePoint {
    SpacetimePoint::new(p.t, p.x)
}

/// Message of the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn conekg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Solution with the given mass built from `n` bumps.
///
/// # Safety
/// `bumps` must point to `n` values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn conekg_solution_new(
    mass: f64,
    bumps: *const ConekgBump,
    n: usize,
    out: *mut *mut ConekgSolution,
) -> ConekgStatus {
    guard(|| {
        let b = slice(bumps, n)?
            .iter()
            .map(|b| Bump::new(b.center, b.radius, b.amp_f, b.amp_g))
            .collect::<conekg::Result<Vec<_>>>();
        let s = lib(KgSolution::from_bumps(mass, lib(b)?))?;
        put(out, Box::into_raw(Box::new(ConekgSolution(s))))
    })
}

/// # Safety
/// `s` must come from [`conekg_solution_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn conekg_solution_free(s: *mut ConekgSolution) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Field value at a point of the double cone.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn conekg_solution_evaluate(
    s: *const ConekgSolution,
    p: ConekgPoint,
    out: *mut f64,
) -> ConekgStatus {
    guard(|| put(out, evaluate_solution(&as_ref(s)?.0, point(&p))))
}

/// Vacuum one-particle product Re <a, b>.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn conekg_vacuum_product(
    a: *const ConekgSolution,
    b: *const ConekgSolution,
    out: *mut f64,
) -> ConekgStatus {
    guard(|| put(out, lib(mu_vacuum(&as_ref(a)?.0, &as_ref(b)?.0))?))
}

/// Cone grid with `panels` u panels of `per_panel` nodes and an
/// `n_theta` x `n_phi` sphere.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn conekg_grid_new(
    panels: usize,
    per_panel: usize,
    n_theta: usize,
    n_phi: usize,
    out: *mut *mut ConekgGrid,
) -> ConekgStatus {
    guard(|| {
        let g = lib(ConeGrid::with_panels(panels, per_panel, n_theta, n_phi))?;
        put(out, Box::into_raw(Box::new(ConekgGrid(g))))
    })
}

/// # Safety
/// `g` must come from [`conekg_grid_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn conekg_grid_free(g: *mut ConekgGrid) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Restriction of a solution to the null boundary.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn conekg_restrict(
    s: *const ConekgSolution,
    g: *const ConekgGrid,
    out: *mut *mut ConekgBoundaryData,
) -> ConekgStatus {
    guard(|| {
        let d = restrict_to_v(&as_ref(s)?.0, &as_ref(g)?.0);
        put(out, Box::into_raw(Box::new(ConekgBoundaryData(d))))
    })
}

/// # Safety
/// `d` must come from [`conekg_restrict`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn conekg_boundary_data_free(d: *mut ConekgBoundaryData) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Symplectic form of two boundary data on the same grid.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn conekg_sigma_boundary(
    a: *const ConekgBoundaryData,
    b: *const ConekgBoundaryData,
    out: *mut f64,
) -> ConekgStatus {
    guard(|| put(out, lib(sigma_boundary(&as_ref(a)?.0, &as_ref(b)?.0))?))
}

/// Boundary-state product in momentum space; real and imaginary parts.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn conekg_boundary_product(
    a: *const ConekgBoundaryData,
    b: *const ConekgBoundaryData,
    out_re: *mut f64,
    out_im: *mut f64,
) -> ConekgStatus {
    guard(|| {
        let z = lib(kspace_product(&as_ref(a)?.0, &as_ref(b)?.0))?;
        put(out_re, z.re)?;
        put(out_im, z.im)
    })
}

/// Reconstructs the field of the given mass at `n` points from boundary data.
///
/// # Safety
/// `points` must hold `n` values and `out` room for `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn conekg_goursat_solve(
    d: *const ConekgBoundaryData,
    mass: f64,
    points: *const ConekgPoint,
    n: usize,
    out: *mut f64,
) -> ConekgStatus {
    guard(|| {
        let d = &as_ref(d)?.0;
        let pts: Vec<SpacetimePoint> = slice(points, n)?.iter().map(point).collect();
        let spec = lib(GoursatSpec::new(mass, d.grid.clone()))?;
        let v = lib(goursat_solve(d, &spec, &pts))?;
        if n > 0 && out.is_null() {
            return Err(null());
        }
        std::ptr::copy_nonoverlapping(v.as_ptr(), out, n);
        Ok(())
    })
}

/// Field obtained by flowing the boundary data by `tau`, evaluated at `n` points.
///
/// # Safety
/// `points` must hold `n` values and `out` room for `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn conekg_flowed_field(
    d: *const ConekgBoundaryData,
    mass: f64,
    tau: f64,
    points: *const ConekgPoint,
    n: usize,
    out: *mut f64,
) -> ConekgStatus {
    guard(|| {
        let d = &as_ref(d)?.0;
        let pts: Vec<SpacetimePoint> = slice(points, n)?.iter().map(point).collect();
        let v = lib(s_tau(d, FlowParams { tau, mass }, &pts))?;
        if n > 0 && out.is_null() {
            return Err(null());
        }
        std::ptr::copy_nonoverlapping(v.as_ptr(), out, n);
        Ok(())
    })
}

/// Squared interval -(t - t')^2 + |x - x'|^2.
#[no_mangle]
pub extern "C" fn conekg_sigma_distance(p: ConekgPoint, q: ConekgPoint) -> f64 {
    sigma_distance(point(&p), point(&q))
}

/// Flow of the null coordinate u in [0, 1] by `tau`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn conekg_flow_u(tau: f64, u: f64, out: *mut f64) -> ConekgStatus {
    guard(|| put(out, lib(flow_u(tau, u))?))
}

/// Null coordinate where the past cone of `p` meets the generator along `omega`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn conekg_u_star(p: ConekgPoint, omega: *const [f64; 3], out: *mut f64) -> ConekgStatus {
    guard(|| put(out, lib(u_star(point(&p), *as_ref(omega)?))?))
}
