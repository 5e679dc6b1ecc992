//! C ABI over `ergokde`.
//!
//! Every fallible function returns an [`ErgokdeStatus`]. On failure the message
//! is available from [`ergokde_last_error`] on the same thread. Handles are
//! opaque, owned by the caller once returned and released with the matching
//! `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use ergokde::adaptive::{build_grid, select_bandwidth};
use ergokde::estimator::{
    estimate_density, psi_d, rate_phi, rate_psi, sigma_proxy, theoretical_bandwidth, upsilon, DensityEstimate,
    EvaluationGrid,
};
use ergokde::kernel::{build_order_kernel, Kernel};
use ergokde::levy::LevyTriplet;
use ergokde::linalg::Matrix;
use ergokde::models::{simulate_ou, OuModel, SamplePath, Start};
use ergokde::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErgokdeStatus {
    Ok = 0,
    NullPointer = 1,
    Validation = 2,
    Numeric = 3,
    Simulation = 4,
    EmptyGrid = 5,
    Config = 6,
    DegenerateData = 7,
    Io = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

/// Order-`ℓ` product kernel.
pub struct ErgokdeKernel(Kernel);

/// Sampled trajectory on a uniform time grid.
pub struct ErgokdePath(SamplePath);

/// Density estimate on a tensor grid, last axis varying fastest.
pub struct ErgokdeEstimate(DensityEstimate);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> ErgokdeStatus {
    match e {
        Error::Validation(_) => ErgokdeStatus::Validation,
        Error::Numeric(_) => ErgokdeStatus::Numeric,
        Error::NonFiniteState { .. } => ErgokdeStatus::Simulation,
        Error::EmptyGrid { .. } => ErgokdeStatus::EmptyGrid,
        Error::Config { .. } => ErgokdeStatus::Config,
        Error::DegenerateData(_) => ErgokdeStatus::DegenerateData,
        Error::Io(_) => ErgokdeStatus::Io,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
    Buffer { needed: usize },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ErgokdeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ErgokdeStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            ErgokdeStatus::NullPointer
        }
        Ok(Err(Failure::Buffer { needed })) => {
            set_last_error(format!("buffer too small: {needed} values needed"));
            ErgokdeStatus::BufferTooSmall
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            ErgokdeStatus::Panic
        }
    }
}

unsafe fn input<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn handle<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn copy_out(src: &[f64], buf: *mut f64, buf_len: usize) -> Result<(), Failure> {
    if buf_len < src.len() {
        return Err(Failure::Buffer { needed: src.len() });
    }
    if src.is_empty() {
        return Ok(());
    }
    if buf.is_null() {
        return Err(Failure::Null("buf"));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}

fn square(values: &[f64], d: usize) -> Matrix {
    Matrix::from_row_slice(d, d, values)
}

/// Message of the last failure on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn ergokde_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn ergokde_kernel_new(dim: usize, order: usize, out: *mut *mut ErgokdeKernel) -> ErgokdeStatus {
    guard(|| {
        let k = build_order_kernel(dim, order)?;
        write_out(out, Box::into_raw(Box::new(ErgokdeKernel(k))), "out")
    })
}

/// # Safety
/// `kernel` must be null or a handle from [`ergokde_kernel_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ergokde_kernel_free(kernel: *mut ErgokdeKernel) {
    if !kernel.is_null() {
        drop(Box::from_raw(kernel));
    }
}

/// Order after rounding even requests up.
///
/// # Safety
/// `kernel` must be a live handle; `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ergokde_kernel_order(kernel: *const ErgokdeKernel, out: *mut usize) -> ErgokdeStatus {
    guard(|| write_out(out, handle(kernel, "kernel")?.0.order(), "out"))
}

/// `K(u)` for a point `u` of length `dim`.
///
/// # Safety
/// `u` must point to `dim` values; `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ergokde_kernel_eval(
    kernel: *const ErgokdeKernel,
    u: *const f64,
    dim: usize,
    out: *mut f64,
) -> ErgokdeStatus {
    guard(|| {
        let k = &handle(kernel, "kernel")?.0;
        if dim != k.dim() {
            return Err(Error::Validation(format!("point has {dim} coordinates, kernel has {}", k.dim())).into());
        }
        write_out(out, k.eval(input(u, dim, "u")?), "out")
    })
}

/// Simulates `dX = -B X dt + dW` with `W` of covariance `Q` (both row-major `dim x dim`).
///
/// A null `x0` starts from the stationary law. A negative `burn_in` selects the default rule.
///
/// # Safety
/// `b` and `q` must point to `dim * dim` values, `x0` to `dim` values or be null.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn ergokde_simulate_ou(
    dim: usize,
    b: *const f64,
    q: *const f64,
    horizon: f64,
    dt: f64,
    x0: *const f64,
    burn_in: f64,
    seed: u64,
    out: *mut *mut ErgokdePath,
) -> ErgokdeStatus {
    guard(|| {
        if dim == 0 {
            return Err(Error::Validation("dimension must be at least 1".into()).into());
        }
        let bm = square(input(b, dim * dim, "b")?, dim);
        let qm = square(input(q, dim * dim, "q")?, dim);
        let model = OuModel::new(bm, LevyTriplet::brownian(qm)?)?;
        let start = if x0.is_null() {
            Start::Stationary
        } else {
            Start::Fixed(input(x0, dim, "x0")?.to_vec())
        };
        let burn = (burn_in >= 0.0).then_some(burn_in);
        let path = simulate_ou(&model, horizon, dt, &start, burn, seed)?;
        write_out(out, Box::into_raw(Box::new(ErgokdePath(path))), "out")
    })
}

/// Wraps externally observed states, `rows` rows of `dim` values at spacing `dt`.
///
/// # Safety
/// `states` must point to `rows * dim` values.
#[no_mangle]
pub unsafe extern "C" fn ergokde_path_from_states(
    dim: usize,
    dt: f64,
    states: *const f64,
    rows: usize,
    out: *mut *mut ErgokdePath,
) -> ErgokdeStatus {
    guard(|| {
        let values = input(states, rows.saturating_mul(dim), "states")?.to_vec();
        let path = SamplePath::new(dim, dt, values, 0, 0, "external")?;
        write_out(out, Box::into_raw(Box::new(ErgokdePath(path))), "out")
    })
}

/// # Safety
/// `path` must be null or a live path handle.
#[no_mangle]
pub unsafe extern "C" fn ergokde_path_free(path: *mut ErgokdePath) {
    if !path.is_null() {
        drop(Box::from_raw(path));
    }
}

/// Dimension, number of stored rows (`n_steps + 1`) and step.
///
/// # Safety
/// `path` must be a live handle; each output pointer must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn ergokde_path_shape(
    path: *const ErgokdePath,
    dim: *mut usize,
    rows: *mut usize,
    dt: *mut f64,
) -> ErgokdeStatus {
    guard(|| {
        let p = &handle(path, "path")?.0;
        if !dim.is_null() {
            dim.write(p.dim());
        }
        if !rows.is_null() {
            rows.write(p.n_steps() + 1);
        }
        if !dt.is_null() {
            dt.write(p.dt());
        }
        Ok(())
    })
}

/// Copies the row-major states into `buf`, which must hold `rows * dim` values.
///
/// # Safety
/// `buf` must be valid for `buf_len` writes.
#[no_mangle]
pub unsafe extern "C" fn ergokde_path_states(path: *const ErgokdePath, buf: *mut f64, buf_len: usize) -> ErgokdeStatus {
    guard(|| copy_out(handle(path, "path")?.0.states(), buf, buf_len))
}

/// Estimates on the grid with `points_per_axis` points per axis spanning `[lower, upper]`.
///
/// # Safety
/// `lower` and `upper` must point to `dim` values where `dim` is the path dimension.
#[no_mangle]
pub unsafe extern "C" fn ergokde_estimate(
    path: *const ErgokdePath,
    kernel: *const ErgokdeKernel,
    h: f64,
    lower: *const f64,
    upper: *const f64,
    points_per_axis: usize,
    out: *mut *mut ErgokdeEstimate,
) -> ErgokdeStatus {
    guard(|| {
        let p = &handle(path, "path")?.0;
        let k = &handle(kernel, "kernel")?.0;
        let d = p.dim();
        let grid = EvaluationGrid::new(
            input(lower, d, "lower")?.to_vec(),
            input(upper, d, "upper")?.to_vec(),
            points_per_axis,
        )?;
        let est = estimate_density(p, k, h, &grid)?;
        write_out(out, Box::into_raw(Box::new(ErgokdeEstimate(est))), "out")
    })
}

/// # Safety
/// `estimate` must be null or a live estimate handle.
#[no_mangle]
pub unsafe extern "C" fn ergokde_estimate_free(estimate: *mut ErgokdeEstimate) {
    if !estimate.is_null() {
        drop(Box::from_raw(estimate));
    }
}

/// Number of grid points.
///
/// # Safety
/// `estimate` must be a live handle; `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ergokde_estimate_len(estimate: *const ErgokdeEstimate, out: *mut usize) -> ErgokdeStatus {
    guard(|| write_out(out, handle(estimate, "estimate")?.0.values.len(), "out"))
}

/// # Safety
/// `buf` must be valid for `buf_len` writes.
#[no_mangle]
pub unsafe extern "C" fn ergokde_estimate_values(
    estimate: *const ErgokdeEstimate,
    buf: *mut f64,
    buf_len: usize,
) -> ErgokdeStatus {
    guard(|| copy_out(&handle(estimate, "estimate")?.0.values, buf, buf_len))
}

/// Lepski-type selection on the grid `eta^{-l}`; `EmptyGrid` when the horizon is too short.
///
/// # Safety
/// As for [`ergokde_estimate`]; `out_h` valid for writing.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn ergokde_select_bandwidth(
    path: *const ErgokdePath,
    kernel: *const ErgokdeKernel,
    eta: f64,
    k: usize,
    lower: *const f64,
    upper: *const f64,
    points_per_axis: usize,
    out_h: *mut f64,
) -> ErgokdeStatus {
    guard(|| {
        let p = &handle(path, "path")?.0;
        let kern = &handle(kernel, "kernel")?.0;
        let d = p.dim();
        let eval = EvaluationGrid::new(
            input(lower, d, "lower")?.to_vec(),
            input(upper, d, "upper")?.to_vec(),
            points_per_axis,
        )?;
        let grid = build_grid(p.horizon(), d, eta, k)?;
        write_out(out_h, select_bandwidth(p, kern, &grid, &eval)?.selected_h, "out_h")
    })
}

/// `ψ_d(x)` for `x` in `(0, e)`.
///
/// # Safety
/// `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ergokde_psi(x: f64, dim: usize, out: *mut f64) -> ErgokdeStatus {
    guard(|| write_out(out, psi_d(x, dim)?, "out"))
}

/// Variance proxy `σ(h, T)`.
///
/// # Safety
/// `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ergokde_sigma(h: f64, t: f64, dim: usize, k: usize, out: *mut f64) -> ErgokdeStatus {
    guard(|| write_out(out, sigma_proxy(h, t, dim, k)?, "out"))
}

/// Deviation bound `Υ(h, T, u)`.
///
/// # Safety
/// `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ergokde_upsilon(h: f64, t: f64, u: f64, dim: usize, out: *mut f64) -> ErgokdeStatus {
    guard(|| write_out(out, upsilon(h, t, u, dim)?, "out"))
}

/// Pointwise rate `Φ`.
///
/// # Safety
/// `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ergokde_rate_phi(dim: usize, beta: f64, t: f64, out: *mut f64) -> ErgokdeStatus {
    guard(|| write_out(out, rate_phi(dim, beta, t)?, "out"))
}

/// Sup-norm rate `Ψ`.
///
/// # Safety
/// `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn ergokde_rate_psi(dim: usize, beta: f64, t: f64, out: *mut f64) -> ErgokdeStatus {
    guard(|| write_out(out, rate_psi(dim, beta, t)?, "out"))
}

/// Asymptotic bandwidth, clipped to 1; `clipped` (may be null) reports whether clipping happened.
///
/// # Safety
/// `out_h` valid for writing; `clipped` valid or null.
#[no_mangle]
pub unsafe extern "C" fn ergokde_theoretical_bandwidth(
    dim: usize,
    beta: f64,
    t: f64,
    c_h: f64,
    out_h: *mut f64,
    clipped: *mut bool,
) -> ErgokdeStatus {
    guard(|| {
        let b = theoretical_bandwidth(dim, beta, t, c_h)?;
        if !clipped.is_null() {
            clipped.write(b.clipped);
        }
        write_out(out_h, b.h, "out_h")
    })
}
