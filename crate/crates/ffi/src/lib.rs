//! C ABI over `relsw`.
//!
//! Every function returns a [`RelswStatus`]; results come back through out
//! pointers. On failure the message is kept per thread and can be read with
//! [`relsw_last_error_message`]. Handles are opaque and must be released with
//! their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nalgebra::DMatrix;
use relsw::cli::spec_file::{LoadedPair, PairSpecFile};
use relsw::dimension::{dim_adapted, dim_main, dim_tunneling};
use relsw::error::{Error, EXIT_NUMERICAL, EXIT_SCHEMA};
use relsw::specflow::{q_signature_closed_form, resonance_prediction, spectral_flow_bruteforce, SpectralPath};
use relsw::spinc::degree_along_sigma;
use relsw::vortex::{solve_vortex, SolveOptions, TorusGeometry, VortexProblem, VortexSolution};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelswStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed input.
    Schema = 3,
    /// A formula precondition does not hold.
    Precondition = 4,
    /// A numerical method did not converge.
    Numerical = 5,
    IndexOutOfRange = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// A pair (X, Σ) with its spin^c structures, built from a JSON spec.
pub struct RelswPair {
    inner: LoadedPair,
}

/// A solved vortex problem.
pub struct RelswVortex {
    solution: VortexSolution,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: RelswStatus, msg: impl Into<String>) -> RelswStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> RelswStatus {
    let status = match e.exit_code() {
        EXIT_SCHEMA => RelswStatus::Schema,
        EXIT_NUMERICAL => RelswStatus::Numerical,
        _ => RelswStatus::Precondition,
    };
    fail(status, e.to_string())
}

/// Runs `f`, converting panics into `Panic` and clearing the error on success.
fn guard(f: impl FnOnce() -> RelswStatus) -> RelswStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(RelswStatus::Ok) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            RelswStatus::Ok
        }
        Ok(s) => s,
        Err(_) => fail(RelswStatus::Panic, "internal panic"),
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(RelswStatus::NullPointer, concat!(stringify!($p), " is null"));
        })+
    };
}

/// The message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn relsw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a JSON spec (the CLI input format) and builds its pair.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn relsw_pair_from_json(json: *const c_char, out: *mut *mut RelswPair) -> RelswStatus {
    guard(|| {
        non_null!(json, out);
        let text = match CStr::from_ptr(json).to_str() {
            Ok(t) => t,
            Err(_) => return fail(RelswStatus::InvalidUtf8, "spec is not UTF-8"),
        };
        match PairSpecFile::parse(text).and_then(|s| s.load_pair()) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(RelswPair { inner }));
                RelswStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `pair` must come from [`relsw_pair_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn relsw_pair_free(pair: *mut RelswPair) {
    if !pair.is_null() {
        drop(Box::from_raw(pair));
    }
}

/// # Safety
/// `pair` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn relsw_pair_genus(pair: *const RelswPair, out: *mut i64) -> RelswStatus {
    guard(|| {
        non_null!(pair, out);
        *out = (&*pair).inner.pair.genus();
        RelswStatus::Ok
    })
}

/// # Safety
/// `pair` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn relsw_pair_sigma_self(pair: *const RelswPair, out: *mut i64) -> RelswStatus {
    guard(|| {
        non_null!(pair, out);
        *out = (&*pair).inner.pair.sigma_self();
        RelswStatus::Ok
    })
}

/// # Safety
/// `pair` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn relsw_pair_spinc_count(pair: *const RelswPair, out: *mut usize) -> RelswStatus {
    guard(|| {
        non_null!(pair, out);
        *out = (&*pair).inner.spinc.len();
        RelswStatus::Ok
    })
}

/// Dimension data of spin^c structure `index`: the main and adapted expected
/// dimensions and twice the degree along Σ.
///
/// # Safety
/// `pair` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn relsw_pair_dimensions(
    pair: *const RelswPair,
    index: usize,
    d_main: *mut i64,
    d_adapted: *mut i64,
    twice_degree_along_sigma: *mut i64,
) -> RelswStatus {
    guard(|| {
        non_null!(pair, d_main, d_adapted, twice_degree_along_sigma);
        let Some(s) = (&*pair).inner.spinc.get(index) else {
            return fail(RelswStatus::IndexOutOfRange, format!("spin^c index {index} out of range"));
        };
        let (main, adapted) = match (dim_main(s), dim_adapted(s)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return from_error(e.into()),
        };
        *d_main = main;
        *d_adapted = adapted;
        *twice_degree_along_sigma = degree_along_sigma(s).twice();
        RelswStatus::Ok
    })
}

/// Tunneling dimension; `adapted` is 0 or 1.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn relsw_dim_tunneling(
    a: i64,
    b_plus: i64,
    b_minus: i64,
    g: i64,
    ell: i64,
    adapted: i32,
    out: *mut i64,
) -> RelswStatus {
    guard(|| {
        non_null!(out);
        match dim_tunneling(a, b_plus, b_minus, g, ell, adapted != 0) {
            Ok(d) => {
                *out = d;
                RelswStatus::Ok
            }
            Err(e) => from_error(e.into()),
        }
    })
}

/// (dim Ker Q, dim₋ Q) in closed form.
///
/// # Safety
/// The out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn relsw_q_signature(
    g: i64,
    d_plus: i64,
    d_minus: i64,
    dim_ker: *mut i64,
    dim_neg: *mut i64,
) -> RelswStatus {
    guard(|| {
        non_null!(dim_ker, dim_neg);
        match q_signature_closed_form(g, d_plus, d_minus) {
            Ok((k, n)) => {
                *dim_ker = k;
                *dim_neg = n;
                RelswStatus::Ok
            }
            Err(e) => from_error(e.into()),
        }
    })
}

unsafe fn matrix(data: *const f64, n: usize) -> DMatrix<f64> {
    DMatrix::from_row_slice(n, n, std::slice::from_raw_parts(data, n * n))
}

/// Spectral flow of H₀ + tP by eigenvalue crossings (row-major n×n inputs).
///
/// # Safety
/// `h0` and `p` must point to n·n doubles; `flow` must be writable.
#[no_mangle]
pub unsafe extern "C" fn relsw_spectral_flow(
    h0: *const f64,
    p: *const f64,
    n: usize,
    samples: usize,
    flow: *mut i64,
) -> RelswStatus {
    guard(|| {
        non_null!(h0, p, flow);
        let result = SpectralPath::new(matrix(h0, n), matrix(p, n), samples).and_then(|path| spectral_flow_bruteforce(&path));
        match result {
            Ok(r) => {
                *flow = r.flow;
                RelswStatus::Ok
            }
            Err(e) => from_error(e.into()),
        }
    })
}

/// Spectral flow predicted from the resonance forms up to `depth`.
///
/// # Safety
/// `h0` and `p` must point to n·n doubles; `flow` must be writable.
#[no_mangle]
pub unsafe extern "C" fn relsw_resonance_flow(
    h0: *const f64,
    p: *const f64,
    n: usize,
    depth: usize,
    flow: *mut i64,
) -> RelswStatus {
    guard(|| {
        non_null!(h0, p, flow);
        match resonance_prediction(&matrix(h0, n), &matrix(p, n), depth) {
            Ok(r) => {
                *flow = r.predicted_flow;
                RelswStatus::Ok
            }
            Err(e) => from_error(e.into()),
        }
    })
}

/// Solves the vortex equation on the torus with modulus `tau_re + i tau_im`.
/// `divisor` holds `degree` points as (s, t) lattice coordinates; `seed` is
/// used when `use_seed` is nonzero.
///
/// # Safety
/// `divisor` must point to 2·degree doubles (or be null when degree is 0);
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn relsw_vortex_solve(
    grid: usize,
    modulus_re: f64,
    modulus_im: f64,
    area: f64,
    tau: f64,
    divisor: *const f64,
    degree: usize,
    tolerance: f64,
    seed: u64,
    use_seed: i32,
    out: *mut *mut RelswVortex,
) -> RelswStatus {
    guard(|| {
        non_null!(out);
        if degree > 0 && divisor.is_null() {
            return fail(RelswStatus::NullPointer, "divisor is null");
        }
        let points: Vec<(f64, f64)> = if degree == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(divisor, 2 * degree).chunks(2).map(|c| (c[0], c[1])).collect()
        };
        let result = TorusGeometry::new(num_complex::Complex64::new(modulus_re, modulus_im), grid, area)
            .and_then(|g| VortexProblem::new(g, points, tau, tolerance))
            .and_then(|p| {
                let opts = SolveOptions { seed: (use_seed != 0).then_some(seed), ..SolveOptions::default() };
                solve_vortex(&p, &opts)
            });
        match result {
            Ok(solution) => {
                *out = Box::into_raw(Box::new(RelswVortex { solution }));
                RelswStatus::Ok
            }
            Err(e) => from_error(e.into()),
        }
    })
}

/// # Safety
/// `v` must come from [`relsw_vortex_solve`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn relsw_vortex_free(v: *mut RelswVortex) {
    if !v.is_null() {
        drop(Box::from_raw(v));
    }
}

/// Scalar diagnostics of a solve: ∫ iF_A, the plaquette flux sum, the
/// Newton residual and the zero count.
///
/// # Safety
/// `v` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn relsw_vortex_diagnostics(
    v: *const RelswVortex,
    curvature_integral: *mut f64,
    plaquette_flux_sum: *mut f64,
    residual_sup: *mut f64,
    zero_count: *mut i64,
) -> RelswStatus {
    guard(|| {
        non_null!(v, curvature_integral, plaquette_flux_sum, residual_sup, zero_count);
        let s = &(&*v).solution;
        *curvature_integral = s.curvature_integral;
        *plaquette_flux_sum = s.plaquette_flux_sum;
        *residual_sup = s.residual_sup;
        *zero_count = s.zero_count;
        RelswStatus::Ok
    })
}

/// Copies |Φ| on the N×N grid (row-major) into `buf` of length `len`.
/// With a null `buf`, only writes the required length to `needed`.
///
/// # Safety
/// `v` must be a live handle; `buf` must hold `len` doubles; `needed` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn relsw_vortex_phi_modulus(
    v: *const RelswVortex,
    buf: *mut f64,
    len: usize,
    needed: *mut usize,
) -> RelswStatus {
    guard(|| {
        non_null!(v, needed);
        let field = &(&*v).solution.phi_modulus;
        *needed = field.len();
        if buf.is_null() {
            return RelswStatus::Ok;
        }
        if len < field.len() {
            return fail(RelswStatus::BufferTooSmall, format!("need {} doubles, got {len}", field.len()));
        }
        ptr::copy_nonoverlapping(field.as_ptr(), buf, field.len());
        RelswStatus::Ok
    })
}
