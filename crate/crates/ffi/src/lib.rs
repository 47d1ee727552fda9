//! C ABI over the npweyl pipeline: opaque handles for quadratures and solved
//! spectra, plain structs for reports, and integer status codes matching the
//! CLI exit-code contract (0 ok, 1 invalid argument, 2 geometry, 3 numerics).
//!
//! Every constructor hands ownership to the caller; release handles with the
//! matching `*_free`. The most recent error message per thread is available
//! through [`npw_last_error_message`].

use npweyl::invariants::geometry_report;
use npweyl::nystrom::assemble;
use npweyl::spectrum::{eigenvalues, exact_sphere_spectrum, weyl_fit, FitWindow, SpectrumResult};
use npweyl::surface::{
    build_quadrature, clifford_torus, ellipsoid, load_mesh, sphere, torus, SurfaceChart,
    SurfaceQuadrature,
};
use npweyl::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_last_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NpwStatus {
    Ok = 0,
    InvalidArgument = 1,
    Geometry = 2,
    Numerics = 3,
}

fn status_of(err: &Error) -> NpwStatus {
    match err {
        Error::InvalidConfig(_) | Error::InvalidParameter(_) | Error::InvalidWindow { .. } => {
            NpwStatus::InvalidArgument
        }
        Error::EigenSolver(_) | Error::Io(_) | Error::Json(_) => NpwStatus::Numerics,
        _ => NpwStatus::Geometry,
    }
}

fn fail(err: Error) -> NpwStatus {
    set_last_error(&err.to_string());
    status_of(&err)
}

fn invalid(message: &str) -> NpwStatus {
    set_last_error(message);
    NpwStatus::InvalidArgument
}

/// Opaque discrete surface: nodes, weights, curvatures, Euler characteristic.
pub struct NpwQuadrature {
    inner: SurfaceQuadrature,
}

/// Opaque solved spectrum: ordered eigenvalues plus singular values.
pub struct NpwSpectrum {
    inner: SpectrumResult,
}

/// Geometric invariants of a quadrature. `c_plus`/`c_minus` are NaN when the
/// signed split was not requested.
#[repr(C)]
pub struct NpwGeometryReport {
    pub area: f64,
    pub willmore_energy: f64,
    pub gauss_bonnet_integral: f64,
    pub gauss_bonnet_residual: f64,
    pub euler_characteristic: i32,
    pub predicted_weyl_constant: f64,
    pub c_plus: f64,
    pub c_minus: f64,
}

/// Decay-constant fit over a rank window.
#[repr(C)]
pub struct NpwWeylFit {
    pub fitted_constant: f64,
    pub slope: f64,
    pub j_min: usize,
    pub j_max: usize,
    pub predicted_constant: f64,
    pub relative_deviation: f64,
}

fn emit_quadrature(
    chart: Result<SurfaceChart, Error>,
    n_s: usize,
    n_t: usize,
    out: *mut *mut NpwQuadrature,
) -> NpwStatus {
    if out.is_null() {
        return invalid("out pointer is null");
    }
    let quad = chart.and_then(|c| build_quadrature(&c, n_s, n_t));
    match quad {
        Ok(inner) => {
            unsafe { *out = Box::into_raw(Box::new(NpwQuadrature { inner })) };
            NpwStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Builds a sphere quadrature.
///
/// # Safety
/// `out` must be a valid pointer to a `NpwQuadrature*` slot.
#[no_mangle]
pub unsafe extern "C" fn npw_quadrature_sphere(
    rho: f64,
    n_s: usize,
    n_t: usize,
    out: *mut *mut NpwQuadrature,
) -> NpwStatus {
    emit_quadrature(sphere(rho), n_s, n_t, out)
}

/// Builds an ellipsoid quadrature.
///
/// # Safety
/// `out` must be a valid pointer to a `NpwQuadrature*` slot.
#[no_mangle]
pub unsafe extern "C" fn npw_quadrature_ellipsoid(
    a: f64,
    b: f64,
    c: f64,
    n_s: usize,
    n_t: usize,
    out: *mut *mut NpwQuadrature,
) -> NpwStatus {
    emit_quadrature(ellipsoid(a, b, c), n_s, n_t, out)
}

/// Builds a torus quadrature (ring radius `big_r`, tube radius `small_r`).
///
/// # Safety
/// `out` must be a valid pointer to a `NpwQuadrature*` slot.
#[no_mangle]
pub unsafe extern "C" fn npw_quadrature_torus(
    big_r: f64,
    small_r: f64,
    n_s: usize,
    n_t: usize,
    out: *mut *mut NpwQuadrature,
) -> NpwStatus {
    emit_quadrature(torus(big_r, small_r), n_s, n_t, out)
}

/// Builds the Willmore-minimizing torus of revolution.
///
/// # Safety
/// `out` must be a valid pointer to a `NpwQuadrature*` slot.
#[no_mangle]
pub unsafe extern "C" fn npw_quadrature_clifford(
    n_s: usize,
    n_t: usize,
    out: *mut *mut NpwQuadrature,
) -> NpwStatus {
    emit_quadrature(Ok(clifford_torus()), n_s, n_t, out)
}

/// Loads a closed triangle mesh (OFF or OBJ) as a quadrature.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid slot pointer.
#[no_mangle]
pub unsafe extern "C" fn npw_quadrature_from_mesh(
    path: *const c_char,
    out: *mut *mut NpwQuadrature,
) -> NpwStatus {
    if path.is_null() || out.is_null() {
        return invalid("path and out must be non-null");
    }
    let path = match unsafe { CStr::from_ptr(path) }.to_str() {
        Ok(p) => p,
        Err(_) => return invalid("path is not valid UTF-8"),
    };
    match load_mesh(path) {
        Ok(inner) => {
            unsafe { *out = Box::into_raw(Box::new(NpwQuadrature { inner })) };
            NpwStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Releases a quadrature handle. Passing NULL is a no-op.
///
/// # Safety
/// `quad` must be a pointer from one of the constructors, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn npw_quadrature_free(quad: *mut NpwQuadrature) {
    if !quad.is_null() {
        drop(unsafe { Box::from_raw(quad) });
    }
}

/// Number of nodes, or 0 for NULL.
///
/// # Safety
/// `quad` must be a live quadrature handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn npw_quadrature_node_count(quad: *const NpwQuadrature) -> usize {
    if quad.is_null() {
        return 0;
    }
    unsafe { &*quad }.inner.len()
}

/// Total surface area (the sum of node weights), or NaN for NULL.
///
/// # Safety
/// `quad` must be a live quadrature handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn npw_quadrature_area(quad: *const NpwQuadrature) -> f64 {
    if quad.is_null() {
        return f64::NAN;
    }
    unsafe { &*quad }.inner.area()
}

/// Fills the geometric invariants. `signed_n_theta = 0` skips the signed
/// density split (the report then carries NaN in those slots); otherwise it
/// must be at least 64.
///
/// # Safety
/// `quad` must be a live handle and `report` a valid struct pointer.
#[no_mangle]
pub unsafe extern "C" fn npw_geometry_report(
    quad: *const NpwQuadrature,
    signed_n_theta: usize,
    report: *mut NpwGeometryReport,
) -> NpwStatus {
    if quad.is_null() || report.is_null() {
        return invalid("quad and report must be non-null");
    }
    let quad = &unsafe { &*quad }.inner;
    let signed = if signed_n_theta == 0 {
        None
    } else {
        Some(signed_n_theta)
    };
    match geometry_report(quad, signed) {
        Ok(r) => {
            unsafe {
                *report = NpwGeometryReport {
                    area: r.area,
                    willmore_energy: r.willmore_energy,
                    gauss_bonnet_integral: r.gauss_bonnet_integral,
                    gauss_bonnet_residual: r.gauss_bonnet_residual,
                    euler_characteristic: r.euler_characteristic,
                    predicted_weyl_constant: r.predicted_weyl_constant,
                    c_plus: r.c_plus.unwrap_or(f64::NAN),
                    c_minus: r.c_minus.unwrap_or(f64::NAN),
                };
            }
            NpwStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Assembles the dense operator and solves for eigenvalues and singular
/// values. O(n^3): intended for node counts up to a few thousand.
///
/// # Safety
/// `quad` must be a live handle and `out` a valid slot pointer.
#[no_mangle]
pub unsafe extern "C" fn npw_spectrum_solve(
    quad: *const NpwQuadrature,
    out: *mut *mut NpwSpectrum,
) -> NpwStatus {
    if quad.is_null() || out.is_null() {
        return invalid("quad and out must be non-null");
    }
    let quad = &unsafe { &*quad }.inner;
    match assemble(quad).and_then(|m| eigenvalues(&m)) {
        Ok(inner) => {
            unsafe { *out = Box::into_raw(Box::new(NpwSpectrum { inner })) };
            NpwStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Releases a spectrum handle. Passing NULL is a no-op.
///
/// # Safety
/// `spectrum` must be a pointer from `npw_spectrum_solve`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn npw_spectrum_free(spectrum: *mut NpwSpectrum) {
    if !spectrum.is_null() {
        drop(unsafe { Box::from_raw(spectrum) });
    }
}

/// Number of eigenvalues, or 0 for NULL.
///
/// # Safety
/// `spectrum` must be a live spectrum handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn npw_spectrum_len(spectrum: *const NpwSpectrum) -> usize {
    if spectrum.is_null() {
        return 0;
    }
    unsafe { &*spectrum }.inner.n
}

/// Largest |Im λ| over the spectrum, or NaN for NULL.
///
/// # Safety
/// `spectrum` must be a live spectrum handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn npw_spectrum_max_imag_residual(spectrum: *const NpwSpectrum) -> f64 {
    if spectrum.is_null() {
        return f64::NAN;
    }
    unsafe { &*spectrum }.inner.max_imag_residual
}

/// Copies eigenvalues (ordered by descending modulus) into `re`/`im`, which
/// must hold `len` entries each; `len` must equal `npw_spectrum_len`.
///
/// # Safety
/// `spectrum` must be live; `re` and `im` must point to `len` writable f64.
#[no_mangle]
pub unsafe extern "C" fn npw_spectrum_eigenvalues(
    spectrum: *const NpwSpectrum,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> NpwStatus {
    if spectrum.is_null() || re.is_null() || im.is_null() {
        return invalid("spectrum, re, im must be non-null");
    }
    let eigs = &unsafe { &*spectrum }.inner.eigenvalues;
    if len != eigs.len() {
        return invalid("len does not match the spectrum size");
    }
    for (k, &(a, b)) in eigs.iter().enumerate() {
        unsafe {
            *re.add(k) = a;
            *im.add(k) = b;
        }
    }
    NpwStatus::Ok
}

/// Copies the nonincreasing singular values; `len` must equal the size.
///
/// # Safety
/// `spectrum` must be live; `out` must point to `len` writable f64.
#[no_mangle]
pub unsafe extern "C" fn npw_spectrum_singular_values(
    spectrum: *const NpwSpectrum,
    out: *mut f64,
    len: usize,
) -> NpwStatus {
    if spectrum.is_null() || out.is_null() {
        return invalid("spectrum and out must be non-null");
    }
    let values = &unsafe { &*spectrum }.inner.singular_values;
    if len != values.len() {
        return invalid("len does not match the spectrum size");
    }
    for (k, &v) in values.iter().enumerate() {
        unsafe { *out.add(k) = v };
    }
    NpwStatus::Ok
}

/// Fits the decay constant over ranks [j_min, j_max] (pass 0, 0 for the
/// default window) against `predicted`.
///
/// # Safety
/// `spectrum` must be live and `fit` a valid struct pointer.
#[no_mangle]
pub unsafe extern "C" fn npw_weyl_fit(
    spectrum: *const NpwSpectrum,
    j_min: usize,
    j_max: usize,
    predicted: f64,
    fit: *mut NpwWeylFit,
) -> NpwStatus {
    if spectrum.is_null() || fit.is_null() {
        return invalid("spectrum and fit must be non-null");
    }
    let s = &unsafe { &*spectrum }.inner;
    let window = if j_min == 0 && j_max == 0 {
        FitWindow::default_for(s.n)
    } else {
        FitWindow::new(j_min, j_max)
    };
    match weyl_fit(&s.moduli(), window, predicted) {
        Ok(w) => {
            unsafe {
                *fit = NpwWeylFit {
                    fitted_constant: w.fitted_constant,
                    slope: w.slope,
                    j_min: w.window.j_min,
                    j_max: w.window.j_max,
                    predicted_constant: w.predicted_constant,
                    relative_deviation: w.relative_deviation,
                };
            }
            NpwStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Writes the first `count` entries of the exact sphere spectrum
/// (1/(2(2k+1)) with multiplicity 2k+1, descending).
///
/// # Safety
/// `out` must point to `count` writable f64.
#[no_mangle]
pub unsafe extern "C" fn npw_exact_sphere_spectrum(out: *mut f64, count: usize) -> NpwStatus {
    if out.is_null() {
        return invalid("out must be non-null");
    }
    if count == 0 {
        return invalid("count must be at least 1");
    }
    for (k, v) in exact_sphere_spectrum(count).into_iter().enumerate() {
        unsafe { *out.add(k) = v };
    }
    NpwStatus::Ok
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `cap`); returns the full message length in bytes.
///
/// # Safety
/// `buf` must point to `cap` writable bytes, or be NULL (query the length).
#[no_mangle]
pub unsafe extern "C" fn npw_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let message = slot.borrow();
        let bytes = message.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            unsafe {
                std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}
