//! C ABI for `hofer-core`.
//!
//! Objects are opaque handles created by `hc_*_new` functions and released
//! with the matching `hc_*_free`. Every fallible call returns an
//! [`HcStatus`]; the message for the most recent failure on the calling
//! thread is available from [`hc_last_error`]. Strings returned through
//! `char **` out-parameters are owned by the caller and released with
//! [`hc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use hofer_core::capacities::pipeline::{certify, CertifyConfig};
use hofer_core::cli::parse_manifold;
use hofer_core::cli::suites::{run_suite, SuiteParams};
use hofer_core::dynamics::{flow_to, hofer_length, parse_hamiltonian, HamiltonianFn};
use hofer_core::geometry::{liouville_volume, ManifoldModel, Point, ProjectivePoint};
use hofer_core::Error;
use num_complex::Complex64;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidManifold = 3,
    DomainViolation = 4,
    Unsupported = 5,
    NumericalFailure = 6,
    VerificationFailed = 7,
    InsufficientPremises = 8,
    Io = 9,
    Panic = 10,
}

impl From<&Error> for HcStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidArgument(_) => HcStatus::InvalidArgument,
            Error::InvalidManifold(_) => HcStatus::InvalidManifold,
            Error::DomainViolation(_) | Error::ContainmentViolation { .. } => HcStatus::DomainViolation,
            Error::Unsupported(_) => HcStatus::Unsupported,
            Error::ChartDegenerate { .. }
            | Error::SingularForm
            | Error::StepFailure { .. }
            | Error::NormalizationFailure(_)
            | Error::EndpointMismatch { .. }
            | Error::InfeasibleContainment { .. } => HcStatus::NumericalFailure,
            Error::UnverifiedMap(_) => HcStatus::VerificationFailed,
            Error::MissingSide(_) | Error::InsufficientPremises(_) => HcStatus::InsufficientPremises,
            Error::Io(_) => HcStatus::Io,
        }
    }
}

/// A manifold model.
pub struct HcManifold(ManifoldModel);

/// A Hamiltonian bound to a manifold.
pub struct HcHamiltonian(HamiltonianFn);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard<F: FnOnce() -> Result<(), (HcStatus, String)>>(f: F) -> HcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HcStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            HcStatus::Panic
        }
    }
}

fn core<T>(r: hofer_core::Result<T>) -> Result<T, (HcStatus, String)> {
    r.map_err(|e| (HcStatus::from(&e), e.to_string()))
}

fn null(what: &str) -> (HcStatus, String) {
    (HcStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (HcStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (HcStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (HcStatus, String)> {
    if out.is_null() {
        return Err(null("output string"));
    }
    let c = CString::new(s).map_err(|_| (HcStatus::Io, "output contains NUL".to_string()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn read_point(coords: *const f64, len: usize) -> Result<Point, (HcStatus, String)> {
    if coords.is_null() {
        return Err(null("coords"));
    }
    if len % 2 != 0 {
        return Err((HcStatus::InvalidArgument, "coords must hold (re, im) pairs".into()));
    }
    let v = std::slice::from_raw_parts(coords, len);
    let z: Vec<Complex64> = v.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
    Ok(Point::Projective(core(ProjectivePoint::new(z))?))
}

/// Message describing the last failure on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a manifold: `cp2`, `blowup` (uses `lambda`), `sphere`, `disk`,
/// `cp1xdisk`, `cp2xdisk` or `blowupxdisk` (use `disk_area`).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_manifold_new(
    name: *const c_char,
    lambda: f64,
    disk_area: f64,
    out: *mut *mut HcManifold,
) -> HcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let m = core(parse_manifold(read_str(name, "name")?, lambda, disk_area))?;
        *out = Box::into_raw(Box::new(HcManifold(m)));
        Ok(())
    })
}

/// # Safety
/// `m` must come from [`hc_manifold_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn hc_manifold_free(m: *mut HcManifold) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Liouville volume `∫ ω^n / n!`.
///
/// # Safety
/// `m` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hc_manifold_volume(m: *const HcManifold, out: *mut f64) -> HcStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("manifold"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = liouville_volume(&m.0);
        Ok(())
    })
}

/// Parses a Hamiltonian expression such as `P`, `2P`, `Q` or `P+0.5*Q`.
///
/// # Safety
/// `m` must be a live handle, `expr` NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hc_hamiltonian_parse(
    m: *const HcManifold,
    expr: *const c_char,
    out: *mut *mut HcHamiltonian,
) -> HcStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("manifold"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let h = core(parse_hamiltonian(read_str(expr, "expr")?, &m.0))?;
        *out = Box::into_raw(Box::new(HcHamiltonian(h)));
        Ok(())
    })
}

/// # Safety
/// `h` must come from [`hc_hamiltonian_parse`] or be null.
#[no_mangle]
pub unsafe extern "C" fn hc_hamiltonian_free(h: *mut HcHamiltonian) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// `H(x, t)` at homogeneous coordinates given as `len` doubles
/// `(re₀, im₀, re₁, im₁, …)`.
///
/// # Safety
/// `coords` must hold `len` doubles; `h` live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hc_hamiltonian_value(
    h: *const HcHamiltonian,
    coords: *const f64,
    len: usize,
    t: f64,
    out: *mut f64,
) -> HcStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("hamiltonian"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let p = read_point(coords, len)?;
        if !h.0.manifold().contains(&p) {
            return Err((HcStatus::DomainViolation, "point is not on the manifold".into()));
        }
        *out = h.0.value(&p, t);
        Ok(())
    })
}

/// Hofer length estimate with its error bar.
///
/// # Safety
/// `h` live; `value` and `error` writable.
#[no_mangle]
pub unsafe extern "C" fn hc_hofer_length(
    h: *const HcHamiltonian,
    time_steps: usize,
    samples: usize,
    seed: u64,
    value: *mut f64,
    error: *mut f64,
) -> HcStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("hamiltonian"))?;
        let value = value.as_mut().ok_or_else(|| null("value"))?;
        let error = error.as_mut().ok_or_else(|| null("error"))?;
        let est = hofer_length(h.0.as_ref(), time_steps.max(1), samples.max(1), seed);
        *value = est.value;
        *error = est.error;
        Ok(())
    })
}

/// Flows `coords` (unit-normalized homogeneous coordinates, `len` doubles)
/// from `t0` to `t1` and writes the normalized result back in place.
///
/// # Safety
/// `coords` must hold `len` writable doubles; `h` live.
#[no_mangle]
pub unsafe extern "C" fn hc_flow(h: *const HcHamiltonian, coords: *mut f64, len: usize, t0: f64, t1: f64, tol: f64) -> HcStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("hamiltonian"))?;
        let p = read_point(coords, len)?;
        let q = core(flow_to(h.0.as_ref(), &p, t0, t1, tol))?;
        let Point::Projective(q) = q else {
            return Err((HcStatus::Unsupported, "non-projective flow result".into()));
        };
        let out = std::slice::from_raw_parts_mut(coords, len);
        for (i, z) in q.coords().iter().enumerate() {
            out[2 * i] = z.re;
            out[2 * i + 1] = z.im;
        }
        Ok(())
    })
}

/// Runs a verification suite (`flows`, `embeddings`, `regions`, `hz`,
/// `corrupted` or `all`). Writes the JSON report to `json_out` and whether
/// every check passed to `pass`.
///
/// # Safety
/// `suite` NUL-terminated; `json_out` and `pass` writable.
#[no_mangle]
pub unsafe extern "C" fn hc_verify(
    suite: *const c_char,
    epsilon: f64,
    nu: f64,
    probes: usize,
    tol: f64,
    seed: u64,
    json_out: *mut *mut c_char,
    pass: *mut c_int,
) -> HcStatus {
    guard(|| {
        let pass = pass.as_mut().ok_or_else(|| null("pass"))?;
        let params = SuiteParams { epsilon, nu, samples: probes, tol, seed };
        let reports = core(run_suite(read_str(suite, "suite")?, &params))?;
        *pass = c_int::from(reports.iter().all(|r| r.pass));
        write_string(json_out, serde_json::to_string(&reports).map_err(|e| (HcStatus::Io, e.to_string()))?)
    })
}

/// Certifies length minimality of the rotation `expr` on `m`. `r1` is an
/// asserted `r₁(M)`; pass NaN for none. Writes the JSON outcome to
/// `json_out` and 1 to `pass` when a certificate was issued.
///
/// # Safety
/// `m` live; `expr` NUL-terminated; `json_out` and `pass` writable.
#[no_mangle]
pub unsafe extern "C" fn hc_certify(
    m: *const HcManifold,
    expr: *const c_char,
    epsilon: f64,
    nu: f64,
    probes: usize,
    seed: u64,
    r1: f64,
    json_out: *mut *mut c_char,
    pass: *mut c_int,
) -> HcStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(|| null("manifold"))?;
        let pass = pass.as_mut().ok_or_else(|| null("pass"))?;
        let cfg = CertifyConfig {
            manifold: m.0.clone(),
            hamiltonian: read_str(expr, "expr")?.to_string(),
            epsilon,
            nu,
            probes,
            seed,
            r1_override: (!r1.is_nan()).then_some(r1),
            ..CertifyConfig::default()
        };
        let outcome = core(certify(&cfg))?;
        *pass = c_int::from(outcome.pass());
        write_string(json_out, serde_json::to_string(&outcome).map_err(|e| (HcStatus::Io, e.to_string()))?)
    })
}
