//! C ABI over `cone2d`.
//!
//! Objects cross the boundary as opaque handles created by `*_from_json`
//! and released with the matching `*_free`. Every fallible call returns a
//! [`Cone2dStatus`]; on a nonzero status the message is available from
//! [`cone2d_last_error`] until the next call on the same thread. Results
//! that are themselves structured (certificates, reports) come back as
//! JSON strings owned by the caller and released with
//! [`cone2d_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use cone2d::moments::{self, MomentFunctional};
use cone2d::topologies::{self, Region, RegionFile, WeightFunction};
use cone2d::{approx, Error, Polynomial};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cone2dStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Invariant = 4,
    Dimension = 5,
    InvalidArgument = 6,
    /// The input is certified outside the cone (or the module's K_M).
    NotMember = 7,
    /// Rank deficiency, iteration cap or a missing separated point.
    Numerical = 8,
    Io = 9,
    Panic = 10,
}

pub struct Cone2dPolynomial(Polynomial);
pub struct Cone2dRegion(Region);
pub struct Cone2dWeight(WeightFunction);
pub struct Cone2dMoments(MomentFunctional);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes were replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> Cone2dStatus {
    match e {
        Error::Parse(_) => Cone2dStatus::Parse,
        Error::Invariant { .. } | Error::NotSubmultiplicative { .. } | Error::MissingWeight { .. } => {
            Cone2dStatus::Invariant
        }
        Error::DimensionMismatch { .. } => Cone2dStatus::Dimension,
        Error::InvalidArgument(_) | Error::EmptyRegion | Error::RadiusViolation { .. } | Error::DegreeBudget { .. } => {
            Cone2dStatus::InvalidArgument
        }
        Error::NonMembership { .. } | Error::ModuleContradiction { .. } => Cone2dStatus::NotMember,
        Error::RankDeficient { .. } | Error::NoSeparatedPoint { .. } | Error::IterationCap(_) => {
            Cone2dStatus::Numerical
        }
        Error::Io(_) => Cone2dStatus::Io,
    }
}

enum Fail {
    Status(Cone2dStatus, String),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

/// Runs `f`, converting errors and panics into a status plus message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> Cone2dStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => Cone2dStatus::Ok,
        Ok(Err(Fail::Status(s, m))) => {
            set_error(m);
            s
        }
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            Cone2dStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail::Status(Cone2dStatus::NullPointer, format!("{what} is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|e| Fail::Status(Cone2dStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_json<T: serde::Serialize>(out: *mut *mut c_char, value: &T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    let s = serde_json::to_string(value).map_err(|e| Fail::Core(e.into()))?;
    *out = CString::new(s).expect("JSON has no nul bytes").into_raw();
    Ok(())
}

/// `count` points of dimension `n`, row-major.
unsafe fn points(data: *const f64, count: usize, n: usize) -> Result<Vec<Vec<f64>>, Fail> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if data.is_null() {
        return Err(null("points"));
    }
    let flat = std::slice::from_raw_parts(data, count * n);
    Ok(flat.chunks(n.max(1)).map(<[f64]>::to_vec).collect())
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn cone2d_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn cone2d_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cone2d_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cone2d_polynomial_from_json(
    json: *const c_char,
    out: *mut *mut Cone2dPolynomial,
) -> Cone2dStatus {
    guard(|| {
        let p = Polynomial::from_json(text(json, "json")?)?;
        put(out, Cone2dPolynomial(p))
    })
}

/// # Safety
/// `p` must be null or a handle from [`cone2d_polynomial_from_json`].
#[no_mangle]
pub unsafe extern "C" fn cone2d_polynomial_free(p: *mut Cone2dPolynomial) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of variables, or 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live polynomial handle.
#[no_mangle]
pub unsafe extern "C" fn cone2d_polynomial_nvars(p: *const Cone2dPolynomial) -> usize {
    p.as_ref().map_or(0, |p| p.0.n())
}

/// Total degree; the zero polynomial has degree 0.
///
/// # Safety
/// `p` must be null or a live polynomial handle.
#[no_mangle]
pub unsafe extern "C" fn cone2d_polynomial_degree(p: *const Cone2dPolynomial) -> u32 {
    p.as_ref().map_or(0, |p| p.0.degree())
}

/// # Safety
/// `x` must point to `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cone2d_polynomial_eval(
    p: *const Cone2dPolynomial,
    x: *const f64,
    n: usize,
    out: *mut f64,
) -> Cone2dStatus {
    guard(|| {
        let p = borrow(p, "polynomial")?;
        let x = points(x, 1, n)?.pop().unwrap_or_default();
        let v = p.0.eval(&x)?;
        *out.as_mut().ok_or_else(|| null("output pointer"))? = v;
        Ok(())
    })
}

/// # Safety
/// `p` must be a live handle; `out` receives a string to release with
/// [`cone2d_string_free`].
#[no_mangle]
pub unsafe extern "C" fn cone2d_polynomial_to_json(p: *const Cone2dPolynomial, out: *mut *mut c_char) -> Cone2dStatus {
    guard(|| {
        let p = borrow(p, "polynomial")?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        *out = CString::new(p.0.to_json()).expect("JSON has no nul bytes").into_raw();
        Ok(())
    })
}

/// Builds a region. Inequality files referenced by path are resolved
/// against `base_dir`, which may be null.
///
/// # Safety
/// `json` and a non-null `base_dir` must be nul-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn cone2d_region_from_json(
    json: *const c_char,
    base_dir: *const c_char,
    out: *mut *mut Cone2dRegion,
) -> Cone2dStatus {
    guard(|| {
        let file: RegionFile = serde_json::from_str(text(json, "json")?).map_err(Error::from)?;
        let base = if base_dir.is_null() { None } else { Some(text(base_dir, "base_dir")?) };
        let k = Region::from_file(file, base.map(Path::new))?;
        put(out, Cone2dRegion(k))
    })
}

/// # Safety
/// `k` must be null or a live region handle.
#[no_mangle]
pub unsafe extern "C" fn cone2d_region_free(k: *mut Cone2dRegion) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}

/// # Safety
/// `k` must be null or a live region handle.
#[no_mangle]
pub unsafe extern "C" fn cone2d_region_sample_count(k: *const Cone2dRegion) -> usize {
    k.as_ref().map_or(0, |k| k.0.samples().len())
}

/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cone2d_weight_from_json(json: *const c_char, out: *mut *mut Cone2dWeight) -> Cone2dStatus {
    guard(|| {
        let w = WeightFunction::from_json(text(json, "json")?)?;
        put(out, Cone2dWeight(w))
    })
}

/// # Safety
/// `w` must be null or a live weight handle.
#[no_mangle]
pub unsafe extern "C" fn cone2d_weight_free(w: *mut Cone2dWeight) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cone2d_moments_from_json(json: *const c_char, out: *mut *mut Cone2dMoments) -> Cone2dStatus {
    guard(|| {
        let l = MomentFunctional::from_json(text(json, "json")?)?;
        put(out, Cone2dMoments(l))
    })
}

/// # Safety
/// `l` must be null or a live moments handle.
#[no_mangle]
pub unsafe extern "C" fn cone2d_moments_free(l: *mut Cone2dMoments) {
    if !l.is_null() {
        drop(Box::from_raw(l));
    }
}

/// Sampled sup-norm of `p` over `k`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cone2d_sup_norm(
    p: *const Cone2dPolynomial,
    k: *const Cone2dRegion,
    out: *mut f64,
) -> Cone2dStatus {
    guard(|| {
        let s = topologies::sup_norm(&borrow(p, "polynomial")?.0, &borrow(k, "region")?.0)?;
        *out.as_mut().ok_or_else(|| null("output pointer"))? = s.value;
        Ok(())
    })
}

/// Weighted l1 norm of `p`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cone2d_phi_norm(
    p: *const Cone2dPolynomial,
    w: *const Cone2dWeight,
    out: *mut f64,
) -> Cone2dStatus {
    guard(|| {
        let v = topologies::phi_norm(&borrow(p, "polynomial")?.0, &borrow(w, "weight")?.0)?;
        *out.as_mut().ok_or_else(|| null("output pointer"))? = v;
        Ok(())
    })
}

/// Single-power approximation at `count` points of dimension `n`
/// (row-major in `pts`). Writes the certificate as JSON. A negative value
/// at some point returns [`Cone2dStatus::NotMember`].
///
/// # Safety
/// `pts` must hold `count * n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cone2d_tk_approximate(
    p: *const Cone2dPolynomial,
    pts: *const f64,
    count: usize,
    n: usize,
    d: u32,
    eps: f64,
    out: *mut *mut c_char,
) -> Cone2dStatus {
    guard(|| {
        let cert = approx::tk_approximate(&borrow(p, "polynomial")?.0, &points(pts, count, n)?, d, eps)?;
        put_json(out, &cert)
    })
}

/// Sup-norm approximation on `k`; writes the certificate as JSON.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cone2d_sup_approximate(
    p: *const Cone2dPolynomial,
    k: *const Cone2dRegion,
    d: u32,
    eps: f64,
    max_degree: u32,
    out: *mut *mut c_char,
) -> Cone2dStatus {
    guard(|| {
        let cert = approx::sup_approximate(&borrow(p, "polynomial")?.0, &borrow(k, "region")?.0, d, eps, max_degree)?;
        put_json(out, &cert)
    })
}

/// Hankel PSD check. `psd` receives 1 or 0, `min_eigenvalue` the smallest
/// eigenvalue of the moment matrix; either may be null.
///
/// # Safety
/// `l` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cone2d_hankel_psd_check(
    l: *const Cone2dMoments,
    tol: f64,
    psd: *mut i32,
    min_eigenvalue: *mut f64,
) -> Cone2dStatus {
    guard(|| {
        let v = moments::hankel_psd_check(&borrow(l, "moments")?.0, tol)?;
        if let Some(o) = psd.as_mut() {
            *o = i32::from(v.psd);
        }
        if let Some(o) = min_eigenvalue.as_mut() {
            *o = v.min_eigenvalue;
        }
        Ok(())
    })
}

/// Nonnegative measure on the samples of `k` matching `l`; writes the
/// recovery report as JSON.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cone2d_measure_recover(
    l: *const Cone2dMoments,
    k: *const Cone2dRegion,
    tol: f64,
    out: *mut *mut c_char,
) -> Cone2dStatus {
    guard(|| {
        let r = moments::measure_recover(&borrow(l, "moments")?.0, &borrow(k, "region")?.0, tol)?;
        put_json(out, &r)
    })
}
