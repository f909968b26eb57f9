//! C ABI over `nls-blowup`.
//!
//! Every function returns an [`NlsStatus`]; results go through out-pointers.
//! Handles are opaque and released with their `_free` function. Strings
//! returned by the library are released with [`nls_string_free`]. The message
//! of the last failure on the calling thread is available from
//! [`nls_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nls_blowup::constants::{exponential_kappa, sharp_cstar, sharp_interp_constant, KappaVariant};
use nls_blowup::criteria::{auto_select, run_criterion, DrConstant};
use nls_blowup::observables::compute_observables;
use nls_blowup::profiles::{build_profile, ProfileFamily};
use nls_blowup::solver::{evolve_with_state, SolverConfig, StopReason};
use nls_blowup::{Error, FieldProfile, Grid};
use num_complex::Complex64;

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NlsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Domain = 3,
    Construction = 4,
    Overflow = 5,
    Degenerate = 6,
    Internal = 7,
    Config = 8,
    Panic = 9,
}

/// Why an evolution stopped.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NlsStopReason {
    Completed = 0,
    BlowupIndicated = 1,
    ResolutionExhausted = 2,
    NumericalOverflow = 3,
}

/// Variants of the exponential-series constant κ.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NlsKappaVariant {
    MainProof = 0,
    MainProofOptimal = 1,
    CriticalFreeVariant = 2,
}

/// Conserved and virial quantities of a sampled field.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NlsObservables {
    pub mass: f64,
    pub kinetic: f64,
    pub energy: f64,
    pub variance: f64,
    pub variance_rate: f64,
    pub grad_norm_sq: f64,
}

/// Opaque nonlinearity `N(u) = Σ c|u|^β` or the exponential series.
pub struct NlsNonlinearity(nls_blowup::Nonlinearity);

/// Opaque sampled field on a periodic grid.
pub struct NlsField(FieldProfile);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: NlsStatus, msg: impl Into<String>) -> NlsStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> NlsStatus {
    let status = match &e {
        Error::Domain(_) => NlsStatus::Domain,
        Error::Construction(_) => NlsStatus::Construction,
        Error::Overflow(_) => NlsStatus::Overflow,
        Error::Degenerate(_) => NlsStatus::Degenerate,
        Error::Internal(_) => NlsStatus::Internal,
        Error::Config(_) => NlsStatus::Config,
    };
    fail(status, e.to_string())
}

/// Runs `f`, converting errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), NlsStatus>>(f: F) -> NlsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NlsStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(NlsStatus::Panic, "panic inside nls-blowup"),
    }
}

fn lift<T>(r: nls_blowup::Result<T>) -> Result<T, NlsStatus> {
    r.map_err(from_error)
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, NlsStatus> {
    p.as_ref().ok_or_else(|| fail(NlsStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, NlsStatus> {
    p.as_mut().ok_or_else(|| fail(NlsStatus::NullPointer, format!("{what} is null")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], NlsStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(NlsStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn into_c_string(s: String, dst: &mut *mut c_char) -> Result<(), NlsStatus> {
    let c = CString::new(s).map_err(|_| fail(NlsStatus::Internal, "string contains NUL"))?;
    *dst = c.into_raw();
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. Owned by the
/// library and valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn nls_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn nls_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds `N(s) = Σ coefficients[j]·s^exponents[j]` with strictly increasing exponents.
///
/// # Safety
/// `coefficients` and `exponents` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nls_nonlinearity_new(
    coefficients: *const f64,
    exponents: *const f64,
    len: usize,
    out_handle: *mut *mut NlsNonlinearity,
) -> NlsStatus {
    guard(|| {
        let dst = out(out_handle, "out")?;
        let c = slice(coefficients, len, "coefficients")?;
        let e = slice(exponents, len, "exponents")?;
        let pairs: Vec<(f64, f64)> = c.iter().copied().zip(e.iter().copied()).collect();
        let nl = lift(nls_blowup::Nonlinearity::from_pairs(&pairs))?;
        *dst = Box::into_raw(Box::new(NlsNonlinearity(nl)));
        Ok(())
    })
}

/// Builds the exponential series `N(s) = e^s` truncated at `truncation_order` terms.
///
/// # Safety
/// `out_handle` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nls_nonlinearity_exponential(
    truncation_order: usize,
    out_handle: *mut *mut NlsNonlinearity,
) -> NlsStatus {
    guard(|| {
        let dst = out(out_handle, "out")?;
        let nl = lift(nls_blowup::Nonlinearity::exponential(truncation_order))?;
        *dst = Box::into_raw(Box::new(NlsNonlinearity(nl)));
        Ok(())
    })
}

/// # Safety
/// `nl` must come from this library and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn nls_nonlinearity_free(nl: *mut NlsNonlinearity) {
    if !nl.is_null() {
        drop(Box::from_raw(nl));
    }
}

/// Wraps `num_points` samples on `[-half_width, half_width)`.
///
/// # Safety
/// `re` and `im` must point to `num_points` doubles; `out_handle` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nls_field_new(
    half_width: f64,
    num_points: usize,
    re: *const f64,
    im: *const f64,
    out_handle: *mut *mut NlsField,
) -> NlsStatus {
    guard(|| {
        let dst = out(out_handle, "out")?;
        let grid = lift(Grid::new(half_width, num_points))?;
        let re = slice(re, num_points, "re")?;
        let im = slice(im, num_points, "im")?;
        let samples = re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        let f = lift(FieldProfile::new(grid, samples))?;
        *dst = Box::into_raw(Box::new(NlsField(f)));
        Ok(())
    })
}

/// Samples `a·e^{-x²/2}·e^{i(θ + b/4)x²}`. Zero `half_width`/`num_points`
/// select the family's recommended grid.
///
/// # Safety
/// `out_handle` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nls_field_chirped_gaussian(
    theta: f64,
    a: f64,
    b: f64,
    half_width: f64,
    num_points: usize,
    out_handle: *mut *mut NlsField,
) -> NlsStatus {
    guard(|| {
        let dst = out(out_handle, "out")?;
        let fam = ProfileFamily::ChirpedGaussian { theta, a, b };
        let rec = fam.recommended_grid();
        let grid = lift(Grid::new(
            if half_width > 0.0 { half_width } else { rec.half_width },
            if num_points > 0 { num_points } else { rec.num_points },
        ))?;
        let f = lift(build_profile(&fam, grid))?;
        *dst = Box::into_raw(Box::new(NlsField(f)));
        Ok(())
    })
}

/// # Safety
/// `field` must come from this library and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn nls_field_free(field: *mut NlsField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Number of grid points of `field`.
///
/// # Safety
/// `field` must be a live handle; `out_len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nls_field_len(field: *const NlsField, out_len: *mut usize) -> NlsStatus {
    guard(|| {
        *out(out_len, "out_len")? = deref(field, "field")?.0.samples().len();
        Ok(())
    })
}

/// Copies the samples into `re` and `im`, which must hold `len` doubles.
///
/// # Safety
/// `field` must be a live handle; `re` and `im` must be writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn nls_field_samples(
    field: *const NlsField,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> NlsStatus {
    guard(|| {
        let s = deref(field, "field")?.0.samples();
        if len != s.len() {
            return Err(fail(NlsStatus::Domain, format!("buffer length {len} != {} samples", s.len())));
        }
        if re.is_null() || im.is_null() {
            return Err(fail(NlsStatus::NullPointer, "sample buffer is null"));
        }
        let (re, im) = (std::slice::from_raw_parts_mut(re, len), std::slice::from_raw_parts_mut(im, len));
        for (j, z) in s.iter().enumerate() {
            re[j] = z.re;
            im[j] = z.im;
        }
        Ok(())
    })
}

/// Sharp constant `C*(p)` of the one-dimensional Gagliardo–Nirenberg inequality.
///
/// # Safety
/// `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nls_sharp_cstar(p: f64, out_value: *mut f64) -> NlsStatus {
    guard(|| {
        *out(out_value, "out")? = lift(sharp_cstar(p))?;
        Ok(())
    })
}

/// Sharp `C(δ)` with `a^p ≤ C a² + δ a^q` for all `a ≥ 0`.
///
/// # Safety
/// `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nls_interp_constant(p: f64, q: f64, delta: f64, out_value: *mut f64) -> NlsStatus {
    guard(|| {
        *out(out_value, "out")? = lift(sharp_interp_constant(p, q, delta))?.constant;
        Ok(())
    })
}

/// Threshold κ of the exponential-series criterion `E + κM < 0`.
///
/// # Safety
/// `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nls_exponential_kappa(variant: NlsKappaVariant, out_value: *mut f64) -> NlsStatus {
    guard(|| {
        let v = match variant {
            NlsKappaVariant::MainProof => KappaVariant::MainProof,
            NlsKappaVariant::MainProofOptimal => KappaVariant::MainProofOptimal,
            NlsKappaVariant::CriticalFreeVariant => KappaVariant::CriticalFreeVariant,
        };
        *out(out_value, "out")? = lift(exponential_kappa(v))?.kappa;
        Ok(())
    })
}

/// # Safety
/// `field` and `nl` must be live handles; `out_obs` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nls_observables(
    field: *const NlsField,
    nl: *const NlsNonlinearity,
    out_obs: *mut NlsObservables,
) -> NlsStatus {
    guard(|| {
        let o = lift(compute_observables(&deref(field, "field")?.0, &deref(nl, "nl")?.0))?;
        *out(out_obs, "out")? = NlsObservables {
            mass: o.mass,
            kinetic: o.kinetic,
            energy: o.energy,
            variance: o.variance,
            variance_rate: o.variance_rate,
            grad_norm_sq: o.grad_norm_sq,
        };
        Ok(())
    })
}

/// Evaluates the criteria matching the structure of `nl` and writes a JSON
/// array of reports to `*out_json`, to be released with [`nls_string_free`].
/// `criterion` selects a single criterion by name; NULL selects automatically.
///
/// # Safety
/// `field` and `nl` must be live handles; `criterion` is NULL or a
/// NUL-terminated string; `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nls_criteria_report_json(
    field: *const NlsField,
    nl: *const NlsNonlinearity,
    criterion: *const c_char,
    out_json: *mut *mut c_char,
) -> NlsStatus {
    guard(|| {
        let dst = out(out_json, "out_json")?;
        let nl = &deref(nl, "nl")?.0;
        let obs = lift(compute_observables(&deref(field, "field")?.0, nl))?;
        let names: Vec<String> = if criterion.is_null() {
            auto_select(nl).into_iter().map(String::from).collect()
        } else {
            let s = CStr::from_ptr(criterion)
                .to_str()
                .map_err(|_| fail(NlsStatus::InvalidUtf8, "criterion is not UTF-8"))?;
            vec![s.to_owned()]
        };
        let reports = names
            .iter()
            .map(|n| lift(run_criterion(n, nl, &obs, false, DrConstant::Sharp)))
            .collect::<Result<Vec<_>, _>>()?;
        let text = serde_json::to_string(&reports).map_err(|e| fail(NlsStatus::Internal, e.to_string()))?;
        into_c_string(text, dst)
    })
}

/// Evolves `field` in place to `t_end` with step `dt`, stopping early on a
/// blow-up or resolution indicator. Writes the stop reason and final time.
///
/// # Safety
/// `field` and `nl` must be live handles; the out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn nls_evolve(
    field: *mut NlsField,
    nl: *const NlsNonlinearity,
    dt: f64,
    t_end: f64,
    out_reason: *mut NlsStopReason,
    out_time: *mut f64,
) -> NlsStatus {
    guard(|| {
        let reason = out(out_reason, "out_reason")?;
        let time = out(out_time, "out_time")?;
        let f = field.as_mut().ok_or_else(|| fail(NlsStatus::NullPointer, "field is null"))?;
        let cfg = SolverConfig { dt, t_end, ..SolverConfig::default() };
        let ev = lift(evolve_with_state(&f.0, &deref(nl, "nl")?.0, &cfg))?;
        *reason = match ev.trace.stop_reason {
            StopReason::Completed => NlsStopReason::Completed,
            StopReason::BlowupIndicated => NlsStopReason::BlowupIndicated,
            StopReason::ResolutionExhausted => NlsStopReason::ResolutionExhausted,
            StopReason::NumericalOverflow => NlsStopReason::NumericalOverflow,
        };
        *time = ev.trace.times.last().copied().unwrap_or(0.0);
        f.0 = ev.field;
        Ok(())
    })
}
