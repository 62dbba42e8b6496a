//! C ABI for the `dipole-memory` simulator.
//!
//! Objects are opaque handles created by `dm_*` constructors and released
//! with the matching `dm_*_free`. Every fallible function returns a
//! [`DmStatus`]; on failure a description is available from
//! [`dm_last_error_message`] on the same thread. Panics never cross the
//! boundary: they are caught and reported as `DM_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dipole_memory::cavity::{
    simulate_adiabatic, simulate_full, square_pulse_efficiency, CavityParams, CavityState,
    SimResult,
};
use dipole_memory::control::{optimal_write_input, total_efficiency};
use dipole_memory::freespace::{entire_bessel_kernel, BesselOrder};
use dipole_memory::schedules::{FieldEnvelope, Schedule, Segment, TimeGrid};
use dipole_memory::Error;
use num_complex::Complex64 as C64;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DmStatus {
    Ok = 0,
    NullPointer = 1,
    Parameter = 2,
    Stability = 3,
    SingularTransform = 4,
    Unsupported = 5,
    Convergence = 6,
    Resolution = 7,
    Config = 8,
    Io = 9,
    Panic = 10,
}

impl From<&Error> for DmStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parameter { .. } => DmStatus::Parameter,
            Error::Stability(_) => DmStatus::Stability,
            Error::SingularTransform { .. } => DmStatus::SingularTransform,
            Error::Unsupported(_) => DmStatus::Unsupported,
            Error::Convergence { .. } => DmStatus::Convergence,
            Error::Resolution(_) => DmStatus::Resolution,
            Error::Config(_) => DmStatus::Config,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => DmStatus::Io,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DmModel {
    Full = 0,
    Adiabatic = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DmBesselOrder {
    Zero = 0,
    One = 1,
}

/// Efficiencies of a run; undefined entries are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmEfficiencies {
    pub eta_w: f64,
    pub eta_r: f64,
    pub eta_tot: f64,
    pub leakage: f64,
    pub decay_loss: f64,
}

/// Coupling or detuning schedule.
pub struct DmSchedule {
    inner: Schedule,
}

/// Complex field sampled on a uniform time grid.
pub struct DmEnvelope {
    inner: FieldEnvelope,
}

/// Outcome of a cavity simulation.
pub struct DmSimResult {
    inner: SimResult,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Run `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (DmStatus, String)>) -> DmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DmStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            DmStatus::Panic
        }
    }
}

trait IntoFfi<T> {
    fn ffi(self) -> Result<T, (DmStatus, String)>;
}

impl<T> IntoFfi<T> for Result<T, Error> {
    fn ffi(self) -> Result<T, (DmStatus, String)> {
        self.map_err(|e| (DmStatus::from(&e), e.to_string()))
    }
}

fn null(what: &str) -> (DmStatus, String) {
    (DmStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (DmStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn slice<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], (DmStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), (DmStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Copy the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `capacity`). Returns the full length including the NUL.
///
/// # Safety
/// `buf` must be null or valid for `capacity` bytes.
#[no_mangle]
pub unsafe extern "C" fn dm_last_error_message(buf: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|e| {
        let bytes = e.borrow();
        let bytes = bytes.as_bytes_with_nul();
        if !buf.is_null() && capacity > 0 {
            let n = bytes.len().min(capacity);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n - 1) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

// ---- schedules -------------------------------------------------------

/// Square coupling `amplitude` (rad/s) on `[start, end]`.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn dm_schedule_square(
    start: f64,
    end: f64,
    amplitude: f64,
    out: *mut *mut DmSchedule,
) -> DmStatus {
    guard(|| {
        let inner = Schedule::coupling(vec![Segment::square(start, end, amplitude)]).ffi()?;
        put(out, DmSchedule { inner })
    })
}

/// Gaussian coupling `amplitude exp(-(t - center)^2 / (2 width^2))` on `[start, end]`.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn dm_schedule_gaussian(
    start: f64,
    end: f64,
    amplitude: f64,
    center: f64,
    width: f64,
    out: *mut *mut DmSchedule,
) -> DmStatus {
    guard(|| {
        let inner = Schedule::coupling(vec![Segment::gaussian(
            start, end, amplitude, center, width,
        )])
        .ffi()?;
        put(out, DmSchedule { inner })
    })
}

/// Monotone-cubic table through `n` points. `signed` selects a detuning
/// (any sign) instead of a coupling (non-negative).
///
/// # Safety
/// `times` and `values` must be valid for `n` reads; `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn dm_schedule_tabulated(
    times: *const f64,
    values: *const f64,
    n: usize,
    signed: bool,
    out: *mut *mut DmSchedule,
) -> DmStatus {
    guard(|| {
        let t = slice(times, n, "times")?.to_vec();
        let v = slice(values, n, "values")?.to_vec();
        let seg = vec![Segment::tabulated(t, v).ffi()?];
        let inner = if signed {
            Schedule::signed(seg)
        } else {
            Schedule::coupling(seg)
        }
        .ffi()?;
        put(out, DmSchedule { inner })
    })
}

/// Union of two schedules with disjoint supports.
///
/// # Safety
/// `a` and `b` must be live handles; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn dm_schedule_merge(
    a: *const DmSchedule,
    b: *const DmSchedule,
    out: *mut *mut DmSchedule,
) -> DmStatus {
    guard(|| {
        let inner = deref(a, "a")?.inner.merged(&deref(b, "b")?.inner).ffi()?;
        put(out, DmSchedule { inner })
    })
}

/// Value at `t`; NaN for a null handle.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dm_schedule_value(s: *const DmSchedule, t: f64) -> f64 {
    s.as_ref().map_or(f64::NAN, |s| s.inner.value(t))
}

/// # Safety
/// `s` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dm_schedule_free(s: *mut DmSchedule) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

// ---- envelopes -------------------------------------------------------

/// Unit-norm Gaussian on the grid `t0 + k dt`, `k < n`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn dm_envelope_gaussian(
    t0: f64,
    dt: f64,
    n: usize,
    center: f64,
    width: f64,
    out: *mut *mut DmEnvelope,
) -> DmStatus {
    guard(|| {
        let grid = TimeGrid::new(t0, dt, n).ffi()?;
        let inner = FieldEnvelope::gaussian(grid, center, width).ffi()?;
        put(out, DmEnvelope { inner })
    })
}

/// Envelope from `n` samples given as separate real and imaginary parts.
///
/// # Safety
/// `re` and `im` must be valid for `n` reads; `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn dm_envelope_from_samples(
    t0: f64,
    dt: f64,
    n: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut DmEnvelope,
) -> DmStatus {
    guard(|| {
        let grid = TimeGrid::new(t0, dt, n).ffi()?;
        let (re, im) = (slice(re, n, "re")?, slice(im, n, "im")?);
        let samples = re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)).collect();
        let inner = FieldEnvelope::new(grid, samples).ffi()?;
        put(out, DmEnvelope { inner })
    })
}

/// Normalized optimal write input for coupling `g`.
///
/// # Safety
/// `g` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn dm_optimal_write_input(
    g: *const DmSchedule,
    kappa: f64,
    gamma: f64,
    t0: f64,
    dt: f64,
    n: usize,
    out: *mut *mut DmEnvelope,
) -> DmStatus {
    guard(|| {
        let g = deref(g, "g")?;
        let params = CavityParams::new(kappa, gamma).ffi()?;
        let grid = TimeGrid::new(t0, dt, n).ffi()?;
        let inner = optimal_write_input(&g.inner, &params, &grid).ffi()?;
        put(out, DmEnvelope { inner })
    })
}

/// Number of samples; 0 for a null handle.
///
/// # Safety
/// `e` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dm_envelope_len(e: *const DmEnvelope) -> usize {
    e.as_ref().map_or(0, |e| e.inner.samples().len())
}

/// Photon number `int |E|^2 dt`; NaN for a null handle.
///
/// # Safety
/// `e` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dm_envelope_norm(e: *const DmEnvelope) -> f64 {
    e.as_ref().map_or(f64::NAN, |e| e.inner.norm())
}

unsafe fn copy_samples(
    samples: &[C64],
    re: *mut f64,
    im: *mut f64,
    n: usize,
) -> Result<(), (DmStatus, String)> {
    if re.is_null() || im.is_null() {
        return Err(null("re/im"));
    }
    if n < samples.len() {
        return Err((
            DmStatus::Parameter,
            format!("buffer holds {n} samples, need {}", samples.len()),
        ));
    }
    for (k, z) in samples.iter().enumerate() {
        *re.add(k) = z.re;
        *im.add(k) = z.im;
    }
    Ok(())
}

/// Copy the samples into caller buffers of capacity `n`.
///
/// # Safety
/// `re` and `im` must be valid for `n` writes.
#[no_mangle]
pub unsafe extern "C" fn dm_envelope_copy(
    e: *const DmEnvelope,
    re: *mut f64,
    im: *mut f64,
    n: usize,
) -> DmStatus {
    guard(|| copy_samples(deref(e, "e")?.inner.samples(), re, im, n))
}

/// # Safety
/// `e` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dm_envelope_free(e: *mut DmEnvelope) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

// ---- simulation ------------------------------------------------------

/// Simulate the cavity on the input's grid. `delta` may be null for no
/// detuning; `sigma0` is the initial polarization.
///
/// # Safety
/// Handles must be live or, for `delta`, null; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn dm_simulate(
    model: DmModel,
    input: *const DmEnvelope,
    g: *const DmSchedule,
    delta: *const DmSchedule,
    kappa: f64,
    gamma: f64,
    sigma0_re: f64,
    sigma0_im: f64,
    out: *mut *mut DmSimResult,
) -> DmStatus {
    guard(|| {
        let input = &deref(input, "input")?.inner;
        let g = &deref(g, "g")?.inner;
        let zero = Schedule::zero();
        let delta = delta.as_ref().map_or(&zero, |d| &d.inner);
        let params = CavityParams::new(kappa, gamma).ffi()?;
        let initial = CavityState::excited(C64::new(sigma0_re, sigma0_im));
        let inner = match model {
            DmModel::Full => simulate_full(input, g, delta, &params, initial),
            DmModel::Adiabatic => simulate_adiabatic(input, g, delta, &params, initial),
        }
        .ffi()?;
        put(out, DmSimResult { inner })
    })
}

/// # Safety
/// `r` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn dm_result_efficiencies(
    r: *const DmSimResult,
    out: *mut DmEfficiencies,
) -> DmStatus {
    guard(|| {
        let e = deref(r, "r")?.inner.efficiencies;
        let v = |x: Option<f64>| x.unwrap_or(f64::NAN);
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = DmEfficiencies {
            eta_w: v(e.eta_w),
            eta_r: v(e.eta_r),
            eta_tot: v(e.eta_tot),
            leakage: v(e.leakage),
            decay_loss: v(e.decay_loss),
        };
        Ok(())
    })
}

/// Continuity residual of the run; NaN for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dm_result_continuity_residual(r: *const DmSimResult) -> f64 {
    r.as_ref().map_or(f64::NAN, |r| r.inner.continuity_residual)
}

/// Number of time samples; 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dm_result_len(r: *const DmSimResult) -> usize {
    r.as_ref().map_or(0, |r| r.inner.grid.len())
}

/// Copy the output field into caller buffers of capacity `n`.
///
/// # Safety
/// `re` and `im` must be valid for `n` writes.
#[no_mangle]
pub unsafe extern "C" fn dm_result_output(
    r: *const DmSimResult,
    re: *mut f64,
    im: *mut f64,
    n: usize,
) -> DmStatus {
    guard(|| copy_samples(deref(r, "r")?.inner.e_out.samples(), re, im, n))
}

/// Copy the atomic polarization into caller buffers of capacity `n`.
///
/// # Safety
/// `re` and `im` must be valid for `n` writes.
#[no_mangle]
pub unsafe extern "C" fn dm_result_polarization(
    r: *const DmSimResult,
    re: *mut f64,
    im: *mut f64,
    n: usize,
) -> DmStatus {
    guard(|| copy_samples(&deref(r, "r")?.inner.sigma, re, im, n))
}

/// # Safety
/// `r` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dm_result_free(r: *mut DmSimResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

// ---- closed forms ----------------------------------------------------

/// Square-pulse efficiency `r/(r+gamma) (1 - exp(-2 (r+gamma) T))`, `r = g0^2/kappa`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn dm_square_pulse_efficiency(
    g0: f64,
    kappa: f64,
    gamma: f64,
    duration: f64,
    out: *mut f64,
) -> DmStatus {
    guard(|| {
        let v = square_pulse_efficiency(g0, kappa, gamma, duration).ffi()?;
        *out.as_mut().ok_or_else(|| null("out"))? = v;
        Ok(())
    })
}

/// `(1 - exp(-2 tau_w)) (1 - exp(-2 tau_r))`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn dm_total_efficiency(tau_w: f64, tau_r: f64, out: *mut f64) -> DmStatus {
    guard(|| {
        let v = total_efficiency(tau_w, tau_r).ffi()?;
        *out.as_mut().ok_or_else(|| null("out"))? = v;
        Ok(())
    })
}

/// Entire Bessel kernel `sum_k a^k / (k! (k+n)!)` of order 0 or 1.
#[no_mangle]
pub extern "C" fn dm_bessel_kernel(order: DmBesselOrder, a: f64) -> f64 {
    let order = match order {
        DmBesselOrder::Zero => BesselOrder::Zero,
        DmBesselOrder::One => BesselOrder::One,
    };
    entire_bessel_kernel(order, a)
}
