//! C ABI over the `loewner` crate.
//!
//! Drivers and curves cross the boundary as opaque handles owned by the library; free
//! them with the matching `*_free`. Every fallible call returns a [`LoewnerStatus`] and
//! leaves a message for [`loewner_last_error`] on failure. Output pointers are written
//! only on success. Panics are caught and reported as [`LoewnerStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use loewner::analysis::{lip_norm_estimate, DEFAULT_PAIR_BUDGET};
use loewner::capture::phase_inequality_margin;
use loewner::dense::{build_dense_driver, DenseOptions};
use loewner::fractal::{FractalKind, FractalSpec};
use loewner::loewner::{evolve_point, solve_trace, Driver, DrivingFunction, Evolution, StepPolicy};
use loewner::welding::extract_driving;
use loewner::{Error, HalfPlanePoint, Polyline};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoewnerStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// The solver failed: non-finite values, step underflow, a curve that touches back.
    Numerical = 3,
    /// A requested point could not be visited.
    NotVisited = 4,
    /// A caller buffer is shorter than the handle's length.
    BufferTooSmall = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoewnerFractal {
    Koch = 0,
    Hilbert = 1,
    Arrowhead = 2,
    HalfSierpinski = 3,
}

/// Sampled driving function on `[0, T]`.
pub struct LoewnerDriver(DrivingFunction);

/// Polyline in the closed upper half-plane, with capacity times when known.
pub struct LoewnerCurve {
    curve: Polyline,
    times: Option<Vec<f64>>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    // interior NULs cannot cross into C
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).expect("no NUL"));
}

fn status_of(e: &Error) -> LoewnerStatus {
    match e {
        Error::InvalidArgument(_)
        | Error::InvalidDriver(_)
        | Error::OutsideWindow { .. }
        | Error::LevelCap { .. }
        | Error::Parse { .. }
        | Error::Discontinuous { .. } => LoewnerStatus::InvalidArgument,
        Error::NotVisited { .. } => LoewnerStatus::NotVisited,
        _ => LoewnerStatus::Numerical,
    }
}

struct Fail(LoewnerStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(LoewnerStatus::NullPointer, format!("{what} is null"))
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> LoewnerStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => LoewnerStatus::Ok,
        Ok(Err(Fail(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            LoewnerStatus::Panic
        }
    }
}

unsafe fn slice<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], Fail> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn copy_into(src: impl ExactSizeIterator<Item = f64>, dst: *mut f64, cap: usize) -> Result<(), Fail> {
    if dst.is_null() {
        return Ok(());
    }
    if cap < src.len() {
        return Err(Fail(LoewnerStatus::BufferTooSmall, format!("buffer holds {cap}, need {}", src.len())));
    }
    for (k, v) in src.enumerate() {
        dst.add(k).write(v);
    }
    Ok(())
}

/// Message of the last failure on this thread; valid until the next failing call.
#[no_mangle]
pub extern "C" fn loewner_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Driver through the samples `(times[k], values[k])`, linearly interpolated.
///
/// # Safety
/// `times` and `values` must point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn loewner_driver_new(
    times: *const f64,
    values: *const f64,
    n: usize,
    out: *mut *mut LoewnerDriver,
) -> LoewnerStatus {
    guard(|| {
        let times = slice(times, n, "times")?.to_vec();
        let values = slice(values, n, "values")?.to_vec();
        let d = DrivingFunction::new(times, values)?;
        put(out, Box::into_raw(Box::new(LoewnerDriver(d))), "out")
    })
}

/// # Safety
/// `driver` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn loewner_driver_free(driver: *mut LoewnerDriver) {
    if !driver.is_null() {
        drop(Box::from_raw(driver));
    }
}

/// Number of samples, or 0 for a null handle.
///
/// # Safety
/// `driver` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn loewner_driver_len(driver: *const LoewnerDriver) -> usize {
    driver.as_ref().map_or(0, |d| d.0.len())
}

/// Copies the samples into caller buffers of capacity `cap`; either buffer may be null.
///
/// # Safety
/// Non-null buffers must hold `cap` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn loewner_driver_samples(
    driver: *const LoewnerDriver,
    times: *mut f64,
    values: *mut f64,
    cap: usize,
) -> LoewnerStatus {
    guard(|| {
        let d = &handle(driver, "driver")?.0;
        copy_into(d.times().iter().copied(), times, cap)?;
        copy_into(d.values().iter().copied(), values, cap)
    })
}

/// Value of the driver at `t`.
///
/// # Safety
/// `driver` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn loewner_driver_value(driver: *const LoewnerDriver, t: f64, out: *mut f64) -> LoewnerStatus {
    guard(|| {
        let d = &handle(driver, "driver")?.0;
        if !(0.0..=d.horizon()).contains(&t) {
            return Err(Fail(LoewnerStatus::InvalidArgument, format!("t = {t} outside [0, {}]", d.horizon())));
        }
        put(out, d.value(t), "out")
    })
}

/// Trace of `driver` on `steps` uniform slit steps.
///
/// # Safety
/// `driver` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn loewner_solve_trace(
    driver: *const LoewnerDriver,
    steps: usize,
    out: *mut *mut LoewnerCurve,
) -> LoewnerStatus {
    guard(|| {
        let d = &handle(driver, "driver")?.0;
        let trace = solve_trace(d, &StepPolicy::uniform(steps))?;
        let curve = LoewnerCurve { curve: trace.polyline(), times: Some(trace.times) };
        put(out, Box::into_raw(Box::new(curve)), "out")
    })
}

/// Driving function of the curve through `(re[k], im[k])`, refined to edges of at most `delta`.
///
/// # Safety
/// `re` and `im` must point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn loewner_extract_driving(
    re: *const f64,
    im: *const f64,
    n: usize,
    delta: f64,
    out: *mut *mut LoewnerDriver,
) -> LoewnerStatus {
    guard(|| {
        let re = slice(re, n, "re")?;
        let im = slice(im, n, "im")?;
        let pairs: Vec<(f64, f64)> = re.iter().copied().zip(im.iter().copied()).collect();
        let d = extract_driving(&Polyline::from_pairs(&pairs), delta)?;
        put(out, Box::into_raw(Box::new(LoewnerDriver(d))), "out")
    })
}

/// Fractal curve at `level`, in its standard position. `kind` is a `LoewnerFractal` value.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn loewner_fractal(kind: i32, level: u32, out: *mut *mut LoewnerCurve) -> LoewnerStatus {
    guard(|| {
        // taken as an integer: an out-of-range enum from C would be undefined behaviour
        let kind = match kind {
            k if k == LoewnerFractal::Koch as i32 => FractalKind::Koch,
            k if k == LoewnerFractal::Hilbert as i32 => FractalKind::Hilbert,
            k if k == LoewnerFractal::Arrowhead as i32 => FractalKind::Arrowhead,
            k if k == LoewnerFractal::HalfSierpinski as i32 => FractalKind::HalfSierpinski,
            other => return Err(Fail(LoewnerStatus::InvalidArgument, format!("unknown fractal kind {other}"))),
        };
        let curve = FractalSpec::new(kind, level).generate()?;
        put(out, Box::into_raw(Box::new(LoewnerCurve { curve, times: None })), "out")
    })
}

/// # Safety
/// `curve` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn loewner_curve_free(curve: *mut LoewnerCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `curve` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn loewner_curve_len(curve: *const LoewnerCurve) -> usize {
    curve.as_ref().map_or(0, |c| c.curve.len())
}

/// Copies vertices and times into caller buffers of capacity `cap`; any buffer may be null.
/// Asking for times of a curve without them is an invalid argument.
///
/// # Safety
/// Non-null buffers must hold `cap` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn loewner_curve_points(
    curve: *const LoewnerCurve,
    re: *mut f64,
    im: *mut f64,
    times: *mut f64,
    cap: usize,
) -> LoewnerStatus {
    guard(|| {
        let c = handle(curve, "curve")?;
        copy_into(c.curve.vertices.iter().map(|z| z.re), re, cap)?;
        copy_into(c.curve.vertices.iter().map(|z| z.im), im, cap)?;
        if times.is_null() {
            return Ok(());
        }
        let t = c.times.as_ref().ok_or_else(|| Fail(LoewnerStatus::InvalidArgument, "curve has no times".into()))?;
        copy_into(t.iter().copied(), times, cap)
    })
}

/// Evolves `re + i im` from `t0` to `t1`. On capture `*captured` is 1 and `*out_re` holds the
/// capture time; otherwise `*captured` is 0 and `(*out_re, *out_im)` is the image.
///
/// # Safety
/// `driver` must be a live handle; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn loewner_evolve_point(
    driver: *const LoewnerDriver,
    re: f64,
    im: f64,
    t0: f64,
    t1: f64,
    tol: f64,
    out_re: *mut f64,
    out_im: *mut f64,
    captured: *mut i32,
) -> LoewnerStatus {
    guard(|| {
        let d = &handle(driver, "driver")?.0;
        if out_re.is_null() || out_im.is_null() || captured.is_null() {
            return Err(null("output"));
        }
        match evolve_point(d, HalfPlanePoint::new(re, im)?, t0, t1, tol)? {
            Evolution::Alive(w) => {
                out_re.write(w.re);
                out_im.write(w.im);
                captured.write(0);
            }
            Evolution::Captured { time } => {
                out_re.write(time);
                out_im.write(0.0);
                captured.write(1);
            }
        }
        Ok(())
    })
}

/// Estimate of the Lip(1/2) seminorm `sup |λ(t) - λ(s)| / √|t - s|` over the samples.
///
/// # Safety
/// `driver` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn loewner_lip_norm(driver: *const LoewnerDriver, out: *mut f64) -> LoewnerStatus {
    guard(|| {
        let d = &handle(driver, "driver")?.0;
        put(out, lip_norm_estimate(d, DEFAULT_PAIR_BUDGET).estimate, "out")
    })
}

/// Factored phase inequality margin for `0 < m < 4` and `epsilon > 0`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn loewner_phase_margin(m: f64, epsilon: f64, out: *mut f64) -> LoewnerStatus {
    guard(|| put(out, phase_inequality_margin(m, epsilon)?, "out"))
}

/// Driver whose trace passes within `tol` of each point `(xs[k], ys[k])`, `ys[k] > 0`.
///
/// # Safety
/// `xs` and `ys` must point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn loewner_build_dense(
    xs: *const f64,
    ys: *const f64,
    n: usize,
    tol: f64,
    out: *mut *mut LoewnerDriver,
) -> LoewnerStatus {
    guard(|| {
        let xs = slice(xs, n, "xs")?;
        let ys = slice(ys, n, "ys")?;
        let points = xs.iter().zip(ys).map(|(&x, &y)| HalfPlanePoint::new(x, y)).collect::<Result<Vec<_>, _>>()?;
        let build = build_dense_driver(&points, &DenseOptions::new(tol))?;
        put(out, Box::into_raw(Box::new(LoewnerDriver(build.sampled))), "out")
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn loewner_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CStr;
    use std::ptr;

    #[test]
    fn errors_leave_a_message_and_outputs_untouched() {
        let mut d: *mut LoewnerDriver = ptr::null_mut();
        let times = [0.0, 0.0];
        let values = [0.0, 1.0];
        let status = unsafe { loewner_driver_new(times.as_ptr(), values.as_ptr(), 2, &mut d) };
        assert_eq!(status, LoewnerStatus::InvalidArgument);
        assert!(d.is_null());
        let msg = unsafe { CStr::from_ptr(loewner_last_error()) }.to_str().unwrap();
        assert!(!msg.is_empty());

        assert_eq!(unsafe { loewner_lip_norm(ptr::null(), ptr::null_mut()) }, LoewnerStatus::NullPointer);
    }

    #[test]
    fn version_is_the_crate_version() {
        let v = unsafe { CStr::from_ptr(loewner_version()) }.to_str().unwrap();
        assert_eq!(v, env!("CARGO_PKG_VERSION"));
    }
}
