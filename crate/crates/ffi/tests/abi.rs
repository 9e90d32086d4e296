//! Exercises the exported functions the way a C caller would.

use std::ffi::CStr;
use std::ptr;

use loewner_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(loewner_last_error()) }.to_string_lossy().into_owned()
}

fn sqrt_driver(k: f64, n: usize) -> *mut LoewnerDriver {
    let times: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    let values: Vec<f64> = times.iter().map(|t| k * t.sqrt()).collect();
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { loewner_driver_new(times.as_ptr(), values.as_ptr(), times.len(), &mut d) }, LoewnerStatus::Ok);
    d
}

fn curve_points(c: *const LoewnerCurve) -> (Vec<f64>, Vec<f64>) {
    let n = unsafe { loewner_curve_len(c) };
    let (mut re, mut im) = (vec![0.0; n], vec![0.0; n]);
    assert_eq!(unsafe { loewner_curve_points(c, re.as_mut_ptr(), im.as_mut_ptr(), ptr::null_mut(), n) }, LoewnerStatus::Ok);
    (re, im)
}

#[test]
fn trace_and_extract_round_trip() {
    let d = sqrt_driver(0.0, 8);
    let mut curve = ptr::null_mut();
    assert_eq!(unsafe { loewner_solve_trace(d, 100, &mut curve) }, LoewnerStatus::Ok);
    let (re, im) = curve_points(curve);
    // λ ≡ 0 grows the segment [0, 2i]
    assert!(re.iter().all(|x| x.abs() < 1e-12));
    assert!((im.last().unwrap() - 2.0).abs() < 1e-12);

    let n = unsafe { loewner_curve_len(curve) };
    let mut times = vec![0.0; n];
    assert_eq!(
        unsafe { loewner_curve_points(curve, ptr::null_mut(), ptr::null_mut(), times.as_mut_ptr(), n) },
        LoewnerStatus::Ok
    );
    assert!((times[n - 1] - 1.0).abs() < 1e-12);

    let mut back = ptr::null_mut();
    assert_eq!(unsafe { loewner_extract_driving(re.as_ptr(), im.as_ptr(), n, 0.1, &mut back) }, LoewnerStatus::Ok);
    let m = unsafe { loewner_driver_len(back) };
    let (mut t, mut v) = (vec![0.0; m], vec![0.0; m]);
    assert_eq!(unsafe { loewner_driver_samples(back, t.as_mut_ptr(), v.as_mut_ptr(), m) }, LoewnerStatus::Ok);
    assert!((t[m - 1] - 1.0).abs() < 1e-9);
    assert!(v.iter().all(|x| x.abs() < 1e-9));

    unsafe {
        loewner_curve_free(curve);
        loewner_driver_free(back);
        loewner_driver_free(d);
    }
}

#[test]
fn evolve_point_reports_capture_and_images() {
    let zero = sqrt_driver(0.0, 4);
    let (mut a, mut b, mut captured) = (0.0, 0.0, -1);
    let status = unsafe { loewner_evolve_point(zero, 0.0, 1.0, 0.0, 1.0, 1e-12, &mut a, &mut b, &mut captured) };
    assert_eq!(status, LoewnerStatus::Ok);
    assert_eq!(captured, 0);
    assert!((a - 3f64.sqrt()).abs() < 1e-8 && b.abs() < 1e-8, "{a} + {b}i");

    let status = unsafe { loewner_evolve_point(zero, 0.0, -1.0, 0.0, 1.0, 1e-12, &mut a, &mut b, &mut captured) };
    assert_eq!(status, LoewnerStatus::InvalidArgument);
    unsafe { loewner_driver_free(zero) };
}

#[test]
fn scalar_queries() {
    let d = sqrt_driver(2.0, 64);
    let mut norm = 0.0;
    assert_eq!(unsafe { loewner_lip_norm(d, &mut norm) }, LoewnerStatus::Ok);
    assert!((norm - 2.0).abs() < 1e-9);
    let mut v = 0.0;
    assert_eq!(unsafe { loewner_driver_value(d, 0.25, &mut v) }, LoewnerStatus::Ok);
    assert!((v - 1.0).abs() < 1e-12);
    assert_eq!(unsafe { loewner_driver_value(d, 2.0, &mut v) }, LoewnerStatus::InvalidArgument);
    unsafe { loewner_driver_free(d) };

    let mut margin = 0.0;
    assert_eq!(unsafe { loewner_phase_margin(3.9, 1e-4, &mut margin) }, LoewnerStatus::Ok);
    assert!(margin.is_finite());
    assert_eq!(unsafe { loewner_phase_margin(4.5, 1e-4, &mut margin) }, LoewnerStatus::InvalidArgument);
    assert!(last_error().contains("M must lie"));
}

#[test]
fn fractals_and_buffers() {
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { loewner_fractal(LoewnerFractal::Koch as i32, 2, &mut c) }, LoewnerStatus::Ok);
    assert_eq!(unsafe { loewner_curve_len(c) }, 17);
    let mut small = [0.0; 4];
    assert_eq!(
        unsafe { loewner_curve_points(c, small.as_mut_ptr(), ptr::null_mut(), ptr::null_mut(), small.len()) },
        LoewnerStatus::BufferTooSmall
    );
    // fractals carry no capacity times
    let mut times = [0.0; 17];
    assert_eq!(
        unsafe { loewner_curve_points(c, ptr::null_mut(), ptr::null_mut(), times.as_mut_ptr(), 17) },
        LoewnerStatus::InvalidArgument
    );
    unsafe { loewner_curve_free(c) };

    let mut c = ptr::null_mut();
    assert_eq!(unsafe { loewner_fractal(42, 2, &mut c) }, LoewnerStatus::InvalidArgument);
    assert!(c.is_null());
    assert_eq!(unsafe { loewner_fractal(LoewnerFractal::Koch as i32, 99, &mut c) }, LoewnerStatus::InvalidArgument);
}

#[test]
fn dense_builder_visits_two_points() {
    let xs = [0.5, -1.0];
    let ys = [1.0, 0.7];
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { loewner_build_dense(xs.as_ptr(), ys.as_ptr(), 2, 1e-2, &mut d) }, LoewnerStatus::Ok, "{}", last_error());
    assert!(unsafe { loewner_driver_len(d) } > 2);
    unsafe { loewner_driver_free(d) };

    let ys = [1.0, -0.7];
    assert_eq!(unsafe { loewner_build_dense(xs.as_ptr(), ys.as_ptr(), 2, 1e-2, &mut d) }, LoewnerStatus::InvalidArgument);
}

#[test]
fn null_handles_are_rejected() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { loewner_solve_trace(ptr::null(), 10, &mut out) }, LoewnerStatus::NullPointer);
    assert_eq!(unsafe { loewner_driver_len(ptr::null()) }, 0);
    assert_eq!(unsafe { loewner_curve_len(ptr::null()) }, 0);
    unsafe {
        loewner_driver_free(ptr::null_mut());
        loewner_curve_free(ptr::null_mut());
    }
}
