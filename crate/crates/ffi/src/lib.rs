//! C ABI for `projshape`.
//!
//! Every function returns an `int32_t` status: [`PS_OK`] on success, otherwise
//! one of the `PS_E_*` codes, which equal the CLI exit codes. The message of
//! the most recent failure on the calling thread is available through
//! [`ps_last_error_message`]. Handles are opaque and must be released with
//! their `_free` function. Axes are written in canonical sign (last nonzero
//! coordinate positive).

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use projshape::extrinsic::{bootstrap_extrinsic_p_value, extrinsic_mean, one_sample_extrinsic_test};
use projshape::projective::{cross_ratio, AxialPoint, CrossRatio, ProjectiveFrame};
use projshape::report::{Reference, TestReport};
use projshape::shape::{assemble_sample, register, Configuration, ProjectiveShape};
use projshape::tangent::two_sample_hotelling;
use projshape::Error;

pub const PS_OK: i32 = 0;
pub const PS_E_NULL_POINTER: i32 = 1;
pub const PS_E_ARGUMENT: i32 = 2;
pub const PS_E_PARSE: i32 = 3;
pub const PS_E_VALIDATION: i32 = 4;
pub const PS_E_DEGENERATE_FRAME: i32 = 10;
pub const PS_E_POINT_AT_INFINITY: i32 = 11;
pub const PS_E_NOT_CONCENTRATED: i32 = 12;
pub const PS_E_MEAN_NOT_UNIQUE: i32 = 13;
pub const PS_E_SINGULAR_COVARIANCE: i32 = 14;
pub const PS_E_INSUFFICIENT_DATA: i32 = 15;
pub const PS_E_UNDEFINED_MEAN_DIRECTION: i32 = 16;
pub const PS_E_BOOTSTRAP_UNSTABLE: i32 = 17;
pub const PS_E_AT_INFINITY: i32 = 18;
pub const PS_E_IO: i32 = 20;
pub const PS_E_INTERNAL: i32 = 70;
pub const PS_E_PANIC: i32 = 71;

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(e: Error) -> i32 {
    let code = e.exit_code();
    set_error(e.to_string());
    code
}

fn null() -> i32 {
    set_error("null pointer argument".into());
    PS_E_NULL_POINTER
}

fn guard(f: impl FnOnce() -> Result<(), i32>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            PS_OK
        }
        Ok(Err(code)) => code,
        Err(_) => {
            set_error("internal panic".into());
            PS_E_PANIC
        }
    }
}

trait OrCode<T> {
    fn or_code(self) -> Result<T, i32>;
}

impl<T> OrCode<T> for projshape::Result<T> {
    fn or_code(self) -> Result<T, i32> {
        self.map_err(fail)
    }
}

unsafe fn input<'a>(p: *const f64, len: usize) -> Result<&'a [f64], i32> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a>(p: *mut f64, len: usize) -> Result<&'a mut [f64], i32> {
    if p.is_null() {
        return Err(null());
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

unsafe fn write(p: *mut f64, v: f64) -> Result<(), i32> {
    if p.is_null() {
        return Err(null());
    }
    *p = v;
    Ok(())
}

/// Copies the last error message of this thread into `buf` (NUL terminated,
/// truncated to `len`) and returns the full message length in bytes.
#[no_mangle]
pub unsafe extern "C" fn ps_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn ps_status_name(status: i32) -> *const c_char {
    let s: &'static CStr = match status {
        PS_OK => c"ok",
        PS_E_NULL_POINTER => c"null pointer",
        PS_E_ARGUMENT => c"invalid argument",
        PS_E_PARSE => c"parse error",
        PS_E_VALIDATION => c"validation error",
        PS_E_DEGENERATE_FRAME => c"degenerate frame",
        PS_E_POINT_AT_INFINITY => c"point at infinity",
        PS_E_NOT_CONCENTRATED => c"not concentrated",
        PS_E_MEAN_NOT_UNIQUE => c"mean not unique",
        PS_E_SINGULAR_COVARIANCE => c"singular covariance",
        PS_E_INSUFFICIENT_DATA => c"insufficient data",
        PS_E_UNDEFINED_MEAN_DIRECTION => c"undefined mean direction",
        PS_E_BOOTSTRAP_UNSTABLE => c"bootstrap unstable",
        PS_E_AT_INFINITY => c"at infinity",
        PS_E_IO => c"i/o error",
        PS_E_INTERNAL => c"internal error",
        PS_E_PANIC => c"panic",
        _ => c"unknown status",
    };
    s.as_ptr()
}

/// A projective frame of m + 2 points in ℝᵐ.
pub struct PsFrame {
    inner: ProjectiveFrame,
}

/// A growable sample of projective shapes with common m and q.
pub struct PsSample {
    m: usize,
    q: usize,
    shapes: Vec<ProjectiveShape>,
}

/// Builds a frame from `(m + 2) * m` row-major coordinates.
#[no_mangle]
pub unsafe extern "C" fn ps_frame_new(points: *const f64, m: usize, out: *mut *mut PsFrame) -> i32 {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        if m == 0 {
            return Err(fail(Error::Argument("m must be at least 1".into())));
        }
        let pts = input(points, (m + 2) * m)?;
        let rows: Vec<Vec<f64>> = pts.chunks(m).map(|c| c.to_vec()).collect();
        let inner = ProjectiveFrame::from_affine(&rows).or_code()?;
        *out = Box::into_raw(Box::new(PsFrame { inner }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ps_frame_free(frame: *mut PsFrame) {
    if !frame.is_null() {
        drop(Box::from_raw(frame));
    }
}

/// Spherical projective coordinate of `x` (m values) written to `out_z`
/// (m + 1 values).
#[no_mangle]
pub unsafe extern "C" fn ps_frame_coordinate(frame: *const PsFrame, x: *const f64, m: usize, out_z: *mut f64) -> i32 {
    guard(|| {
        let f = frame.as_ref().ok_or_else(null)?;
        let z = f.inner.coordinate(input(x, m)?).or_code()?.z;
        output(out_z, m + 1)?.copy_from_slice(z.canonical().as_slice());
        Ok(())
    })
}

/// Cross-ratio `(x − x2)(x1 − x3) / ((x3 − x2)(x1 − x))`; fails with
/// [`PS_E_POINT_AT_INFINITY`] when `x = x1`.
#[no_mangle]
pub unsafe extern "C" fn ps_cross_ratio(x1: f64, x2: f64, x3: f64, x: f64, out: *mut f64) -> i32 {
    guard(|| match cross_ratio(x1, x2, x3, x).or_code()? {
        CrossRatio::Finite(c) => write(out, c),
        CrossRatio::Infinite { .. } => Err(fail(Error::PointAtInfinity)),
    })
}

#[no_mangle]
pub unsafe extern "C" fn ps_sample_new(m: usize, q: usize, out: *mut *mut PsSample) -> i32 {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        if m == 0 || q == 0 {
            return Err(fail(Error::Argument("m and q must be at least 1".into())));
        }
        *out = Box::into_raw(Box::new(PsSample { m, q, shapes: Vec::new() }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ps_sample_free(sample: *mut PsSample) {
    if !sample.is_null() {
        drop(Box::from_raw(sample));
    }
}

#[no_mangle]
pub unsafe extern "C" fn ps_sample_len(sample: *const PsSample) -> usize {
    sample.as_ref().map_or(0, |s| s.shapes.len())
}

/// Appends a shape given as q axes of m + 1 coordinates (`q * (m + 1)` values).
#[no_mangle]
pub unsafe extern "C" fn ps_sample_push_axes(sample: *mut PsSample, axes: *const f64) -> i32 {
    guard(|| {
        let s = sample.as_mut().ok_or_else(null)?;
        let v = input(axes, s.q * (s.m + 1))?;
        let axes = v.chunks(s.m + 1).map(AxialPoint::from_slice).collect::<projshape::Result<Vec<_>>>().or_code()?;
        s.shapes.push(ProjectiveShape::from_axes(axes).or_code()?);
        Ok(())
    })
}

/// Registers `m + 2 + q` landmarks (row-major, m values each) in the frame
/// of the first m + 2 and appends the resulting shape.
#[no_mangle]
pub unsafe extern "C" fn ps_sample_push_landmarks(sample: *mut PsSample, landmarks: *const f64) -> i32 {
    guard(|| {
        let s = sample.as_mut().ok_or_else(null)?;
        let k = s.m + 2 + s.q;
        let v = input(landmarks, k * s.m)?;
        let config = Configuration::new(v.chunks(s.m).map(|c| c.to_vec()).collect()).or_code()?;
        s.shapes.push(register(&config, None).or_code()?);
        Ok(())
    })
}

/// Extrinsic mean written as q axes (`q * (m + 1)` values).
#[no_mangle]
pub unsafe extern "C" fn ps_extrinsic_mean(sample: *const PsSample, out_axes: *mut f64) -> i32 {
    guard(|| {
        let s = sample.as_ref().ok_or_else(null)?;
        let mean = extrinsic_mean(&s.shapes).or_code()?;
        let out = output(out_axes, s.q * (s.m + 1))?;
        for (chunk, a) in out.chunks_mut(s.m + 1).zip(&mean.axes) {
            chunk.copy_from_slice(a.canonical().as_slice());
        }
        Ok(())
    })
}

unsafe fn mu0_axes(s: &PsSample, mu0: *const f64) -> Result<Vec<AxialPoint>, i32> {
    input(mu0, s.q * (s.m + 1))?.chunks(s.m + 1).map(AxialPoint::from_slice).collect::<projshape::Result<Vec<_>>>().or_code()
}

fn write_report(r: &TestReport, statistic: *mut f64, p_value: *mut f64) -> Result<(), i32> {
    unsafe {
        write(statistic, r.statistic)?;
        if !p_value.is_null() {
            *p_value = r.p_value.unwrap_or(f64::NAN);
        }
    }
    Ok(())
}

/// Chi-squared test of `H0: extrinsic mean = mu0` (q axes, `q * (m + 1)`
/// values) with mq degrees of freedom. `p_value` may be null.
#[no_mangle]
pub unsafe extern "C" fn ps_extrinsic_test(sample: *const PsSample, mu0: *const f64, statistic: *mut f64, p_value: *mut f64) -> i32 {
    guard(|| {
        let s = sample.as_ref().ok_or_else(null)?;
        let r = one_sample_extrinsic_test(&s.shapes, &mu0_axes(s, mu0)?).or_code()?;
        write_report(&r, statistic, p_value)
    })
}

/// Bootstrap p-value of the extrinsic test with `b` resamples.
#[no_mangle]
pub unsafe extern "C" fn ps_extrinsic_bootstrap_test(
    sample: *const PsSample,
    mu0: *const f64,
    b: usize,
    seed: u64,
    statistic: *mut f64,
    p_value: *mut f64,
) -> i32 {
    guard(|| {
        let s = sample.as_ref().ok_or_else(null)?;
        let r = bootstrap_extrinsic_p_value(&s.shapes, &mu0_axes(s, mu0)?, b, seed).or_code()?;
        write_report(&r, statistic, p_value)
    })
}

/// Two-sample tangent-space Hotelling test. The F statistic and its degrees
/// of freedom are written out; any output pointer except `statistic` may
/// be null.
#[no_mangle]
pub unsafe extern "C" fn ps_two_sample_hotelling(
    a: *const PsSample,
    b: *const PsSample,
    statistic: *mut f64,
    p_value: *mut f64,
    df1: *mut f64,
    df2: *mut f64,
) -> i32 {
    guard(|| {
        let (a, b) = (a.as_ref().ok_or_else(null)?, b.as_ref().ok_or_else(null)?);
        let r = two_sample_hotelling(&assemble_sample(&a.shapes).or_code()?, &assemble_sample(&b.shapes).or_code()?).or_code()?;
        write_report(&r, statistic, p_value)?;
        if let Reference::F { d1, d2 } = r.reference {
            if !df1.is_null() {
                *df1 = d1;
            }
            if !df2.is_null() {
                *df2 = d2;
            }
        }
        Ok(())
    })
}
