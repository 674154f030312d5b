// SPDX-License-Identifier: Apache-2.0

//! C ABI for `quatkern`.
//!
//! Every function returns a [`QkStatus`]. On failure a description is kept
//! per thread and can be read with [`qk_last_error`]. Quaternions cross the
//! boundary as `double[4]` in `q0, q1, q2, q3` order. Plans are opaque
//! handles owned by the caller and released with the matching `_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use quatkern::dqft::{transform, Direction, Method, Multiplier, QImage};
use quatkern::instrument::{build_graph, count_ops, export_graph, ExportFormat};
use quatkern::{
    left_mul, mul_direct, precompute_left, precompute_right, precompute_two_sided, right_mul, two_sided_mul, Error,
    IQuaternion, JQuaternion, KernelId, LeftPlan, Quaternion, RightPlan, TwoSidedPlan,
};

/// Result of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Malformed = 4,
    Internal = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QkKernel {
    Direct = 0,
    Sq = 1,
    Qt = 2,
    Sqt = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QkFormat {
    Json = 0,
    Dot = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QkDirection {
    Forward = 0,
    Inverse = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QkMethod {
    Naive = 0,
    RowCol = 1,
}

/// Scalar operations of one kernel call.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QkOpCount {
    pub mul_count: u64,
    pub add_count: u64,
    pub neg_count: u64,
}

/// Precomputed constants of `s q`.
pub struct QkLeftPlan(LeftPlan<f64>);

/// Precomputed constants of `q t`.
pub struct QkRightPlan(RightPlan<f64>);

/// Precomputed constants of `s q t`.
pub struct QkTwoSidedPlan(TwoSidedPlan<f64>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: QkStatus, msg: impl Into<String>) -> QkStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> QkStatus {
    let status = match e {
        Error::Io(_) => QkStatus::Io,
        Error::Malformed { .. } | Error::Json(_) | Error::MalformedGraph(_) => QkStatus::Malformed,
        Error::UnknownKernel(_) | Error::UnknownFormat(_) | Error::Shape(_) | Error::InvalidArgument(_) => {
            QkStatus::InvalidArgument
        }
        _ => QkStatus::Internal,
    };
    fail(status, e.to_string())
}

/// Runs `f`, turning panics into [`QkStatus::Internal`].
fn guard(f: impl FnOnce() -> QkStatus) -> QkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(QkStatus::Internal, "internal panic"),
    }
}

unsafe fn read_quat(p: *const f64) -> Quaternion<f64> {
    let v = std::slice::from_raw_parts(p, 4);
    Quaternion::new(v[0], v[1], v[2], v[3])
}

unsafe fn write_quat(out: *mut f64, q: &Quaternion<f64>) {
    let v = std::slice::from_raw_parts_mut(out, 4);
    v.copy_from_slice(&[q.q0, q.q1, q.q2, q.q3]);
}

// Enumerations arrive as plain integers so out-of-range values are rejected
// instead of being undefined behaviour.

fn kernel_id(k: i32) -> Result<KernelId, QkStatus> {
    match k {
        x if x == QkKernel::Direct as i32 => Ok(KernelId::Direct),
        x if x == QkKernel::Sq as i32 => Ok(KernelId::Sq),
        x if x == QkKernel::Qt as i32 => Ok(KernelId::Qt),
        x if x == QkKernel::Sqt as i32 => Ok(KernelId::Sqt),
        _ => Err(fail(QkStatus::InvalidArgument, format!("unknown kernel {k}"))),
    }
}

fn export_format(f: i32) -> Result<ExportFormat, QkStatus> {
    match f {
        x if x == QkFormat::Json as i32 => Ok(ExportFormat::Json),
        x if x == QkFormat::Dot as i32 => Ok(ExportFormat::Dot),
        _ => Err(fail(QkStatus::InvalidArgument, format!("unknown format {f}"))),
    }
}

fn direction(d: i32) -> Result<Direction, QkStatus> {
    match d {
        x if x == QkDirection::Forward as i32 => Ok(Direction::Forward),
        x if x == QkDirection::Inverse as i32 => Ok(Direction::Inverse),
        _ => Err(fail(QkStatus::InvalidArgument, format!("unknown direction {d}"))),
    }
}

fn method(m: i32) -> Result<Method, QkStatus> {
    match m {
        x if x == QkMethod::Naive as i32 => Ok(Method::Naive),
        x if x == QkMethod::RowCol as i32 => Ok(Method::RowCol),
        _ => Err(fail(QkStatus::InvalidArgument, format!("unknown method {m}"))),
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(QkStatus::NullPointer, concat!("`", stringify!($p), "` is null"));
        })+
    };
}

/// Description of the last failure on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `out = p q` with the 16-multiplication Hamilton product.
///
/// # Safety
/// `p`, `q` and `out` must each point to four doubles.
#[no_mangle]
pub unsafe extern "C" fn qk_mul_direct(p: *const f64, q: *const f64, out: *mut f64) -> QkStatus {
    non_null!(p, q, out);
    guard(|| {
        write_quat(out, &mul_direct(&read_quat(p), &read_quat(q)));
        QkStatus::Ok
    })
}

/// # Safety
/// `out` must be a valid pointer. The handle stored there must be released
/// with [`qk_left_plan_free`].
#[no_mangle]
pub unsafe extern "C" fn qk_left_plan_new(alpha: f64, beta: f64, out: *mut *mut QkLeftPlan) -> QkStatus {
    non_null!(out);
    guard(|| {
        *out = Box::into_raw(Box::new(QkLeftPlan(precompute_left(&IQuaternion::new(alpha, beta)))));
        QkStatus::Ok
    })
}

/// # Safety
/// `plan` must come from [`qk_left_plan_new`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qk_left_plan_free(plan: *mut QkLeftPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

/// `out = s q` for the plan's `s`.
///
/// # Safety
/// `plan` must be live; `q` and `out` must each point to four doubles.
#[no_mangle]
pub unsafe extern "C" fn qk_left_mul(plan: *const QkLeftPlan, q: *const f64, out: *mut f64) -> QkStatus {
    non_null!(plan, q, out);
    guard(|| {
        write_quat(out, &left_mul(&(*plan).0, &read_quat(q)));
        QkStatus::Ok
    })
}

/// # Safety
/// `out` must be a valid pointer. Release the handle with [`qk_right_plan_free`].
#[no_mangle]
pub unsafe extern "C" fn qk_right_plan_new(gamma: f64, delta: f64, out: *mut *mut QkRightPlan) -> QkStatus {
    non_null!(out);
    guard(|| {
        *out = Box::into_raw(Box::new(QkRightPlan(precompute_right(&JQuaternion::new(gamma, delta)))));
        QkStatus::Ok
    })
}

/// # Safety
/// `plan` must come from [`qk_right_plan_new`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qk_right_plan_free(plan: *mut QkRightPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

/// `out = q t` for the plan's `t`.
///
/// # Safety
/// `plan` must be live; `q` and `out` must each point to four doubles.
#[no_mangle]
pub unsafe extern "C" fn qk_right_mul(plan: *const QkRightPlan, q: *const f64, out: *mut f64) -> QkStatus {
    non_null!(plan, q, out);
    guard(|| {
        write_quat(out, &right_mul(&read_quat(q), &(*plan).0));
        QkStatus::Ok
    })
}

/// # Safety
/// `out` must be a valid pointer. Release the handle with [`qk_two_sided_plan_free`].
#[no_mangle]
pub unsafe extern "C" fn qk_two_sided_plan_new(
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    out: *mut *mut QkTwoSidedPlan,
) -> QkStatus {
    non_null!(out);
    guard(|| {
        let plan = precompute_two_sided(&IQuaternion::new(alpha, beta), &JQuaternion::new(gamma, delta));
        *out = Box::into_raw(Box::new(QkTwoSidedPlan(plan)));
        QkStatus::Ok
    })
}

/// # Safety
/// `plan` must come from [`qk_two_sided_plan_new`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qk_two_sided_plan_free(plan: *mut QkTwoSidedPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

/// `out = s q t` for the plan's `s` and `t`.
///
/// # Safety
/// `plan` must be live; `q` and `out` must each point to four doubles.
#[no_mangle]
pub unsafe extern "C" fn qk_two_sided_mul(plan: *const QkTwoSidedPlan, q: *const f64, out: *mut f64) -> QkStatus {
    non_null!(plan, q, out);
    guard(|| {
        write_quat(out, &two_sided_mul(&(*plan).0, &read_quat(q)));
        QkStatus::Ok
    })
}

/// Scalar operations of one call of `kernel`, a [`QkKernel`].
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qk_count_ops(kernel: i32, out: *mut QkOpCount) -> QkStatus {
    non_null!(out);
    guard(|| {
        let c = match kernel_id(kernel) {
            Ok(k) => count_ops(k),
            Err(status) => return status,
        };
        *out = QkOpCount { mul_count: c.mul_count, add_count: c.add_count, neg_count: c.neg_count };
        QkStatus::Ok
    })
}

/// Netlist of `kernel` ([`QkKernel`]) in `format` ([`QkFormat`]) as a
/// NUL-terminated string. Release it with
/// [`qk_string_free`].
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qk_netlist_export(kernel: i32, format: i32, out: *mut *mut c_char) -> QkStatus {
    non_null!(out);
    guard(|| {
        let (kernel, format) = match (kernel_id(kernel), export_format(format)) {
            (Ok(k), Ok(f)) => (k, f),
            (Err(status), _) | (_, Err(status)) => return status,
        };
        match build_graph(kernel).and_then(|g| export_graph(&g, format)) {
            Ok(text) => match CString::new(text) {
                Ok(s) => {
                    *out = s.into_raw();
                    QkStatus::Ok
                }
                Err(_) => fail(QkStatus::Internal, "netlist contains NUL"),
            },
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Two-sided quaternion Fourier transform of a `rows x cols` image.
///
/// `direction` is a [`QkDirection`] and `method` a [`QkMethod`]. `input` and
/// `output` hold `rows * cols * 4` doubles, row-major, four components per
/// pixel. They may not overlap.
///
/// # Safety
/// Both buffers must be valid for `rows * cols * 4` doubles.
#[no_mangle]
pub unsafe extern "C" fn qk_dqft(
    rows: usize,
    cols: usize,
    direction: i32,
    method: i32,
    input: *const f64,
    output: *mut f64,
) -> QkStatus {
    non_null!(input, output);
    guard(|| {
        let (direction, method) = match (self::direction(direction), self::method(method)) {
            (Ok(d), Ok(m)) => (d, m),
            (Err(status), _) | (_, Err(status)) => return status,
        };
        let Some(len) = rows.checked_mul(cols).and_then(|n| n.checked_mul(4)) else {
            return fail(QkStatus::InvalidArgument, "image dimensions overflow");
        };
        let data = std::slice::from_raw_parts(input, len);
        let pixels = data.chunks_exact(4).map(|c| Quaternion::new(c[0], c[1], c[2], c[3])).collect();
        let img = match QImage::new(rows, cols, pixels) {
            Ok(img) => img,
            Err(e) => return from_error(e),
        };
        let result = transform(&img, direction, method, Multiplier::Kernels);
        let out = std::slice::from_raw_parts_mut(output, len);
        for (dst, q) in out.chunks_exact_mut(4).zip(result.pixels()) {
            dst.copy_from_slice(&[q.q0, q.q1, q.q2, q.q3]);
        }
        QkStatus::Ok
    })
}

/// Copies the last error into `buf` (truncating, always NUL-terminated) and
/// returns the full message length, or 0 when there is none.
///
/// # Safety
/// `buf` must be valid for `len` bytes, or null with `len == 0`.
#[no_mangle]
pub unsafe extern "C" fn qk_last_error_copy(buf: *mut c_char, len: usize) -> usize {
    let msg = qk_last_error();
    if msg.is_null() {
        return 0;
    }
    let bytes = CStr::from_ptr(msg).to_bytes();
    if !buf.is_null() && len > 0 {
        let n = bytes.len().min(len - 1);
        ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
        *buf.add(n) = 0;
    }
    bytes.len()
}
