//! C ABI over `fixdim`. Matrices cross the boundary as opaque handles;
//! every entry point returns a [`FixdimStatus`] and leaves a message for
//! [`fixdim_last_error`] on failure. Output handles must be released with
//! [`fixdim_matrix_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fixdim::bench::{read_matrix, write_matrix};
use fixdim::l1::{default_lewis_iters, embed_l1, lewis_weights, regress_l1, L1RegressParams, LeverageMode, Pipeline, Variant};
use fixdim::l2::{approx_leverage, embed_l2, embed_l2_eps, sketch_regress_l2, Unconstrained};
use fixdim::{Error, Matrix, Rng, SketchSpec};

/// Result code of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixdimStatus {
    Ok = 0,
    Dimension = 1,
    Param = 2,
    Numeric = 3,
    RankDeficient = 4,
    Format = 5,
    Io = 6,
    NullPointer = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixdimSketch {
    Srht = 0,
    IteratedSrht2 = 1,
    Gaussian = 2,
    CountSketch = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixdimPipeline {
    WcBasisL2 = 0,
    WcBasisL1 = 1,
    CountSketchBasis = 2,
    Lewis = 3,
    Uniform = 4,
}

/// Opaque dense row-major matrix.
pub struct FixdimMatrix(Matrix);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FixdimStatus {
    match e {
        Error::Dimension(_) => FixdimStatus::Dimension,
        Error::Param(_) => FixdimStatus::Param,
        Error::RankDeficient(_) => FixdimStatus::RankDeficient,
        Error::Numeric(_) | Error::NotPsd { .. } | Error::Symmetry { .. } | Error::Solver(_) => FixdimStatus::Numeric,
        Error::Format(_) => FixdimStatus::Format,
        Error::Io(_) => FixdimStatus::Io,
    }
}

enum Fail {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

type Res<T> = std::result::Result<T, Fail>;

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Res<()>) -> FixdimStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FixdimStatus::Ok,
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            FixdimStatus::NullPointer
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            FixdimStatus::Panic
        }
    }
}

unsafe fn matrix_ref<'a>(m: *const FixdimMatrix, what: &'static str) -> Res<&'a Matrix> {
    unsafe { m.as_ref() }.map(|h| &h.0).ok_or(Fail::Null(what))
}

unsafe fn slice_in<'a>(p: *const f64, len: usize, what: &'static str) -> Res<&'a [f64]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

unsafe fn slice_out<'a>(p: *mut f64, len: usize, what: &'static str) -> Res<&'a mut [f64]> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(unsafe { std::slice::from_raw_parts_mut(p, len) })
}

unsafe fn put_matrix(out: *mut *mut FixdimMatrix, m: Matrix) -> Res<()> {
    if out.is_null() {
        return Err(Fail::Null("out"));
    }
    unsafe { *out = Box::into_raw(Box::new(FixdimMatrix(m))) };
    Ok(())
}

unsafe fn path_arg(p: *const c_char) -> Res<String> {
    if p.is_null() {
        return Err(Fail::Null("path"));
    }
    Ok(unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}

fn copy_into(dst: &mut [f64], src: &[f64]) -> Res<()> {
    if dst.len() != src.len() {
        return Err(Error::Dimension(format!("output buffer holds {}, result has {}", dst.len(), src.len())).into());
    }
    dst.copy_from_slice(src);
    Ok(())
}

fn sketch_spec(kind: FixdimSketch, rows: usize, seed: u64) -> SketchSpec {
    match kind {
        FixdimSketch::Srht => SketchSpec::srht(rows, seed),
        FixdimSketch::IteratedSrht2 => SketchSpec::iterated_srht(rows, 2, seed),
        FixdimSketch::Gaussian => SketchSpec::gaussian(rows, seed),
        FixdimSketch::CountSketch => SketchSpec::count_sketch(rows, seed),
    }
}

/// Message of the most recent failure on this thread, or NULL. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fixdim_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Copies `rows * cols` row-major values into a new matrix.
///
/// # Safety
/// `data` must point to `rows * cols` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fixdim_matrix_new(
    rows: usize,
    cols: usize,
    data: *const f64,
    out: *mut *mut FixdimMatrix,
) -> FixdimStatus {
    guard(|| {
        let len = rows.checked_mul(cols).ok_or_else(|| Error::Dimension("rows * cols overflows".into()))?;
        let values = unsafe { slice_in(data, len, "data") }?.to_vec();
        unsafe { put_matrix(out, Matrix::from_vec(rows, cols, values)?) }
    })
}

/// # Safety
/// `m` must be NULL or a handle returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fixdim_matrix_free(m: *mut FixdimMatrix) {
    if !m.is_null() {
        drop(unsafe { Box::from_raw(m) });
    }
}

/// # Safety
/// `m` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fixdim_matrix_rows(m: *const FixdimMatrix) -> usize {
    unsafe { m.as_ref() }.map_or(0, |h| h.0.rows())
}

/// # Safety
/// `m` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fixdim_matrix_cols(m: *const FixdimMatrix) -> usize {
    unsafe { m.as_ref() }.map_or(0, |h| h.0.cols())
}

/// Copies the row-major entries into `out`, which must hold exactly
/// `rows * cols` values.
///
/// # Safety
/// `m` must be a live handle and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fixdim_matrix_copy(m: *const FixdimMatrix, out: *mut f64, len: usize) -> FixdimStatus {
    guard(|| {
        let a = unsafe { matrix_ref(m, "matrix") }?;
        copy_into(unsafe { slice_out(out, len, "out") }?, a.data())
    })
}

/// Reads a `.csv` or `.mtb` file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fixdim_matrix_read(path: *const c_char, out: *mut *mut FixdimMatrix) -> FixdimStatus {
    guard(|| {
        let p = unsafe { path_arg(path) }?;
        unsafe { put_matrix(out, read_matrix(p)?) }
    })
}

/// # Safety
/// `m` must be a live handle; `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn fixdim_matrix_write(m: *const FixdimMatrix, path: *const c_char) -> FixdimStatus {
    guard(|| {
        let a = unsafe { matrix_ref(m, "matrix") }?;
        let p = unsafe { path_arg(path) }?;
        Ok(write_matrix(p, a)?)
    })
}

/// d × d embedding with an SRHT sized for an `eps`-JLT with probability
/// `1 − 1/t`.
///
/// # Safety
/// `a` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fixdim_embed_l2(
    a: *const FixdimMatrix,
    eps: f64,
    t: f64,
    seed: u64,
    out: *mut *mut FixdimMatrix,
) -> FixdimStatus {
    guard(|| {
        let a = unsafe { matrix_ref(a, "a") }?;
        unsafe { put_matrix(out, embed_l2_eps(a, eps, t, seed)?.a_tilde) }
    })
}

/// d × d embedding through an explicit sketch with `rows` rows.
///
/// # Safety
/// `a` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fixdim_embed_l2_sketch(
    a: *const FixdimMatrix,
    kind: FixdimSketch,
    rows: usize,
    seed: u64,
    out: *mut *mut FixdimMatrix,
) -> FixdimStatus {
    guard(|| {
        let a = unsafe { matrix_ref(a, "a") }?;
        unsafe { put_matrix(out, embed_l2(a, &sketch_spec(kind, rows, seed))?.a_tilde) }
    })
}

/// `(d + r) × d` ℓ1 embedding. `q = 0` selects `r = ⌈80 d ln(td)⌉`;
/// `q ≥ 3` selects `r = ⌈100 d ln^{1+1/q}(td)⌉`.
///
/// # Safety
/// `a` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fixdim_embed_l1(
    a: *const FixdimMatrix,
    t: f64,
    q: f64,
    seed: u64,
    out: *mut *mut FixdimMatrix,
) -> FixdimStatus {
    guard(|| {
        let a = unsafe { matrix_ref(a, "a") }?;
        let variant = if q == 0.0 { Variant::LogR } else { Variant::LogPowerR(q) };
        let rng = Rng::new(seed);
        let spec = SketchSpec::default_for(a.rows(), a.cols(), 0.5, t, rng.split(0).derive_seed())?;
        unsafe { put_matrix(out, embed_l1(a, t, variant, &spec, rng.split(1))?.stacked) }
    })
}

/// Approximate leverage scores into `out` (length `rows(a)`), using an
/// SRHT with `rows` rows and no Gaussian compression.
///
/// # Safety
/// `a` must be a live handle; `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fixdim_leverage(
    a: *const FixdimMatrix,
    rows: usize,
    seed: u64,
    out: *mut f64,
    len: usize,
) -> FixdimStatus {
    guard(|| {
        let a = unsafe { matrix_ref(a, "a") }?;
        let tau = approx_leverage(a, 0.25, &SketchSpec::srht(rows, seed), 0)?.tau;
        copy_into(unsafe { slice_out(out, len, "out") }?, &tau)
    })
}

/// Lewis weights by exact leverage scores. `iters = 0` uses
/// `⌈2 log₂ log₂ n⌉`.
///
/// # Safety
/// `a` must be a live handle; `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fixdim_lewis_weights(
    a: *const FixdimMatrix,
    iters: usize,
    out: *mut f64,
    len: usize,
) -> FixdimStatus {
    guard(|| {
        let a = unsafe { matrix_ref(a, "a") }?;
        let t = if iters == 0 { default_lewis_iters(a.rows()) } else { iters };
        let state = lewis_weights(a, t, LeverageMode::ExactLeverage, Rng::new(0))?;
        copy_into(unsafe { slice_out(out, len, "out") }?, &state.w)
    })
}

/// Sketched least squares `min ‖Ax − b‖₂` through an SRHT with `rows` rows.
/// Writes `x` (length `cols(a)`) and, if `cost` is non-NULL, `‖Ax − b‖₂²`.
///
/// # Safety
/// `a` must be a live handle; `b` must hold `b_len` doubles; `x` must hold
/// `x_len` doubles; `cost` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn fixdim_regress_l2(
    a: *const FixdimMatrix,
    b: *const f64,
    b_len: usize,
    rows: usize,
    seed: u64,
    x: *mut f64,
    x_len: usize,
    cost: *mut f64,
) -> FixdimStatus {
    guard(|| {
        let a = unsafe { matrix_ref(a, "a") }?;
        let b = Matrix::column_vector(unsafe { slice_in(b, b_len, "b") }?);
        let res = sketch_regress_l2(a, &b, &SketchSpec::srht(rows, seed), &Unconstrained)?;
        copy_into(unsafe { slice_out(x, x_len, "x") }?, res.x.data())?;
        if !cost.is_null() {
            unsafe { *cost = res.full_cost.unwrap_or(f64::NAN) };
        }
        Ok(())
    })
}

/// Coreset ℓ1 regression. `rows = 0` uses the pipeline's default coreset
/// size (not allowed for the uniform pipeline). Writes `x` and, if `cost`
/// is non-NULL, `‖Ax − b‖₁`.
///
/// # Safety
/// As for [`fixdim_regress_l2`].
#[no_mangle]
pub unsafe extern "C" fn fixdim_regress_l1(
    a: *const FixdimMatrix,
    b: *const f64,
    b_len: usize,
    pipeline: FixdimPipeline,
    rows: usize,
    eps: f64,
    seed: u64,
    x: *mut f64,
    x_len: usize,
    cost: *mut f64,
) -> FixdimStatus {
    guard(|| {
        let a = unsafe { matrix_ref(a, "a") }?;
        let b = unsafe { slice_in(b, b_len, "b") }?;
        let pipeline = match pipeline {
            FixdimPipeline::WcBasisL2 => Pipeline::WCBasisL2,
            FixdimPipeline::WcBasisL1 => Pipeline::WCBasisL1,
            FixdimPipeline::CountSketchBasis => Pipeline::CountSketchBasis,
            FixdimPipeline::Lewis => Pipeline::Lewis,
            FixdimPipeline::Uniform => Pipeline::Uniform,
        };
        let params = L1RegressParams { sample_rows: (rows > 0).then_some(rows), ..Default::default() };
        let res = regress_l1(a, b, pipeline, eps, &params, Rng::new(seed))?;
        copy_into(unsafe { slice_out(x, x_len, "x") }?, res.x.data())?;
        if !cost.is_null() {
            unsafe { *cost = res.full_cost.unwrap_or(f64::NAN) };
        }
        Ok(())
    })
}
