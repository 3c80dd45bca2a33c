//! C ABI for `invrig`.
//!
//! Frameworks live behind an opaque `InvrigFramework` handle created by one
//! of the `invrig_framework_*` constructors and released with
//! `invrig_framework_free`. Every fallible call returns an `InvrigStatus`;
//! on failure `invrig_last_error_message` describes the error for the
//! calling thread. Array outputs take a caller buffer and its length and
//! report the needed length through `needed` (which may be null); a short
//! buffer yields `INVRIG_STATUS_BUFFER_TOO_SMALL` and leaves it untouched.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use invrig::framework::{CFramework, Triangulation};
use invrig::packing::{koebe_construction, FaceChoice, DEFAULT_MAX_SWEEPS};
use invrig::rigidity::{
    equilibrium_stresses, inversive_distance_vector, rigidity_matrix, rigidity_verdict, RankMode,
};
use invrig::{io, Circle, Error, TolPolicy};

/// Opaque framework handle.
pub struct InvrigFramework {
    inner: CFramework,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvrigStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Input violates a framework, circle or triangulation invariant.
    Validation = 3,
    Parse = 4,
    NoConvergence = 5,
    BufferTooSmall = 6,
    /// Numerical or geometric failure other than non-convergence.
    Numerical = 7,
    Panic = 8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> InvrigStatus {
    match e {
        Error::Parse { .. } => InvrigStatus::Parse,
        Error::NoConvergence { .. } => InvrigStatus::NoConvergence,
        Error::InvalidCircle { .. }
        | Error::InvalidFramework(_)
        | Error::InvalidTriangulation(_)
        | Error::Validation(_)
        | Error::NotAnEdge(..)
        | Error::DimensionMismatch(_) => InvrigStatus::Validation,
        Error::InvalidEps(_)
        | Error::InvalidMoebius(_)
        | Error::ZeroScale(_)
        | Error::TooLarge { .. } => InvrigStatus::InvalidArgument,
        _ => InvrigStatus::Numerical,
    }
}

struct Fail(InvrigStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null() -> Fail {
    Fail(InvrigStatus::NullPointer, "null pointer argument".into())
}

/// Runs `body`, turning errors and panics into a status plus last-error
/// message.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> InvrigStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => InvrigStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            InvrigStatus::Panic
        }
    }
}

unsafe fn input<'a, T>(p: *const T, len: usize) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn handle<'a>(f: *const InvrigFramework) -> Result<&'a CFramework, Fail> {
    f.as_ref().map(|h| &h.inner).ok_or_else(null)
}

unsafe fn emit(out: *mut *mut InvrigFramework, f: CFramework) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null());
    }
    *out = Box::into_raw(Box::new(InvrigFramework { inner: f }));
    Ok(())
}

unsafe fn copy_out(
    values: &[f64],
    out: *mut f64,
    len: usize,
    needed: *mut usize,
) -> Result<(), Fail> {
    if !needed.is_null() {
        *needed = values.len();
    }
    if len < values.len() {
        return Err(Fail(
            InvrigStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} needed", values.len()),
        ));
    }
    if !values.is_empty() {
        if out.is_null() {
            return Err(null());
        }
        ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    }
    Ok(())
}

unsafe fn circles(
    n: usize,
    xs: *const f64,
    ys: *const f64,
    rs: *const f64,
) -> Result<Vec<Circle>, Fail> {
    let (xs, ys, rs) = (input(xs, n)?, input(ys, n)?, input(rs, n)?);
    Ok((0..n)
        .map(|i| Circle {
            x: xs[i],
            y: ys[i],
            r: rs[i],
        })
        .collect())
}

fn policy(rel_tol: f64) -> Result<TolPolicy, Fail> {
    if rel_tol > 0.0 && rel_tol.is_finite() {
        Ok(TolPolicy::Relative(rel_tol))
    } else if rel_tol == 0.0 {
        Ok(TolPolicy::default())
    } else {
        Err(Fail(
            InvrigStatus::InvalidArgument,
            format!("tolerance must be positive, or 0 for the default; got {rel_tol}"),
        ))
    }
}

/// Framework from `n` circles (`xs`, `ys`, `rs`) and `m` edges stored as
/// `2m` vertex indices.
///
/// # Safety
/// Array arguments must point to at least the stated number of elements;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn invrig_framework_new(
    n: usize,
    xs: *const f64,
    ys: *const f64,
    rs: *const f64,
    m: usize,
    edges: *const usize,
    out: *mut *mut InvrigFramework,
) -> InvrigStatus {
    guard(|| {
        let cs = circles(n, xs, ys, rs)?;
        let e = input(edges, 2 * m)?;
        let f = CFramework::new(cs, e.chunks_exact(2).map(|p| (p[0], p[1])))?;
        emit(out, f)
    })
}

/// Framework on a sphere triangulation given as `num_faces` triples; the
/// edges are the triangulation's 1-skeleton.
///
/// # Safety
/// As for `invrig_framework_new`, with `faces` holding `3 * num_faces`
/// indices.
#[no_mangle]
pub unsafe extern "C" fn invrig_framework_from_faces(
    n: usize,
    xs: *const f64,
    ys: *const f64,
    rs: *const f64,
    num_faces: usize,
    faces: *const usize,
    out: *mut *mut InvrigFramework,
) -> InvrigStatus {
    guard(|| {
        let cs = circles(n, xs, ys, rs)?;
        let t = triangulation(n, num_faces, faces)?;
        emit(out, CFramework::from_triangulation(&t, cs)?)
    })
}

unsafe fn triangulation(
    n: usize,
    num_faces: usize,
    faces: *const usize,
) -> Result<Triangulation, Fail> {
    let fs = input(faces, 3 * num_faces)?;
    Ok(Triangulation::new(
        n,
        fs.chunks_exact(3).map(|f| [f[0], f[1], f[2]]).collect(),
    )?)
}

/// Framework from a JSON framework document (NUL-terminated UTF-8).
///
/// # Safety
/// `json` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn invrig_framework_from_json(
    json: *const c_char,
    out: *mut *mut InvrigFramework,
) -> InvrigStatus {
    guard(|| {
        if json.is_null() {
            return Err(null());
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Fail(InvrigStatus::Parse, format!("input is not UTF-8: {e}")))?;
        emit(out, io::parse_framework(text)?)
    })
}

/// Univalent tangency framework of a triangulation with vertex `v_inf`
/// sent to the outer circle; `tol` is the packing tolerance (0 for the
/// default).
///
/// # Safety
/// `faces` must hold `3 * num_faces` indices; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn invrig_koebe_framework(
    num_vertices: usize,
    num_faces: usize,
    faces: *const usize,
    v_inf: usize,
    tol: f64,
    out: *mut *mut InvrigFramework,
) -> InvrigStatus {
    guard(|| {
        let t = triangulation(num_vertices, num_faces, faces)?;
        if v_inf >= num_vertices {
            return Err(Fail(
                InvrigStatus::InvalidArgument,
                format!("v_inf {v_inf} out of range for {num_vertices} vertices"),
            ));
        }
        let tol = if tol == 0.0 {
            invrig::packing::DEFAULT_PACKING_TOL
        } else {
            tol
        };
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Fail(
                InvrigStatus::InvalidArgument,
                format!("invalid tolerance {tol}"),
            ));
        }
        let k = koebe_construction(&t, v_inf, FaceChoice::Auto, tol, DEFAULT_MAX_SWEEPS)?;
        emit(out, k.framework)
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `f` must come from an `invrig` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn invrig_framework_free(f: *mut InvrigFramework) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Number of circles, 0 for null.
///
/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn invrig_framework_num_circles(f: *const InvrigFramework) -> usize {
    f.as_ref().map_or(0, |h| h.inner.num_circles())
}

/// Number of edges, 0 for null.
///
/// # Safety
/// `f` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn invrig_framework_num_edges(f: *const InvrigFramework) -> usize {
    f.as_ref().map_or(0, |h| h.inner.num_edges())
}

/// Circle coordinates as `x0, y0, r0, x1, …` (length `3n`).
///
/// # Safety
/// `out` must hold `len` doubles; `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn invrig_framework_coordinates(
    f: *const InvrigFramework,
    out: *mut f64,
    len: usize,
    needed: *mut usize,
) -> InvrigStatus {
    guard(|| copy_out(&handle(f)?.coordinates(), out, len, needed))
}

/// Edge list as `2m` indices, each pair ascending, in edge order.
///
/// # Safety
/// `out` must hold `len` indices; `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn invrig_framework_edges(
    f: *const InvrigFramework,
    out: *mut usize,
    len: usize,
    needed: *mut usize,
) -> InvrigStatus {
    guard(|| {
        let flat: Vec<usize> = handle(f)?
            .edges()
            .iter()
            .flat_map(|&(i, j)| [i, j])
            .collect();
        if !needed.is_null() {
            *needed = flat.len();
        }
        if len < flat.len() {
            return Err(Fail(
                InvrigStatus::BufferTooSmall,
                format!("{} indices needed", flat.len()),
            ));
        }
        if !flat.is_empty() {
            if out.is_null() {
                return Err(null());
            }
            ptr::copy_nonoverlapping(flat.as_ptr(), out, flat.len());
        }
        Ok(())
    })
}

/// Rank of the rigidity matrix. `exact` selects rational elimination;
/// `rel_tol` is the relative singular-value tolerance (0 for the default).
/// Any output pointer may be null.
///
/// # Safety
/// `f` must be a live handle; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn invrig_rank(
    f: *const InvrigFramework,
    exact: bool,
    rel_tol: f64,
    rank: *mut usize,
    required_rank: *mut i64,
    rigid: *mut bool,
) -> InvrigStatus {
    guard(|| {
        let f = handle(f)?;
        let mode = if exact {
            RankMode::Exact
        } else {
            RankMode::Numeric
        };
        let v = rigidity_verdict(f, mode, policy(rel_tol)?)?;
        if !rank.is_null() {
            *rank = v.rank;
        }
        if !required_rank.is_null() {
            *required_rank = 3 * f.num_circles() as i64 - 6;
        }
        if !rigid.is_null() {
            *rigid = v.is_infinitesimally_rigid;
        }
        Ok(())
    })
}

/// Inversive distance of every edge (length `m`).
///
/// # Safety
/// `out` must hold `len` doubles; `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn invrig_inversive_distances(
    f: *const InvrigFramework,
    out: *mut f64,
    len: usize,
    needed: *mut usize,
) -> InvrigStatus {
    guard(|| copy_out(&inversive_distance_vector(handle(f)?), out, len, needed))
}

/// Rigidity matrix, row-major `m × 3n`.
///
/// # Safety
/// `out` must hold `len` doubles; `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn invrig_rigidity_matrix(
    f: *const InvrigFramework,
    out: *mut f64,
    len: usize,
    needed: *mut usize,
) -> InvrigStatus {
    guard(|| copy_out(rigidity_matrix(handle(f)?).data(), out, len, needed))
}

/// Dimension of the equilibrium-stress space.
///
/// # Safety
/// `f` must be a live handle and `count` writable.
#[no_mangle]
pub unsafe extern "C" fn invrig_stress_count(
    f: *const InvrigFramework,
    rel_tol: f64,
    count: *mut usize,
) -> InvrigStatus {
    guard(|| {
        let s = equilibrium_stresses(handle(f)?, policy(rel_tol)?)?;
        if count.is_null() {
            return Err(null());
        }
        *count = s.basis.len();
        Ok(())
    })
}

/// Framework document as NUL-terminated JSON. `needed` receives the size
/// including the terminator.
///
/// # Safety
/// `out` must hold `len` bytes; `needed` may be null.
#[no_mangle]
pub unsafe extern "C" fn invrig_framework_to_json(
    f: *const InvrigFramework,
    out: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> InvrigStatus {
    guard(|| {
        let text = CString::new(io::framework_to_json(handle(f)?)).expect("JSON has no NUL");
        let bytes = text.as_bytes_with_nul();
        if !needed.is_null() {
            *needed = bytes.len();
        }
        if len < bytes.len() {
            return Err(Fail(
                InvrigStatus::BufferTooSmall,
                format!("{} bytes needed", bytes.len()),
            ));
        }
        if out.is_null() {
            return Err(null());
        }
        ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), out, bytes.len());
        Ok(())
    })
}

/// Message for the calling thread's last failed call, or null. Valid until
/// the next `invrig` call on this thread.
#[no_mangle]
pub extern "C" fn invrig_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn invrig_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
