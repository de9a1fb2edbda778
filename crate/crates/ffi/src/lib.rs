//! C ABI over `cuspgeom`.
//!
//! Handles are opaque pointers released by the matching `_free` function.
//! Every fallible call returns a [`CgStatus`]; on failure the message is kept
//! per thread and read with [`cg_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cuspgeom::audit::{build_asdim_certificate, check_cover_certificate, AsdimKind};
use cuspgeom::growth::{fit_degree, growth_table, Verdict};
use cuspgeom::horoball::{default_truncation, horoball_rho, CuspedSpace, FreeProductZZ2, Syllable};
use cuspgeom::metric::four_point_delta;
use cuspgeom::{Error, GroupModel};

/// Result of a call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    SizeCap = 3,
    Exactness = 4,
    Domain = 5,
    InvalidCertificate = 6,
    BufferTooSmall = 7,
    Internal = 8,
}

/// Growth verdict of a degree fit.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CgVerdict {
    Polynomial = 0,
    Exponential = 1,
    Inconclusive = 2,
}

/// Degree fit over a window of the growth table.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgFit {
    pub p: f64,
    pub k1: f64,
    pub k2: f64,
    pub residual: f64,
    pub semilog_residual: f64,
    pub verdict: CgVerdict,
    /// Degree for a polynomial verdict, base for an exponential one.
    pub verdict_value: f64,
}

/// Certificate family for [`cg_asdim_multiplicity`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CgAsdimKind {
    IntegerLine = 0,
    IntegerGrid2d = 1,
    RegularTree = 2,
}

/// Opaque group model.
pub struct CgGroup(GroupModel);

/// Opaque cusped space over `Z*Z^2`.
pub struct CgCusped(CuspedSpace<Vec<Syllable>>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> CgStatus {
    match e {
        Error::InvalidInput(_) | Error::Overflow(_) => CgStatus::InvalidInput,
        Error::SizeCap { .. } | Error::Size(_) => CgStatus::SizeCap,
        Error::Exactness(_) => CgStatus::Exactness,
        Error::Domain(_) => CgStatus::Domain,
        Error::InvalidCertificate(_) => CgStatus::InvalidCertificate,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => CgStatus::Internal,
    }
}

/// Runs `f`, recording errors and panics.
fn guard(f: impl FnOnce() -> Result<(), CgStatusError>) -> CgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CgStatus::Ok,
        Ok(Err(CgStatusError(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            CgStatus::Internal
        }
    }
}

struct CgStatusError(CgStatus, String);

impl From<Error> for CgStatusError {
    fn from(e: Error) -> Self {
        CgStatusError(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> CgStatusError {
    CgStatusError(CgStatus::NullPointer, format!("{what} is null"))
}

/// Version string; static, never freed.
#[no_mangle]
pub extern "C" fn cg_version() -> *const c_char {
    concat!("cuspgeom ", env!("CARGO_PKG_VERSION"), "\0")
        .as_ptr()
        .cast()
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length, or 0
/// if there is none.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn cg_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Parses a group spec such as `free-abelian:2` or `heisenberg`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cg_group_parse(spec: *const c_char, out: *mut *mut CgGroup) -> CgStatus {
    guard(|| {
        if spec.is_null() {
            return Err(null("spec"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = CStr::from_ptr(spec)
            .to_str()
            .map_err(|_| CgStatusError(CgStatus::InvalidInput, "spec is not UTF-8".into()))?;
        let g = GroupModel::parse(spec)?;
        *out = Box::into_raw(Box::new(CgGroup(g)));
        Ok(())
    })
}

/// # Safety
/// `group` must be null or a handle from [`cg_group_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cg_group_free(group: *mut CgGroup) {
    if !group.is_null() {
        drop(Box::from_raw(group));
    }
}

/// Writes `gr(0..=rmax)` into `out`, which must hold `rmax + 1` entries.
///
/// # Safety
/// `group` must be a live handle and `out` valid for `len` entries.
#[no_mangle]
pub unsafe extern "C" fn cg_growth(
    group: *const CgGroup,
    rmax: u32,
    max_vertices: usize,
    out: *mut u64,
    len: usize,
) -> CgStatus {
    guard(|| {
        let g = group.as_ref().ok_or_else(|| null("group"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if len < rmax as usize + 1 {
            return Err(CgStatusError(
                CgStatus::BufferTooSmall,
                format!("need {} entries, got {len}", rmax + 1),
            ));
        }
        let table = growth_table(&g.0, rmax, max_vertices)?;
        ptr::copy_nonoverlapping(table.gr.as_ptr(), out, table.gr.len());
        Ok(())
    })
}

/// Fits the growth degree on the window `[lo, hi]`.
///
/// # Safety
/// `group` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cg_fit_degree(
    group: *const CgGroup,
    lo: u32,
    hi: u32,
    max_vertices: usize,
    out: *mut CgFit,
) -> CgStatus {
    guard(|| {
        let g = group.as_ref().ok_or_else(|| null("group"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let table = growth_table(&g.0, hi, max_vertices)?;
        let fit = fit_degree(&table, lo, hi)?;
        let (verdict, verdict_value) = match fit.verdict {
            Verdict::Polynomial { degree } => (CgVerdict::Polynomial, degree),
            Verdict::Exponential { base } => (CgVerdict::Exponential, base),
            Verdict::Inconclusive => (CgVerdict::Inconclusive, f64::NAN),
        };
        *out = CgFit {
            p: fit.p,
            k1: fit.k1,
            k2: fit.k2,
            residual: fit.residual,
            semilog_residual: fit.semilog_residual,
            verdict,
            verdict_value,
        };
        Ok(())
    })
}

/// Horoball distance between levels `t` and `t2` over base distance `n`.
#[no_mangle]
pub extern "C" fn cg_horoball_rho(n: f64, t: f64, t2: f64) -> f64 {
    horoball_rho(n, t, t2)
}

/// Builds and checks a standard cover certificate and reports its
/// multiplicity.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cg_asdim_multiplicity(
    kind: CgAsdimKind,
    extent: usize,
    d: u32,
    valence: usize,
    out: *mut usize,
) -> CgStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let kind = match kind {
            CgAsdimKind::IntegerLine => AsdimKind::IntegerLine,
            CgAsdimKind::IntegerGrid2d => AsdimKind::IntegerGrid2d,
            CgAsdimKind::RegularTree => AsdimKind::RegularTree,
        };
        let (space, cert) = build_asdim_certificate(kind, extent, d, valence)?;
        let checked = check_cover_certificate(space.as_metric(), &cert)?;
        *out = checked.certificate.multiplicity.unwrap_or(0);
        Ok(())
    })
}

/// Builds the cusped space of `Z*Z^2` over the ball of radius `radius`;
/// `truncation == 0` selects the default.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cg_cusped_build(
    radius: u32,
    truncation: u32,
    max_vertices: usize,
    out: *mut *mut CgCusped,
) -> CgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let g = FreeProductZZ2::new();
        let t = if truncation == 0 {
            default_truncation(radius)
        } else {
            truncation
        };
        let c = CuspedSpace::build(&g, &g.parabolic_generators(), radius, t, max_vertices)?;
        *out = Box::into_raw(Box::new(CgCusped(c)));
        Ok(())
    })
}

/// Number of nodes, or 0 for a null handle.
///
/// # Safety
/// `space` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cg_cusped_node_count(space: *const CgCusped) -> usize {
    space.as_ref().map_or(0, |c| c.0.node_count())
}

/// Four-point estimate on a seeded sample of `sample` nodes.
///
/// # Safety
/// `space` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cg_cusped_delta(
    space: *const CgCusped,
    sample: usize,
    quadruples: u64,
    seed: u64,
    out: *mut f64,
) -> CgStatus {
    guard(|| {
        let c = space.as_ref().ok_or_else(|| null("space"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let m = c.0.metric_on(&c.0.delta_sample(sample, seed))?;
        *out = four_point_delta(&m, quadruples, seed)?;
        Ok(())
    })
}

/// # Safety
/// `space` must be null or a handle from [`cg_cusped_build`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cg_cusped_free(space: *mut CgCusped) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}
