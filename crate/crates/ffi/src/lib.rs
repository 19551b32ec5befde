//! C ABI over `abelian_bf`.
//!
//! Objects are opaque handles released with their `*_free` function.
//! Every fallible call returns a [`BfStatus`]; on failure the message is
//! available from [`bf_last_error_message`] on the same thread. Big
//! integers cross the boundary as decimal strings released with
//! [`bf_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use abelian_bf::abgroup::FgAbelianGroup;
use abelian_bf::bfcs::{partition_bf, partition_delta_route, partition_hom, Convention};
use abelian_bf::error::Error;
use abelian_bf::homology::ChainComplex;
use abelian_bf::manifolds::{
    connected_sum, lens_space, load, load_chain_complex, lookup, Loaded, ManifoldSpec,
};
use abelian_bf::suites::{back_to_cs_suite, gauss_suite, FormPolicy};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Parse = 4,
    Consistency = 5,
    NotFound = 6,
    TooLarge = 7,
    Degenerate = 8,
    MissingLinkingForm = 9,
    Io = 10,
    Panic = 11,
}

/// How the free part of `H_1` enters the partition function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BfConvention {
    TorsionOnly = 0,
    IncludeFreeFactor = 1,
}

impl From<BfConvention> for Convention {
    fn from(c: BfConvention) -> Self {
        match c {
            BfConvention::TorsionOnly => Convention::TorsionOnly,
            BfConvention::IncludeFreeFactor => Convention::IncludeFreeFactor,
        }
    }
}

/// A finitely generated abelian group `Z^r + Z_{p_1} + ... + Z_{p_N}`.
pub struct BfGroup(FgAbelianGroup);

/// A closed 3-manifold with its homology and linking form.
pub struct BfManifold(ManifoldSpec);

/// A finite chain complex of free abelian groups.
pub struct BfComplex(ChainComplex);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(BfStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parse { .. } => BfStatus::Parse,
            Error::Consistency(_) => BfStatus::Consistency,
            Error::UnknownManifold(_) => BfStatus::NotFound,
            Error::TooLarge { .. } | Error::Overflow(_) => BfStatus::TooLarge,
            Error::DegeneratePairing(_) | Error::SingularMatrix => BfStatus::Degenerate,
            Error::MissingLinkingForm(_) => BfStatus::MissingLinkingForm,
            Error::Io(_) => BfStatus::Io,
            _ => BfStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> BfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            BfStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {message}"));
            BfStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(BfStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure(BfStatus::NullPointer, format!("{what} is null")))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(BfStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(BfStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).expect("no interior nul").into_raw()
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// The message of the last failed call on this thread, or null. The
/// pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn bf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn bf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn bf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `Z^rank + Z_{torsion[0]} + ...`; the torsion must be a divisor chain of
/// integers >= 2.
///
/// # Safety
/// `torsion` points to `len` values (or is null with `len == 0`); `out` is
/// writable.
#[no_mangle]
pub unsafe extern "C" fn bf_group_new(
    rank: usize,
    torsion: *const u64,
    len: usize,
    out_group: *mut *mut BfGroup,
) -> BfStatus {
    guard(|| {
        let slot = out(out_group, "out_group")?;
        let chain = if len == 0 {
            Vec::new()
        } else {
            if torsion.is_null() {
                return Err(Failure(BfStatus::NullPointer, "torsion is null".into()));
            }
            std::slice::from_raw_parts(torsion, len).to_vec()
        };
        *slot = boxed(BfGroup(FgAbelianGroup::new(rank, chain)?));
        Ok(())
    })
}

/// # Safety
/// `g` is null or a live group handle.
#[no_mangle]
pub unsafe extern "C" fn bf_group_free(g: *mut BfGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` is a live group handle; `out_rank` is writable.
#[no_mangle]
pub unsafe extern "C" fn bf_group_rank(g: *const BfGroup, out_rank: *mut usize) -> BfStatus {
    guard(|| {
        *out(out_rank, "out_rank")? = deref(g, "group")?.0.rank();
        Ok(())
    })
}

/// Number of torsion factors.
///
/// # Safety
/// `g` is a live group handle; `out_len` is writable.
#[no_mangle]
pub unsafe extern "C" fn bf_group_torsion_len(g: *const BfGroup, out_len: *mut usize) -> BfStatus {
    guard(|| {
        *out(out_len, "out_len")? = deref(g, "group")?.0.torsion().len();
        Ok(())
    })
}

/// The `index`-th torsion factor.
///
/// # Safety
/// `g` is a live group handle; `out_order` is writable.
#[no_mangle]
pub unsafe extern "C" fn bf_group_torsion_at(
    g: *const BfGroup,
    index: usize,
    out_order: *mut u64,
) -> BfStatus {
    guard(|| {
        let t = deref(g, "group")?.0.torsion();
        let p = t.get(index).ok_or_else(|| {
            Failure(
                BfStatus::InvalidArgument,
                format!("index {index} out of {} factors", t.len()),
            )
        })?;
        *out(out_order, "out_order")? = *p;
        Ok(())
    })
}

/// Text such as `Z + Z_2`.
///
/// # Safety
/// `g` is a live group handle; `out_string` is writable.
#[no_mangle]
pub unsafe extern "C" fn bf_group_to_string(g: *const BfGroup, out_string: *mut *mut c_char) -> BfStatus {
    guard(|| {
        *out(out_string, "out_string")? = owned_string(deref(g, "group")?.0.to_string());
        Ok(())
    })
}

/// A catalog manifold, `L{p}_{q}`, or a `#`-separated connected sum.
///
/// # Safety
/// `name` is a nul-terminated string; `out_manifold` is writable.
#[no_mangle]
pub unsafe extern "C" fn bf_manifold_lookup(
    name: *const c_char,
    out_manifold: *mut *mut BfManifold,
) -> BfStatus {
    guard(|| {
        let slot = out(out_manifold, "out_manifold")?;
        *slot = boxed(BfManifold(lookup(text(name, "name")?)?));
        Ok(())
    })
}

/// `L(p, q)`.
///
/// # Safety
/// `out_manifold` is writable.
#[no_mangle]
pub unsafe extern "C" fn bf_lens_space(p: u64, q: u64, out_manifold: *mut *mut BfManifold) -> BfStatus {
    guard(|| {
        let slot = out(out_manifold, "out_manifold")?;
        *slot = boxed(BfManifold(lens_space(p, q)?));
        Ok(())
    })
}

/// `a # b`.
///
/// # Safety
/// `a` and `b` are live manifold handles; `out_manifold` is writable.
#[no_mangle]
pub unsafe extern "C" fn bf_connected_sum(
    a: *const BfManifold,
    b: *const BfManifold,
    out_manifold: *mut *mut BfManifold,
) -> BfStatus {
    guard(|| {
        let sum = connected_sum(&deref(a, "a")?.0, &deref(b, "b")?.0)?;
        *out(out_manifold, "out_manifold")? = boxed(BfManifold(sum));
        Ok(())
    })
}

/// A manifold description or surgery matrix file.
///
/// # Safety
/// `path` is a nul-terminated string; `out_manifold` is writable.
#[no_mangle]
pub unsafe extern "C" fn bf_manifold_load(
    path: *const c_char,
    out_manifold: *mut *mut BfManifold,
) -> BfStatus {
    guard(|| {
        let slot = out(out_manifold, "out_manifold")?;
        let path = text(path, "path")?;
        match load(Path::new(path))? {
            Loaded::Manifold(m) => {
                *slot = boxed(BfManifold(m));
                Ok(())
            }
            _ => Err(Failure(
                BfStatus::InvalidArgument,
                format!("{path} is a complex, not a manifold"),
            )),
        }
    })
}

/// # Safety
/// `m` is null or a live manifold handle.
#[no_mangle]
pub unsafe extern "C" fn bf_manifold_free(m: *mut BfManifold) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` is a live manifold handle; `out_string` is writable.
#[no_mangle]
pub unsafe extern "C" fn bf_manifold_name(m: *const BfManifold, out_string: *mut *mut c_char) -> BfStatus {
    guard(|| {
        *out(out_string, "out_string")? = owned_string(deref(m, "manifold")?.0.name.clone());
        Ok(())
    })
}

/// `H_1` as a new group handle.
///
/// # Safety
/// `m` is a live manifold handle; `out_group` is writable.
#[no_mangle]
pub unsafe extern "C" fn bf_manifold_h1(m: *const BfManifold, out_group: *mut *mut BfGroup) -> BfStatus {
    guard(|| {
        *out(out_group, "out_group")? = boxed(BfGroup(deref(m, "manifold")?.0.h1()));
        Ok(())
    })
}

/// The linking form as rows of `num/den` values, `;`-separated, e.g.
/// `1/2 0;0 1/2`.
///
/// # Safety
/// `m` is a live manifold handle; `out_string` is writable.
#[no_mangle]
pub unsafe extern "C" fn bf_manifold_linking_form(
    m: *const BfManifold,
    out_string: *mut *mut c_char,
) -> BfStatus {
    guard(|| {
        let form = deref(m, "manifold")?.0.require_form()?;
        let rows: Vec<String> = form.to_strings().iter().map(|r| r.join(" ")).collect();
        *out(out_string, "out_string")? = owned_string(rows.join(";"));
        Ok(())
    })
}

fn check_k(k: u64) -> Result<(), Failure> {
    if k == 0 {
        return Err(Failure(BfStatus::InvalidArgument, "k must be at least 1".into()));
    }
    Ok(())
}

/// `Z_{BF_k}` from the closed formula, as a decimal string.
///
/// # Safety
/// `h1` is a live group handle; `out_value` is writable.
#[no_mangle]
pub unsafe extern "C" fn bf_partition(
    h1: *const BfGroup,
    k: u64,
    convention: BfConvention,
    out_value: *mut *mut c_char,
) -> BfStatus {
    guard(|| {
        check_k(k)?;
        let v = partition_bf(&deref(h1, "h1")?.0, k, convention.into()).value;
        *out(out_value, "out_value")? = owned_string(v.to_string());
        Ok(())
    })
}

/// `Z_{BF_k} = |T| |Hom(G, Z_k)|`, as a decimal string.
///
/// # Safety
/// `h1` is a live group handle; `out_value` is writable.
#[no_mangle]
pub unsafe extern "C" fn bf_partition_hom(
    h1: *const BfGroup,
    k: u64,
    convention: BfConvention,
    out_value: *mut *mut c_char,
) -> BfStatus {
    guard(|| {
        check_k(k)?;
        let v = partition_hom(&deref(h1, "h1")?.0, k, convention.into()).value;
        *out(out_value, "out_value")? = owned_string(v.to_string());
        Ok(())
    })
}

/// `Z_{BF_k}` from the census of the support of `delta(k B)`; needs the
/// linking form.
///
/// # Safety
/// `m` is a live manifold handle; `out_value` is writable.
#[no_mangle]
pub unsafe extern "C" fn bf_partition_delta(
    m: *const BfManifold,
    k: u64,
    convention: BfConvention,
    out_value: *mut *mut c_char,
) -> BfStatus {
    guard(|| {
        check_k(k)?;
        let m = &deref(m, "manifold")?.0;
        let v = partition_delta_route(&m.h1(), m.require_form()?, k, convention.into())?.value;
        *out(out_value, "out_value")? = owned_string(v.to_string());
        Ok(())
    })
}

/// A chain complex (JSON) or simplicial complex (text) file.
///
/// # Safety
/// `path` is a nul-terminated string; `out_complex` is writable.
#[no_mangle]
pub unsafe extern "C" fn bf_complex_load(path: *const c_char, out_complex: *mut *mut BfComplex) -> BfStatus {
    guard(|| {
        let slot = out(out_complex, "out_complex")?;
        *slot = boxed(BfComplex(load_chain_complex(Path::new(text(path, "path")?))?));
        Ok(())
    })
}

/// The CW complex of `L(p, 1)` with one cell in each degree.
///
/// # Safety
/// `out_complex` is writable.
#[no_mangle]
pub unsafe extern "C" fn bf_complex_lens_cw(p: i64, out_complex: *mut *mut BfComplex) -> BfStatus {
    guard(|| {
        *out(out_complex, "out_complex")? = boxed(BfComplex(ChainComplex::lens_cw(p)));
        Ok(())
    })
}

/// # Safety
/// `c` is null or a live complex handle.
#[no_mangle]
pub unsafe extern "C" fn bf_complex_free(c: *mut BfComplex) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// `H_q` as a new group handle.
///
/// # Safety
/// `c` is a live complex handle; `out_group` is writable.
#[no_mangle]
pub unsafe extern "C" fn bf_complex_homology(
    c: *const BfComplex,
    q: usize,
    out_group: *mut *mut BfGroup,
) -> BfStatus {
    guard(|| {
        let g = deref(c, "complex")?.0.homology(q)?;
        *out(out_group, "out_group")? = boxed(BfGroup(g));
        Ok(())
    })
}

/// `|H^q(C; Z_k)|` as a decimal string.
///
/// # Safety
/// `c` is a live complex handle; `out_value` is writable.
#[no_mangle]
pub unsafe extern "C" fn bf_complex_cohomology_zk_order(
    c: *const BfComplex,
    q: usize,
    k: u64,
    out_value: *mut *mut c_char,
) -> BfStatus {
    guard(|| {
        check_k(k)?;
        let v = deref(c, "complex")?.0.cohomology_zk_order(q, k);
        *out(out_value, "out_value")? = owned_string(v.to_string());
        Ok(())
    })
}

/// Runs the Gauss-sum suite on groups of order `<= max_order` for
/// `k = 1..=max_k`, with at most `forms` forms per group.
///
/// # Safety
/// `out_passed` is writable.
#[no_mangle]
pub unsafe extern "C" fn bf_verify_gauss(
    max_order: u64,
    max_k: u64,
    forms: usize,
    seed: u64,
    out_passed: *mut bool,
) -> BfStatus {
    guard(|| {
        let slot = out(out_passed, "out_passed")?;
        let ks: Vec<u64> = (1..=max_k).collect();
        *slot = gauss_suite(max_order, &ks, FormPolicy { limit: forms, seed })?.passed();
        Ok(())
    })
}

/// Runs the BF/Chern-Simons suite on all nondegenerate forms of groups of
/// order `<= max_order`, for `k = 1..=max_k`.
///
/// # Safety
/// `out_passed` is writable.
#[no_mangle]
pub unsafe extern "C" fn bf_verify_back_to_cs(max_order: u64, max_k: u64, out_passed: *mut bool) -> BfStatus {
    guard(|| {
        *out(out_passed, "out_passed")? = back_to_cs_suite(max_order, max_k)?.passed();
        Ok(())
    })
}
