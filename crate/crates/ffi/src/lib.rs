//! C ABI over `mlpa`.
//!
//! Every fallible call returns an [`MlpaStatus`] and writes results through
//! out-pointers. After a non-`OK` status, [`mlpa_last_error`] describes the
//! failure for the calling thread. Handles come from `mlpa_rng_new` and
//! `mlpa_tree_grow` and are released by the matching `_free`, which accepts
//! NULL. Panics are caught at the boundary and reported as
//! `MLPA_STATUS_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mlpa::chain::sample_chain;
use mlpa::crp::{merger_pmf, sample_crp_count, MergerKernelQuery};
use mlpa::samplers::{sample_gml, sample_stable, sample_tilted_stable};
use mlpa::special::{exact_kn_pmf, kummer_u, neg_moment, stable_pdf};
use mlpa::tree::{grow_tree, max_scaled_degree, scaled_degrees, TreeState};
use mlpa::{AlphaTheta, Error, MomentQuery, RngStream};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MlpaStatus {
    Ok = 0,
    /// An argument is outside the operation's domain.
    Domain = 1,
    /// A numerical routine failed to converge or hit an iteration cap.
    Numeric = 2,
    NullPointer = 3,
    /// The caller's buffer is shorter than the result.
    BufferTooSmall = 4,
    Internal = 5,
}

/// Opaque random stream.
pub struct MlpaRng(RngStream);

/// Opaque beta-recursive tree.
pub struct MlpaTree(TreeState);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Fail {
    status: MlpaStatus,
    msg: String,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Domain(_) => MlpaStatus::Domain,
            Error::Numeric { .. } => MlpaStatus::Numeric,
            _ => MlpaStatus::Internal,
        };
        Fail { status, msg: e.to_string() }
    }
}

type Res<T> = Result<T, Fail>;

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard<F: FnOnce() -> Res<()>>(f: F) -> MlpaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MlpaStatus::Ok,
        Ok(Err(fail)) => {
            set_error(&fail.msg);
            fail.status
        }
        Err(_) => {
            set_error("internal panic");
            MlpaStatus::Internal
        }
    }
}

fn null(what: &str) -> Fail {
    Fail { status: MlpaStatus::NullPointer, msg: format!("{what} is NULL") }
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Res<&'a mut T> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn rng_ref<'a>(p: *mut MlpaRng) -> Res<&'a mut RngStream> {
    Ok(&mut out_ref(p, "rng")?.0)
}

unsafe fn tree_ref<'a>(p: *const MlpaTree) -> Res<&'a TreeState> {
    Ok(&p.as_ref().ok_or_else(|| null("tree"))?.0)
}

unsafe fn buffer<'a, T>(p: *mut T, len: usize, need: usize) -> Res<&'a mut [T]> {
    if p.is_null() {
        return Err(null("output buffer"));
    }
    if len < need {
        return Err(Fail {
            status: MlpaStatus::BufferTooSmall,
            msg: format!("buffer holds {len} values, {need} needed"),
        });
    }
    Ok(std::slice::from_raw_parts_mut(p, need))
}

/// Message for the last failure on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mlpa_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// New stream keyed by `(seed, stream)`. Never NULL.
#[no_mangle]
pub extern "C" fn mlpa_rng_new(seed: u64, stream: u64) -> *mut MlpaRng {
    Box::into_raw(Box::new(MlpaRng(RngStream::new(seed, stream))))
}

/// # Safety
/// `rng` is NULL or a pointer from `mlpa_rng_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mlpa_rng_free(rng: *mut MlpaRng) {
    if !rng.is_null() {
        drop(Box::from_raw(rng));
    }
}

/// Uniform on the open interval (0, 1).
///
/// # Safety
/// `rng` is a live handle; `out` is NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn mlpa_rng_uniform(rng: *mut MlpaRng, out: *mut f64) -> MlpaStatus {
    guard(|| {
        let r = rng_ref(rng)?;
        *out_ref(out, "out")? = r.uniform_open();
        Ok(())
    })
}

/// `E[S_{alpha,theta}^{-delta}]`.
///
/// # Safety
/// `out` is NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn mlpa_neg_moment(alpha: f64, theta: f64, delta: f64, out: *mut f64) -> MlpaStatus {
    guard(|| {
        let q = MomentQuery::new(alpha, theta, delta)?;
        *out_ref(out, "out")? = neg_moment(q);
        Ok(())
    })
}

/// Positive stable density `f_alpha(t)`.
///
/// # Safety
/// `out` is NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn mlpa_stable_pdf(alpha: f64, t: f64, out: *mut f64) -> MlpaStatus {
    guard(|| {
        let v = stable_pdf(alpha, t)?;
        *out_ref(out, "out")? = v;
        Ok(())
    })
}

/// Confluent hypergeometric function of the second kind `U(a, b, z)`.
///
/// # Safety
/// `out` is NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn mlpa_kummer_u(a: f64, b: f64, z: f64, out: *mut f64) -> MlpaStatus {
    guard(|| {
        let v = kummer_u(a, b, z)?;
        *out_ref(out, "out")? = v;
        Ok(())
    })
}

/// `P(K_n = k)` for `k = 0..=n` under `PD(alpha, theta)`, into `out[0..=n]`.
///
/// # Safety
/// `out` is NULL or points to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn mlpa_exact_kn_pmf(alpha: f64, theta: f64, n: usize, out: *mut f64, len: usize) -> MlpaStatus {
    guard(|| {
        let p = exact_kn_pmf(alpha, theta, n)?;
        buffer(out, len, p.len())?.copy_from_slice(&p);
        Ok(())
    })
}

/// Merger kernel `p_{alpha,theta}(ell | b)`.
///
/// # Safety
/// `out` is NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn mlpa_merger_pmf(alpha: f64, theta: f64, b: usize, ell: usize, out: *mut f64) -> MlpaStatus {
    guard(|| {
        let q = MergerKernelQuery::new(alpha, theta, b, ell)?;
        *out_ref(out, "out")? = merger_pmf(q);
        Ok(())
    })
}

/// Positive alpha-stable variate with Laplace transform `exp(-w^alpha)`.
///
/// # Safety
/// `rng` is a live handle; `out` is NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn mlpa_sample_stable(alpha: f64, rng: *mut MlpaRng, out: *mut f64) -> MlpaStatus {
    guard(|| {
        let r = rng_ref(rng)?;
        let o = out_ref(out, "out")?;
        *o = sample_stable(alpha, r)?;
        Ok(())
    })
}

/// Variate with density proportional to `t^{-theta} f_alpha(t)`.
///
/// # Safety
/// `rng` is a live handle; `out` is NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn mlpa_sample_tilted_stable(alpha: f64, theta: f64, rng: *mut MlpaRng, out: *mut f64) -> MlpaStatus {
    guard(|| {
        let p = AlphaTheta::new(alpha, theta)?;
        let r = rng_ref(rng)?;
        let o = out_ref(out, "out")?;
        *o = sample_tilted_stable(p, r)?;
        Ok(())
    })
}

/// Generalized Mittag-Leffler variate `S_{alpha,theta}^{-alpha}`.
///
/// # Safety
/// `rng` is a live handle; `out` is NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn mlpa_sample_gml(alpha: f64, theta: f64, rng: *mut MlpaRng, out: *mut f64) -> MlpaStatus {
    guard(|| {
        let p = AlphaTheta::new(alpha, theta)?;
        let r = rng_ref(rng)?;
        let o = out_ref(out, "out")?;
        *o = sample_gml(p, r)?;
        Ok(())
    })
}

/// Chain values `S_{alpha,theta+j}^{-alpha}`, `j = 0..=r`, into `out[0..=r]`.
///
/// # Safety
/// `rng` is a live handle; `out` is NULL or points to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn mlpa_sample_chain(
    alpha: f64,
    theta: f64,
    r: usize,
    rng: *mut MlpaRng,
    out: *mut f64,
    len: usize,
) -> MlpaStatus {
    guard(|| {
        let p = AlphaTheta::new(alpha, theta)?;
        let rg = rng_ref(rng)?;
        let buf = buffer(out, len, r.checked_add(1).ok_or_else(|| null("r overflow"))?)?;
        let path = sample_chain(p, r, rg)?;
        buf.copy_from_slice(&path.values);
        Ok(())
    })
}

/// Block count of a `PD(alpha, theta)` seating of `n` customers.
///
/// # Safety
/// `rng` is a live handle; `out` is NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn mlpa_sample_crp_count(alpha: f64, theta: f64, n: usize, rng: *mut MlpaRng, out: *mut usize) -> MlpaStatus {
    guard(|| {
        let r = rng_ref(rng)?;
        let o = out_ref(out, "out")?;
        *o = sample_crp_count(alpha, theta, n, r)?;
        Ok(())
    })
}

/// Grows a tree with `n` edges and stores a new handle in `*out`.
///
/// # Safety
/// `rng` is a live handle; `out` is NULL or writable. On failure `*out` is untouched.
#[no_mangle]
pub unsafe extern "C" fn mlpa_tree_grow(beta: f64, n: usize, rng: *mut MlpaRng, out: *mut *mut MlpaTree) -> MlpaStatus {
    guard(|| {
        let r = rng_ref(rng)?;
        let o = out_ref(out, "out")?;
        let t = grow_tree(beta, n, r)?;
        *o = Box::into_raw(Box::new(MlpaTree(t)));
        Ok(())
    })
}

/// # Safety
/// `tree` is NULL or a handle from `mlpa_tree_grow` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mlpa_tree_free(tree: *mut MlpaTree) {
    if !tree.is_null() {
        drop(Box::from_raw(tree));
    }
}

/// Edge count `n`; 0 for NULL.
///
/// # Safety
/// `tree` is NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mlpa_tree_edges(tree: *const MlpaTree) -> usize {
    tree.as_ref().map_or(0, |t| t.0.n)
}

/// Degrees `d[0..=n]`.
///
/// # Safety
/// `tree` is a live handle; `out` is NULL or points to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn mlpa_tree_degrees(tree: *const MlpaTree, out: *mut u32, len: usize) -> MlpaStatus {
    guard(|| {
        let t = tree_ref(tree)?;
        buffer(out, len, t.degrees.len())?.copy_from_slice(&t.degrees);
        Ok(())
    })
}

/// Parents `p[0..=n]`; `p[0]` is 0 and carries no meaning.
///
/// # Safety
/// `tree` is a live handle; `out` is NULL or points to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn mlpa_tree_parents(tree: *const MlpaTree, out: *mut u32, len: usize) -> MlpaStatus {
    guard(|| {
        let t = tree_ref(tree)?;
        buffer(out, len, t.parent.len())?.copy_from_slice(&t.parent);
        Ok(())
    })
}

/// `n^{-1/(2+beta)} d[0..=r]`.
///
/// # Safety
/// `tree` is a live handle; `out` is NULL or points to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn mlpa_tree_scaled_degrees(tree: *const MlpaTree, r: usize, out: *mut f64, len: usize) -> MlpaStatus {
    guard(|| {
        let t = tree_ref(tree)?;
        let s = scaled_degrees(t, r)?;
        buffer(out, len, s.len())?.copy_from_slice(&s);
        Ok(())
    })
}

/// `n^{-1/(2+beta)} max_{i <= r_cap} d[i]`.
///
/// # Safety
/// `tree` is a live handle; `out` is NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn mlpa_tree_max_scaled_degree(tree: *const MlpaTree, r_cap: usize, out: *mut f64) -> MlpaStatus {
    guard(|| {
        let t = tree_ref(tree)?;
        *out_ref(out, "out")? = max_scaled_degree(t, r_cap);
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CStr;

    fn last_error() -> String {
        let p = mlpa_last_error();
        assert!(!p.is_null());
        unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
    }

    #[test]
    fn status_codes() {
        let mut x = 0.0;
        unsafe {
            assert_eq!(mlpa_neg_moment(0.5, 1.0, 0.5, &mut x), MlpaStatus::Ok);
            assert!((x - 4.0 / std::f64::consts::PI.sqrt()).abs() < 1e-12);
            assert_eq!(mlpa_neg_moment(1.5, 1.0, 0.5, &mut x), MlpaStatus::Domain);
            assert!(last_error().contains("alpha"));
            assert_eq!(mlpa_neg_moment(0.5, 1.0, 0.5, ptr::null_mut()), MlpaStatus::NullPointer);
        }
    }

    #[test]
    fn buffer_checks() {
        let mut buf = [0.0; 3];
        unsafe {
            assert_eq!(mlpa_exact_kn_pmf(0.5, 0.0, 3, buf.as_mut_ptr(), 3), MlpaStatus::BufferTooSmall);
            let mut big = [0.0; 4];
            assert_eq!(mlpa_exact_kn_pmf(0.5, 0.0, 3, big.as_mut_ptr(), 4), MlpaStatus::Ok);
            assert!((big.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
    }
}
