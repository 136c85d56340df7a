//! C ABI over `rhokit`. Matrices cross the boundary as opaque `RhoMatrix` handles; every
//! call returns a `RhoStatus` and leaves a message for `rho_last_error_message` on failure.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use rhokit::kernel::DiscGrid;
use rhokit::radius::{self, DEFAULT_SHIFT_TOL};
use rhokit::{harnack, kernel, shifts, structure, CMatrix, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoStatus {
    Ok = 0,
    InvalidInput = 1,
    Numeric = 2,
    NullPointer = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

/// Opaque square complex matrix.
pub struct RhoMatrix(CMatrix);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: RhoStatus, msg: impl Into<String>) -> RhoStatus {
    set_error(msg);
    status
}

impl From<Error> for RhoStatus {
    fn from(e: Error) -> Self {
        let status = if e.is_numeric() { RhoStatus::Numeric } else { RhoStatus::InvalidInput };
        fail(status, e.to_string())
    }
}

/// Runs `f`, turning panics into `RhoStatus::Panic`.
fn guard(f: impl FnOnce() -> Result<(), RhoStatus>) -> RhoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            RhoStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => fail(RhoStatus::Panic, "internal panic"),
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), RhoStatus> {
    if p.is_null() {
        Err(fail(RhoStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

/// # Safety
/// `m` must be null or a live handle from this library.
unsafe fn matrix<'a>(m: *const RhoMatrix, name: &str) -> Result<&'a CMatrix, RhoStatus> {
    non_null(m, name)?;
    Ok(&(*m).0)
}

unsafe fn emit(out: *mut *mut RhoMatrix, m: CMatrix) {
    *out = Box::into_raw(Box::new(RhoMatrix(m)));
}

/// Message of the last failed call on this thread; empty after a success. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn rho_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a `dim × dim` matrix from row-major real and imaginary parts.
///
/// # Safety
/// `re` and `im` must point to `dim * dim` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rho_matrix_new(
    dim: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut RhoMatrix,
) -> RhoStatus {
    guard(|| {
        non_null(re, "re")?;
        non_null(im, "im")?;
        non_null(out, "out")?;
        let len = dim.checked_mul(dim).ok_or_else(|| fail(RhoStatus::InvalidInput, "dim overflows"))?;
        let re = std::slice::from_raw_parts(re, len);
        let im = std::slice::from_raw_parts(im, len);
        let data = re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        emit(out, CMatrix::from_row_major(dim, data)?);
        Ok(())
    })
}

/// # Safety
/// `m` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rho_matrix_free(m: *mut RhoMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Dimension of `m`, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rho_matrix_dim(m: *const RhoMatrix) -> usize {
    if m.is_null() { 0 } else { (*m).0.dim() }
}

/// Copies the row-major entries into `re` and `im`, each of length `len ≥ dim²`.
///
/// # Safety
/// `re` and `im` must be writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rho_matrix_entries(m: *const RhoMatrix, re: *mut f64, im: *mut f64, len: usize) -> RhoStatus {
    guard(|| {
        let m = matrix(m, "m")?;
        non_null(re, "re")?;
        non_null(im, "im")?;
        let data = m.as_slice();
        if len < data.len() {
            return Err(fail(RhoStatus::BufferTooSmall, format!("need {} entries", data.len())));
        }
        for (k, z) in data.iter().enumerate() {
            *re.add(k) = z.re;
            *im.add(k) = z.im;
        }
        Ok(())
    })
}

/// The `(n+1) × (n+1)` truncated shift with superdiagonal weight `b`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rho_shift(n: usize, b: f64, out: *mut *mut RhoMatrix) -> RhoStatus {
    guard(|| {
        non_null(out, "out")?;
        emit(out, shifts::ShiftSpec::new(n, b)?.matrix());
        Ok(())
    })
}

/// The truncated shift of size `n+1` scaled so that `w_ρ = 1`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rho_normalized_shift(n: usize, rho: f64, out: *mut *mut RhoMatrix) -> RhoStatus {
    guard(|| {
        non_null(out, "out")?;
        emit(out, shifts::normalized_shift(n, rho)?);
        Ok(())
    })
}

/// The canonical form in `C₂` of the Harnack part of the normalized shift.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rho_canonical_form_c2(n: usize, theta: f64, out: *mut *mut RhoMatrix) -> RhoStatus {
    guard(|| {
        non_null(out, "out")?;
        emit(out, structure::canonical_form_C2(n, theta)?);
        Ok(())
    })
}

/// `w_ρ(T)` by bisection on the default disc grid.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rho_radius(m: *const RhoMatrix, rho: f64, tol: f64, out: *mut f64) -> RhoStatus {
    guard(|| {
        let m = matrix(m, "m")?;
        non_null(out, "out")?;
        *out = radius::radius_bisect(m, rho, &DiscGrid::default(), tol)?.value;
        Ok(())
    })
}

/// `w_ρ(S_{n+1}(1))` to full precision.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rho_shift_radius(n: usize, rho: f64, out: *mut f64) -> RhoStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = radius::shift_radius(n, rho, DEFAULT_SHIFT_TOL)?.value;
        Ok(())
    })
}

/// Ascending eigenvalues of the ρ-kernel of `m` at `z`, written to `out[0..dim]`.
///
/// # Safety
/// `m` must be a live handle and `out` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rho_kernel_eigenvalues(
    m: *const RhoMatrix,
    z_re: f64,
    z_im: f64,
    rho: f64,
    out: *mut f64,
    len: usize,
) -> RhoStatus {
    guard(|| {
        let m = matrix(m, "m")?;
        non_null(out, "out")?;
        if len < m.dim() {
            return Err(fail(RhoStatus::BufferTooSmall, format!("need {} values", m.dim())));
        }
        let spectrum = kernel::kernel_spectrum(m, Complex64::new(z_re, z_im), rho)?;
        ptr::copy_nonoverlapping(spectrum.as_ptr(), out, spectrum.len());
        Ok(())
    })
}

/// Harnack equivalence of `t1` and `t0` in `C_ρ` through nullspace equality on the torus.
///
/// # Safety
/// `t1`, `t0` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rho_harnack_equivalent(
    t1: *const RhoMatrix,
    t0: *const RhoMatrix,
    rho: f64,
    out: *mut bool,
) -> RhoStatus {
    guard(|| {
        let t1 = matrix(t1, "t1")?;
        let t0 = matrix(t0, "t0")?;
        non_null(out, "out")?;
        *out = harnack::nullspace_equality(t1, t0, rho, harnack::TORUS_ANGLES, harnack::ANGLE_TOL)?.equal;
        Ok(())
    })
}

/// The phase-fixed null vector of `K_1^ρ` for the normalized shift, written to
/// `re[0..=n]`, `im[0..=n]`.
///
/// # Safety
/// `re` and `im` must be writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rho_null_profile(n: usize, rho: f64, re: *mut f64, im: *mut f64, len: usize) -> RhoStatus {
    guard(|| {
        non_null(re, "re")?;
        non_null(im, "im")?;
        if len < n + 1 {
            return Err(fail(RhoStatus::BufferTooSmall, format!("need {} values", n + 1)));
        }
        let profile = structure::null_profile(n, rho, harnack::ANGLE_TOL)?;
        for (k, z) in profile.v.iter().enumerate() {
            *re.add(k) = z.re;
            *im.add(k) = z.im;
        }
        Ok(())
    })
}
