//! C ABI over `cswiretap`.
//!
//! Every fallible function returns a [`CsStatus`] and writes its result
//! through an out-pointer. On failure the message is kept per thread and can
//! be read with [`cs_last_error_message`]. Matrices and channel instances are
//! opaque handles released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::OnceLock;

use cswiretap::bounds::{identity_secrecy, lb1_exact, lb1_sampled, lb2_expected, lb3, lb3_left_limit, ub1, ub2, ub3};
use cswiretap::channel::{decoding_error_rate, encode_message, message_of, transmit, ChannelInstance, SubspaceDecoder};
use cswiretap::matrixcore::{gram_logdet, sample_gaussian_matrix};
use cswiretap::specfun::{binary_entropy, digamma, log_gamma, mixture_entropy_g, mu};
use cswiretap::{AsymptoticRatios, ChannelDims, Error, Matrix, QuadratureSpec, SeededStream, Support, SupportSearch};

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsStatus {
    Ok = 0,
    Domain = 1,
    DimensionMismatch = 2,
    SingularGram = 3,
    TooManySupports = 4,
    RankOutOfRange = 5,
    AllocationGuard = 6,
    QuadratureNonConvergence = 7,
    NoCandidate = 8,
    AmbiguousDecode = 9,
    NullPointer = 10,
    Panic = 11,
}

impl From<&Error> for CsStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => CsStatus::Domain,
            Error::DimensionMismatch(_) => CsStatus::DimensionMismatch,
            Error::SingularGram { .. } => CsStatus::SingularGram,
            Error::TooManySupports { .. } => CsStatus::TooManySupports,
            Error::RankOutOfRange { .. } => CsStatus::RankOutOfRange,
            Error::AllocationGuard { .. } => CsStatus::AllocationGuard,
            Error::QuadratureNonConvergence { .. } => CsStatus::QuadratureNonConvergence,
            Error::NoCandidate { .. } => CsStatus::NoCandidate,
            Error::AmbiguousDecode { .. } => CsStatus::AmbiguousDecode,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Message of the last failed call on this thread, or NULL when the last
/// call succeeded. Valid until the next call into this library on the same
/// thread.
#[no_mangle]
pub extern "C" fn cs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cs_version() -> *const c_char {
    static VERSION: OnceLock<CString> = OnceLock::new();
    VERSION.get_or_init(|| CString::new(cswiretap::VERSION).expect("no nul")).as_ptr()
}

/// Runs `f`, maps errors and panics to status codes.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> CsStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CsStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            CsStatus::from(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            CsStatus::NullPointer
        }
        Err(_) => {
            set_last_error("internal panic".into());
            CsStatus::Panic
        }
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &'static str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

fn quad(abs_tolerance: f64) -> QuadratureSpec {
    QuadratureSpec { abs_tolerance, ..QuadratureSpec::default() }
}

/// Natural log of Γ(x), x > 0.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_log_gamma(x: f64, out: *mut f64) -> CsStatus {
    guard(|| {
        *self::out(out, "out")? = log_gamma(x)?;
        Ok(())
    })
}

/// Digamma ψ(x), x > 0.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_digamma(x: f64, out: *mut f64) -> CsStatus {
    guard(|| {
        *self::out(out, "out")? = digamma(x)?;
        Ok(())
    })
}

/// Binary entropy in bits, q in [0, 1].
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_binary_entropy(x: f64, out: *mut f64) -> CsStatus {
    guard(|| {
        *self::out(out, "out")? = binary_entropy(x)?;
        Ok(())
    })
}

/// Limiting Wishart log-determinant rate μ(ρ) in bits, ρ in (0, 1].
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_mu(x: f64, out: *mut f64) -> CsStatus {
    guard(|| {
        *self::out(out, "out")? = mu(x)?;
        Ok(())
    })
}

/// g(kappa, rho_e) in bits, integrated to absolute tolerance `abs_tol`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_mixture_entropy_g(kappa: f64, rho_e: f64, abs_tol: f64, out: *mut f64) -> CsStatus {
    guard(|| {
        *self::out(out, "out")? = mixture_entropy_g(kappa, rho_e, &quad(abs_tol))?;
        Ok(())
    })
}

/// Asymptotic secrecy lower bound; requires rho_e < rho_b.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_lb3(rho_b: f64, rho_e: f64, out: *mut f64) -> CsStatus {
    guard(|| {
        *self::out(out, "out")? = lb3(&AsymptoticRatios::new(rho_b, rho_e)?)?.bits_per_dim;
        Ok(())
    })
}

/// Limit of [`cs_lb3`] as rho_e approaches rho_b.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_lb3_left_limit(rho_b: f64, out: *mut f64) -> CsStatus {
    guard(|| {
        *self::out(out, "out")? = lb3_left_limit(rho_b)?;
        Ok(())
    })
}

/// H2(rho_b).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_ub2(rho_b: f64, out: *mut f64) -> CsStatus {
    guard(|| {
        *self::out(out, "out")? = ub2(&AsymptoticRatios::new(rho_b, 0.0)?)?.bits_per_dim;
        Ok(())
    })
}

/// Symmetric-code upper bound; equals [`cs_ub2`] at rho_e = 0.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_ub3(rho_b: f64, rho_e: f64, abs_tol: f64, out: *mut f64) -> CsStatus {
    guard(|| {
        *self::out(out, "out")? = ub3(&AsymptoticRatios::new(rho_b, rho_e)?, &quad(abs_tol))?.bits_per_dim;
        Ok(())
    })
}

/// Expected secrecy lower bound over Gaussian A_e.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_lb2_expected(p: usize, m_b: usize, m_e: usize, out: *mut f64) -> CsStatus {
    guard(|| {
        *self::out(out, "out")? = lb2_expected(&ChannelDims::new(p, m_b, m_e)?)?.bits_per_dim;
        Ok(())
    })
}

/// (m_b - m_e)/p, or 0 when m_e >= m_b.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_identity_secrecy(p: usize, m_b: usize, m_e: usize, out: *mut f64) -> CsStatus {
    guard(|| {
        *self::out(out, "out")? = identity_secrecy(&ChannelDims::relaxed(p, m_b, m_e)?).bits_per_dim;
        Ok(())
    })
}

/// Opaque dense matrix.
pub struct CsMatrix {
    inner: Matrix,
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Copies a `rows x cols` row-major array into a new matrix.
///
/// # Safety
/// `data` must point to `rows * cols` readable doubles; `out` must be valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_matrix_from_row_major(
    rows: usize,
    cols: usize,
    data: *const f64,
    out: *mut *mut CsMatrix,
) -> CsStatus {
    guard(|| {
        let dst = self::out(out, "out")?;
        let len = rows.checked_mul(cols).ok_or_else(|| Error::Domain("rows * cols overflows".into()))?;
        let values = slice(data, len, "data")?.to_vec();
        *dst = boxed(CsMatrix { inner: Matrix::from_row_major(rows, cols, values)? });
        Ok(())
    })
}

/// A `rows x cols` standard Gaussian matrix from stream `(seed, stream)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_matrix_gaussian(
    rows: usize,
    cols: usize,
    seed: u64,
    stream: u64,
    out: *mut *mut CsMatrix,
) -> CsStatus {
    guard(|| {
        let dst = self::out(out, "out")?;
        *dst = boxed(CsMatrix { inner: sample_gaussian_matrix(rows, cols, &SeededStream::new(seed, stream))? });
        Ok(())
    })
}

/// Row count, or 0 for NULL.
///
/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_matrix_rows(m: *const CsMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.inner.rows())
}

/// Column count, or 0 for NULL.
///
/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_matrix_cols(m: *const CsMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.inner.cols())
}

/// Copies the entries in row-major order into `buf` of length `len`, which
/// must equal rows * cols.
///
/// # Safety
/// `m` must be a live handle; `buf` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn cs_matrix_copy(m: *const CsMatrix, buf: *mut f64, len: usize) -> CsStatus {
    guard(|| {
        let m = m.as_ref().ok_or(Failure::Null("matrix"))?;
        let src = m.inner.as_slice();
        if len != src.len() {
            return Err(Error::DimensionMismatch(format!("buffer of {len} for {} entries", src.len())).into());
        }
        slice_mut(buf, len, "buf")?.copy_from_slice(src);
        Ok(())
    })
}

/// Releases a matrix. NULL is ignored.
///
/// # Safety
/// `m` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cs_matrix_free(m: *mut CsMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

unsafe fn matrix<'a>(m: *const CsMatrix) -> Result<&'a Matrix, Failure> {
    m.as_ref().map(|m| &m.inner).ok_or(Failure::Null("matrix"))
}

/// log2 det(A(x) A(x)^T / normalizer) for the `k` column indices in
/// `indices` (strictly increasing).
///
/// # Safety
/// `a` must be a live handle, `indices` must hold `k` values, `out` must be
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_gram_logdet(
    a: *const CsMatrix,
    indices: *const usize,
    k: usize,
    normalizer: f64,
    out: *mut f64,
) -> CsStatus {
    guard(|| {
        let a = matrix(a)?;
        let x = Support::new(a.cols(), slice(indices, k, "indices")?.to_vec())?;
        *self::out(out, "out")? = gram_logdet(a, &x, normalizer)?;
        Ok(())
    })
}

/// Exact LB1 for eavesdropper matrix `a_e` (m_e x p).
///
/// # Safety
/// `a_e` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_lb1_exact(
    a_e: *const CsMatrix,
    p: usize,
    m_b: usize,
    m_e: usize,
    out: *mut f64,
) -> CsStatus {
    guard(|| {
        let v = lb1_exact(matrix(a_e)?, &ChannelDims::new(p, m_b, m_e)?)?;
        *self::out(out, "out")? = v.bits_per_dim;
        Ok(())
    })
}

/// LB1 with the support average over `n_samples` uniform supports. Writes
/// the estimate and its standard error.
///
/// # Safety
/// `a_e` must be a live handle; `out`, `std_error` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_lb1_sampled(
    a_e: *const CsMatrix,
    p: usize,
    m_b: usize,
    m_e: usize,
    n_samples: usize,
    seed: u64,
    stream: u64,
    out: *mut f64,
    std_error: *mut f64,
) -> CsStatus {
    guard(|| {
        let v =
            lb1_sampled(matrix(a_e)?, &ChannelDims::new(p, m_b, m_e)?, n_samples, &SeededStream::new(seed, stream))?;
        *self::out(out, "out")? = v.bits_per_dim;
        *self::out(std_error, "std_error")? = v.std_error.unwrap_or(0.0);
        Ok(())
    })
}

/// UB1 for Bob's matrix `a_b` (m_b x p). `samples_per_k = 0` enumerates all
/// supports; otherwise that many are sampled per weight. May write +inf
/// when some Gram matrix is singular.
///
/// # Safety
/// `a_b` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_ub1(
    a_b: *const CsMatrix,
    p: usize,
    m_b: usize,
    samples_per_k: usize,
    seed: u64,
    out: *mut f64,
) -> CsStatus {
    guard(|| {
        let search = if samples_per_k == 0 {
            SupportSearch::Enumerate
        } else {
            SupportSearch::Sample { n: samples_per_k, stream: SeededStream::new(seed, 0) }
        };
        let v = ub1(matrix(a_b)?, &ChannelDims::relaxed(p, m_b, 0)?, &search)?;
        *self::out(out, "out")? = v.bits_per_dim;
        Ok(())
    })
}

/// Opaque channel instance with a lazily built decoder.
pub struct CsChannel {
    inst: ChannelInstance,
    decoder: OnceLock<SubspaceDecoder>,
}

impl CsChannel {
    fn decoder(&self) -> Result<&SubspaceDecoder, Error> {
        if let Some(d) = self.decoder.get() {
            return Ok(d);
        }
        let d = SubspaceDecoder::new(self.inst.a_b(), self.inst.dims().m_b() - 1)?;
        Ok(self.decoder.get_or_init(|| d))
    }
}

fn new_channel(inst: ChannelInstance) -> *mut CsChannel {
    boxed(CsChannel { inst, decoder: OnceLock::new() })
}

/// Gaussian channel with `0 <= m_e < m_b < p/2`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_channel_gaussian(
    p: usize,
    m_b: usize,
    m_e: usize,
    seed: u64,
    out: *mut *mut CsChannel,
) -> CsStatus {
    guard(|| {
        let dst = self::out(out, "out")?;
        let inst = ChannelInstance::gaussian(ChannelDims::new(p, m_b, m_e)?, &SeededStream::new(seed, 0))?;
        *dst = new_channel(inst);
        Ok(())
    })
}

/// Channel whose matrices are leading identity rows (any `m_e <= p`).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_channel_identity_rows(
    p: usize,
    m_b: usize,
    m_e: usize,
    out: *mut *mut CsChannel,
) -> CsStatus {
    guard(|| {
        let dst = self::out(out, "out")?;
        *dst = new_channel(ChannelInstance::identity_rows(ChannelDims::relaxed(p, m_b, m_e)?));
        Ok(())
    })
}

/// Releases a channel. NULL is ignored.
///
/// # Safety
/// `ch` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cs_channel_free(ch: *mut CsChannel) {
    if !ch.is_null() {
        drop(Box::from_raw(ch));
    }
}

unsafe fn channel<'a>(ch: *const CsChannel) -> Result<&'a CsChannel, Failure> {
    ch.as_ref().ok_or(Failure::Null("channel"))
}

/// Sends `message` (a rank below C(p, m_b - 1)). Writes Bob's observation
/// into `y` (length `y_len` = m_b) and Eve's into `z` (length `z_len` = m_e).
///
/// # Safety
/// `ch` must be a live handle; `y`, `z` must be valid for their lengths.
#[no_mangle]
pub unsafe extern "C" fn cs_channel_transmit(
    ch: *const CsChannel,
    message: u64,
    seed: u64,
    stream: u64,
    y: *mut f64,
    y_len: usize,
    z: *mut f64,
    z_len: usize,
) -> CsStatus {
    guard(|| {
        let ch = channel(ch)?;
        let dims = ch.inst.dims();
        if y_len != dims.m_b() || z_len != dims.m_e() {
            return Err(Error::DimensionMismatch(format!(
                "buffers of {y_len} and {z_len} for m_b = {}, m_e = {}",
                dims.m_b(),
                dims.m_e()
            ))
            .into());
        }
        let x = encode_message(u128::from(message), dims)?;
        let r = transmit(&ch.inst, &x, &SeededStream::new(seed, stream))?;
        slice_mut(y, y_len, "y")?.copy_from_slice(&r.y);
        slice_mut(z, z_len, "z")?.copy_from_slice(&r.z);
        Ok(())
    })
}

/// Decodes Bob's observation `y` (length m_b) to a message.
///
/// # Safety
/// `ch` must be a live handle, `y` must hold `y_len` doubles, `message` must
/// be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_channel_decode(
    ch: *const CsChannel,
    y: *const f64,
    y_len: usize,
    tol: f64,
    message: *mut u64,
) -> CsStatus {
    guard(|| {
        let ch = channel(ch)?;
        let x = ch.decoder()?.decode(slice(y, y_len, "y")?, tol)?;
        *self::out(message, "message")? = message_of(&x) as u64;
        Ok(())
    })
}

/// End-to-end decoding over `trials` uniform messages. Writes the error
/// fraction and the error count.
///
/// # Safety
/// `ch` must be a live handle; `rate`, `errors` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cs_channel_error_rate(
    ch: *const CsChannel,
    trials: u64,
    seed: u64,
    tol: f64,
    rate: *mut f64,
    errors: *mut u64,
) -> CsStatus {
    guard(|| {
        let ch = channel(ch)?;
        let r = decoding_error_rate(&ch.inst, trials, &SeededStream::new(seed, 1), tol)?;
        *self::out(rate, "rate")? = r.report.mean;
        *self::out(errors, "errors")? = r.errors;
        Ok(())
    })
}

/// Copies the last error message into `buf` (NUL-terminated, truncated to
/// `len`). Returns the full message length, 0 when there is none.
///
/// # Safety
/// `buf` must be NULL or valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn cs_last_error_copy(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Reads a C string produced by this library; used by the tests.
#[doc(hidden)]
pub fn last_error_string() -> Option<String> {
    let p = cs_last_error_message();
    if p.is_null() {
        None
    } else {
        // SAFETY: the pointer comes from the thread-local CString
        Some(unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
    }
}
