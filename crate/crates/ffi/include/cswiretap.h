#ifndef CSWIRETAP_H
#define CSWIRETAP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes. Zero is success.
typedef enum CsStatus {
  CS_STATUS_OK = 0,
  CS_STATUS_DOMAIN = 1,
  CS_STATUS_DIMENSION_MISMATCH = 2,
  CS_STATUS_SINGULAR_GRAM = 3,
  CS_STATUS_TOO_MANY_SUPPORTS = 4,
  CS_STATUS_RANK_OUT_OF_RANGE = 5,
  CS_STATUS_ALLOCATION_GUARD = 6,
  CS_STATUS_QUADRATURE_NON_CONVERGENCE = 7,
  CS_STATUS_NO_CANDIDATE = 8,
  CS_STATUS_AMBIGUOUS_DECODE = 9,
  CS_STATUS_NULL_POINTER = 10,
  CS_STATUS_PANIC = 11,
} CsStatus;

// Opaque channel instance with a lazily built decoder.
typedef struct CsChannel CsChannel;

// Opaque dense matrix.
typedef struct CsMatrix CsMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL when the last
// call succeeded. Valid until the next call into this library on the same
// thread.
const char *cs_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *cs_version(void);

// Natural log of Γ(x), x > 0.
//
// # Safety
// `out` must be valid for writes.
enum CsStatus cs_log_gamma(double x, double *out);

// Digamma ψ(x), x > 0.
//
// # Safety
// `out` must be valid for writes.
enum CsStatus cs_digamma(double x, double *out);

// Binary entropy in bits, q in [0, 1].
//
// # Safety
// `out` must be valid for writes.
enum CsStatus cs_binary_entropy(double x, double *out);

// Limiting Wishart log-determinant rate μ(ρ) in bits, ρ in (0, 1].
//
// # Safety
// `out` must be valid for writes.
enum CsStatus cs_mu(double x, double *out);

// g(kappa, rho_e) in bits, integrated to absolute tolerance `abs_tol`.
//
// # Safety
// `out` must be valid for writes.
enum CsStatus cs_mixture_entropy_g(double kappa, double rho_e, double abs_tol, double *out);

// Asymptotic secrecy lower bound; requires rho_e < rho_b.
//
// # Safety
// `out` must be valid for writes.
enum CsStatus cs_lb3(double rho_b, double rho_e, double *out);

// Limit of [`cs_lb3`] as rho_e approaches rho_b.
//
// # Safety
// `out` must be valid for writes.
enum CsStatus cs_lb3_left_limit(double rho_b, double *out);

// H2(rho_b).
//
// # Safety
// `out` must be valid for writes.
enum CsStatus cs_ub2(double rho_b, double *out);

// Symmetric-code upper bound; equals [`cs_ub2`] at rho_e = 0.
//
// # Safety
// `out` must be valid for writes.
enum CsStatus cs_ub3(double rho_b, double rho_e, double abs_tol, double *out);

// Expected secrecy lower bound over Gaussian A_e.
//
// # Safety
// `out` must be valid for writes.
enum CsStatus cs_lb2_expected(size_t p, size_t m_b, size_t m_e, double *out);

// (m_b - m_e)/p, or 0 when m_e >= m_b.
//
// # Safety
// `out` must be valid for writes.
enum CsStatus cs_identity_secrecy(size_t p, size_t m_b, size_t m_e, double *out);

// Copies a `rows x cols` row-major array into a new matrix.
//
// # Safety
// `data` must point to `rows * cols` readable doubles; `out` must be valid
// for writes.
enum CsStatus cs_matrix_from_row_major(size_t rows,
                                       size_t cols,
                                       const double *data,
                                       struct CsMatrix **out);

// A `rows x cols` standard Gaussian matrix from stream `(seed, stream)`.
//
// # Safety
// `out` must be valid for writes.
enum CsStatus cs_matrix_gaussian(size_t rows,
                                 size_t cols,
                                 uint64_t seed,
                                 uint64_t stream,
                                 struct CsMatrix **out);

// Row count, or 0 for NULL.
//
// # Safety
// `m` must be NULL or a live handle.
size_t cs_matrix_rows(const struct CsMatrix *m);

// Column count, or 0 for NULL.
//
// # Safety
// `m` must be NULL or a live handle.
size_t cs_matrix_cols(const struct CsMatrix *m);

// Copies the entries in row-major order into `buf` of length `len`, which
// must equal rows * cols.
//
// # Safety
// `m` must be a live handle; `buf` must be valid for `len` writes.
enum CsStatus cs_matrix_copy(const struct CsMatrix *m, double *buf, size_t len);

// Releases a matrix. NULL is ignored.
//
// # Safety
// `m` must be NULL or a handle not yet freed.
void cs_matrix_free(struct CsMatrix *m);

// log2 det(A(x) A(x)^T / normalizer) for the `k` column indices in
// `indices` (strictly increasing).
//
// # Safety
// `a` must be a live handle, `indices` must hold `k` values, `out` must be
// valid for writes.
enum CsStatus cs_gram_logdet(const struct CsMatrix *a,
                             const size_t *indices,
                             size_t k,
                             double normalizer,
                             double *out);

// Exact LB1 for eavesdropper matrix `a_e` (m_e x p).
//
// # Safety
// `a_e` must be a live handle; `out` must be valid for writes.
enum CsStatus cs_lb1_exact(const struct CsMatrix *a_e,
                           size_t p,
                           size_t m_b,
                           size_t m_e,
                           double *out);

// LB1 with the support average over `n_samples` uniform supports. Writes
// the estimate and its standard error.
//
// # Safety
// `a_e` must be a live handle; `out`, `std_error` must be valid for writes.
enum CsStatus cs_lb1_sampled(const struct CsMatrix *a_e,
                             size_t p,
                             size_t m_b,
                             size_t m_e,
                             size_t n_samples,
                             uint64_t seed,
                             uint64_t stream,
                             double *out,
                             double *std_error);

// UB1 for Bob's matrix `a_b` (m_b x p). `samples_per_k = 0` enumerates all
// supports; otherwise that many are sampled per weight. May write +inf
// when some Gram matrix is singular.
//
// # Safety
// `a_b` must be a live handle; `out` must be valid for writes.
enum CsStatus cs_ub1(const struct CsMatrix *a_b,
                     size_t p,
                     size_t m_b,
                     size_t samples_per_k,
                     uint64_t seed,
                     double *out);

// Gaussian channel with `0 <= m_e < m_b < p/2`.
//
// # Safety
// `out` must be valid for writes.
enum CsStatus cs_channel_gaussian(size_t p,
                                  size_t m_b,
                                  size_t m_e,
                                  uint64_t seed,
                                  struct CsChannel **out);

// Channel whose matrices are leading identity rows (any `m_e <= p`).
//
// # Safety
// `out` must be valid for writes.
enum CsStatus cs_channel_identity_rows(size_t p, size_t m_b, size_t m_e, struct CsChannel **out);

// Releases a channel. NULL is ignored.
//
// # Safety
// `ch` must be NULL or a handle not yet freed.
void cs_channel_free(struct CsChannel *ch);

// Sends `message` (a rank below C(p, m_b - 1)). Writes Bob's observation
// into `y` (length `y_len` = m_b) and Eve's into `z` (length `z_len` = m_e).
//
// # Safety
// `ch` must be a live handle; `y`, `z` must be valid for their lengths.
enum CsStatus cs_channel_transmit(const struct CsChannel *ch,
                                  uint64_t message,
                                  uint64_t seed,
                                  uint64_t stream,
                                  double *y,
                                  size_t y_len,
                                  double *z,
                                  size_t z_len);

// Decodes Bob's observation `y` (length m_b) to a message.
//
// # Safety
// `ch` must be a live handle, `y` must hold `y_len` doubles, `message` must
// be valid for writes.
enum CsStatus cs_channel_decode(const struct CsChannel *ch,
                                const double *y,
                                size_t y_len,
                                double tol,
                                uint64_t *message);

// End-to-end decoding over `trials` uniform messages. Writes the error
// fraction and the error count.
//
// # Safety
// `ch` must be a live handle; `rate`, `errors` must be valid for writes.
enum CsStatus cs_channel_error_rate(const struct CsChannel *ch,
                                    uint64_t trials,
                                    uint64_t seed,
                                    double tol,
                                    double *rate,
                                    uint64_t *errors);

// Copies the last error message into `buf` (NUL-terminated, truncated to
// `len`). Returns the full message length, 0 when there is none.
//
// # Safety
// `buf` must be NULL or valid for `len` writes.
size_t cs_last_error_copy(char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CSWIRETAP_H */
