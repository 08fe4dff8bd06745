use std::f64::consts::LN_2;

use super::{check_enumerable, enumerate_supports, Matrix, Support};
use crate::error::{domain, Error, Result};

/// Factor diagonals below this fraction of the largest one mark the Gram
/// matrix as singular.
pub const SINGULAR_RELATIVE_THRESHOLD: f64 = 1e-10;

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four independent accumulators so the loop vectorises
    let mut acc = [0.0f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `ln det(B B^T)` where `B` is `m x k` and `buf` holds its rows
/// contiguously. Householder QR of `B^T`; `buf` is overwritten.
pub(crate) fn ln_gram_det(buf: &mut [f64], m: usize, k: usize) -> Result<f64> {
    debug_assert_eq!(buf.len(), m * k);
    if m > k {
        return domain(format!("Gram matrix of a {m}x{k} block is singular (fewer columns than rows)"));
    }
    let mut diag = Vec::with_capacity(m);
    for j in 0..m {
        let (head, tail) = buf.split_at_mut((j + 1) * k);
        let v = &mut head[j * k + j..];
        let norm = dot(v, v).sqrt();
        if norm == 0.0 {
            diag.push(0.0);
            continue;
        }
        let r = if v[0] >= 0.0 { -norm } else { norm };
        v[0] -= r;
        // H = I - 2 u u^T / (u^T u), u = v - r e1, u^T u = 2 u0 (-r)
        let scale = 1.0 / (v[0] * (-r));
        for row in tail.chunks_exact_mut(k) {
            let w = &mut row[j..];
            let s = dot(v, w) * scale;
            axpy(-s, v, w);
        }
        diag.push(r.abs());
    }
    let largest = diag.iter().cloned().fold(0.0, f64::max);
    let mut ln_det = 0.0;
    for (pivot, &d) in diag.iter().enumerate() {
        let ratio = if largest > 0.0 { d / largest } else { 0.0 };
        if ratio < SINGULAR_RELATIVE_THRESHOLD {
            return Err(Error::SingularGram { pivot, ratio });
        }
        ln_det += 2.0 * d.ln();
    }
    Ok(ln_det)
}

fn gather_rows(a: &Matrix, x: &Support) -> Vec<f64> {
    let k = x.weight();
    let mut buf = Vec::with_capacity(a.rows() * k);
    for i in 0..a.rows() {
        let row = a.row(i);
        buf.extend(x.indices().iter().map(|&j| row[j]));
    }
    buf
}

/// `log2 det((1/normalizer) A(x) A(x)^T)`.
///
/// Householder QR of `A(x)^T`; the log-determinant is twice the sum of the
/// logs of `|R_jj|`. The determinant itself is never formed. A diagonal
/// below [`SINGULAR_RELATIVE_THRESHOLD`] times the largest is a
/// `SingularGram` error.
pub fn gram_logdet(a: &Matrix, x: &Support, normalizer: f64) -> Result<f64> {
    a.check_support(x)?;
    if !(normalizer > 0.0) || !normalizer.is_finite() {
        return domain(format!("normalizer must be a positive finite number, got {normalizer}"));
    }
    let m = a.rows();
    if x.weight() < m {
        return domain(format!(
            "support weight {} is below the row count {m}; the Gram matrix is singular",
            x.weight()
        ));
    }
    let mut buf = gather_rows(a, x);
    let ln_det = ln_gram_det(&mut buf, m, x.weight())?;
    Ok((ln_det - m as f64 * normalizer.ln()) / LN_2)
}

/// Largest `(1/m) ||A(i)||^2` over columns; 0 for an empty matrix.
pub fn max_column_norm_sq(a: &Matrix) -> f64 {
    let (m, p) = (a.rows(), a.cols());
    if m == 0 || p == 0 {
        return 0.0;
    }
    let mut norms = vec![0.0; p];
    for i in 0..m {
        for (n, v) in norms.iter_mut().zip(a.row(i)) {
            *n += v * v;
        }
    }
    norms.into_iter().fold(0.0, f64::max) / m as f64
}

/// Whether every `m`-column submatrix of the `m x p` matrix `a` is
/// nonsingular (Kruskal rank `m`).
///
/// This implies full linear independence in the subspace sense: two
/// distinct `(m-1)`-supports spanning the same subspace would put at least
/// `m` columns into an `(m-1)`-dimensional space.
pub fn is_fli_sufficient(a: &Matrix) -> Result<bool> {
    let (m, p) = (a.rows(), a.cols());
    if m > p {
        return domain(format!("FLI check needs rows <= cols, got {m}x{p}"));
    }
    check_enumerable(p, m)?;
    for x in enumerate_supports(p, m)? {
        let mut buf = gather_rows(a, &x);
        match ln_gram_det(&mut buf, m, m) {
            Ok(_) => {}
            Err(Error::SingularGram { .. }) => return Ok(false),
            Err(e) => return Err(e),
        }
    }
    Ok(true)
}

/// Orthonormal basis of the span of selected columns, for projection
/// residuals.
///
/// Built by classical Gram-Schmidt with one re-orthogonalisation pass.
/// A column whose remainder is below [`SINGULAR_RELATIVE_THRESHOLD`] of its
/// own norm adds no direction, so rank-deficient selections (e.g. zero
/// columns) span the right subspace.
#[derive(Debug, Clone)]
pub struct ColumnSpan {
    dim: usize,
    basis: Vec<f64>,
}

impl ColumnSpan {
    pub fn new(a: &Matrix, x: &Support) -> Result<Self> {
        a.check_support(x)?;
        let dim = a.rows();
        let mut span = ColumnSpan { dim, basis: Vec::with_capacity(dim * x.weight().min(dim)) };
        for &j in x.indices() {
            let col = a.column(j);
            let norm = dot(&col, &col).sqrt();
            if norm == 0.0 {
                continue;
            }
            let mut v = col;
            span.project_out(&mut v);
            span.project_out(&mut v);
            let rest = dot(&v, &v).sqrt();
            if rest > SINGULAR_RELATIVE_THRESHOLD * norm {
                v.iter_mut().for_each(|c| *c /= rest);
                span.basis.extend_from_slice(&v);
            }
        }
        Ok(span)
    }

    pub fn rank(&self) -> usize {
        self.basis.len().checked_div(self.dim).unwrap_or(0)
    }

    fn project_out(&self, v: &mut [f64]) {
        if self.dim == 0 {
            return;
        }
        for q in self.basis.chunks_exact(self.dim) {
            let c = dot(q, v);
            axpy(-c, q, v);
        }
    }

    /// `||y - P y||` for the orthogonal projector `P` onto the span.
    pub fn residual_norm(&self, y: &[f64]) -> Result<f64> {
        if y.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "observation of length {} against {} rows",
                y.len(),
                self.dim
            )));
        }
        let mut r = y.to_vec();
        self.project_out(&mut r);
        self.project_out(&mut r);
        Ok(dot(&r, &r).sqrt())
    }
}
