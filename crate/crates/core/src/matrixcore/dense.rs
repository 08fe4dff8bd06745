use rand::Rng;
use rand_distr::StandardNormal;

use super::{SeededStream, Support};
use crate::error::{domain, Error, Result};

/// Upper bound on `rows * cols` for sampled matrices.
pub const MAX_MATRIX_ENTRIES: u64 = 1_000_000_000;

/// Dense real matrix in row-major order. Entries are always finite.
///
/// Zero rows are allowed (an eavesdropper with `m_e = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return domain(format!("matrix entry {pos} is not finite"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_row_major(rows.len(), cols, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::identity_rows(n, n)
    }

    /// The first `m` rows of the `p x p` identity.
    pub fn identity_rows(m: usize, p: usize) -> Self {
        let mut a = Self::zeros(m, p);
        for i in 0..m.min(p) {
            a.data[i * p + i] = 1.0;
        }
        a
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn scaled(&self, c: f64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * c).collect() }
    }

    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (l, &a) in self.row(i).iter().enumerate() {
                for (d, &b) in dst.iter_mut().zip(rhs.row(l)) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect())
    }

    /// `A^T v` for `v` of length `rows`.
    pub fn tr_mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch(format!("vector of length {} against {} rows", v.len(), self.rows)));
        }
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * vi;
            }
        }
        Ok(out)
    }

    pub(crate) fn check_support(&self, x: &Support) -> Result<()> {
        if x.ambient() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "support over {} columns used with a matrix of {} columns",
                x.ambient(),
                self.cols
            )));
        }
        Ok(())
    }
}

/// `m x p` matrix of i.i.d. standard normal entries drawn from `rng`.
///
/// Normals come from the ziggurat sampler in `rand_distr`, filled row by
/// row, so the result is a pure function of the stream.
pub fn sample_gaussian_matrix(m: usize, p: usize, rng: &SeededStream) -> Result<Matrix> {
    if m == 0 || p == 0 {
        return domain(format!("sample_gaussian_matrix needs m, p >= 1, got {m}x{p}"));
    }
    if (m as u64).saturating_mul(p as u64) > MAX_MATRIX_ENTRIES {
        return Err(Error::AllocationGuard { rows: m, cols: p, limit: MAX_MATRIX_ENTRIES });
    }
    Ok(gaussian_matrix_with(m, p, &mut rng.rng()))
}

pub(crate) fn gaussian_matrix_with<R: Rng + ?Sized>(m: usize, p: usize, rng: &mut R) -> Matrix {
    let data = (0..m * p).map(|_| rng.sample(StandardNormal)).collect();
    Matrix { rows: m, cols: p, data }
}

/// The `m x k` matrix of the columns of `a` selected by `x`, in index order.
pub fn submatrix_columns(a: &Matrix, x: &Support) -> Result<Matrix> {
    a.check_support(x)?;
    let k = x.weight();
    let mut data = Vec::with_capacity(a.rows * k);
    for i in 0..a.rows {
        let row = a.row(i);
        data.extend(x.indices().iter().map(|&j| row[j]));
    }
    Ok(Matrix { rows: a.rows, cols: k, data })
}
