//! Small dense matrix helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Builds a square matrix from row-major nested rows.
pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::validation("matrix must have at least one row"));
    }
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::validation(format!("matrix must be square {n}x{n}")));
    }
    Ok(Matrix::from_fn(n, n, |i, j| rows[i][j]))
}

pub fn matrix_to_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Row-major copy, convenient for hand-written inner loops.
pub fn row_major(m: &Matrix) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub fn is_symmetric(m: &Matrix, tol: f64) -> bool {
    m.is_square()
        && (0..m.nrows()).all(|i| (0..i).all(|j| (m[(i, j)] - m[(j, i)]).abs() <= tol))
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: &Matrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Checks that `q` is symmetric within `1e-12` with eigenvalues `>= -1e-12`.
pub fn check_psd(q: &Matrix, what: &str) -> Result<()> {
    if !q.is_square() {
        return Err(Error::validation(format!("{what} must be square")));
    }
    if q.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation(format!("{what} has non-finite entries")));
    }
    if !is_symmetric(q, 1e-12) {
        return Err(Error::validation(format!("{what} is not symmetric")));
    }
    let min = symmetric_eigenvalues(q).first().copied().unwrap_or(0.0);
    if min < -1e-12 {
        return Err(Error::validation(format!(
            "{what} is not positive semidefinite (eigenvalue {min:e})"
        )));
    }
    Ok(())
}

/// A square root `L` with `L Lᵀ = q` for symmetric PSD `q`, tolerating singular `q`.
pub fn psd_sqrt(q: &Matrix) -> Matrix {
    let eig = q.clone().symmetric_eigen();
    let mut l = eig.eigenvectors.clone();
    for (j, lambda) in eig.eigenvalues.iter().enumerate() {
        let s = lambda.max(0.0).sqrt();
        for i in 0..l.nrows() {
            l[(i, j)] *= s;
        }
    }
    l
}

/// Smallest real part over the eigenvalues of `b`.
pub fn min_real_eigenvalue(b: &Matrix) -> f64 {
    b.complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min)
}

/// Matrix exponential (Padé approximant with scaling and squaring).
pub fn expm(m: &Matrix) -> Matrix {
    m.clone().exp()
}

/// Numerical rank with absolute tolerance `rel_tol * ‖m‖_max`.
pub fn numeric_rank(m: &Matrix, rel_tol: f64) -> usize {
    let scale = max_abs(m);
    if scale == 0.0 {
        return 0;
    }
    let svd = m.clone().svd(false, false);
    svd.singular_values
        .iter()
        .filter(|s| **s > rel_tol * scale)
        .count()
}

/// `out = m * x` for a row-major `d x d` matrix.
#[inline]
pub fn mat_vec(m: &[f64], x: &[f64], out: &mut [f64]) {
    let d = x.len();
    for (i, o) in out.iter_mut().enumerate() {
        let row = &m[i * d..(i + 1) * d];
        *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
    }
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}
