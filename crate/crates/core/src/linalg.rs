//! Small dense linear-algebra helpers on top of `nalgebra`.
//!
//! Everything here works on `DMatrix<f64>`; the matrices in this crate are at
//! most a few dozen rows, so no attempt is made to avoid allocation.
//! Singular value decompositions go through `faer`: nalgebra's SVD with
//! singular vectors returns wrong values on some block-antisymmetric inputs
//! (see `svd_regression_block_antisymmetric`).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Relative truncation threshold for the Taylor series inside [`expm`].
pub const EXPM_SERIES_TOL: f64 = 1e-14;

/// Matrix exponential by scaling and squaring.
///
/// The argument is scaled by `2^-s` until its 1-norm is at most 1/2, the
/// Taylor series is summed until the next term is below
/// [`EXPM_SERIES_TOL`] relative to the partial sum, and the result is squared
/// `s` times.
pub fn expm(a: &Matrix) -> Matrix {
    assert!(a.is_square(), "expm of a non-square matrix");
    let n = a.nrows();
    let norm = one_norm(a);
    if norm == 0.0 {
        return Matrix::identity(n, n);
    }
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = a * 2f64.powi(-squarings);

    let mut sum = Matrix::identity(n, n);
    let mut term = Matrix::identity(n, n);
    for k in 1..64 {
        term = &term * &scaled / k as f64;
        sum += &term;
        if one_norm(&term) <= EXPM_SERIES_TOL * one_norm(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

pub fn one_norm(a: &Matrix) -> f64 {
    a.column_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn max_abs(a: &Matrix) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn max_abs_vec(v: &Vector) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Condition number in the 2-norm, from singular values. Empty matrices have
/// condition 1; singular ones infinity.
pub fn cond(a: &Matrix) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 1.0;
    }
    let sv = singular_values(a);
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 || !min.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

fn to_faer(a: &Matrix) -> faer::Mat<f64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn from_faer(a: faer::MatRef<'_, f64>) -> Matrix {
    Matrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// `a = U diag(s) Vᵀ` with square `U`, `V`.
struct Svd {
    u: Matrix,
    s: Vec<f64>,
    v: Matrix,
}

impl Svd {
    fn full(a: &Matrix) -> Self {
        let svd = to_faer(a).svd().expect("SVD of a finite matrix converges");
        let d = svd.S().column_vector();
        Self {
            u: from_faer(svd.U()),
            s: (0..d.nrows()).map(|i| d[i]).collect(),
            v: from_faer(svd.V()),
        }
    }

    /// `Σ_{s_i > cutoff} v_i (u_iᵀ b) / s_i`
    fn pseudo_solve(&self, b: &Matrix, cutoff: f64) -> Matrix {
        let mut x = Matrix::zeros(self.v.nrows(), b.ncols());
        for (i, s) in self.s.iter().enumerate() {
            if *s > cutoff {
                let ub = self.u.column(i).transpose() * b;
                x += self.v.column(i) * (ub / *s);
            }
        }
        x
    }
}

/// Singular values in decreasing order.
pub fn singular_values(a: &Matrix) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    to_faer(a).singular_values().expect("SVD of a finite matrix converges")
}

/// Numerical rank: singular values above `tol * largest` are counted.
pub fn rank(a: &Matrix, tol: f64) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let sv = singular_values(a);
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > tol * max).count()
}

/// Orthonormal basis (as columns) of the null space of `a`.
pub fn null_space(a: &Matrix, tol: f64) -> Matrix {
    let n = a.ncols();
    if a.nrows() == 0 {
        return Matrix::identity(n, n);
    }
    let svd = Svd::full(a);
    let max = svd.s.iter().cloned().fold(0.0, f64::max);
    // Columns of V beyond the number of singular values span part of the
    // kernel as well.
    let cols: Vec<Vector> = (0..n)
        .filter(|&i| max == 0.0 || svd.s.get(i).is_none_or(|s| *s <= tol * max))
        .map(|i| svd.v.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        Matrix::zeros(n, 0)
    } else {
        Matrix::from_columns(&cols)
    }
}

/// Solve `a x = b` through the SVD, refusing when the condition number
/// exceeds `cond_threshold`. Returns the solution and the condition number.
pub fn solve(a: &Matrix, b: &Matrix, cond_threshold: f64) -> Result<(Matrix, f64)> {
    if a.nrows() != a.ncols() || a.nrows() != b.nrows() {
        return Err(Error::InputShape(format!(
            "solve: {}x{} system with {}x{} right-hand side",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    if a.nrows() == 0 {
        return Ok((Matrix::zeros(0, b.ncols()), 1.0));
    }
    let svd = Svd::full(a);
    let max = svd.s.iter().cloned().fold(0.0, f64::max);
    let min = svd.s.iter().cloned().fold(f64::INFINITY, f64::min);
    let c = if min > 0.0 { max / min } else { f64::INFINITY };
    if c.is_nan() || c > cond_threshold {
        return Err(Error::CDegenerate {
            cond: c,
            odd_dimension: false,
        });
    }
    Ok((svd.pseudo_solve(b, 0.0), c))
}

/// Least-squares coordinates of the columns of `target` in the column basis
/// `basis`, with the max-norm residual of the reconstruction.
pub fn coordinates(basis: &Matrix, target: &Matrix) -> (Matrix, f64) {
    if basis.ncols() == 0 {
        return (Matrix::zeros(0, target.ncols()), max_abs(target));
    }
    let svd = Svd::full(basis);
    let max = svd.s.iter().cloned().fold(0.0, f64::max);
    let x = svd.pseudo_solve(target, 1e-13 * max);
    let resid = max_abs(&(basis * &x - target));
    (x, resid)
}
