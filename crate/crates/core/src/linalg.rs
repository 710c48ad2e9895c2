//! Small dense linear algebra: LU solves, Householder least squares, and a
//! Jacobi symmetric eigensolver. Everything here targets systems of at most
//! a few hundred unknowns, which is all the solvers in this crate need.

use crate::error::{Error, Result};
use crate::num::{lit, Real};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Real> Mat<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn from_columns(columns: &[Vec<F>]) -> Result<Self> {
        let cols = columns.len();
        if cols == 0 {
            return Err(Error::Invalid("matrix needs at least one column".into()));
        }
        let rows = columns[0].len();
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::Invalid("ragged columns".into()));
        }
        let mut m = Mat::zeros(rows, cols);
        for (j, col) in columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `self * x` for a vector `x`.
    pub fn mul_vec(&self, x: &[F]) -> Vec<F> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = F::zero();
                for j in 0..self.cols {
                    acc += self[(i, j)] * x[j];
                }
                acc
            })
            .collect()
    }

    /// `self^T * x`.
    pub fn mul_transpose_vec(&self, x: &[F]) -> Vec<F> {
        assert_eq!(x.len(), self.rows);
        let mut out = vec![F::zero(); self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[j] += self[(i, j)] * x[i];
            }
        }
        out
    }

    /// Gram matrix `self^T * self` (symmetric `cols x cols`).
    pub fn gram(&self) -> Mat<F> {
        let mut g = Mat::zeros(self.cols, self.cols);
        for j in 0..self.cols {
            for k in j..self.cols {
                let mut acc = F::zero();
                for i in 0..self.rows {
                    acc += self[(i, j)] * self[(i, k)];
                }
                g[(j, k)] = acc;
                g[(k, j)] = acc;
            }
        }
        g
    }
}

impl<F> std::ops::Index<(usize, usize)> for Mat<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F> std::ops::IndexMut<(usize, usize)> for Mat<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

/// Solves the square system `A x = b` in place by LU with partial pivoting.
pub fn lu_solve<F: Real>(a: &mut Mat<F>, b: &mut [F]) -> Result<()> {
    let n = a.rows();
    assert_eq!(a.cols(), n);
    assert_eq!(b.len(), n);
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[(col, col)].abs();
        for row in (col + 1)..n {
            let v = a[(row, col)].abs();
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if !(best > F::zero()) || !best.is_finite() {
            return Err(Error::Invalid(format!(
                "singular matrix in LU solve at column {col}"
            )));
        }
        if pivot != col {
            for j in 0..n {
                let tmp = a[(col, j)];
                a[(col, j)] = a[(pivot, j)];
                a[(pivot, j)] = tmp;
            }
            b.swap(col, pivot);
        }
        let diag = a[(col, col)];
        for row in (col + 1)..n {
            let factor = a[(row, col)] / diag;
            if factor == F::zero() {
                continue;
            }
            a[(row, col)] = F::zero();
            for j in (col + 1)..n {
                let v = a[(col, j)];
                a[(row, j)] = a[(row, j)] - factor * v;
            }
            b[row] = b[row] - factor * b[col];
        }
    }
    for row in (0..n).rev() {
        let mut acc = b[row];
        for j in (row + 1)..n {
            acc -= a[(row, j)] * b[j];
        }
        b[row] = acc / a[(row, row)];
    }
    Ok(())
}

/// Householder QR least squares for a tall system `X b ~ y`.
///
/// Returns the coefficient vector, the upper-triangular factor `R`
/// (`cols x cols`), and the numerical rank estimated from the diagonal of
/// `R`. When `X` is rank deficient the triangular solve is not attempted;
/// callers fall back to the pseudo-inverse path.
pub struct QrLeastSquares<F> {
    pub coef: Option<Vec<F>>,
    pub r: Mat<F>,
    pub rank: usize,
}

pub fn qr_least_squares<F: Real>(x: &Mat<F>, y: &[F]) -> Result<QrLeastSquares<F>> {
    let (n, k) = (x.rows(), x.cols());
    if n <= k {
        return Err(Error::Invalid(format!(
            "least squares needs more rows than columns (got {n} x {k})"
        )));
    }
    assert_eq!(y.len(), n);
    let mut a = x.clone();
    let mut rhs = y.to_vec();

    for col in 0..k {
        // Householder reflector for column `col`
        let mut norm = F::zero();
        for i in col..n {
            norm += a[(i, col)] * a[(i, col)];
        }
        let norm = norm.sqrt();
        if norm == F::zero() {
            continue;
        }
        let alpha = if a[(col, col)] > F::zero() { -norm } else { norm };
        let mut v = vec![F::zero(); n - col];
        v[0] = a[(col, col)] - alpha;
        for i in (col + 1)..n {
            v[i - col] = a[(i, col)];
        }
        let vtv = v.iter().fold(F::zero(), |acc, &w| acc + w * w);
        if vtv == F::zero() {
            continue;
        }
        let two = lit::<F>(2.0);
        for j in col..k {
            let mut dot = F::zero();
            for i in col..n {
                dot += v[i - col] * a[(i, j)];
            }
            let scale = two * dot / vtv;
            for i in col..n {
                let w = v[i - col];
                a[(i, j)] = a[(i, j)] - scale * w;
            }
        }
        let mut dot = F::zero();
        for i in col..n {
            dot += v[i - col] * rhs[i];
        }
        let scale = two * dot / vtv;
        for i in col..n {
            let w = v[i - col];
            rhs[i] = rhs[i] - scale * w;
        }
    }

    let mut r = Mat::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            r[(i, j)] = a[(i, j)];
        }
    }

    let mut max_diag = F::zero();
    for i in 0..k {
        max_diag = max_diag.max(r[(i, i)].abs());
    }
    let tol = max_diag * F::epsilon() * F::from_usize(n.max(k)).unwrap();
    let rank = (0..k).filter(|&i| r[(i, i)].abs() > tol).count();

    let coef = if rank == k {
        let mut b = vec![F::zero(); k];
        for row in (0..k).rev() {
            let mut acc = rhs[row];
            for j in (row + 1)..k {
                acc -= r[(row, j)] * b[j];
            }
            b[row] = acc / r[(row, row)];
        }
        Some(b)
    } else {
        None
    };

    Ok(QrLeastSquares { coef, r, rank })
}

/// Inverts an upper-triangular matrix (used for coefficient covariances).
pub fn invert_upper_triangular<F: Real>(r: &Mat<F>) -> Result<Mat<F>> {
    let k = r.rows();
    assert_eq!(r.cols(), k);
    let mut inv = Mat::zeros(k, k);
    for col in 0..k {
        let mut e = vec![F::zero(); k];
        e[col] = F::one();
        for row in (0..k).rev() {
            let mut acc = e[row];
            for j in (row + 1)..k {
                acc -= r[(row, j)] * e[j];
            }
            if r[(row, row)] == F::zero() {
                return Err(Error::Invalid("singular triangular matrix".into()));
            }
            e[row] = acc / r[(row, row)];
        }
        for row in 0..k {
            inv[(row, col)] = e[row];
        }
    }
    Ok(inv)
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
/// eigenvalues (descending) and the matching eigenvectors as columns.
pub fn symmetric_eigen<F: Real>(m: &Mat<F>) -> (Vec<F>, Mat<F>) {
    let n = m.rows();
    assert_eq!(m.cols(), n);
    let mut a = m.clone();
    let mut v = Mat::zeros(n, n);
    for i in 0..n {
        v[(i, i)] = F::one();
    }
    let tol = {
        let mut norm = F::zero();
        for i in 0..n {
            for j in 0..n {
                norm += a[(i, j)] * a[(i, j)];
            }
        }
        norm.sqrt() * lit::<F>(1e-15)
    };
    for _sweep in 0..100 {
        let mut off = F::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[(i, j)].abs();
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= tol * lit(1e-2) {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (lit::<F>(2.0) * apq);
                let t = {
                    let sign = if theta >= F::zero() { F::one() } else { -F::one() };
                    sign / (theta.abs() + (theta * theta + F::one()).sqrt())
                };
                let c = F::one() / (t * t + F::one()).sqrt();
                let s = t * c;
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = c * aip - s * aiq;
                    a[(i, q)] = s * aip + c * aiq;
                }
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = c * apj - s * aqj;
                    a[(q, j)] = s * apj + c * aqj;
                }
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = c * vip - s * viq;
                    v[(i, q)] = s * vip + c * viq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<F> = (0..n).map(|i| a[(i, i)]).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());
    let eigvals: Vec<F> = order.iter().map(|&i| diag[i]).collect();
    let mut vecs = Mat::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for i in 0..n {
            vecs[(i, new_col)] = v[(i, old_col)];
        }
    }
    (eigvals, vecs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lu_solves_small_system() {
        let mut a = Mat::from_columns(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let mut b = vec![5.0, 10.0];
        lu_solve(&mut a, &mut b).unwrap();
        // 2x + y = 5, x + 3y = 10 -> x = 1, y = 3
        assert_relative_eq!(b[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(b[1], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn lu_detects_singular() {
        let mut a = Mat::from_columns(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        let mut b = vec![1.0, 2.0];
        assert!(lu_solve(&mut a, &mut b).is_err());
    }

    #[test]
    fn qr_recovers_exact_line() {
        let x = Mat::from_columns(&[vec![1.0; 4], vec![0.0, 1.0, 2.0, 3.0]]).unwrap();
        let y = vec![2.0, 5.0, 8.0, 11.0]; // y = 2 + 3 t
        let fit = qr_least_squares(&x, &y).unwrap();
        let coef = fit.coef.unwrap();
        assert_eq!(fit.rank, 2);
        assert_relative_eq!(coef[0], 2.0, epsilon = 1e-12);
        assert_relative_eq!(coef[1], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn qr_flags_duplicate_column() {
        let c = vec![1.0, 2.0, 3.0, 4.0];
        let x = Mat::from_columns(&[c.clone(), c]).unwrap();
        let fit = qr_least_squares(&x, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(fit.rank, 1);
        assert!(fit.coef.is_none());
    }

    #[test]
    fn jacobi_eigen_on_known_matrix() {
        // [[2, 1], [1, 2]] has eigenvalues 3 and 1
        let mut m = Mat::<f64>::zeros(2, 2);
        m[(0, 0)] = 2.0;
        m[(0, 1)] = 1.0;
        m[(1, 0)] = 1.0;
        m[(1, 1)] = 2.0;
        let (vals, vecs) = symmetric_eigen(&m);
        assert_relative_eq!(vals[0], 3.0, epsilon = 1e-12);
        assert_relative_eq!(vals[1], 1.0, epsilon = 1e-12);
        // eigenvector for 3 is (1,1)/sqrt(2) up to sign
        assert_relative_eq!(vecs[(0, 0)].abs(), vecs[(1, 0)].abs(), epsilon = 1e-10);
    }

    #[test]
    fn triangular_inverse() {
        let mut r = Mat::zeros(2, 2);
        r[(0, 0)] = 2.0;
        r[(0, 1)] = 1.0;
        r[(1, 1)] = 4.0;
        let inv = invert_upper_triangular(&r).unwrap();
        // R * R^-1 = I
        assert_relative_eq!(inv[(0, 0)], 0.5, epsilon = 1e-14);
        assert_relative_eq!(inv[(1, 1)], 0.25, epsilon = 1e-14);
        assert_relative_eq!(inv[(0, 1)], -0.125, epsilon = 1e-14);
    }
}
