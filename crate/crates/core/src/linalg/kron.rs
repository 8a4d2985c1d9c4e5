//! Vectorized solves of the linear matrix equation `X = C1 X C2 + D`.

use super::{Lu, LuError, Matrix};
use crate::scalar::Scalar;

/// Solves `X = C1·X·C2 + D` for `X` by vectorization.
///
/// With column-major `vec`, the equation reads `(I − C2ᵀ ⊗ C1) vec X = vec D`,
/// a dense system of size `(nm)×(nm)` for `X` of shape `n×m`. Intended for
/// blocks of size 64 or smaller.
pub fn kron_linear_solve<T: Scalar>(c1: &Matrix<T>, c2: &Matrix<T>, d: &Matrix<T>) -> Result<Matrix<T>, LuError> {
    let (n, m) = (d.rows(), d.cols());
    if c1.rows() != n || c1.cols() != n {
        return Err(LuError::DimensionMismatch { expected: n, got: c1.rows() });
    }
    if c2.rows() != m || c2.cols() != m {
        return Err(LuError::DimensionMismatch { expected: m, got: c2.rows() });
    }
    let size = n * m;
    // Unknown index of X(i, j) is j*n + i.
    let mut big = Matrix::zeros(size, size);
    for j in 0..m {
        for l in 0..m {
            let c2lj = c2[(l, j)];
            if c2lj == T::zero() {
                continue;
            }
            for i in 0..n {
                let row = big.row_mut(j * n + i);
                for k in 0..n {
                    row[l * n + k] -= c2lj * c1[(i, k)];
                }
            }
        }
    }
    for p in 0..size {
        big[(p, p)] += T::one();
    }
    let rhs: Vec<T> = (0..m).flat_map(|j| (0..n).map(move |i| (i, j))).map(|(i, j)| d[(i, j)]).collect();
    let x = Lu::new(&big)?.solve_vec(&rhs)?;
    Ok(Matrix::from_fn(n, m, |i, j| x[j * n + i]))
}

/// Relative residual `‖X − C1 X C2 − D‖_F / ‖D‖_F`.
pub fn kron_residual<T: Scalar>(c1: &Matrix<T>, c2: &Matrix<T>, d: &Matrix<T>, x: &Matrix<T>) -> T::Real {
    let r = &(x - &c1.matmul(x).matmul(c2)) - d;
    r.norm_fro() / d.norm_fro()
}
