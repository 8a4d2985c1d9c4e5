//! LU factorization with partial pivoting.

use num_traits::{Float, One, ToPrimitive, Zero};

use super::Matrix;
use crate::scalar::{Real, Scalar};

/// Failure modes of the dense direct solvers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LuError {
    #[error("matrix is singular to working precision at pivot {pivot_index} (pivot magnitude {pivot_magnitude:e})")]
    Singular { pivot_index: usize, pivot_magnitude: f64 },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("right-hand side has {got} rows, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("solve produced non-finite entries")]
    NonFinite,
}

/// A factorization `P A = L U` stored compactly in one matrix.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
}

impl<T: Scalar> Lu<T> {
    /// Factors a square matrix.
    ///
    /// A pivot is treated as zero when its modulus is below `n · ε · max|A|`.
    pub fn new(a: &Matrix<T>) -> Result<Self, LuError> {
        if !a.is_square() {
            return Err(LuError::NotSquare { rows: a.rows(), cols: a.cols() });
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let eps = T::Real::epsilon();
        let threshold = a.max_abs() * eps * T::Real::lit(n.max(1) as f64);
        for k in 0..n {
            let (p, pmag) = (k..n)
                .map(|i| (i, lu[(i, k)].modulus()))
                .fold((k, -T::Real::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pmag > threshold) || pmag.is_zero() {
                return Err(LuError::Singular {
                    pivot_index: k,
                    pivot_magnitude: pmag.to_f64().unwrap_or(f64::NAN),
                });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let pivot = lu[(k, k)];
            let (upper, lower) = lu.as_mut_slice().split_at_mut((k + 1) * n);
            let krow = &upper[k * n..(k + 1) * n];
            for row in lower.chunks_mut(n) {
                let l = row[k] / pivot;
                row[k] = l;
                if l == T::zero() {
                    continue;
                }
                for (x, &u) in row[k + 1..].iter_mut().zip(&krow[k + 1..]) {
                    *x -= l * u;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// Solves `A x = b` for a single vector.
    pub fn solve_vec(&self, b: &[T]) -> Result<Vec<T>, LuError> {
        let n = self.dim();
        if b.len() != n {
            return Err(LuError::DimensionMismatch { expected: n, got: b.len() });
        }
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: T = row[..i].iter().zip(&x[..i]).map(|(&l, &y)| l * y).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: T = row[i + 1..].iter().zip(&x[i + 1..]).map(|(&u, &y)| u * y).sum();
            x[i] = (x[i] - s) / row[i];
        }
        if x.iter().all(|v| Scalar::is_finite(*v)) {
            Ok(x)
        } else {
            Err(LuError::NonFinite)
        }
    }

    /// Solves `A X = B` column by column.
    pub fn solve(&self, b: &Matrix<T>) -> Result<Matrix<T>, LuError> {
        let n = self.dim();
        if b.rows() != n {
            return Err(LuError::DimensionMismatch { expected: n, got: b.rows() });
        }
        let mut x = Matrix::zeros(n, b.cols());
        for j in 0..b.cols() {
            x.set_col(j, &self.solve_vec(&b.col(j))?);
        }
        Ok(x)
    }

    /// Solves `X A = B`, i.e. `Aᵀ Xᵀ = Bᵀ`.
    pub fn solve_left(&self, b: &Matrix<T>) -> Result<Matrix<T>, LuError> {
        let n = self.dim();
        if b.cols() != n {
            return Err(LuError::DimensionMismatch { expected: n, got: b.cols() });
        }
        let mut x = Matrix::zeros(b.rows(), n);
        for i in 0..b.rows() {
            let y = self.solve_transpose_vec(b.row(i))?;
            x.row_mut(i).copy_from_slice(&y);
        }
        Ok(x)
    }

    /// Solves `Aᵀ x = b` (plain transpose, no conjugation).
    pub fn solve_transpose_vec(&self, b: &[T]) -> Result<Vec<T>, LuError> {
        let n = self.dim();
        if b.len() != n {
            return Err(LuError::DimensionMismatch { expected: n, got: b.len() });
        }
        // Aᵀ = Uᵀ Lᵀ P, so solve Uᵀ y = b, Lᵀ z = y, then x = Pᵀ z.
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.lu[(k, i)] * y[k];
            }
            y[i] = s / self.lu[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.lu[(k, i)] * y[k];
            }
            y[i] = s;
        }
        let mut x = vec![T::zero(); n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        if x.iter().all(|v| Scalar::is_finite(*v)) {
            Ok(x)
        } else {
            Err(LuError::NonFinite)
        }
    }

    pub fn inverse(&self) -> Result<Matrix<T>, LuError> {
        self.solve(&Matrix::identity(self.dim()))
    }
}

/// Solves `A X = B` by LU with partial pivoting.
pub fn lu_solve<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>, LuError> {
    Lu::new(a)?.solve(b)
}

/// Dense inverse via LU.
pub fn inverse<T: Scalar>(a: &Matrix<T>) -> Result<Matrix<T>, LuError> {
    Lu::new(a)?.inverse()
}

/// Estimates the 1-norm condition number `‖A‖₁ ‖A⁻¹‖₁` by forming the inverse.
///
/// Only intended for the small blocks that appear in the recursions.
pub fn condition_number_1<T: Scalar>(a: &Matrix<T>) -> Result<T::Real, LuError> {
    let inv = inverse(a)?;
    Ok(norm_1(a) * norm_1(&inv))
}

fn norm_1<T: Scalar>(a: &Matrix<T>) -> T::Real {
    (0..a.cols())
        .map(|j| (0..a.rows()).map(|i| a[(i, j)].modulus()).sum::<T::Real>())
        .fold(T::Real::zero(), |m, x| m.max(x))
}
