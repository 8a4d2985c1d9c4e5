//! Both sides of the rectangular inversion identities
//!
//! ```text
//! U (A + V B U)⁻¹ V = ((U A⁻¹ V)⁻¹ + B)⁻¹
//! U (A + V B U)⁻¹   = ((U A⁻¹ V)⁻¹ + B)⁻¹ (U A⁻¹ V)⁻¹ U A⁻¹
//! ```
//!
//! for `A` (m×m) invertible, `B` (n×n), `U` (n×m), `V` (m×n), `m ≥ n`. These
//! identities justify collapsing the fine-grid weighted compression into a
//! level recursion; evaluating each side independently makes them testable.

use super::{inverse, Lu, LuError, Matrix};
use crate::scalar::Scalar;

fn check_shapes<T: Scalar>(u: &Matrix<T>, a: &Matrix<T>, v: &Matrix<T>, b: &Matrix<T>) -> Result<(), LuError> {
    let (m, n) = (a.rows(), b.rows());
    let ok = a.is_square()
        && b.is_square()
        && (u.rows(), u.cols()) == (n, m)
        && (v.rows(), v.cols()) == (m, n);
    if ok {
        Ok(())
    } else {
        Err(LuError::DimensionMismatch { expected: m, got: u.cols() })
    }
}

/// `U (A + V B U)⁻¹ V`.
pub fn lemma_lhs<T: Scalar>(u: &Matrix<T>, a: &Matrix<T>, v: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>, LuError> {
    check_shapes(u, a, v, b)?;
    let inner = a + &v.matmul(b).matmul(u);
    Ok(u.matmul(&Lu::new(&inner)?.solve(v)?))
}

/// `((U A⁻¹ V)⁻¹ + B)⁻¹`.
pub fn lemma_rhs<T: Scalar>(u: &Matrix<T>, a: &Matrix<T>, v: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>, LuError> {
    check_shapes(u, a, v, b)?;
    let uav = u.matmul(&Lu::new(a)?.solve(v)?);
    inverse(&(&inverse(&uav)? + b))
}

/// `U (A + V B U)⁻¹`.
pub fn lemma2_lhs<T: Scalar>(u: &Matrix<T>, a: &Matrix<T>, v: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>, LuError> {
    check_shapes(u, a, v, b)?;
    let inner = a + &v.matmul(b).matmul(u);
    Lu::new(&inner)?.solve_left(u)
}

/// `((U A⁻¹ V)⁻¹ + B)⁻¹ (U A⁻¹ V)⁻¹ U A⁻¹`.
pub fn lemma2_rhs<T: Scalar>(u: &Matrix<T>, a: &Matrix<T>, v: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>, LuError> {
    check_shapes(u, a, v, b)?;
    let a_inv = inverse(a)?;
    let uav_inv = inverse(&u.matmul(&a_inv).matmul(v))?;
    let outer = inverse(&(&uav_inv + b))?;
    Ok(outer.matmul(&uav_inv).matmul(u).matmul(&a_inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn b_zero_reduces_to_projection() {
        let a = Matrix::from_row_major(3, 3, vec![4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0]);
        let u = Matrix::from_row_major(2, 3, vec![1.0, 0.0, 1.0, 0.0, 1.0, -1.0]);
        let v = u.transpose();
        let b = Matrix::zeros(2, 2);
        let expected = u.matmul(&inverse(&a).unwrap()).matmul(&v);
        assert!(lemma_lhs(&u, &a, &v, &b).unwrap().rel_diff(&expected) < 1e-14);
        assert!(lemma_rhs(&u, &a, &v, &b).unwrap().rel_diff(&expected) < 1e-14);
    }

    #[test]
    fn square_identity_case() {
        let a = Matrix::from_row_major(2, 2, vec![Complex64::new(2.0, 1.0), 0.5.into(), 0.1.into(), 3.0.into()]);
        let b = Matrix::from_row_major(2, 2, vec![1.0.into(), 0.2.into(), Complex64::new(0.0, 0.3), 1.0.into()]);
        let i = Matrix::identity(2);
        let expected = inverse(&(&a + &b)).unwrap();
        assert!(lemma_lhs(&i, &a, &i, &b).unwrap().rel_diff(&expected) < 1e-14);
        assert!(lemma_rhs(&i, &a, &i, &b).unwrap().rel_diff(&expected) < 1e-14);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let a = Matrix::<f64>::identity(3);
        let b = Matrix::identity(2);
        let u = Matrix::zeros(3, 2);
        assert!(lemma_lhs(&u, &a, &u, &b).is_err());
    }
}
