//! Unrestarted GMRES with a stagnation guard.

use num_traits::{Float, One, ToPrimitive, Zero};

use super::matrix::norm2;
use crate::scalar::{Real, Scalar};

/// Outcome of a successful GMRES run.
#[derive(Debug, Clone)]
pub struct GmresOutput<T: Scalar> {
    pub x: Vec<T>,
    pub iterations: usize,
    /// Estimated relative residual after each iteration (entry 0 is the initial value 1).
    pub residual_history: Vec<T::Real>,
    /// Set when the run ended at the stagnation guard instead of meeting the tolerance.
    pub stagnated: bool,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GmresError {
    #[error("GMRES did not converge in {iterations} iterations (best relative residual {best_residual:e})")]
    NotConverged { iterations: usize, best_residual: f64 },
    #[error("operator returned a vector of length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite values encountered")]
    NonFinite,
}

/// Number of consecutive iterations without sufficient residual decrease that counts as stagnation.
pub const STAGNATION_WINDOW: usize = 5;
/// Required relative decrease of the best residual over the stagnation window.
pub const STAGNATION_FACTOR: f64 = 1.0 - 1e-3;

/// Solves `A x = b` where `apply` computes `A v`, starting from `x = 0`.
///
/// Uses modified Gram–Schmidt with one reorthogonalization pass and Givens
/// rotations for the least-squares problem. The run stops once the estimated
/// relative residual drops to `tol`. If the residual fails to decrease by the
/// factor [`STAGNATION_FACTOR`] for [`STAGNATION_WINDOW`] consecutive
/// iterations, the best iterate so far is returned with `stagnated = true`.
pub fn gmres_solve<T, F>(apply: F, b: &[T], tol: T::Real, max_iter: usize) -> Result<GmresOutput<T>, GmresError>
where
    T: Scalar,
    F: Fn(&[T]) -> Vec<T>,
{
    let n = b.len();
    let beta = norm2(b);
    if beta.is_zero() {
        return Ok(GmresOutput {
            x: vec![T::zero(); n],
            iterations: 0,
            residual_history: vec![T::Real::zero()],
            stagnated: false,
        });
    }
    let max_iter = max_iter.min(n.max(1));
    let mut basis: Vec<Vec<T>> = vec![b.iter().map(|&v| v.scale(beta.recip())).collect()];
    // Column j of the Hessenberg matrix after rotation, stored as h[j][0..=j].
    let mut h: Vec<Vec<T>> = Vec::new();
    let mut cs: Vec<T::Real> = Vec::new();
    let mut sn: Vec<T> = Vec::new();
    let mut g: Vec<T> = vec![T::from_real(beta)];
    let mut history = vec![T::Real::one()];

    let mut best_res = T::Real::one();
    let mut best_iter = 0usize;
    let mut window_start_res = T::Real::one();
    let mut since_progress = 0usize;
    let stag_factor = T::Real::lit(STAGNATION_FACTOR);

    for j in 0..max_iter {
        let mut w = apply(&basis[j]);
        if w.len() != n {
            return Err(GmresError::DimensionMismatch { expected: n, got: w.len() });
        }
        let mut col = vec![T::zero(); j + 2];
        for _pass in 0..2 {
            for (i, v) in basis.iter().enumerate() {
                let c: T = v.iter().zip(&w).map(|(&a, &b)| a.conj() * b).sum();
                col[i] += c;
                for (wk, &vk) in w.iter_mut().zip(v) {
                    *wk -= c * vk;
                }
            }
        }
        let hnext = norm2(&w);
        col[j + 1] = T::from_real(hnext);
        if !col.iter().all(|x| Scalar::is_finite(*x)) {
            return Err(GmresError::NonFinite);
        }

        for i in 0..j {
            let (a, bb) = (col[i], col[i + 1]);
            col[i] = a.scale(cs[i]) + sn[i] * bb;
            col[i + 1] = bb.scale(cs[i]) - sn[i].conj() * a;
        }
        let (c, s, r) = givens(col[j], col[j + 1]);
        col[j] = r;
        col.truncate(j + 1);
        cs.push(c);
        sn.push(s);
        let gj = g[j];
        g[j] = gj.scale(c);
        g.push(-(s.conj() * gj));
        h.push(col);

        let res = g[j + 1].modulus() / beta;
        history.push(res);
        if res < best_res {
            best_res = res;
            best_iter = j + 1;
        }
        let converged = res <= tol;
        let breakdown = hnext <= T::Real::epsilon() * beta * T::Real::lit(1e-3);

        if res <= window_start_res * stag_factor {
            window_start_res = res;
            since_progress = 0;
        } else {
            since_progress += 1;
        }
        let stagnated = since_progress >= STAGNATION_WINDOW;

        if converged || breakdown || stagnated || j + 1 == max_iter {
            let m = if stagnated { best_iter } else { j + 1 };
            if !converged && !breakdown && !stagnated {
                return Err(GmresError::NotConverged {
                    iterations: j + 1,
                    best_residual: best_res.to_f64().unwrap_or(f64::NAN),
                });
            }
            let x = assemble_solution(&h, &g, &basis, m, n);
            return Ok(GmresOutput { x, iterations: j + 1, residual_history: history, stagnated });
        }
        basis.push(w.iter().map(|&v| v.scale(hnext.recip())).collect());
    }
    unreachable!("loop returns on its final iteration")
}

/// Back substitution with the first `m` rotated Hessenberg columns.
fn assemble_solution<T: Scalar>(h: &[Vec<T>], g: &[T], basis: &[Vec<T>], m: usize, n: usize) -> Vec<T> {
    let mut y = vec![T::zero(); m];
    for i in (0..m).rev() {
        let mut s = g[i];
        for k in i + 1..m {
            s -= h[k][i] * y[k];
        }
        y[i] = s / h[i][i];
    }
    let mut x = vec![T::zero(); n];
    for (yk, v) in y.iter().zip(basis) {
        for (xi, &vi) in x.iter_mut().zip(v) {
            *xi += *yk * vi;
        }
    }
    x
}

/// Complex Givens rotation zeroing `b` in `(a, b)`: returns `(c, s, r)` with
/// `c a + s b = r` and `−conj(s) a + c b = 0`.
fn givens<T: Scalar>(a: T, b: T) -> (T::Real, T, T) {
    let bm = b.modulus();
    if bm.is_zero() {
        return (T::Real::one(), T::zero(), a);
    }
    let am = a.modulus();
    if am.is_zero() {
        return (T::Real::zero(), b.conj().scale(bm.recip()), T::from_real(bm));
    }
    let nrm = am.hypot(bm);
    let phase = a.scale(am.recip());
    let c = am / nrm;
    let s = phase * b.conj().scale(nrm.recip());
    (c, s, phase.scale(nrm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{lu_solve, Matrix};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};

    #[test]
    fn identity_converges_in_one_step() {
        let b = vec![Complex64::new(1.0, 2.0), Complex64::new(-3.0, 0.5)];
        let out = gmres_solve(|v: &[Complex64]| v.to_vec(), &b, 1e-15, 10).unwrap();
        assert_eq!(out.iterations, 1);
        for (x, y) in out.x.iter().zip(&b) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn matches_lu_on_random_system() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let n = 64;
        let a = Matrix::from_fn(n, n, |i, j| {
            let d = if i == j { 3.0 } else { 0.0 };
            Complex64::new(d + rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1))
        });
        let b: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0)).collect();
        let out = gmres_solve(|v: &[Complex64]| a.matvec(v), &b, f64::EPSILON, n).unwrap();
        let x = lu_solve(&a, &Matrix::column(&b)).unwrap();
        assert!(crate::linalg::rel_diff_vec(&out.x, x.as_slice()) < 1e-12);
    }

    #[test]
    fn real_scalars_work() {
        let a = Matrix::from_row_major(2, 2, vec![2.0, 1.0, 1.0, 3.0]);
        let out = gmres_solve(|v: &[f64]| a.matvec(v), &[3.0, 4.0], 1e-14, 10).unwrap();
        assert!((out.x[0] - 1.0).abs() < 1e-13 && (out.x[1] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn too_few_iterations_is_an_error() {
        let a = Matrix::from_fn(20, 20, |i, j| if i == j { (i + 1) as f64 } else { 0.0 });
        let b = vec![1.0; 20];
        let err = gmres_solve(|v: &[f64]| a.matvec(v), &b, 1e-15, 3).unwrap_err();
        assert!(matches!(err, GmresError::NotConverged { iterations: 3, .. }));
    }
}
