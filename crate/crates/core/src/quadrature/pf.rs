//! Right-hand-side dependent prolongations whose innermost block is rank one.

use num_complex::Complex64;

use crate::linalg::{IndexSets, Matrix};

/// Failure building a rank-one prolongation block.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PfError {
    #[error("coarse right-hand side vanishes on the innermost panels")]
    ZeroCoarse,
    #[error("vector lengths do not match the index sets (coarse {coarse}, fine {fine})")]
    Shape { coarse: usize, fine: usize },
}

/// `f_fin · f_coaᴴ / (f_coaᴴ f_coa)`, the rank-one map sending `f_coa` to `f_fin`.
pub fn rank_one_pf_block(f_coa: &[Complex64], f_fin: &[Complex64]) -> Result<Matrix<Complex64>, PfError> {
    // Scale by the largest entry so the squared norm stays in range.
    let s = f_coa.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if s == 0.0 || !s.is_finite() {
        return Err(PfError::ZeroCoarse);
    }
    let nrm2: f64 = f_coa.iter().map(|z| (z / s).norm_sqr()).sum();
    Ok(Matrix::from_fn(f_fin.len(), f_coa.len(), |i, j| (f_fin[i] / s) * (f_coa[j] / s).conj() / nrm2))
}

/// `P_bc` with its `(star_l, star_s)` block replaced by the rank-one block built
/// from the right-hand side sampled on the b-grid (`f_b`) and c-grid (`f_c`).
pub fn build_pf_bc(
    p_bc: &Matrix<Complex64>,
    idx: &IndexSets,
    f_b: &[Complex64],
    f_c: &[Complex64],
) -> Result<Matrix<Complex64>, PfError> {
    if f_b.len() != idx.n_b() || f_c.len() != idx.n_c() {
        return Err(PfError::Shape { coarse: f_c.len(), fine: f_b.len() });
    }
    let fc: Vec<Complex64> = idx.star_s.iter().map(|&j| f_c[j]).collect();
    let fb: Vec<Complex64> = idx.star_l.iter().map(|&i| f_b[i]).collect();
    let block = rank_one_pf_block(&fc, &fb)?;
    let mut p = p_bc.clone();
    p.assign(&idx.star_l, &idx.star_s, &block);
    Ok(p)
}
