//! Forward compression recursions around one singular point.
//!
//! Level `i` of the hierarchy works on the type-b grid at scale
//! `h_i = h_coarse / 2^(n_sub − i)`. Each step maps the compressed block of the
//! previous level, `R_{i−1}`, to `R_i = P_Wbcᵀ G_i⁻¹ P_bc` with
//! `G_i = F{R_{i−1}⁻¹} + I° + K_i°`. The production path never forms
//! `R_{i−1}⁻¹`: writing the right-hand side's star part as `R_{i−1}⁻¹ a`, the
//! solve only needs the Schur complement `D − V R_{i−1} U` on the outer panels.

use num_complex::Complex64;

use crate::geometry::{Contour, LocalGrid, Node};
use crate::linalg::{condition_number_1, inverse, kron_linear_solve, IndexSets, Lu, LuError, Matrix};
use crate::models::{system_matrix, Kernel, ModelError, Rhs};
use crate::quadrature::{build_pf_bc, gl16, PfError, Prolongation};
use crate::{CMatrix, C64};

/// Failure in a compression recursion.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RcipError {
    #[error("singular level operator at level {level}: {source}")]
    SingularLevel { level: usize, source: LuError },
    #[error(transparent)]
    Linear(#[from] LuError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Prolongation(#[from] PfError),
    #[error("the number of recursion levels must be at least 1")]
    NoLevels,
    #[error("fixed-point iteration stopped after {iterations} iterations with relative change {change:e}")]
    NoConvergence { iterations: usize, change: f64 },
    #[error("kernel is not scale invariant on wedges")]
    NotScaleInvariant,
    #[error("right-hand side has no homogeneous leading term")]
    NoLeadingTerm,
    #[error("compressed block at level {level} has condition number {cond:e}, too large to invert directly")]
    IllConditioned { level: usize, cond: f64 },
    #[error("{n_sub} levels take the finest scale below {MIN_SCALE:e}")]
    TooDeep { n_sub: usize },
}

/// Condition number above which the direct route refuses to invert a compressed block.
pub const MAX_DIRECT_CONDITION: f64 = 1e12;

/// Smallest admissible finest-level scale; deeper levels lose the floating-point range.
pub const MIN_SCALE: f64 = 1e-250;

/// Stopping threshold on the relative change between fixed-point iterates.
pub const FIXED_POINT_TOL: f64 = 1e-15;

/// Iteration cap of the fixed-point iteration for `R*`.
pub const FIXED_POINT_MAX_ITER: usize = 2000;

/// What the recursions need to know about the problem near one singular point.
pub trait LocalProblem: Sync {
    /// True for an interior point, false for an open-arc endpoint.
    fn two_sided(&self) -> bool;

    /// Parameter length of the coarse panels next to the singular point.
    fn h_coarse(&self) -> f64;

    /// Nodes of the type-b grid at scale `h`, ordered by increasing local parameter.
    fn nodes_b(&self, h: f64) -> Vec<Node>;

    /// `I + K` on the type-b grid at scale `h`.
    fn system_matrix_b(&self, h: f64) -> Result<CMatrix, RcipError>;

    /// Right-hand side on the type-b grid at scale `h`.
    fn rhs_b(&self, h: f64) -> Result<Vec<C64>, RcipError>;

    /// Right-hand side on the type-c grid at scale `h`.
    fn rhs_c(&self, h: f64) -> Result<Vec<C64>, RcipError>;

    /// Homogeneous leading term of the right-hand side on the type-b and type-c
    /// grids at scale `h`, if the model has one.
    fn leading_bc(&self, _h: f64) -> Option<(Vec<C64>, Vec<C64>)> {
        None
    }

    fn scale_invariant(&self) -> bool {
        false
    }
}

/// A plain Nyström discretization of a kernel near a singular point of a contour.
pub struct NystromLocal<'a> {
    pub contour: &'a dyn Contour,
    pub kernel: &'a dyn Kernel,
    pub rhs: &'a dyn Rhs,
    pub gamma: usize,
    pub h_coarse: f64,
}

impl<'a> NystromLocal<'a> {
    pub fn new(contour: &'a dyn Contour, kernel: &'a dyn Kernel, rhs: &'a dyn Rhs, gamma: usize, h_coarse: f64) -> Self {
        Self { contour, kernel, rhs, gamma, h_coarse }
    }

    pub fn grid_b(&self, h: f64) -> LocalGrid {
        LocalGrid::type_b(self.contour, self.gamma, h, self.contour.is_closed())
    }

    pub fn grid_c(&self, h: f64) -> LocalGrid {
        LocalGrid::type_c(self.contour, self.gamma, h, self.contour.is_closed())
    }
}

impl LocalProblem for NystromLocal<'_> {
    fn two_sided(&self) -> bool {
        self.contour.is_closed()
    }

    fn h_coarse(&self) -> f64 {
        self.h_coarse
    }

    fn nodes_b(&self, h: f64) -> Vec<Node> {
        self.grid_b(h).nodes
    }

    fn system_matrix_b(&self, h: f64) -> Result<CMatrix, RcipError> {
        Ok(system_matrix(self.kernel, &self.grid_b(h).nodes))
    }

    fn rhs_b(&self, h: f64) -> Result<Vec<C64>, RcipError> {
        Ok(self.rhs.eval_all(&self.grid_b(h).nodes)?)
    }

    fn rhs_c(&self, h: f64) -> Result<Vec<C64>, RcipError> {
        Ok(self.rhs.eval_all(&self.grid_c(h).nodes)?)
    }

    fn leading_bc(&self, h: f64) -> Option<(Vec<C64>, Vec<C64>)> {
        let b: Option<Vec<C64>> = self.grid_b(h).nodes.iter().map(|n| self.rhs.leading(n)).collect();
        let c: Option<Vec<C64>> = self.grid_c(h).nodes.iter().map(|n| self.rhs.leading(n)).collect();
        Some((b?, c?))
    }

    fn scale_invariant(&self) -> bool {
        self.kernel.scale_invariant()
    }
}

fn complexify(m: &Matrix<f64>) -> CMatrix {
    Matrix::from_fn(m.rows(), m.cols(), |i, j| Complex64::new(m[(i, j)], 0.0))
}

/// Level-independent prolongations in complex form.
#[derive(Debug, Clone)]
pub struct LocalOperators {
    pub p_bc: CMatrix,
    /// `P_Wbcᵀ`, stored transposed since that is how it is always used.
    pub p_wbc_t: CMatrix,
    pub idx: IndexSets,
    all_c: Vec<usize>,
}

impl LocalOperators {
    pub fn new(two_sided: bool) -> Self {
        let p = Prolongation::new(gl16(), two_sided);
        let all_c = (0..p.idx.n_c()).collect();
        Self { p_bc: complexify(&p.p_bc), p_wbc_t: complexify(&p.p_wbc.transpose()), idx: p.idx, all_c }
    }

    fn star_rows(&self, p: &CMatrix) -> CMatrix {
        p.select(&self.idx.star_l, &self.all_c)
    }

    fn circ_rows(&self, p: &CMatrix) -> CMatrix {
        p.select(&self.idx.circ_l, &self.all_c)
    }

    /// `P_fbc` built from right-hand-side samples on the b- and c-grids.
    pub fn p_f(&self, f_b: &[C64], f_c: &[C64]) -> Result<CMatrix, PfError> {
        build_pf_bc(&self.p_bc, &self.idx, f_b, f_c)
    }
}

fn pick(v: &[C64], idx: &[usize]) -> Vec<C64> {
    idx.iter().map(|&i| v[i]).collect()
}

/// Solver for `G y = b` with `G = F{A⁻¹} + I° + K°` on one type-b grid.
///
/// With `M = I + K` split by the index sets as `U = M(★,○)`, `V = M(○,★)`,
/// `D = M(○,○)`, and a right-hand side whose star part is `A⁻¹ a` and whose
/// outer part is `x`, the solution is `y○ = S⁻¹(x − V a)`, `y★ = a − A U y○`
/// with `S = D − V A U`.
pub struct LevelSolver<'a> {
    idx: &'a IndexSets,
    au: CMatrix,
    v: CMatrix,
    s: Lu<C64>,
}

impl<'a> LevelSolver<'a> {
    pub fn new(m: &CMatrix, a: &CMatrix, idx: &'a IndexSets) -> Result<Self, LuError> {
        let u = m.select(&idx.star_l, &idx.circ_l);
        let v = m.select(&idx.circ_l, &idx.star_l);
        let d = m.select(&idx.circ_l, &idx.circ_l);
        let au = a.matmul(&u);
        let s = Lu::new(&(&d - &v.matmul(&au)))?;
        Ok(Self { idx, au, v, s })
    }

    pub fn solve(&self, a: &CMatrix, x: &CMatrix) -> Result<CMatrix, LuError> {
        let c = self.s.solve(&(x - &self.v.matmul(a)))?;
        let ys = a - &self.au.matmul(&c);
        let cols: Vec<usize> = (0..a.cols()).collect();
        let mut y = Matrix::zeros(self.idx.n_b(), a.cols());
        y.assign(&self.idx.star_l, &cols, &ys);
        y.assign(&self.idx.circ_l, &cols, &c);
        Ok(y)
    }

    pub fn solve_vec(&self, a: &[C64], x: &[C64]) -> Result<Vec<C64>, LuError> {
        Ok(self.solve(&Matrix::column(a), &Matrix::column(x))?.into_vec())
    }
}

/// One inversion-free compression step `P_Wbcᵀ (F{R_prev⁻¹} + I° + K°)⁻¹ P_bc`.
pub fn schur_banachiewicz_step(ops: &LocalOperators, m: &CMatrix, r_prev: &CMatrix) -> Result<CMatrix, LuError> {
    let solver = LevelSolver::new(m, r_prev, &ops.idx)?;
    let y = solver.solve(&r_prev.matmul(&ops.star_rows(&ops.p_bc)), &ops.circ_rows(&ops.p_bc))?;
    Ok(ops.p_wbc_t.matmul(&y))
}

/// `F{A} + I° + K°`: the system matrix with its star block replaced by `A`.
pub fn padded_operator(m: &CMatrix, a: &CMatrix, idx: &IndexSets) -> CMatrix {
    let mut g = m.clone();
    g.assign(&idx.star_l, &idx.star_l, a);
    g
}

/// The same step evaluated by explicitly inverting `R_prev`, refusing
/// when its condition number exceeds [`MAX_DIRECT_CONDITION`].
pub fn direct_step(ops: &LocalOperators, m: &CMatrix, r_prev: &CMatrix, level: usize) -> Result<CMatrix, RcipError> {
    let cond = condition_number_1(r_prev)?;
    if !(cond <= MAX_DIRECT_CONDITION) {
        return Err(RcipError::IllConditioned { level, cond });
    }
    let g = padded_operator(m, &inverse(r_prev)?, &ops.idx);
    let y = Lu::new(&g)?.solve(&ops.p_bc)?;
    Ok(ops.p_wbc_t.matmul(&y))
}

/// How the recursions are started.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Initializer {
    /// `R_0 = M_1(★,★)⁻¹` and `r_f0 = R_0 f_1b(★)`.
    Plain,
    /// Fixed points of the scale-invariant recursion at the finest level.
    FixedPoint,
}

/// Everything the backward recursions need from one level.
#[derive(Debug, Clone)]
pub struct LevelData {
    pub level: usize,
    pub h: f64,
    /// `I + K_ib` on the level's type-b grid.
    pub m: CMatrix,
    pub r_prev: CMatrix,
    pub rf_prev: Option<Vec<C64>>,
    pub f_b: Option<Vec<C64>>,
}

/// Output of the forward recursions around one singular point.
#[derive(Debug, Clone)]
pub struct Compressed {
    pub n_sub: usize,
    pub two_sided: bool,
    /// Nontrivial block of `R` on the coarse star nodes.
    pub r: CMatrix,
    /// `r_f* = R_f f*_coa` on the coarse star nodes.
    pub r_f: Option<Vec<C64>>,
    pub r0: CMatrix,
    pub rf0: Option<Vec<C64>>,
    /// Per-level archive, level 1 first; empty unless requested.
    pub levels: Vec<LevelData>,
}

/// Options of [`forward_recursion`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecursionOptions {
    pub n_sub: usize,
    pub init: Initializer,
    /// Run the vector recursion for `r_f*` alongside `R`.
    pub with_rhs: bool,
    /// Keep the per-level archive for the backward recursions.
    pub keep_levels: bool,
}

impl RecursionOptions {
    pub fn new(n_sub: usize) -> Self {
        Self { n_sub, init: Initializer::Plain, with_rhs: true, keep_levels: false }
    }
}

/// Scale of level `level` in a recursion of `n_sub` levels.
pub fn scale(problem: &dyn LocalProblem, n_sub: usize, level: usize) -> f64 {
    crate::geometry::level_scale(problem.h_coarse(), n_sub, level)
}

/// Runs the forward recursions for `R` and, optionally, `r_f*`.
pub fn forward_recursion(problem: &dyn LocalProblem, opts: RecursionOptions) -> Result<Compressed, RcipError> {
    let n_sub = opts.n_sub;
    if n_sub == 0 {
        return Err(RcipError::NoLevels);
    }
    let h1 = scale(problem, n_sub, 1);
    if !(h1 >= MIN_SCALE) {
        return Err(RcipError::TooDeep { n_sub });
    }
    let ops = LocalOperators::new(problem.two_sided());
    let idx = &ops.idx;
    let m1 = problem.system_matrix_b(h1)?;
    let f1 = if opts.with_rhs { Some(problem.rhs_b(h1)?) } else { None };

    let (r0, rf0) = match opts.init {
        Initializer::Plain => {
            let r0 = inverse(&m1.select(&idx.star_l, &idx.star_l))?;
            let rf0 = f1.as_ref().map(|f| r0.matvec(&pick(f, &idx.star_l)));
            (r0, rf0)
        }
        Initializer::FixedPoint => {
            let maps = WedgeMaps::with_matrix(problem, h1, m1.clone(), opts.with_rhs)?;
            let (r_star, _) = maps.solve_r()?;
            let rf0 = match &f1 {
                Some(f) => Some(maps.solve_rf(&r_star)?.matvec(&pick(f, &idx.star_l))),
                None => None,
            };
            (r_star, rf0)
        }
    };

    let mut r = r0.clone();
    let mut rf = rf0.clone();
    let mut levels = Vec::new();
    let mut m_next = Some(m1);
    let mut f_next = f1;
    for level in 1..=n_sub {
        let h = scale(problem, n_sub, level);
        let m = match m_next.take() {
            Some(m) => m,
            None => problem.system_matrix_b(h)?,
        };
        let f_b = match f_next.take() {
            Some(f) => Some(f),
            None if opts.with_rhs => Some(problem.rhs_b(h)?),
            None => None,
        };
        let solver = LevelSolver::new(&m, &r, idx).map_err(|source| RcipError::SingularLevel { level, source })?;
        let sing = |source| RcipError::SingularLevel { level, source };
        let y = solver.solve(&r.matmul(&ops.star_rows(&ops.p_bc)), &ops.circ_rows(&ops.p_bc)).map_err(sing)?;
        let r_new = ops.p_wbc_t.matmul(&y);
        let rf_new = match (&rf, &f_b) {
            (Some(rfv), Some(f)) => Some(ops.p_wbc_t.matvec(&solver.solve_vec(rfv, &pick(f, &idx.circ_l)).map_err(sing)?)),
            _ => None,
        };
        if opts.keep_levels {
            levels.push(LevelData { level, h, m, r_prev: r, rf_prev: rf, f_b });
        }
        r = r_new;
        rf = rf_new;
    }
    Ok(Compressed { n_sub, two_sided: problem.two_sided(), r, r_f: rf, r0, rf0, levels })
}

/// Runs the matrix recursion for `R_f` in tandem with the recursion for `R`,
/// from the given initial blocks.
pub fn rf_matrix_recursion(
    problem: &dyn LocalProblem,
    n_sub: usize,
    r0: &CMatrix,
    rf0: &CMatrix,
) -> Result<(CMatrix, CMatrix), RcipError> {
    if n_sub == 0 {
        return Err(RcipError::NoLevels);
    }
    let ops = LocalOperators::new(problem.two_sided());
    let mut r = r0.clone();
    let mut rf = rf0.clone();
    for level in 1..=n_sub {
        let h = scale(problem, n_sub, level);
        let m = problem.system_matrix_b(h)?;
        let pf = ops.p_f(&problem.rhs_b(h)?, &problem.rhs_c(h)?)?;
        let sing = |source| RcipError::SingularLevel { level, source };
        let solver = LevelSolver::new(&m, &r, &ops.idx).map_err(sing)?;
        let y = solver.solve(&r.matmul(&ops.star_rows(&ops.p_bc)), &ops.circ_rows(&ops.p_bc)).map_err(sing)?;
        let yf = solver.solve(&rf.matmul(&ops.star_rows(&pf)), &ops.circ_rows(&pf)).map_err(sing)?;
        r = ops.p_wbc_t.matmul(&y);
        rf = ops.p_wbc_t.matmul(&yf);
    }
    Ok((r, rf))
}

/// The recursion for `R` evaluated by explicitly inverting each `R_{i−1}`.
pub fn forward_recursion_direct(problem: &dyn LocalProblem, n_sub: usize) -> Result<CMatrix, RcipError> {
    if n_sub == 0 {
        return Err(RcipError::NoLevels);
    }
    let ops = LocalOperators::new(problem.two_sided());
    let m1 = problem.system_matrix_b(scale(problem, n_sub, 1))?;
    let mut r = inverse(&m1.select(&ops.idx.star_l, &ops.idx.star_l))?;
    for level in 1..=n_sub {
        let m = if level == 1 { m1.clone() } else { problem.system_matrix_b(scale(problem, n_sub, level))? };
        r = direct_step(&ops, &m, &r, level)?;
    }
    Ok(r)
}

/// The recursion maps at one fixed deep scale, where a scale-invariant kernel
/// and a homogeneous right-hand side make every level look the same.
pub struct WedgeMaps {
    ops: LocalOperators,
    m: CMatrix,
    pf: Option<CMatrix>,
    /// Factors of the star block `u wᴴ` of `P_fbc`.
    rank_one: Option<(Vec<C64>, Vec<C64>)>,
}

impl WedgeMaps {
    /// Maps built from the type-b grid at scale `h`.
    pub fn new(problem: &dyn LocalProblem, h: f64, with_rhs: bool) -> Result<Self, RcipError> {
        let m = problem.system_matrix_b(h)?;
        Self::with_matrix(problem, h, m, with_rhs)
    }

    fn with_matrix(problem: &dyn LocalProblem, h: f64, m: CMatrix, with_rhs: bool) -> Result<Self, RcipError> {
        if !problem.scale_invariant() {
            return Err(RcipError::NotScaleInvariant);
        }
        let ops = LocalOperators::new(problem.two_sided());
        let (pf, rank_one) = if with_rhs {
            let (lb, lc) = problem.leading_bc(h).ok_or(RcipError::NoLeadingTerm)?;
            let u = pick(&lb, &ops.idx.star_l);
            let s = ops.idx.star_s.iter().map(|&j| lc[j].norm()).fold(0.0, f64::max);
            let nrm2: f64 = ops.idx.star_s.iter().map(|&j| (lc[j] / s).norm_sqr()).sum();
            let mut w = vec![C64::new(0.0, 0.0); ops.idx.n_c()];
            for &j in &ops.idx.star_s {
                w[j] = lc[j] / s / s / nrm2;
            }
            (Some(ops.p_f(&lb, &lc)?), Some((u, w)))
        } else {
            (None, None)
        };
        Ok(Self { ops, m, pf, rank_one })
    }

    pub fn operators(&self) -> &LocalOperators {
        &self.ops
    }

    fn pf(&self) -> Result<&CMatrix, RcipError> {
        self.pf.as_ref().ok_or(RcipError::NoLeadingTerm)
    }

    /// The plain initializer `M(★,★)⁻¹` at this scale.
    pub fn plain_start(&self) -> Result<CMatrix, RcipError> {
        Ok(inverse(&self.m.select(&self.ops.idx.star_l, &self.ops.idx.star_l))?)
    }

    /// `Φ(R) = P_Wbcᵀ (F{R⁻¹} + I° + K°)⁻¹ P_bc`.
    pub fn phi_r(&self, r: &CMatrix) -> Result<CMatrix, RcipError> {
        Ok(schur_banachiewicz_step(&self.ops, &self.m, r)?)
    }

    /// `Φ_f(X) = P_Wbcᵀ (F{R⁻¹} + I° + K°)⁻¹ (F{R⁻¹X} + I°) P_fbc`.
    pub fn phi_rf(&self, r: &CMatrix, x: &CMatrix) -> Result<CMatrix, RcipError> {
        let pf = self.pf()?;
        let solver = LevelSolver::new(&self.m, r, &self.ops.idx)?;
        let y = solver.solve(&x.matmul(&self.ops.star_rows(pf)), &self.ops.circ_rows(pf))?;
        Ok(self.ops.p_wbc_t.matmul(&y))
    }

    /// Picard iteration of `Φ` from the plain initializer until the relative
    /// change drops to [`FIXED_POINT_TOL`]. Returns the fixed point and the iteration count.
    pub fn solve_r(&self) -> Result<(CMatrix, usize), RcipError> {
        let mut r = self.plain_start()?;
        let mut change = f64::INFINITY;
        for it in 1..=FIXED_POINT_MAX_ITER {
            let next = self.phi_r(&r)?;
            change = next.rel_diff(&r);
            r = next;
            if change <= FIXED_POINT_TOL {
                return Ok((r, it));
            }
        }
        Err(RcipError::NoConvergence { iterations: FIXED_POINT_MAX_ITER, change })
    }

    /// The linear fixed-point equation for `R_f*` written as `X = C1 X C2 + D`.
    ///
    /// Returns `(C1, D, u, w)` where `C2 = u wᴴ` is the rank-one star block of `P_fbc`.
    fn linear_form(&self, r: &CMatrix) -> Result<(CMatrix, CMatrix, Vec<C64>, Vec<C64>), RcipError> {
        let pf = self.pf()?;
        let idx = &self.ops.idx;
        let nc = idx.n_c();
        let solver = LevelSolver::new(&self.m, r, idx)?;
        let zero_c = Matrix::zeros(idx.circ_l.len(), nc);
        let c1 = self.ops.p_wbc_t.matmul(&solver.solve(&Matrix::identity(nc), &zero_c)?);
        let d = self.ops.p_wbc_t.matmul(&solver.solve(&Matrix::zeros(nc, nc), &self.ops.circ_rows(pf))?);
        let (u, w) = self.rank_one.clone().ok_or(RcipError::NoLeadingTerm)?;
        Ok((c1, d, u, w))
    }

    /// Solves the fixed-point equation for `R_f*` through its rank-one structure:
    /// `x_u = X u` solves `(I − (wᴴu) C1) x_u = D u`, and then `X = C1 x_u wᴴ + D`.
    pub fn solve_rf(&self, r: &CMatrix) -> Result<CMatrix, RcipError> {
        let (c1, d, u, w) = self.linear_form(r)?;
        let n = c1.rows();
        let wu: C64 = w.iter().zip(&u).map(|(a, b)| a.conj() * b).sum();
        let lhs = Matrix::identity(n) - c1.scaled(wu);
        let xu = Lu::new(&lhs)?.solve_vec(&d.matvec(&u))?;
        let c1xu = c1.matvec(&xu);
        Ok(&Matrix::from_fn(n, w.len(), |i, j| c1xu[i] * w[j].conj()) + &d)
    }

    /// The same fixed point from the full vectorized equation `(I − C2ᵀ ⊗ C1) vec X = vec D`.
    pub fn solve_rf_kron(&self, r: &CMatrix) -> Result<CMatrix, RcipError> {
        let (c1, d, u, w) = self.linear_form(r)?;
        let c2 = Matrix::from_fn(u.len(), w.len(), |i, j| u[i] * w[j].conj());
        Ok(kron_linear_solve(&c1, &c2, &d)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::OneCorner;
    use crate::models::{LaplaceDlp, RhsOneCorner};
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> C64 {
        Complex64::new(re, im)
    }

    fn random_matrix(rng: &mut impl Rng, r: usize, cols: usize, scale: f64) -> CMatrix {
        Matrix::from_fn(r, cols, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale)
    }

    #[test]
    fn schur_step_matches_direct_inversion_on_random_instances() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for two_sided in [true, false] {
            let ops = LocalOperators::new(two_sided);
            let nb = ops.idx.n_b();
            let nc = ops.idx.n_c();
            for _ in 0..5 {
                let m = &Matrix::identity(nb) + &random_matrix(&mut rng, nb, nb, 0.02);
                let r_prev = &Matrix::identity(nc) + &random_matrix(&mut rng, nc, nc, 0.03);
                let fast = schur_banachiewicz_step(&ops, &m, &r_prev).unwrap();
                let slow = direct_step(&ops, &m, &r_prev, 1).unwrap();
                assert!(fast.rel_diff(&slow) < 1e-12, "{}", fast.rel_diff(&slow));
            }
        }
    }

    #[test]
    fn decoupled_blocks_reduce_to_weighted_projection() {
        let ops = LocalOperators::new(true);
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let r_prev = &Matrix::identity(64) + &random_matrix(&mut rng, 64, 64, 0.05);
        let got = schur_banachiewicz_step(&ops, &Matrix::identity(96), &r_prev).unwrap();
        let mut mid = Matrix::identity(96);
        mid.assign(&ops.idx.star_l, &ops.idx.star_l, &r_prev);
        let expected = ops.p_wbc_t.matmul(&mid.matmul(&ops.p_bc));
        assert!(got.rel_diff(&expected) < 1e-14);
    }

    #[test]
    fn zero_kernel_gives_identity_blocks() {
        let contour = OneCorner::new(1.2).unwrap();
        let kernel = LaplaceDlp::new(c(0.0, 0.0));
        let rhs = RhsOneCorner { alpha: c(0.5, 0.0) };
        let prob = NystromLocal::new(&contour, &kernel, &rhs, 0, 0.1);
        let out = forward_recursion(&prob, RecursionOptions::new(5)).unwrap();
        assert!(out.r.rel_diff(&Matrix::identity(64)) < 1e-13);
        let maps = WedgeMaps::new(&prob, 1e-20, true).unwrap();
        let (r_star, iters) = maps.solve_r().unwrap();
        assert!(iters <= 2 && r_star.rel_diff(&Matrix::identity(64)) < 1e-13);
    }

    #[test]
    fn recursion_matches_direct_route() {
        let contour = OneCorner::new(std::f64::consts::FRAC_PI_2).unwrap();
        let kernel = LaplaceDlp::new(c(0.5, 0.0));
        let rhs = RhsOneCorner { alpha: c(0.5, 0.0) };
        let prob = NystromLocal::new(&contour, &kernel, &rhs, 0, 0.1);
        for n_sub in 1..=5 {
            let fast = forward_recursion(&prob, RecursionOptions { with_rhs: false, ..RecursionOptions::new(n_sub) }).unwrap();
            let slow = forward_recursion_direct(&prob, n_sub).unwrap();
            assert!(fast.r.rel_diff(&slow) < 1e-10, "n_sub={n_sub}: {}", fast.r.rel_diff(&slow));
        }
    }

    #[test]
    fn vector_and_matrix_rhs_recursions_agree() {
        let contour = OneCorner::new(std::f64::consts::FRAC_PI_2).unwrap();
        let kernel = LaplaceDlp::new(c(0.5, 0.0));
        let rhs = RhsOneCorner { alpha: c(0.5, 0.0) };
        let prob = NystromLocal::new(&contour, &kernel, &rhs, 0, 0.1);
        let n_sub = 6;
        let out = forward_recursion(&prob, RecursionOptions::new(n_sub)).unwrap();
        let (r, rf) = rf_matrix_recursion(&prob, n_sub, &out.r0, &out.r0).unwrap();
        assert!(r.rel_diff(&out.r) < 1e-14);
        let f_coa = prob.rhs_c(scale(&prob, n_sub, n_sub)).unwrap();
        let via_matrix = rf.matvec(&f_coa);
        let err = crate::linalg::rel_diff_vec(out.r_f.as_ref().unwrap(), &via_matrix);
        assert!(err < 1e-13, "{err}");
    }

    #[test]
    fn rank_one_fixed_point_matches_kron_and_picard() {
        let contour = OneCorner::new(std::f64::consts::FRAC_PI_2).unwrap();
        let kernel = LaplaceDlp::new(c(0.5, 0.0));
        let rhs = RhsOneCorner { alpha: c(0.5, 0.0) };
        let prob = NystromLocal::new(&contour, &kernel, &rhs, 0, 0.1);
        let maps = WedgeMaps::new(&prob, 1e-18, true).unwrap();
        let (r_star, _) = maps.solve_r().unwrap();
        let x = maps.solve_rf(&r_star).unwrap();
        let mut picard = r_star.clone();
        for _ in 0..500 {
            picard = maps.phi_rf(&r_star, &picard).unwrap();
        }
        assert!(x.rel_diff(&picard) < 1e-12, "{}", x.rel_diff(&picard));
        let resid = maps.phi_rf(&r_star, &x).unwrap().rel_diff(&x);
        assert!(resid < 1e-12, "{resid}");
    }

    /// A scale-invariant one-sided wedge with random data.
    struct RandomWedge {
        m: CMatrix,
        lb: Vec<C64>,
        lc: Vec<C64>,
    }

    impl LocalProblem for RandomWedge {
        fn two_sided(&self) -> bool {
            false
        }
        fn h_coarse(&self) -> f64 {
            1.0
        }
        fn nodes_b(&self, _h: f64) -> Vec<Node> {
            Vec::new()
        }
        fn system_matrix_b(&self, _h: f64) -> Result<CMatrix, RcipError> {
            Ok(self.m.clone())
        }
        fn rhs_b(&self, _h: f64) -> Result<Vec<C64>, RcipError> {
            Ok(self.lb.clone())
        }
        fn rhs_c(&self, _h: f64) -> Result<Vec<C64>, RcipError> {
            Ok(self.lc.clone())
        }
        fn leading_bc(&self, _h: f64) -> Option<(Vec<C64>, Vec<C64>)> {
            Some((self.lb.clone(), self.lc.clone()))
        }
        fn scale_invariant(&self) -> bool {
            true
        }
    }

    #[test]
    fn one_sided_rank_one_solve_matches_kron() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let idx = IndexSets::one_sided();
        let m = &Matrix::identity(idx.n_b()) + &random_matrix(&mut rng, idx.n_b(), idx.n_b(), 0.02);
        let vec = |rng: &mut rand::rngs::StdRng, n: usize| (0..n).map(|_| c(rng.gen_range(0.5..1.5), rng.gen_range(-0.5..0.5))).collect();
        let wedge = RandomWedge { m, lb: vec(&mut rng, idx.n_b()), lc: vec(&mut rng, idx.n_c()) };
        let maps = WedgeMaps::new(&wedge, 1.0, true).unwrap();
        let (r_star, _) = maps.solve_r().unwrap();
        let a = maps.solve_rf(&r_star).unwrap();
        let b = maps.solve_rf_kron(&r_star).unwrap();
        assert!(a.rel_diff(&b) < 1e-12, "{}", a.rel_diff(&b));
    }
}
