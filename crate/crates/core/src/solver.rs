//! The compressed coarse-grid system, weight-corrected densities and
//! functionals, and reconstruction of the density on the fine grid.

use num_complex::Complex64;

use crate::geometry::{Contour, GeometryError, Mesh, Node};
use crate::linalg::{gmres_solve, GmresError, IndexSets, Lu, LuError, Matrix};
use crate::models::{nystrom_matrix, split_matrix, split_vector, Kernel, ModelError, Rhs};
use crate::rcip::{forward_recursion, scale, Compressed, Initializer, LevelSolver, LocalOperators, LocalProblem, NystromLocal, RcipError, RecursionOptions};
use crate::{CMatrix, C64};

/// Failure of a solve.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Rcip(#[from] RcipError),
    #[error(transparent)]
    Linear(#[from] LuError),
    #[error(transparent)]
    Gmres(#[from] GmresError),
    #[error("backward recursion needs the per-level archive and the right-hand-side recursion")]
    MissingArchive,
}

/// How the compressed system is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearSolver {
    Dense,
    Gmres,
}

/// Compression of one singular point placed on the coarse grid.
#[derive(Debug, Clone)]
pub struct StarBlock {
    /// Coarse node indices ordered by increasing local parameter.
    pub indices: Vec<usize>,
    pub compressed: Compressed,
}

/// `(I + K°R) ṽ = f° − K° r_f*`, with `R` equal to the identity outside the star blocks.
#[derive(Debug, Clone)]
pub struct CompressedSystem {
    pub k_circ: CMatrix,
    pub rhs: Vec<C64>,
    pub stars: Vec<StarBlock>,
}

fn zero() -> C64 {
    Complex64::new(0.0, 0.0)
}

/// `R v` on the coarse grid.
pub fn apply_r(stars: &[StarBlock], v: &[C64]) -> Vec<C64> {
    let mut out = v.to_vec();
    for st in stars {
        let local: Vec<C64> = st.indices.iter().map(|&i| v[i]).collect();
        for (&i, val) in st.indices.iter().zip(st.compressed.r.matvec(&local)) {
            out[i] = val;
        }
    }
    out
}

/// `r_f*` scattered onto the coarse grid.
pub fn global_rf(stars: &[StarBlock], n: usize) -> Vec<C64> {
    let mut out = vec![zero(); n];
    for st in stars {
        if let Some(rf) = &st.compressed.r_f {
            for (&i, &val) in st.indices.iter().zip(rf) {
                out[i] = val;
            }
        }
    }
    out
}

/// Assembles the compressed system from the full coarse Nyström matrix and right-hand side.
pub fn assemble_compressed(k: &CMatrix, mesh: &Mesh, f: &[C64], stars: Vec<StarBlock>) -> CompressedSystem {
    let (_, k_circ) = split_matrix(k, mesh);
    let (_, f_circ) = split_vector(f, mesh);
    let krf = k_circ.matvec(&global_rf(&stars, f.len()));
    let rhs = f_circ.iter().zip(&krf).map(|(a, b)| a - b).collect();
    CompressedSystem { k_circ, rhs, stars }
}

impl CompressedSystem {
    pub fn len(&self) -> usize {
        self.rhs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rhs.is_empty()
    }

    /// `(I + K°R) v`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let kr = self.k_circ.matvec(&apply_r(&self.stars, v));
        v.iter().zip(kr).map(|(a, b)| a + b).collect()
    }

    /// `I + K°R` as a dense matrix.
    pub fn matrix(&self) -> CMatrix {
        let n = self.len();
        let mut r = Matrix::identity(n);
        for st in &self.stars {
            r.assign(&st.indices, &st.indices, &st.compressed.r);
        }
        &Matrix::identity(n) + &self.k_circ.matmul(&r)
    }

    /// Solves for `ṽ`, returning it with the GMRES iteration count if GMRES was used.
    pub fn solve(&self, how: LinearSolver) -> Result<(Vec<C64>, Option<usize>), SolveError> {
        self.solve_rhs(&self.rhs, how)
    }

    /// Solves with another right-hand side.
    pub fn solve_rhs(&self, b: &[C64], how: LinearSolver) -> Result<(Vec<C64>, Option<usize>), SolveError> {
        match how {
            LinearSolver::Dense => Ok((Lu::new(&self.matrix())?.solve_vec(b)?, None)),
            LinearSolver::Gmres => {
                let out = gmres_solve(|v: &[C64]| self.apply(v), b, f64::EPSILON, self.len())?;
                Ok((out.x, Some(out.iterations)))
            }
        }
    }

    /// `ρ̂ = R ṽ + r_f*`.
    pub fn rho_hat(&self, v_tilde: &[C64]) -> Vec<C64> {
        let rf = global_rf(&self.stars, v_tilde.len());
        apply_r(&self.stars, v_tilde).iter().zip(rf).map(|(a, b)| a + b).collect()
    }
}

/// `q = Σ h(r_j) ρ̂_j |z′_j| w_j` over a set of nodes.
pub fn functional_q(nodes: &[Node], h: impl Fn(&Node) -> C64, rho_hat: &[C64]) -> C64 {
    nodes.iter().zip(rho_hat).map(|(n, &r)| h(n) * r * n.arc_weight()).sum()
}

/// `q` with `h ≡ 1`.
pub fn integral(nodes: &[Node], rho_hat: &[C64]) -> C64 {
    functional_q(nodes, |_| Complex64::new(1.0, 0.0), rho_hat)
}

/// Values reconstructed on the fine grid around one singular point.
#[derive(Debug, Clone, Default)]
pub struct FineSolution {
    pub nodes: Vec<Node>,
    pub v: Vec<C64>,
    pub g: Vec<C64>,
    pub rho: Vec<C64>,
    /// Set on the innermost panels, where the values are weight-corrected rather than pointwise.
    pub weight_corrected: Vec<bool>,
    /// Recursion level whose type-b grid the node belongs to.
    pub level: Vec<usize>,
}

impl FineSolution {
    /// `Σ ρ |z′| w` over the reconstructed nodes.
    pub fn integral(&self) -> C64 {
        integral(&self.nodes, &self.rho)
    }
}

struct LevelStep<'a> {
    solver: LevelSolver<'a>,
    m: &'a CMatrix,
    a: &'a CMatrix,
}

impl LevelStep<'_> {
    /// `z − K° G⁻¹ b` where `b` has star part `A⁻¹(A z★ + extra_star)` and outer part `z○ + extra_circ`.
    fn apply(&self, idx: &IndexSets, z: &[C64], extra_star: Option<&[C64]>, extra_circ: Option<&[C64]>) -> Result<Vec<C64>, LuError> {
        let zs: Vec<C64> = idx.star_l.iter().map(|&i| z[i]).collect();
        let mut a = self.a.matvec(&zs);
        if let Some(e) = extra_star {
            a.iter_mut().zip(e).for_each(|(x, y)| *x += y);
        }
        let mut x: Vec<C64> = idx.circ_l.iter().map(|&i| z[i]).collect();
        if let Some(e) = extra_circ {
            x.iter_mut().zip(e).for_each(|(p, q)| *p += q);
        }
        let y = self.solver.solve_vec(&a, &x)?;
        let mut out = z.to_vec();
        for &i in &idx.star_l {
            let s: C64 = idx.circ_l.iter().map(|&j| self.m[(i, j)] * y[j]).sum();
            out[i] -= s;
        }
        for &i in &idx.circ_l {
            let s: C64 = (0..y.len()).map(|j| self.m[(i, j)] * y[j]).sum::<C64>() - y[i];
            out[i] -= s;
        }
        Ok(out)
    }
}

/// Backward recursion for `v_fin` from the coarse star values of `ṽ`.
///
/// Returns the outer-panel values of each level from `n_sub` down to 1,
/// concatenated, followed by the weight-corrected values `R_0 ṽ_0` on the
/// innermost panels.
pub fn backward_recursion_v(comp: &Compressed, v_star: &[C64]) -> Result<Vec<C64>, SolveError> {
    backward(comp, v_star, false)
}

/// Backward recursion for `g_fin`, laid out as in [`backward_recursion_v`].
pub fn backward_recursion_g(comp: &Compressed) -> Result<Vec<C64>, SolveError> {
    let n = LocalOperators::new(comp.two_sided).idx.n_c();
    backward(comp, &vec![zero(); n], true)
}

fn backward(comp: &Compressed, start: &[C64], singular: bool) -> Result<Vec<C64>, SolveError> {
    if comp.levels.len() != comp.n_sub {
        return Err(SolveError::MissingArchive);
    }
    let ops = LocalOperators::new(comp.two_sided);
    let idx = &ops.idx;
    let mut out = Vec::new();
    let mut cur = start.to_vec();
    for lev in comp.levels.iter().rev() {
        let solver = LevelSolver::new(&lev.m, &lev.r_prev, idx).map_err(|source| RcipError::SingularLevel { level: lev.level, source })?;
        let step = LevelStep { solver, m: &lev.m, a: &lev.r_prev };
        let z = ops.p_bc.matvec(&cur);
        let next = if singular {
            let rf = lev.rf_prev.as_deref().ok_or(SolveError::MissingArchive)?;
            let f = lev.f_b.as_deref().ok_or(SolveError::MissingArchive)?;
            let fc: Vec<C64> = idx.circ_l.iter().map(|&i| f[i]).collect();
            let mut vec = step.apply(idx, &z, Some(rf), Some(&fc))?;
            for (&i, &fi) in idx.circ_l.iter().zip(&fc) {
                out.push(vec[i] + fi);
                vec[i] = zero();
            }
            vec
        } else {
            let vec = step.apply(idx, &z, None, None)?;
            out.extend(idx.circ_l.iter().map(|&i| vec[i]));
            vec
        };
        cur = idx.star_l.iter().map(|&i| next[i]).collect();
    }
    let mut inner = comp.r0.matvec(&cur);
    if singular {
        let rf0 = comp.rf0.as_deref().ok_or(SolveError::MissingArchive)?;
        inner.iter_mut().zip(rf0).for_each(|(a, b)| *a += b);
    }
    out.extend(inner);
    Ok(out)
}

/// Fine-grid nodes matching the layout of the backward recursions.
pub fn fine_nodes(problem: &dyn LocalProblem, comp: &Compressed) -> (Vec<Node>, Vec<usize>, Vec<bool>) {
    let idx = IndexSets::for_sides(comp.two_sided);
    let mut nodes = Vec::new();
    let mut level = Vec::new();
    let mut corrected = Vec::new();
    for i in (1..=comp.n_sub).rev() {
        let grid = problem.nodes_b(scale(problem, comp.n_sub, i));
        for &j in &idx.circ_l {
            nodes.push(grid[j]);
            level.push(i);
            corrected.push(false);
        }
    }
    let grid = problem.nodes_b(scale(problem, comp.n_sub, 1));
    for &j in &idx.star_l {
        nodes.push(grid[j]);
        level.push(0);
        corrected.push(true);
    }
    (nodes, level, corrected)
}

/// Reconstructs `ρ_fin = v_fin + g_fin` around one singular point.
pub fn reconstruct(problem: &dyn LocalProblem, comp: &Compressed, v_star: &[C64]) -> Result<FineSolution, SolveError> {
    let v = backward_recursion_v(comp, v_star)?;
    let g = backward_recursion_g(comp)?;
    let rho = v.iter().zip(&g).map(|(a, b)| a + b).collect();
    let (nodes, level, weight_corrected) = fine_nodes(problem, comp);
    Ok(FineSolution { nodes, v, g, rho, weight_corrected, level })
}

/// Options of [`solve_nystrom`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub npan: usize,
    pub n_sub: usize,
    pub init: Initializer,
    pub solver: LinearSolver,
    /// Reconstruct the density on the fine grid.
    pub reconstruct: bool,
}

impl SolveOptions {
    pub fn new(npan: usize, n_sub: usize) -> Self {
        Self { npan, n_sub, init: Initializer::Plain, solver: LinearSolver::Dense, reconstruct: false }
    }
}

/// Outcome of a compressed solve.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub mesh: Mesh,
    pub v_tilde: Vec<C64>,
    pub rho_hat: Vec<C64>,
    /// `∫ ρ dℓ` from the coarse grid.
    pub q: C64,
    pub gmres_iters: Option<usize>,
    pub system: CompressedSystem,
    /// One reconstruction per singular point, when requested.
    pub fine: Vec<FineSolution>,
}

impl SolveResult {
    /// `∫ ρ dℓ` with the reconstructed fine-grid density on the star regions.
    pub fn q_fine(&self) -> Option<C64> {
        if self.fine.len() != self.mesh.stars.len() {
            return None;
        }
        let outside: C64 = (0..self.mesh.len())
            .filter(|&i| self.mesh.star_of(i).is_none())
            .map(|i| self.v_tilde[i] * self.mesh.nodes[i].arc_weight())
            .sum();
        Some(outside + self.fine.iter().map(FineSolution::integral).sum::<C64>())
    }
}

/// Solves `(I + K) ρ = f` on a contour by the compressed scheme, with a plain
/// Nyström discretization of `K`.
pub fn solve_nystrom(contour: &dyn Contour, kernel: &dyn Kernel, rhs: &dyn Rhs, opts: SolveOptions) -> Result<SolveResult, SolveError> {
    let mesh = Mesh::uniform(contour, opts.npan)?;
    let k = nystrom_matrix(kernel, &mesh.nodes);
    let f = rhs.eval_all(&mesh.nodes)?;
    let mut stars = Vec::new();
    let mut locals = Vec::new();
    for st in &mesh.stars {
        let local = NystromLocal::new(contour, kernel, rhs, st.gamma, st.h);
        let ropts = RecursionOptions { n_sub: opts.n_sub, init: opts.init, with_rhs: true, keep_levels: opts.reconstruct };
        let compressed = forward_recursion(&local, ropts)?;
        stars.push(StarBlock { indices: st.indices.clone(), compressed });
        locals.push(local);
    }
    let system = assemble_compressed(&k, &mesh, &f, stars);
    let (v_tilde, gmres_iters) = system.solve(opts.solver)?;
    let rho_hat = system.rho_hat(&v_tilde);
    let q = integral(&mesh.nodes, &rho_hat);
    let mut fine = Vec::new();
    if opts.reconstruct {
        for (st, local) in system.stars.iter().zip(&locals) {
            let v_star: Vec<C64> = st.indices.iter().map(|&i| v_tilde[i]).collect();
            fine.push(reconstruct(local, &st.compressed, &v_star)?);
        }
    }
    Ok(SolveResult { mesh, v_tilde, rho_hat, q, gmres_iters, system, fine })
}

/// Solves with a right-hand side that is smooth on every panel, using only `R`:
/// `(I + K°R) ρ̃ = f`, `ρ̂ = R ρ̃`. Returns `ρ̂` and `q`.
pub fn solve_nystrom_smooth(contour: &dyn Contour, kernel: &dyn Kernel, rhs: &dyn Rhs, opts: SolveOptions) -> Result<(Vec<C64>, C64), SolveError> {
    let mesh = Mesh::uniform(contour, opts.npan)?;
    let k = nystrom_matrix(kernel, &mesh.nodes);
    let f = rhs.eval_all(&mesh.nodes)?;
    let mut stars = Vec::new();
    for st in &mesh.stars {
        let local = NystromLocal::new(contour, kernel, rhs, st.gamma, st.h);
        let ropts = RecursionOptions { n_sub: opts.n_sub, init: opts.init, with_rhs: false, keep_levels: false };
        stars.push(StarBlock { indices: st.indices.clone(), compressed: forward_recursion(&local, ropts)? });
    }
    let system = assemble_compressed(&k, &mesh, &f, stars);
    let (rho_tilde, _) = system.solve_rhs(&f, opts.solver)?;
    let rho_hat = apply_r(&system.stars, &rho_tilde);
    let q = integral(&mesh.nodes, &rho_hat);
    Ok((rho_hat, q))
}
