//! Plane Couette flow in the linearized BGK model.
//!
//! The velocity `u` on `x ∈ [−1/2, 1/2]` solves
//! `u(x) − (1/(k√π)) ∫ J_{−1}(|x − y|/k) u(y) dy = f(x)` with
//! `f(x) = (J₀((1/2 − x)/k) − J₀((1/2 + x)/k)) / (2√π)`.
//! The solution has logarithmic-type singularities at both walls, which are
//! compressed by the recursions in [`crate::rcip`]. For small `k` the
//! substitution `u = w + x` moves most of the boundary layer into the
//! right-hand side `−(k/√π)(J₁((1/2 − x)/k) − J₁((1/2 + x)/k))`.

pub mod abramowitz;
pub mod kernel;

use std::f64::consts::PI;

use num_complex::Complex64;

pub use abramowitz::{abramowitz, j_minus1_split, AbramowitzError};
pub use kernel::{CouetteKernel, PanelWeights};

use crate::geometry::{type_b_breakpoints, type_c_breakpoints, LocalGrid, Mesh, Node, Segment};
use crate::linalg::{condition_number_1, LuError, Matrix};
use crate::quadrature::{gl16, lagrange_matrix, NODES_PER_PANEL};
use crate::rcip::{forward_recursion, scale, Compressed, LocalProblem, RcipError, RecursionOptions};
use crate::solver::{assemble_compressed, reconstruct, FineSolution, LinearSolver, SolveError, StarBlock};
use crate::{CMatrix, RMatrix, C64};

/// Knudsen numbers at or below this use the `u = w + x` formulation by default.
pub const REGULARIZE_BELOW: f64 = 0.3;

/// Failure of a Couette solve.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BgkwError {
    #[error("Knudsen number must be positive and finite, got {0}")]
    Knudsen(f64),
    #[error("the coarse mesh needs an even number of panels, at least 4; got {0}")]
    Panels(usize),
    #[error(transparent)]
    Abramowitz(#[from] AbramowitzError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Rcip(#[from] RcipError),
    #[error(transparent)]
    Linear(#[from] LuError),
}

/// Which unknown is solved for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    /// `u` itself.
    Direct,
    /// `w = u − x`.
    Regularized,
}

impl Formulation {
    pub fn for_knudsen(k: f64) -> Self {
        if k <= REGULARIZE_BELOW {
            Self::Regularized
        } else {
            Self::Direct
        }
    }
}

/// How the wall velocity `u(1/2)` is evaluated from the solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WallValue {
    /// Insert the reconstructed density into the integral equation at the wall.
    Nystrom,
    /// Extrapolate the interpolant on the finest pointwise panel to the wall.
    Extrapolation,
}

fn sqrt_pi() -> f64 {
    PI.sqrt()
}

/// Right-hand side at distance `t` from the left wall, `x = −1/2 + t`.
pub fn rhs_from_left_wall(k: f64, form: Formulation, t: f64) -> Result<f64, AbramowitzError> {
    Ok(match form {
        Formulation::Direct => (abramowitz(0, (1.0 - t) / k)? - abramowitz(0, t / k)?) / (2.0 * sqrt_pi()),
        Formulation::Regularized => -(k / sqrt_pi()) * (abramowitz(1, (1.0 - t) / k)? - abramowitz(1, t / k)?),
    })
}

/// The channel as an open arc from `−1/2` to `1/2`.
pub fn channel() -> Segment {
    Segment { a: Complex64::new(-0.5, 0.0), b: Complex64::new(0.5, 0.0) }
}

fn complexify(m: &RMatrix) -> CMatrix {
    Matrix::from_fn(m.rows(), m.cols(), |i, j| Complex64::new(m[(i, j)], 0.0))
}

fn local_t(n: &Node) -> f64 {
    n.local.map_or(0.0, |l| l.t)
}

/// The neighbourhood of the left wall, in the distance `t` from the wall.
#[derive(Debug, Clone, Copy)]
pub struct CouetteLocal {
    pub kernel: CouetteKernel,
    pub form: Formulation,
    pub h_coarse: f64,
}

impl CouetteLocal {
    fn rhs_on(&self, breakpoints: Vec<f64>, h: f64) -> Result<Vec<C64>, RcipError> {
        LocalGrid::new(&channel(), 0, breakpoints, h, false)
            .nodes
            .iter()
            .map(|n| {
                rhs_from_left_wall(self.kernel.k(), self.form, local_t(n))
                    .map(|v| Complex64::new(v, 0.0))
                    .map_err(|e| RcipError::Model(crate::models::ModelError::Evaluation(e.to_string())))
            })
            .collect()
    }
}

impl LocalProblem for CouetteLocal {
    fn two_sided(&self) -> bool {
        false
    }

    fn h_coarse(&self) -> f64 {
        self.h_coarse
    }

    fn nodes_b(&self, h: f64) -> Vec<Node> {
        LocalGrid::type_b(&channel(), 0, h, false).nodes
    }

    fn system_matrix_b(&self, h: f64) -> Result<CMatrix, RcipError> {
        let ts: Vec<f64> = self.nodes_b(h).iter().map(local_t).collect();
        let k = self.kernel.matrix(&ts, &type_b_breakpoints(h, false));
        Ok(&CMatrix::identity(ts.len()) + &complexify(&k))
    }

    fn rhs_b(&self, h: f64) -> Result<Vec<C64>, RcipError> {
        self.rhs_on(type_b_breakpoints(h, false), h)
    }

    fn rhs_c(&self, h: f64) -> Result<Vec<C64>, RcipError> {
        self.rhs_on(type_c_breakpoints(h, false), h)
    }
}

/// The right wall sees the left wall's problem mirrored, with the odd
/// right-hand side changing sign.
fn mirrored(comp: &Compressed) -> Compressed {
    let neg = |v: &mut Option<Vec<C64>>| {
        if let Some(v) = v {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    };
    let mut out = comp.clone();
    neg(&mut out.r_f);
    neg(&mut out.rf0);
    for lev in &mut out.levels {
        neg(&mut lev.rf_prev);
        neg(&mut lev.f_b);
    }
    out
}

/// Options of [`solve_couette`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouetteOptions {
    pub npan: usize,
    pub n_sub: usize,
    pub solver: LinearSolver,
    /// `None` picks by [`Formulation::for_knudsen`].
    pub formulation: Option<Formulation>,
    pub wall: WallValue,
    /// Also estimate the condition number of the uncompressed coarse system.
    pub condition: bool,
}

impl Default for CouetteOptions {
    fn default() -> Self {
        Self { npan: 4, n_sub: 41, solver: LinearSolver::Gmres, formulation: None, wall: WallValue::Nystrom, condition: false }
    }
}

/// Outcome of [`solve_couette`].
#[derive(Debug, Clone)]
pub struct CouetteSolution {
    pub k: f64,
    pub formulation: Formulation,
    /// Velocity at the wall `x = 1/2`.
    pub u_wall: f64,
    /// `∫₀^{1/2} u dx`.
    pub q: f64,
    pub gmres_iters: Option<usize>,
    /// 1-norm condition number of the uncompressed coarse system, when requested.
    pub condition: Option<f64>,
    pub mesh: Mesh,
    /// Weight-corrected density of the solved-for unknown on the coarse grid.
    pub rho_hat: Vec<f64>,
    /// Reconstruction near the right wall, in distance from that wall.
    pub fine: FineSolution,
}

/// Solves the Couette problem for Knudsen number `k`.
pub fn solve_couette(k: f64, opts: CouetteOptions) -> Result<CouetteSolution, BgkwError> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(BgkwError::Knudsen(k));
    }
    if opts.npan < 4 || opts.npan % 2 == 1 {
        return Err(BgkwError::Panels(opts.npan));
    }
    let kernel = CouetteKernel::new(k)?;
    let form = opts.formulation.unwrap_or_else(|| Formulation::for_knudsen(k));
    let seg = channel();
    let mesh = Mesh::uniform(&seg, opts.npan).map_err(SolveError::from)?;
    let xs: Vec<f64> = mesh.nodes.iter().map(|n| n.z.re).collect();
    let bps: Vec<f64> = mesh.breakpoints.iter().map(|s| s - 0.5).collect();
    let k_coarse = kernel.matrix(&xs, &bps);
    let f: Vec<C64> = mesh
        .nodes
        .iter()
        .map(|n| {
            let t = n.z.re + 0.5;
            rhs_from_left_wall(k, form, t).map(|v| Complex64::new(v, 0.0))
        })
        .collect::<Result<_, _>>()?;

    let local = CouetteLocal { kernel, form, h_coarse: 1.0 / opts.npan as f64 };
    let ropts = RecursionOptions { n_sub: opts.n_sub, init: crate::rcip::Initializer::Plain, with_rhs: true, keep_levels: true };
    let left = forward_recursion(&local, ropts)?;
    let right = mirrored(&left);
    let stars = vec![
        StarBlock { indices: mesh.stars[0].indices.clone(), compressed: left },
        StarBlock { indices: mesh.stars[1].indices.clone(), compressed: right },
    ];
    let system = assemble_compressed(&complexify(&k_coarse), &mesh, &f, stars);
    let (v_tilde, gmres_iters) = system.solve(opts.solver)?;
    let rho_hat: Vec<f64> = system.rho_hat(&v_tilde).iter().map(|z| z.re).collect();

    let shift = if form == Formulation::Regularized { 1.0 } else { 0.0 };
    let q = xs.iter().zip(&rho_hat).zip(&mesh.nodes).filter(|((&x, _), _)| x > 0.0).map(|((_, r), n)| r * n.arc_weight()).sum::<f64>()
        + shift / 8.0;

    let rst = &system.stars[1];
    let v_star: Vec<C64> = rst.indices.iter().map(|&i| v_tilde[i]).collect();
    let fine = reconstruct(&local, &rst.compressed, &v_star)?;
    let u_wall = match opts.wall {
        WallValue::Nystrom => {
            let mut integral = 0.0;
            for (p, chunk) in fine.rho.chunks(NODES_PER_PANEL).enumerate() {
                let (a, b) = fine_panel(&local, opts.n_sub, p);
                let w = kernel.panel_weights(0.0, a, b).weights;
                integral += w.iter().zip(chunk).map(|(w, r)| w * r.re).sum::<f64>();
            }
            for p in 0..opts.npan - 2 {
                let w = kernel.panel_weights(0.5, bps[p], bps[p + 1]).weights;
                let r = &rho_hat[p * NODES_PER_PANEL..(p + 1) * NODES_PER_PANEL];
                integral += w.iter().zip(r).map(|(w, r)| w * r).sum::<f64>();
            }
            -rhs_from_left_wall(k, form, 0.0)? - integral
        }
        WallValue::Extrapolation => {
            let start = (opts.n_sub - 1) * NODES_PER_PANEL;
            let vals = &fine.rho[start..start + NODES_PER_PANEL];
            let lag = lagrange_matrix(&gl16().nodes, &[-3.0]);
            (0..NODES_PER_PANEL).map(|j| lag[(0, j)] * vals[j].re).sum()
        }
    } + 0.5 * shift;

    let condition = if opts.condition {
        let n = xs.len();
        Some(condition_number_1(&(&RMatrix::identity(n) + &k_coarse))?)
    } else {
        None
    };
    Ok(CouetteSolution { k, formulation: form, u_wall, q, gmres_iters, condition, mesh, rho_hat, fine })
}

/// Local breakpoints of fine panel `p` in the layout of the backward recursion.
fn fine_panel(problem: &dyn LocalProblem, n_sub: usize, p: usize) -> (f64, f64) {
    if p < n_sub {
        let h = scale(problem, n_sub, n_sub - p);
        (h, 2.0 * h)
    } else {
        let h = scale(problem, n_sub, 1);
        if p == n_sub {
            (0.0, 0.5 * h)
        } else {
            (0.5 * h, h)
        }
    }
}
