//! Runs a configured experiment and produces its table.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use rcip::bgkw::{solve_couette, CouetteOptions};
use rcip::geometry::{Contour, OneCorner};
use rcip::models::{circle_exact_q, LaplaceDlp, Rhs, RhsCircle, RhsOneCorner};
use rcip::rcip::Initializer;
use rcip::solver::{solve_nystrom, LinearSolver, SolveOptions};

use crate::config::{ExperimentConfig, Init, Problem, Solver};
use crate::table::{Cell, Table};

/// Levels of the plain-start run that serves as reference on corners.
pub const CORNER_REFERENCE_LEVELS: usize = 500;

/// A finished table with the per-row failures that left blank cells.
pub struct Outcome {
    pub table: Table,
    pub failures: Vec<String>,
}

fn solver(s: Solver) -> LinearSolver {
    match s {
        Solver::Dense => LinearSolver::Dense,
        Solver::Gmres => LinearSolver::Gmres,
    }
}

fn init(i: Init) -> Initializer {
    match i {
        Init::Plain => Initializer::Plain,
        Init::FixedPoint => Initializer::FixedPoint,
    }
}

/// Runs the experiment on the given thread pool; rows keep the input order.
pub fn run(cfg: &ExperimentConfig, pool: &rayon::ThreadPool) -> Outcome {
    pool.install(|| match cfg.problem {
        Problem::Bgkw => bgkw_table(cfg),
        _ => convergence_sweep(cfg),
    })
}

struct Laplace {
    contour: OneCorner,
    kernel: LaplaceDlp,
    rhs: Box<dyn Rhs>,
}

impl Laplace {
    fn new(cfg: &ExperimentConfig) -> Self {
        let kernel = LaplaceDlp::new(cfg.lambda);
        match cfg.problem {
            Problem::LaplaceCircle => Self { contour: OneCorner::circle(), kernel, rhs: Box::new(RhsCircle { alpha: cfg.alpha }) },
            // the angle was range-checked when the config was read
            _ => Self { contour: OneCorner { theta: cfg.theta }, kernel, rhs: Box::new(RhsOneCorner { alpha: cfg.alpha }) },
        }
    }

    fn solve(&self, opts: SolveOptions) -> Result<(Complex64, Option<Complex64>), String> {
        let contour: &dyn Contour = &self.contour;
        let res = solve_nystrom(contour, &self.kernel, self.rhs.as_ref(), opts).map_err(|e| e.to_string())?;
        let fine = res.q_fine();
        Ok((res.q, fine))
    }
}

fn convergence_sweep(cfg: &ExperimentConfig) -> Outcome {
    let lap = Laplace::new(cfg);
    let base = |n_sub| SolveOptions { init: init(cfg.init), solver: solver(cfg.solver), ..SolveOptions::new(cfg.npan, n_sub) };
    let reference: Result<Complex64, String> = match (cfg.reference, cfg.problem) {
        (Some(r), _) => Ok(r),
        (None, Problem::LaplaceCircle) => circle_exact_q(cfg.alpha, cfg.lambda).map_err(|e| e.to_string()),
        (None, _) => {
            let opts = SolveOptions { init: Initializer::Plain, ..base(CORNER_REFERENCE_LEVELS) };
            lap.solve(opts).map(|r| r.0)
        }
    };
    let results: Vec<Result<(Complex64, Option<Complex64>), String>> =
        cfg.n_sub.par_iter().map(|&n| lap.solve(SolveOptions { reconstruct: true, ..base(n) })).collect();
    let mut table = Table::new(&["n_sub", "re_q_coa", "im_q_coa", "re_q_fin", "im_q_fin", "rel_err"]);
    let mut failures = Vec::new();
    if let Err(e) = &reference {
        failures.push(format!("reference value: {e}"));
    }
    for (&n, r) in cfg.n_sub.iter().zip(results) {
        match r {
            Ok((q, fine)) => {
                let fine = fine.map_or([Cell::Blank, Cell::Blank], |f| [Cell::Real(f.re), Cell::Real(f.im)]);
                let err = reference.as_ref().map_or(Cell::Blank, |r| Cell::Real((q - r).norm() / r.norm()));
                table.push(vec![Cell::Int(n as u64), Cell::Real(q.re), Cell::Real(q.im), fine[0].clone(), fine[1].clone(), err]);
            }
            Err(e) => {
                failures.push(format!("n_sub = {n}: {e}"));
                table.push(vec![Cell::Int(n as u64), Cell::Blank, Cell::Blank, Cell::Blank, Cell::Blank, Cell::Blank]);
            }
        }
    }
    Outcome { table, failures }
}

fn bgkw_table(cfg: &ExperimentConfig) -> Outcome {
    let opts = CouetteOptions { npan: cfg.npan, n_sub: cfg.n_sub[0], solver: solver(cfg.solver), ..CouetteOptions::default() };
    let results: Vec<_> = cfg
        .k
        .par_iter()
        .map(|&k| {
            let start = Instant::now();
            let sol = solve_couette(k, opts);
            (sol, start.elapsed().as_secs_f64())
        })
        .collect();
    let mut table = Table::new(&["k", "u_half", "q", "p_xy", "gmres_iters", "cpu_seconds"]);
    let mut failures = Vec::new();
    for (&k, (sol, secs)) in cfg.k.iter().zip(results) {
        match sol {
            Ok(s) => table.push(vec![
                Cell::Real(k),
                Cell::Real(s.u_wall),
                Cell::Real(s.q),
                Cell::Blank,
                s.gmres_iters.map_or(Cell::Blank, |i| Cell::Int(i as u64)),
                Cell::Seconds(secs),
            ]),
            Err(e) => {
                failures.push(format!("k = {k}: {e}"));
                table.push(vec![Cell::Real(k), Cell::Blank, Cell::Blank, Cell::Blank, Cell::Blank, Cell::Seconds(secs)]);
            }
        }
    }
    Outcome { table, failures }
}
