//! Reference constructions that avoid the recursions entirely: the compressed
//! blocks are built from their definitions on the explicitly refined grid.

#![allow(dead_code)]

pub mod quad;

use rcip::geometry::{Contour, LocalGrid, Node};
use rcip::linalg::{lu_solve, Matrix};
use rcip::models::{system_matrix, Kernel, Rhs};
use rcip::{CMatrix, C64};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Breakpoints of the star region refined `n_sub` times towards the singular point.
pub fn fine_breakpoints(h: f64, n_sub: usize, two_sided: bool) -> Vec<f64> {
    let mut right = vec![2.0 * h, h];
    for k in 1..=n_sub {
        right.push(h / 2f64.powi(k as i32));
    }
    right.reverse();
    let mut bp = Vec::new();
    if two_sided {
        bp.extend(right.iter().rev().map(|x| -x));
    }
    bp.push(0.0);
    bp.extend(right);
    bp
}

pub fn coarse_breakpoints(h: f64, two_sided: bool) -> Vec<f64> {
    if two_sided {
        vec![-2.0 * h, -h, 0.0, h, 2.0 * h]
    } else {
        vec![0.0, h, 2.0 * h]
    }
}

/// Lagrange basis polynomial `j` on `xs`, evaluated at `x`, by the product formula.
fn lagrange(xs: &[f64], j: usize, x: f64) -> f64 {
    xs.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &xk)| (x - xk) / (xs[j] - xk)).product()
}

pub struct DenseStar {
    pub h: f64,
    pub two_sided: bool,
    pub coarse: Vec<Node>,
    pub fine: Vec<Node>,
    pub p: CMatrix,
    pub p_w: CMatrix,
    pub inv: CMatrix,
}

impl DenseStar {
    pub fn new(contour: &dyn Contour, kernel: &dyn Kernel, h: f64, n_sub: usize) -> Self {
        let two = contour.is_closed();
        let cbp = coarse_breakpoints(h, two);
        let fbp = fine_breakpoints(h, n_sub, two);
        let coarse = LocalGrid::new(contour, 0, cbp.clone(), h, two).nodes;
        let fine = LocalGrid::new(contour, 0, fbp, h, two).nodes;
        let t_of = |n: &Node| n.local.unwrap().t;
        let mut p = Matrix::zeros(fine.len(), coarse.len());
        for (i, fnode) in fine.iter().enumerate() {
            let t = t_of(fnode);
            let panel = (0..cbp.len() - 1).find(|&k| t > cbp[k] && t < cbp[k + 1]).unwrap();
            let xs: Vec<f64> = coarse[16 * panel..16 * panel + 16].iter().map(t_of).collect();
            for j in 0..16 {
                p[(i, 16 * panel + j)] = c(lagrange(&xs, j, t), 0.0);
            }
        }
        let p_w = Matrix::from_fn(fine.len(), coarse.len(), |i, j| p[(i, j)] * (fine[i].w / coarse[j].w));
        let inv = lu_solve(&system_matrix(kernel, &fine), &Matrix::identity(fine.len())).unwrap();
        Self { h, two_sided: two, coarse, fine, p, p_w, inv }
    }

    /// `P_Wᵀ (I + K*)⁻¹ P`.
    pub fn r(&self) -> CMatrix {
        self.p_w.transpose().matmul(&self.inv.matmul(&self.p))
    }

    /// `P_f`: `P` with the block of the two innermost coarse panels replaced by
    /// the rank-one map from the coarse to the fine samples of `f`.
    pub fn p_f(&self, rhs: &dyn Rhs) -> CMatrix {
        let inner_cols: Vec<usize> = if self.two_sided { (16..48).collect() } else { (0..16).collect() };
        let inner_rows: Vec<usize> = (0..self.fine.len()).filter(|&i| self.fine[i].local.unwrap().t.abs() < self.h).collect();
        let fc: Vec<C64> = inner_cols.iter().map(|&j| rhs.eval(&self.coarse[j]).unwrap()).collect();
        let ff: Vec<C64> = inner_rows.iter().map(|&i| rhs.eval(&self.fine[i]).unwrap()).collect();
        let nrm2: f64 = fc.iter().map(|z| z.norm_sqr()).sum();
        let mut pf = self.p.clone();
        for (a, &i) in inner_rows.iter().enumerate() {
            for (b, &j) in inner_cols.iter().enumerate() {
                pf[(i, j)] = ff[a] * fc[b].conj() / nrm2;
            }
        }
        pf
    }

    pub fn r_f(&self, rhs: &dyn Rhs) -> CMatrix {
        self.p_w.transpose().matmul(&self.inv.matmul(&self.p_f(rhs)))
    }

    pub fn f_coa(&self, rhs: &dyn Rhs) -> Vec<C64> {
        rhs.eval_all(&self.coarse).unwrap()
    }
}

/// `(k, u(1/2), Q)` for the tabulated Knudsen numbers.
pub const COUETTE_TABLE: [(f64, f64, f64); 13] = [
    (0.003, 4.978915352789726e-01, 1.242445655299167e-01),
    (0.01, 4.930697807742217e-01, 1.225330275292621e-01),
    (0.03, 4.800058682766837e-01, 1.180147037188893e-01),
    (0.1, 4.412246409722424e-01, 1.057028408172292e-01),
    (0.3, 3.672125695500499e-01, 8.560111699820613e-02),
    (1.0, 2.518613399894736e-01, 5.804708735555460e-02),
    (2.0, 1.852462993740218e-01, 4.281659776113918e-02),
    (3.0, 1.504282444992074e-01, 3.489298506190833e-02),
    (5.0, 1.126351880294592e-01, 2.627042060967383e-02),
    (7.0, 9.171689613521428e-02, 2.147460412330841e-02),
    (10.0, 7.292211299328491e-02, 1.714449048590649e-02),
    (30.0, 3.381357342231840e-02, 8.043009085700263e-03),
    (100.0, 1.343072948081874e-02, 3.226757181742397e-03),
];
