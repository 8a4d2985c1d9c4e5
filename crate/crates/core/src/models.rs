//! Kernel and right-hand-side models for the Laplace transmission problem,
//! the analytic circle solution, and the star/circ splitting of discretized objects.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::geometry::{Mesh, Node};
use crate::linalg::Matrix;

/// Failure evaluating a model.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("right-hand side evaluated at its singular point")]
    AtSingularPoint,
    #[error("no solution exists for alpha = 1 or lambda = 1")]
    NoSolution,
    #[error("right-hand side evaluation failed: {0}")]
    Evaluation(String),
}

/// A kernel discretized by the plain Nyström rule on panels.
pub trait Kernel: Send + Sync {
    /// Matrix entry for distinct target and source nodes, source quadrature weight included.
    fn entry(&self, target: &Node, source: &Node) -> Complex64;
    /// Matrix entry for coincident nodes.
    fn diagonal(&self, node: &Node) -> Complex64;
    /// True if the kernel is invariant under dilation about a wedge apex, as
    /// required by the fixed-point initializers.
    fn scale_invariant(&self) -> bool;
}

/// The operator `K ρ(r) = 2λ ∫ ∂G/∂ν_r (r, r′) ρ(r′) dℓ′` with `G = −log|r − r′|/(2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceDlp {
    pub lambda: Complex64,
}

impl LaplaceDlp {
    pub fn new(lambda: Complex64) -> Self {
        Self { lambda }
    }
}

impl Kernel for LaplaceDlp {
    #[inline]
    fn entry(&self, target: &Node, source: &Node) -> Complex64 {
        // Divide by |d| twice so that tiny separations do not underflow |d|².
        let d = source.z - target.z;
        let r = d.norm();
        let g = (target.normal() * (d.conj() / r)).re / r;
        self.lambda * (g * source.arc_weight() / PI)
    }

    #[inline]
    fn diagonal(&self, node: &Node) -> Complex64 {
        self.lambda * (-(node.zpp / node.zp).im * node.w / (2.0 * PI))
    }

    fn scale_invariant(&self) -> bool {
        true
    }
}

/// Nyström matrix `K` on one node set (diagonal from the kernel's coincident limit).
pub fn nystrom_matrix(kernel: &dyn Kernel, nodes: &[Node]) -> Matrix<Complex64> {
    Matrix::from_fn(nodes.len(), nodes.len(), |i, j| {
        if i == j {
            kernel.diagonal(&nodes[i])
        } else {
            kernel.entry(&nodes[i], &nodes[j])
        }
    })
}

/// `I + K` on one node set.
pub fn system_matrix(kernel: &dyn Kernel, nodes: &[Node]) -> Matrix<Complex64> {
    let mut m = nystrom_matrix(kernel, nodes);
    for i in 0..nodes.len() {
        m[(i, i)] += 1.0;
    }
    m
}

/// A right-hand side that may be singular at the singular points.
pub trait Rhs: Send + Sync {
    /// Value at a node; nodes near a singular point are evaluated through their local parameter.
    fn eval(&self, node: &Node) -> Result<Complex64, ModelError>;
    /// The leading singular term, homogeneous under dilation about the singular point,
    /// used by the fixed-point initializers. `None` if the model has no such term.
    fn leading(&self, node: &Node) -> Option<Complex64>;

    /// Values at all nodes.
    fn eval_all(&self, nodes: &[Node]) -> Result<Vec<Complex64>, ModelError> {
        nodes.iter().map(|n| self.eval(n)).collect()
    }
}

/// Real power with complex exponent: `x^p` for `x > 0`.
#[inline]
pub fn rpow(x: f64, p: Complex64) -> Complex64 {
    (p * x.ln()).exp()
}

/// `f = ℓ^{−α} + (π − ℓ)^{−α}` on the circle of circumference `π`, with `ℓ`
/// the counterclockwise arclength from the singular point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhsCircle {
    pub alpha: Complex64,
}

impl RhsCircle {
    /// Value at arclength fraction `u = ℓ/π ∈ (0, 1)`.
    pub fn at_fraction(&self, u: f64) -> Result<Complex64, ModelError> {
        if !(u > 0.0 && u < 1.0) {
            return Err(ModelError::AtSingularPoint);
        }
        Ok(rpow(PI * u, -self.alpha) + rpow(PI * (1.0 - u), -self.alpha))
    }
}

impl Rhs for RhsCircle {
    fn eval(&self, node: &Node) -> Result<Complex64, ModelError> {
        match node.local {
            // symmetric in ℓ ↔ π − ℓ, so only |t| matters
            Some(lp) => self.at_fraction(lp.t.abs()),
            None => self.at_fraction(node.s),
        }
    }

    fn leading(&self, node: &Node) -> Option<Complex64> {
        Some(rpow(node.z.norm(), -self.alpha))
    }
}

/// `f = |r|^{−α} + log|r|` with the singular point at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhsOneCorner {
    pub alpha: Complex64,
}

impl Rhs for RhsOneCorner {
    fn eval(&self, node: &Node) -> Result<Complex64, ModelError> {
        let r = node.z.norm();
        if r == 0.0 {
            return Err(ModelError::AtSingularPoint);
        }
        Ok(rpow(r, -self.alpha) + r.ln())
    }

    fn leading(&self, node: &Node) -> Option<Complex64> {
        Some(rpow(node.z.norm(), -self.alpha))
    }
}

fn circle_denominator(alpha: Complex64, lambda: Complex64) -> Result<Complex64, ModelError> {
    let d = (1.0 - alpha) * (1.0 - lambda);
    if d.norm() == 0.0 {
        Err(ModelError::NoSolution)
    } else {
        Ok(d)
    }
}

/// The constant `ρ − f = 2λπ^{−α}/((1 − α)(1 − λ))` of the exact circle solution.
pub fn circle_exact_shift(alpha: Complex64, lambda: Complex64) -> Result<Complex64, ModelError> {
    Ok(2.0 * lambda * rpow(PI, -alpha) / circle_denominator(alpha, lambda)?)
}

/// Exact density of the circle problem at a node.
pub fn circle_exact_rho(alpha: Complex64, lambda: Complex64, node: &Node) -> Result<Complex64, ModelError> {
    Ok(RhsCircle { alpha }.eval(node)? + circle_exact_shift(alpha, lambda)?)
}

/// Exact value of `q = ∫ ρ dℓ` for the circle problem.
pub fn circle_exact_q(alpha: Complex64, lambda: Complex64) -> Result<Complex64, ModelError> {
    Ok(2.0 * rpow(PI, 1.0 - alpha) / circle_denominator(alpha, lambda)?)
}

/// Splits a coarse-grid matrix into the part coupling nodes within the same
/// singular-point neighbourhood (`K*`) and the remainder (`K°`).
pub fn split_matrix(k: &Matrix<Complex64>, mesh: &Mesh) -> (Matrix<Complex64>, Matrix<Complex64>) {
    let region: Vec<Option<usize>> = (0..mesh.len()).map(|i| mesh.star_of(i)).collect();
    let mut star = Matrix::zeros(k.rows(), k.cols());
    let mut circ = k.clone();
    for i in 0..k.rows() {
        for j in 0..k.cols() {
            if region[i].is_some() && region[i] == region[j] {
                star[(i, j)] = k[(i, j)];
                circ[(i, j)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    (star, circ)
}

/// Splits a coarse-grid vector into its values on the singular-point neighbourhoods (`f*`) and elsewhere (`f°`).
pub fn split_vector(f: &[Complex64], mesh: &Mesh) -> (Vec<Complex64>, Vec<Complex64>) {
    let zero = Complex64::new(0.0, 0.0);
    let mut star = vec![zero; f.len()];
    let mut circ = f.to_vec();
    for (i, &v) in f.iter().enumerate() {
        if mesh.star_of(i).is_some() {
            star[i] = v;
            circ[i] = zero;
        }
    }
    (star, circ)
}
