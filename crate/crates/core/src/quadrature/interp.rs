//! Barycentric Lagrange interpolation and the level-independent prolongation operators.

use crate::linalg::{IndexSets, Matrix};
use crate::scalar::Real;

use super::gauss::GaussLegendre;

/// Matrix `L` with `L[i][j] = ℓ_j(points[i])`, the Lagrange basis on `nodes` evaluated at `points`.
///
/// Uses the barycentric form; a point that coincides with a node yields a unit row.
pub fn lagrange_matrix<T: Real>(nodes: &[T], points: &[T]) -> Matrix<T> {
    let n = nodes.len();
    let bary: Vec<T> = (0..n)
        .map(|j| {
            let prod = (0..n).filter(|&k| k != j).fold(T::one(), |p, k| p * (nodes[j] - nodes[k]));
            prod.recip()
        })
        .collect();
    let mut m = Matrix::zeros(points.len(), n);
    for (i, &x) in points.iter().enumerate() {
        if let Some(j) = nodes.iter().position(|&t| t == x) {
            m[(i, j)] = T::one();
            continue;
        }
        let terms: Vec<T> = (0..n).map(|j| bary[j] / (x - nodes[j])).collect();
        let denom = terms.iter().fold(T::zero(), |s, &v| s + v);
        for j in 0..n {
            m[(i, j)] = terms[j] / denom;
        }
    }
    m
}

/// Interpolation from one panel's nodes onto the nodes of its two halves,
/// together with its weighted counterpart.
///
/// Returns `(IP, IPW)` of size `2n × n`, where `IPW[i][j] = IP[i][j]·w_half[i]/w[j]`
/// so that `IPWᵀ·IP = I` by exactness of the rule.
pub fn half_panel_interpolation<T: Real>(rule: &GaussLegendre<T>) -> (Matrix<T>, Matrix<T>) {
    let half = T::lit(0.5);
    let fine: Vec<T> = rule
        .nodes
        .iter()
        .map(|&t| (t - T::one()) * half)
        .chain(rule.nodes.iter().map(|&t| (t + T::one()) * half))
        .collect();
    let fine_w: Vec<T> = rule.weights.iter().chain(&rule.weights).map(|&w| w * half).collect();
    let ip = lagrange_matrix(&rule.nodes, &fine);
    let ipw = Matrix::from_fn(ip.rows(), ip.cols(), |i, j| ip[(i, j)] * fine_w[i] / rule.weights[j]);
    (ip, ipw)
}

/// Level-independent prolongation from a type-c grid to a type-b grid.
///
/// For an interior singular point the c-grid has four panels and the b-grid
/// six, with the two central c-panels bisected; `P_bc = diag(I, IP, IP, I)`.
/// For an open-arc endpoint the innermost c-panel is bisected: `P_bc = diag(IP, I)`.
#[derive(Debug, Clone)]
pub struct Prolongation<T> {
    pub p_bc: Matrix<T>,
    pub p_wbc: Matrix<T>,
    pub idx: IndexSets,
}

impl<T: Real> Prolongation<T> {
    pub fn new(rule: &GaussLegendre<T>, two_sided: bool) -> Self {
        let n = rule.len();
        let (ip, ipw) = half_panel_interpolation(rule);
        let eye = Matrix::<T>::identity(n);
        let idx = IndexSets::for_sides(two_sided);
        let (nb, nc) = if two_sided { (6 * n, 4 * n) } else { (3 * n, 2 * n) };
        let mut p_bc = Matrix::zeros(nb, nc);
        let mut p_wbc = Matrix::zeros(nb, nc);
        if two_sided {
            for m in [&mut p_bc, &mut p_wbc] {
                m.set_block(0, 0, &eye);
                m.set_block(5 * n, 3 * n, &eye);
            }
            p_bc.set_block(n, n, &ip);
            p_bc.set_block(3 * n, 2 * n, &ip);
            p_wbc.set_block(n, n, &ipw);
            p_wbc.set_block(3 * n, 2 * n, &ipw);
        } else {
            p_bc.set_block(0, 0, &ip);
            p_wbc.set_block(0, 0, &ipw);
            p_bc.set_block(2 * n, n, &eye);
            p_wbc.set_block(2 * n, n, &eye);
        }
        Self { p_bc, p_wbc, idx }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gl16;

    #[test]
    fn lagrange_reproduces_polynomials() {
        let rule = gl16();
        let pts: Vec<f64> = (0..11).map(|i| -1.0 + 0.2 * i as f64).collect();
        let l = lagrange_matrix(&rule.nodes, &pts);
        let p = |x: f64| 3.0 * x.powi(15) - x.powi(7) + 0.5;
        let vals: Vec<f64> = rule.nodes.iter().map(|&x| p(x)).collect();
        for (i, &x) in pts.iter().enumerate() {
            let v: f64 = l.row(i).iter().zip(&vals).map(|(a, b)| a * b).sum();
            assert!((v - p(x)).abs() < 1e-13, "x={x}: {v} vs {}", p(x));
        }
    }

    #[test]
    fn weighted_pairing_is_identity() {
        let rule = gl16();
        for two_sided in [true, false] {
            let p = Prolongation::new(rule, two_sided);
            let pair = p.p_wbc.transpose().matmul(&p.p_bc);
            let eye = Matrix::identity(pair.rows());
            assert!((&pair - &eye).max_abs() < 1e-13);
            let ones = vec![1.0; p.p_bc.cols()];
            assert!(p.p_bc.matvec(&ones).iter().all(|&v| (v - 1.0).abs() < 1e-14));
        }
    }
}
