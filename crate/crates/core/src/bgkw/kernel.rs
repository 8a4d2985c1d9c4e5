//! The Couette kernel `K(r) = −J_{−1}(r/k)/(k√π)` and its panel quadrature.
//!
//! The kernel is logarithmically singular at `r = 0` and, for small `k`, sharply
//! peaked. Interaction weights between a target and a 16-point panel are built
//! by per-target upsampling: the panel is cut at the point nearest the target,
//! and pieces are laid out outwards so that each is no longer than its distance
//! to the target and short enough to resolve the kernel there. The piece that
//! touches the target uses the split `J_{−1} = S + L log + A |·|` with
//! product-integration weights; all others use plain Gauss–Legendre.

use std::f64::consts::PI;
use std::sync::OnceLock;

use super::abramowitz::{abramowitz, split_table, AbramowitzError};
use crate::quadrature::{gl16, lagrange_matrix, singular_weights, SingularKind, NODES_PER_PANEL};

/// Length, in units of `k`, of the split piece next to the target.
const SPLIT_PIECE: f64 = 2.0;

/// Scaled distance beyond which the kernel is below the double-precision floor.
const CUTOFF: f64 = 150.0;

/// A plain piece at scaled distance `ρ` may be at most this many local kernel scales long.
const RESOLUTION: f64 = 3.0;

/// The Couette kernel for Knudsen number `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouetteKernel {
    k: f64,
    /// `1/(k√π)`
    scale: f64,
}

/// Interaction weights of one target with one panel.
#[derive(Debug, Clone)]
pub struct PanelWeights {
    pub weights: Vec<f64>,
    /// Number of quadrature pieces used.
    pub pieces: usize,
}

fn endpoint_weights(t0: f64) -> &'static (Vec<f64>, Vec<f64>) {
    static LEFT: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static RIGHT: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    let cell = if t0 < 0.0 { &LEFT } else { &RIGHT };
    cell.get_or_init(|| (singular_weights(gl16(), SingularKind::Log, t0), singular_weights(gl16(), SingularKind::Abs, t0)))
}

impl CouetteKernel {
    pub fn new(k: f64) -> Result<Self, AbramowitzError> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(AbramowitzError::Domain { n: -1, x: k });
        }
        Ok(Self { k, scale: 1.0 / (k * PI.sqrt()) })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// `K(r)` for `r > 0`.
    pub fn value(&self, r: f64) -> f64 {
        let rho = r / self.k;
        if rho > CUTOFF {
            return 0.0;
        }
        abramowitz(-1, rho).map_or(f64::NAN, |j| -self.scale * j)
    }

    /// Longest plain piece starting at distance `r > 0` from the target.
    fn max_plain(&self, r: f64) -> f64 {
        let local_scale = self.k * (0.5 * r / self.k).cbrt().max(1.0);
        r.min(RESOLUTION * local_scale)
    }

    /// Weights `ω_j` with `Σ ω_j p(y_j) ≈ ∫_a^b K(|x − y|) p(y) dy` for polynomials `p`
    /// of degree below 16 sampled at the Gauss–Legendre nodes `y_j` of `[a, b]`.
    pub fn panel_weights(&self, x: f64, a: f64, b: f64) -> PanelWeights {
        let rule = gl16();
        let mut ys: Vec<f64> = Vec::new();
        let mut qs: Vec<f64> = Vec::new();
        let mut pieces = 0;
        let c = x.clamp(a, b);
        let d0 = (x - c).abs();
        let split = split_table();
        let ln_k = self.k.ln();
        for (dir, len) in [(-1.0, c - a), (1.0, b - c)] {
            let mut p = 0.0;
            while p < len {
                let r = d0 + p;
                if r / self.k > CUTOFF {
                    break;
                }
                let step = if r == 0.0 { (SPLIT_PIECE * self.k).min(len) } else { self.max_plain(r).min(len - p) };
                let far = if p + step >= len { len } else { p + step };
                let (e1, e2) = (c + dir * p, if far == len { if dir > 0.0 { b } else { a } } else { c + dir * far });
                let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
                let hl = 0.5 * (hi - lo);
                let mid = 0.5 * (hi + lo);
                pieces += 1;
                if r == 0.0 {
                    // the target is the piece endpoint nearest c
                    let t0 = -dir;
                    let (wlog, wabs) = endpoint_weights(t0);
                    let ln_hl = hl.ln();
                    for q in 0..NODES_PER_PANEL {
                        let tau = rule.nodes[q];
                        let dist = hl * (t0 - tau).abs();
                        let rho = dist / self.k;
                        let (s, l, am) = split.parts(rho * rho);
                        let w = rule.weights[q];
                        let v = hl * w * (s - l * ln_k) + l * hl * (wlog[q] + ln_hl * w) + am / self.k * hl * hl * wabs[q];
                        ys.push(mid + hl * tau);
                        qs.push(-self.scale * v);
                    }
                } else {
                    for q in 0..NODES_PER_PANEL {
                        let y = mid + hl * rule.nodes[q];
                        ys.push(y);
                        qs.push(hl * rule.weights[q] * self.value((x - y).abs()));
                    }
                }
                p = far;
            }
        }
        let half = 0.5 * (b - a);
        let centre = 0.5 * (a + b);
        let taus: Vec<f64> = ys.iter().map(|&y| (y - centre) / half).collect();
        let lag = lagrange_matrix(&rule.nodes, &taus);
        let mut weights = vec![0.0; NODES_PER_PANEL];
        for (i, &q) in qs.iter().enumerate() {
            for (j, w) in weights.iter_mut().enumerate() {
                *w += q * lag[(i, j)];
            }
        }
        PanelWeights { weights, pieces }
    }

    /// Interaction matrix `K[i][j] = ∫ K(|x_i − y|) ℓ_j(y) dy` between targets and a
    /// composite panel grid with the given breakpoints.
    pub fn matrix(&self, targets: &[f64], breakpoints: &[f64]) -> crate::RMatrix {
        let npan = breakpoints.len() - 1;
        let mut m = crate::RMatrix::zeros(targets.len(), npan * NODES_PER_PANEL);
        for (i, &x) in targets.iter().enumerate() {
            for p in 0..npan {
                let w = self.panel_weights(x, breakpoints[p], breakpoints[p + 1]).weights;
                for (j, v) in w.into_iter().enumerate() {
                    m[(i, p * NODES_PER_PANEL + j)] = v;
                }
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gl_nodes(a: f64, b: f64) -> Vec<f64> {
        gl16().nodes.iter().map(|&t| 0.5 * (a + b) + 0.5 * (b - a) * t).collect()
    }

    #[test]
    fn whole_line_integral_is_minus_one() {
        // ∫_ℝ J_{−1}(|s|) ds = √π, so K integrates to −1 over a long enough interval.
        let kern = CouetteKernel::new(0.01).unwrap();
        let total: f64 = [(-3.0, -0.2), (-0.2, 0.0), (0.0, 0.5), (0.5, 3.0)]
            .iter()
            .map(|&(a, b)| kern.panel_weights(0.0, a, b).weights.iter().sum::<f64>())
            .sum();
        assert!((total + 1.0).abs() < 1e-13, "{total}");
    }

    #[test]
    fn polynomial_densities_match_composite_reference() {
        let kern = CouetteKernel::new(0.2).unwrap();
        let (a, b) = (0.0, 0.25);
        let ys = gl_nodes(a, b);
        let p = |y: f64| 1.0 + 3.0 * y - 7.0 * y.powi(5);
        for &x in &[0.1, 0.0, 0.25, -0.004, 0.3] {
            let w = kern.panel_weights(x, a, b).weights;
            let got: f64 = w.iter().zip(&ys).map(|(w, &y)| w * p(y)).sum();
            // reference: the same integral cut into many pieces with the target as a breakpoint
            let fine = CouetteKernel::new(0.2).unwrap();
            let mut cuts: Vec<f64> = (0..=64).map(|i| a + (b - a) * i as f64 / 64.0).collect();
            if x > a && x < b {
                cuts.push(x);
            }
            cuts.sort_by(|u, v| u.partial_cmp(v).unwrap());
            let reference: f64 = cuts
                .windows(2)
                .filter(|c| c[1] > c[0])
                .map(|c| {
                    let sub = gl_nodes(c[0], c[1]);
                    let ww = fine.panel_weights(x, c[0], c[1]).weights;
                    ww.iter().zip(&sub).map(|(w, &y)| w * p(y)).sum::<f64>()
                })
                .sum();
            assert!((got - reference).abs() < 1e-13, "x={x}: {got} vs {reference}");
        }
    }

    #[test]
    fn distant_panels_are_skipped() {
        let kern = CouetteKernel::new(0.001).unwrap();
        let pw = kern.panel_weights(0.0, 0.5, 0.75);
        assert_eq!(pw.pieces, 0);
        assert!(pw.weights.iter().all(|&w| w == 0.0));
    }

    #[test]
    fn piece_count_grows_slowly_as_k_shrinks() {
        let counts: Vec<usize> = [0.1, 0.01, 0.001]
            .iter()
            .map(|&k| CouetteKernel::new(k).unwrap().panel_weights(0.1, 0.0, 0.25).pieces)
            .collect();
        assert!(counts.iter().all(|&c| c < 80), "{counts:?}");
    }
}
