//! Product integration against `log|t − t0|` and `|t − t0|` on the reference panel.
//!
//! For a degree-`n−1` polynomial `p` sampled at the `n` Gauss–Legendre nodes,
//! `∫₋₁¹ p(t) σ(t − t0) dt = Σ_j ω_j p(t_j)` exactly, where the weights come
//! from the Legendre moments `M_k = ∫₋₁¹ P_k(t) σ(t − t0) dt`.

use super::gauss::{legendre_values, GaussLegendre};

/// Which singular factor the moments are taken against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularKind {
    /// `log|t − t0|`
    Log,
    /// `|t − t0|`
    Abs,
}

fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.abs().ln()
    }
}

/// `∫₋₁¹ P_k(t) log|t − t0| dt` for `k = 0..=nmax`.
pub fn log_moments(t0: f64, nmax: usize) -> Vec<f64> {
    let mut m = Vec::with_capacity(nmax + 1);
    m.push(xlogx(1.0 - t0) + xlogx(1.0 + t0) - 2.0);
    if nmax == 0 {
        return m;
    }
    let a = t0.abs();
    if a == 1.0 {
        for k in 1..=nmax {
            let kf = k as f64;
            let end = -2.0 / (kf * (kf + 1.0));
            m.push(if t0 < 0.0 && k % 2 == 1 { -end } else { end });
        }
        return m;
    }
    if a > 1.0 {
        return graded_log_moments(t0, nmax, m);
    }
    let q = legendre_q(t0, nmax + 1);
    for k in 1..=nmax {
        m.push(2.0 * (q[k + 1] - q[k - 1]) / (2.0 * k as f64 + 1.0));
    }
    m
}

/// Log moments for a target outside the panel, by composite Gauss–Legendre
/// on pieces graded geometrically towards the nearer endpoint so that every
/// piece is at least as far from `t0` as it is long.
fn graded_log_moments(t0: f64, nmax: usize, mut m: Vec<f64>) -> Vec<f64> {
    let rule = GaussLegendre::<f64>::new(24);
    let gap = t0.abs() - 1.0;
    let mut cuts = vec![0.0];
    let mut len = 1.0;
    while len > gap && len > 1e-300 {
        len *= 0.5;
        cuts.push(1.0 - len);
    }
    cuts.push(1.0);
    let mut acc = vec![0.0; nmax + 1];
    for w in cuts.windows(2).rev().chain(std::iter::once(&[-1.0, 0.0][..])) {
        let (lo, hi) = (w[0], w[1]);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (&x, &wt) in rule.nodes.iter().zip(&rule.weights) {
            // Work on the side facing t0 so the grading points the right way.
            let t = (mid + half * x) * t0.signum();
            let lg = (t - t0).abs().ln() * wt * half;
            let p = legendre_values(nmax, t);
            for k in 1..=nmax {
                acc[k] += p[k] * lg;
            }
        }
    }
    m.extend_from_slice(&acc[1..]);
    m
}

/// Legendre functions of the second kind `Q_0..=Q_nmax` for `|x| < 1`, by the
/// forward recurrence (stable inside the interval).
fn legendre_q(x: f64, nmax: usize) -> Vec<f64> {
    let q0 = 0.5 * ((1.0 + x) / (1.0 - x)).ln();
    let mut q = vec![0.0; nmax + 1];
    q[0] = q0;
    if nmax >= 1 {
        q[1] = x * q0 - 1.0;
    }
    for k in 1..nmax {
        let kf = k as f64;
        q[k + 1] = ((2.0 * kf + 1.0) * x * q[k] - kf * q[k - 1]) / (kf + 1.0);
    }
    q
}

/// `∫₋₁¹ P_k(t) |t − t0| dt` for `k = 0..=nmax`.
pub fn abs_moments(t0: f64, nmax: usize) -> Vec<f64> {
    let mut m = vec![0.0; nmax + 1];
    if t0.abs() >= 1.0 {
        m[0] = 2.0 * t0.abs();
        if nmax >= 1 {
            m[1] = -t0.signum() * 2.0 / 3.0;
        }
        return m;
    }
    // |t − t0| = (t − t0) − 2·min(t − t0, 0); the second part integrates P_k twice from −1.
    let p = legendre_values(nmax + 2, t0);
    m[0] = 1.0 + t0 * t0;
    if nmax >= 1 {
        m[1] = 2.0 / 3.0 + (t0.powi(3) / 3.0 - t0 - 2.0 / 3.0);
    }
    for k in 2..=nmax {
        let kf = k as f64;
        let f2 = ((p[k + 2] - p[k]) / (2.0 * kf + 3.0) - (p[k] - p[k - 2]) / (2.0 * kf - 1.0)) / (2.0 * kf + 1.0);
        m[k] = 2.0 * f2;
    }
    m
}

/// Weights `ω_j` with `Σ_j ω_j p(t_j) = Σ_k c_k M_k`, where `c_k` are the Legendre
/// coefficients of the interpolant of `p` on the rule's nodes.
pub fn product_weights(rule: &GaussLegendre<f64>, moments: &[f64]) -> Vec<f64> {
    let nmax = moments.len() - 1;
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&t, &w)| {
            let p = legendre_values(nmax, t);
            w * (0..=nmax).map(|k| (k as f64 + 0.5) * p[k] * moments[k]).sum::<f64>()
        })
        .collect()
}

/// Product-integration weights on the reference panel for a target at `t0`.
pub fn singular_weights(rule: &GaussLegendre<f64>, kind: SingularKind, t0: f64) -> Vec<f64> {
    let nmax = rule.len() - 1;
    let m = match kind {
        SingularKind::Log => log_moments(t0, nmax),
        SingularKind::Abs => abs_moments(t0, nmax),
    };
    product_weights(rule, &m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gl16;

    /// Composite Gauss–Legendre with the singular point as a breakpoint.
    fn split_quad(t0: f64, f: impl Fn(f64) -> f64) -> f64 {
        let rule = GaussLegendre::<f64>::new(40);
        let c = t0.clamp(-1.0, 1.0);
        let mut cuts = vec![-1.0, c];
        for j in 1..40 {
            let d = 2f64.powi(-j);
            for x in [c - d, c + d] {
                if x > -1.0 && x < 1.0 {
                    cuts.push(x);
                }
            }
        }
        cuts.push(1.0);
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();
        cuts.windows(2).map(|w| rule.integrate(w[0], w[1], &f)).sum()
    }

    #[test]
    fn constant_density_reference_values() {
        let rule = gl16();
        let wl = singular_weights(rule, SingularKind::Log, 0.0);
        assert!((wl.iter().sum::<f64>() + 2.0).abs() < 1e-14);
        let wa = singular_weights(rule, SingularKind::Abs, 0.0);
        assert!((wa.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn moments_match_graded_quadrature() {
        for &t0 in &[0.3, -0.77, 0.999, 1.0, -1.0, 1.05, -1.4, 2.5, 1.0 + 1e-9] {
            let lm = log_moments(t0, 15);
            let am = abs_moments(t0, 15);
            for k in 0..=15 {
                let pk = |t: f64| legendre_values(k, t)[k];
                let lref = split_quad(t0, |t| pk(t) * (t - t0).abs().ln());
                let aref = split_quad(t0, |t| pk(t) * (t - t0).abs());
                assert!((lm[k] - lref).abs() < 1e-13, "log t0={t0} k={k}: {} vs {lref}", lm[k]);
                assert!((am[k] - aref).abs() < 1e-13, "abs t0={t0} k={k}: {} vs {aref}", am[k]);
            }
        }
    }

    #[test]
    fn weights_integrate_quadratic_against_log() {
        let rule = gl16();
        let w = singular_weights(rule, SingularKind::Log, 0.3);
        let got: f64 = rule.nodes.iter().zip(&w).map(|(t, w)| t * t * w).sum();
        let reference = split_quad(0.3, |t| t * t * (t - 0.3f64).abs().ln());
        assert!((got - reference).abs() < 1e-13);
    }
}
