//! Contours, coarse panel meshes, and the local type-b / type-c grids around singular points.
//!
//! Near a singular point every quantity is evaluated through the local
//! parameter `t`, the signed parameter distance from the singular point, with
//! the singular point translated to the origin. This keeps node positions on
//! dyadically refined panels accurate to relative precision no matter how small
//! `|t|` becomes.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::quadrature::{gl16, NODES_PER_PANEL};

/// Position and parameter derivatives of a contour point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub z: Complex64,
    pub zp: Complex64,
    pub zpp: Complex64,
}

/// A parameterized curve `s ∈ [0, 1] ↦ z(s)` with marked singular points.
pub trait Contour: Send + Sync {
    /// Point at global parameter `s`.
    fn eval(&self, s: f64) -> Point;

    /// Point at local parameter `t` around singular point `gamma`, translated so
    /// the singular point sits at the origin. Derivatives are taken with respect to `t`.
    ///
    /// For a closed contour `t` may have either sign; for an open-arc endpoint
    /// `t ≥ 0` points into the arc.
    fn eval_local(&self, gamma: usize, t: f64) -> Point;

    /// Parameter values of the singular points.
    fn singular_params(&self) -> Vec<f64>;

    fn is_closed(&self) -> bool;

    /// Position of singular point `gamma`.
    fn singular_point(&self, gamma: usize) -> Complex64 {
        self.eval(self.singular_params()[gamma]).z
    }
}

/// The one-corner family `z(s) = sin(πs)·e^{i(s − 1/2)θ}` with a corner of
/// opening angle `θ` at the origin. For `θ = π` this is a circle of
/// circumference `π` through the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneCorner {
    pub theta: f64,
}

/// Failure constructing geometric objects.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("opening angle must lie in (0, pi], got {0}")]
    BadAngle(f64),
    #[error("{npan} panels are too few: the singular-point neighbourhoods need at least {needed}")]
    TooFewPanels { npan: usize, needed: usize },
    #[error("singular point at s = {0} is not a panel breakpoint")]
    SingularPointOffBreakpoint(f64),
    #[error("panels adjacent to a singular point must have equal parameter length")]
    UnequalStarPanels,
    #[error("level {level} is outside 1..={n_sub}")]
    LevelOutOfRange { level: usize, n_sub: usize },
    #[error("breakpoints must increase strictly from 0 to 1")]
    BadBreakpoints,
}

impl OneCorner {
    pub fn new(theta: f64) -> Result<Self, GeometryError> {
        if !(theta > 0.0 && theta <= PI) {
            return Err(GeometryError::BadAngle(theta));
        }
        Ok(Self { theta })
    }

    /// The circle case `θ = π`.
    pub fn circle() -> Self {
        Self { theta: PI }
    }

    /// Direct evaluation of the parameterization for `0 ≤ s ≤ 1/2`.
    fn eval_direct(&self, s: f64) -> Point {
        let th = self.theta;
        let e = Complex64::from_polar(1.0, (s - 0.5) * th);
        let (sn, cs) = (PI * s).sin_cos();
        let i = Complex64::i();
        Point {
            z: e * sn,
            zp: e * (PI * cs + i * th * sn),
            zpp: e * (-(PI * PI + th * th) * sn + i * 2.0 * th * PI * cs),
        }
    }
}

/// Mirror symmetry `z(1 − u) = conj z(u)` of the one-corner family.
fn mirror(p: Point) -> Point {
    Point { z: p.z.conj(), zp: -p.zp.conj(), zpp: p.zpp.conj() }
}

impl Contour for OneCorner {
    fn eval(&self, s: f64) -> Point {
        if s <= 0.5 {
            self.eval_direct(s)
        } else {
            mirror(self.eval_direct(1.0 - s))
        }
    }

    fn eval_local(&self, _gamma: usize, t: f64) -> Point {
        if t >= 0.0 {
            self.eval_direct(t)
        } else {
            mirror(self.eval_direct(-t))
        }
    }

    fn singular_params(&self) -> Vec<f64> {
        vec![0.0]
    }

    fn is_closed(&self) -> bool {
        true
    }
}

/// The straight open arc from `a` to `b`, singular at both endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Complex64,
    pub b: Complex64,
}

impl Contour for Segment {
    fn eval(&self, s: f64) -> Point {
        let d = self.b - self.a;
        let z = if s <= 0.5 { self.a + d * s } else { self.b - d * (1.0 - s) };
        Point { z, zp: d, zpp: Complex64::new(0.0, 0.0) }
    }

    fn eval_local(&self, gamma: usize, t: f64) -> Point {
        let d = self.b - self.a;
        let dir = if gamma == 0 { d } else { -d };
        Point { z: dir * t, zp: dir, zpp: Complex64::new(0.0, 0.0) }
    }

    fn singular_params(&self) -> Vec<f64> {
        vec![0.0, 1.0]
    }

    fn is_closed(&self) -> bool {
        false
    }
}

/// Where a node sits relative to a singular point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalParam {
    pub gamma: usize,
    pub t: f64,
}

/// A quadrature node on a contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    /// Global parameter (for local grids: wrapped `s_γ + t`).
    pub s: f64,
    /// Local parameter for nodes near a singular point.
    pub local: Option<LocalParam>,
    /// Position; relative to the singular point for nodes of local grids.
    pub z: Complex64,
    pub zp: Complex64,
    pub zpp: Complex64,
    /// Parameter-space quadrature weight.
    pub w: f64,
}

impl Node {
    /// Speed `|z'|`.
    #[inline]
    pub fn speed(&self) -> f64 {
        self.zp.norm()
    }

    /// Arclength quadrature weight `w·|z'|`.
    #[inline]
    pub fn arc_weight(&self) -> f64 {
        self.w * self.speed()
    }

    /// Outward unit normal `−i z'/|z'|` for counterclockwise orientation.
    #[inline]
    pub fn normal(&self) -> Complex64 {
        -Complex64::i() * self.zp / self.speed()
    }
}

/// The panels neighbouring one singular point.
#[derive(Debug, Clone, PartialEq)]
pub struct StarRegion {
    pub gamma: usize,
    pub two_sided: bool,
    /// Panel indices ordered by increasing local parameter.
    pub panels: Vec<usize>,
    /// Coarse node indices ordered by increasing local parameter.
    pub indices: Vec<usize>,
    /// Parameter length of the adjacent panels.
    pub h: f64,
}

/// A composite 16-point Gauss–Legendre discretization of a contour.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub breakpoints: Vec<f64>,
    pub nodes: Vec<Node>,
    pub stars: Vec<StarRegion>,
}

impl Mesh {
    /// `npan` panels of equal parameter length.
    pub fn uniform(contour: &dyn Contour, npan: usize) -> Result<Self, GeometryError> {
        let needed = if contour.is_closed() { 4 * contour.singular_params().len() } else { 4 };
        if npan < needed.max(4) {
            return Err(GeometryError::TooFewPanels { npan, needed: needed.max(4) });
        }
        let bp: Vec<f64> = (0..=npan).map(|j| j as f64 / npan as f64).collect();
        Self::with_breakpoints(contour, &bp)
    }

    /// A mesh on the given breakpoints, which must include every singular point.
    pub fn with_breakpoints(contour: &dyn Contour, breakpoints: &[f64]) -> Result<Self, GeometryError> {
        let npan = breakpoints.len().saturating_sub(1);
        let ok = breakpoints.first() == Some(&0.0)
            && breakpoints.last() == Some(&1.0)
            && breakpoints.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(GeometryError::BadBreakpoints);
        }
        let closed = contour.is_closed();
        let mut stars = Vec::new();
        for (gamma, &sg) in contour.singular_params().iter().enumerate() {
            let k = breakpoints
                .iter()
                .position(|&b| b == sg)
                .ok_or(GeometryError::SingularPointOffBreakpoint(sg))?;
            let (panels, two_sided) = if closed {
                let k = k % npan;
                let at = |d: isize| ((k as isize + d).rem_euclid(npan as isize)) as usize;
                (vec![at(-2), at(-1), at(0), at(1)], true)
            } else if k == 0 {
                (vec![0, 1], false)
            } else if k == npan {
                (vec![npan - 1, npan - 2], false)
            } else {
                return Err(GeometryError::SingularPointOffBreakpoint(sg));
            };
            let lens: Vec<f64> = panels.iter().map(|&p| breakpoints[p + 1] - breakpoints[p]).collect();
            if lens.iter().any(|&l| (l - lens[0]).abs() > 1e-14 * lens[0]) {
                return Err(GeometryError::UnequalStarPanels);
            }
            stars.push(StarRegion { gamma, two_sided, panels, indices: Vec::new(), h: lens[0] });
        }
        let mut seen = vec![false; npan];
        for st in &stars {
            for &p in &st.panels {
                if seen[p] {
                    return Err(GeometryError::TooFewPanels { npan, needed: 4 * stars.len() });
                }
                seen[p] = true;
            }
        }

        let rule = gl16();
        let n = NODES_PER_PANEL;
        let mut nodes = Vec::with_capacity(npan * n);
        for p in 0..npan {
            let (a, b) = (breakpoints[p], breakpoints[p + 1]);
            let star = stars.iter().find(|st| st.panels.contains(&p));
            for j in 0..n {
                let half = 0.5 * (b - a);
                let s = 0.5 * (a + b) + half * rule.nodes[j];
                let w = half * rule.weights[j];
                let node = match star {
                    Some(st) => {
                        let sg = contour.singular_params()[st.gamma];
                        // Signed local parameter computed from the nearer breakpoint.
                        let t = local_offset(sg, a, b, rule.nodes[j], closed);
                        let pt = contour.eval_local(st.gamma, t);
                        let zg = contour.singular_point(st.gamma);
                        Node { s, local: Some(LocalParam { gamma: st.gamma, t }), z: zg + pt.z, zp: pt.zp, zpp: pt.zpp, w }
                    }
                    None => {
                        let pt = contour.eval(s);
                        Node { s, local: None, z: pt.z, zp: pt.zp, zpp: pt.zpp, w }
                    }
                };
                // Local derivatives point along increasing t; for the right end of an
                // open arc this reverses orientation, so store global derivatives.
                let node = if !closed && star.map(|st| st.gamma) == Some(1) {
                    Node { zp: -node.zp, ..node }
                } else {
                    node
                };
                nodes.push(node);
            }
        }
        for st in &mut stars {
            st.indices = st
                .panels
                .iter()
                .flat_map(|&p| {
                    let base = p * n;
                    let fwd: Vec<usize> = (base..base + n).collect();
                    if !closed && st.gamma == 1 {
                        fwd.into_iter().rev().collect::<Vec<_>>()
                    } else {
                        fwd
                    }
                })
                .collect();
        }
        Ok(Self { breakpoints: breakpoints.to_vec(), nodes, stars })
    }

    pub fn npan(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Sum of arclength weights.
    pub fn arclength(&self) -> f64 {
        self.nodes.iter().map(Node::arc_weight).sum()
    }

    /// Panel index of node `i`.
    pub fn panel_of(&self, i: usize) -> usize {
        i / NODES_PER_PANEL
    }

    /// Star region containing node `i`, if any.
    pub fn star_of(&self, i: usize) -> Option<usize> {
        let p = self.panel_of(i);
        self.stars.iter().position(|st| st.panels.contains(&p))
    }
}

/// Local parameter `t` of the node at reference position `x ∈ (−1, 1)` on panel `[a, b]`
/// near the singular point at parameter `sg`.
fn local_offset(sg: f64, a: f64, b: f64, x: f64, closed: bool) -> f64 {
    let half = 0.5 * (b - a);
    if !closed && sg == 1.0 {
        // distance from the right end, increasing inwards
        let (ua, ub) = (1.0 - b, 1.0 - a);
        return 0.5 * (ua + ub) - half * x;
    }
    // Shift the panel by a whole period if it sits on the far side of a closed contour.
    let (mut a, mut b) = (a - sg, b - sg);
    if closed && a >= 0.5 {
        a -= 1.0;
        b -= 1.0;
    }
    0.5 * (a + b) + half * x
}

/// Parameter scale `h_i = h_coarse / 2^(n_sub − i)` of level `i`.
pub fn level_scale(h_coarse: f64, n_sub: usize, level: usize) -> f64 {
    h_coarse * 0.5f64.powi((n_sub - level) as i32)
}

/// Panel breakpoints, in local parameter, of the type-b grid at scale `h`.
pub fn type_b_breakpoints(h: f64, two_sided: bool) -> Vec<f64> {
    if two_sided {
        vec![-2.0 * h, -h, -0.5 * h, 0.0, 0.5 * h, h, 2.0 * h]
    } else {
        vec![0.0, 0.5 * h, h, 2.0 * h]
    }
}

/// Panel breakpoints, in local parameter, of the type-c grid at scale `h`.
pub fn type_c_breakpoints(h: f64, two_sided: bool) -> Vec<f64> {
    if two_sided {
        vec![-2.0 * h, -h, 0.0, h, 2.0 * h]
    } else {
        vec![0.0, h, 2.0 * h]
    }
}

/// Nodes of a local grid with the given local breakpoints, ordered by increasing `t`.
#[derive(Debug, Clone)]
pub struct LocalGrid {
    pub gamma: usize,
    pub h: f64,
    pub two_sided: bool,
    pub breakpoints: Vec<f64>,
    pub nodes: Vec<Node>,
}

impl LocalGrid {
    pub fn new(contour: &dyn Contour, gamma: usize, breakpoints: Vec<f64>, h: f64, two_sided: bool) -> Self {
        let rule = gl16();
        let sg = contour.singular_params()[gamma];
        let mut nodes = Vec::with_capacity((breakpoints.len() - 1) * NODES_PER_PANEL);
        for w2 in breakpoints.windows(2) {
            let (a, b) = (w2[0], w2[1]);
            let half = 0.5 * (b - a);
            for (&x, &wt) in rule.nodes.iter().zip(&rule.weights) {
                let t = 0.5 * (a + b) + half * x;
                let pt = contour.eval_local(gamma, t);
                nodes.push(Node {
                    s: (sg + t).rem_euclid(1.0),
                    local: Some(LocalParam { gamma, t }),
                    z: pt.z,
                    zp: pt.zp,
                    zpp: pt.zpp,
                    w: half * wt,
                });
            }
        }
        Self { gamma, h, two_sided, breakpoints, nodes }
    }

    /// Type-b grid (six panels, or three for an open-arc endpoint) at scale `h`.
    pub fn type_b(contour: &dyn Contour, gamma: usize, h: f64, two_sided: bool) -> Self {
        Self::new(contour, gamma, type_b_breakpoints(h, two_sided), h, two_sided)
    }

    /// Type-c grid (four panels, or two) at scale `h`.
    pub fn type_c(contour: &dyn Contour, gamma: usize, h: f64, two_sided: bool) -> Self {
        Self::new(contour, gamma, type_c_breakpoints(h, two_sided), h, two_sided)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Type-b grid of `level` (1 ≤ level ≤ n_sub) around the singular point at `s = 0` of a
/// closed contour meshed with `npan` equal panels.
pub fn local_type_b_grid(contour: &dyn Contour, level: usize, n_sub: usize, npan: usize) -> Result<LocalGrid, GeometryError> {
    if level == 0 || level > n_sub {
        return Err(GeometryError::LevelOutOfRange { level, n_sub });
    }
    let h = level_scale(1.0 / npan as f64, n_sub, level);
    Ok(LocalGrid::type_b(contour, 0, h, contour.is_closed()))
}
