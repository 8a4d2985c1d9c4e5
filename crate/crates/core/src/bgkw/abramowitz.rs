//! Abramowitz functions `J_n(x) = ∫₀^∞ tⁿ e^{−t² − x/t} dt` for `n ∈ {−1, 0, 1}`.
//!
//! Small arguments use the convergent expansion `J_n(x) = P(x) + log(x)·Q(x)`,
//! whose coefficients are the residues of the Mellin transform
//! `Γ(s) Γ((s + n + 1)/2) / 2`. Larger arguments use the trapezoidal rule in
//! `u = log(t/t*)` with `t* = (x/2)^{1/3}` at the saddle point, which converges
//! geometrically since the integrand decays doubly exponentially in `u`.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Euler–Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Arguments up to this value use the series.
pub const SERIES_LIMIT: f64 = 1.0;

/// Largest scaled distance accepted by [`j_minus1_split`].
pub const SPLIT_RADIUS: f64 = 4.0;

const TERMS: usize = 48;

/// Failure evaluating an Abramowitz function.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AbramowitzError {
    #[error("order {0} is not supported (only -1, 0, 1)")]
    Order(i32),
    #[error("argument {x} is outside the domain of J_{n}")]
    Domain { n: i32, x: f64 },
    #[error("|s| = {0} exceeds the split radius")]
    OutsideSplit(f64),
}

/// `Γ(k/2)` for an integer `k` that is not a non-positive even number.
fn gamma_half(k: i64) -> f64 {
    let (mut g, mut z) = if k.rem_euclid(2) == 0 { (1.0, 2i64) } else { (PI.sqrt(), 1i64) };
    // Γ(z/2) with z = 2 (Γ(1)) or z = 1 (Γ(1/2)); step by Γ(w + 1) = w Γ(w).
    while z < k {
        g *= z as f64 / 2.0;
        z += 2;
    }
    while z > k {
        z -= 2;
        g /= z as f64 / 2.0;
    }
    g
}

fn digamma_int(m: usize) -> f64 {
    // ψ(m) for a positive integer m
    -EULER_GAMMA + (1..m).map(|j| 1.0 / j as f64).sum::<f64>()
}

/// Series coefficients: `J_n(x) = Σ p_m x^m + log(x) Σ q_m x^m`.
#[derive(Debug, Clone)]
pub struct Series {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl Series {
    fn new(n: i32) -> Self {
        let mut p = vec![0.0; TERMS];
        let mut q = vec![0.0; TERMS];
        let mut fact = 1.0;
        for m in 0..TERMS {
            if m > 0 {
                fact *= m as f64;
            }
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let shift = m as i64 - (n as i64 + 1);
            if shift >= 0 && shift % 2 == 0 {
                let j = (shift / 2) as usize;
                let jfact: f64 = (1..=j).map(|i| i as f64).product();
                let s = sign * if j % 2 == 0 { 1.0 } else { -1.0 } / (fact * jfact);
                p[m] = 0.5 * s * (digamma_int(j + 1) + 2.0 * digamma_int(m + 1));
                q[m] = -s;
            } else {
                p[m] = 0.5 * sign / fact * gamma_half(n as i64 + 1 - m as i64);
            }
        }
        Self { p, q }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let horner = |c: &[f64]| c.iter().rev().fold(0.0, |acc, &v| acc * x + v);
        let lq = if self.q.iter().any(|&v| v != 0.0) { x.ln() * horner(&self.q) } else { 0.0 };
        horner(&self.p) + lq
    }
}

fn series(n: i32) -> &'static Series {
    static CACHE: [OnceLock<Series>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    CACHE[(n + 1) as usize].get_or_init(|| Series::new(n))
}

/// The trapezoidal route, valid for any `x > 0` but used above [`SERIES_LIMIT`].
pub fn abramowitz_trapezoid(n: i32, x: f64) -> f64 {
    let ts = (0.5 * x).cbrt();
    let c = x / ts;
    let f = |u: f64| {
        let t = ts * u.exp();
        (ts * u.exp()).powi(n + 1) * (-t * t - c * (-u).exp()).exp()
    };
    // width of the peak in u is about 1/(√6 t*)
    let step = (0.25 / (6f64.sqrt() * ts)).min(0.125);
    let mut sum = f(0.0);
    for dir in [1.0, -1.0] {
        let mut k = 1.0;
        loop {
            let v = f(dir * k * step);
            sum += v;
            if v < 1e-20 * sum && k * step > 1.0 {
                break;
            }
            k += 1.0;
        }
    }
    sum * step
}

/// `J_n(x)` for `n ∈ {−1, 0, 1}`; `x > 0` for `n = −1`, `x ≥ 0` otherwise.
pub fn abramowitz(n: i32, x: f64) -> Result<f64, AbramowitzError> {
    if !(-1..=1).contains(&n) {
        return Err(AbramowitzError::Order(n));
    }
    if !(x >= 0.0) || x.is_infinite() || (n == -1 && x == 0.0) {
        return Err(AbramowitzError::Domain { n, x });
    }
    if x == 0.0 {
        return Ok(series(n).p[0]);
    }
    Ok(if x <= SERIES_LIMIT { series(n).eval(x) } else { abramowitz_trapezoid(n, x) })
}

/// `J_{−1}(|s|) = S(s) + L(s) log|s| + A(s) |s|` with `S`, `L`, `A` even power series.
#[derive(Debug, Clone)]
pub struct Split {
    /// Coefficients of `S`, `L`, `A` in powers of `s²`.
    pub s: Vec<f64>,
    pub l: Vec<f64>,
    pub a: Vec<f64>,
}

impl Split {
    fn new() -> Self {
        let ser = series(-1);
        let s = ser.p.iter().step_by(2).copied().collect();
        let a = ser.p.iter().skip(1).step_by(2).copied().collect();
        let l = ser.q.iter().step_by(2).copied().collect();
        Self { s, l, a }
    }

    /// `(S, L, A)` at a point with `s² = s2`.
    #[inline]
    pub fn parts(&self, s2: f64) -> (f64, f64, f64) {
        let horner = |c: &[f64]| c.iter().rev().fold(0.0, |acc, &v| acc * s2 + v);
        (horner(&self.s), horner(&self.l), horner(&self.a))
    }
}

/// Shared coefficient tables of the `J_{−1}` split.
pub fn split_table() -> &'static Split {
    static TABLE: OnceLock<Split> = OnceLock::new();
    TABLE.get_or_init(Split::new)
}

/// The smooth, logarithmic, and absolute-value parts of `J_{−1}(|s|)`.
pub fn j_minus1_split(s: f64) -> Result<(f64, f64, f64), AbramowitzError> {
    if !(s.abs() <= SPLIT_RADIUS) {
        return Err(AbramowitzError::OutsideSplit(s.abs()));
    }
    Ok(split_table().parts(s * s))
}
