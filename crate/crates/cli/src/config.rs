//! Flat `key = value` experiment configuration.

use std::collections::HashMap;
use std::path::PathBuf;

use num_complex::Complex64;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    Duplicate { line: usize, key: String },
    #[error("invalid value for `{key}`: {msg}")]
    Value { key: &'static str, msg: String },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("key `{key}` does not apply to problem `{problem}`")]
    NotApplicable { key: &'static str, problem: &'static str },
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
}

const KEYS: [&str; 11] = ["problem", "alpha", "lambda", "theta", "npan", "n_sub", "initializer", "k", "solver", "reference", "out"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    LaplaceCircle,
    LaplaceCorner,
    Bgkw,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Self::LaplaceCircle => "laplace-circle",
            Self::LaplaceCorner => "laplace-corner",
            Self::Bgkw => "bgkw",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Init {
    Plain,
    FixedPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    Dense,
    Gmres,
}

/// A validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: Problem,
    pub alpha: Complex64,
    pub lambda: Complex64,
    pub theta: f64,
    pub npan: usize,
    pub n_sub: Vec<usize>,
    pub init: Init,
    pub k: Vec<f64>,
    pub solver: Solver,
    /// Reference value of `q` for the convergence sweep; computed when absent.
    pub reference: Option<Complex64>,
    pub out: Option<PathBuf>,
}

fn parse_f64(key: &'static str, s: &str) -> Result<f64, ConfigError> {
    let v: f64 = s.trim().parse().map_err(|_| ConfigError::Value { key, msg: format!("`{s}` is not a decimal number") })?;
    if !v.is_finite() {
        return Err(ConfigError::Value { key, msg: format!("`{s}` is not finite") });
    }
    Ok(v)
}

/// `re` or `re,im`.
fn parse_complex(key: &'static str, s: &str) -> Result<Complex64, ConfigError> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [re] => Ok(Complex64::new(parse_f64(key, re)?, 0.0)),
        [re, im] => Ok(Complex64::new(parse_f64(key, re)?, parse_f64(key, im)?)),
        _ => Err(ConfigError::Value { key, msg: "expected `re` or `re,im`".into() }),
    }
}

fn parse_usize(key: &'static str, s: &str) -> Result<usize, ConfigError> {
    s.trim().parse().map_err(|_| ConfigError::Value { key, msg: format!("`{}` is not a non-negative integer", s.trim()) })
}

/// A comma list whose items are integers or inclusive ranges `first:last:step`.
fn parse_usize_list(key: &'static str, s: &str) -> Result<Vec<usize>, ConfigError> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let r: Vec<&str> = item.split(':').collect();
        match r.as_slice() {
            [v] => out.push(parse_usize(key, v)?),
            [a, b, step] => {
                let (a, b, step) = (parse_usize(key, a)?, parse_usize(key, b)?, parse_usize(key, step)?);
                if step == 0 || b < a {
                    return Err(ConfigError::Value { key, msg: format!("bad range `{item}`") });
                }
                out.extend((a..=b).step_by(step));
            }
            _ => return Err(ConfigError::Value { key, msg: format!("bad item `{item}`") }),
        }
    }
    Ok(out)
}

impl ExperimentConfig {
    pub fn from_file(path: &std::path::Path) -> Result<Self, ConfigError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut kv: HashMap<&'static str, String> = HashMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (k, v) = body.split_once('=').ok_or(ConfigError::Syntax { line })?;
            let k = k.trim();
            let key = *KEYS.iter().find(|&&x| x == k).ok_or_else(|| ConfigError::UnknownKey { line, key: k.to_string() })?;
            if kv.insert(key, v.trim().to_string()).is_some() {
                return Err(ConfigError::Duplicate { line, key: k.to_string() });
            }
        }
        let problem = match kv.get("problem").map(String::as_str) {
            Some("laplace-circle") => Problem::LaplaceCircle,
            Some("laplace-corner") => Problem::LaplaceCorner,
            Some("bgkw") => Problem::Bgkw,
            Some(other) => return Err(ConfigError::Value { key: "problem", msg: format!("unknown problem `{other}`") }),
            None => return Err(ConfigError::Missing("problem")),
        };
        let laplace_only = ["alpha", "lambda", "initializer", "reference"];
        let allowed: &[&str] = match problem {
            Problem::LaplaceCircle => &["theta", "k"],
            Problem::LaplaceCorner => &["k"],
            Problem::Bgkw => &["theta"],
        };
        for &key in KEYS.iter().filter(|k| allowed.contains(k) || (problem == Problem::Bgkw && laplace_only.contains(k))) {
            if kv.contains_key(key) {
                return Err(ConfigError::NotApplicable { key, problem: problem.name() });
            }
        }
        let get = |key: &'static str| kv.get(key).map(String::as_str);

        let alpha = get("alpha").map(|s| parse_complex("alpha", s)).transpose()?;
        let lambda = get("lambda").map(|s| parse_complex("lambda", s)).transpose()?;
        let theta = get("theta").map(|s| parse_f64("theta", s)).transpose()?;
        let npan = get("npan").map(|s| parse_usize("npan", s)).transpose()?;
        let n_sub = get("n_sub").map(|s| parse_usize_list("n_sub", s)).transpose()?;
        let init = match get("initializer") {
            None | Some("plain") => Init::Plain,
            Some("fixed-point") => Init::FixedPoint,
            Some(o) => return Err(ConfigError::Value { key: "initializer", msg: format!("expected plain or fixed-point, got `{o}`") }),
        };
        let solver = match get("solver") {
            None | Some("gmres") => Solver::Gmres,
            Some("dense") => Solver::Dense,
            Some(o) => return Err(ConfigError::Value { key: "solver", msg: format!("expected dense or gmres, got `{o}`") }),
        };
        let k = match get("k") {
            Some(s) => s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(|t| parse_f64("k", t)).collect::<Result<Vec<_>, _>>()?,
            None => Vec::new(),
        };
        let reference = get("reference").map(|s| parse_complex("reference", s)).transpose()?;
        let out = get("out").map(PathBuf::from);

        let cfg = match problem {
            Problem::Bgkw => {
                if k.is_empty() {
                    return Err(ConfigError::Missing("k"));
                }
                if let Some(bad) = k.iter().find(|&&v| v <= 0.0) {
                    return Err(ConfigError::Value { key: "k", msg: format!("Knudsen numbers must be positive, got {bad}") });
                }
                let n_sub = n_sub.unwrap_or_else(|| vec![41]);
                if n_sub.len() != 1 {
                    return Err(ConfigError::Value { key: "n_sub", msg: "a single value is expected for bgkw".into() });
                }
                if npan.is_some_and(|n| n < 4 || n % 2 == 1) {
                    return Err(ConfigError::Value { key: "npan", msg: "an even number of at least 4 panels is needed".into() });
                }
                Self {
                    problem,
                    alpha: Complex64::new(0.0, 0.0),
                    lambda: Complex64::new(0.0, 0.0),
                    theta: 0.0,
                    npan: npan.unwrap_or(4),
                    n_sub,
                    init,
                    k,
                    solver,
                    reference,
                    out,
                }
            }
            _ => {
                let n_sub = n_sub.ok_or(ConfigError::Missing("n_sub"))?;
                if n_sub.is_empty() {
                    return Err(ConfigError::Value { key: "n_sub", msg: "the sweep list is empty".into() });
                }
                if n_sub.contains(&0) {
                    return Err(ConfigError::Value { key: "n_sub", msg: "levels must be at least 1".into() });
                }
                let theta = match problem {
                    Problem::LaplaceCorner => theta.ok_or(ConfigError::Missing("theta"))?,
                    _ => std::f64::consts::PI,
                };
                if !(theta > 0.0 && theta <= std::f64::consts::PI) {
                    return Err(ConfigError::Value { key: "theta", msg: format!("opening angle {theta} is outside (0, pi]") });
                }
                if npan.is_some_and(|n| n < 4) {
                    return Err(ConfigError::Value { key: "npan", msg: "at least 4 panels are needed".into() });
                }
                Self {
                    problem,
                    alpha: alpha.ok_or(ConfigError::Missing("alpha"))?,
                    lambda: lambda.ok_or(ConfigError::Missing("lambda"))?,
                    theta,
                    npan: npan.unwrap_or(10),
                    n_sub,
                    init,
                    k,
                    solver,
                    reference,
                    out,
                }
            }
        };
        Ok(cfg)
    }
}
