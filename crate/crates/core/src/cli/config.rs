use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::Dim;
use crate::scale::{Family, ScaleCalculus, ScaleFunction};
use crate::sim::{small_jump_std_at, JumpProcessModel, SmallJumpMode, DEFAULT_MAX_EVENTS};

/// The six experiments exposed by the driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    ScaleTable,
    SymbolCheck,
    ExitTime,
    FarExit,
    Hitting,
    Regularity,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::ScaleTable,
        Experiment::SymbolCheck,
        Experiment::ExitTime,
        Experiment::FarExit,
        Experiment::Hitting,
        Experiment::Regularity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::ScaleTable => "scale-table",
            Experiment::SymbolCheck => "symbol-check",
            Experiment::ExitTime => "exit-time",
            Experiment::FarExit => "far-exit",
            Experiment::Hitting => "hitting",
            Experiment::Regularity => "regularity",
        }
    }

    pub fn simulates(self) -> bool {
        !matches!(self, Experiment::ScaleTable | Experiment::SymbolCheck)
    }
}

/// Small-jump cutoff: a fixed value or the heuristic choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsChoice {
    Auto,
    Value(f64),
}

impl std::fmt::Display for EpsChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EpsChoice::Auto => f.write_str("auto"),
            EpsChoice::Value(v) => f.write_str(&fmt_num(*v)),
        }
    }
}

/// Every key accepted in a config file, in echo order.
pub const KEYS: &[&str] = &[
    "ell",
    "beta",
    "dim",
    "eps",
    "mode",
    "seed",
    "paths",
    "max_events",
    "radii",
    "s",
    "a",
    "t_scale",
    "grid",
    "dyadic_a",
    "dyadic_n",
    "bootstrap",
    "s_min",
    "s_max",
    "xi_min",
    "xi_max",
    "points",
    "quad_tol",
    "inv_tol",
    "psi_panels",
    "psi_tol",
    "out",
];

/// Complete, serializable description of one experiment run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub ell: Family,
    pub beta: f64,
    pub dim: usize,
    pub eps: EpsChoice,
    pub mode: SmallJumpMode,
    pub seed: u64,
    pub paths: u64,
    pub max_events: u64,
    pub radii: Vec<f64>,
    /// Outer radii for far-exit.
    pub s: Vec<f64>,
    /// Scale factors for φ_a and hitting targets.
    pub a: Vec<f64>,
    /// Exit-tail times in units of `1/L(r)`.
    pub t_scale: Vec<f64>,
    /// Regularity grid offsets as fractions of `r/4`.
    pub grid: Vec<f64>,
    pub dyadic_a: f64,
    pub dyadic_n: usize,
    pub bootstrap: usize,
    pub s_min: f64,
    pub s_max: f64,
    pub xi_min: f64,
    pub xi_max: f64,
    pub points: usize,
    pub quad_tol: f64,
    pub inv_tol: f64,
    pub psi_panels: usize,
    pub psi_tol: f64,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn defaults_for(exp: Experiment) -> Self {
        let mut cfg = ExperimentConfig {
            ell: Family::Power,
            beta: 1.0,
            dim: 1,
            eps: EpsChoice::Auto,
            mode: SmallJumpMode::Drop,
            seed: 1,
            paths: 20_000,
            max_events: DEFAULT_MAX_EVENTS,
            radii: vec![0.05, 0.1, 0.2, 0.4],
            s: vec![0.2, 0.4],
            a: vec![2.0, 4.0, 8.0, 16.0],
            t_scale: vec![0.1, 1.0],
            grid: vec![0.05, 0.1, 0.2, 0.4, 0.8],
            dyadic_a: 4.0,
            dyadic_n: 3,
            bootstrap: 2000,
            s_min: 1e-6,
            s_max: 0.9,
            xi_min: 5.0,
            xi_max: 1e4,
            points: 40,
            quad_tol: crate::scale::DEFAULT_QUAD_REL_TOL,
            inv_tol: crate::scale::DEFAULT_INV_ABS_TOL,
            psi_panels: crate::symbol::DEFAULT_PANELS_PER_PERIOD,
            psi_tol: crate::symbol::DEFAULT_TAIL_TOL,
            out: None,
        };
        match exp {
            Experiment::ScaleTable => {
                cfg.a = vec![2.0];
                cfg.points = 25;
            }
            Experiment::FarExit => cfg.radii = vec![0.02, 0.05],
            Experiment::Hitting => cfg.radii = vec![0.05],
            Experiment::Regularity => {
                cfg.radii = vec![0.4];
                cfg.paths = 10_000;
            }
            Experiment::SymbolCheck | Experiment::ExitTime => {}
        }
        cfg
    }

    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let bad = |msg: String| Error::config(key, msg);
        match key {
            "ell" => self.ell = value.parse()?,
            "beta" => self.beta = parse_f64(key, value)?,
            "dim" => self.dim = parse_usize(key, value)?,
            "eps" => {
                self.eps = if value == "auto" { EpsChoice::Auto } else { EpsChoice::Value(parse_f64(key, value)?) }
            }
            "mode" => self.mode = value.parse()?,
            "seed" => self.seed = parse_u64(key, value)?,
            "paths" => self.paths = parse_u64(key, value)?,
            "max_events" => self.max_events = parse_u64(key, value)?,
            "radii" => self.radii = parse_list(key, value)?,
            "s" => self.s = parse_list(key, value)?,
            "a" => self.a = parse_list(key, value)?,
            "t_scale" => self.t_scale = parse_list(key, value)?,
            "grid" => self.grid = parse_list(key, value)?,
            "dyadic_a" => self.dyadic_a = parse_f64(key, value)?,
            "dyadic_n" => self.dyadic_n = parse_usize(key, value)?,
            "bootstrap" => self.bootstrap = parse_usize(key, value)?,
            "s_min" => self.s_min = parse_f64(key, value)?,
            "s_max" => self.s_max = parse_f64(key, value)?,
            "xi_min" => self.xi_min = parse_f64(key, value)?,
            "xi_max" => self.xi_max = parse_f64(key, value)?,
            "points" => self.points = parse_usize(key, value)?,
            "quad_tol" => self.quad_tol = parse_f64(key, value)?,
            "inv_tol" => self.inv_tol = parse_f64(key, value)?,
            "psi_panels" => self.psi_panels = parse_usize(key, value)?,
            "psi_tol" => self.psi_tol = parse_f64(key, value)?,
            "out" => self.out = if value.is_empty() { None } else { Some(PathBuf::from(value)) },
            _ => return Err(bad(format!("unknown key (expected one of {})", KEYS.join(", ")))),
        }
        Ok(())
    }

    /// Applies `key=value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at_line = |e: Error| match e {
                Error::Config { key, message, .. } => Error::Config { line: Some(line_no), key, message },
                other => other,
            };
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                line: Some(line_no),
                key: None,
                message: format!("expected key=value, found `{line}`"),
            })?;
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(Error::Config {
                    line: Some(line_no),
                    key: Some(key.to_string()),
                    message: "duplicate key".into(),
                });
            }
            self.set(key, value).map_err(at_line)?;
        }
        Ok(())
    }

    /// `key=value` lines for every key, readable by [`apply_text`](Self::apply_text).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let _ = writeln!(out, "{key}={}", self.value_text(key));
        }
        out
    }

    /// [`to_text`](Self::to_text) without the output path, for CSV headers:
    /// identical experiments produce identical files wherever they are written.
    pub fn echo_text(&self) -> String {
        let mut out = String::new();
        for key in KEYS.iter().filter(|k| **k != "out") {
            let _ = writeln!(out, "{key}={}", self.value_text(key));
        }
        out
    }

    fn value_text(&self, key: &str) -> String {
        match key {
            "ell" => self.ell.id().to_string(),
            "beta" => fmt_num(self.beta),
            "dim" => self.dim.to_string(),
            "eps" => self.eps.to_string(),
            "mode" => self.mode.to_string(),
            "seed" => self.seed.to_string(),
            "paths" => self.paths.to_string(),
            "max_events" => self.max_events.to_string(),
            "radii" => join(&self.radii),
            "s" => join(&self.s),
            "a" => join(&self.a),
            "t_scale" => join(&self.t_scale),
            "grid" => join(&self.grid),
            "dyadic_a" => fmt_num(self.dyadic_a),
            "dyadic_n" => self.dyadic_n.to_string(),
            "bootstrap" => self.bootstrap.to_string(),
            "s_min" => fmt_num(self.s_min),
            "s_max" => fmt_num(self.s_max),
            "xi_min" => fmt_num(self.xi_min),
            "xi_max" => fmt_num(self.xi_max),
            "points" => self.points.to_string(),
            "quad_tol" => fmt_num(self.quad_tol),
            "inv_tol" => fmt_num(self.inv_tol),
            "psi_panels" => self.psi_panels.to_string(),
            "psi_tol" => fmt_num(self.psi_tol),
            "out" => self.out.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
            _ => unreachable!("unknown key {key}"),
        }
    }

    pub fn dim(&self) -> Result<Dim> {
        Dim::new(self.dim).map_err(|e| Error::config("dim", e.to_string()))
    }

    pub fn calculus(&self) -> Result<ScaleCalculus> {
        let beta = self.ell.uses_beta().then_some(self.beta);
        let ell = ScaleFunction::builtin(self.ell, beta).map_err(|e| as_config("beta", e))?;
        ScaleCalculus::new(ell)
            .with_tolerances(self.quad_tol, self.inv_tol)
            .map_err(|e| as_config("quad_tol", e))
    }

    /// Checks everything an experiment needs and resolves the cutoff.
    pub fn validate(&self, exp: Experiment) -> Result<Validated> {
        let d = self.dim()?;
        let calc = self.calculus()?;
        let within = |key: &str, xs: &[f64], lo: f64, hi: f64, what: &str| -> Result<()> {
            if xs.is_empty() {
                return Err(Error::config(key, "list is empty"));
            }
            match xs.iter().find(|x| !(**x > lo && **x < hi)) {
                Some(x) => Err(Error::config(key, format!("{x} is outside {what}"))),
                None => Ok(()),
            }
        };
        match exp {
            Experiment::ScaleTable => {
                if !(self.s_min > 0.0 && self.s_min < self.s_max && self.s_max < 1.0) {
                    return Err(Error::config("s_min", "need 0 < s_min < s_max < 1"));
                }
                if self.points < 2 {
                    return Err(Error::config("points", "need at least 2 points"));
                }
                within("a", &self.a, 1.0 - f64::EPSILON, f64::INFINITY, "[1, ∞)")?;
            }
            Experiment::SymbolCheck => {
                if !(self.xi_min >= 5.0 && self.xi_min < self.xi_max && self.xi_max <= 1e15) {
                    return Err(Error::config("xi_min", "need 5 ≤ xi_min < xi_max ≤ 1e15"));
                }
                if self.points < 2 {
                    return Err(Error::config("points", "need at least 2 points"));
                }
                if self.psi_panels == 0 || !(self.psi_tol > 0.0 && self.psi_tol < 1.0) {
                    return Err(Error::config("psi_panels", "need psi_panels ≥ 1 and psi_tol in (0, 1)"));
                }
            }
            Experiment::ExitTime => {
                within("radii", &self.radii, 0.0, 1.0, "(0, 1)")?;
                if self.t_scale.iter().any(|t| !(*t >= 0.0)) {
                    return Err(Error::config("t_scale", "times must be non-negative"));
                }
            }
            Experiment::FarExit => {
                within("radii", &self.radii, 0.0, 1.0, "(0, 1)")?;
                within("s", &self.s, 0.0, 1.0, "(0, 1)")?;
                if let Some((r, s)) = self.far_pairs().into_iter().find(|(r, s)| !(2.0 * r < *s)) {
                    return Err(Error::config("s", format!("pair r = {r}, s = {s} violates 2r < s")));
                }
            }
            Experiment::Hitting => {
                within("radii", &self.radii, 0.0, 0.5, "(0, 1/2)")?;
                within("a", &self.a, 1.0, f64::INFINITY, "(1, ∞)")?;
            }
            Experiment::Regularity => {
                if self.radii.len() != 1 {
                    return Err(Error::config("radii", "regularity takes exactly one radius"));
                }
                within("radii", &self.radii, 0.0, 1.0, "(0, 1)")?;
                within("grid", &self.grid, 0.0, 1.0, "(0, 1)")?;
                if !(self.dyadic_a > 1.0) || self.dyadic_n == 0 {
                    return Err(Error::config("dyadic_a", "need dyadic_a > 1 and dyadic_n ≥ 1"));
                }
                if self.bootstrap < 100 {
                    return Err(Error::config("bootstrap", "need at least 100 resamples"));
                }
            }
        }
        if !exp.simulates() {
            return Ok(Validated { d, calc, models: Vec::new() });
        }
        if self.paths < crate::mc::MIN_PATHS {
            return Err(Error::config("paths", format!("need at least {} paths", crate::mc::MIN_PATHS)));
        }
        if self.max_events == 0 {
            return Err(Error::config("max_events", "must be positive"));
        }
        let mut models = Vec::with_capacity(self.radii.len());
        for &r in &self.radii {
            let eps = match self.eps {
                EpsChoice::Value(e) => e,
                EpsChoice::Auto => auto_eps(&calc, d, r).map_err(|e| as_config("eps", e))?,
            };
            if eps >= r {
                return Err(Error::config("eps", format!("eps = {eps} must be below the radius {r}")));
            }
            let model = JumpProcessModel::new(d, calc.clone(), eps, self.mode)
                .map_err(|e| as_config("eps", e))?
                .with_max_events(self.max_events);
            models.push(model);
        }
        Ok(Validated { d, calc, models })
    }

    pub fn far_pairs(&self) -> Vec<(f64, f64)> {
        self.radii.iter().flat_map(|&r| self.s.iter().map(move |&s| (r, s))).collect()
    }
}

/// Objects built from a validated config; `models[i]` simulates at `radii[i]`.
#[derive(Debug, Clone)]
pub struct Validated {
    pub d: Dim,
    pub calc: ScaleCalculus,
    pub models: Vec<JumpProcessModel>,
}

/// Largest `eps = 10^-k` (k = 2..=9) whose dropped small jumps move the path
/// by less than `r/100` over the time scale `1/L(r)`; zero when the whole jump
/// measure is finite.
pub fn auto_eps(calc: &ScaleCalculus, d: Dim, r: f64) -> Result<f64> {
    if calc.big_l_at_zero().is_some() {
        return Ok(0.0);
    }
    let horizon = 1.0 / calc.big_l(r)?;
    let mut eps = 1e-2;
    for k in 2..=9 {
        eps = 10f64.powi(-k);
        if eps < r && small_jump_std_at(calc, d, eps)? * horizon.sqrt() < 0.01 * r {
            break;
        }
    }
    Ok(eps)
}

fn as_config(key: &str, e: Error) -> Error {
    match e {
        Error::Config { .. } => e,
        other => Error::config(key, other.to_string()),
    }
}

/// Shortest round-trip text, in exponent form for very small or large magnitudes.
pub(crate) fn fmt_num(x: f64) -> String {
    let m = x.abs();
    if m != 0.0 && m.is_finite() && !(1e-4..1e15).contains(&m) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|&x| fmt_num(x)).collect::<Vec<_>>().join(",")
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|x| !x.is_nan())
        .ok_or_else(|| Error::config(key, format!("`{v}` is not a number")))
}

fn parse_u64(key: &str, v: &str) -> Result<u64> {
    if let Ok(n) = u64::from_str(v) {
        return Ok(n);
    }
    match v.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x <= 9_007_199_254_740_992.0 => Ok(x as u64),
        _ => Err(Error::config(key, format!("`{v}` is not a non-negative integer"))),
    }
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    parse_u64(key, v).map(|n| n as usize)
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|item| parse_f64(key, item.trim())).collect()
}
