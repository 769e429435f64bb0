//! Sweep configuration, execution and persistence.

mod output;
mod sweep;
mod verify;

pub use output::{emit_plotdata, write_csv, PlotFiles};
pub use sweep::{run_sweep, run_sweep_with_threads, SweepResult, THREADS_ENV};
pub use verify::{random_hermitian, run_verify, VerifyConfig, VerifyReport, VERIFY_STEPS, VERIFY_TIMES};

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::diagnostics::{DEFAULT_RTOL, DEFAULT_WINDOW};
use crate::error::{Error, Result};
use crate::fock::{builtin, resolve, LadderPolynomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepMode {
    StateError,
    UniformError,
}

impl SweepMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepMode::StateError => "state_error",
            SweepMode::UniformError => "uniform_error",
        }
    }
}

impl FromStr for SweepMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "state_error" => Ok(SweepMode::StateError),
            "uniform_error" => Ok(SweepMode::UniformError),
            _ => Err(format!("expected `state_error` or `uniform_error`, found `{s}`")),
        }
    }
}

/// One sweep over a grid of truncation dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    /// Builtin name or polynomial expression.
    pub h1_expr: String,
    pub h2_expr: String,
    /// Fock labels `m`; empty in uniform mode.
    pub states: Vec<usize>,
    pub t: f64,
    pub trotter_steps: usize,
    pub d_min: usize,
    pub d_max: usize,
    pub d_step: usize,
    pub mode: SweepMode,
    pub bound_overlay: bool,
    pub output_path: Option<PathBuf>,
    pub window: usize,
    pub rtol: f64,
}

const KEYS: [&str; 13] = [
    "h1_expr",
    "h2_expr",
    "states",
    "t",
    "trotter_steps",
    "d_min",
    "d_max",
    "d_step",
    "mode",
    "bound_overlay",
    "output_path",
    "window",
    "rtol",
];

const REQUIRED: [&str; 6] = ["h1_expr", "h2_expr", "t", "trotter_steps", "d_min", "d_max"];

fn config_error(line: Option<usize>, key: &str, msg: impl Into<String>) -> Error {
    Error::Config {
        line,
        key: key.to_string(),
        msg: msg.into(),
    }
}

struct Entries(BTreeMap<&'static str, (usize, String)>);

impl Entries {
    fn get<T: FromStr>(&self, key: &'static str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        match self.0.get(key) {
            None => Ok(None),
            Some((line, raw)) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| config_error(Some(*line), key, format!("cannot parse `{raw}`: {e}"))),
        }
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.0.get(key).map(|(l, _)| *l)
    }
}

fn parse_states(raw: &str) -> std::result::Result<Vec<usize>, String> {
    if raw.trim().is_empty() {
        return Ok(Vec::new());
    }
    raw.split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|e| format!("`{}`: {e}", s.trim())))
        .collect()
}

/// `0.5*Q^2` and `half_q2` name the same operator: compare compressions.
fn same_operator(a: &LadderPolynomial, b: &LadderPolynomial) -> bool {
    let d = 2 * a.degree().max(b.degree()) + 4;
    a.compress(d).max_abs_diff(&b.compress(d)) <= 1e-12
}

impl SweepConfig {
    /// Parses `key = value` lines. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (k, raw_line) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(config_error(Some(line), content, "expected `key = value`"));
            };
            let key = key.trim();
            let Some(&known) = KEYS.iter().find(|&&k| k == key) else {
                return Err(config_error(Some(line), key, "unknown key"));
            };
            if let Some((first, _)) = entries.insert(known, (line, value.trim().to_string())) {
                return Err(config_error(Some(line), key, format!("duplicate key, first set on line {first}")));
            }
        }
        let entries = Entries(entries);
        for key in REQUIRED {
            if !entries.0.contains_key(key) {
                return Err(config_error(None, key, "missing required key"));
            }
        }
        let states = match entries.0.get("states") {
            None => Vec::new(),
            Some((line, raw)) => {
                parse_states(raw).map_err(|e| config_error(Some(*line), "states", format!("bad state label {e}")))?
            }
        };
        let cfg = SweepConfig {
            h1_expr: entries.get("h1_expr")?.expect("required"),
            h2_expr: entries.get("h2_expr")?.expect("required"),
            states,
            t: entries.get("t")?.expect("required"),
            trotter_steps: entries.get("trotter_steps")?.expect("required"),
            d_min: entries.get("d_min")?.expect("required"),
            d_max: entries.get("d_max")?.expect("required"),
            d_step: entries.get("d_step")?.unwrap_or(1),
            mode: entries.get("mode")?.unwrap_or(SweepMode::StateError),
            bound_overlay: entries.get("bound_overlay")?.unwrap_or(false),
            output_path: entries.get::<String>("output_path")?.filter(|s| !s.is_empty()).map(PathBuf::from),
            window: entries.get("window")?.unwrap_or(DEFAULT_WINDOW),
            rtol: entries.get("rtol")?.unwrap_or(DEFAULT_RTOL),
        };
        cfg.validate_with(|key| entries.line(key))?;
        Ok(cfg)
    }

    /// Checks the invariants; errors name the offending key.
    pub fn validate(&self) -> Result<()> {
        self.validate_with(|_| None)
    }

    fn validate_with(&self, line: impl Fn(&str) -> Option<usize>) -> Result<()> {
        let fail = |key: &str, msg: String| Err(config_error(line(key), key, msg));
        for (key, expr) in [("h1_expr", &self.h1_expr), ("h2_expr", &self.h2_expr)] {
            if let Err(e) = resolve(expr) {
                return fail(key, e.to_string());
            }
        }
        if !self.t.is_finite() {
            return fail("t", format!("evolution time must be finite, got {}", self.t));
        }
        if self.trotter_steps == 0 {
            return fail("trotter_steps", "must be >= 1".into());
        }
        if self.d_min == 0 {
            return fail("d_min", "must be >= 1".into());
        }
        if self.d_max < self.d_min {
            return fail("d_max", format!("{} is below d_min = {}", self.d_max, self.d_min));
        }
        if self.d_step == 0 {
            return fail("d_step", "must be >= 1".into());
        }
        if self.window == 0 {
            return fail("window", "must be >= 1".into());
        }
        if !(self.rtol > 0.0 && self.rtol.is_finite()) {
            return fail("rtol", format!("must be positive, got {}", self.rtol));
        }
        match self.mode {
            SweepMode::StateError => {
                if self.states.is_empty() {
                    return fail("states", "state_error mode needs at least one state".into());
                }
                let mut seen = self.states.clone();
                seen.sort_unstable();
                seen.dedup();
                if seen.len() != self.states.len() {
                    return fail("states", "duplicate state label".into());
                }
                if let Some(&m) = self.states.iter().find(|&&m| m >= self.d_min) {
                    return fail(
                        "states",
                        format!("state |{m}> lies outside the smallest truncation d_min = {}", self.d_min),
                    );
                }
            }
            SweepMode::UniformError => {
                if !self.states.is_empty() {
                    return fail("states", "uniform_error mode does not take states".into());
                }
                if self.bound_overlay {
                    return fail("bound_overlay", "only available in state_error mode".into());
                }
            }
        }
        if self.bound_overlay && !self.is_split_oscillator()? {
            return fail(
                "bound_overlay",
                "the analytic bound applies only to h1 = half_q2, h2 = half_p2".into(),
            );
        }
        Ok(())
    }

    /// Whether the pair is `½Q²`, `½P²` (in that order).
    pub fn is_split_oscillator(&self) -> Result<bool> {
        Ok(same_operator(&resolve(&self.h1_expr)?, &builtin("half_q2")?)
            && same_operator(&resolve(&self.h2_expr)?, &builtin("half_p2")?))
    }

    /// Truncation dimensions in ascending order.
    pub fn dims(&self) -> Vec<usize> {
        (self.d_min..=self.d_max).step_by(self.d_step.max(1)).collect()
    }

    /// Text form accepted by [`SweepConfig::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        kv("h1_expr", self.h1_expr.clone());
        kv("h2_expr", self.h2_expr.clone());
        if !self.states.is_empty() {
            kv("states", self.states.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(","));
        }
        kv("t", format!("{:?}", self.t));
        kv("trotter_steps", self.trotter_steps.to_string());
        kv("d_min", self.d_min.to_string());
        kv("d_max", self.d_max.to_string());
        kv("d_step", self.d_step.to_string());
        kv("mode", self.mode.as_str().to_string());
        kv("bound_overlay", self.bound_overlay.to_string());
        if let Some(p) = &self.output_path {
            kv("output_path", p.display().to_string());
        }
        kv("window", self.window.to_string());
        kv("rtol", format!("{:?}", self.rtol));
        out
    }
}

pub const PRESET_NAMES: [&str; 4] = ["fig2", "fig3", "fig4", "figS1"];

/// Built-in sweeps. Fock states `|0⟩..|4⟩` need `d_min = 5`.
pub fn preset(name: &str) -> Result<(&'static str, SweepConfig)> {
    let base = |h1: &str, h2: &str, t: f64, d_max: usize| SweepConfig {
        h1_expr: h1.into(),
        h2_expr: h2.into(),
        states: (0..5).collect(),
        t,
        trotter_steps: 1000,
        d_min: 5,
        d_max,
        d_step: 1,
        mode: SweepMode::StateError,
        bound_overlay: false,
        output_path: Some(PathBuf::from(format!("{name}.csv"))),
        window: DEFAULT_WINDOW,
        rtol: DEFAULT_RTOL,
    };
    let (about, cfg) = match name {
        "fig2" => (
            "harmonic oscillator vs squeezing, t = 2, n = 1000",
            base("harmonic_oscillator", "squeezing", 2.0, 300),
        ),
        "fig3" => ("Q^3 vs P^2, t = 1, n = 1000", base("q3", "p2", 1.0, 300)),
        "fig4" => (
            "Q^2/2 vs P^2/2 with analytic bounds, t = 1, n = 1000",
            SweepConfig {
                bound_overlay: true,
                window: 10,
                ..base("half_q2", "half_p2", 1.0, 50)
            },
        ),
        "figS1" => (
            "uniform error, harmonic oscillator vs squeezing, t = 2, n = 10",
            SweepConfig {
                states: Vec::new(),
                trotter_steps: 10,
                d_min: 1,
                mode: SweepMode::UniformError,
                ..base("harmonic_oscillator", "squeezing", 2.0, 300)
            },
        ),
        _ => {
            return Err(Error::usage(format!(
                "unknown preset `{name}`; expected one of {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok((about, cfg))
}

/// Preset as config-file text, with a descriptive comment line.
pub fn preset_text(name: &str) -> Result<String> {
    let (about, cfg) = preset(name)?;
    Ok(format!("# preset {name}: {about}\n{}", cfg.to_text()))
}
