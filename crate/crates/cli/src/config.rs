//! Run configuration: flat `key = value` text, one key per line, `#` starts a
//! comment. Flags use the same keys and win over the file.

use std::fmt::Write as _;
use std::path::PathBuf;

use kgcavity::bessel_im::AsymptoticPolicy;
use kgcavity::cavity_states::PhysicalConfig;
use kgcavity::experiments::{ScanSpec, Scenario, SweepSpec};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "KGCAVITY_OUT_DIR";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key '{key}'{}", at_line(*.line))]
    UnknownKey { key: String, line: Option<usize> },
    #[error("bad value for '{key}'{}: {message}", at_line(*.line))]
    Value { key: String, line: Option<usize>, message: String },
    #[error("no scenario given (use a subcommand or the 'scenario' key)")]
    MissingScenario,
    #[error("cannot read config file {path}: {message}")]
    Io { path: String, message: String },
}

fn at_line(line: Option<usize>) -> String {
    line.map(|l| format!(" (line {l})")).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mass_kg: f64,
    pub l0_m: f64,
    pub beta: f64,
    pub c_m_per_s: f64,
    pub hbar_j_s: f64,
    pub t_s: f64,
    pub x_lo_m: f64,
    pub x_hi_m: f64,
    pub num_x: usize,
    pub n_max: usize,
    pub grid_points: usize,
    pub precision_bits: u32,
    pub regime_threshold: f64,
    pub max_terms: u32,
    pub tolerance: f64,
    /// Order of the precision sweep.
    pub nu: f64,
    pub z_log10_lo: f64,
    pub z_log10_hi: f64,
    pub sweep_steps: usize,
    /// Thread count of the parallel scans; 0 lets the runtime decide.
    pub workers: usize,
    pub scenario: Option<Scenario>,
    pub output_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = PhysicalConfig::default();
        let s = ScanSpec::default();
        let a = AsymptoticPolicy::default();
        let w = SweepSpec::default();
        RunConfig {
            mass_kg: p.mass,
            l0_m: p.l0,
            beta: p.beta,
            c_m_per_s: p.c,
            hbar_j_s: p.hbar,
            t_s: s.t,
            x_lo_m: s.x_lo,
            x_hi_m: s.x_hi,
            num_x: s.num_x,
            n_max: s.n_max,
            grid_points: s.grid_points,
            precision_bits: a.precision_bits,
            regime_threshold: a.regime_threshold,
            max_terms: a.max_terms,
            tolerance: a.tolerance,
            nu: 100.0 * std::f64::consts::PI,
            z_log10_lo: w.z_log10_lo,
            z_log10_hi: w.z_log10_hi,
            sweep_steps: w.steps,
            workers: 0,
            scenario: None,
            output_dir: None,
        }
    }
}

/// Every accepted key, in emission order.
pub const KEYS: [&str; 22] = [
    "mass_kg",
    "L0_m",
    "beta",
    "c_m_per_s",
    "hbar_J_s",
    "t_s",
    "x_lo_m",
    "x_hi_m",
    "num_x",
    "n_max",
    "grid_points",
    "precision_bits",
    "regime_threshold",
    "max_terms",
    "tolerance",
    "nu",
    "z_log10_lo",
    "z_log10_hi",
    "sweep_steps",
    "workers",
    "scenario",
    "output_dir",
];

fn num<T: std::str::FromStr>(key: &str, value: &str, line: Option<usize>) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse::<T>().map_err(|e| ConfigError::Value { key: key.into(), line, message: format!("'{value}': {e}") })
}

impl RunConfig {
    /// Sets one key from its text form.
    pub fn apply(&mut self, key: &str, value: &str, line: Option<usize>) -> Result<(), ConfigError> {
        let v = value.trim();
        match key {
            "mass_kg" => self.mass_kg = num(key, v, line)?,
            "L0_m" => self.l0_m = num(key, v, line)?,
            "beta" => self.beta = num(key, v, line)?,
            "c_m_per_s" => self.c_m_per_s = num(key, v, line)?,
            "hbar_J_s" => self.hbar_j_s = num(key, v, line)?,
            "t_s" => self.t_s = num(key, v, line)?,
            "x_lo_m" => self.x_lo_m = num(key, v, line)?,
            "x_hi_m" => self.x_hi_m = num(key, v, line)?,
            "num_x" => self.num_x = num(key, v, line)?,
            "n_max" => self.n_max = num(key, v, line)?,
            "grid_points" => self.grid_points = num(key, v, line)?,
            "precision_bits" => self.precision_bits = num(key, v, line)?,
            "regime_threshold" => self.regime_threshold = num(key, v, line)?,
            "max_terms" => self.max_terms = num(key, v, line)?,
            "tolerance" => self.tolerance = num(key, v, line)?,
            "nu" => self.nu = num(key, v, line)?,
            "z_log10_lo" => self.z_log10_lo = num(key, v, line)?,
            "z_log10_hi" => self.z_log10_hi = num(key, v, line)?,
            "sweep_steps" => self.sweep_steps = num(key, v, line)?,
            "workers" => self.workers = num(key, v, line)?,
            "scenario" => {
                self.scenario = Some(v.parse().map_err(|_| ConfigError::Value {
                    key: key.into(),
                    line,
                    message: format!("'{v}' is not one of {}", Scenario::ALL.map(|s| s.id()).join(", ")),
                })?)
            }
            "output_dir" => self.output_dir = Some(PathBuf::from(v)),
            _ => return Err(ConfigError::UnknownKey { key: key.into(), line }),
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text` on top of `self`.
    pub fn merge_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax { line: i + 1, message: format!("expected 'key = value', got '{line}'") })?;
            self.apply(k.trim(), v, Some(i + 1))?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut c = RunConfig::default();
        c.merge_text(text)?;
        Ok(c)
    }

    /// Text form accepted by [`RunConfig::parse`]; floats use the shortest
    /// representation that reads back exactly.
    pub fn emit(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("mass_kg", format!("{:e}", self.mass_kg));
        kv("L0_m", format!("{:e}", self.l0_m));
        kv("beta", format!("{:e}", self.beta));
        kv("c_m_per_s", format!("{:e}", self.c_m_per_s));
        kv("hbar_J_s", format!("{:e}", self.hbar_j_s));
        kv("t_s", format!("{:e}", self.t_s));
        kv("x_lo_m", format!("{:e}", self.x_lo_m));
        kv("x_hi_m", format!("{:e}", self.x_hi_m));
        kv("num_x", self.num_x.to_string());
        kv("n_max", self.n_max.to_string());
        kv("grid_points", self.grid_points.to_string());
        kv("precision_bits", self.precision_bits.to_string());
        kv("regime_threshold", format!("{:e}", self.regime_threshold));
        kv("max_terms", self.max_terms.to_string());
        kv("tolerance", format!("{:e}", self.tolerance));
        kv("nu", format!("{:e}", self.nu));
        kv("z_log10_lo", format!("{:e}", self.z_log10_lo));
        kv("z_log10_hi", format!("{:e}", self.z_log10_hi));
        kv("sweep_steps", self.sweep_steps.to_string());
        kv("workers", self.workers.to_string());
        if let Some(sc) = self.scenario {
            kv("scenario", sc.id().to_string());
        }
        if let Some(d) = &self.output_dir {
            kv("output_dir", d.display().to_string());
        }
        s
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, message: String| Err(ConfigError::Value { key: key.into(), line: None, message });
        for (key, v) in [
            ("mass_kg", self.mass_kg),
            ("L0_m", self.l0_m),
            ("c_m_per_s", self.c_m_per_s),
            ("hbar_J_s", self.hbar_j_s),
            ("regime_threshold", self.regime_threshold),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(key, format!("{v} must be positive"));
            }
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return bad("beta", format!("{} must lie in the open interval (0, 1)", self.beta));
        }
        for (key, v) in [("t_s", self.t_s), ("x_lo_m", self.x_lo_m), ("x_hi_m", self.x_hi_m), ("tolerance", self.tolerance), ("nu", self.nu)] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(key, format!("{v} must be finite and >= 0"));
            }
        }
        if !(self.x_lo_m < self.x_hi_m) {
            return bad("x_hi_m", format!("x_hi_m = {} must exceed x_lo_m = {}", self.x_hi_m, self.x_lo_m));
        }
        if !(self.z_log10_lo < self.z_log10_hi) {
            return bad("z_log10_hi", "must exceed z_log10_lo".into());
        }
        for (key, v, min) in [("num_x", self.num_x, 2), ("n_max", self.n_max, 1), ("sweep_steps", self.sweep_steps, 2)] {
            if v < min {
                return bad(key, format!("{v} is below the minimum {min}"));
            }
        }
        if self.grid_points < 4 || self.grid_points % 2 != 0 {
            return bad("grid_points", format!("{} must be an even interval count >= 4", self.grid_points));
        }
        if self.max_terms < 1 {
            return bad("max_terms", "must be >= 1".into());
        }
        if self.precision_bits < 53 {
            return bad("precision_bits", "must be >= 53".into());
        }
        Ok(())
    }

    pub fn physical(&self) -> PhysicalConfig {
        PhysicalConfig { mass: self.mass_kg, l0: self.l0_m, beta: self.beta, c: self.c_m_per_s, hbar: self.hbar_j_s }
    }

    pub fn policy(&self) -> AsymptoticPolicy {
        AsymptoticPolicy {
            max_terms: self.max_terms,
            regime_threshold: self.regime_threshold,
            precision_bits: self.precision_bits,
            tolerance: self.tolerance,
        }
    }

    pub fn scan(&self) -> ScanSpec {
        ScanSpec { t: self.t_s, x_lo: self.x_lo_m, x_hi: self.x_hi_m, num_x: self.num_x, n_max: self.n_max, grid_points: self.grid_points }
    }

    pub fn sweep(&self) -> SweepSpec {
        SweepSpec { z_log10_lo: self.z_log10_lo, z_log10_hi: self.z_log10_hi, steps: self.sweep_steps }
    }

    /// `output_dir`, else `$KGCAVITY_OUT_DIR`, else `./kgcavity-out`.
    pub fn resolved_output_dir(&self) -> PathBuf {
        if let Some(d) = &self.output_dir {
            return d.clone();
        }
        std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("kgcavity-out"))
    }
}
