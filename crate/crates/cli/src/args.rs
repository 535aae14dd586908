use std::path::PathBuf;

use clap::{Parser, Subcommand};
use kgcavity::experiments::Scenario;

use crate::config::{ConfigError, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "kgcavity", version, about = "Klein-Gordon particle in a cavity with a uniformly moving wall")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,

    /// key = value configuration file; flags override its entries
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(flatten)]
    pub keys: KeyFlags,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Static against expanding cavity current near the fixed wall
    CurrentDiff,
    /// Expansion coefficients c_n of the initial state
    Coefficients,
    /// Internal oscillations of the initial state
    Oscillations,
    /// Round-off diagnostic of the Hankel expansion over log10 z
    BesselSweep,
    /// Comparison with the non-relativistic moving-wall solution
    LimitCheck,
    /// Truncation and grid convergence of the current difference
    Convergence,
}

impl From<Command> for Scenario {
    fn from(c: Command) -> Self {
        match c {
            Command::CurrentDiff => Scenario::CurrentDiff,
            Command::Coefficients => Scenario::Coefficients,
            Command::Oscillations => Scenario::Oscillations,
            Command::BesselSweep => Scenario::BesselSweep,
            Command::LimitCheck => Scenario::LimitCheck,
            Command::Convergence => Scenario::Convergence,
        }
    }
}

/// One optional flag per configuration key, kept as text and parsed by
/// [`RunConfig::apply`] so that file and flag values share one parser.
#[derive(Debug, Default, clap::Args)]
pub struct KeyFlags {
    #[arg(long = "mass_kg", global = true, value_name = "KG")]
    pub mass_kg: Option<String>,
    #[arg(long = "L0_m", global = true, value_name = "M")]
    pub l0_m: Option<String>,
    #[arg(long = "beta", global = true)]
    pub beta: Option<String>,
    #[arg(long = "c_m_per_s", global = true)]
    pub c_m_per_s: Option<String>,
    #[arg(long = "hbar_J_s", global = true)]
    pub hbar_j_s: Option<String>,
    #[arg(long = "t_s", global = true)]
    pub t_s: Option<String>,
    #[arg(long = "x_lo_m", global = true)]
    pub x_lo_m: Option<String>,
    #[arg(long = "x_hi_m", global = true)]
    pub x_hi_m: Option<String>,
    #[arg(long = "num_x", global = true)]
    pub num_x: Option<String>,
    #[arg(long = "n_max", global = true)]
    pub n_max: Option<String>,
    /// Subintervals of [0, L0] used for the projection
    #[arg(long = "grid_points", global = true)]
    pub grid_points: Option<String>,
    #[arg(long = "precision_bits", global = true)]
    pub precision_bits: Option<String>,
    #[arg(long = "regime_threshold", global = true)]
    pub regime_threshold: Option<String>,
    #[arg(long = "max_terms", global = true)]
    pub max_terms: Option<String>,
    #[arg(long = "tolerance", global = true)]
    pub tolerance: Option<String>,
    #[arg(long = "nu", global = true)]
    pub nu: Option<String>,
    #[arg(long = "z_log10_lo", global = true)]
    pub z_log10_lo: Option<String>,
    #[arg(long = "z_log10_hi", global = true)]
    pub z_log10_hi: Option<String>,
    #[arg(long = "sweep_steps", global = true)]
    pub sweep_steps: Option<String>,
    /// Worker threads for parallel scans (0 = all cores, 1 = sequential)
    #[arg(long = "workers", global = true)]
    pub workers: Option<String>,
    /// Output directory (default: $KGCAVITY_OUT_DIR, then ./kgcavity-out)
    #[arg(long = "output_dir", global = true)]
    pub output_dir: Option<String>,
}

impl KeyFlags {
    pub fn pairs(&self) -> Vec<(&'static str, &str)> {
        let all = [
            ("mass_kg", &self.mass_kg),
            ("L0_m", &self.l0_m),
            ("beta", &self.beta),
            ("c_m_per_s", &self.c_m_per_s),
            ("hbar_J_s", &self.hbar_j_s),
            ("t_s", &self.t_s),
            ("x_lo_m", &self.x_lo_m),
            ("x_hi_m", &self.x_hi_m),
            ("num_x", &self.num_x),
            ("n_max", &self.n_max),
            ("grid_points", &self.grid_points),
            ("precision_bits", &self.precision_bits),
            ("regime_threshold", &self.regime_threshold),
            ("max_terms", &self.max_terms),
            ("tolerance", &self.tolerance),
            ("nu", &self.nu),
            ("z_log10_lo", &self.z_log10_lo),
            ("z_log10_hi", &self.z_log10_hi),
            ("sweep_steps", &self.sweep_steps),
            ("workers", &self.workers),
            ("output_dir", &self.output_dir),
        ];
        all.into_iter().filter_map(|(k, v)| v.as_deref().map(|v| (k, v))).collect()
    }
}

impl Cli {
    /// Defaults, then the config file, then flags, then the subcommand.
    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
            cfg.merge_text(&text)?;
        }
        for (k, v) in self.keys.pairs() {
            cfg.apply(k, v, None)?;
        }
        if let Some(c) = self.command {
            cfg.scenario = Some(c.into());
        }
        if cfg.scenario.is_none() {
            return Err(ConfigError::MissingScenario);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
