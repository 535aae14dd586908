use std::fs;
use std::path::{Path, PathBuf};

use kgcavity::bessel_im::{Arithmetic, Order};
use kgcavity::experiments::{self, ExperimentReport, Scenario};
use kgcavity::Exec;
use sha2::{Digest, Sha256};

use crate::config::{ConfigError, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{scenario}: {source}")]
    Component { scenario: Scenario, source: kgcavity::Error },
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl RunError {
    /// 2 for configuration problems, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            _ => 1,
        }
    }
}

/// Files written by one run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: ExperimentReport,
    /// Main table first.
    pub csv_files: Vec<PathBuf>,
    pub summary_file: PathBuf,
    pub snapshot_file: PathBuf,
    pub config_hash: String,
}

/// Name of the table written to `<scenario>_<timestamp>.csv`.
pub fn primary_table(s: Scenario) -> &'static str {
    match s {
        Scenario::CurrentDiff => "current",
        Scenario::Coefficients => "coefficients",
        Scenario::Oscillations => "re_psi",
        Scenario::BesselSweep => "sweep",
        Scenario::LimitCheck => "limit",
        Scenario::Convergence => "delta_by_n_max",
    }
}

pub fn config_hash(cfg: &RunConfig) -> String {
    Sha256::digest(cfg.emit().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn exec_for(cfg: &RunConfig) -> Exec {
    if cfg.workers == 1 {
        Exec::Sequential
    } else {
        Exec::default()
    }
}

/// Runs the configured scenario and returns its report without writing files.
pub fn compute(cfg: &RunConfig) -> Result<ExperimentReport, RunError> {
    cfg.validate()?;
    let scenario = cfg.scenario.ok_or(ConfigError::MissingScenario)?;
    let phys = cfg.physical();
    let policy = cfg.policy();
    let exec = exec_for(cfg);
    let res = match scenario {
        Scenario::CurrentDiff => experiments::current_difference_with_control(&phys, &cfg.scan(), &policy, exec),
        Scenario::Coefficients => experiments::coefficient_profile(&phys, cfg.n_max, cfg.grid_points, &policy, exec),
        Scenario::Oscillations => experiments::oscillation_report(&phys, cfg.grid_points, &policy, exec),
        Scenario::BesselSweep => {
            experiments::bessel_precision_sweep(Order::plus(cfg.nu), &cfg.sweep(), &[Arithmetic::Double, Arithmetic::Extended], &policy, exec)
        }
        Scenario::LimitCheck => {
            // Simpson needs an odd point count
            let pts = cfg.num_x | 1;
            experiments::limit_check(&phys, 1, cfg.t_s, pts, &policy, exec)
        }
        Scenario::Convergence => {
            let lower = (2 * cfg.n_max / 3).max(1);
            experiments::convergence_study(&phys, &cfg.scan(), &[lower, cfg.n_max], &policy, exec)
        }
    };
    res.map_err(|source| RunError::Component { scenario, source })
}

fn write(path: &Path, text: &str) -> Result<(), RunError> {
    fs::write(path, text).map_err(|source| RunError::Io { path: path.to_path_buf(), source })
}

/// Runs the scenario and writes CSVs, the summary and the config snapshot.
pub fn run(cfg: &RunConfig) -> Result<RunOutput, RunError> {
    let report = compute(cfg)?;
    let scenario = report.scenario;
    let dir = cfg.resolved_output_dir();
    fs::create_dir_all(&dir).map_err(|source| RunError::Io { path: dir.clone(), source })?;
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%S%.3fZ").to_string();
    let base = format!("{}_{stamp}", scenario.id());
    let hash = config_hash(cfg);

    let snapshot_file = dir.join(format!("{base}.conf"));
    write(&snapshot_file, &format!("# resolved configuration, sha256 {hash}\n{}", cfg.emit()))?;

    let primary = primary_table(scenario);
    let mut tables: Vec<_> = report.tables.iter().collect();
    tables.sort_by_key(|t| t.name != primary);
    let mut csv_files = Vec::new();
    for t in tables {
        let name = if t.name == primary { format!("{base}.csv") } else { format!("{}_{}_{stamp}.csv", scenario.id(), t.name) };
        let path = dir.join(name);
        write(&path, &format!("# config sha256 {hash}\n{}", t.to_csv()))?;
        csv_files.push(path);
    }
    let summary_file = dir.join(format!("{base}.txt"));
    write(&summary_file, &format!("config sha256 {hash}\n{}", report.summary()))?;
    Ok(RunOutput { report, csv_files, summary_file, snapshot_file, config_hash: hash })
}
