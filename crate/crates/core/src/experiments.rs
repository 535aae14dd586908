//! Scenario runners. Each returns an [`ExperimentReport`] holding the tables
//! it computed, the scalars derived from them and the settings used.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::bessel_im::{self, Arithmetic, AsymptoticPolicy, Order};
use crate::cavity_states::{self, ModeData, MovingState, PhysicalConfig};
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::observables::{self, CurrentProfile, ProfileLabel, QuadratureSpec, Scheme};
use crate::spectral::{self, SpectralExpansion, StaticEvolution};

/// Wall speed of the static-limit control run.
pub const CONTROL_BETA: f64 = 1e-6;

/// Coefficient indices whose size relative to the peak is reported.
pub const RATIO_INDICES: [usize; 3] = [9000, 10000, 15000];

/// Rows kept in the `re_psi` table of the oscillation report.
const MAX_PROFILE_ROWS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scenario {
    CurrentDiff,
    Coefficients,
    Oscillations,
    BesselSweep,
    LimitCheck,
    Convergence,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::CurrentDiff,
        Scenario::Coefficients,
        Scenario::Oscillations,
        Scenario::BesselSweep,
        Scenario::LimitCheck,
        Scenario::Convergence,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Scenario::CurrentDiff => "current-diff",
            Scenario::Coefficients => "coefficients",
            Scenario::Oscillations => "oscillations",
            Scenario::BesselSweep => "bessel-sweep",
            Scenario::LimitCheck => "limit-check",
            Scenario::Convergence => "convergence",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.id() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown scenario '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Real(v) => Some(*v),
            Cell::Text(_) => None,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(i) => write!(f, "{i}"),
            // 17 significant digits round-trip any binary64
            Cell::Real(v) => write!(f, "{v:.16e}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.to_string(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::GridMismatch(format!("table {} has {} columns, row has {}", self.name, self.columns.len(), row.len())));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric column; text cells come back as NaN.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i].as_f64().unwrap_or(f64::NAN)).collect())
    }

    /// Header row plus one line per row, comma separated.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// A derived number and the table it was computed from.
#[derive(Clone, Debug, PartialEq)]
pub struct Scalar {
    pub name: String,
    pub value: f64,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub scenario: Scenario,
    /// Resolved inputs as `(key, value)` pairs.
    pub config: Vec<(String, String)>,
    pub tables: Vec<Table>,
    pub scalars: Vec<Scalar>,
    /// Grid sizes, mode counts, evaluation policy.
    pub provenance: Vec<(String, String)>,
}

impl ExperimentReport {
    fn new(scenario: Scenario, cfg: &PhysicalConfig) -> Self {
        let config = vec![
            ("mass_kg".into(), format!("{:e}", cfg.mass)),
            ("L0_m".into(), format!("{:e}", cfg.l0)),
            ("beta".into(), format!("{:e}", cfg.beta)),
            ("c_m_per_s".into(), format!("{:e}", cfg.c)),
            ("hbar_J_s".into(), format!("{:e}", cfg.hbar)),
        ];
        ExperimentReport { scenario, config, tables: Vec::new(), scalars: Vec::new(), provenance: Vec::new() }
    }

    fn set(&mut self, key: &str, value: impl fmt::Display) {
        self.config.push((key.to_string(), value.to_string()));
    }

    fn note(&mut self, key: &str, value: impl fmt::Display) {
        self.provenance.push((key.to_string(), value.to_string()));
    }

    fn note_policy(&mut self, prefix: &str, p: &AsymptoticPolicy) {
        self.note(&format!("{prefix}max_terms"), p.max_terms);
        self.note(&format!("{prefix}regime_threshold"), format!("{:e}", p.regime_threshold));
        self.note(&format!("{prefix}precision_bits"), p.precision_bits);
        self.note(&format!("{prefix}tolerance"), format!("{:e}", p.tolerance));
    }

    fn derive(&mut self, name: &str, value: f64, source: &str) {
        debug_assert!(self.table(source).is_some(), "scalar {name} cites missing table {source}");
        self.scalars.push(Scalar { name: name.to_string(), value, source: source.to_string() });
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn scalar(&self, name: &str) -> Option<f64> {
        self.scalars.iter().find(|s| s.name == name).map(|s| s.value)
    }

    /// Plain-text summary: inputs, provenance, then derived scalars.
    pub fn summary(&self) -> String {
        let mut out = format!("scenario: {}\n\n[config]\n", self.scenario);
        for (k, v) in &self.config {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out.push_str("\n[provenance]\n");
        for (k, v) in &self.provenance {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out.push_str("\n[results]\n");
        for s in &self.scalars {
            out.push_str(&format!("{} = {:.10e}  ({})\n", s.name, s.value, s.source));
        }
        out.push_str("\n[tables]\n");
        for t in &self.tables {
            out.push_str(&format!("{}: {} rows, columns {}\n", t.name, t.rows.len(), t.columns.join(",")));
        }
        out
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect()
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Grid and truncation settings of a current-difference scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanSpec {
    /// s
    pub t: f64,
    /// m
    pub x_lo: f64,
    /// m
    pub x_hi: f64,
    pub num_x: usize,
    pub n_max: usize,
    /// Subintervals of `[0, L0]` for the projection.
    pub grid_points: usize,
}

impl Default for ScanSpec {
    fn default() -> Self {
        ScanSpec { t: 1e-15, x_lo: 0.0, x_hi: 1e-8, num_x: 101, n_max: 15000, grid_points: 1 << 18 }
    }
}

impl ScanSpec {
    fn validate(&self, cfg: &PhysicalConfig) -> Result<()> {
        if !(self.t >= 0.0) {
            return Err(Error::InvalidParameter(format!("t = {} must be >= 0", self.t)));
        }
        if !(self.x_lo >= 0.0 && self.x_lo < self.x_hi && self.x_hi < cfg.l0) {
            return Err(Error::InvalidParameter(format!("need 0 <= x_lo < x_hi < L0, got [{}, {}]", self.x_lo, self.x_hi)));
        }
        if self.num_x < 2 {
            return Err(Error::InvalidParameter("num_x must be >= 2".into()));
        }
        Ok(())
    }
}

/// Policy able to evaluate every Bessel value met by a scan at `cfg`: the
/// Hankel sum is taken to convergence and the regime threshold raised to
/// twice the largest `k_1²/z` on the cavity.
pub fn control_policy(cfg: &PhysicalConfig, base: &AsymptoticPolicy) -> AsymptoticPolicy {
    let k = cfg.k_n(1);
    let z_min = cfg.l0 * (1.0 - cfg.beta * cfg.beta).sqrt() / (cfg.lambda_c() * cfg.beta);
    let needed = 2.0 * k * k / z_min;
    AsymptoticPolicy {
        max_terms: base.max_terms.max(60),
        regime_threshold: base.regime_threshold.max(needed),
        precision_bits: base.precision_bits,
        tolerance: base.tolerance.min(1e-17),
    }
}

struct ScanData {
    grid: Vec<f64>,
    js: CurrentProfile,
    je: CurrentProfile,
    delta: CurrentProfile,
    /// `|Σ c_n Φ(0,x)|`, `|Ψ(0,x)|` and their complex difference on the scan grid
    initial: Vec<[f64; 3]>,
    expansion: SpectralExpansion,
    norm_constant: f64,
}

fn scan_currents(cfg: &PhysicalConfig, spec: &ScanSpec, policy: &AsymptoticPolicy, exec: Exec) -> Result<ScanData> {
    spec.validate(cfg)?;
    let mode = ModeData::particle(cfg, 1);
    let samples = spectral::sample_initial_state(cfg, mode, spec.grid_points, policy, exec)?;
    let (expansion, _) = spectral::expand_samples(cfg, &samples, spec.n_max, Scheme::CompositeSimpson)?;
    let state = MovingState::with_norm(cfg, mode, *policy, samples.norm_constant);
    let grid = linspace(spec.x_lo, spec.x_hi, spec.num_x);

    let stat = StaticEvolution::new(&expansion, cfg, spec.t);
    let js = CurrentProfile::from_state(|_, x| stat.sample(x), cfg, spec.t, &grid, ProfileLabel::Static, exec)?;
    let je = CurrentProfile::from_state(|t, x| state.sample(t, x), cfg, spec.t, &grid, ProfileLabel::Expanding, exec)?;
    let delta = js.difference(&je)?;

    let stat0 = StaticEvolution::new(&expansion, cfg, 0.0);
    let initial = exec::try_map(exec, &grid, |&x| -> Result<[f64; 3]> {
        let (a, b) = (stat0.sample(x)?.value, state.sample(0.0, x)?.value);
        Ok([a.norm(), b.norm(), (a - b).norm()])
    })?;
    Ok(ScanData { grid, js, je, delta, initial, expansion, norm_constant: samples.norm_constant })
}

fn current_table(name: &str, d: &ScanData) -> Result<Table> {
    let mut t = Table::new(name, &["x_m", "j_static", "j_expanding", "delta"]);
    for i in 0..d.grid.len() {
        t.push(vec![d.grid[i].into(), d.js.j[i].into(), d.je.j[i].into(), d.delta.j[i].into()])?;
    }
    Ok(t)
}

/// Static-cavity current `j_s` against the expanding-cavity current `j_e`
/// on `[x_lo, x_hi]` at time `t`, both starting from `Ψ−,1(0, ·)`.
pub fn current_difference_scan(cfg: &PhysicalConfig, spec: &ScanSpec, policy: &AsymptoticPolicy, exec: Exec) -> Result<ExperimentReport> {
    let d = scan_currents(cfg, spec, policy, exec)?;
    let mut r = ExperimentReport::new(Scenario::CurrentDiff, cfg);
    r.set("t_s", format!("{:e}", spec.t));
    r.set("x_lo_m", format!("{:e}", spec.x_lo));
    r.set("x_hi_m", format!("{:e}", spec.x_hi));
    r.set("num_x", spec.num_x);
    r.set("n_max", spec.n_max);
    r.set("grid_points", spec.grid_points);
    r.note("quadrature", Scheme::CompositeSimpson.label());
    r.note("norm_constant", format!("{:.16e}", d.norm_constant));
    r.note_policy("", policy);

    r.tables.push(current_table("current", &d)?);
    let mut init = Table::new("initial_state", &["x_m", "abs_static", "abs_expanding", "abs_diff"]);
    for (x, v) in d.grid.iter().zip(&d.initial) {
        init.push(vec![(*x).into(), v[0].into(), v[1].into(), v[2].into()])?;
    }
    r.tables.push(init);
    let mut time = Table::new("causality", &["quantity", "value_s"]);
    let crossing = cfg.light_crossing_time(spec.x_hi);
    time.push(vec!["t".into(), spec.t.into()])?;
    time.push(vec!["light_crossing".into(), crossing.into()])?;
    r.tables.push(time);

    let last = d.grid.len() - 1;
    let js_hi = d.js.j[last];
    let dj_hi = d.delta.j[last];
    r.derive("light_crossing_time_s", crossing, "causality");
    r.derive("causally_disconnected", if spec.t < crossing { 1.0 } else { 0.0 }, "causality");
    r.derive("abs_delta_at_x_hi", dj_hi.abs(), "current");
    r.derive("rel_delta_at_x_hi", if js_hi != 0.0 { dj_hi.abs() / js_hi.abs() } else { f64::NAN }, "current");
    r.derive("sup_abs_delta", d.delta.sup_norm(), "current");
    r.derive("sup_j_static", d.js.sup_norm(), "current");
    r.derive("rel_sup_delta", d.delta.sup_norm() / d.js.sup_norm(), "current");
    let mismatch = d.initial.iter().map(|v| v[2]).fold(0.0, f64::max);
    let scale = d.initial.iter().map(|v| v[1]).fold(0.0, f64::max);
    r.derive("initial_state_mismatch", if scale > 0.0 { mismatch / scale } else { mismatch }, "initial_state");
    r.derive("completeness", d.expansion.completeness, "current");
    Ok(r)
}

/// The scan at `cfg`, plus the same scan with the wall speed lowered to
/// [`CONTROL_BETA`]. The control bounds the numerical floor of `Δj`.
pub fn current_difference_with_control(cfg: &PhysicalConfig, spec: &ScanSpec, policy: &AsymptoticPolicy, exec: Exec) -> Result<ExperimentReport> {
    let mut r = current_difference_scan(cfg, spec, policy, exec)?;
    let ctl_cfg = cfg.with_beta(CONTROL_BETA);
    let ctl_policy = control_policy(&ctl_cfg, policy);
    let d = scan_currents(&ctl_cfg, spec, &ctl_policy, exec)?;
    r.tables.push(current_table("control_current", &d)?);
    r.note("control_beta", format!("{CONTROL_BETA:e}"));
    r.note_policy("control_", &ctl_policy);
    let floor = d.delta.sup_norm() / d.js.sup_norm();
    r.derive("control_rel_sup_delta", floor, "control_current");
    let signal = r.scalar("rel_sup_delta").unwrap_or(f64::NAN);
    r.derive("signal_to_floor", signal / floor, "control_current");
    Ok(r)
}

/// `|c_n|` across `n` for `Ψ−,1(0, ·)`, the peak and the tail ratios.
pub fn coefficient_profile(cfg: &PhysicalConfig, n_max: usize, grid_points: usize, policy: &AsymptoticPolicy, exec: Exec) -> Result<ExperimentReport> {
    let (e, b) = spectral::expand_with_overlaps(cfg, n_max, grid_points, policy, exec)?;
    let mut r = ExperimentReport::new(Scenario::Coefficients, cfg);
    r.set("n_max", n_max);
    r.set("grid_points", grid_points);
    r.note("quadrature", e.scheme.label());
    r.note("projection", "dst-i");
    r.note_policy("", policy);

    let mut t = Table::new("coefficients", &["n", "re_c", "im_c", "abs_c", "abs_b"]);
    for (i, (c, bn)) in e.coefficients.iter().zip(&b).enumerate() {
        t.push(vec![(i + 1).into(), c.re.into(), c.im.into(), c.norm().into(), bn.norm().into()])?;
    }
    r.tables.push(t);

    let peak = e.peak_index();
    let cp = e.c(peak).norm();
    r.derive("peak_index", peak as f64, "coefficients");
    r.derive("abs_c_peak", cp, "coefficients");
    for n in RATIO_INDICES {
        if n <= n_max {
            r.derive(&format!("ratio_{n}"), e.c(n).norm() / cp, "coefficients");
        }
    }
    r.derive("completeness", e.completeness, "coefficients");
    r.derive("antiparticle_weight", b.iter().map(|v| v.norm_sqr()).sum(), "coefficients");
    r.derive("max_abs_b", b.iter().map(|v| v.norm()).fold(0.0, f64::max), "coefficients");
    r.derive("truncation_estimate", spectral::truncation_estimate(cfg) as f64, "coefficients");
    Ok(r)
}

/// Number of `j` with `v[j] < 0 <= v[j+1]`, ignoring the last sample.
pub fn upward_crossings(v: &[f64]) -> usize {
    if v.len() < 3 {
        return 0;
    }
    v[..v.len() - 1].windows(2).filter(|w| w[0] < 0.0 && w[1] >= 0.0).count()
}

/// Internal oscillations of `Re Ψ−,1(0, x)`: a direct count on the grid
/// against `(z(0,0) − z(0,L0))/(2π)` and the small-`β` formula.
pub fn oscillation_report(cfg: &PhysicalConfig, grid_points: usize, policy: &AsymptoticPolicy, exec: Exec) -> Result<ExperimentReport> {
    spectral::check_internal_resolution(cfg, grid_points)?;
    let mode = ModeData::particle(cfg, 1);
    let samples = spectral::sample_initial_state(cfg, mode, grid_points, policy, exec)?;
    let re: Vec<f64> = samples.g.iter().map(|v| v.re).collect();
    let h = cfg.l0 / grid_points as f64;
    let direct = upward_crossings(&re);
    let dz = (cavity_states::z_arg(cfg, 0.0, 0.0)? - cavity_states::z_arg(cfg, 0.0, cfg.l0)?) / (2.0 * std::f64::consts::PI);

    let mut r = ExperimentReport::new(Scenario::Oscillations, cfg);
    r.set("grid_points", grid_points);
    r.note("norm_constant", format!("{:.16e}", samples.norm_constant));
    r.note_policy("", policy);
    let stride = grid_points.div_ceil(MAX_PROFILE_ROWS).max(1);
    r.note("profile_stride", stride);
    let mut prof = Table::new("re_psi", &["x_m", "re_psi"]);
    for j in (0..=grid_points).step_by(stride) {
        let x = if j == grid_points { cfg.l0 } else { j as f64 * h };
        prof.push(vec![x.into(), re[j].into()])?;
    }
    r.tables.push(prof);
    let mut counts = Table::new("counts", &["method", "value"]);
    counts.push(vec!["direct_upward_crossings".into(), direct.into()])?;
    counts.push(vec!["z_difference_over_2pi".into(), dz.into()])?;
    counts.push(vec!["formula".into(), cfg.oscillation_estimate().into()])?;
    r.tables.push(counts);
    r.derive("direct_count", direct as f64, "counts");
    r.derive("z_oracle", dz, "counts");
    r.derive("formula_estimate", cfg.oscillation_estimate(), "counts");
    r.derive("count_minus_oracle", direct as f64 - dz, "counts");
    Ok(r)
}

/// Sweep settings for [`bessel_precision_sweep`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepSpec {
    pub z_log10_lo: f64,
    pub z_log10_hi: f64,
    pub steps: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec { z_log10_lo: 11.0, z_log10_hi: 13.0, steps: 201 }
    }
}

/// Summary of one arithmetic's `|d| = |d1 + i d2|` trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JumpStats {
    /// Largest ratio of neighbouring `|d|` values (upward only).
    pub max_ratio: f64,
    /// `log10 z` just after that step.
    pub at_log10_z: f64,
    /// Largest `|d|` before the step.
    pub before_max: f64,
    /// Smallest `|d|` from the step on.
    pub after_min: f64,
}

pub fn jump_stats(x: &[f64], d: &[f64]) -> JumpStats {
    let mut best = (1.0, 1);
    for i in 1..d.len() {
        let ratio = d[i] / d[i - 1];
        if ratio > best.0 {
            best = (ratio, i);
        }
    }
    let k = best.1.min(d.len().saturating_sub(1));
    let before_max = d[..k].iter().cloned().fold(0.0, f64::max);
    let after_min = d[k..].iter().cloned().fold(f64::INFINITY, f64::min);
    JumpStats { max_ratio: best.0, at_log10_z: x.get(k).copied().unwrap_or(f64::NAN), before_max, after_min }
}

/// `(log10 z, d1, d2)` rows for each arithmetic in `arithmetics`.
pub fn bessel_precision_sweep(
    order: Order,
    sweep: &SweepSpec,
    arithmetics: &[Arithmetic],
    policy: &AsymptoticPolicy,
    exec: Exec,
) -> Result<ExperimentReport> {
    if sweep.steps < 2 || !(sweep.z_log10_lo < sweep.z_log10_hi) {
        return Err(Error::InvalidParameter("sweep needs steps >= 2 and z_log10_lo < z_log10_hi".into()));
    }
    let xs = linspace(sweep.z_log10_lo, sweep.z_log10_hi, sweep.steps);
    let mut r = ExperimentReport {
        scenario: Scenario::BesselSweep,
        config: vec![
            ("nu".into(), format!("{:e}", order.nu())),
            ("z_log10_lo".into(), format!("{}", sweep.z_log10_lo)),
            ("z_log10_hi".into(), format!("{}", sweep.z_log10_hi)),
            ("sweep_steps".into(), format!("{}", sweep.steps)),
        ],
        tables: Vec::new(),
        scalars: Vec::new(),
        provenance: Vec::new(),
    };
    r.note_policy("", policy);
    let mut t = Table::new("sweep", &["nu", "log10_z", "d1", "d2", "method"]);
    let mut traces = Vec::new();
    for &a in arithmetics {
        let rows = exec::try_map(exec, &xs, |&x| bessel_im::precision_diagnostic(order, 10f64.powf(x), policy, a))?;
        for (x, d) in xs.iter().zip(&rows) {
            t.push(vec![order.nu().into(), (*x).into(), d.d1.into(), d.d2.into(), Cell::Text(format!("{}_{}", a.label(), d.method.label()))])?;
        }
        traces.push((a, rows.iter().map(|d| d.d1.hypot(d.d2)).collect::<Vec<f64>>()));
    }
    r.tables.push(t);
    for (a, mags) in traces {
        let s = jump_stats(&xs, &mags);
        let p = a.label();
        r.derive(&format!("{p}_max_step_ratio"), s.max_ratio, "sweep");
        r.derive(&format!("{p}_step_log10_z"), s.at_log10_z, "sweep");
        r.derive(&format!("{p}_before_step_max"), s.before_max, "sweep");
        r.derive(&format!("{p}_after_step_min"), s.after_min, "sweep");
        r.derive(&format!("{p}_max_abs_d"), sup(&mags), "sweep");
    }
    Ok(r)
}

/// Non-relativistic comparison of `Ψ−,n(t, ·)` with the moving-wall
/// Schrödinger state: normalised overlap, current against
/// `2xβc/L² sin²(nπx/L)`, and the phase check at mid-cavity.
pub fn limit_check(cfg: &PhysicalConfig, n: u32, t: f64, num_points: usize, policy: &AsymptoticPolicy, exec: Exec) -> Result<ExperimentReport> {
    if !cfg.is_nonrelativistic() {
        return Err(Error::Regime(format!("limit check needs beta << 1 and L0 >> lambda_C (beta = {})", cfg.beta)));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("t = {t} must be >= 0")));
    }
    let mode = ModeData::new(cfg, n, cavity_states::Branch::Particle)?;
    let state = MovingState::new(cfg, mode, *policy, num_points.saturating_sub(1))?;
    let l = cavity_states::wall_position(cfg, t);
    let quad = QuadratureSpec::new(num_points, Scheme::CompositeSimpson, 0.0, l)?;
    let grid = quad.grid();
    let kg = exec::try_map(exec, &grid, |&x| state.sample(t, x))?;
    let nr = exec::try_map(exec, &grid, |&x| cavity_states::schrodinger_moving(cfg, n, t, x))?;

    let cross = quad.integrate(exec, |i| kg[i].value.conj() * nr[i].value);
    let na = quad.integrate(exec, |i| Complex64::new(kg[i].value.norm_sqr(), 0.0)).re;
    let nb = quad.integrate(exec, |i| Complex64::new(nr[i].value.norm_sqr(), 0.0)).re;
    let overlap = cross.norm() / (na * nb).sqrt();

    let v = cfg.wall_speed();
    let formula = |x: f64| {
        let s = cavity_states::sin_cos_pi(n as f64 * (x / l)).0;
        2.0 * x * v / (l * l) * s * s
    };
    let mut r = ExperimentReport::new(Scenario::LimitCheck, cfg);
    r.set("n", n);
    r.set("t_s", format!("{t:e}"));
    r.set("num_points", num_points);
    r.note("norm_constant", format!("{:.16e}", state.norm_constant()));
    r.note_policy("", policy);
    let mut tab = Table::new("limit", &["x_m", "j_kg", "j_formula", "j_schrodinger", "abs_psi_kg", "abs_psi_schrodinger"]);
    for i in 0..grid.len() {
        tab.push(vec![
            grid[i].into(),
            observables::kg_current(&kg[i], cfg).into(),
            formula(grid[i]).into(),
            observables::schrodinger_current(&nr[i], cfg).into(),
            kg[i].value.norm().into(),
            nr[i].value.norm().into(),
        ])?;
    }
    r.tables.push(tab);

    let xm = 0.5 * l;
    let jm = observables::kg_current(&state.sample(t, xm)?, cfg);
    let fm = formula(xm);
    let phase = cavity_states::nonrel_phase_check(cfg, &mode, t, xm, policy)?;
    let mut mid = Table::new("mid_cavity", &["quantity", "value"]);
    mid.push(vec!["x_m".into(), xm.into()])?;
    mid.push(vec!["j_kg".into(), jm.into()])?;
    mid.push(vec!["j_formula".into(), fm.into()])?;
    mid.push(vec!["phase_residual_rad".into(), phase.into()])?;
    r.tables.push(mid);
    r.derive("overlap", overlap, "limit");
    r.derive("overlap_deficit", 1.0 - overlap, "limit");
    r.derive("mid_current_rel_error", ((jm - fm) / fm).abs(), "mid_cavity");
    r.derive("mid_phase_residual", phase, "mid_cavity");
    Ok(r)
}

/// Truncation and grid convergence of the current-difference scan and the
/// coefficients.
pub fn convergence_study(cfg: &PhysicalConfig, spec: &ScanSpec, n_max_values: &[usize], policy: &AsymptoticPolicy, exec: Exec) -> Result<ExperimentReport> {
    if n_max_values.len() < 2 {
        return Err(Error::InvalidParameter("convergence study needs at least two n_max values".into()));
    }
    spec.validate(cfg)?;
    let mode = ModeData::particle(cfg, 1);
    let mut r = ExperimentReport::new(Scenario::Convergence, cfg);
    r.set("t_s", format!("{:e}", spec.t));
    r.set("x_lo_m", format!("{:e}", spec.x_lo));
    r.set("x_hi_m", format!("{:e}", spec.x_hi));
    r.set("num_x", spec.num_x);
    r.set("grid_points", spec.grid_points);
    r.set("n_max_values", n_max_values.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" "));
    r.note_policy("", policy);

    let n_top = *n_max_values.iter().max().unwrap_or(&1);
    let samples = spectral::sample_initial_state(cfg, mode, spec.grid_points, policy, exec)?;
    let (full, full_b) = spectral::expand_samples(cfg, &samples, n_top, Scheme::CompositeSimpson)?;
    let state = MovingState::with_norm(cfg, mode, *policy, samples.norm_constant);
    let grid = linspace(spec.x_lo, spec.x_hi, spec.num_x);
    let je = CurrentProfile::from_state(|t, x| state.sample(t, x), cfg, spec.t, &grid, ProfileLabel::Expanding, exec)?;

    let mut cols = vec!["x_m".to_string()];
    let mut curves = Vec::new();
    let mut comp = Table::new("completeness", &["n_max", "sum_abs_c2", "sum_abs_b2", "deficit"]);
    for &n in n_max_values {
        let e = full.truncated(n);
        let stat = StaticEvolution::new(&e, cfg, spec.t);
        let js = CurrentProfile::from_state(|_, x| stat.sample(x), cfg, spec.t, &grid, ProfileLabel::Static, exec)?;
        curves.push(js.difference(&je)?);
        cols.push(format!("delta_n{n}"));
        let bsum: f64 = full_b[..n.min(full_b.len())].iter().map(|b| b.norm_sqr()).sum();
        comp.push(vec![n.into(), e.completeness.into(), bsum.into(), (1.0 - e.completeness - bsum).into()])?;
    }
    let col_refs: Vec<&str> = cols.iter().map(|s| s.as_str()).collect();
    let mut dt = Table::new("delta_by_n_max", &col_refs);
    for i in 0..grid.len() {
        let mut row = vec![Cell::Real(grid[i])];
        row.extend(curves.iter().map(|c| Cell::Real(c.j[i])));
        dt.push(row)?;
    }
    r.tables.push(dt);
    r.tables.push(comp);
    for w in 0..n_max_values.len() - 1 {
        let (a, b) = (&curves[w], &curves[w + 1]);
        let diff: Vec<f64> = a.j.iter().zip(&b.j).map(|(x, y)| x - y).collect();
        let name = format!("delta_sup_change_n{}_n{}", n_max_values[w], n_max_values[w + 1]);
        r.derive(&name, sup(&diff) / b.sup_norm(), "delta_by_n_max");
    }

    // grid doubling of the coefficients
    let fine = spectral::sample_initial_state(cfg, mode, 2 * spec.grid_points, policy, exec)?;
    let (fine_e, _) = spectral::expand_samples(cfg, &fine, n_top, Scheme::CompositeSimpson)?;
    let mut gd = Table::new("grid_doubling", &["n", "abs_c_grid", "abs_c_double_grid", "abs_change"]);
    let stride = (n_top / 1000).max(1);
    let mut worst: f64 = 0.0;
    for i in 0..n_top {
        let ch = (full.coefficients[i] - fine_e.coefficients[i]).norm();
        worst = worst.max(ch);
        if i % stride == 0 || i + 1 == n_top {
            gd.push(vec![(i + 1).into(), full.coefficients[i].norm().into(), fine_e.coefficients[i].norm().into(), ch.into()])?;
        }
    }
    r.tables.push(gd);
    r.note("grid_doubling_stride", stride);
    r.derive("grid_doubling_max_change", worst / full.c(full.peak_index()).norm(), "grid_doubling");
    Ok(r)
}
