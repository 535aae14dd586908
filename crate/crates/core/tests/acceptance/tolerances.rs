//! Targets and tolerances of the acceptance run.

/// Mode index of the largest coefficient.
pub const PEAK_INDEX: usize = 4551;
/// `(n, |c_n/c_peak|, tolerance, relative?)`
pub const RATIOS: [(usize, f64, f64, bool); 3] = [(9000, 0.0312, 0.0005, false), (10000, 2.6148e-5, 0.02, true), (15000, 5.7616e-7, 0.02, true)];
pub const MAX_RUNTIME_S: f64 = 600.0;

pub const MAX_ANTIPARTICLE_OVERLAP: f64 = 1e-13;

pub const REL_DIFF_WINDOW: (f64, f64) = (0.01, 0.03);
pub const LIGHT_CROSSING_S: f64 = 3.3e-15;
/// Half a unit in the last quoted digit.
pub const LIGHT_CROSSING_TOL_S: f64 = 0.05e-15;
pub const N_MAX_PAIR: [usize; 2] = [10000, 15000];
pub const N_MAX_SUP_CHANGE: f64 = 0.01;
pub const SIGNAL_OVER_FLOOR: f64 = 10.0;

pub const SWEEP_NU_OVER_PI: f64 = 100.0;
pub const STEP_WINDOW: (f64, f64) = (11.5, 13.0);
/// Levels before and after the step, each within a decade.
pub const PRE_STEP_LEVEL: f64 = 1e-7;
pub const POST_STEP_LEVEL: f64 = 1e-4;
pub const LEVEL_DECADES: f64 = 1.0;
/// A step is a jump of at least this factor between neighbouring sweep points.
pub const MIN_STEP_RATIO: f64 = 10.0;

pub const ORTHONORMALITY: f64 = 1e-8;
pub const WRONSKIAN_REL: f64 = 1e-9;
pub const SERIES_REGIME: f64 = 1e-3;
pub const MID_CURRENT_REL: f64 = 1e-3;
pub const OVERLAP_DEFICIT: f64 = 1e-4;
pub const LIMIT_BETA: f64 = 1e-3;
/// Refinement ratio accepted as second order (exact value 4).
pub const SECOND_ORDER_RATIO: (f64, f64) = (3.5, 4.5);

pub const CROSSING_SLACK: f64 = 2.0;
pub const REFERENCE_OSCILLATIONS: f64 = 500.0;
