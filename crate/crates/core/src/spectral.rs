//! Projection of a moving-wall state onto the static-well eigenstates.
//!
//! At `t = 0` both bases live on `[0, L0]`. With `F = iħ∂tΨ` and `G = Ψ`
//! sampled once on a uniform grid,
//!
//! ```text
//! c_n = (Φ−,n, Ψ)_KG = N_n (S_F(n) + E_n S_G(n))
//! b_n = (Φ+,n, Ψ)_KG = N_n (S_F(n) − E_n S_G(n))
//! S_X(n) = ∫ sin(nπx/L0) X(x) dx
//! ```
//!
//! The sine integrals for all `n` come from two DST-I transforms per sample
//! array; composite Simpson is `(4 T_h − T_2h)/3` with each trapezoid sum a
//! DST on the full or the even-indexed grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::bessel_im::AsymptoticPolicy;
use crate::cavity_states::{self, Branch, ComplexSample, ModeData, MovingState, PhysicalConfig};
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::observables::Scheme;

/// Sample points per shortest wavelength demanded of the projection grid.
pub const MIN_POINTS_PER_WAVELENGTH: f64 = 8.0;

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralExpansion {
    /// `c_n` for `n = 1..=n_max` (index `n − 1`)
    pub coefficients: Vec<Complex64>,
    pub n_max: usize,
    /// Number of subintervals of `[0, L0]`.
    pub grid_points: usize,
    pub scheme: Scheme,
    /// `Σ |c_n|²`
    pub completeness: f64,
}

impl SpectralExpansion {
    pub fn c(&self, n: usize) -> Complex64 {
        self.coefficients[n - 1]
    }

    /// Index `n` of the largest `|c_n|`.
    pub fn peak_index(&self) -> usize {
        let mut best = 0;
        for (i, c) in self.coefficients.iter().enumerate() {
            if c.norm() > self.coefficients[best].norm() {
                best = i;
            }
        }
        best + 1
    }

    pub fn truncated(&self, n_max: usize) -> Self {
        let n = n_max.min(self.n_max);
        let coefficients = self.coefficients[..n].to_vec();
        let completeness = coefficients.iter().map(|c| c.norm_sqr()).sum();
        SpectralExpansion { coefficients, n_max: n, grid_points: self.grid_points, scheme: self.scheme, completeness }
    }
}

/// `F = iħ∂tΨ` and `G = Ψ` at `t = 0` on `x_j = j L0 / intervals`.
#[derive(Clone, Debug)]
pub struct InitialSamples {
    pub intervals: usize,
    pub f: Vec<Complex64>,
    pub g: Vec<Complex64>,
    /// Normalisation constant applied to the moving state.
    pub norm_constant: f64,
}

/// Overlaps with the particle (`c`) and antiparticle (`b`) static modes.
#[derive(Clone, Debug)]
pub struct Projection {
    pub c: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

/// Errors unless `intervals` steps over `[0, L0]` give at least
/// [`MIN_POINTS_PER_WAVELENGTH`] points per internal wavelength of the boosted state.
pub fn check_internal_resolution(cfg: &PhysicalConfig, intervals: usize) -> Result<()> {
    let h = cfg.l0 / intervals as f64;
    // shortest internal wavelength 2π/|∂z/∂x| at the moving wall
    let b = cfg.beta;
    let internal = 2.0 * PI * cfg.lambda_c() * (1.0 - b * b).sqrt() / b;
    if internal < MIN_POINTS_PER_WAVELENGTH * h {
        return Err(Error::Resolution(format!(
            "internal wavelength {internal:.3e} m spans fewer than {MIN_POINTS_PER_WAVELENGTH} grid steps of {h:.3e} m"
        )));
    }
    Ok(())
}

fn check_resolution(cfg: &PhysicalConfig, n_max: usize, intervals: usize) -> Result<()> {
    if n_max < 1 {
        return Err(Error::InvalidParameter("n_max must be >= 1".into()));
    }
    if intervals < 4 || intervals % 2 != 0 {
        return Err(Error::InvalidParameter(format!("grid_points must be an even interval count >= 4, got {intervals}")));
    }
    let h = cfg.l0 / intervals as f64;
    let sine_wavelength = 2.0 * cfg.l0 / n_max as f64;
    if sine_wavelength < MIN_POINTS_PER_WAVELENGTH * h {
        return Err(Error::Resolution(format!(
            "n_max = {n_max} needs at least {} intervals",
            (MIN_POINTS_PER_WAVELENGTH * n_max as f64 / 2.0).ceil()
        )));
    }
    check_internal_resolution(cfg, intervals)
}

/// Samples the normalised moving-wall state `mode` at `t = 0`.
pub fn sample_initial_state(cfg: &PhysicalConfig, mode: ModeData, intervals: usize, policy: &AsymptoticPolicy, exec: Exec) -> Result<InitialSamples> {
    cfg.validate()?;
    if intervals < 2 || intervals % 2 != 0 {
        return Err(Error::InvalidParameter(format!("grid_points must be an even interval count, got {intervals}")));
    }
    let raw = MovingState::with_norm(cfg, mode, *policy, 1.0);
    let h = cfg.l0 / intervals as f64;
    let samples = exec::try_map_range(exec, intervals + 1, |j| {
        let x = if j == intervals { cfg.l0 } else { j as f64 * h };
        raw.sample(0.0, x)
    })?;
    let ih = Complex64::new(0.0, cfg.hbar);
    // Simpson KG self-norm of the raw samples
    let kg = exec::sum_complex(exec, intervals + 1, |j| {
        let w = if j == 0 || j == intervals {
            1.0
        } else if j % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let s = &samples[j];
        ih * (s.value.conj() * s.dt - s.dt.conj() * s.value) * (w * h / 3.0)
    })
    .re;
    if kg * mode.branch.norm_sign() <= 0.0 {
        return Err(Error::Regime(format!("KG self-norm {kg:e} has the wrong sign for the {:?} branch", mode.branch)));
    }
    let norm = 1.0 / kg.abs().sqrt();
    let f = samples.iter().map(|s| ih * s.dt * norm).collect();
    let g = samples.iter().map(|s| s.value * norm).collect();
    Ok(InitialSamples { intervals, f, g, norm_constant: norm })
}

/// `S_n = Σ_{j=1..K} y_j sin(πnj/(K+1))` for `n = 1..=K`.
pub fn dst1(y: &[Complex64]) -> Vec<Complex64> {
    let k = y.len();
    let m = 2 * (k + 1);
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (j, v) in y.iter().enumerate() {
        buf[j + 1] = *v;
        buf[m - j - 1] = -*v;
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(m).process(&mut buf);
    // Σ y_j (e^{−iθ} − e^{iθ}) = −2i S_n
    buf[1..=k].iter().map(|v| Complex64::new(0.0, 0.5) * v).collect()
}

/// `∫ sin(nπx/L0) X(x) dx` for `n = 1..=n_max` from samples on the full grid.
fn sine_integrals(x: &[Complex64], intervals: usize, n_max: usize, h: f64, scheme: Scheme) -> Vec<Complex64> {
    let full = dst1(&x[1..intervals]);
    match scheme {
        Scheme::Trapezoid => full[..n_max].iter().map(|v| v * h).collect(),
        Scheme::CompositeSimpson => {
            let even: Vec<Complex64> = (1..intervals / 2).map(|i| x[2 * i]).collect();
            let half = dst1(&even);
            (0..n_max).map(|i| (full[i] * (4.0 * h) - half[i] * (2.0 * h)) / 3.0).collect()
        }
    }
}

fn combine(cfg: &PhysicalConfig, sf: &[Complex64], sg: &[Complex64]) -> Projection {
    let mut c = Vec::with_capacity(sf.len());
    let mut b = Vec::with_capacity(sf.len());
    for (i, (f, g)) in sf.iter().zip(sg).enumerate() {
        let n = i as u32 + 1;
        let e = cfg.e_n(n);
        let norm = 1.0 / (e * cfg.l0).sqrt();
        c.push((f + g * e) * norm);
        b.push((f - g * e) * norm);
    }
    Projection { c, b }
}

/// Transform-based projection of sampled data.
pub fn project_dst(cfg: &PhysicalConfig, samples: &InitialSamples, n_max: usize, scheme: Scheme) -> Result<Projection> {
    let m = samples.intervals;
    let limit = if scheme == Scheme::CompositeSimpson { m / 2 - 1 } else { m - 1 };
    if n_max > limit {
        return Err(Error::Resolution(format!("n_max = {n_max} exceeds the {limit} modes resolvable on {m} intervals")));
    }
    let h = cfg.l0 / m as f64;
    let sf = sine_integrals(&samples.f, m, n_max, h, scheme);
    let sg = sine_integrals(&samples.g, m, n_max, h, scheme);
    Ok(combine(cfg, &sf, &sg))
}

/// Direct quadrature per `n`, `O(N n_max)`; for cross-checks.
pub fn project_direct(cfg: &PhysicalConfig, samples: &InitialSamples, n_max: usize, scheme: Scheme, exec: Exec) -> Result<Projection> {
    let m = samples.intervals;
    let h = cfg.l0 / m as f64;
    let weight = |j: usize| match scheme {
        Scheme::Trapezoid => h,
        Scheme::CompositeSimpson => {
            if j % 2 == 1 {
                4.0 * h / 3.0
            } else {
                2.0 * h / 3.0
            }
        }
    };
    let pairs = exec::map_range(exec, n_max, |i| {
        let n = (i + 1) as f64;
        let mut sf = Complex64::new(0.0, 0.0);
        let mut sg = Complex64::new(0.0, 0.0);
        for j in 1..m {
            let s = cavity_states::sin_cos_pi(n * j as f64 / m as f64).0 * weight(j);
            sf += samples.f[j] * s;
            sg += samples.g[j] * s;
        }
        (sf, sg)
    });
    let (sf, sg): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    Ok(combine(cfg, &sf, &sg))
}

/// Expansion of `Ψ−,1(0, x)` over `Φ−,n`, with the antiparticle overlaps.
pub fn expand_with_overlaps(
    cfg: &PhysicalConfig,
    n_max: usize,
    grid_points: usize,
    policy: &AsymptoticPolicy,
    exec: Exec,
) -> Result<(SpectralExpansion, Vec<Complex64>)> {
    expand_mode(cfg, ModeData::particle(cfg, 1), n_max, grid_points, policy, Scheme::CompositeSimpson, exec)
}

/// Expansion of an arbitrary moving-wall mode.
pub fn expand_mode(
    cfg: &PhysicalConfig,
    mode: ModeData,
    n_max: usize,
    grid_points: usize,
    policy: &AsymptoticPolicy,
    scheme: Scheme,
    exec: Exec,
) -> Result<(SpectralExpansion, Vec<Complex64>)> {
    check_resolution(cfg, n_max, grid_points)?;
    let samples = sample_initial_state(cfg, mode, grid_points, policy, exec)?;
    expand_samples(cfg, &samples, n_max, scheme)
}

/// Expansion of already sampled data.
pub fn expand_samples(cfg: &PhysicalConfig, samples: &InitialSamples, n_max: usize, scheme: Scheme) -> Result<(SpectralExpansion, Vec<Complex64>)> {
    check_resolution(cfg, n_max, samples.intervals)?;
    let proj = project_dst(cfg, samples, n_max, scheme)?;
    let completeness = proj.c.iter().map(|c| c.norm_sqr()).sum();
    let exp = SpectralExpansion { coefficients: proj.c, n_max, grid_points: samples.intervals, scheme, completeness };
    Ok((exp, proj.b))
}

pub fn expand_initial_state(cfg: &PhysicalConfig, n_max: usize, grid_points: usize, policy: &AsymptoticPolicy) -> Result<SpectralExpansion> {
    Ok(expand_with_overlaps(cfg, n_max, grid_points, policy, Exec::default())?.0)
}

pub fn antiparticle_overlaps(cfg: &PhysicalConfig, n_max: usize, grid_points: usize, policy: &AsymptoticPolicy) -> Result<Vec<Complex64>> {
    Ok(expand_with_overlaps(cfg, n_max, grid_points, policy, Exec::default())?.1)
}

/// `Σ c_n Φ−,n(t, ·)` with the per-mode time factors computed once.
#[derive(Clone, Debug)]
pub struct StaticEvolution {
    cfg: PhysicalConfig,
    t: f64,
    /// `c_n N_n e^{−iE_n t/ħ}`
    factors: Vec<Complex64>,
    omegas: Vec<f64>,
}

impl StaticEvolution {
    pub fn new(expansion: &SpectralExpansion, cfg: &PhysicalConfig, t: f64) -> Self {
        let mut factors = Vec::with_capacity(expansion.n_max);
        let mut omegas = Vec::with_capacity(expansion.n_max);
        for (i, c) in expansion.coefficients.iter().enumerate() {
            let n = i as u32 + 1;
            let e = cfg.e_n(n);
            let norm = 1.0 / (e * cfg.l0).sqrt();
            factors.push(c * norm * cavity_states::time_phase(cfg, n, t, -1.0));
            omegas.push(e / cfg.hbar);
        }
        StaticEvolution { cfg: *cfg, t, factors, omegas }
    }

    pub fn sample(&self, x: f64) -> Result<ComplexSample> {
        if !(x >= 0.0 && x <= self.cfg.l0) {
            return Err(Error::Domain { x, len: self.cfg.l0 });
        }
        let u = x / self.cfg.l0;
        let k0 = PI / self.cfg.l0;
        let mut value = Complex64::new(0.0, 0.0);
        let mut dt = Complex64::new(0.0, 0.0);
        let mut dx = Complex64::new(0.0, 0.0);
        for (i, (f, w)) in self.factors.iter().zip(&self.omegas).enumerate() {
            let n = (i + 1) as f64;
            let (s, c) = cavity_states::sin_cos_pi(n * u);
            let v = f * s;
            value += v;
            dt += v * Complex64::new(0.0, -w);
            dx += f * (c * n * k0);
        }
        Ok(ComplexSample { value, dt, dx, t: self.t, x })
    }
}

pub fn evolve_static(expansion: &SpectralExpansion, cfg: &PhysicalConfig, t: f64, x: f64) -> Result<ComplexSample> {
    StaticEvolution::new(expansion, cfg, t).sample(x)
}

/// Recommended `n_max`: `safety × βL0/(πλ_C)`, at least 1.
pub fn truncation_estimate_with(cfg: &PhysicalConfig, safety: f64) -> usize {
    let scale = cfg.beta * cfg.l0 / (PI * cfg.lambda_c());
    ((safety * scale).ceil() as usize).max(1)
}

pub fn truncation_estimate(cfg: &PhysicalConfig) -> usize {
    truncation_estimate_with(cfg, 4.0)
}

/// Antiparticle flavour of `mode` (used for symmetry checks).
pub fn mirror(mode: &ModeData) -> ModeData {
    let branch = match mode.branch {
        Branch::Particle => Branch::Antiparticle,
        Branch::Antiparticle => Branch::Particle,
    };
    ModeData { branch, ..*mode }
}
