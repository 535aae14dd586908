//! KG density, current and scalar product, plus the continuity check and the
//! weak value of momentum.
//!
//! ```text
//! ρ = iħ(Φ* ∂tΦ − ∂tΦ* Φ)       = −2ħ Im(Φ* ∂tΦ)
//! j = −iħc²(Φ* ∂xΦ − ∂xΦ* Φ)    =  2ħc² Im(Φ* ∂xΦ)
//! (Φ, Ξ) = ∫ dx (Φ* iħ ∂tΞ − iħ ∂tΦ* Ξ)
//! ```

use num_complex::Complex64;

use crate::cavity_states::{ComplexSample, PhysicalConfig};
use crate::error::{Error, Result};
use crate::exec::{self, Exec};

pub fn kg_density(sample: &ComplexSample, cfg: &PhysicalConfig) -> f64 {
    -2.0 * cfg.hbar * (sample.value.conj() * sample.dt).im
}

pub fn kg_current(sample: &ComplexSample, cfg: &PhysicalConfig) -> f64 {
    2.0 * cfg.hbar * cfg.c * cfg.c * (sample.value.conj() * sample.dx).im
}

/// `|ψ|²` for a Schrödinger wavefunction.
pub fn schrodinger_density(sample: &ComplexSample) -> f64 {
    sample.value.norm_sqr()
}

/// `(ħ/m) Im(ψ* ∂xψ)`.
pub fn schrodinger_current(sample: &ComplexSample, cfg: &PhysicalConfig) -> f64 {
    cfg.hbar / cfg.mass * (sample.value.conj() * sample.dx).im
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    CompositeSimpson,
    Trapezoid,
}

impl Scheme {
    pub fn label(self) -> &'static str {
        match self {
            Scheme::CompositeSimpson => "composite_simpson",
            Scheme::Trapezoid => "trapezoid",
        }
    }

    /// Order of the leading error term on smooth integrands.
    pub fn order(self) -> u32 {
        match self {
            Scheme::CompositeSimpson => 4,
            Scheme::Trapezoid => 2,
        }
    }
}

/// Uniform grid with endpoints on `[x_lo, x_hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub num_points: usize,
    pub scheme: Scheme,
    pub x_lo: f64,
    pub x_hi: f64,
}

impl QuadratureSpec {
    pub fn new(num_points: usize, scheme: Scheme, x_lo: f64, x_hi: f64) -> Result<Self> {
        if num_points < 2 {
            return Err(Error::InvalidParameter("quadrature needs at least 2 points".into()));
        }
        if !(x_lo < x_hi) {
            return Err(Error::InvalidParameter(format!("empty quadrature domain [{x_lo}, {x_hi}]")));
        }
        if scheme == Scheme::CompositeSimpson && num_points % 2 == 0 {
            return Err(Error::InvalidParameter(format!("composite Simpson needs an odd point count, got {num_points}")));
        }
        Ok(QuadratureSpec { num_points, scheme, x_lo, x_hi })
    }

    pub fn spacing(&self) -> f64 {
        (self.x_hi - self.x_lo) / (self.num_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.num_points {
            self.x_hi
        } else {
            self.x_lo + i as f64 * self.spacing()
        }
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.num_points).map(|i| self.point(i)).collect()
    }

    pub fn weight(&self, i: usize) -> f64 {
        let h = self.spacing();
        let last = self.num_points - 1;
        match self.scheme {
            Scheme::Trapezoid => {
                if i == 0 || i == last {
                    0.5 * h
                } else {
                    h
                }
            }
            Scheme::CompositeSimpson => {
                if i == 0 || i == last {
                    h / 3.0
                } else if i % 2 == 1 {
                    4.0 * h / 3.0
                } else {
                    2.0 * h / 3.0
                }
            }
        }
    }

    /// `∫ f` over the grid.
    pub fn integrate<F>(&self, exec: Exec, f: F) -> Complex64
    where
        F: Fn(usize) -> Complex64 + Sync + Send,
    {
        exec::sum_complex(exec, self.num_points, |i| f(i) * self.weight(i))
    }
}

fn check_grid(samples: &[ComplexSample], quad: &QuadratureSpec, which: &str) -> Result<()> {
    if samples.len() != quad.num_points {
        return Err(Error::GridMismatch(format!("{which} has {} samples, quadrature expects {}", samples.len(), quad.num_points)));
    }
    let tol = 1e-9 * quad.spacing();
    for (i, s) in samples.iter().enumerate() {
        if (s.x - quad.point(i)).abs() > tol {
            return Err(Error::GridMismatch(format!("{which} sample {i} at x = {:e}, grid point {:e}", s.x, quad.point(i))));
        }
    }
    Ok(())
}

/// KG scalar product of two sampled states on the grid of `quad`.
pub fn kg_inner_product(bra: &[ComplexSample], ket: &[ComplexSample], quad: &QuadratureSpec, cfg: &PhysicalConfig) -> Result<Complex64> {
    check_grid(bra, quad, "bra")?;
    check_grid(ket, quad, "ket")?;
    let ih = Complex64::new(0.0, cfg.hbar);
    Ok(quad.integrate(Exec::default(), |i| {
        let (b, k) = (&bra[i], &ket[i]);
        ih * (b.value.conj() * k.dt - b.dt.conj() * k.value)
    }))
}

/// Maximum over interior grid points of `|∂tρ + ∂x j|`, both by central
/// differences (time step `dt_step`, space step equal to the grid spacing),
/// divided by the maximum of `|∂x j|`.
pub fn continuity_residual<F>(eval: F, cfg: &PhysicalConfig, t: f64, grid: &[f64], dt_step: f64) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<ComplexSample> + Sync + Send,
{
    if grid.len() < 3 {
        return Err(Error::InvalidParameter("continuity check needs at least 3 grid points".into()));
    }
    if !(dt_step > 0.0) || t - dt_step < 0.0 {
        return Err(Error::InvalidParameter(format!("time step {dt_step:e} must be positive and keep t - dt >= 0")));
    }
    let h = grid[1] - grid[0];
    let rows = exec::try_map(Exec::default(), &grid[1..grid.len() - 1], |&x| -> Result<(f64, f64)> {
        let rho_p = kg_density(&eval(t + dt_step, x)?, cfg);
        let rho_m = kg_density(&eval(t - dt_step, x)?, cfg);
        let j_p = kg_current(&eval(t, x + h)?, cfg);
        let j_m = kg_current(&eval(t, x - h)?, cfg);
        let drho = (rho_p - rho_m) / (2.0 * dt_step);
        let dj = (j_p - j_m) / (2.0 * h);
        Ok((drho + dj, dj))
    })?;
    let scale = rows.iter().fold(0.0f64, |m, r| m.max(r.1.abs()));
    let worst = rows.iter().fold(0.0f64, |m, r| m.max(r.0.abs()));
    if scale == 0.0 {
        return Ok(worst);
    }
    Ok(worst / scale)
}

/// `P^w = m j/ρ − iħ ∂xρ/(2ρ)`, defined only for non-relativistic settings.
pub fn weak_momentum(rho: f64, j: f64, drho_dx: f64, cfg: &PhysicalConfig) -> Result<Complex64> {
    if !cfg.is_nonrelativistic() {
        return Err(Error::Regime("weak momentum needs beta << 1 and L0 >> lambda_C".into()));
    }
    if rho == 0.0 {
        return Err(Error::DivisionByZero);
    }
    Ok(Complex64::new(cfg.mass * j / rho, -cfg.hbar * drho_dx / (2.0 * rho)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileLabel {
    Static,
    Expanding,
    Difference,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurrentProfile {
    pub grid: Vec<f64>,
    pub j: Vec<f64>,
    pub t: f64,
    pub label: ProfileLabel,
}

impl CurrentProfile {
    pub fn new(grid: Vec<f64>, j: Vec<f64>, t: f64, label: ProfileLabel) -> Result<Self> {
        if grid.len() != j.len() {
            return Err(Error::GridMismatch(format!("{} positions, {} current values", grid.len(), j.len())));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("current grid must be strictly increasing".into()));
        }
        if j.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("current profile contains non-finite values".into()));
        }
        Ok(CurrentProfile { grid, j, t, label })
    }

    /// Samples `eval` on `grid` at time `t`.
    pub fn from_state<F>(eval: F, cfg: &PhysicalConfig, t: f64, grid: &[f64], label: ProfileLabel, exec: Exec) -> Result<Self>
    where
        F: Fn(f64, f64) -> Result<ComplexSample> + Sync + Send,
    {
        let j = exec::try_map(exec, grid, |&x| eval(t, x).map(|s| kg_current(&s, cfg)))?;
        Self::new(grid.to_vec(), j, t, label)
    }

    /// `self − other` on a shared grid.
    pub fn difference(&self, other: &CurrentProfile) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("current profiles on different grids".into()));
        }
        let j = self.j.iter().zip(&other.j).map(|(a, b)| a - b).collect();
        Self::new(self.grid.clone(), j, self.t, ProfileLabel::Difference)
    }

    pub fn sup_norm(&self) -> f64 {
        self.j.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}
