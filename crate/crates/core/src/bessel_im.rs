//! Bessel functions `J_{±iν}(z)`, `Y_{±iν}(z)` of purely imaginary order for
//! real positive argument.
//!
//! Everything is built on the real pair
//!
//! ```text
//! J̃ν(z) = Re J_{iν}(z) / cosh(πν/2),    Ỹν(z) = Re Y_{iν}(z) / cosh(πν/2)
//! J_{iν} = cosh(πν/2) J̃ν + i sinh(πν/2) Ỹν
//! Y_{iν} = cosh(πν/2) Ỹν − i sinh(πν/2) J̃ν
//! ```
//!
//! Two evaluation paths produce the pair. For `ν²/z` below the policy
//! threshold the Hankel expansion in `1/z` is summed in binary64; otherwise the
//! ascending series is summed in extended precision (see [`crate::xprec`]).
//! `J_{-iν}(z)` is the complex conjugate of `J_{iν}(z)` for real `z`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::xprec::{self, XComplex, XFloat};

/// Largest `πν/2` for which `cosh(πν/2)` is finite in binary64.
const COSH_LIMIT: f64 = 710.475;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrderSign {
    Plus,
    Minus,
}

/// Imaginary order `±iν` with `ν ≥ 0` stored separately from the branch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Order {
    nu: f64,
    sign: OrderSign,
}

impl Order {
    pub fn new(nu: f64, sign: OrderSign) -> Result<Self> {
        if !nu.is_finite() || nu < 0.0 {
            return Err(Error::InvalidParameter(format!("order parameter nu = {nu} must be finite and >= 0")));
        }
        Ok(Order { nu, sign })
    }

    /// Branch taken from the sign of `nu`.
    pub fn from_signed(nu: f64) -> Result<Self> {
        let sign = if nu < 0.0 { OrderSign::Minus } else { OrderSign::Plus };
        Self::new(nu.abs(), sign)
    }

    pub fn plus(nu: f64) -> Self {
        Self::new(nu, OrderSign::Plus).expect("valid order")
    }

    pub fn minus(nu: f64) -> Self {
        Self::new(nu, OrderSign::Minus).expect("valid order")
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn sign(&self) -> OrderSign {
        self.sign
    }

    pub fn flipped(&self) -> Self {
        let sign = match self.sign {
            OrderSign::Plus => OrderSign::Minus,
            OrderSign::Minus => OrderSign::Plus,
        };
        Order { nu: self.nu, sign }
    }

    fn signed_tanh(&self) -> f64 {
        let t = (FRAC_PI_2 * self.nu).tanh();
        match self.sign {
            OrderSign::Plus => t,
            OrderSign::Minus => -t,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Series,
    Asymptotic,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Series => "series",
            Method::Asymptotic => "asymptotic",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalResult {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub method: Method,
    /// Value divided by `cosh(πν/2)`.
    pub scaled: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scaling {
    Scaled,
    Unscaled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arithmetic {
    Double,
    Extended,
}

impl Arithmetic {
    pub fn label(self) -> &'static str {
        match self {
            Arithmetic::Double => "double",
            Arithmetic::Extended => "extended",
        }
    }
}

/// Controls the choice between the Hankel expansion and the ascending series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticPolicy {
    /// Number of Hankel terms `A_s / z^s`, `s = 0..max_terms`, summed at most.
    pub max_terms: u32,
    /// Largest `ν²/z` for which the Hankel path is tried.
    pub regime_threshold: f64,
    /// Working precision of the series path.
    pub precision_bits: u32,
    /// Accuracy target for the first omitted Hankel term (relative to the
    /// leading amplitude). Summation stops early once a term falls below it.
    pub tolerance: f64,
}

impl Default for AsymptoticPolicy {
    fn default() -> Self {
        AsymptoticPolicy { max_terms: 2, regime_threshold: 1e-2, precision_bits: 256, tolerance: 1e-6 }
    }
}

impl AsymptoticPolicy {
    /// Sums the Hankel expansion to binary64 round-off.
    pub fn converged() -> Self {
        AsymptoticPolicy { max_terms: 60, regime_threshold: 1e-2, precision_bits: 256, tolerance: 1e-17 }
    }

    pub fn with_threshold(mut self, regime_threshold: f64) -> Self {
        self.regime_threshold = regime_threshold;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_terms < 1 {
            return Err(Error::InvalidParameter("max_terms must be >= 1".into()));
        }
        if !(self.regime_threshold > 0.0) {
            return Err(Error::InvalidParameter("regime_threshold must be > 0".into()));
        }
        if self.precision_bits < 53 {
            return Err(Error::InvalidParameter("precision_bits must be >= 53".into()));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::InvalidParameter("tolerance must be >= 0".into()));
        }
        Ok(())
    }

    pub fn in_regime(&self, nu: f64, z: f64) -> bool {
        nu * nu / z <= self.regime_threshold
    }
}

/// Argument `z = hi + lo` carried as an unevaluated sum so that the phase of
/// the oscillatory factor keeps the low-order part.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitArg {
    pub hi: f64,
    pub lo: f64,
}

impl SplitArg {
    pub fn new(hi: f64, lo: f64) -> Self {
        SplitArg { hi, lo }
    }

    pub fn value(&self) -> f64 {
        self.hi + self.lo
    }

    fn cos_sin(&self) -> (f64, f64) {
        let (sh, ch) = self.hi.sin_cos();
        if self.lo == 0.0 {
            return (ch, sh);
        }
        let (sl, cl) = self.lo.sin_cos();
        (ch * cl - sh * sl, sh * cl + ch * sl)
    }
}

impl From<f64> for SplitArg {
    fn from(z: f64) -> Self {
        SplitArg { hi: z, lo: 0.0 }
    }
}

/// `A_s(iν) = Π_{j=1..s} (4(iν)² − (2j−1)²) / (s! 8^s)`; real for real `ν`.
pub fn coefficient_a(s: u32, order: Order) -> Complex64 {
    let nu2 = order.nu * order.nu;
    let mut a = 1.0;
    for j in 1..=s {
        let odd = (2 * j - 1) as f64;
        a *= (-4.0 * nu2 - odd * odd) / (8.0 * j as f64);
    }
    Complex64::new(a, 0.0)
}

#[derive(Clone, Copy, Debug)]
struct HankelSums {
    p: f64,
    q: f64,
    dp: f64,
    dq: f64,
    omitted: f64,
}

fn hankel_sums(nu: f64, z: f64, max_terms: u32, tol: f64) -> HankelSums {
    let nu2 = nu * nu;
    let (mut p, mut q, mut dp, mut dq) = (0.0, 0.0, 0.0, 0.0);
    let mut u = 1.0;
    let mut s = 0u32;
    // terms may grow while s < ν²/(2z); growth past that hump is divergence
    let hump = nu2 / (2.0 * z);
    let omitted = loop {
        let sign = if (s / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let du = -(s as f64) * u / z;
        if s % 2 == 0 {
            p += sign * u;
            dp += sign * du;
        } else {
            q += sign * u;
            dq += sign * du;
        }
        let odd = (2 * s + 1) as f64;
        let next = u * (-4.0 * nu2 - odd * odd) / (8.0 * (s + 1) as f64 * z);
        s += 1;
        if s >= max_terms || next.abs() <= tol || (s as f64 > hump + 1.0 && next.abs() > u.abs()) {
            break next.abs();
        }
        u = next;
    };
    HankelSums { p, q, dp, dq, omitted }
}

/// `J̃ν, Ỹν` and their `z` derivatives, all real.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledPair {
    pub jt: f64,
    pub yt: f64,
    pub djt: f64,
    pub dyt: f64,
    pub err: f64,
    pub derr: f64,
    pub method: Method,
}

impl ScaledPair {
    /// `J_{±iν}/cosh(πν/2)` and its derivative.
    pub fn j_scaled(&self, order: Order) -> (Complex64, Complex64) {
        let t = order.signed_tanh();
        (Complex64::new(self.jt, t * self.yt), Complex64::new(self.djt, t * self.dyt))
    }

    /// `Y_{±iν}/cosh(πν/2)` and its derivative.
    pub fn y_scaled(&self, order: Order) -> (Complex64, Complex64) {
        let t = order.signed_tanh();
        (Complex64::new(self.yt, -t * self.jt), Complex64::new(self.dyt, -t * self.djt))
    }
}

fn hankel_pair(nu: f64, z: SplitArg, sums: &HankelSums) -> ScaledPair {
    let zv = z.value();
    let (cz, sz) = z.cos_sin();
    // cos/sin of z − π/4 without rounding z − π/4
    let ct = (cz + sz) * FRAC_1_SQRT_2;
    let st = (sz - cz) * FRAC_1_SQRT_2;
    let amp = (2.0 / (PI * zv)).sqrt();
    let h = Complex64::new(ct, st) * Complex64::new(sums.p, sums.q);
    let dh = Complex64::new(ct, st)
        * (Complex64::new(-0.5 / zv, 1.0) * Complex64::new(sums.p, sums.q) + Complex64::new(sums.dp, sums.dq));
    let _ = nu;
    ScaledPair {
        jt: amp * h.re,
        yt: amp * h.im,
        djt: amp * dh.re,
        dyt: amp * dh.im,
        err: amp * sums.omitted + f64::EPSILON * amp,
        derr: amp * sums.omitted * (1.0 + 1.0 / zv) + f64::EPSILON * amp,
        method: Method::Asymptotic,
    }
}

/// Evaluates `J̃ν, Ỹν` and derivatives, choosing the path from `policy`.
pub fn scaled_pair(nu: f64, z: SplitArg, policy: &AsymptoticPolicy) -> Result<ScaledPair> {
    policy.validate()?;
    let zv = z.value();
    if !(zv > 0.0) || !zv.is_finite() {
        return Err(Error::InvalidParameter(format!("Bessel argument z = {zv} must be positive and finite")));
    }
    if policy.in_regime(nu, zv) {
        let sums = hankel_sums(nu, zv, policy.max_terms, policy.tolerance);
        if sums.omitted <= policy.tolerance.max(f64::EPSILON) {
            return Ok(hankel_pair(nu, z, &sums));
        }
    }
    let out = series_core(nu, zv, policy.precision_bits)?;
    if nu == 0.0 {
        let (y0, dy0, yerr) = out.y0.expect("order-zero series carries Y0");
        return Ok(ScaledPair {
            jt: out.j.re,
            yt: y0,
            djt: out.dj.re,
            dyt: dy0,
            err: out.err.max(yerr),
            derr: out.derr.max(yerr),
            method: Method::Series,
        });
    }
    let t = (FRAC_PI_2 * nu).tanh();
    Ok(ScaledPair {
        jt: out.j.re,
        yt: out.j.im / t,
        djt: out.dj.re,
        dyt: out.dj.im / t,
        err: out.err / t,
        derr: out.derr / t,
        method: Method::Series,
    })
}

/// `(J̃ν(z), Ỹν(z))` as real-valued results.
pub fn scaled_jt_yt(order: Order, z: f64, policy: &AsymptoticPolicy) -> Result<(EvalResult, EvalResult)> {
    let pr = scaled_pair(order.nu, z.into(), policy)?;
    let mk = |v: f64| EvalResult { value: Complex64::new(v, 0.0), abs_error_estimate: pr.err, method: pr.method, scaled: true };
    Ok((mk(pr.jt), mk(pr.yt)))
}

fn unscale(order: Order, scaled: Complex64, other: Complex64, err: f64, method: Method, kind: Kind) -> Result<EvalResult> {
    let arg = FRAC_PI_2 * order.nu;
    if arg > COSH_LIMIT {
        return Err(Error::OverflowWithoutScaling { nu: order.nu });
    }
    let (c, s) = (arg.cosh(), arg.sinh());
    let s = if order.sign == OrderSign::Plus { s } else { -s };
    // rebuild from the real pair rather than multiplying tanh back out
    let value = match kind {
        Kind::J => Complex64::new(c * scaled.re, s * other.re),
        Kind::Y => Complex64::new(c * scaled.re, -s * other.re),
    };
    Ok(EvalResult { value, abs_error_estimate: err * c, method, scaled: false })
}

#[derive(Clone, Copy)]
enum Kind {
    J,
    Y,
}

fn finish(order: Order, pr: &ScaledPair, scaling: Scaling, kind: Kind, deriv: bool) -> Result<EvalResult> {
    let (jv, jd) = pr.j_scaled(order);
    let (yv, yd) = pr.y_scaled(order);
    let (val, err) = match (kind, deriv) {
        (Kind::J, false) => (jv, pr.err),
        (Kind::J, true) => (jd, pr.derr),
        (Kind::Y, false) => (yv, pr.err),
        (Kind::Y, true) => (yd, pr.derr),
    };
    match scaling {
        Scaling::Scaled => Ok(EvalResult { value: val, abs_error_estimate: err, method: pr.method, scaled: true }),
        Scaling::Unscaled => {
            let (re_part, im_part) = match (kind, deriv) {
                (Kind::J, false) => (pr.jt, pr.yt),
                (Kind::J, true) => (pr.djt, pr.dyt),
                (Kind::Y, false) => (pr.yt, pr.jt),
                (Kind::Y, true) => (pr.dyt, pr.djt),
            };
            unscale(order, Complex64::new(re_part, 0.0), Complex64::new(im_part, 0.0), err, pr.method, kind)
        }
    }
}

/// `J_{±iν}(z)`, optionally divided by `cosh(πν/2)`.
pub fn j_imag(order: Order, z: f64, policy: &AsymptoticPolicy, scaling: Scaling) -> Result<EvalResult> {
    let pr = scaled_pair(order.nu, z.into(), policy)?;
    finish(order, &pr, scaling, Kind::J, false)
}

/// `Y_{±iν}(z)`, optionally divided by `cosh(πν/2)`.
pub fn y_imag(order: Order, z: f64, policy: &AsymptoticPolicy, scaling: Scaling) -> Result<EvalResult> {
    let pr = scaled_pair(order.nu, z.into(), policy)?;
    finish(order, &pr, scaling, Kind::Y, false)
}

/// `dJ_{±iν}/dz = (J_{±iν−1} − J_{±iν+1})/2`.
pub fn dj_dz(order: Order, z: f64, policy: &AsymptoticPolicy, scaling: Scaling) -> Result<EvalResult> {
    let pr = scaled_pair(order.nu, z.into(), policy)?;
    finish(order, &pr, scaling, Kind::J, true)
}

/// `dY_{±iν}/dz`.
pub fn dy_dz(order: Order, z: f64, policy: &AsymptoticPolicy, scaling: Scaling) -> Result<EvalResult> {
    let pr = scaled_pair(order.nu, z.into(), policy)?;
    finish(order, &pr, scaling, Kind::Y, true)
}

/// Scaled `J_{±iν}` and its derivative at a split argument.
pub fn j_scaled_with_derivative(order: Order, z: SplitArg, policy: &AsymptoticPolicy) -> Result<(EvalResult, EvalResult)> {
    let pr = scaled_pair(order.nu, z, policy)?;
    Ok((finish(order, &pr, Scaling::Scaled, Kind::J, false)?, finish(order, &pr, Scaling::Scaled, Kind::J, true)?))
}

// ---------------------------------------------------------------------------
// ascending series in extended precision

#[derive(Clone, Copy, Debug)]
struct SeriesOut {
    /// `J_{iν}(z)/cosh(πν/2)` and derivative
    j: Complex64,
    dj: Complex64,
    err: f64,
    derr: f64,
    /// `(Y0, Y0', err)` when `ν = 0`
    y0: Option<(f64, f64, f64)>,
}

/// `exp(-i arg Γ(1+iν))` from Stirling's series at `M + iν` and the upward
/// recurrence.
fn gamma_phase(nu: f64, w: u32) -> XComplex {
    if nu == 0.0 {
        return XComplex::one();
    }
    let m = (2 * w as i64).max(32);
    let nux = XFloat::from_f64(nu);
    let mut prod = XComplex::one();
    for k in 1..m {
        prod = prod.mul(&XComplex::new(XFloat::from_i64(k), nux.clone()), w);
    }
    let mx = XFloat::from_i64(m);
    let r2 = mx.mul(&mx, w).add(&nux.mul(&nux, w), w);
    let ln_abs = xprec::ln(&r2, w).mul_pow2(-1);
    let arg = xprec::atan(&nux.div(&mx, w), w);
    let half = XFloat::from_f64(0.5);
    let mut im = nux.mul(&ln_abs, w).add(&mx.sub(&half, w).mul(&arg, w), w).sub(&nux, w);
    let inv = XComplex::new(mx.div(&r2, w), nux.neg().div(&r2, w));
    let inv2 = inv.mul(&inv, w);
    let jmax = (w / 8 + 16) as usize;
    let bern = xprec::bernoulli_even(jmax);
    let mut pw = inv;
    for (j, b) in bern.iter().enumerate().skip(1) {
        let j = j as i64;
        let c = XFloat::from_rational(b, w).div_i(2 * j * (2 * j - 1), w);
        let term = pw.scale(&c, w);
        im = im.add(&term.im, w);
        if term.log2_abs() < -(w as f64) - 8.0 {
            break;
        }
        pw = pw.mul(&inv2, w);
    }
    let unit = prod.scale(&XFloat::one().div(&prod.norm_sqr(w).sqrt(w), w), w);
    XComplex::cis(&im.neg(), w).mul(&unit, w)
}

fn series_core(nu: f64, z: f64, bits: u32) -> Result<SeriesOut> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::InvalidParameter(format!("Bessel argument z = {z} must be positive and finite")));
    }
    // cancellation alone would eat the certified half of the working bits
    let growth = (z - FRAC_PI_2 * nu).max(0.0) * std::f64::consts::LOG2_E;
    if growth > bits as f64 / 2.0 {
        return Err(Error::PrecisionExhausted { nu, z, bits });
    }
    let p = bits;
    let w = p + 16;
    let zx = XFloat::from_f64(z);
    let q = zx.mul(&zx, w).mul_pow2(-2).neg();
    let nux = XFloat::from_f64(nu);
    let nu2 = nux.mul(&nux, w);
    let with_y0 = nu == 0.0;

    let mut t = XComplex::one();
    let mut s = XComplex::one();
    let mut d = XComplex::new(XFloat::zero(), nux.clone());
    // Σ H_k t_k and Σ 2k H_k t_k for Y0
    let mut hs = XFloat::zero();
    let mut hd = XFloat::zero();
    let mut harmonic = XFloat::zero();
    let mut max_log: f64 = 0.0;
    let cap = (4.0 * z) as i64 + 4 * w as i64 + 100;
    let mut k: i64 = 1;
    loop {
        let kx = XFloat::from_i64(k);
        let denom = kx.mul(&kx.mul(&kx, w).add(&nu2, w), w);
        let r = q.div(&denom, w);
        t = t.mul(&XComplex::new(kx.clone(), nux.neg()), w).scale(&r, w);
        s = s.add(&t, w);
        let two_k = XFloat::from_i64(2 * k);
        d = d.add(&t.mul(&XComplex::new(two_k.clone(), nux.clone()), w), w);
        if with_y0 {
            harmonic = harmonic.add(&XFloat::one().div(&kx, w), w);
            let ht = harmonic.mul(&t.re, w);
            hs = hs.add(&ht, w);
            hd = hd.add(&ht.mul(&two_k, w), w);
        }
        let lt = t.log2_abs() + (2.0 * k as f64 + 1.0).log2() + if with_y0 { (k as f64).ln().max(1.0).log2() + 1.0 } else { 0.0 };
        max_log = max_log.max(lt).max(s.log2_abs());
        let floor = s.log2_abs().min(d.log2_abs() - z.log2()) - w as f64 - 8.0;
        if (k as f64) > z / 2.0 + 2.0 && lt < floor {
            break;
        }
        k += 1;
        if k > cap {
            return Err(Error::PrecisionExhausted { nu, z, bits });
        }
    }
    // accumulated rounding in the partial sums
    let err_log = max_log + ((k + 1) as f64).log2() - w as f64 + 3.0;
    let s_log = s.log2_abs();
    if err_log > s_log - p as f64 / 2.0 {
        return Err(Error::PrecisionExhausted { nu, z, bits });
    }

    let zhalf = zx.mul_pow2(-1);
    let lnz = xprec::ln(&zhalf, w);
    let mut unit = XComplex::cis(&nux.mul(&lnz, w), w).mul(&gamma_phase(nu, w), w);
    let pref = if nu == 0.0 {
        XFloat::one()
    } else {
        // |1/(Γ(1+iν) cosh(πν/2))| = sqrt(2 tanh(πν/2) / (πν))
        let y = xprec::pi(w).mul(&nux, w);
        let e = xprec::exp(&y.neg(), w);
        let th = XFloat::one().sub(&e, w).div(&XFloat::one().add(&e, w), w);
        th.mul_pow2(1).div(&y, w).sqrt(w)
    };
    unit = unit.scale(&pref, w);
    let j = s.mul(&unit, w);
    let dj = d.mul(&unit, w).scale(&XFloat::one().div(&zx, w), w);
    let scale = pref.to_f64();
    let err = scale * err_log.exp2();
    let jc = j.to_c64();
    let djc = dj.to_c64();
    let out_err = err + f64::EPSILON * jc.norm();
    let out_derr = err * (1.0 + (k as f64) / z) + f64::EPSILON * djc.norm();

    let y0 = if with_y0 {
        // Y0 = (2/π)[(ln(z/2) + γ) J0 − Σ H_k t_k]
        let two_pi = XFloat::from_i64(2).div(&xprec::pi(w), w);
        let lg = lnz.add(&xprec::euler_gamma(w), w);
        let y = two_pi.mul(&lg.mul(&s.re, w).sub(&hs, w), w);
        let dj0 = d.re.div(&zx, w);
        let dy = two_pi.mul(&s.re.div(&zx, w).add(&lg.mul(&dj0, w), w).sub(&hd.div(&zx, w), w), w);
        let yerr = err * (lg.to_f64().abs() + 1.0) + f64::EPSILON * y.to_f64().abs();
        Some((y.to_f64(), dy.to_f64(), yerr))
    } else {
        None
    };
    Ok(SeriesOut { j: jc, dj: djc, err: out_err, derr: out_derr, y0 })
}

/// `J_{±iν}(z)` from the ascending series at `precision_bits` working bits.
///
/// `PrecisionExhausted` is raised when the accumulated rounding of the partial
/// sums exceeds `2^{-precision_bits/2}` of the final sum.
pub fn series_j_imag(order: Order, z: f64, precision_bits: u32) -> Result<EvalResult> {
    let (scaled, _) = series_j_imag_scaled(order, z, precision_bits)?;
    let arg = FRAC_PI_2 * order.nu;
    if arg > COSH_LIMIT {
        return Err(Error::OverflowWithoutScaling { nu: order.nu });
    }
    let c = arg.cosh();
    Ok(EvalResult { value: scaled.value * c, abs_error_estimate: scaled.abs_error_estimate * c, method: Method::Series, scaled: false })
}

/// Scaled series value `J_{±iν}(z)/cosh(πν/2)` and its derivative.
pub fn series_j_imag_scaled(order: Order, z: f64, precision_bits: u32) -> Result<(EvalResult, EvalResult)> {
    if precision_bits < 53 {
        return Err(Error::InvalidParameter("precision_bits must be >= 53".into()));
    }
    let out = series_core(order.nu, z, precision_bits)?;
    let (j, dj) = match order.sign {
        OrderSign::Plus => (out.j, out.dj),
        OrderSign::Minus => (out.j.conj(), out.dj.conj()),
    };
    Ok((
        EvalResult { value: j, abs_error_estimate: out.err, method: Method::Series, scaled: true },
        EvalResult { value: dj, abs_error_estimate: out.derr, method: Method::Series, scaled: true },
    ))
}

/// Working precision that lets the ascending series certify a result at
/// argument `z`. The partial sums grow to roughly `e^z` before cancelling and
/// certification keeps half of the working bits in reserve.
pub fn series_bits_for(nu: f64, z: f64) -> u32 {
    let growth = (z - FRAC_PI_2 * nu).max(0.0) * std::f64::consts::LOG2_E + z.max(1.0).log2();
    (2.0 * (growth + 64.0)).ceil() as u32 + 32
}

// ---------------------------------------------------------------------------
// round-off diagnostic

/// Real and imaginary parts of `(J̃ν ± iỸν)/√(2/(πz)) − exp(±i(z − (4ν²+1)/(8z) − π/4))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostic {
    pub d1: f64,
    pub d2: f64,
    pub method: Method,
    pub arithmetic: Arithmetic,
}

fn hankel_ext(nu: f64, z: &XFloat, p: u32) -> (XFloat, XFloat) {
    let nu2 = XFloat::from_f64(nu).mul(&XFloat::from_f64(nu), p).mul_i(4, p);
    let mut u = XFloat::one();
    let (mut pp, mut qq) = (XFloat::zero(), XFloat::zero());
    let mut s: i64 = 0;
    loop {
        let term = if (s / 2) % 2 == 0 { u.clone() } else { u.neg() };
        if s % 2 == 0 {
            pp = pp.add(&term, p);
        } else {
            qq = qq.add(&term, p);
        }
        let odd = XFloat::from_i64((2 * s + 1) * (2 * s + 1));
        let next = u.mul(&nu2.add(&odd, p).neg(), p).div(&z.mul_i(8 * (s + 1), p), p);
        s += 1;
        if next.log2_abs() < -(p as f64) - 4.0 || (s > 1 && next.log2_abs() > u.log2_abs()) || s > 4 * p as i64 {
            break;
        }
        u = next;
    }
    (pp, qq)
}

/// Deviation of `(J̃ν + iỸν)/√(2/(πz))` from its two-term phase form
/// `exp(i(z − (4ν²+1)/(8z) − π/4))`. For `ν ≳ 10` this is
/// `J_{iν}/(cosh(πν/2)√(2/(πz)))` to within `2e^{−πν}`; at `ν = 0` it is the
/// ordinary Hankel function `H0⁽¹⁾` comparison.
///
/// `Arithmetic::Double` evaluates both pieces in binary64 the way a direct
/// implementation would; the reference phase `z − a − π/4` is rounded as
/// written, which is what produces the jump once `ulp(z)` reaches `10⁻⁴`.
/// `Arithmetic::Extended` uses `policy.precision_bits` throughout, with the
/// ascending series outside the Hankel regime.
pub fn precision_diagnostic(order: Order, z: f64, policy: &AsymptoticPolicy, arithmetic: Arithmetic) -> Result<Diagnostic> {
    policy.validate()?;
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::InvalidParameter(format!("Bessel argument z = {z} must be positive and finite")));
    }
    let nu = order.nu;
    let conj = order.sign == OrderSign::Minus;
    let fix = |d: Complex64| if conj { d.conj() } else { d };
    match arithmetic {
        Arithmetic::Double => {
            if !policy.in_regime(nu, z) {
                return Err(Error::Regime(format!("nu^2/z = {:.3e} exceeds the Hankel threshold", nu * nu / z)));
            }
            let s = hankel_sums(nu, z, policy.max_terms, policy.tolerance);
            let (cz, sz) = (z.cos(), z.sin());
            let ct = (cz + sz) * FRAC_1_SQRT_2;
            let st = (sz - cz) * FRAC_1_SQRT_2;
            let h = Complex64::new(ct * s.p - st * s.q, st * s.p + ct * s.q);
            let a = (4.0 * nu * nu + 1.0) / (8.0 * z);
            let ph = z - a - FRAC_PI_4;
            let d = fix(h - Complex64::new(ph.cos(), ph.sin()));
            Ok(Diagnostic { d1: d.re, d2: d.im, method: Method::Asymptotic, arithmetic })
        }
        Arithmetic::Extended => {
            let p = policy.precision_bits;
            let w = p + 16;
            let zx = XFloat::from_f64(z);
            let nux = XFloat::from_f64(nu);
            let quarter_pi = xprec::pi(w + 64).mul_pow2(-2);
            let a = nux.mul(&nux, w).mul_i(4, w).add(&XFloat::one(), w).div(&zx.mul_i(8, w), w);
            let reference = XComplex::cis(&zx.sub(&a, w + 64).sub(&quarter_pi, w + 64), w);
            let (h, method) = if policy.in_regime(nu, z) {
                let (pp, qq) = hankel_ext(nu, &zx, w);
                let (st, ct) = xprec::sin_cos(&zx.sub(&quarter_pi, w + 64), w);
                let re = ct.mul(&pp, w).sub(&st.mul(&qq, w), w);
                let im = st.mul(&pp, w).add(&ct.mul(&qq, w), w);
                (XComplex::new(re, im), Method::Asymptotic)
            } else {
                let out = series_core(nu, z, p)?;
                let amp = (2.0 / (PI * z)).sqrt();
                let yt = match out.y0 {
                    Some((y0, _, _)) => y0,
                    None => out.j.im / (FRAC_PI_2 * nu).tanh(),
                };
                (XComplex::new(XFloat::from_f64(out.j.re / amp), XFloat::from_f64(yt / amp)), Method::Series)
            };
            let d = fix(h.sub(&reference, w).to_c64());
            Ok(Diagnostic { d1: d.re, d2: d.im, method, arithmetic })
        }
    }
}
