//! Binary floating point with a caller-chosen mantissa width.
//!
//! Values are `m * 2^e` with a `BigInt` mantissa that is rounded to the
//! requested number of bits after every operation. The transcendental
//! functions are accurate to roughly `2^-prec` (absolute for `sin`/`cos`,
//! relative otherwise), which is all the series and reference paths need.

use std::cmp::Ordering;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

const GUARD: u64 = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XFloat {
    m: BigInt,
    e: i64,
}

/// Product of two fixed-point values, truncated toward zero.
fn fmul(a: &BigInt, b: &BigInt, f: u64) -> BigInt {
    let p = a * b;
    if p.is_negative() {
        -((-p) >> f)
    } else {
        p >> f
    }
}

fn round_shift(m: &BigInt, shift: u64) -> BigInt {
    if shift == 0 {
        return m.clone();
    }
    let half = BigInt::one() << (shift - 1);
    let mag = (m.abs() + half) >> shift;
    if m.is_negative() {
        -mag
    } else {
        mag
    }
}

impl XFloat {
    pub fn zero() -> Self {
        XFloat { m: BigInt::zero(), e: 0 }
    }

    pub fn one() -> Self {
        XFloat { m: BigInt::one(), e: 0 }
    }

    fn make(m: BigInt, e: i64, prec: u32) -> Self {
        if m.is_zero() {
            return Self::zero();
        }
        let bits = m.bits();
        let prec = prec as u64;
        if bits > prec {
            let shift = bits - prec;
            XFloat { m: round_shift(&m, shift), e: e + shift as i64 }
        } else {
            XFloat { m, e }
        }
    }

    pub fn from_i64(v: i64) -> Self {
        XFloat { m: BigInt::from(v), e: 0 }
    }

    pub fn from_bigint(m: BigInt, prec: u32) -> Self {
        Self::make(m, 0, prec)
    }

    /// Exact conversion; panics on non-finite input.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "XFloat::from_f64 on non-finite value");
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1i64 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & 0x000f_ffff_ffff_ffff;
        let (mant, e) = if exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp - 1075)
        };
        XFloat { m: BigInt::from(mant as i64 * sign), e }
    }

    pub fn to_f64(&self) -> f64 {
        if self.m.is_zero() {
            return 0.0;
        }
        let bits = self.m.bits();
        let (m, e) = if bits > 62 {
            let s = bits - 62;
            (round_shift(&self.m, s), self.e + s as i64)
        } else {
            (self.m.clone(), self.e)
        };
        let f = m.to_i64().expect("mantissa fits in 63 bits") as f64;
        let e = e.clamp(-4000, 4000) as i32;
        libm::ldexp(f, e)
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.m.is_negative()
    }

    /// Approximate `log2 |x|`; `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.m.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.m.bits();
        let top = if bits > 60 { &self.m >> (bits - 60) } else { self.m.clone() };
        let shifted = if bits > 60 { (bits - 60) as f64 } else { 0.0 };
        top.abs().to_f64().unwrap().log2() + shifted + self.e as f64
    }

    pub fn neg(&self) -> Self {
        XFloat { m: -self.m.clone(), e: self.e }
    }

    pub fn abs(&self) -> Self {
        XFloat { m: self.m.abs(), e: self.e }
    }

    pub fn round(&self, prec: u32) -> Self {
        Self::make(self.m.clone(), self.e, prec)
    }

    pub fn add(&self, o: &Self, prec: u32) -> Self {
        if self.is_zero() {
            return o.round(prec);
        }
        if o.is_zero() {
            return self.round(prec);
        }
        // skip the shift when one operand is far below the rounding point
        let top_a = self.m.bits() as i64 + self.e;
        let top_b = o.m.bits() as i64 + o.e;
        let gap = prec as i64 + 4;
        if top_a - top_b > gap && self.e > o.e {
            let lo = o.e.max(top_a - gap - 2);
            return Self::make((&self.m << (self.e - lo) as u64) + o.m.signum(), lo, prec);
        }
        if top_b - top_a > gap && o.e > self.e {
            let lo = self.e.max(top_b - gap - 2);
            return Self::make((&o.m << (o.e - lo) as u64) + self.m.signum(), lo, prec);
        }
        let e = self.e.min(o.e);
        let a = &self.m << (self.e - e) as u64;
        let b = &o.m << (o.e - e) as u64;
        Self::make(a + b, e, prec)
    }

    pub fn sub(&self, o: &Self, prec: u32) -> Self {
        self.add(&o.neg(), prec)
    }

    pub fn mul(&self, o: &Self, prec: u32) -> Self {
        Self::make(&self.m * &o.m, self.e + o.e, prec)
    }

    pub fn mul_i(&self, k: i64, prec: u32) -> Self {
        Self::make(&self.m * k, self.e, prec)
    }

    pub fn div(&self, o: &Self, prec: u32) -> Self {
        assert!(!o.is_zero(), "XFloat division by zero");
        if self.is_zero() {
            return Self::zero();
        }
        let shift = (prec as i64 + 2 + o.m.bits() as i64 - self.m.bits() as i64).max(0);
        let num = &self.m << shift as u64;
        let q = num.div_floor(&o.m);
        Self::make(q, self.e - o.e - shift, prec)
    }

    pub fn div_i(&self, k: i64, prec: u32) -> Self {
        self.div(&Self::from_i64(k), prec)
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        XFloat { m: self.m.clone(), e: self.e + k }
    }

    pub fn sqrt(&self, prec: u32) -> Self {
        assert!(!self.is_negative(), "XFloat sqrt of negative value");
        if self.is_zero() {
            return Self::zero();
        }
        let mut m = self.m.clone();
        let mut e = self.e;
        let want = 2 * prec as i64 + 4;
        let mut shift = (want - m.bits() as i64).max(0);
        if (e - shift) % 2 != 0 {
            shift += 1;
        }
        m <<= shift as u64;
        e -= shift;
        Self::make(m.sqrt(), e / 2, prec)
    }

    pub fn cmp_abs(&self, o: &Self) -> Ordering {
        self.abs().sub(&o.abs(), 64).m.sign().cmp_sign()
    }

    /// Nearest integer.
    pub fn round_to_int(&self) -> BigInt {
        if self.e >= 0 {
            &self.m << self.e as u64
        } else {
            round_shift(&self.m, (-self.e) as u64)
        }
    }

    /// Fixed-point image `round(x * 2^f)`.
    fn to_fixed(&self, f: u64) -> BigInt {
        let sh = self.e + f as i64;
        if sh >= 0 {
            &self.m << sh as u64
        } else {
            round_shift(&self.m, (-sh) as u64)
        }
    }

    fn from_fixed(v: BigInt, f: u64, prec: u32) -> Self {
        Self::make(v, -(f as i64), prec)
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        let n = Self::make(r.numer().clone(), 0, prec + 8);
        let d = Self::make(r.denom().clone(), 0, prec + 8);
        n.div(&d, prec)
    }
}

trait SignOrd {
    fn cmp_sign(self) -> Ordering;
}

impl SignOrd for Sign {
    fn cmp_sign(self) -> Ordering {
        match self {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }
}

// fixed-point arctan(1/k) and artanh(1/k) scaled by 2^f
fn atan_inv(k: u64, f: u64) -> BigInt {
    let k2 = BigInt::from(k * k);
    let mut term = (BigInt::one() << f) / k;
    let mut sum = BigInt::zero();
    let mut j = 0u64;
    while !term.is_zero() {
        let t = &term / (2 * j + 1);
        if j % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
        term /= &k2;
        j += 1;
    }
    sum
}

fn atanh_inv(k: u64, f: u64) -> BigInt {
    let k2 = BigInt::from(k) * BigInt::from(k);
    let mut term = (BigInt::one() << f) / k;
    let mut sum = BigInt::zero();
    let mut j = 0u64;
    while !term.is_zero() {
        sum += &term / (2 * j + 1);
        term /= &k2;
        j += 1;
    }
    sum
}

fn cached(slot: &'static OnceLock<Mutex<Option<(u32, XFloat)>>>, prec: u32, make: fn(u32) -> XFloat) -> XFloat {
    let cell = slot.get_or_init(|| Mutex::new(None));
    let mut guard = cell.lock().expect("constant cache poisoned");
    if let Some((p, v)) = guard.as_ref() {
        if *p >= prec {
            return v.round(prec);
        }
    }
    let p = prec.max(512);
    let v = make(p);
    *guard = Some((p, v.clone()));
    v.round(prec)
}

fn pi_raw(prec: u32) -> XFloat {
    let f = prec as u64 + GUARD;
    let v = atan_inv(5, f) * 16 - atan_inv(239, f) * 4;
    XFloat::from_fixed(v, f, prec)
}

fn ln2_raw(prec: u32) -> XFloat {
    let f = prec as u64 + GUARD;
    let v = atanh_inv(26, f) * 18 - atanh_inv(4801, f) * 2 + atanh_inv(8749, f) * 8;
    XFloat::from_fixed(v, f, prec)
}

pub fn pi(prec: u32) -> XFloat {
    static SLOT: OnceLock<Mutex<Option<(u32, XFloat)>>> = OnceLock::new();
    cached(&SLOT, prec, pi_raw)
}

pub fn ln2(prec: u32) -> XFloat {
    static SLOT: OnceLock<Mutex<Option<(u32, XFloat)>>> = OnceLock::new();
    cached(&SLOT, prec, ln2_raw)
}

/// `(sin x, cos x)` with absolute error near `2^-prec`.
pub fn sin_cos(x: &XFloat, prec: u32) -> (XFloat, XFloat) {
    if x.is_zero() {
        return (XFloat::zero(), XFloat::one());
    }
    let w = prec + GUARD as u32;
    let mag = x.log2_abs().max(0.0).ceil() as u32;
    let wp = w + mag + 4;
    let half_pi = pi(wp).mul_pow2(-1);
    let k = x.div(&half_pi, wp).round_to_int();
    let r = x.sub(&XFloat::from_bigint(k.clone(), wp).mul(&half_pi, wp), wp);
    let f = w as u64;
    let rf = r.to_fixed(f);
    let r2 = fmul(&rf, &rf, f);
    let one = BigInt::one() << f;
    let (mut s, mut c) = (rf.clone(), one.clone());
    let mut ts = rf;
    let mut tc = one;
    let mut j = 1u64;
    loop {
        ts = -fmul(&ts, &r2, f) / ((2 * j) * (2 * j + 1));
        tc = -fmul(&tc, &r2, f) / ((2 * j - 1) * (2 * j));
        if ts.is_zero() && tc.is_zero() {
            break;
        }
        s += &ts;
        c += &tc;
        j += 1;
    }
    let s = XFloat::from_fixed(s, f, prec);
    let c = XFloat::from_fixed(c, f, prec);
    let q = k.mod_floor(&BigInt::from(4)).to_u8().unwrap();
    match q {
        0 => (s, c),
        1 => (c, s.neg()),
        2 => (s.neg(), c.neg()),
        _ => (c.neg(), s),
    }
}

pub fn exp(x: &XFloat, prec: u32) -> XFloat {
    if x.is_zero() {
        return XFloat::one();
    }
    let w = prec + GUARD as u32;
    let mag = x.log2_abs().max(0.0).ceil() as u32;
    let wp = w + mag + 4;
    let l2 = ln2(wp);
    let k = x.div(&l2, wp).round_to_int();
    let r = x.sub(&XFloat::from_bigint(k.clone(), wp).mul(&l2, wp), wp);
    // halve h times, Taylor, then square back
    let h = ((w as f64).sqrt() / 2.0).ceil() as u64;
    let f = w as u64 + 2 * h + 8;
    let rf = fmul(&r.to_fixed(f), &BigInt::one(), h);
    let one = BigInt::one() << f;
    let mut sum = one.clone();
    let mut term = one;
    let mut j = 1u64;
    loop {
        term = fmul(&term, &rf, f) / j;
        if term.is_zero() {
            break;
        }
        sum += &term;
        j += 1;
    }
    for _ in 0..h {
        sum = fmul(&sum, &sum, f);
    }
    let k = k.to_i64().expect("exponent range");
    XFloat::from_fixed(sum, f, prec).mul_pow2(k)
}

/// Natural logarithm of a positive value.
pub fn ln(x: &XFloat, prec: u32) -> XFloat {
    assert!(!x.is_negative() && !x.is_zero(), "ln of non-positive value");
    let w = prec + GUARD as u32;
    let bits = x.m.bits() as i64;
    // x = y * 2^k with y in [1/sqrt2, sqrt2)
    let mut k = bits + x.e;
    let mut y = XFloat { m: x.m.clone(), e: -bits };
    if y.to_f64() < std::f64::consts::FRAC_1_SQRT_2 {
        y = y.mul_pow2(1);
        k -= 1;
    }
    let u = y.sub(&XFloat::one(), w).div(&y.add(&XFloat::one(), w), w);
    let f = w as u64;
    let uf = u.to_fixed(f);
    let u2 = fmul(&uf, &uf, f);
    let mut sum = BigInt::zero();
    let mut term = uf;
    let mut j = 0u64;
    while !term.is_zero() {
        sum += &term / (2 * j + 1);
        term = fmul(&term, &u2, f);
        j += 1;
    }
    let lny = XFloat::from_fixed(sum * 2, f, w);
    lny.add(&ln2(w).mul_i(k, w), prec)
}

/// Arctangent, result in `(-pi/2, pi/2)`.
pub fn atan(x: &XFloat, prec: u32) -> XFloat {
    if x.is_zero() {
        return XFloat::zero();
    }
    let w = prec + GUARD as u32;
    if x.abs().to_f64() > 1.0 {
        let inv = XFloat::one().div(x, w);
        let hp = pi(w).mul_pow2(-1);
        let base = if x.is_negative() { hp.neg() } else { hp };
        return base.sub(&atan(&inv, w), prec);
    }
    // two argument halvings: atan x = 2 atan(x / (1 + sqrt(1 + x^2)))
    let mut y = x.clone();
    for _ in 0..2 {
        let s = XFloat::one().add(&y.mul(&y, w), w).sqrt(w);
        y = y.div(&XFloat::one().add(&s, w), w);
    }
    let f = w as u64;
    let yf = y.to_fixed(f);
    let y2 = fmul(&yf, &yf, f);
    let mut sum = BigInt::zero();
    let mut term = yf;
    let mut j = 0u64;
    while !term.is_zero() {
        let t = &term / (2 * j + 1);
        if j % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
        term = fmul(&term, &y2, f);
        j += 1;
    }
    XFloat::from_fixed(sum * 4, f, prec)
}

/// Euler's constant via the Brent-McMillan sums.
pub fn euler_gamma(prec: u32) -> XFloat {
    let w = prec + GUARD as u32;
    let n = ((w as f64) * std::f64::consts::LN_2 / 4.0).ceil() as i64 + 2;
    let n2 = XFloat::from_i64(n * n);
    let mut a = ln(&XFloat::from_i64(n), w).neg();
    let mut b = XFloat::one();
    let mut u = a.clone();
    let mut v = b.clone();
    let mut k = 1i64;
    loop {
        b = b.mul(&n2, w).div_i(k * k, w);
        a = a.mul(&n2, w).div_i(k, w).add(&b, w).div_i(k, w);
        u = u.add(&a, w);
        v = v.add(&b, w);
        if k > n && b.log2_abs() < v.log2_abs() - w as f64 - 8.0 && a.log2_abs() < u.log2_abs() - w as f64 - 8.0 {
            break;
        }
        k += 1;
    }
    u.div(&v, prec)
}

/// Even-index Bernoulli numbers `B_0, B_2, ..., B_{2j}` as exact rationals.
pub fn bernoulli_even(j: usize) -> Vec<BigRational> {
    static CACHE: OnceLock<Mutex<Vec<BigRational>>> = OnceLock::new();
    let cell = CACHE.get_or_init(|| Mutex::new(vec![BigRational::one()]));
    let mut all = cell.lock().expect("bernoulli cache poisoned");
    let need = 2 * j;
    if all.len() <= need {
        // B_m = -1/(m+1) * sum_{k<m} C(m+1, k) B_k over all indices
        let mut m = all.len();
        while m <= need {
            let mut binom = BigInt::one();
            let mut acc = BigRational::zero();
            for (k, bk) in all.iter().enumerate() {
                if !bk.is_zero() {
                    acc += BigRational::from_integer(binom.clone()) * bk;
                }
                binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
            }
            let bm = -acc / BigRational::from_integer(BigInt::from(m + 1));
            all.push(bm);
            m += 1;
        }
    }
    (0..=j).map(|i| all[2 * i].clone()).collect()
}

/// Complex pair of extended-precision values.
#[derive(Clone, Debug)]
pub struct XComplex {
    pub re: XFloat,
    pub im: XFloat,
}

impl XComplex {
    pub fn new(re: XFloat, im: XFloat) -> Self {
        XComplex { re, im }
    }

    pub fn one() -> Self {
        XComplex { re: XFloat::one(), im: XFloat::zero() }
    }

    pub fn zero() -> Self {
        XComplex { re: XFloat::zero(), im: XFloat::zero() }
    }

    pub fn add(&self, o: &Self, p: u32) -> Self {
        XComplex { re: self.re.add(&o.re, p), im: self.im.add(&o.im, p) }
    }

    pub fn sub(&self, o: &Self, p: u32) -> Self {
        XComplex { re: self.re.sub(&o.re, p), im: self.im.sub(&o.im, p) }
    }

    pub fn mul(&self, o: &Self, p: u32) -> Self {
        XComplex {
            re: self.re.mul(&o.re, p).sub(&self.im.mul(&o.im, p), p),
            im: self.re.mul(&o.im, p).add(&self.im.mul(&o.re, p), p),
        }
    }

    pub fn scale(&self, s: &XFloat, p: u32) -> Self {
        XComplex { re: self.re.mul(s, p), im: self.im.mul(s, p) }
    }

    pub fn conj(&self) -> Self {
        XComplex { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn norm_sqr(&self, p: u32) -> XFloat {
        self.re.mul(&self.re, p).add(&self.im.mul(&self.im, p), p)
    }

    pub fn log2_abs(&self) -> f64 {
        let a = self.re.log2_abs();
        let b = self.im.log2_abs();
        a.max(b) + 0.5
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// `exp(i t)` for real `t`.
    pub fn cis(t: &XFloat, p: u32) -> Self {
        let (s, c) = sin_cos(t, p);
        XComplex { re: c, im: s }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_roundtrip() {
        for &x in &[1.0, -3.5, 1e-300, 6.02e23, std::f64::consts::PI, 5e-324] {
            assert_eq!(XFloat::from_f64(x).to_f64(), x);
        }
    }

    #[test]
    fn constants_match_f64() {
        assert_eq!(pi(200).to_f64(), std::f64::consts::PI);
        assert_eq!(ln2(200).to_f64(), std::f64::consts::LN_2);
        assert!((euler_gamma(200).to_f64() - 0.577_215_664_901_532_9).abs() < 1e-16);
    }

    #[test]
    fn pi_digits() {
        // 3.14159265358979323846264338327950288419716939937510...
        let p = pi(300);
        let scaled = p.mul(&XFloat::from_bigint(BigInt::from(10).pow(40), 300), 300).round_to_int();
        assert_eq!(scaled.to_string(), "31415926535897932384626433832795028841972");
    }

    #[test]
    fn elementary_functions() {
        let p = 160;
        let x = XFloat::from_f64(0.7);
        let (s, c) = sin_cos(&x, p);
        assert!((s.to_f64() - 0.7f64.sin()).abs() < 2e-16);
        assert!((c.to_f64() - 0.7f64.cos()).abs() < 2e-16);
        assert!((exp(&x, p).to_f64() - 0.7f64.exp()).abs() < 4e-16);
        assert!((ln(&x, p).to_f64() - 0.7f64.ln()).abs() < 2e-16);
        assert!((atan(&x, p).to_f64() - 0.7f64.atan()).abs() < 2e-16);
        assert!((atan(&XFloat::from_f64(-12.5), p).to_f64() - (-12.5f64).atan()).abs() < 2e-16);
        let big = XFloat::from_f64(1e13);
        let (s, c) = sin_cos(&big, 256);
        // 50-digit reference for sin, cos of 1e13
        assert!((s.to_f64() + 0.288_885_294_817_525_1).abs() < 1e-16);
        assert!((c.to_f64() - 0.957_363_716_900_839_9).abs() < 2e-16);
    }

    #[test]
    fn bernoulli_small() {
        let b = bernoulli_even(4);
        let want = [(1, 1), (1, 6), (-1, 30), (1, 42), (-1, 30)];
        for (bk, (n, d)) in b.iter().zip(want) {
            assert_eq!(*bk, BigRational::new(BigInt::from(n), BigInt::from(d)));
        }
    }
}
