//! Precision-controlled decimal evaluation of exact values.
//!
//! Values are carried as balls: a big-float midpoint plus a radius that
//! bounds the distance to the true real number. Every primitive operation
//! widens the radius by the propagated input error and by its own rounding,
//! so the final radius is an honest bound rather than an estimate.

use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;

use alloc::vec::Vec;

use astro_float::{BigFloat, Consts, RoundingMode, Sign, Word, WORD_BIT_SIZE};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;
use crate::exact::{BigRational, PiPolynomial};

const RM: RoundingMode = RoundingMode::ToEven;
const UP: RoundingMode = RoundingMode::Up;
/// Precision of radii; they only need a few correct bits.
const RAD_BITS: usize = 64;
/// Extra decimal digits carried beyond the requested output digits.
pub const GUARD_DIGITS: u32 = 10;

/// Bits needed to carry `digits` decimal digits.
pub fn bits_for_digits(digits: u32) -> usize {
    libm::ceil(digits as f64 * core::f64::consts::LOG2_10) as usize + 8
}

/// Working-precision context: mantissa width plus the constants cache.
pub struct Ctx {
    bits: usize,
    cc: Consts,
}

impl fmt::Debug for Ctx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Ctx").field("bits", &self.bits).finish()
    }
}

impl Ctx {
    pub fn with_bits(bits: usize) -> Self {
        let bits = bits.max(64);
        Self { bits, cc: Consts::new().expect("constants cache allocation") }
    }

    /// Context holding `digits` significant decimal digits.
    pub fn for_digits(digits: u32) -> Self {
        Self::with_bits(bits_for_digits(digits))
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    /// Upper bound on the relative rounding error of one correctly rounded
    /// operation, doubled to cover faithfully rounded transcendentals.
    pub fn unit_roundoff(&self) -> BigFloat {
        pow2(2 - self.bits as i32)
    }

    // Plain (unballed) arithmetic used by the quadrature kernels.

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.bits, RM)
    }
    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.bits, RM)
    }
    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.bits, RM)
    }
    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.bits, RM)
    }
    pub fn powi(&self, a: &BigFloat, n: usize) -> BigFloat {
        a.powi(n, self.bits, RM)
    }
    pub fn sin(&mut self, a: &BigFloat) -> BigFloat {
        a.sin(self.bits, RM, &mut self.cc)
    }
    pub fn ln(&mut self, a: &BigFloat) -> BigFloat {
        a.ln(self.bits, RM, &mut self.cc)
    }
    pub fn exp(&mut self, a: &BigFloat) -> BigFloat {
        a.exp(self.bits, RM, &mut self.cc)
    }
    pub fn pi_float(&mut self) -> BigFloat {
        self.cc.pi(self.bits, RM)
    }
    pub fn int(&self, v: i64) -> BigFloat {
        BigFloat::from_i64(v, self.bits)
    }
    pub fn float(&self, v: f64) -> BigFloat {
        BigFloat::from_f64(v, self.bits)
    }
    /// Nearest float to a rational at the working precision.
    pub fn rational_float(&self, r: &BigRational) -> BigFloat {
        self.div(&bigint_to_float(r.numer()), &bigint_to_float(r.denom()))
    }

    // Ball arithmetic.

    pub fn ball_rational(&self, r: &BigRational) -> Ball {
        let mid = self.rational_float(r);
        let rad = if mid.inexact() { self.rounding(&mid) } else { zero() };
        Ball { mid, rad }
    }

    pub fn ball_int(&self, v: i64) -> Ball {
        Ball::exact(self.int(v))
    }

    pub fn ball_pi(&mut self) -> Ball {
        let mid = self.pi_float();
        let rad = self.rounding(&mid);
        Ball { mid, rad }
    }

    fn rounding(&self, mid: &BigFloat) -> BigFloat {
        mid.abs().mul(&self.unit_roundoff(), RAD_BITS, UP)
    }

    fn finish(&self, mid: BigFloat, propagated: BigFloat) -> Ball {
        let rad = if mid.inexact() { propagated.add(&self.rounding(&mid), RAD_BITS, UP) } else { propagated };
        Ball { mid, rad }
    }

    pub fn ball_add(&self, a: &Ball, b: &Ball) -> Ball {
        let mid = self.add(&a.mid, &b.mid);
        self.finish(mid, a.rad.add(&b.rad, RAD_BITS, UP))
    }

    pub fn ball_sub(&self, a: &Ball, b: &Ball) -> Ball {
        let mid = self.sub(&a.mid, &b.mid);
        self.finish(mid, a.rad.add(&b.rad, RAD_BITS, UP))
    }

    pub fn ball_mul(&self, a: &Ball, b: &Ball) -> Ball {
        let mid = self.mul(&a.mid, &b.mid);
        let prop = a
            .mid
            .abs()
            .mul(&b.rad, RAD_BITS, UP)
            .add(&b.mid.abs().mul(&a.rad, RAD_BITS, UP), RAD_BITS, UP)
            .add(&a.rad.mul(&b.rad, RAD_BITS, UP), RAD_BITS, UP);
        self.finish(mid, prop)
    }

    /// `a / b`; `None` when the ball `b` contains zero.
    pub fn ball_div(&self, a: &Ball, b: &Ball) -> Option<Ball> {
        let b_abs = b.mid.abs();
        let gap = b_abs.sub(&b.rad, RAD_BITS, RoundingMode::Down);
        if !gap.is_positive() || gap.is_zero() {
            return None;
        }
        let mid = self.div(&a.mid, &b.mid);
        // |a/b - A/B| <= (|a| rb + |b| ra) / (|b| (|b| - rb))
        let num = a.mid.abs().mul(&b.rad, RAD_BITS, UP).add(&b_abs.mul(&a.rad, RAD_BITS, UP), RAD_BITS, UP);
        let den = b_abs.mul(&gap, RAD_BITS, RoundingMode::Down);
        Some(self.finish(mid, num.div(&den, RAD_BITS, UP)))
    }

    pub fn ball_powi(&self, a: &Ball, n: u32) -> Ball {
        let mut acc = Ball::exact(self.int(1));
        for _ in 0..n {
            acc = self.ball_mul(&acc, a);
        }
        acc
    }

    /// Natural log; `None` unless the ball is strictly positive.
    pub fn ball_ln(&mut self, a: &Ball) -> Option<Ball> {
        let low = a.mid.sub(&a.rad, RAD_BITS, RoundingMode::Down);
        if !a.is_strictly_positive() {
            return None;
        }
        let mid = self.ln(&a.mid);
        let prop = a.rad.div(&low, RAD_BITS, UP);
        // ln rounding is relative to the result; near ln = 0 add an absolute ulp.
        let prop = prop.add(&self.unit_roundoff(), RAD_BITS, UP);
        Some(self.finish(mid, prop))
    }

    pub fn ball_exp(&mut self, a: &Ball) -> Ball {
        let mid = self.exp(&a.mid);
        // e^(x+d) - e^x <= e^x * d * e^d, and d is far below 1 here.
        let three = BigFloat::from_word(3, RAD_BITS);
        let prop = mid.abs().mul(&a.rad, RAD_BITS, UP).mul(&three, RAD_BITS, UP);
        self.finish(mid, prop)
    }

    /// `a^q` for a rational exponent, through `exp(q ln a)`.
    pub fn ball_pow_rational(&mut self, a: &Ball, q: &BigRational) -> Option<Ball> {
        let ln = self.ball_ln(a)?;
        let qb = self.ball_rational(q);
        let arg = self.ball_mul(&ln, &qb);
        Some(self.ball_exp(&arg))
    }

    /// Ball enclosing the value of an exact π-polynomial.
    pub fn ball_pi_poly(&mut self, p: &PiPolynomial) -> Ball {
        let pi = self.ball_pi();
        let mut acc = Ball::exact(zero());
        for (e, c) in p.terms() {
            let pw = self.ball_powi(&pi, e.unsigned_abs());
            let pw = if e < 0 { self.ball_div(&Ball::exact(self.int(1)), &pw).expect("pi^m is far from zero") } else { pw };
            let term = self.ball_mul(&self.ball_rational(c), &pw);
            acc = self.ball_add(&acc, &term);
        }
        acc
    }
}

fn zero() -> BigFloat {
    BigFloat::from_word(0, RAD_BITS)
}

fn pow2(e: i32) -> BigFloat {
    let mut one = BigFloat::from_word(1, RAD_BITS);
    one.set_exponent(e + 1);
    one
}

/// Exact conversion of an integer to a float wide enough to hold it.
pub fn bigint_to_float(v: &BigInt) -> BigFloat {
    if v.is_zero() {
        return BigFloat::from_word(0, RAD_BITS);
    }
    let mut words: Vec<Word> = Vec::new();
    let mut rest = v.magnitude().clone();
    let mask = BigUint::from(Word::MAX);
    while !rest.is_zero() {
        words.push((&rest & &mask).to_u64().expect("masked to one word") as Word);
        rest >>= WORD_BIT_SIZE;
    }
    let sign = if v.is_negative() { Sign::Neg } else { Sign::Pos };
    BigFloat::from_words(&words, sign, (WORD_BIT_SIZE * words.len()) as i32)
}

/// Exact rational value of a finite float.
pub fn float_to_rational(x: &BigFloat) -> BigRational {
    let Some((words, _n, sign, e, _)) = x.as_raw_parts() else {
        panic!("non-finite float");
    };
    let mut m = BigUint::zero();
    for w in words.iter().rev() {
        m = (m << WORD_BIT_SIZE) | BigUint::from(*w);
    }
    if m.is_zero() {
        return BigRational::zero();
    }
    let shift = e as i64 - (WORD_BIT_SIZE * words.len()) as i64;
    let mut m = BigInt::from(m);
    if sign == Sign::Neg {
        m = -m;
    }
    if shift >= 0 {
        BigRational::from_integer(m << shift as usize)
    } else {
        BigRational::new(m, BigInt::one() << (-shift) as usize)
    }
}

/// Nearest `f64` to a float (via its exact rational value).
pub fn float_to_f64(x: &BigFloat) -> f64 {
    rational_to_f64(&float_to_rational(x))
}

/// Approximate `f64` of a float from its leading mantissa word; much cheaper
/// than [`float_to_f64`] and accurate to about one `f64` ulp.
pub fn fast_f64(x: &BigFloat) -> f64 {
    match x.as_raw_parts() {
        Some((words, _, sign, e, _)) => {
            let top = words.last().copied().unwrap_or(0);
            if top == 0 {
                return 0.0;
            }
            let v = libm::ldexp(top as f64, e - WORD_BIT_SIZE as i32);
            if sign == Sign::Neg {
                -v
            } else {
                v
            }
        }
        None => f64::NAN,
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    // Scale into f64 range before dividing so huge numerators/denominators
    // do not overflow to inf/inf.
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = nb - db;
    let (n, d) = if shift > 0 {
        (r.numer().clone(), r.denom() << shift as usize)
    } else {
        (r.numer() << (-shift) as usize, r.denom().clone())
    };
    // n/d in [1/2, 2); keep 64 significant bits of the quotient.
    let q = (n << 64usize) / d;
    let mant = q.to_f64().unwrap_or(f64::NAN);
    mant * libm::pow(2.0, (shift - 64) as f64)
}

/// A real number enclosed as `mid ± rad`.
#[derive(Clone, Debug)]
pub struct Ball {
    pub mid: BigFloat,
    pub rad: BigFloat,
}

impl Ball {
    pub fn exact(mid: BigFloat) -> Self {
        Ball { mid, rad: zero() }
    }

    pub fn is_strictly_positive(&self) -> bool {
        let low = self.mid.sub(&self.rad, RAD_BITS, RoundingMode::Down);
        low.is_positive() && !low.is_zero() && self.mid.is_positive()
    }

    pub fn is_strictly_negative(&self) -> bool {
        let high = self.mid.add(&self.rad, RAD_BITS, UP);
        high.is_negative() && !high.is_zero()
    }

    /// `rad <= 10^(1-digits) * max(1, |mid|)`.
    pub fn meets_digits(&self, digits: u32) -> bool {
        let scale = if self.mid.abs().cmp(&BigFloat::from_word(1, RAD_BITS)).unwrap_or(0) > 0 {
            self.mid.abs()
        } else {
            BigFloat::from_word(1, RAD_BITS)
        };
        let ten = BigFloat::from_word(10, RAD_BITS);
        let limit = scale.div(&ten.powi(digits.saturating_sub(1) as usize, RAD_BITS, UP), RAD_BITS, RoundingMode::Down);
        self.rad.cmp(&limit).map(|c| c <= 0).unwrap_or(false)
    }
}

/// A decimal approximation carrying the requested significant digits and a
/// bound on its distance from the true value.
#[derive(Clone, Debug)]
pub struct DecimalValue {
    value: BigFloat,
    requested_digits: u32,
    error_bound: BigFloat,
}

impl DecimalValue {
    pub fn from_ball(ball: Ball, requested_digits: u32) -> Self {
        DecimalValue { value: ball.mid, requested_digits, error_bound: ball.rad }
    }

    pub fn value(&self) -> &BigFloat {
        &self.value
    }

    pub fn requested_digits(&self) -> u32 {
        self.requested_digits
    }

    pub fn error_bound(&self) -> &BigFloat {
        &self.error_bound
    }

    pub fn to_f64(&self) -> f64 {
        float_to_f64(&self.value)
    }

    pub fn error_bound_f64(&self) -> f64 {
        float_to_f64(&self.error_bound)
    }

    /// Exact rational value of the stored midpoint.
    pub fn to_rational(&self) -> BigRational {
        float_to_rational(&self.value)
    }

    pub fn as_ball(&self) -> Ball {
        Ball { mid: self.value.clone(), rad: self.error_bound.clone() }
    }
}

/// Renders `requested_digits` significant digits, `%g`-style.
impl fmt::Display for DecimalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_significant(&self.to_rational(), self.requested_digits))
    }
}

/// Evaluates an exact value to at least `digits` correct significant digits.
///
/// The working precision starts at `digits + GUARD_DIGITS` and doubles
/// until the ball radius satisfies the requested bound.
pub fn pi_poly_eval(p: &PiPolynomial, digits: u32) -> DecimalValue {
    certify(digits, |ctx| Ok::<_, CertifyError>(ctx.ball_pi_poly(p))).expect("evaluation of a pi-polynomial is total")
}

/// `ln` of an exact value that must be strictly positive.
pub fn pi_poly_log(p: &PiPolynomial, digits: u32) -> Result<DecimalValue, Error> {
    if p.is_zero() {
        return Err(Error::Domain("logarithm of zero"));
    }
    certify(digits, |ctx| {
        let v = ctx.ball_pi_poly(p);
        if v.is_strictly_negative() {
            return Err(CertifyError::Fatal(Error::Domain("logarithm of a negative value")));
        }
        ctx.ball_ln(&v).ok_or(CertifyError::Retry)
    })
}

/// Marker used inside [`certify`] closures to request more precision.
#[derive(Debug)]
pub struct Retry;

impl From<Retry> for CertifyError {
    fn from(_: Retry) -> Self {
        CertifyError::Retry
    }
}

impl From<Error> for CertifyError {
    fn from(e: Error) -> Self {
        CertifyError::Fatal(e)
    }
}

#[derive(Debug)]
pub enum CertifyError {
    Retry,
    Fatal(Error),
}

const MAX_DOUBLINGS: u32 = 8;

/// Runs `f` at increasing precision until its ball meets `digits`.
pub fn certify<F, E>(digits: u32, mut f: F) -> Result<DecimalValue, Error>
where
    F: FnMut(&mut Ctx) -> Result<Ball, E>,
    E: Into<CertifyError>,
{
    let digits = digits.max(1);
    let mut bits = bits_for_digits(digits + GUARD_DIGITS);
    for _ in 0..MAX_DOUBLINGS {
        let mut ctx = Ctx::with_bits(bits);
        match f(&mut ctx).map_err(Into::into) {
            Ok(ball) if ball.meets_digits(digits) => return Ok(DecimalValue::from_ball(ball, digits)),
            Ok(_) | Err(CertifyError::Retry) => bits *= 2,
            Err(CertifyError::Fatal(e)) => return Err(e),
        }
    }
    Err(Error::Domain("value could not be certified (argument indistinguishable from zero)"))
}

/// `%g`-style rendering with exactly `digits` significant digits, computed
/// with exact integer arithmetic.
pub fn format_significant(r: &BigRational, digits: u32) -> String {
    use alloc::format;
    let digits = digits.max(1) as i64;
    if r.is_zero() {
        return String::from("0");
    }
    let neg = r.is_negative();
    let a = r.abs();
    let ten = BigInt::from(10);
    let pow10 = |e: i64| -> BigRational {
        if e >= 0 {
            BigRational::from_integer(num_traits::pow(ten.clone(), e as usize))
        } else {
            BigRational::new(BigInt::one(), num_traits::pow(ten.clone(), (-e) as usize))
        }
    };
    // Decimal exponent E with 10^E <= a < 10^(E+1).
    let approx = rational_to_f64(&a);
    let mut e = if approx.is_finite() && approx > 0.0 { libm::floor(libm::log10(approx)) as i64 } else { 0 };
    while pow10(e) > a {
        e -= 1;
    }
    while pow10(e + 1) <= a {
        e += 1;
    }
    let scaled = &a * pow10(digits - 1 - e);
    // Round half away from zero.
    let (q, rem) = scaled.numer().div_rem(scaled.denom());
    let mut m = if BigInt::from(2) * rem >= *scaled.denom() { q + 1 } else { q };
    if m == num_traits::pow(ten.clone(), digits as usize) {
        m /= &ten;
        e += 1;
    }
    let ds = m.to_str_radix(10);
    let body = if e < -4 || e >= digits.max(21) {
        let (h, t) = ds.split_at(1);
        if t.is_empty() {
            format!("{h}e{e}")
        } else {
            format!("{h}.{t}e{e}")
        }
    } else if e >= 0 {
        let cut = (e + 1) as usize;
        if cut >= ds.len() {
            let mut s = ds.clone();
            s.push_str(&"0".repeat(cut - ds.len()));
            s
        } else {
            format!("{}.{}", &ds[..cut], &ds[cut..])
        }
    } else {
        let zeros = "0".repeat((-e - 1) as usize);
        format!("0.{zeros}{ds}")
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// Relative difference `|a - b| / |b|` of two floats, as `f64`.
pub fn rel_diff(a: &BigFloat, b: &BigFloat) -> f64 {
    let ra = float_to_rational(a);
    let rb = float_to_rational(b);
    if rb.is_zero() {
        return if ra.is_zero() { 0.0 } else { f64::INFINITY };
    }
    rational_to_f64(&((ra - &rb).abs() / rb.abs()))
}

/// Compares two floats; NaN compares equal.
pub fn cmp_floats(a: &BigFloat, b: &BigFloat) -> Ordering {
    match a.cmp(b) {
        Some(c) if c < 0 => Ordering::Less,
        Some(c) if c > 0 => Ordering::Greater,
        _ => Ordering::Equal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};
    use alloc::string::ToString;

    #[test]
    fn two_over_pi() {
        let d = pi_poly_eval(&PiPolynomial::monomial(int(2), -1), 15);
        assert_eq!(d.to_string(), "0.636619772367581");
        assert!(d.error_bound_f64() <= 1e-14);
        // 2/pi = 0.63661977236758134307553505349005744813783858...
        let truth: BigRational = "63661977236758134307553505349005744813783858/100000000000000000000000000000000000000000000"
            .parse()
            .unwrap();
        let err = rational_to_f64(&(d.to_rational() - truth).abs());
        assert!(err <= d.error_bound_f64() + 1e-60);
    }

    #[test]
    fn constant_is_exact() {
        let d = pi_poly_eval(&PiPolynomial::one(), 5);
        assert_eq!(d.to_string(), "1.0000");
        assert!(d.error_bound().is_zero());
    }

    #[test]
    fn i22_value() {
        let p = PiPolynomial::from_terms([(-3, ratio(1, 12)), (-5, ratio(5, 32))]);
        let d = pi_poly_eval(&p, 10);
        // high-precision reference: 0.003198215938660382245466668394...
        assert_eq!(d.to_string(), "0.003198215939");
    }

    #[test]
    fn logs() {
        assert_eq!(pi_poly_log(&PiPolynomial::one(), 10).unwrap().to_string(), "0");
        let l = pi_poly_log(&PiPolynomial::monomial(int(2), -1), 12).unwrap();
        assert_eq!(l.to_string(), "-0.451582705289");
        assert!(matches!(pi_poly_log(&PiPolynomial::constant(int(-3)), 10), Err(Error::Domain(_))));
        assert!(pi_poly_log(&PiPolynomial::zero(), 10).is_err());
    }

    #[test]
    fn log_of_cancelling_value_needs_sign_certification() {
        // 355/113 - pi is positive but tiny; certify must raise precision until
        // its sign is settled rather than failing.
        let p = PiPolynomial::from_terms([(1, int(-1)), (0, ratio(355, 113))]);
        let l = pi_poly_log(&p, 10).unwrap();
        // ln(355/113 - pi) = -15.13690075...
        assert!((l.to_f64() + 15.1369).abs() < 1e-4, "{}", l);
        let neg = PiPolynomial::from_terms([(1, int(1)), (0, ratio(-355, 113))]);
        assert!(matches!(pi_poly_log(&neg, 10), Err(Error::Domain(_))));
    }

    #[test]
    fn formatting() {
        assert_eq!(format_significant(&ratio(1, 3), 4), "0.3333");
        assert_eq!(format_significant(&ratio(-2, 3), 3), "-0.667");
        assert_eq!(format_significant(&int(12345), 3), "12300");
        assert_eq!(format_significant(&ratio(1, 100000), 3), "1.00e-5");
        assert_eq!(format_significant(&ratio(9999, 1000), 3), "10.0");
        assert_eq!(format_significant(&int(7), 1), "7");
        assert_eq!(format_significant(&ratio(1, 1000), 2), "0.0010");
    }

    #[test]
    fn float_rational_round_trip() {
        let ctx = Ctx::with_bits(128);
        let x = ctx.rational_float(&ratio(-3, 8));
        assert_eq!(float_to_rational(&x), ratio(-3, 8));
        let big = bigint_to_float(&(BigInt::from(1) << 200usize));
        assert_eq!(float_to_rational(&big), BigRational::from_integer(BigInt::from(1) << 200usize));
        assert_eq!(rational_to_f64(&ratio(1, 3)), 1.0 / 3.0);
        let third = ctx.rational_float(&ratio(-1, 3));
        assert!((fast_f64(&third) + 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(fast_f64(&ctx.int(0)), 0.0);
    }
}
