//! Exact rationals, binomials and Laurent polynomials in π.
//!
//! Every closed form in this crate is a finite sum `Σ c_m π^m` with rational
//! coefficients. [`PiPolynomial`] stores such a sum as a sparse map from the
//! exponent `m` to its nonzero coefficient, so equality of two values is plain
//! equality of their term maps.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

pub use num_rational::BigRational;

/// Shorthand for an integer-valued [`BigRational`].
pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// `num / den` reduced. Panics when `den == 0`.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `n!` as an exact integer.
pub fn factorial(n: u32) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Generalized binomial coefficient `n(n-1)...(n-r+1) / r!`.
///
/// The upper argument may be negative, e.g. `C(-4, 2) = 10`, which is the
/// convention needed when expanding `(1 + x)^(-2k)`.
pub fn binomial(n: i64, r: i64) -> Result<BigRational, Error> {
    if r < 0 {
        return Err(Error::Domain("binomial lower argument must be non-negative"));
    }
    let mut falling = BigInt::one();
    for i in 0..r {
        falling *= BigInt::from(n - i);
    }
    Ok(BigRational::new(falling, factorial(r as u32)))
}

/// Binomial with non-negative arguments as an integer; callers guarantee
/// `0 <= r`.
pub(crate) fn binomial_int(n: i64, r: i64) -> BigInt {
    binomial(n, r)
        .expect("non-negative lower argument")
        .to_integer()
}

/// `base^exp` for a rational base and signed exponent. `0^negative` panics.
pub fn rational_pow(base: &BigRational, exp: i32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..exp.unsigned_abs() {
        acc *= base;
    }
    if exp < 0 {
        acc.recip()
    } else {
        acc
    }
}

/// Exact `m`-th root of a non-negative rational when both numerator and
/// denominator are perfect `m`-th powers.
pub fn exact_root(r: &BigRational, m: u32) -> Option<BigRational> {
    if m == 0 || r.is_negative() {
        return None;
    }
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    let rn = num.nth_root(m);
    let rd = den.nth_root(m);
    if num_traits::pow(rn.clone(), m as usize) == *num && num_traits::pow(rd.clone(), m as usize) == *den {
        Some(BigRational::new(rn.into(), rd.into()))
    } else {
        None
    }
}

/// Exact value `Σ_m c_m π^m` with rational coefficients and integer
/// exponents of either sign. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PiPolynomial {
    terms: BTreeMap<i32, BigRational>,
}

impl PiPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, 0)
    }

    /// `c · π^exp`.
    pub fn monomial(c: BigRational, exp: i32) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, c);
        p
    }

    /// `π^exp`.
    pub fn pi_pow(exp: i32) -> Self {
        Self::monomial(BigRational::one(), exp)
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, merging
    /// repeated exponents.
    pub fn from_terms<I: IntoIterator<Item = (i32, BigRational)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// Adds `c · π^exp` in place, dropping the entry if it cancels.
    pub fn add_term(&mut self, exp: i32, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(exp).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exp: i32) -> Option<&BigRational> {
        self.terms.get(&exp)
    }

    /// Terms in ascending exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i32, &BigRational)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn exponents(&self) -> Vec<i32> {
        self.terms.keys().copied().collect()
    }

    /// The rational value when the polynomial is a pure constant.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    /// Multiplies by `π^shift`.
    pub fn shift(&self, shift: i32) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, v)| (e + shift, v.clone())).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(Self::one(), |acc, _| &acc * self)
    }
}

impl Add for &PiPolynomial {
    type Output = PiPolynomial;
    fn add(self, rhs: &PiPolynomial) -> PiPolynomial {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &PiPolynomial {
    type Output = PiPolynomial;
    fn sub(self, rhs: &PiPolynomial) -> PiPolynomial {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Mul for &PiPolynomial {
    type Output = PiPolynomial;
    fn mul(self, rhs: &PiPolynomial) -> PiPolynomial {
        let mut out = PiPolynomial::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea + eb, ca * cb);
            }
        }
        out
    }
}

impl Neg for &PiPolynomial {
    type Output = PiPolynomial;
    fn neg(self) -> PiPolynomial {
        PiPolynomial {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for PiPolynomial {
            type Output = PiPolynomial;
            fn $m(self, rhs: PiPolynomial) -> PiPolynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

fn write_rational(f: &mut fmt::Formatter<'_>, c: &BigRational) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

/// Renders terms in descending exponent order as
/// `1/12*pi^-3 + 5/32*pi^-5`; the constant term prints as a bare rational.
impl fmt::Display for PiPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let mag = if i == 0 {
                c.clone()
            } else if c.is_negative() {
                f.write_str(" - ")?;
                -c.clone()
            } else {
                f.write_str(" + ")?;
                c.clone()
            };
            write_rational(f, &mag)?;
            if *e != 0 {
                write!(f, "*pi^{}", e)?;
            }
        }
        Ok(())
    }
}

fn parse_rational(s: &str) -> Result<BigRational, Error> {
    let bad = || Error::Parse(String::from(s));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => BigInt::from_str(s.trim()).map(BigRational::from_integer).map_err(|_| bad()),
    }
}

/// Parses a rational literal `p/q` or `p`.
pub fn parse_big_rational(s: &str) -> Result<BigRational, Error> {
    parse_rational(s)
}

impl FromStr for PiPolynomial {
    type Err = Error;

    /// Inverse of the `Display` grammar.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero());
        }
        let mut out = Self::zero();
        let mut rest = s;
        let mut negate = false;
        loop {
            let (term, next) = match (rest.find(" + "), rest.find(" - ")) {
                (Some(a), Some(b)) if a < b => (&rest[..a], Some((&rest[a + 3..], false))),
                (Some(_), Some(b)) => (&rest[..b], Some((&rest[b + 3..], true))),
                (Some(a), None) => (&rest[..a], Some((&rest[a + 3..], false))),
                (None, Some(b)) => (&rest[..b], Some((&rest[b + 3..], true))),
                (None, None) => (rest, None),
            };
            let (coef, exp) = match term.split_once("*pi^") {
                Some((c, e)) => (c, e.trim().parse::<i32>().map_err(|_| Error::Parse(String::from(term)))?),
                None => (term, 0),
            };
            let mut c = parse_rational(coef)?;
            if negate {
                c = -c;
            }
            if c.is_zero() {
                return Err(Error::Parse(String::from(term)));
            }
            out.add_term(exp, c);
            match next {
                Some((r, neg)) => {
                    rest = r;
                    negate = neg;
                }
                None => break,
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(5, 2).unwrap(), int(10));
        assert_eq!(binomial(-4, 2).unwrap(), int(10));
        assert_eq!(binomial(7, 0).unwrap(), int(1));
        assert!(binomial(3, -1).is_err());
    }

    #[test]
    fn binomial_times_factorial_is_falling_factorial() {
        for n in -20i64..=20 {
            for r in 0i64..=20 {
                let falling: BigInt = (0..r).map(|i| BigInt::from(n - i)).product();
                let lhs = binomial(n, r).unwrap() * BigRational::from_integer(factorial(r as u32));
                assert_eq!(lhs, BigRational::from_integer(falling), "n={n} r={r}");
            }
        }
    }

    #[test]
    fn cancellation_prunes_terms() {
        let p = PiPolynomial::from_terms([(-1, int(2)), (3, ratio(1, 2))]);
        let q = PiPolynomial::monomial(ratio(1, 2), 3);
        let d = &p - &q;
        assert_eq!(d, PiPolynomial::monomial(int(2), -1));
        assert!((&d - &d).is_zero());
    }

    #[test]
    fn display_grammar() {
        let p = PiPolynomial::from_terms([(-3, ratio(1, 12)), (-5, ratio(5, 32))]);
        assert_eq!(p.to_string(), "1/12*pi^-3 + 5/32*pi^-5");
        assert_eq!(PiPolynomial::monomial(int(2), -1).to_string(), "2*pi^-1");
        assert_eq!(PiPolynomial::one().to_string(), "1");
        assert_eq!(PiPolynomial::zero().to_string(), "0");
        let t = PiPolynomial::from_terms([(0, int(1)), (-1, ratio(-1, 3)), (-3, ratio(-5, 2))]);
        assert_eq!(t.to_string(), "1 - 1/3*pi^-1 - 5/2*pi^-3");
        let lead_neg = PiPolynomial::from_terms([(2, ratio(-7, 3)), (0, int(4))]);
        assert_eq!(lead_neg.to_string(), "-7/3*pi^2 + 4");
    }

    #[test]
    fn parse_inverts_display() {
        for s in ["1/12*pi^-3 + 5/32*pi^-5", "1 - 1/3*pi^-1 - 5/2*pi^-3", "-7/3*pi^2 + 4", "0", "2*pi^-1"] {
            let p: PiPolynomial = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert!("1/0".parse::<PiPolynomial>().is_err());
        assert!("x*pi^2".parse::<PiPolynomial>().is_err());
    }

    #[test]
    fn exact_roots() {
        assert_eq!(exact_root(&ratio(4, 9), 2), Some(ratio(2, 3)));
        assert_eq!(exact_root(&ratio(8, 5), 2), None);
        assert_eq!(exact_root(&ratio(27, 64), 3), Some(ratio(3, 4)));
    }
}
