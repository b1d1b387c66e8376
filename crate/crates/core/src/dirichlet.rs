//! Closed forms of the Dirichlet-like integrals `I(n,k)`.
//!
//! Two independent exact routes are provided. [`theorem1_ink`] assembles the
//! double sum directly as rationals; [`lemma2_ink`] multiplies the
//! partial-fraction weights by the exact `K(k,j) = ∫ sin^{2k}u / u^{2(k-j)} du`
//! values as π-polynomials. Both must agree term for term.
//!
//! The inner alternating sum `Σ_i (-1)^i C(2k,i) (k-i)^{2k-2j-1}` loses all
//! significance in floating point for moderate `k`, so everything here is
//! exact; [`cancellation_onset`] measures how quickly an `f64` evaluation
//! breaks down.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::Error;
use crate::exact::{binomial_int, factorial, int, ratio, rational_pow, BigRational, PiPolynomial};
use crate::precision::{certify, rational_to_f64, Ball, CertifyError, Ctx, DecimalValue};

/// Indices `(n, k)` of `I(n,k)`, both at least one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntegralIndex {
    n: u32,
    k: u32,
}

impl IntegralIndex {
    pub fn new(n: u32, k: u32) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::Domain("quantum number n must be >= 1"));
        }
        if k == 0 {
            return Err(Error::Domain("power k must be >= 1"));
        }
        Ok(Self { n, k })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }
}

/// `Σ_{i=0}^{k-1} (-1)^i C(2k,i) (k-i)^{2k-2j-1}`, exactly.
pub fn inner_sum(k: u32, j: u32) -> BigInt {
    let (k, j) = (k as i64, j as i64);
    let exp = (2 * k - 2 * j - 1) as u32;
    let mut acc = BigInt::zero();
    for i in 0..k {
        let term = binomial_int(2 * k, i) * num_traits::pow(BigInt::from(k - i), exp as usize);
        if i % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// The same sum evaluated in double precision, the way a naive
/// implementation would.
pub fn inner_sum_f64(k: u32, j: u32) -> f64 {
    let exp = 2 * k - 2 * j - 1;
    let mut acc = 0.0f64;
    let mut binom = 1.0f64;
    for i in 0..k {
        if i > 0 {
            binom = binom * (2 * k - i + 1) as f64 / i as f64;
        }
        let base = (k - i) as f64;
        let mut pw = 1.0f64;
        for _ in 0..exp {
            pw *= base;
        }
        let term = binom * pw;
        if i % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Rational factor of the `j`-th summand shared by both routes:
/// `(-1/4)^j (inner sum) / (2k-2j-1)!`.
fn k_integral_rational(k: u32, j: u32) -> BigRational {
    rational_pow(&ratio(-1, 4), j as i32)
        * BigRational::new(inner_sum(k, j), factorial(2 * k - 2 * j - 1))
}

/// Summands of the closed-form double sum before zero pruning, as
/// `(π exponent, coefficient)` pairs in the order `j = 0..k`.
pub fn theorem1_terms(idx: IntegralIndex) -> Vec<(i32, BigRational)> {
    let (n, k) = (idx.n as i64, idx.k as i64);
    let n_r = BigRational::from_integer(BigInt::from(n));
    (0..k)
        .map(|j| {
            let binom = BigRational::from_integer(binomial_int(2 * j + 2 * k - 1, 2 * k - 1));
            let coef = binom
                * int(2)
                * k_integral_rational(k as u32, j as u32)
                * rational_pow(&n_r, -(2 * k + 2 * j) as i32);
            ((1 - 2 * k - 2 * j) as i32, coef)
        })
        .collect()
}

/// `I(n,k)` from the closed-form double sum, with `n` folded into the
/// rational coefficients. The result only has odd negative powers of π.
pub fn theorem1_ink(idx: IntegralIndex) -> PiPolynomial {
    PiPolynomial::from_terms(theorem1_terms(idx))
}

/// `∫ sin^{2k}u / u^{2(k-j)} du` over the real line, for `0 <= j <= k-1`.
pub fn lemma3_k_integral(k: u32, j: u32) -> Result<PiPolynomial, Error> {
    if k == 0 {
        return Err(Error::Domain("k must be >= 1"));
    }
    if j >= k {
        return Err(Error::Domain("j must satisfy 0 <= j <= k-1"));
    }
    Ok(PiPolynomial::monomial(k_integral_rational(k, j), 1))
}

/// `I(n,k)` through the periodicity reduction: a weighted sum of the
/// `K(k,j)` integrals, combined with π-polynomial arithmetic.
pub fn lemma2_ink(idx: IntegralIndex) -> PiPolynomial {
    let (n, k) = (idx.n as i64, idx.k as i64);
    let n_r = BigRational::from_integer(BigInt::from(n));
    let pi_n_pow = |m: i64| PiPolynomial::monomial(rational_pow(&n_r, m as i32), m as i32);
    let mut acc = PiPolynomial::zero();
    for j in 0..k {
        let weight = pi_n_pow(-2 * k - 2 * j)
            .scale(&(int(2) * BigRational::from_integer(binomial_int(2 * j + 2 * k - 1, 2 * k - 1))));
        let kint = lemma3_k_integral(k as u32, j as u32).expect("j < k");
        acc = &acc + &(&weight * &kint);
    }
    acc
}

/// Leading large-`n` coefficient
/// `b_k = 4k Σ_{i=0}^{k-1} (-1)^i (k-i)^{2k-1} / (i! (2k-i)!)`.
pub fn asymptotic_bk(k: u32) -> Result<BigRational, Error> {
    if k == 0 {
        return Err(Error::Domain("k must be >= 1"));
    }
    let mut acc = BigRational::zero();
    for i in 0..k {
        let num = num_traits::pow(BigInt::from(k - i), (2 * k - 1) as usize);
        let term = BigRational::new(num, factorial(i) * factorial(2 * k - i));
        if i % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc * int(4 * k as i64))
}

/// `b_k π^{1-2k} n^{-2k}`.
pub fn asymptotic_ink(idx: IntegralIndex) -> PiPolynomial {
    let bk = asymptotic_bk(idx.k).expect("k >= 1");
    let n_r = BigRational::from_integer(BigInt::from(idx.n));
    PiPolynomial::monomial(bk * rational_pow(&n_r, -2 * idx.k as i32), 1 - 2 * idx.k as i32)
}

/// One simple fraction `coefficient · (t + pole_sign·πn/2)^multiplicity_exponent`.
///
/// `pole_sign = +1` puts the pole at `-πn/2`, `-1` at `+πn/2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFractionTerm {
    pub pole_sign: i8,
    pub multiplicity_exponent: i32,
    pub coefficient: PiPolynomial,
}

/// The `4k` simple fractions of `[(t - πn/2)(t + πn/2)]^{-2k}`.
pub fn lemma1_expand(idx: IntegralIndex) -> Vec<PartialFractionTerm> {
    let (n, k) = (idx.n as i64, idx.k as i64);
    let n_r = BigRational::from_integer(BigInt::from(n));
    let mut out = Vec::with_capacity(4 * k as usize);
    for j in 0..2 * k {
        let m = (-2 * k - j) as i32;
        let coef = PiPolynomial::monomial(
            rational_pow(&n_r, m) * BigRational::from_integer(binomial_int(j + 2 * k - 1, 2 * k - 1)),
            m,
        );
        let exp = (j - 2 * k) as i32;
        let alt = if j % 2 == 0 { coef.clone() } else { -&coef };
        out.push(PartialFractionTerm { pole_sign: 1, multiplicity_exponent: exp, coefficient: coef });
        out.push(PartialFractionTerm { pole_sign: -1, multiplicity_exponent: exp, coefficient: alt });
    }
    out
}

fn half_pi_n(n: u32) -> PiPolynomial {
    PiPolynomial::monomial(ratio(n as i64, 2), 1)
}

fn ball_signed_pow(ctx: &mut Ctx, base: &Ball, exp: i32) -> Result<Ball, CertifyError> {
    let pw = ctx.ball_powi(base, exp.unsigned_abs());
    if exp >= 0 {
        Ok(pw)
    } else {
        let one = ctx.ball_int(1);
        ctx.ball_div(&one, &pw).ok_or(CertifyError::Retry)
    }
}

/// Sums a partial-fraction expansion at an exact point `t`.
///
/// Points equal to a pole are refused with [`Error::Pole`].
pub fn evaluate_expansion(
    terms: &[PartialFractionTerm],
    n: u32,
    t: &PiPolynomial,
    digits: u32,
) -> Result<DecimalValue, Error> {
    let c = half_pi_n(n);
    let shifted_plus = t + &c;
    let shifted_minus = t - &c;
    if shifted_plus.is_zero() || shifted_minus.is_zero() {
        return Err(Error::Pole);
    }
    certify(digits, |ctx| {
        let plus = ctx.ball_pi_poly(&shifted_plus);
        let minus = ctx.ball_pi_poly(&shifted_minus);
        let mut acc = ctx.ball_int(0);
        for term in terms {
            let base = if term.pole_sign > 0 { &plus } else { &minus };
            let pw = ball_signed_pow(ctx, base, term.multiplicity_exponent)?;
            let coef = ctx.ball_pi_poly(&term.coefficient);
            let v = ctx.ball_mul(&coef, &pw);
            acc = ctx.ball_add(&acc, &v);
        }
        Ok::<_, CertifyError>(acc)
    })
}

/// Direct value of `[(t - πn/2)(t + πn/2)]^{-2k}` at an exact point.
pub fn kernel_reciprocal(idx: IntegralIndex, t: &PiPolynomial, digits: u32) -> Result<DecimalValue, Error> {
    let c = half_pi_n(idx.n);
    let prod = &(t - &c) * &(t + &c);
    if prod.is_zero() {
        return Err(Error::Pole);
    }
    certify(digits, |ctx| {
        let base = ctx.ball_pi_poly(&prod);
        ball_signed_pow(ctx, &base, -2 * idx.k as i32)
    })
}

/// First `k` (scanning upward) where the `f64` inner sum deviates from the
/// exact one by more than `threshold` relative, for any `j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CancellationPoint {
    pub k: u32,
    pub j: u32,
    pub rel_error: f64,
}

/// Largest relative deviation of [`inner_sum_f64`] over `j` for fixed `k`,
/// with the `j` that attains it.
pub fn float_deviation(k: u32) -> (u32, f64) {
    let mut worst = (0, 0.0f64);
    for j in 0..k {
        let exact = inner_sum(k, j);
        let float = inner_sum_f64(k, j);
        let exact_r = BigRational::from_integer(exact.clone());
        let float_r = BigRational::from_float(float).unwrap_or_else(BigRational::zero);
        let rel = if exact.is_zero() {
            if float == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            rational_to_f64(&((float_r - &exact_r).abs() / exact_r.abs()))
        };
        if rel > worst.1 {
            worst = (j, rel);
        }
    }
    worst
}

pub fn cancellation_onset(max_k: u32, threshold: f64) -> Option<CancellationPoint> {
    (1..=max_k).find_map(|k| {
        let (j, rel) = float_deviation(k);
        (rel > threshold).then_some(CancellationPoint { k, j, rel_error: rel })
    })
}

/// The `j = 0` summand of the closed form on its own.
pub fn leading_term(idx: IntegralIndex) -> PiPolynomial {
    let (e, c) = theorem1_terms(idx).into_iter().next().expect("k >= 1");
    PiPolynomial::monomial(c, e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(n: u32, k: u32) -> IntegralIndex {
        IntegralIndex::new(n, k).unwrap()
    }

    #[test]
    fn index_validation() {
        assert!(IntegralIndex::new(0, 1).is_err());
        assert!(IntegralIndex::new(1, 0).is_err());
    }

    #[test]
    fn first_two_closed_forms() {
        assert_eq!(theorem1_ink(idx(1, 1)), PiPolynomial::monomial(int(2), -1));
        assert_eq!(
            theorem1_ink(idx(2, 2)),
            PiPolynomial::from_terms([(-3, ratio(1, 12)), (-5, ratio(5, 32))])
        );
    }

    #[test]
    fn k_integrals() {
        assert_eq!(lemma3_k_integral(1, 0).unwrap(), PiPolynomial::pi_pow(1));
        assert_eq!(lemma3_k_integral(2, 1).unwrap(), PiPolynomial::monomial(ratio(1, 2), 1));
        assert_eq!(lemma3_k_integral(2, 0).unwrap(), PiPolynomial::monomial(ratio(2, 3), 1));
        assert!(lemma3_k_integral(2, 2).is_err());
        assert!(lemma3_k_integral(0, 0).is_err());
    }

    #[test]
    fn both_routes_agree() {
        assert_eq!(lemma2_ink(idx(1, 1)), PiPolynomial::monomial(int(2), -1));
        assert_eq!(lemma2_ink(idx(1, 2)), theorem1_ink(idx(1, 2)));
        assert_eq!(lemma2_ink(idx(5, 4)), theorem1_ink(idx(5, 4)));
    }

    #[test]
    fn bk_values() {
        assert_eq!(asymptotic_bk(1).unwrap(), int(2));
        assert_eq!(asymptotic_bk(2).unwrap(), ratio(4, 3));
        assert!(asymptotic_bk(0).is_err());
        let i3 = idx(7, 3);
        let scaled = leading_term(i3).shift(5).scale(&BigRational::from_integer(BigInt::from(7).pow(6u32)));
        assert_eq!(scaled, PiPolynomial::constant(asymptotic_bk(3).unwrap()));
    }

    #[test]
    fn asymptotic_examples() {
        assert_eq!(asymptotic_ink(idx(1, 1)), theorem1_ink(idx(1, 1)));
        assert_eq!(asymptotic_ink(idx(10, 2)), PiPolynomial::monomial(ratio(4, 3) * ratio(1, 10_000), -3));
    }

    #[test]
    fn structure_of_closed_form() {
        for k in 1..=8u32 {
            let terms = theorem1_terms(idx(3, k));
            let exps: Vec<i32> = terms.iter().map(|t| t.0).collect();
            let expected: Vec<i32> = (0..k as i32).map(|j| 1 - 2 * k as i32 - 2 * j).collect();
            assert_eq!(exps, expected);
            assert_eq!(theorem1_ink(idx(3, k)).len(), k as usize, "no summand vanishes for k={k}");
        }
    }

    #[test]
    fn expansion_has_4k_terms_in_range() {
        let terms = lemma1_expand(idx(2, 3));
        assert_eq!(terms.len(), 12);
        assert!(terms.iter().all(|t| (-6..=-1).contains(&t.multiplicity_exponent)));
    }

    #[test]
    fn expansion_at_origin() {
        let i = idx(1, 1);
        let v = evaluate_expansion(&lemma1_expand(i), 1, &PiPolynomial::zero(), 30).unwrap();
        let expected = crate::precision::pi_poly_eval(&PiPolynomial::monomial(int(16), -4), 30);
        assert!(crate::precision::rel_diff(v.value(), expected.value()) < 1e-28);
    }

    #[test]
    fn expansion_refuses_poles() {
        let i = idx(2, 1);
        let at_pole = PiPolynomial::pi_pow(1);
        assert_eq!(evaluate_expansion(&lemma1_expand(i), 2, &at_pole, 20).unwrap_err(), Error::Pole);
        assert_eq!(evaluate_expansion(&lemma1_expand(i), 2, &(-&at_pole), 20).unwrap_err(), Error::Pole);
        assert_eq!(kernel_reciprocal(i, &at_pole, 20).unwrap_err(), Error::Pole);
    }

    #[test]
    fn expansion_at_one_for_k2() {
        let i = idx(1, 2);
        let v = evaluate_expansion(&lemma1_expand(i), 1, &PiPolynomial::one(), 30).unwrap();
        // (1 - pi/2)^-4 (1 + pi/2)^-4 = 0.21567739952420967229809297657...
        let reference: BigRational = "21567739952420967229809297657/100000000000000000000000000000".parse().unwrap();
        let rel = rational_to_f64(&((v.to_rational() - &reference).abs() / &reference));
        assert!(rel < 1e-12, "rel {rel}");
    }

    #[test]
    fn small_k_float_path_is_fine() {
        assert_eq!(float_deviation(1).1, 0.0);
        assert!(float_deviation(5).1 < 1e-12);
        assert_eq!(inner_sum(2, 1), BigInt::from(-2));
        assert_eq!(inner_sum(2, 0), BigInt::from(4));
    }
}
