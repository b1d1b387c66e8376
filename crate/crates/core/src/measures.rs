//! Entropic moments, Rényi and Tsallis entropies and Rényi lengths of the
//! well densities, and the position–momentum uncertainty-like combinations.
//!
//! Only integer orders are supported. Moments and Tsallis entropies are exact
//! π-polynomials; anything that needs a logarithm or a fractional power is
//! returned as a certified decimal.
//!
//! Position-space closed forms use, for integer `k`,
//! `2Γ(k+½) / (√π Γ(k+1)) = 2·C(2k,k)/4^k`.

use core::fmt;

use num_bigint::BigInt;

use crate::dirichlet::{theorem1_ink, IntegralIndex};
use crate::error::Error;
use crate::exact::{binomial_int, exact_root, int, ratio, rational_pow, BigRational, PiPolynomial};
use crate::precision::{certify, pi_poly_eval, Ball, CertifyError, Ctx, DecimalValue};
use crate::well::WellState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MeasureKind {
    EntropicMoment,
    RenyiEntropy,
    TsallisEntropy,
    RenyiLength,
    UncertaintySum,
    UncertaintyQuotient,
    UncertaintyProduct,
}

impl MeasureKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MeasureKind::EntropicMoment => "entropic_moment",
            MeasureKind::RenyiEntropy => "renyi_entropy",
            MeasureKind::TsallisEntropy => "tsallis_entropy",
            MeasureKind::RenyiLength => "renyi_length",
            MeasureKind::UncertaintySum => "uncertainty_sum",
            MeasureKind::UncertaintyQuotient => "uncertainty_quotient",
            MeasureKind::UncertaintyProduct => "uncertainty_product",
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    Position,
    Momentum,
    Joint,
}

impl Space {
    pub fn as_str(&self) -> &'static str {
        match self {
            Space::Position => "position",
            Space::Momentum => "momentum",
            Space::Joint => "joint",
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A computed measure: the exact value when it has one, and a certified
/// decimal either way.
#[derive(Clone, Debug)]
pub struct MeasureValue {
    pub kind: MeasureKind,
    pub exact_part: Option<PiPolynomial>,
    pub decimal: DecimalValue,
    pub order_k: u32,
    pub order_l: Option<u32>,
    pub state: WellState,
    pub space: Space,
}

fn check_order(k: u32, min: u32) -> Result<(), Error> {
    if k < min {
        Err(Error::Order { order: k as i64, min: min as i64 })
    } else {
        Ok(())
    }
}

/// `(πn²/2)^k I(n,k)`: the `a`-free part of the momentum moments.
pub fn reduced_momentum_moment(n: u32, k: u32) -> Result<PiPolynomial, Error> {
    let idx = IntegralIndex::new(n, k)?;
    let base = rational_pow(&ratio((n as i64).pow(2), 2), k as i32);
    Ok(&PiPolynomial::monomial(base, k as i32) * &theorem1_ink(idx))
}

/// `2·C(2k,k)/4^k`, the `a`-free part of the position moments.
pub fn reduced_position_moment(k: u32) -> BigRational {
    let k = k as i64;
    BigRational::new(BigInt::from(2) * binomial_int(2 * k, k), BigInt::from(4).pow(k as u32))
}

/// `2^{2k-1} / C(2k,k)`, whose `(k-1)`-th root is the position Rényi
/// length of the unit well.
fn position_length_base(k: u32) -> BigRational {
    let k = k as i64;
    BigRational::new(BigInt::from(2).pow((2 * k - 1) as u32), binomial_int(2 * k, k))
}

/// `q ln r`.
fn ln_rational(ctx: &mut Ctx, r: &BigRational, q: BigRational) -> Result<Ball, CertifyError> {
    let b = ctx.ball_rational(r);
    let l = ctx.ball_ln(&b).ok_or(CertifyError::Retry)?;
    Ok(ctx.ball_mul(&l, &ctx.ball_rational(&q)))
}

/// `q ln p`.
fn ln_poly(ctx: &mut Ctx, p: &PiPolynomial, q: BigRational) -> Result<Ball, CertifyError> {
    let b = ctx.ball_pi_poly(p);
    let l = ctx.ball_ln(&b).ok_or(CertifyError::Retry)?;
    Ok(ctx.ball_mul(&l, &ctx.ball_rational(&q)))
}

fn measure(
    kind: MeasureKind,
    space: Space,
    s: &WellState,
    k: u32,
    l: Option<u32>,
    exact_part: Option<PiPolynomial>,
    decimal: DecimalValue,
) -> MeasureValue {
    MeasureValue { kind, exact_part, decimal, order_k: k, order_l: l, state: s.clone(), space }
}

/// `W_k[γ_n] = (πn²/2)^k a^{k-1} I(n,k)`; `W_1 = 1` exactly.
pub fn momentum_entropic_moment(s: &WellState, k: u32, digits: u32) -> Result<MeasureValue, Error> {
    check_order(k, 1)?;
    let exact = reduced_momentum_moment(s.n(), k)?.scale(&rational_pow(s.a(), k as i32 - 1));
    let dec = pi_poly_eval(&exact, digits);
    Ok(measure(MeasureKind::EntropicMoment, Space::Momentum, s, k, None, Some(exact), dec))
}

/// `W_k[ρ_n] = a^{1-k} · 2C(2k,k)/4^k`, independent of `n`.
pub fn position_entropic_moment(s: &WellState, k: u32, digits: u32) -> Result<MeasureValue, Error> {
    check_order(k, 1)?;
    let exact = PiPolynomial::constant(reduced_position_moment(k) * rational_pow(s.a(), 1 - k as i32));
    let dec = pi_poly_eval(&exact, digits);
    Ok(measure(MeasureKind::EntropicMoment, Space::Position, s, k, None, Some(exact), dec))
}

/// `R_k[γ_n] = -ln a + ln((πn²/2)^k I(n,k)) / (1-k)`.
pub fn momentum_renyi_entropy(s: &WellState, k: u32, digits: u32) -> Result<MeasureValue, Error> {
    check_order(k, 2)?;
    let q = reduced_momentum_moment(s.n(), k)?;
    let dec = certify(digits, |ctx| {
        let lq = ln_poly(ctx, &q, ratio(1, 1 - k as i64))?;
        let la = ln_rational(ctx, s.a(), int(1))?;
        Ok::<_, CertifyError>(ctx.ball_sub(&lq, &la))
    })?;
    Ok(measure(MeasureKind::RenyiEntropy, Space::Momentum, s, k, None, None, dec))
}

/// `L_k[γ_n] = W_k[γ_n]^{1/(1-k)} = (1/a) ((πn²/2)^k I(n,k))^{1/(1-k)}`.
pub fn momentum_renyi_length(s: &WellState, k: u32, digits: u32) -> Result<MeasureValue, Error> {
    check_order(k, 2)?;
    let q = reduced_momentum_moment(s.n(), k)?;
    let dec = certify(digits, |ctx| {
        let lq = ln_poly(ctx, &q, ratio(1, 1 - k as i64))?;
        let e = ctx.ball_exp(&lq);
        let a = ctx.ball_rational(s.a());
        ctx.ball_div(&e, &a).ok_or(CertifyError::Retry)
    })?;
    Ok(measure(MeasureKind::RenyiLength, Space::Momentum, s, k, None, None, dec))
}

/// `T_k[γ_n] = (1 - W_k[γ_n]) / (k-1)`, exact.
pub fn momentum_tsallis_entropy(s: &WellState, k: u32, digits: u32) -> Result<MeasureValue, Error> {
    check_order(k, 2)?;
    let w = momentum_entropic_moment(s, k, digits)?.exact_part.expect("moments are exact");
    let exact = (&PiPolynomial::one() - &w).scale(&ratio(1, k as i64 - 1));
    let dec = pi_poly_eval(&exact, digits);
    Ok(measure(MeasureKind::TsallisEntropy, Space::Momentum, s, k, None, Some(exact), dec))
}

/// `R_k[ρ_n] = ln a + ln(2C(2k,k)/4^k) / (1-k)`.
pub fn position_renyi_entropy(s: &WellState, k: u32, digits: u32) -> Result<MeasureValue, Error> {
    check_order(k, 2)?;
    let g = reduced_position_moment(k);
    let dec = certify(digits, |ctx| {
        let lg = ln_rational(ctx, &g, ratio(1, 1 - k as i64))?;
        let la = ln_rational(ctx, s.a(), int(1))?;
        Ok::<_, CertifyError>(ctx.ball_add(&lg, &la))
    })?;
    Ok(measure(MeasureKind::RenyiEntropy, Space::Position, s, k, None, None, dec))
}

/// `T_k[ρ_n] = (1 - a^{1-k} · 2C(2k,k)/4^k) / (k-1)`, a rational.
pub fn position_tsallis_entropy(s: &WellState, k: u32, digits: u32) -> Result<MeasureValue, Error> {
    check_order(k, 2)?;
    let w = reduced_position_moment(k) * rational_pow(s.a(), 1 - k as i32);
    let exact = PiPolynomial::constant((int(1) - w) * ratio(1, k as i64 - 1));
    let dec = pi_poly_eval(&exact, digits);
    Ok(measure(MeasureKind::TsallisEntropy, Space::Position, s, k, None, Some(exact), dec))
}

/// `L_k[ρ_n] = 2^{2+1/(k-1)} a C(2k,k)^{-1/(k-1)}`; exact whenever the
/// `(k-1)`-th root is rational (always for `k = 2`).
pub fn position_renyi_length(s: &WellState, k: u32, digits: u32) -> Result<MeasureValue, Error> {
    check_order(k, 2)?;
    let base = position_length_base(k);
    if let Some(root) = exact_root(&base, k - 1) {
        let exact = PiPolynomial::constant(root * s.a());
        let dec = pi_poly_eval(&exact, digits);
        return Ok(measure(MeasureKind::RenyiLength, Space::Position, s, k, None, Some(exact), dec));
    }
    let dec = certify(digits, |ctx| {
        let lb = ln_rational(ctx, &base, ratio(1, k as i64 - 1))?;
        let e = ctx.ball_exp(&lb);
        let a = ctx.ball_rational(s.a());
        Ok::<_, CertifyError>(ctx.ball_mul(&e, &a))
    })?;
    Ok(measure(MeasureKind::RenyiLength, Space::Position, s, k, None, None, dec))
}

/// `R_k[ρ_n] + R_l[γ_n]`. The `ln a` terms cancel, so it is evaluated from
/// the `a`-free parts.
pub fn uncertainty_sum(s: &WellState, k: u32, l: u32, digits: u32) -> Result<MeasureValue, Error> {
    check_order(k, 2)?;
    check_order(l, 2)?;
    let g = reduced_position_moment(k);
    let q = reduced_momentum_moment(s.n(), l)?;
    let dec = certify(digits, |ctx| {
        let pos = ln_rational(ctx, &g, ratio(1, 1 - k as i64))?;
        let mom = ln_poly(ctx, &q, ratio(1, 1 - l as i64))?;
        Ok::<_, CertifyError>(ctx.ball_add(&pos, &mom))
    })?;
    Ok(measure(MeasureKind::UncertaintySum, Space::Joint, s, k, Some(l), None, dec))
}

/// `[1 + (1-k)T_k[ρ_n]]^{1/2k} [1 + (1-l)T_l[γ_n]]^{-1/2l}
///  = W_k[ρ_n]^{1/2k} W_l[γ_n]^{-1/2l}`.
///
/// Unlike the sum and product this depends on `a`, as
/// `a^{(1-k)/2k - (l-1)/2l}`.
pub fn uncertainty_quotient(s: &WellState, k: u32, l: u32, digits: u32) -> Result<MeasureValue, Error> {
    check_order(k, 2)?;
    check_order(l, 2)?;
    let w_pos = reduced_position_moment(k) * rational_pow(s.a(), 1 - k as i32);
    let w_mom = reduced_momentum_moment(s.n(), l)?.scale(&rational_pow(s.a(), l as i32 - 1));
    let dec = certify(digits, |ctx| {
        let pos = ln_rational(ctx, &w_pos, ratio(1, 2 * k as i64))?;
        let mom = ln_poly(ctx, &w_mom, ratio(1, 2 * l as i64))?;
        let arg = ctx.ball_sub(&pos, &mom);
        Ok::<_, CertifyError>(ctx.ball_exp(&arg))
    })?;
    Ok(measure(MeasureKind::UncertaintyQuotient, Space::Joint, s, k, Some(l), None, dec))
}

/// `L_k[ρ_n] · L_l[γ_n] = 2^{2+1/(k-1)} C(2k,k)^{-1/(k-1)} [(πn²/2)^l I(n,l)]^{-1/(l-1)}`,
/// free of `a`.
pub fn uncertainty_product(s: &WellState, k: u32, l: u32, digits: u32) -> Result<MeasureValue, Error> {
    check_order(k, 2)?;
    check_order(l, 2)?;
    let base = position_length_base(k);
    let q = reduced_momentum_moment(s.n(), l)?;
    let dec = certify(digits, |ctx| {
        let pos = ln_rational(ctx, &base, ratio(1, k as i64 - 1))?;
        let mom = ln_poly(ctx, &q, ratio(1, 1 - l as i64))?;
        let arg = ctx.ball_add(&pos, &mom);
        Ok::<_, CertifyError>(ctx.ball_exp(&arg))
    })?;
    Ok(measure(MeasureKind::UncertaintyProduct, Space::Joint, s, k, Some(l), None, dec))
}
