//! The infinite square well on `[-a, a]`: energies and the position and
//! momentum probability densities of its eigenstates.
//!
//! The momentum density carries the prefactor `aπn²/2`, which makes it
//! integrate to one and reproduces `W_k[γ_n] = (πn²/2)^k a^{k-1} I(n,k)`.

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_traits::Signed;

use crate::error::Error;
use crate::exact::{ratio, BigRational, PiPolynomial};
use crate::precision::{rational_to_f64, Ctx};

/// An eigenstate `n` of a well of half-width `a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WellState {
    n: u32,
    a: BigRational,
}

impl WellState {
    pub fn new(n: u32, a: BigRational) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::Domain("quantum number n must be >= 1"));
        }
        if !a.is_positive() {
            return Err(Error::Domain("half-width a must be positive"));
        }
        Ok(Self { n, a })
    }

    /// State `n` of the unit well (`a = 1`).
    pub fn unit(n: u32) -> Result<Self, Error> {
        Self::new(n, BigRational::from_integer(BigInt::from(1)))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn a_f64(&self) -> f64 {
        rational_to_f64(&self.a)
    }

    /// `aπn²/2` as an exact value.
    pub fn momentum_prefactor(&self) -> PiPolynomial {
        PiPolynomial::monomial(&self.a * ratio((self.n as i64).pow(2), 2), 1)
    }
}

/// `E_n = π² n² / (8 a²)`.
pub fn energy(s: &WellState) -> PiPolynomial {
    let n2 = BigRational::from_integer(BigInt::from(s.n).pow(2u32));
    PiPolynomial::monomial(n2 / (&s.a * &s.a * BigRational::from_integer(BigInt::from(8))), 2)
}

/// `ρ_n(x) = sin²(πn(x-a)/(2a)) / a` inside the box, zero outside.
pub fn position_density(s: &WellState, x: f64) -> f64 {
    let a = s.a_f64();
    if x.abs() > a {
        return 0.0;
    }
    let arg = core::f64::consts::PI * s.n as f64 * (x - a) / (2.0 * a);
    let sn = libm::sin(arg);
    sn * sn / a
}

/// Below this distance from a removable singularity the density switches to
/// a series for `sin²(u)/u²`.
pub const SERIES_SWITCH: f64 = 1e-4;

/// `sin²(u)/u²` with its limit `1` at `u = 0`.
pub fn sinc_squared(u: f64) -> f64 {
    if u.abs() < SERIES_SWITCH {
        let u2 = u * u;
        1.0 - u2 / 3.0 + 2.0 * u2 * u2 / 45.0
    } else {
        let s = libm::sin(u);
        s * s / (u * u)
    }
}

/// `γ_n(p) = (aπn²/2) sin²(ap - πn/2) / (a²p² - π²n²/4)²`.
///
/// The points `p = ±πn/(2a)` are removable singularities and evaluate to
/// their finite limits.
pub fn momentum_density(s: &WellState, p: f64) -> f64 {
    use core::f64::consts::PI;
    let a = s.a_f64();
    let n = s.n as f64;
    let pref = a * PI * n * n / 2.0;
    let c = PI * n / 2.0;
    let t = a * p;
    let u = t - c;
    let v = t + c;
    if u.abs() < SERIES_SWITCH {
        // sin²(ap - πn/2) / (u v)² = sinc²(u) / v²
        pref * sinc_squared(u) / (v * v)
    } else if v.abs() < SERIES_SWITCH {
        // sin²(u) = sin²(v - πn) = sin²(v)
        pref * sinc_squared(v) / (u * u)
    } else {
        let sn = libm::sin(u);
        pref * sn * sn / (u * u * v * v)
    }
}

/// High-precision momentum density in zero-anchored coordinates.
///
/// Writing `ap = πn/2 + mπ + σ` with `σ ∈ [0, π]`, one has
/// `sin²(ap - πn/2) = sin²σ`, `u = ap - πn/2 = mπ + σ` and
/// `v = ap + πn/2 = (m+n)π + σ`, so only `sin²σ` (shared by every panel) is
/// transcendental and no point of a panel is ever a removable singularity
/// in disguise.
pub(crate) struct AnchoredMomentum {
    prefactor: BigFloat,
}

impl AnchoredMomentum {
    pub(crate) fn new(ctx: &mut Ctx, s: &WellState) -> Self {
        let pi = ctx.pi_float();
        let pref = ctx.rational_float(&(&s.a * ratio((s.n as i64).pow(2), 2)));
        Self { prefactor: ctx.mul(&pref, &pi) }
    }

    /// `aπn²/2`.
    pub(crate) fn prefactor(&self) -> &BigFloat {
        &self.prefactor
    }

    /// `u v` at local offset `sigma` of the panel with the given offsets.
    pub(crate) fn pole_product(ctx: &Ctx, offsets: &(BigFloat, BigFloat), sigma: &BigFloat) -> BigFloat {
        ctx.mul(&ctx.add(&offsets.0, sigma), &ctx.add(&offsets.1, sigma))
    }

    /// `γ = prefactor · sin²σ / (uv)²`.
    pub(crate) fn density(&self, ctx: &Ctx, uv: &BigFloat, sin2: &BigFloat) -> BigFloat {
        ctx.div(&ctx.mul(&self.prefactor, sin2), &ctx.mul(uv, uv))
    }
}

/// Uniform sample grid `lo, ..., hi` of `points` values (at least two).
pub fn sample_grid(lo: f64, hi: f64, points: usize) -> impl Iterator<Item = f64> {
    let points = points.max(2);
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(move |i| if i + 1 == points { hi } else { lo + step * i as f64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use core::f64::consts::PI;

    fn st(n: u32, a: BigRational) -> WellState {
        WellState::new(n, a).unwrap()
    }

    #[test]
    fn state_validation() {
        assert!(WellState::new(0, int(1)).is_err());
        assert!(WellState::new(1, int(0)).is_err());
        assert!(WellState::new(1, int(-2)).is_err());
    }

    #[test]
    fn energies() {
        assert_eq!(energy(&st(1, int(1))), PiPolynomial::monomial(ratio(1, 8), 2));
        assert_eq!(energy(&st(2, int(1))), PiPolynomial::monomial(ratio(1, 2), 2));
        assert_eq!(energy(&st(1, int(2))), PiPolynomial::monomial(ratio(1, 32), 2));
    }

    #[test]
    fn position_examples() {
        assert!((position_density(&st(1, int(1)), 0.0) - 1.0).abs() < 1e-15);
        assert!(position_density(&st(3, int(1)), 1.0).abs() < 1e-30);
        assert_eq!(position_density(&st(1, int(1)), 2.0), 0.0);
    }

    #[test]
    fn momentum_examples() {
        let s = st(1, int(1));
        assert!((momentum_density(&s, 0.0) - 8.0 / PI.powi(3)).abs() < 1e-15);
        assert!((momentum_density(&s, PI / 2.0) - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!((momentum_density(&s, -PI / 2.0) - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert!(momentum_density(&st(2, int(3)), 1e6) < 1e-20);
    }

    #[test]
    fn continuity_across_removable_points() {
        for n in 1..=6u32 {
            for a in [ratio(1, 2), int(1), int(2)] {
                let s = st(n, a);
                let pstar = PI * n as f64 / (2.0 * s.a_f64());
                for p in [pstar, -pstar] {
                    let g0 = momentum_density(&s, p);
                    for dp in [1e-6, -1e-6] {
                        let g = momentum_density(&s, p + dp);
                        assert!((g - g0).abs() <= 1e-4 * g0, "n={n} p={p} dp={dp}");
                    }
                }
            }
        }
    }

    #[test]
    fn anchored_density_matches_f64() {
        let s = st(3, ratio(3, 2));
        let mut ctx = Ctx::for_digits(30);
        let hp = AnchoredMomentum::new(&mut ctx, &s);
        for (m, sigma) in [(-3i64, 0.25), (-1, 3.0), (0, 1.0), (7, 2.5)] {
            let pi = ctx.pi_float();
            let off = (ctx.mul(&ctx.int(m), &pi), ctx.mul(&ctx.int(m + 3), &pi));
            let sg = ctx.float(sigma);
            let sn = ctx.sin(&sg);
            let uv = AnchoredMomentum::pole_product(&ctx, &off, &sg);
            let g = crate::precision::fast_f64(&hp.density(&ctx, &uv, &ctx.mul(&sn, &sn)));
            let p = (PI * 1.5 + m as f64 * PI + sigma) / 1.5;
            let want = momentum_density(&s, p);
            assert!((g - want).abs() <= 1e-13 * want, "m={m} {g} {want}");
        }
    }

    #[test]
    fn sinc_series_matches_direct_near_switch() {
        let u = SERIES_SWITCH * 1.0001;
        let direct = (libm::sin(u) / u).powi(2);
        let series = 1.0 - u * u / 3.0 + 2.0 * u.powi(4) / 45.0;
        assert!((direct - series).abs() < 1e-15);
        assert_eq!(sinc_squared(0.0), 1.0);
    }
}
