//! Adaptive-quadrature oracle.
//!
//! Every integral here is taken directly from its definition, without using
//! any closed form. The real line is cut at the zeros `t = πn/2 + mπ` of
//! `sin²(t - πn/2)`, so each panel is a copy of `σ ∈ [0, π]` and the
//! removable singularities at `t = ±πn/2` sit on panel edges, where
//! Gauss–Legendre never evaluates. Panels are bisected adaptively, comparing
//! the rule on an interval with the rule on its two halves.
//!
//! The integrand is even in `t`, so panel `m` and panel `-n-1-m` carry the
//! same mass; only `m ≥ -n` is integrated. Beyond the truncation point the
//! envelope `sin² ≤ 1` gives a certified bound, and the mean of `sin^{2k}`
//! over a period gives a correction whose error that bound still covers.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec::Vec;
use core::cell::OnceCell;
use core::fmt;

use astro_float::BigFloat;

use crate::dirichlet::{theorem1_ink, IntegralIndex};
use crate::error::Error;
use crate::exact::ratio;
use crate::measures::{momentum_entropic_moment, Space};
use crate::precision::{
    fast_f64, float_to_rational, format_significant, pi_poly_eval, rational_to_f64, rel_diff, Ctx, DecimalValue,
};
use crate::well::{AnchoredMomentum, WellState};

/// Points of the Gauss–Legendre rule used on every subinterval.
pub const RULE_POINTS: usize = 16;
pub const DEFAULT_WORKING_DIGITS: u32 = 30;
pub const DEFAULT_MAX_DEPTH: u32 = 30;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tolerance {
    Absolute(f64),
    /// Relative to a lower bound on the magnitude of the integral.
    Relative(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadOptions {
    pub tol: Tolerance,
    pub working_digits: u32,
    /// Forces the truncation point instead of deriving it from `tol`.
    pub truncation: Option<f64>,
    pub max_depth: u32,
}

impl QuadOptions {
    pub fn absolute(tol: f64) -> Self {
        Self { tol: Tolerance::Absolute(tol), ..Self::default() }
    }

    pub fn relative(tol: f64) -> Self {
        Self { tol: Tolerance::Relative(tol), ..Self::default() }
    }

    pub fn with_digits(mut self, working_digits: u32) -> Self {
        self.working_digits = working_digits;
        self
    }

    pub fn with_truncation(mut self, t: f64) -> Self {
        self.truncation = Some(t);
        self
    }
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            tol: Tolerance::Absolute(1e-8),
            working_digits: DEFAULT_WORKING_DIGITS,
            truncation: None,
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: BigFloat,
    /// Estimated quadrature plus rounding error on the truncated integral.
    pub abs_error_estimate: f64,
    /// Certified bound on the error left by the truncation.
    pub tail_bound: f64,
    /// Number of bisections performed.
    pub subdivisions: u64,
    /// Truncation point in the integration variable `t = ap` (the half-width
    /// `a` for position-space integrals).
    pub truncation_t: f64,
    pub working_digits: u32,
}

impl QuadratureResult {
    pub fn total_error(&self) -> f64 {
        self.abs_error_estimate + self.tail_bound
    }

    pub fn value_f64(&self) -> f64 {
        rational_to_f64(&float_to_rational(&self.value))
    }

    /// The value rounded to `digits` significant digits.
    pub fn to_decimal_string(&self, digits: u32) -> String {
        format_significant(&float_to_rational(&self.value), digits)
    }
}

impl fmt::Display for QuadratureResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {:.3e}", self.to_decimal_string(self.working_digits.min(20)), self.total_error())
    }
}

struct Node {
    sigma: BigFloat,
    weight: BigFloat,
    sin2: BigFloat,
    ln_sin2: OnceCell<BigFloat>,
}

impl Node {
    fn ln_sin2(&self, ctx: &mut Ctx) -> &BigFloat {
        self.ln_sin2.get_or_init(|| ctx.ln(&self.sin2))
    }
}

/// Offsets `(mπ, (m+n)π)` of a panel on the line.
type Offsets = (BigFloat, BigFloat);

type PanelFn<'a> = dyn FnMut(&mut Ctx, &Offsets, &Node) -> BigFloat + 'a;
type RefFn<'a> = dyn FnMut(&mut Ctx, &Node) -> BigFloat + 'a;

#[derive(Default)]
struct Stats {
    err: f64,
    abs_sum: f64,
    subdivisions: u64,
}

/// Gauss–Legendre nodes on `[-1, 1]` and weights, at working precision.
fn gauss_legendre(ctx: &Ctx, points: usize) -> Vec<(BigFloat, BigFloat)> {
    let one = ctx.int(1);
    let two = ctx.int(2);
    let nf = ctx.int(points as i64);
    let eps = libm::ldexp(1.0, 8 - ctx.bits() as i32);
    let eval = |x: &BigFloat| {
        let mut p0 = one.clone();
        let mut p1 = x.clone();
        for j in 1..points {
            let jf = ctx.int(j as i64);
            let a = ctx.mul(&ctx.mul(&ctx.int(2 * j as i64 + 1), x), &p1);
            let p2 = ctx.div(&ctx.sub(&a, &ctx.mul(&jf, &p0)), &ctx.int(j as i64 + 1));
            p0 = p1;
            p1 = p2;
        }
        // P_N'(x) = N (x P_N - P_{N-1}) / (x² - 1)
        let d = ctx.div(&ctx.mul(&nf, &ctx.sub(&ctx.mul(x, &p1), &p0)), &ctx.sub(&ctx.mul(x, x), &one));
        (p1, d)
    };
    let mut out = Vec::with_capacity(points);
    for i in 0..points / 2 {
        let guess = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (points as f64 + 0.5));
        let mut x = ctx.float(guess);
        for _ in 0..100 {
            let (p, d) = eval(&x);
            let dx = ctx.div(&p, &d);
            x = ctx.sub(&x, &dx);
            if fast_f64(&dx).abs() <= eps {
                break;
            }
        }
        let (_, d) = eval(&x);
        let w = ctx.div(&two, &ctx.mul(&ctx.sub(&one, &ctx.mul(&x, &x)), &ctx.mul(&d, &d)));
        out.push((x.neg(), w.clone()));
        out.push((x, w));
    }
    if points % 2 == 1 {
        let (_, d) = eval(&ctx.int(0));
        out.push((ctx.int(0), ctx.div(&two, &ctx.mul(&d, &d))));
    }
    out
}

/// Subinterval `index` of level `level` of the reference panel `[0, π]`
/// holds the nodes mapped onto `[iπ/2^L, (i+1)π/2^L]`, with `sin²σ` cached
/// once for every panel that reuses them.
struct Engine {
    ctx: Ctx,
    rule: Vec<(BigFloat, BigFloat)>,
    pi: BigFloat,
    cache: BTreeMap<(u32, u64), Rc<Vec<Node>>>,
    max_depth: u32,
}

impl Engine {
    fn new(working_digits: u32, max_depth: u32) -> Self {
        let mut ctx = Ctx::for_digits(working_digits);
        let rule = gauss_legendre(&ctx, RULE_POINTS);
        let pi = ctx.pi_float();
        Self { ctx, rule, pi, cache: BTreeMap::new(), max_depth }
    }

    fn nodes(&mut self, level: u32, index: u64) -> Rc<Vec<Node>> {
        if let Some(v) = self.cache.get(&(level, index)) {
            return v.clone();
        }
        let ctx = &mut self.ctx;
        let h = ctx.div(&self.pi, &ctx.int(1i64 << (level + 1)));
        let mid = ctx.mul(&ctx.int(2 * index as i64 + 1), &h);
        let nodes: Vec<Node> = self
            .rule
            .iter()
            .map(|(x, w)| {
                let sigma = ctx.add(&mid, &ctx.mul(&h, x));
                let sn = ctx.sin(&sigma);
                let sin2 = ctx.mul(&sn, &sn);
                Node { sigma, weight: ctx.mul(&h, w), sin2, ln_sin2: OnceCell::new() }
            })
            .collect();
        let v = Rc::new(nodes);
        self.cache.insert((level, index), v.clone());
        v
    }

    fn rule_sum(&mut self, level: u32, index: u64, f: &mut RefFn<'_>) -> BigFloat {
        let nodes = self.nodes(level, index);
        let mut acc = self.ctx.int(0);
        for node in nodes.iter() {
            let v = f(&mut self.ctx, node);
            acc = self.ctx.add(&acc, &self.ctx.mul(&node.weight, &v));
        }
        acc
    }

    fn refine(
        &mut self,
        level: u32,
        index: u64,
        whole: BigFloat,
        f: &mut RefFn<'_>,
        tol: f64,
        stats: &mut Stats,
    ) -> Result<BigFloat, Error> {
        let left = self.rule_sum(level + 1, 2 * index, f);
        let right = self.rule_sum(level + 1, 2 * index + 1, f);
        let halves = self.ctx.add(&left, &right);
        let diff = fast_f64(&self.ctx.sub(&halves, &whole)).abs();
        if diff <= tol {
            stats.err += diff;
            return Ok(halves);
        }
        if level + 1 >= self.max_depth {
            return Err(Error::NoConvergence { max_depth: self.max_depth });
        }
        stats.subdivisions += 1;
        let l = self.refine(level + 1, 2 * index, left, f, tol / 2.0, stats)?;
        let r = self.refine(level + 1, 2 * index + 1, right, f, tol / 2.0, stats)?;
        Ok(self.ctx.add(&l, &r))
    }

    /// Adaptive integral of `f` over the reference panel `[0, π]`.
    fn panel(&mut self, f: &mut RefFn<'_>, tol: f64, stats: &mut Stats) -> Result<BigFloat, Error> {
        let whole = self.rule_sum(0, 0, f);
        let v = self.refine(0, 0, whole, f, tol, stats)?;
        stats.abs_sum += fast_f64(&v).abs();
        Ok(v)
    }

    fn offsets(&self, m: i64, n: u32) -> Offsets {
        let ctx = &self.ctx;
        (ctx.mul(&ctx.int(m), &self.pi), ctx.mul(&ctx.int(m + n as i64), &self.pi))
    }

    /// Level-0 rule on panel `m = -1`: a cheap estimate of one panel's mass.
    fn coarse_line_panel(&mut self, n: u32, f: &mut PanelFn<'_>) -> f64 {
        let off = self.offsets(-1, n);
        fast_f64(&self.rule_sum(0, 0, &mut |ctx, node| f(ctx, &off, node)))
    }

    /// `∫` over `[-c - Mπ, c + Mπ]` of an even integrand given panelwise.
    fn integrate_line(
        &mut self,
        n: u32,
        outer_panels: u64,
        f: &mut PanelFn<'_>,
        tol: f64,
        stats: &mut Stats,
    ) -> Result<BigFloat, Error> {
        let per_panel = tol / (n as f64 + 2.0 * outer_panels as f64);
        let mut total = self.ctx.int(0);
        for m in -(n as i64)..0 {
            let off = self.offsets(m, n);
            let v = self.panel(&mut |ctx, node| f(ctx, &off, node), per_panel, stats)?;
            total = self.ctx.add(&total, &v);
        }
        let two = self.ctx.int(2);
        for m in 0..outer_panels as i64 {
            let off = self.offsets(m, n);
            let mut local = Stats::default();
            let v = self.panel(&mut |ctx, node| f(ctx, &off, node), per_panel, &mut local)?;
            stats.err += 2.0 * local.err;
            stats.abs_sum += 2.0 * local.abs_sum;
            stats.subdivisions += local.subdivisions;
            total = self.ctx.add(&total, &self.ctx.mul(&two, &v));
        }
        Ok(total)
    }

    fn rounding_error(&self, stats: &Stats, ops: u32) -> f64 {
        libm::ldexp(stats.abs_sum, 2 - self.ctx.bits() as i32) * (16.0 + ops as f64)
    }
}

fn precision_error(tol: f64, working_digits: u32, magnitude: f64) -> Error {
    let need = 2.0 + libm::log10(magnitude / tol);
    Error::Precision {
        requested_tol: format!("{tol:e}"),
        working_digits,
        required_digits: libm::ceil(need).max(working_digits as f64 + 1.0) as u32,
    }
}

fn floor_for(working_digits: u32) -> f64 {
    libm::pow(10.0, 2.0 - working_digits as f64)
}

/// Absolute tolerance from the options, checked against the working
/// precision using the estimated magnitude `m` of the integral.
fn absolute_tol(opts: &QuadOptions, m: f64) -> Result<f64, Error> {
    let m = m.abs();
    let tol = match opts.tol {
        Tolerance::Absolute(t) => t,
        Tolerance::Relative(r) => r * m / 2.0,
    };
    if tol.is_nan() || tol <= 0.0 || !tol.is_finite() {
        return Err(Error::Domain("tolerance must be positive"));
    }
    if m > 0.0 && tol < m * floor_for(opts.working_digits) {
        return Err(precision_error(tol, opts.working_digits, m));
    }
    Ok(tol)
}

fn check_result(value: &BigFloat, tol: f64, working_digits: u32) -> Result<(), Error> {
    let v = fast_f64(value).abs();
    if tol < v * floor_for(working_digits) {
        Err(precision_error(tol, working_digits, v))
    } else {
        Ok(())
    }
}

/// `∫_T^∞ (t² - c²)^{-2k} dt` for `T ≥ 2c`, by its binomial series.
pub fn envelope_tail(c: f64, k: u32, t: f64) -> f64 {
    let k = k as f64;
    let r = (c / t) * (c / t);
    let lead = libm::pow(t, 1.0 - 4.0 * k);
    let mut coef = 1.0;
    let mut rp = 1.0;
    let mut sum = 0.0;
    for j in 0..100_000u32 {
        let j = j as f64;
        let term = coef * rp / (4.0 * k + 2.0 * j - 1.0);
        sum += term;
        if term <= 1e-18 * sum {
            break;
        }
        coef *= (2.0 * k + j) / (j + 1.0);
        rp *= r;
    }
    sum * lead
}

/// Mean of `sin^{2k}` over a period: `C(2k,k)/4^k`.
fn sin_power_mean(k: u32) -> f64 {
    let mut m = 1.0;
    for i in 1..=k {
        m *= (2 * i - 1) as f64 / (2 * i) as f64;
    }
    m
}

/// Line truncation plan: number of outer panels, the truncation point, the
/// certified tail bound and the tail correction (both already scaled).
struct Truncation {
    outer_panels: u64,
    t: f64,
    bound: f64,
    correction: f64,
}

/// Chooses the smallest panel-aligned `T ≥ 2c` whose tail bound is below
/// `budget`. `bound(T)` must be decreasing.
fn plan_truncation(c: f64, forced: Option<f64>, budget: f64, bound: impl Fn(f64) -> f64) -> Result<(u64, f64), Error> {
    use core::f64::consts::PI;
    let t = match forced {
        Some(t) if t.is_finite() && t >= 2.0 * c => t,
        Some(_) => return Err(Error::Domain("forced truncation must be at least πn")),
        None => {
            let mut lo = 2.0 * c;
            if bound(lo) <= budget {
                lo
            } else {
                let mut hi = 2.0 * lo;
                while bound(hi) > budget {
                    lo = hi;
                    hi *= 2.0;
                    if hi > 1e15 {
                        return Err(Error::Domain("tolerance too small for a finite truncation"));
                    }
                }
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if bound(mid) <= budget {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                hi
            }
        }
    };
    let m = libm::ceil((t - c) / PI).max(0.0) as u64;
    Ok((m, c + m as f64 * PI))
}

/// Tail plan for `scale · ∫_{|t|>T} [sin²(t-c)/(t²-c²)²]^k dt`.
fn moment_truncation(c: f64, k: u32, scale: f64, forced: Option<f64>, budget: f64) -> Result<Truncation, Error> {
    let mean = sin_power_mean(k);
    let slack = mean.max(1.0 - mean);
    let (outer_panels, t) = plan_truncation(c, forced, budget, |t| 2.0 * scale * slack * envelope_tail(c, k, t))?;
    let env = 2.0 * scale * envelope_tail(c, k, t);
    Ok(Truncation { outer_panels, t, bound: slack * env, correction: mean * env })
}

/// `I(n,k)` by direct quadrature of its defining integral, to absolute
/// tolerance `tol` at the default working precision.
pub fn quad_ink(idx: IntegralIndex, tol: f64) -> Result<QuadratureResult, Error> {
    quad_ink_with(idx, &QuadOptions::absolute(tol))
}

pub fn quad_ink_with(idx: IntegralIndex, opts: &QuadOptions) -> Result<QuadratureResult, Error> {
    let (n, k) = (idx.n(), idx.k());
    let mut eng = Engine::new(opts.working_digits, opts.max_depth);
    let mut f = |ctx: &mut Ctx, off: &Offsets, node: &Node| {
        let uv = AnchoredMomentum::pole_product(ctx, off, &node.sigma);
        let q = ctx.div(&node.sin2, &ctx.mul(&uv, &uv));
        ctx.powi(&q, k as usize)
    };
    let coarse = eng.coarse_line_panel(n, &mut f);
    let tol = absolute_tol(opts, coarse)?;
    let c = core::f64::consts::PI * n as f64 / 2.0;
    let tr = moment_truncation(c, k, 1.0, opts.truncation, tol / 2.0)?;
    let mut stats = Stats::default();
    let body = eng.integrate_line(n, tr.outer_panels, &mut f, tol / 2.0, &mut stats)?;
    let value = eng.ctx.add(&body, &eng.ctx.float(tr.correction));
    check_result(&value, tol, opts.working_digits)?;
    Ok(QuadratureResult {
        abs_error_estimate: stats.err + eng.rounding_error(&stats, 4 + k),
        tail_bound: tr.bound,
        subdivisions: stats.subdivisions,
        truncation_t: tr.t,
        working_digits: opts.working_digits,
        value,
    })
}

/// `W_k[γ_n] = ∫ γ_n(p)^k dp` by quadrature of the momentum density.
pub fn quad_entropic_moment(s: &WellState, k: u32, tol: f64) -> Result<QuadratureResult, Error> {
    quad_entropic_moment_with(s, k, &QuadOptions::absolute(tol))
}

pub fn quad_entropic_moment_with(s: &WellState, k: u32, opts: &QuadOptions) -> Result<QuadratureResult, Error> {
    if k == 0 {
        return Err(Error::Order { order: 0, min: 1 });
    }
    let n = s.n();
    let mut eng = Engine::new(opts.working_digits, opts.max_depth);
    let gamma = AnchoredMomentum::new(&mut eng.ctx, s);
    let inv_a = eng.ctx.rational_float(&s.a().recip());
    let mut f = |ctx: &mut Ctx, off: &Offsets, node: &Node| {
        let uv = AnchoredMomentum::pole_product(ctx, off, &node.sigma);
        let g = gamma.density(ctx, &uv, &node.sin2);
        ctx.mul(&ctx.powi(&g, k as usize), &inv_a)
    };
    let coarse = eng.coarse_line_panel(n, &mut f);
    let tol = absolute_tol(opts, coarse)?;
    let c = core::f64::consts::PI * n as f64 / 2.0;
    let scale = libm::pow(fast_f64(gamma.prefactor()), k as f64) / s.a_f64();
    let tr = moment_truncation(c, k, scale, opts.truncation, tol / 2.0)?;
    let mut stats = Stats::default();
    let body = eng.integrate_line(n, tr.outer_panels, &mut f, tol / 2.0, &mut stats)?;
    let value = eng.ctx.add(&body, &eng.ctx.float(tr.correction));
    check_result(&value, tol, opts.working_digits)?;
    Ok(QuadratureResult {
        abs_error_estimate: stats.err + eng.rounding_error(&stats, 6 + k),
        tail_bound: tr.bound,
        subdivisions: stats.subdivisions,
        truncation_t: tr.t / s.a_f64(),
        working_digits: opts.working_digits,
        value,
    })
}

/// `W_k[ρ_n] = ∫ ρ_n(x)^k dx` by quadrature of the position density.
pub fn quad_position_moment(s: &WellState, k: u32, tol: f64) -> Result<QuadratureResult, Error> {
    quad_position_moment_with(s, k, &QuadOptions::absolute(tol))
}

pub fn quad_position_moment_with(s: &WellState, k: u32, opts: &QuadOptions) -> Result<QuadratureResult, Error> {
    if k == 0 {
        return Err(Error::Order { order: 0, min: 1 });
    }
    let mut eng = Engine::new(opts.working_digits, opts.max_depth);
    // n identical lobes of width 2a/n each: ∫ρ^k dx = (2a/π) a^{-k} ∫_0^π sin^{2k}σ dσ
    let a = eng.ctx.rational_float(s.a());
    let scale = {
        let ctx = &mut eng.ctx;
        let two_a = ctx.mul(&ctx.int(2), &a);
        let apk = ctx.powi(&a, k as usize);
        ctx.div(&two_a, &ctx.mul(&eng.pi, &apk))
    };
    let mut f = |ctx: &mut Ctx, node: &Node| ctx.mul(&scale, &ctx.powi(&node.sin2, k as usize));
    let coarse = fast_f64(&eng.rule_sum(0, 0, &mut f));
    let tol = absolute_tol(opts, coarse)?;
    let mut stats = Stats::default();
    let value = eng.panel(&mut f, tol, &mut stats)?;
    check_result(&value, tol, opts.working_digits)?;
    Ok(QuadratureResult {
        abs_error_estimate: stats.err + eng.rounding_error(&stats, 4 + k),
        tail_bound: 0.0,
        subdivisions: stats.subdivisions,
        truncation_t: s.a_f64(),
        working_digits: opts.working_digits,
        value,
    })
}

/// Differential Shannon entropy `-∫ f ln f` of the position or momentum
/// density. Panels end at the density zeros, so the `f ln f` kinks only
/// ever sit on panel edges.
pub fn shannon_estimate(s: &WellState, space: Space, tol: f64) -> Result<QuadratureResult, Error> {
    shannon_estimate_with(s, space, &QuadOptions::absolute(tol))
}

pub fn shannon_estimate_with(s: &WellState, space: Space, opts: &QuadOptions) -> Result<QuadratureResult, Error> {
    match space {
        Space::Position => shannon_position(s, opts),
        Space::Momentum => shannon_momentum(s, opts),
        Space::Joint => Err(Error::Domain("Shannon entropy needs a single space")),
    }
}

fn shannon_position(s: &WellState, opts: &QuadOptions) -> Result<QuadratureResult, Error> {
    let mut eng = Engine::new(opts.working_digits, opts.max_depth);
    // -∫ρ ln ρ dx = (2/π) ∫_0^π -sin²σ (ln sin²σ - ln a) dσ
    let ln_a = {
        let a = eng.ctx.rational_float(s.a());
        eng.ctx.ln(&a)
    };
    let scale = eng.ctx.div(&eng.ctx.int(-2), &eng.pi);
    let mut f = |ctx: &mut Ctx, node: &Node| {
        let ls = node.ln_sin2(ctx).clone();
        let l = ctx.sub(&ls, &ln_a);
        ctx.mul(&scale, &ctx.mul(&node.sin2, &l))
    };
    let coarse = fast_f64(&eng.rule_sum(0, 0, &mut f));
    let tol = absolute_tol(opts, coarse)?;
    let mut stats = Stats::default();
    let value = eng.panel(&mut f, tol, &mut stats)?;
    check_result(&value, tol, opts.working_digits)?;
    Ok(QuadratureResult {
        abs_error_estimate: stats.err + eng.rounding_error(&stats, 8),
        tail_bound: 0.0,
        subdivisions: stats.subdivisions,
        truncation_t: s.a_f64(),
        working_digits: opts.working_digits,
        value,
    })
}

fn shannon_momentum(s: &WellState, opts: &QuadOptions) -> Result<QuadratureResult, Error> {
    let n = s.n();
    let mut eng = Engine::new(opts.working_digits, opts.max_depth);
    let gamma = AnchoredMomentum::new(&mut eng.ctx, s);
    let ln_pref = eng.ctx.ln(gamma.prefactor());
    let minus_inv_a = eng.ctx.rational_float(&-s.a().recip());
    let mut f = |ctx: &mut Ctx, off: &Offsets, node: &Node| {
        let uv = AnchoredMomentum::pole_product(ctx, off, &node.sigma);
        let g = gamma.density(ctx, &uv, &node.sin2);
        let ln_uv = ctx.ln(&uv.abs());
        let ls = node.ln_sin2(ctx).clone();
        let ln_g = ctx.sub(&ctx.add(&ln_pref, &ls), &ctx.mul(&ctx.int(2), &ln_uv));
        ctx.mul(&minus_inv_a, &ctx.mul(&g, &ln_g))
    };
    let coarse = eng.coarse_line_panel(n, &mut f);
    let tol = absolute_tol(opts, coarse)?;
    let c = core::f64::consts::PI * n as f64 / 2.0;
    let a = s.a_f64();
    let pref = fast_f64(gamma.prefactor());
    // γ ≤ B t^{-4} beyond T; -y ln y is increasing for y ≤ 1/e.
    let bound = |t: f64| {
        let b = pref / libm::pow(1.0 - c * c / (t * t), 2.0);
        if b * libm::pow(t, -4.0) > libm::exp(-1.0) {
            return f64::INFINITY;
        }
        let t3 = t * t * t;
        2.0 * b * (4.0 * libm::log(t) / (3.0 * t3) + 4.0 / (9.0 * t3) - libm::log(b) / (3.0 * t3)) / a
    };
    let (outer_panels, t) = plan_truncation(c, opts.truncation, tol / 2.0, bound)?;
    let tail = bound(t);
    if !tail.is_finite() {
        return Err(Error::Domain("forced truncation lies inside the region where the tail bound holds"));
    }
    let mut stats = Stats::default();
    let value = eng.integrate_line(n, outer_panels, &mut f, tol / 2.0, &mut stats)?;
    check_result(&value, tol, opts.working_digits)?;
    Ok(QuadratureResult {
        abs_error_estimate: stats.err + eng.rounding_error(&stats, 12),
        tail_bound: tail,
        subdivisions: stats.subdivisions,
        truncation_t: t / a,
        working_digits: opts.working_digits,
        value,
    })
}

/// Which closed form a verification cell checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VerifiedQuantity {
    /// `I(n,k)`.
    Ink,
    /// `W_k[γ_n]` at `a = 1`.
    EntropicMoment,
}

impl VerifiedQuantity {
    pub fn as_str(&self) -> &'static str {
        match self {
            VerifiedQuantity::Ink => "ink",
            VerifiedQuantity::EntropicMoment => "w",
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerificationEntry {
    pub quantity: VerifiedQuantity,
    pub n: u32,
    pub k: u32,
    pub closed_form: DecimalValue,
    pub oracle: Result<QuadratureResult, Error>,
    /// `|oracle - closed form| / |closed form|`; `None` if the oracle failed.
    pub rel_diff: Option<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub entries: Vec<VerificationEntry>,
    pub tolerance: f64,
    pub working_digits: u32,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &VerificationEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }
}

/// Cells of a verification grid in report order: every `I(n,k)`, then every
/// `W_k[γ_n]`, each with `n` outer and `k` inner.
pub fn verification_cells(n_max: u32, k_max: u32) -> Vec<(VerifiedQuantity, u32, u32)> {
    let mut cells = Vec::new();
    for q in [VerifiedQuantity::Ink, VerifiedQuantity::EntropicMoment] {
        for n in 1..=n_max {
            for k in 1..=k_max {
                cells.push((q, n, k));
            }
        }
    }
    cells
}

/// One grid cell: closed form against oracle. The oracle runs at a tenth of
/// `tol` (relative) so that the comparison itself can meet `tol`.
pub fn verify_cell(quantity: VerifiedQuantity, n: u32, k: u32, tol: f64, working_digits: u32) -> VerificationEntry {
    let digits = working_digits.max(1);
    let opts = QuadOptions::relative(tol / 10.0).with_digits(digits);
    let (closed_form, oracle) = match quantity {
        VerifiedQuantity::Ink => {
            let idx = IntegralIndex::new(n, k).expect("grid indices are positive");
            (pi_poly_eval(&theorem1_ink(idx), digits), quad_ink_with(idx, &opts))
        }
        VerifiedQuantity::EntropicMoment => {
            let s = WellState::new(n, ratio(1, 1)).expect("grid indices are positive");
            let w = momentum_entropic_moment(&s, k, digits).expect("k >= 1");
            (w.decimal, quad_entropic_moment_with(&s, k, &opts))
        }
    };
    let rel = oracle.as_ref().ok().map(|o| rel_diff(&o.value, closed_form.value()));
    let pass = matches!(rel, Some(r) if r <= tol);
    VerificationEntry { quantity, n, k, closed_form, oracle, rel_diff: rel, pass }
}

/// Compares `I(n,k)` and `W_k[γ_n]` (at `a = 1`) with the oracle over
/// `1 ≤ n ≤ n_max`, `1 ≤ k ≤ k_max`. Failing cells are recorded, not
/// propagated.
pub fn run_verification(n_max: u32, k_max: u32, tol: f64, working_digits: u32) -> Result<VerificationReport, Error> {
    if n_max == 0 || k_max == 0 {
        return Err(Error::Domain("grid bounds must be >= 1"));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain("tolerance must be positive"));
    }
    let entries = verification_cells(n_max, k_max)
        .into_iter()
        .map(|(q, n, k)| verify_cell(q, n, k, tol, working_digits))
        .collect();
    Ok(VerificationReport { entries, tolerance: tol, working_digits })
}
