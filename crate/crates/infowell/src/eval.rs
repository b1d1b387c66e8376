//! Dispatch from a quantity name to the core library, and the parallel grids.

use std::fmt;

use infowell_core::dirichlet::{asymptotic_ink, theorem1_ink};
use infowell_core::measures::*;
use infowell_core::oracle::{verification_cells, verify_cell, VerificationReport};
use infowell_core::precision::{pi_poly_eval, rational_to_f64};
use infowell_core::well::{energy, momentum_density, position_density, sample_grid};
use infowell_core::{BigRational, DecimalValue, Error, IntegralIndex, PiPolynomial, Space, WellState};
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Quantity {
    /// The integral I(n,k)
    Ink,
    /// Entropic moment W_k
    W,
    /// Rényi entropy R_k
    Renyi,
    /// Tsallis entropy T_k
    Tsallis,
    /// Rényi length L_k
    Length,
    /// R_k[ρ] + R_l[γ]
    Usum,
    /// W_k[ρ]^{1/2k} W_l[γ]^{-1/2l}
    Uquot,
    /// L_k[ρ] L_l[γ]
    Uprod,
    /// Energy E_n
    Energy,
}

impl Quantity {
    pub fn name(&self) -> &'static str {
        match self {
            Quantity::Ink => "ink",
            Quantity::W => "w",
            Quantity::Renyi => "renyi",
            Quantity::Tsallis => "tsallis",
            Quantity::Length => "length",
            Quantity::Usum => "usum",
            Quantity::Uquot => "uquot",
            Quantity::Uprod => "uprod",
            Quantity::Energy => "energy",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One computed value, whatever its source.
#[derive(Clone, Debug)]
pub struct Evaluated {
    pub kind: &'static str,
    pub n: u32,
    pub a: Option<BigRational>,
    pub k: Option<u32>,
    pub l: Option<u32>,
    pub space: Option<Space>,
    pub exact: Option<PiPolynomial>,
    pub decimal: DecimalValue,
}

impl From<MeasureValue> for Evaluated {
    fn from(m: MeasureValue) -> Self {
        Evaluated {
            kind: m.kind.as_str(),
            n: m.state.n(),
            a: Some(m.state.a().clone()),
            k: Some(m.order_k),
            l: m.order_l,
            space: Some(m.space),
            exact: m.exact_part,
            decimal: m.decimal,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Request {
    pub quantity: Quantity,
    pub n: u32,
    pub k: u32,
    /// Defaults to `k` for the joint measures.
    pub l: Option<u32>,
    pub a: BigRational,
    pub space: Space,
    pub digits: u32,
}

pub fn evaluate(r: &Request) -> Result<Evaluated, Error> {
    let s = WellState::new(r.n, r.a.clone())?;
    let (k, l, d) = (r.k, r.l.unwrap_or(r.k), r.digits);
    let single = |mom: fn(&WellState, u32, u32) -> Result<MeasureValue, Error>,
                  pos: fn(&WellState, u32, u32) -> Result<MeasureValue, Error>| {
        match r.space {
            Space::Momentum => mom(&s, k, d),
            Space::Position => pos(&s, k, d),
            Space::Joint => Err(Error::Domain("this quantity needs --space position or momentum")),
        }
    };
    let v = match r.quantity {
        Quantity::Ink => {
            let exact = theorem1_ink(IntegralIndex::new(r.n, k)?);
            return Ok(Evaluated {
                kind: "ink",
                n: r.n,
                a: None,
                k: Some(k),
                l: None,
                space: None,
                decimal: pi_poly_eval(&exact, d),
                exact: Some(exact),
            });
        }
        Quantity::Energy => {
            let exact = energy(&s);
            return Ok(Evaluated {
                kind: "energy",
                n: r.n,
                a: Some(r.a.clone()),
                k: None,
                l: None,
                space: None,
                decimal: pi_poly_eval(&exact, d),
                exact: Some(exact),
            });
        }
        Quantity::W => single(momentum_entropic_moment, position_entropic_moment)?,
        Quantity::Renyi => single(momentum_renyi_entropy, position_renyi_entropy)?,
        Quantity::Tsallis => single(momentum_tsallis_entropy, position_tsallis_entropy)?,
        Quantity::Length => single(momentum_renyi_length, position_renyi_length)?,
        Quantity::Usum => uncertainty_sum(&s, k, l, d)?,
        Quantity::Uquot => uncertainty_quotient(&s, k, l, d)?,
        Quantity::Uprod => uncertainty_product(&s, k, l, d)?,
    };
    Ok(v.into())
}

/// Every `(n, k)` of the ranges, `n`-major, evaluated in parallel.
pub fn table(
    base: &Request,
    ns: std::ops::RangeInclusive<u32>,
    ks: std::ops::RangeInclusive<u32>,
) -> Vec<(u32, u32, Result<Evaluated, Error>)> {
    let cells: Vec<(u32, u32)> = ns.flat_map(|n| ks.clone().map(move |k| (n, k))).collect();
    cells
        .into_par_iter()
        .map(|(n, k)| {
            let r = Request { n, k, ..base.clone() };
            (n, k, evaluate(&r))
        })
        .collect()
}

/// The core verification grid restricted to the given ranges, in parallel.
/// Cell order matches the sequential run.
pub fn verify_parallel(
    ns: std::ops::RangeInclusive<u32>,
    ks: std::ops::RangeInclusive<u32>,
    tol: f64,
    working_digits: u32,
) -> Result<VerificationReport, Error> {
    if ns.is_empty() || ks.is_empty() || *ns.start() == 0 || *ks.start() == 0 {
        return Err(Error::Domain("grid ranges must be non-empty and start at >= 1"));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain("tolerance must be positive"));
    }
    let entries = verification_cells(*ns.end(), *ks.end())
        .into_iter()
        .filter(|(_, n, k)| ns.contains(n) && ks.contains(k))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(q, n, k)| verify_cell(q, n, k, tol, working_digits))
        .collect();
    Ok(VerificationReport { entries, tolerance: tol, working_digits })
}

#[derive(Clone, Debug)]
pub struct AsymptoteRow {
    pub n: u32,
    pub k: u32,
    pub exact: DecimalValue,
    pub asymptotic: DecimalValue,
    pub ratio: DecimalValue,
}

/// Exact `I(n,k)` against its leading large-`n` term.
pub fn asymptote_row(n: u32, k: u32, digits: u32) -> Result<AsymptoteRow, Error> {
    let idx = IntegralIndex::new(n, k)?;
    let exact_p = theorem1_ink(idx);
    let asym_p = asymptotic_ink(idx);
    // Both share the factor π^{1-2k}, so the ratio is a polynomial in 1/π².
    let lead = asym_p.terms().next().map(|(e, c)| (e, c.clone())).expect("one term");
    let ratio_p = exact_p.shift(-lead.0).scale(&lead.1.recip());
    Ok(AsymptoteRow {
        n,
        k,
        exact: pi_poly_eval(&exact_p, digits),
        asymptotic: pi_poly_eval(&asym_p, digits),
        ratio: pi_poly_eval(&ratio_p, digits),
    })
}

/// Density samples on a uniform grid: `[-a, a]` in position space,
/// `[-p_max, p_max]` in momentum space.
pub fn density_samples(s: &WellState, space: Space, points: usize, p_max: Option<f64>) -> Result<Vec<(f64, f64)>, Error> {
    let a = rational_to_f64(s.a());
    match space {
        Space::Position => Ok(sample_grid(-a, a, points).map(|x| (x, position_density(s, x))).collect()),
        Space::Momentum => {
            let hi = p_max.unwrap_or(4.0 * std::f64::consts::PI * s.n() as f64 / a);
            if hi.is_nan() || hi <= 0.0 {
                return Err(Error::Domain("momentum range must be positive"));
            }
            Ok(sample_grid(-hi, hi, points).map(|p| (p, momentum_density(s, p))).collect())
        }
        Space::Joint => Err(Error::Domain("densities live in position or momentum space")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use infowell_core::exact::int;

    fn req(quantity: Quantity, n: u32, k: u32) -> Request {
        Request { quantity, n, k, l: None, a: int(1), space: Space::Momentum, digits: 15 }
    }

    #[test]
    fn dispatch() {
        assert_eq!(evaluate(&req(Quantity::Ink, 1, 1)).unwrap().exact.unwrap().to_string(), "2*pi^-1");
        assert_eq!(evaluate(&req(Quantity::W, 3, 1)).unwrap().decimal.to_f64(), 1.0);
        assert!(matches!(evaluate(&req(Quantity::Renyi, 1, 1)), Err(Error::Order { .. })));
        let e = evaluate(&req(Quantity::Energy, 2, 7)).unwrap();
        assert_eq!(e.exact.unwrap().to_string(), "1/2*pi^2");
        let pos = Request { space: Space::Position, ..req(Quantity::Length, 1, 2) };
        assert_eq!(evaluate(&pos).unwrap().exact.unwrap().to_string(), "4/3");
    }

    #[test]
    fn asymptote_ratio() {
        assert_eq!(asymptote_row(17, 1, 10).unwrap().ratio.to_f64(), 1.0);
        let r = asymptote_row(100, 2, 20).unwrap().ratio.to_f64();
        assert!(r > 1.0 && r - 1.0 < 1e-3);
        assert!(asymptote_row(1, 3, 20).unwrap().ratio.to_f64() != 1.0);
    }

    #[test]
    fn table_order() {
        let t = table(&req(Quantity::Ink, 1, 1), 1..=3, 1..=2);
        let keys: Vec<(u32, u32)> = t.iter().map(|(n, k, _)| (*n, *k)).collect();
        assert_eq!(keys, vec![(1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (3, 2)]);
    }
}
