//! JSON forms of exact values, measures and verification reports.

use infowell_core::exact::parse_big_rational;
use infowell_core::oracle::{QuadratureResult, VerificationEntry, VerificationReport};
use infowell_core::{Error, PiPolynomial};
use serde::{Deserialize, Serialize};

use crate::eval::Evaluated;

/// Integers are decimal strings so they never overflow a JSON number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub pi_exp: i32,
    pub num: String,
    pub den: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiPolynomialJson {
    pub terms: Vec<TermJson>,
}

impl From<&PiPolynomial> for PiPolynomialJson {
    fn from(p: &PiPolynomial) -> Self {
        let terms = p
            .terms()
            .rev()
            .map(|(e, c)| TermJson { pi_exp: e, num: c.numer().to_string(), den: c.denom().to_string() })
            .collect();
        PiPolynomialJson { terms }
    }
}

impl TryFrom<&PiPolynomialJson> for PiPolynomial {
    type Error = Error;

    fn try_from(j: &PiPolynomialJson) -> Result<Self, Error> {
        let mut p = PiPolynomial::zero();
        for t in &j.terms {
            let c = parse_big_rational(&format!("{}/{}", t.num, t.den))?;
            p.add_term(t.pi_exp, c);
        }
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureJson {
    pub kind: String,
    pub n: u32,
    pub a: Option<String>,
    pub k: Option<u32>,
    pub l: Option<u32>,
    pub space: Option<String>,
    pub exact: Option<PiPolynomialJson>,
    pub decimal: String,
    pub digits: u32,
}

impl From<&Evaluated> for MeasureJson {
    fn from(v: &Evaluated) -> Self {
        MeasureJson {
            kind: v.kind.to_string(),
            n: v.n,
            a: v.a.as_ref().map(|a| a.to_string()),
            k: v.k,
            l: v.l,
            space: v.space.map(|s| s.to_string()),
            exact: v.exact.as_ref().map(PiPolynomialJson::from),
            decimal: v.decimal.to_string(),
            digits: v.decimal.requested_digits(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureJson {
    pub value: String,
    pub abs_error_estimate: f64,
    pub tail_bound: f64,
    pub subdivisions: u64,
    pub truncation_t: f64,
}

/// Significant digits printed for oracle values.
pub const ORACLE_DIGITS: u32 = 20;

impl From<&QuadratureResult> for QuadratureJson {
    fn from(q: &QuadratureResult) -> Self {
        QuadratureJson {
            value: q.to_decimal_string(q.working_digits.min(ORACLE_DIGITS)),
            abs_error_estimate: q.abs_error_estimate,
            tail_bound: q.tail_bound,
            subdivisions: q.subdivisions,
            truncation_t: q.truncation_t,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryJson {
    pub quantity: String,
    pub n: u32,
    pub k: u32,
    pub closed_form: String,
    pub oracle: Option<QuadratureJson>,
    pub error: Option<String>,
    pub rel_diff: Option<f64>,
    pub pass: bool,
}

impl From<&VerificationEntry> for EntryJson {
    fn from(e: &VerificationEntry) -> Self {
        EntryJson {
            quantity: e.quantity.as_str().to_string(),
            n: e.n,
            k: e.k,
            closed_form: e.closed_form.to_string(),
            oracle: e.oracle.as_ref().ok().map(QuadratureJson::from),
            error: e.oracle.as_ref().err().map(|err| err.to_string()),
            rel_diff: e.rel_diff,
            pass: e.pass,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub tolerance: f64,
    pub working_digits: u32,
    pub all_pass: bool,
    pub entries: Vec<EntryJson>,
}

impl From<&VerificationReport> for ReportJson {
    fn from(r: &VerificationReport) -> Self {
        ReportJson {
            tolerance: r.tolerance,
            working_digits: r.working_digits,
            all_pass: r.all_pass(),
            entries: r.entries.iter().map(EntryJson::from).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use infowell_core::dirichlet::theorem1_ink;
    use infowell_core::IntegralIndex;

    #[test]
    fn pi_polynomial_round_trip() {
        let p = theorem1_ink(IntegralIndex::new(3, 4).unwrap());
        let j = PiPolynomialJson::from(&p);
        let text = serde_json::to_string(&j).unwrap();
        let back: PiPolynomialJson = serde_json::from_str(&text).unwrap();
        assert_eq!(PiPolynomial::try_from(&back).unwrap(), p);
    }

    #[test]
    fn schema_shape() {
        let p: PiPolynomial = "1/12*pi^-3 + 5/32*pi^-5".parse().unwrap();
        let v = serde_json::to_value(PiPolynomialJson::from(&p)).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"terms": [
                {"pi_exp": -3, "num": "1", "den": "12"},
                {"pi_exp": -5, "num": "5", "den": "32"}
            ]})
        );
    }
}
