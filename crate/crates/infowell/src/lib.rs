//! Command-line front end for `infowell-core`: single values, (n, k) tables,
//! oracle verification reports, asymptotic comparisons and density samples,
//! as text, CSV or JSON.

pub mod cli;
pub mod eval;
pub mod json;
