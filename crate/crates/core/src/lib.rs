//! Exact Dirichlet-like trigonometric integrals
//!
//! ```text
//! I(n,k) = ∫ [ sin²(t - πn/2) / (t² - π²n²/4)² ]^k dt      over ℝ
//! ```
//!
//! and the information measures of the one-dimensional infinite square well
//! built on them: entropic moments, Rényi and Tsallis entropies, Rényi
//! lengths and the position–momentum uncertainty-like combinations.
//!
//! Closed forms are exact [`PiPolynomial`]s. Decimal output goes through
//! ball arithmetic with a certified error bound, and the [`oracle`] module
//! re-derives every integral by adaptive quadrature as an independent check.
//!
//! The crate is `no_std` (it needs `alloc`); enable the `std` feature to get
//! `std` support in the numeric dependencies.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod dirichlet;
pub mod error;
pub mod exact;
pub mod measures;
pub mod oracle;
pub mod precision;
pub mod well;

pub use dirichlet::IntegralIndex;
pub use error::Error;
pub use exact::{BigRational, PiPolynomial};
pub use measures::{MeasureKind, MeasureValue, Space};
pub use precision::DecimalValue;
pub use well::WellState;
