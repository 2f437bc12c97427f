//! Exact VaR-induced acceptance sets and falsifiers for acceptance-set axioms.

pub mod acceptance;
pub mod characterize;
pub mod cli;
pub mod counterexamples;
pub mod distribution;
pub mod error;
pub mod linear;
pub mod num;
pub mod properties;
pub mod risk_measures;

pub use error::{Error, Result};
