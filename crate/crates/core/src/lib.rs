//! Refined inertia of real matrices, sign-pattern qualitative classes, and
//! the `H_n` analysis layer for the arrow-shaped families `A1`, `A2`, `A3`.
//!
//! The crate has four layers:
//!
//! - [`pattern`]: sign patterns, the three families, equivalence
//!   transformations and irreducibility.
//! - [`realization`]: sampling the qualitative class `Q(A)`, the arrow form,
//!   witness embedding and repeated-diagonal deflation.
//! - [`engine`]: exact (rational) and numeric refined inertia.
//! - [`hn`]: witness suites, Monte-Carlo falsification and lemma validators.
//!
//! [`cli`] wires everything into the `ri` binary.

pub mod cli;
pub mod engine;
mod error;
pub mod hn;
pub mod json;
pub mod pattern;
pub mod realization;

pub use error::{Error, Result};

/// Exact rational scalar used throughout the crate.
pub type Rational = num::BigRational;
