//! Complexity measures and query-algorithm analysis for partial symmetric Boolean functions.
//!
//! A function is described by a [`WeightProfile`]: its value (zero, one or undefined) on each
//! Hamming weight `0..=n`. On top of that the crate provides
//!
//! - [`measures`]: block sensitivity, fractional block sensitivity, degree and approximate degree,
//! - [`classical`] and [`quantum`]: analytic success probabilities of randomized and quantum
//!   query algorithms, an exact minimax LP for the classical bias, and a Monte Carlo harness,
//! - [`dist`]: exact distributions, distances, Kravchuk and Chebyshev tools,
//! - [`lp`]: a small dense simplex solver over rationals or floats.

pub mod classical;
pub mod dist;
pub mod error;
pub mod exec;
pub mod lp;
pub mod measures;
pub mod numeric;
pub mod profile;
pub mod quantum;
pub mod verify;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Result, SymqError};
pub use numeric::Rational;
pub use profile::{make_fnk, make_fnkl, SensitivePair, Value, WeightProfile};
