//! Exact, budget-bounded tools for algorithmic probability, universal
//! mixtures and Bell correlations.
//!
//! All probabilities are exact rationals. Quantities that are uncomputable in
//! general (algorithmic probability, monotone complexity) are only ever
//! reported as certified bounds together with the budgets that produced them.

pub mod algprob;
pub mod bell;
pub mod bits;
pub mod induction;
pub mod mixture;
pub mod mtm;
pub mod rational;

pub use bits::{bits, BitString};
pub use rational::Rational;
