//! Computable tests and how predictors extrapolate them.

pub mod persistence;
pub mod predictor;
pub mod test;

use thiserror::Error;

use crate::algprob::AlgProbError;
use crate::bits::BitString;
use crate::mixture::MixtureError;

pub use persistence::{
    bound_check, fair_vs_ones_closed_form, persistence_curve, persistence_curve_capped, BoundCheck, CurvePoint,
    PersistenceCurve, DEFAULT_FRONTIER_CAP,
};
pub use predictor::{predict_next, Bracket, NextBitPrediction, Predictor};
pub use test::{check_sustainable, evaluate_test, ComputableTest, SustainabilityReport, TestRule, Witness};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InductionError {
    #[error("cannot parse test {0:?}")]
    TestSyntax(String),
    #[error("machine test gave no bit on {x:?} within {step_bound} steps")]
    Evaluation { x: BitString, step_bound: usize },
    #[error("node {node:?} lies below depth {depth}")]
    OutOfDepth { node: BitString, depth: usize },
    #[error("predictor gives zero mass to {0:?}")]
    ZeroConditioning(BitString),
    #[error("p(1^{j}) is zero, so p(1 | 1^{j}) is undefined")]
    UndefinedCurve { j: usize },
    #[error("frontier at length {j} has {size} strings, above the cap {cap}")]
    FrontierTooLarge { j: usize, size: usize, cap: usize },
    #[error("weight {0} is not in (0, 1]")]
    BadWeight(String),
    #[error(transparent)]
    Mixture(#[from] MixtureError),
    #[error(transparent)]
    AlgProb(#[from] AlgProbError),
}
