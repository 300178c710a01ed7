//! Algorithmic probability and monotone complexity: certified bounds,
//! Solomonoff normalization and encoding-invariance transforms.

pub mod encoding;
pub mod estimate;
pub mod normalize;

use thiserror::Error;

use crate::bits::BitString;

pub use encoding::{encoding_apply, transport_machine, EncodingMap, FlipAutomaton, FlipRule};
pub use estimate::{
    estimate_km, estimate_m, estimate_m_enumerative, explore, BudgetSchedule, EstimateReport, EstimateTable,
};
pub use normalize::{conditional, normalize, normalize_table, NodeValue, NodeValues, NormalizedMeasure};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgProbError {
    #[error("node {node:?} lies beyond the computed depth {depth}")]
    OutOfDepth { node: BitString, depth: usize },
    #[error("node {0:?} is undefined (zero normalization denominator above it)")]
    UndefinedNode(BitString),
    #[error("conditioning on {0:?}, which has value 0")]
    ZeroConditioning(BitString),
    #[error("flip rule did not produce a bit on {prefix:?} within {step_bound} steps")]
    MapEvaluation { prefix: BitString, step_bound: usize },
    #[error("invalid flip rule: {0}")]
    InvalidFlipRule(String),
    #[error("only automaton flip rules can be transported onto a machine")]
    TransportUnsupported,
}
