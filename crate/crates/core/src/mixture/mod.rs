//! Finite Bayesian mixtures of exactly computable (semi)measures.

pub mod diagnostics;
pub mod member;
pub mod state;

use thiserror::Error;

use crate::bits::BitString;

pub use diagnostics::{
    concentration_experiment, zombie_report, zombie_report_capped, zombie_report_mc, ConcentrationSummary,
    ZombieEstimate, ZombieReport, DEFAULT_HORIZON_CAP,
};
pub use member::{parse_family, FamilyMember, MemberKind, MemberSpec, Symbol, Termination};
pub use state::{
    explanation_ranking, make_mixture, mixture_conditional, posterior, MixtureState, SurvivalReport, WeightEntry,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MixtureError {
    #[error("prior weights sum to {0}, which exceeds 1")]
    WeightsExceedOne(String),
    #[error("invalid member: {0}")]
    InvalidMember(String),
    #[error("member id {0} used twice")]
    DuplicateId(usize),
    #[error("no member with id {0}")]
    UnknownMember(usize),
    #[error("evidence {0:?} has probability 0 under the mixture")]
    ImpossibleEvidence(BitString),
    #[error("member {id} assigns probability 0 to {z:?}")]
    MemberExcluded { id: usize, z: BitString },
    #[error("every member terminates with certainty after {0:?}")]
    NoContinuation(BitString),
    #[error("horizon {horizon} exceeds the exhaustive-sum cap {cap}")]
    HorizonTooLarge { horizon: usize, cap: usize },
    #[error("member {0} is a semimeasure; the Monte Carlo estimate needs measures")]
    NotAMeasure(usize),
    #[error("machine member produced fewer than {} bits within {step_budget} steps", length + 1)]
    MachineExhausted { length: usize, step_budget: usize },
    #[error("malformed family file: {0}")]
    Json(String),
}
