//! Bell correlations, hidden-variable models and detection postselection,
//! all in exact arithmetic.

pub mod classical;
pub mod correlation;
pub mod hvm;
pub mod lemma;
pub mod simulate;

use thiserror::Error;

pub use classical::{apply_functional, is_classical, local_vertices, mixture_of, Classicality, VertexWeight};
pub use correlation::{
    chsh, postselect, signalling_report, total_variation, AliceOutcome, ChshClass, ChshReport, Correlation, Sign,
    SignallingReport, SETTINGS,
};
pub use hvm::{behavior_from_hvm, random_hvm, HiddenValue, HiddenVariableModel, Responses};
pub use lemma::{
    check_lemma_a1, correlated_non_detection, pr_box_variant, random_a1_correlation, random_nonsignalling,
    random_nonsignalling_with_null, LemmaA1Report,
};
pub use simulate::{run_loop_simulation, LoopSimulation, MAX_LOOPS_PER_ROUND};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BellError {
    #[error("invalid correlation: {0}")]
    InvalidCorrelation(String),
    #[error("invalid hidden-variable model: {0}")]
    InvalidModel(String),
    #[error("P0(∅|a={a}) = 1, nothing survives postselection")]
    NullCertain { a: usize },
    #[error("P0(∅|a={a}) depends on b, so postselection is ill-posed")]
    IllPosedPostselection { a: usize },
    #[error("CHSH needs a table without the ∅ outcome; postselect first")]
    NullOutcomePresent,
    #[error("P0 is signalling (A→B deviation {a_to_b}, B→A deviation {b_to_a})")]
    Signalling { a_to_b: String, b_to_a: String },
    #[error("Alice never detects for a={a}, every round would loop forever")]
    GuaranteedLoop { a: usize },
    #[error("a round looped {limit} times")]
    LoopGuard { limit: u64 },
    #[error("the simulation needs at least one round")]
    NoRounds,
}
