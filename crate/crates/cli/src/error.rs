use aitlab_core::algprob::AlgProbError;
use aitlab_core::bell::BellError;
use aitlab_core::induction::InductionError;
use aitlab_core::mixture::MixtureError;
use aitlab_core::mtm::{EncodingError, MachineError};
use thiserror::Error;

/// Failures split by who has to fix them: the caller's input (exit 2) or
/// the mathematics of the request (exit 3).
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Math(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Math(_) => 3,
        }
    }

    /// The message on one line.
    pub fn diagnostic(&self) -> String {
        self.to_string().split_whitespace().collect::<Vec<_>>().join(" ")
    }
}

impl From<MachineError> for CliError {
    fn from(e: MachineError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<EncodingError> for CliError {
    fn from(e: EncodingError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<MixtureError> for CliError {
    fn from(e: MixtureError) -> Self {
        use MixtureError::*;
        match e {
            ImpossibleEvidence(_)
            | MemberExcluded { .. }
            | NoContinuation(_)
            | NotAMeasure(_)
            | MachineExhausted { .. } => CliError::Math(e.to_string()),
            WeightsExceedOne(_)
            | InvalidMember(_)
            | DuplicateId(_)
            | UnknownMember(_)
            | HorizonTooLarge { .. }
            | Json(_) => CliError::Input(e.to_string()),
        }
    }
}

impl From<AlgProbError> for CliError {
    fn from(e: AlgProbError) -> Self {
        use AlgProbError::*;
        match e {
            UndefinedNode(_) | ZeroConditioning(_) | MapEvaluation { .. } => CliError::Math(e.to_string()),
            OutOfDepth { .. } | InvalidFlipRule(_) | TransportUnsupported => CliError::Input(e.to_string()),
        }
    }
}

impl From<InductionError> for CliError {
    fn from(e: InductionError) -> Self {
        use InductionError::*;
        match e {
            Mixture(inner) => inner.into(),
            AlgProb(inner) => inner.into(),
            Evaluation { .. } | ZeroConditioning(_) | UndefinedCurve { .. } | FrontierTooLarge { .. } => {
                CliError::Math(e.to_string())
            }
            TestSyntax(_) | OutOfDepth { .. } | BadWeight(_) => CliError::Input(e.to_string()),
        }
    }
}

impl From<BellError> for CliError {
    fn from(e: BellError) -> Self {
        use BellError::*;
        match e {
            InvalidCorrelation(_) | InvalidModel(_) | NoRounds => CliError::Input(e.to_string()),
            NullCertain { .. }
            | IllPosedPostselection { .. }
            | NullOutcomePresent
            | Signalling { .. }
            | GuaranteedLoop { .. }
            | LoopGuard { .. } => CliError::Math(e.to_string()),
        }
    }
}
