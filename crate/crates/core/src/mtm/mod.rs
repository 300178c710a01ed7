//! Monotone Turing machines: specification, execution, self-delimiting
//! descriptions and a reference universal machine.

pub mod encode;
pub mod exec;
pub mod library;
pub mod machine;
pub mod random;
pub mod universal;

pub use encode::{decode_machine, encode_machine, DecodeError, EncodingError};
pub use exec::{outputs_prefix, run, Execution, RunOutcome, RunStatus, Verdict};
pub use machine::{Action, MachineError, MachineFile, MachineSpec, Move, State, TransitionRecord};
pub use random::{random_machine, RandomMachineParams};
pub use universal::{reference_universal, universal_input};
