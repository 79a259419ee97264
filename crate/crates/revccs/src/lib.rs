//! Reversible CCS: syntax, the reversible transition system, configuration
//! structures and their operations, encodings, and behavioural equivalences.

pub mod cli;
pub mod encodings;
pub mod equivalences;
pub mod rccs;
pub mod structures;
pub mod syntax;
