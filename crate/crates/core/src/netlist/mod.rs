//! AND/XOR gate netlists: data model, validation, the `.gcn` text format and
//! a JSON form of the same structure.
//!
//! A circuit is an ordered gate list in which every gate only reads wires
//! defined earlier (primary inputs, the optional constant-zero wire, or
//! outputs of preceding gates). File order is the topological order used by
//! the garbler and the layer extractor.

mod circuit;
mod parse;
mod write;

pub use circuit::{Circuit, Gate, GateId, GateKind, WireId};
pub use parse::{parse, parse_with, ParseMode};
pub use write::write;

use thiserror::Error;

/// Where a validation problem was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    /// 1-based line in a `.gcn` file.
    Line(usize),
    /// 0-based position in the gate list.
    Gate(usize),
    /// 0-based position in the input list.
    Input(usize),
    /// 0-based position in the output list.
    Output(usize),
    /// Circuit-level declarations (outputs, constant wire).
    Declarations,
}

impl std::fmt::Display for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Location::Line(n) => write!(f, "line {n}"),
            Location::Gate(i) => write!(f, "gate #{i}"),
            Location::Input(i) => write!(f, "input #{i}"),
            Location::Output(i) => write!(f, "output #{i}"),
            Location::Declarations => f.write_str("declarations"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetlistError {
    #[error("{at}: syntax error: {message}")]
    Syntax { at: Location, message: String },
    #[error("{at}: wire {wire} is assigned more than once")]
    DuplicateAssignment { at: Location, wire: u32 },
    #[error("{at}: wire {wire} is used before it is defined")]
    UseBeforeDefinition { at: Location, wire: u32 },
    #[error("{at}: input wire {wire} is declared more than once")]
    DuplicateInput { at: Location, wire: u32 },
    #[error("{at}: output wire {wire} is never defined")]
    UndeclaredOutput { at: Location, wire: u32 },
    #[error("{at}: gate output wire {wire} is also one of its inputs")]
    SelfLoop { at: Location, wire: u32 },
    #[error("{at}: gate ids must be strictly increasing (gate id {id})")]
    GateIdOrder { at: Location, id: u64 },
    #[error("{at}: constant-zero wire declared more than once")]
    DuplicateConstant { at: Location },
}

impl NetlistError {
    pub fn location(&self) -> Location {
        match self {
            NetlistError::Syntax { at, .. }
            | NetlistError::DuplicateAssignment { at, .. }
            | NetlistError::UseBeforeDefinition { at, .. }
            | NetlistError::DuplicateInput { at, .. }
            | NetlistError::UndeclaredOutput { at, .. }
            | NetlistError::SelfLoop { at, .. }
            | NetlistError::GateIdOrder { at, .. }
            | NetlistError::DuplicateConstant { at } => *at,
        }
    }

    pub(crate) fn relocate(self, map: impl Fn(Location) -> Location) -> Self {
        match self {
            NetlistError::Syntax { at, message } => NetlistError::Syntax { at: map(at), message },
            NetlistError::DuplicateAssignment { at, wire } => {
                NetlistError::DuplicateAssignment { at: map(at), wire }
            }
            NetlistError::UseBeforeDefinition { at, wire } => {
                NetlistError::UseBeforeDefinition { at: map(at), wire }
            }
            NetlistError::DuplicateInput { at, wire } => NetlistError::DuplicateInput { at: map(at), wire },
            NetlistError::UndeclaredOutput { at, wire } => {
                NetlistError::UndeclaredOutput { at: map(at), wire }
            }
            NetlistError::SelfLoop { at, wire } => NetlistError::SelfLoop { at: map(at), wire },
            NetlistError::GateIdOrder { at, id } => NetlistError::GateIdOrder { at: map(at), id },
            NetlistError::DuplicateConstant { at } => NetlistError::DuplicateConstant { at: map(at) },
        }
    }
}
