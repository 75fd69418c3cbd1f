//! Garbling with free XOR, three-row reduction and point-and-permute over
//! 80-bit labels and a SHA-1 gate hash.

mod circuit;
pub mod container;
mod gate;
mod label;
pub mod sha1;

pub use circuit::{
    cleartext_evaluate, decode_outputs, encode_inputs, evaluate_circuit, garble_circuit, garble_circuit_traced,
    garbled_round_trip, ActiveLabels, AndTables, Assignment, GarbledCircuit, LabelPair,
};
pub use gate::{evaluate_and, garble_and, garble_xor, hash_gate, GarbledAndTable, ROWS_PER_TABLE, TABLE_BITS};
pub use label::{GlobalDelta, WireLabel, LABEL_BITS, LABEL_BYTES};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GcError {
    #[error("input assignment mismatch (missing wires {missing:?}, unexpected wires {extra:?})")]
    InputMismatch { missing: Vec<u32>, extra: Vec<u32> },
    #[error("active label on output wire {wire} matches neither decode label")]
    Decode { wire: u32 },
    #[error("no garbled table for AND gate {gate}")]
    MissingTable { gate: u64 },
    #[error("malformed garbled-circuit container: {0}")]
    Format(String),
}
