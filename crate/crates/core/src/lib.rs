//! Garbled-circuit engine with a scheduling and timing model for an
//! FPGA overlay of AND/XOR garbling cells.
//!
//! - [`gc`]: labels, gate hash, garbling/evaluation and the container format.
//! - [`netlist`]: circuit model and the `.gcn` text format.
//! - [`genlib`]: benchmark circuit generators.
//! - [`scheduler`]: layers, batches, memory placement, register packing.
//! - [`sim`]: discrete-event timing model of the overlay.
//! - [`analysis`]: statistics tables and bandwidth arithmetic.

pub mod analysis;
pub mod gc;
pub mod genlib;
pub mod netlist;
mod scalar;
pub mod scheduler;
pub mod sim;

pub use scalar::{ExactTime, Scalar};

/// Simulator instantiated with `f64` nanoseconds.
pub type SimReportF64 = sim::SimReport<f64>;
/// Simulator instantiated with exact rational nanoseconds.
pub type SimReportExact = sim::SimReport<ExactTime>;
pub type TimingParamsF64 = sim::TimingParams<f64>;
pub type TimingParamsExact = sim::TimingParams<ExactTime>;
