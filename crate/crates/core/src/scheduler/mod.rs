//! Host-side preparation for the overlay: layer extraction, batching onto
//! AND/XOR cells, BRAM/DDR placement policies and register packing.

mod layers;
mod memory;
mod pack;
pub mod trace;

pub use layers::{
    extract_layers, make_schedule, reprogram_count, wire_stats, CellSlot, LayerPlan, Layering, Schedule, WireStats,
    WireUsage,
};
pub use memory::{
    access_counts, allocate, allocate_directly_used, allocate_mfu, directly_used_eligible, MemoryMap, Placement,
    Policy, DEFAULT_DIRECT_CAPACITY, DEFAULT_MFU_CAPACITY,
};
pub use pack::{pack_addresses, PackedAddress, ADDRESS_BITS, FIELD_BITS};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchedError {
    #[error("address {address} does not fit in 20 bits")]
    AddressOverflow { address: u32 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("malformed trace: {0}")]
    Trace(String),
}
