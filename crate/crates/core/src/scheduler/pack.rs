use serde::{Deserialize, Serialize};

use super::memory::Placement;
use super::SchedError;

/// Address bits per field.
pub const ADDRESS_BITS: u32 = 20;
/// Flag bit plus address.
pub const FIELD_BITS: u32 = ADDRESS_BITS + 1;
const FIELD_MASK: u64 = (1 << FIELD_BITS) - 1;

/// Three placements in two 32-bit registers: `reg1:reg0` holds
/// `out << 42 | in1 << 21 | in0`, each field being `bram_flag << 20 | addr`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PackedAddress {
    pub reg0: u32,
    pub reg1: u32,
}

fn field(p: Placement) -> Result<u64, SchedError> {
    let addr = p.address();
    if addr >= 1 << ADDRESS_BITS {
        return Err(SchedError::AddressOverflow { address: addr });
    }
    Ok(u64::from(p.is_bram()) << ADDRESS_BITS | u64::from(addr))
}

fn unfield(f: u64) -> Placement {
    let addr = (f & ((1 << ADDRESS_BITS) - 1)) as u32;
    if f >> ADDRESS_BITS & 1 == 1 {
        Placement::Bram(addr)
    } else {
        Placement::Ddr(addr)
    }
}

pub fn pack_addresses(in0: Placement, in1: Placement, out: Placement) -> Result<PackedAddress, SchedError> {
    let word = field(out)? << (2 * FIELD_BITS) | field(in1)? << FIELD_BITS | field(in0)?;
    Ok(PackedAddress { reg0: word as u32, reg1: (word >> 32) as u32 })
}

impl PackedAddress {
    pub fn word(self) -> u64 {
        u64::from(self.reg1) << 32 | u64::from(self.reg0)
    }

    /// `[in0, in1, out]`.
    pub fn unpack(self) -> [Placement; 3] {
        let w = self.word();
        [0, 1, 2].map(|k| unfield(w >> (k * FIELD_BITS) & FIELD_MASK))
    }
}
