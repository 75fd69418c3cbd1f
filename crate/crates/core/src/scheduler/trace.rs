//! Host-to-overlay command stream.
//!
//! Big-endian layout:
//!
//! ```text
//! "SIFOTR1\0"
//! u32 n_and_cells, u32 n_xor_cells, u64 n_records
//! n_records x (u8 flags, u16 cell, u32 layer, u32 reg0, u32 reg1)
//! ```
//!
//! Flag bit 0 marks an AND gate, bit 1 the first gate of a dispatch unit (an
//! AND batch or a group of `n_xor_cells` XOR gates).

use serde::Serialize;

use super::memory::MemoryMap;
use super::pack::{pack_addresses, PackedAddress};
use super::{Schedule, SchedError};
use crate::netlist::{Circuit, GateKind};

pub const MAGIC: &[u8; 8] = b"SIFOTR1\0";
const RECORD_BYTES: usize = 15;
const FLAG_AND: u8 = 1;
const FLAG_UNIT_START: u8 = 2;

/// One gate in host send order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub gate: u32,
    pub kind: GateKind,
    pub layer: u32,
    pub cell: u32,
    pub unit_start: bool,
}

/// Send order: per layer, the XOR stream, then the AND batches.
pub fn issue_order(c: &Circuit, s: &Schedule) -> Vec<Issue> {
    let mut out = Vec::with_capacity(s.gate_count());
    for plan in &s.layers {
        for (i, slot) in plan.xor_stream.iter().enumerate() {
            let kind = c.gates()[slot.gate as usize].kind;
            out.push(Issue { gate: slot.gate, kind, layer: plan.layer, cell: slot.cell, unit_start: i % s.n_xor == 0 });
        }
        for batch in &plan.and_batches {
            for (i, slot) in batch.iter().enumerate() {
                let kind = c.gates()[slot.gate as usize].kind;
                out.push(Issue { gate: slot.gate, kind, layer: plan.layer, cell: slot.cell, unit_start: i == 0 });
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TraceRecord {
    pub kind: GateKind,
    pub unit_start: bool,
    pub cell: u16,
    pub layer: u32,
    pub addresses: PackedAddress,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub n_and_cells: u32,
    pub n_xor_cells: u32,
    pub records: Vec<TraceRecord>,
}

pub fn build_trace(c: &Circuit, s: &Schedule, map: &MemoryMap) -> Result<Trace, SchedError> {
    let records = issue_order(c, s)
        .into_iter()
        .map(|is| {
            let g = is.gate as usize;
            let [a, b] = c.operand_slots(g);
            let out = c.first_gate_slot() + g;
            let cell = u16::try_from(is.cell).map_err(|_| SchedError::Config(format!("cell index {} exceeds 16 bits", is.cell)))?;
            Ok(TraceRecord {
                kind: is.kind,
                unit_start: is.unit_start,
                cell,
                layer: is.layer,
                addresses: pack_addresses(map.placement(a), map.placement(b), map.placement(out))?,
            })
        })
        .collect::<Result<_, SchedError>>()?;
    Ok(Trace { n_and_cells: s.n_and as u32, n_xor_cells: s.n_xor as u32, records })
}

impl Trace {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(24 + self.records.len() * RECORD_BYTES);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&self.n_and_cells.to_be_bytes());
        out.extend_from_slice(&self.n_xor_cells.to_be_bytes());
        out.extend_from_slice(&(self.records.len() as u64).to_be_bytes());
        for r in &self.records {
            let mut flags = if r.kind == GateKind::And { FLAG_AND } else { 0 };
            if r.unit_start {
                flags |= FLAG_UNIT_START;
            }
            out.push(flags);
            out.extend_from_slice(&r.cell.to_be_bytes());
            out.extend_from_slice(&r.layer.to_be_bytes());
            out.extend_from_slice(&r.addresses.reg0.to_be_bytes());
            out.extend_from_slice(&r.addresses.reg1.to_be_bytes());
        }
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self, SchedError> {
        let err = |m: &str| SchedError::Trace(m.to_string());
        if data.len() < 24 || &data[..8] != MAGIC {
            return Err(err("bad header"));
        }
        let be32 = |b: &[u8]| u32::from_be_bytes(b.try_into().expect("4 bytes"));
        let n_and_cells = be32(&data[8..12]);
        let n_xor_cells = be32(&data[12..16]);
        let n = u64::from_be_bytes(data[16..24].try_into().expect("8 bytes"));
        let body = &data[24..];
        if n.checked_mul(RECORD_BYTES as u64) != Some(body.len() as u64) {
            return Err(err("record count does not match length"));
        }
        if n_and_cells == 0 || n_xor_cells == 0 {
            return Err(err("cell counts must be positive"));
        }
        let records = body
            .chunks_exact(RECORD_BYTES)
            .map(|r| {
                let flags = r[0];
                if flags & !(FLAG_AND | FLAG_UNIT_START) != 0 {
                    return Err(err("unknown flag bits"));
                }
                Ok(TraceRecord {
                    kind: if flags & FLAG_AND != 0 { GateKind::And } else { GateKind::Xor },
                    unit_start: flags & FLAG_UNIT_START != 0,
                    cell: u16::from_be_bytes([r[1], r[2]]),
                    layer: be32(&r[3..7]),
                    addresses: PackedAddress { reg0: be32(&r[7..11]), reg1: be32(&r[11..15]) },
                })
            })
            .collect::<Result<_, _>>()?;
        Ok(Trace { n_and_cells, n_xor_cells, records })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genlib::gen_multiplier;
    use crate::scheduler::{allocate_directly_used, extract_layers, make_schedule};

    #[test]
    fn round_trip() {
        let c = gen_multiplier(6);
        let l = extract_layers(&c);
        let s = make_schedule(&c, &l, 4, 3);
        let m = allocate_directly_used(&c, &l, 64);
        let t = build_trace(&c, &s, &m).unwrap();
        assert_eq!(t.records.len(), c.gates().len());
        let bytes = t.to_bytes();
        assert_eq!(bytes.len(), 24 + 15 * c.gates().len());
        assert_eq!(Trace::from_bytes(&bytes).unwrap(), t);
        assert!(Trace::from_bytes(&bytes[..bytes.len() - 1]).is_err());

        let units = t.records.iter().filter(|r| r.unit_start && r.kind == GateKind::And).count();
        assert_eq!(units, s.and_batch_count());
        for (r, is) in t.records.iter().zip(issue_order(&c, &s)) {
            let g = is.gate as usize;
            let [a, b] = c.operand_slots(g);
            assert_eq!(r.addresses.unpack(), [m.placement(a), m.placement(b), m.placement(c.first_gate_slot() + g)]);
        }
    }
}
