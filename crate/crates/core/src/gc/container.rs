//! Binary and JSON serializations of a [`GarbledCircuit`].
//!
//! Binary layout, all integers big-endian, labels as 10 bytes:
//!
//! ```text
//! "SIFOGC1\0"
//! u64 n_and,     n_and   x (u64 gate_id, row1, row2, row3)
//! u64 n_inputs,  n_inputs x (u64 wire, label0, label1)
//! u64 n_outputs, n_outputs x (u64 wire, label0, label1)
//! u8 has_constant, [u64 wire, label0]
//! delta
//! ```

use std::collections::BTreeMap;

use super::{AndTables, GarbledAndTable, GarbledCircuit, GcError, GlobalDelta, LabelPair, WireLabel, LABEL_BYTES};
use crate::netlist::{GateId, WireId};

pub const MAGIC: &[u8; 8] = b"SIFOGC1\0";

pub fn to_bytes(gc: &GarbledCircuit) -> Vec<u8> {
    let mut out = Vec::with_capacity(
        8 + 8 + gc.and_tables.len() * (8 + 3 * LABEL_BYTES) + (gc.input_labels.len() + gc.output_decode.len()) * 28 + 64,
    );
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(gc.and_tables.len() as u64).to_be_bytes());
    for (id, table) in gc.and_tables.iter() {
        out.extend_from_slice(&id.0.to_be_bytes());
        for row in &table.rows {
            out.extend_from_slice(&row.to_bytes());
        }
    }
    for map in [&gc.input_labels, &gc.output_decode] {
        out.extend_from_slice(&(map.len() as u64).to_be_bytes());
        for (w, pair) in map {
            out.extend_from_slice(&u64::from(w.0).to_be_bytes());
            out.extend_from_slice(&pair.zero.to_bytes());
            out.extend_from_slice(&pair.one.to_bytes());
        }
    }
    match gc.constant_zero {
        Some((w, label)) => {
            out.push(1);
            out.extend_from_slice(&u64::from(w.0).to_be_bytes());
            out.extend_from_slice(&label.to_bytes());
        }
        None => out.push(0),
    }
    out.extend_from_slice(&gc.delta.label().to_bytes());
    out
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], GcError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.data.len());
        let end = end.ok_or_else(|| GcError::Format(format!("truncated at byte {}", self.pos)))?;
        let slice = &self.data[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn u64(&mut self) -> Result<u64, GcError> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn u8(&mut self) -> Result<u8, GcError> {
        Ok(self.take(1)?[0])
    }

    fn label(&mut self) -> Result<WireLabel, GcError> {
        Ok(WireLabel::from_bytes(self.take(LABEL_BYTES)?.try_into().expect("10 bytes")))
    }

    fn wire(&mut self) -> Result<WireId, GcError> {
        let raw = self.u64()?;
        u32::try_from(raw)
            .map(WireId)
            .map_err(|_| GcError::Format(format!("wire id {raw} out of range")))
    }

    fn count(&mut self, record_bytes: usize) -> Result<usize, GcError> {
        let n = self.u64()?;
        let remaining = (self.data.len() - self.pos) as u64;
        if n.saturating_mul(record_bytes as u64) > remaining {
            return Err(GcError::Format(format!("record count {n} exceeds file size")));
        }
        Ok(n as usize)
    }
}

pub fn from_bytes(data: &[u8]) -> Result<GarbledCircuit, GcError> {
    let mut r = Reader { data, pos: 0 };
    if r.take(MAGIC.len())? != MAGIC {
        return Err(GcError::Format("bad magic".into()));
    }

    let n_and = r.count(8 + 3 * LABEL_BYTES)?;
    let mut tables = Vec::with_capacity(n_and);
    for _ in 0..n_and {
        let id = GateId(r.u64()?);
        let rows = [r.label()?, r.label()?, r.label()?];
        if tables.last().is_some_and(|(prev, _): &(GateId, _)| *prev >= id) {
            return Err(GcError::Format(format!("AND records out of order at gate {id}")));
        }
        tables.push((id, GarbledAndTable { rows }));
    }

    let read_pairs = |r: &mut Reader| -> Result<BTreeMap<WireId, (WireLabel, WireLabel)>, GcError> {
        let n = r.count(8 + 2 * LABEL_BYTES)?;
        let mut map = BTreeMap::new();
        for _ in 0..n {
            let w = r.wire()?;
            let pair = (r.label()?, r.label()?);
            if map.insert(w, pair).is_some() {
                return Err(GcError::Format(format!("duplicate wire {w}")));
            }
        }
        Ok(map)
    };
    let inputs = read_pairs(&mut r)?;
    let outputs = read_pairs(&mut r)?;
    let constant_zero = match r.u8()? {
        0 => None,
        1 => Some((r.wire()?, r.label()?)),
        other => return Err(GcError::Format(format!("bad constant flag {other}"))),
    };
    let delta = GlobalDelta::new(r.label()?).ok_or_else(|| GcError::Format("delta select bit is clear".into()))?;
    if r.pos != data.len() {
        return Err(GcError::Format(format!("{} trailing bytes", data.len() - r.pos)));
    }

    let to_pairs = |map: BTreeMap<WireId, (WireLabel, WireLabel)>| -> Result<BTreeMap<WireId, LabelPair>, GcError> {
        map.into_iter()
            .map(|(w, (zero, one))| {
                if zero ^ one != delta.label() {
                    return Err(GcError::Format(format!("labels of wire {w} do not differ by delta")));
                }
                Ok((w, LabelPair { zero, one }))
            })
            .collect()
    };

    Ok(GarbledCircuit {
        delta,
        input_labels: to_pairs(inputs)?,
        constant_zero,
        and_tables: AndTables::new(tables),
        output_decode: to_pairs(outputs)?,
    })
}

/// Pretty JSON debug form with hex-encoded labels.
pub fn to_json(gc: &GarbledCircuit) -> String {
    serde_json::to_string_pretty(gc).expect("garbled circuit serializes to JSON")
}

pub fn from_json(text: &str) -> Result<GarbledCircuit, GcError> {
    serde_json::from_str(text).map_err(|e| GcError::Format(e.to_string()))
}
