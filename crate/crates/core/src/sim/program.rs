use serde::Serialize;

use super::SimError;
use crate::netlist::{Circuit, GateKind};
use crate::scheduler::trace::{issue_order, Trace};
use crate::scheduler::{MemoryMap, Placement, Schedule};

/// One gate as seen by the overlay.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Op {
    pub kind: GateKind,
    pub layer: u32,
    pub cell: u32,
    /// First gate of a dispatch unit.
    pub unit_start: bool,
    pub reads: [Placement; 2],
    pub write: Placement,
}

/// Gates in host send order with resolved memory locations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Program {
    pub n_and_cells: u32,
    pub n_xor_cells: u32,
    pub ops: Vec<Op>,
}

impl Program {
    pub fn from_schedule(c: &Circuit, s: &Schedule, map: &MemoryMap) -> Result<Self, SimError> {
        if map.len() != c.slot_count() {
            return Err(SimError::Mismatch(format!(
                "memory map covers {} wires, circuit has {}",
                map.len(),
                c.slot_count()
            )));
        }
        let order = issue_order(c, s);
        let mut seen = vec![false; c.gates().len()];
        for is in &order {
            let slot = seen
                .get_mut(is.gate as usize)
                .ok_or_else(|| SimError::Mismatch(format!("schedule names unknown gate {}", is.gate)))?;
            if std::mem::replace(slot, true) {
                return Err(SimError::Mismatch(format!("gate {} scheduled twice", is.gate)));
            }
        }
        if let Some(g) = seen.iter().position(|s| !s) {
            return Err(SimError::Mismatch(format!("gate {g} is not scheduled")));
        }
        let first = c.first_gate_slot();
        let ops = order
            .into_iter()
            .map(|is| {
                let [a, b] = c.operand_slots(is.gate as usize);
                Op {
                    kind: is.kind,
                    layer: is.layer,
                    cell: is.cell,
                    unit_start: is.unit_start,
                    reads: [map.placement(a), map.placement(b)],
                    write: map.placement(first + is.gate as usize),
                }
            })
            .collect();
        let p = Program { n_and_cells: s.n_and as u32, n_xor_cells: s.n_xor as u32, ops };
        p.check()?;
        Ok(p)
    }

    pub fn from_trace(t: &Trace) -> Result<Self, SimError> {
        let ops = t
            .records
            .iter()
            .map(|r| {
                let [in0, in1, out] = r.addresses.unpack();
                Op { kind: r.kind, layer: r.layer, cell: u32::from(r.cell), unit_start: r.unit_start, reads: [in0, in1], write: out }
            })
            .collect();
        let p = Program { n_and_cells: t.n_and_cells, n_xor_cells: t.n_xor_cells, ops };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<(), SimError> {
        if self.n_and_cells == 0 || self.n_xor_cells == 0 {
            return Err(SimError::Config("cell counts must be positive".into()));
        }
        for (i, op) in self.ops.iter().enumerate() {
            let cells = match op.kind {
                GateKind::And => self.n_and_cells,
                GateKind::Xor => self.n_xor_cells,
            };
            if op.cell >= cells {
                return Err(SimError::Mismatch(format!("op {i} uses cell {} of {cells}", op.cell)));
            }
        }
        Ok(())
    }
}
