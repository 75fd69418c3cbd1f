use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Location, NetlistError};

/// Wire identifier; also the wire's DDR address on the overlay.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WireId(pub u32);

impl fmt::Display for WireId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Gate identifier, mixed into the gate hash.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GateId(pub u64);

impl fmt::Display for GateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    And,
    Xor,
}

impl GateKind {
    pub fn apply(self, a: bool, b: bool) -> bool {
        match self {
            GateKind::And => a & b,
            GateKind::Xor => a ^ b,
        }
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Xor => "XOR",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gate {
    pub id: GateId,
    pub kind: GateKind,
    pub in0: WireId,
    pub in1: WireId,
    pub out: WireId,
}

/// A validated AND/XOR circuit.
///
/// Wires are also numbered densely ("slots"): primary inputs first, then the
/// constant-zero wire when present, then one slot per gate output in gate
/// order. Analyses index per-wire tables by slot.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CircuitRepr", into = "CircuitRepr")]
pub struct Circuit {
    inputs: Vec<WireId>,
    outputs: Vec<WireId>,
    constant_zero: Option<WireId>,
    gates: Vec<Gate>,
    operands: Vec<[u32; 2]>,
    output_slots: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct CircuitRepr {
    inputs: Vec<WireId>,
    outputs: Vec<WireId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    constant_zero: Option<WireId>,
    gates: Vec<Gate>,
}

impl TryFrom<CircuitRepr> for Circuit {
    type Error = NetlistError;

    fn try_from(r: CircuitRepr) -> Result<Self, Self::Error> {
        Circuit::new(r.inputs, r.gates, r.outputs, r.constant_zero)
    }
}

impl From<Circuit> for CircuitRepr {
    fn from(c: Circuit) -> Self {
        CircuitRepr {
            inputs: c.inputs,
            outputs: c.outputs,
            constant_zero: c.constant_zero,
            gates: c.gates,
        }
    }
}

impl Circuit {
    /// Validates and builds a circuit.
    ///
    /// `constant_zero` names a wire whose value is publicly fixed to 0; it is
    /// not a primary input and is not counted in [`Circuit::wire_count`].
    pub fn new(
        inputs: Vec<WireId>,
        gates: Vec<Gate>,
        outputs: Vec<WireId>,
        constant_zero: Option<WireId>,
    ) -> Result<Self, NetlistError> {
        let mut slots: HashMap<u32, u32> = HashMap::with_capacity(inputs.len() + gates.len() + 1);
        for (k, w) in inputs.iter().enumerate() {
            if slots.insert(w.0, k as u32).is_some() {
                return Err(NetlistError::DuplicateInput { at: Location::Input(k), wire: w.0 });
            }
        }
        let mut next_slot = inputs.len() as u32;
        if let Some(z) = constant_zero {
            if slots.insert(z.0, next_slot).is_some() {
                return Err(NetlistError::DuplicateAssignment { at: Location::Declarations, wire: z.0 });
            }
            next_slot += 1;
        }

        let mut operands = Vec::with_capacity(gates.len());
        let mut last_id: Option<u64> = None;
        for (i, g) in gates.iter().enumerate() {
            let at = Location::Gate(i);
            if last_id.is_some_and(|prev| g.id.0 <= prev) {
                return Err(NetlistError::GateIdOrder { at, id: g.id.0 });
            }
            last_id = Some(g.id.0);
            if g.in0 == g.out || g.in1 == g.out {
                return Err(NetlistError::SelfLoop { at, wire: g.out.0 });
            }
            let lookup = |w: WireId| {
                slots
                    .get(&w.0)
                    .copied()
                    .ok_or(NetlistError::UseBeforeDefinition { at, wire: w.0 })
            };
            let pair = [lookup(g.in0)?, lookup(g.in1)?];
            if slots.insert(g.out.0, next_slot).is_some() {
                return Err(NetlistError::DuplicateAssignment { at, wire: g.out.0 });
            }
            next_slot += 1;
            operands.push(pair);
        }

        let output_slots = outputs
            .iter()
            .enumerate()
            .map(|(k, w)| {
                slots.get(&w.0).copied().ok_or(NetlistError::UndeclaredOutput {
                    at: Location::Output(k),
                    wire: w.0,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(z) = constant_zero {
            if let Some(k) = outputs.iter().position(|w| *w == z) {
                return Err(NetlistError::UndeclaredOutput { at: Location::Output(k), wire: z.0 });
            }
        }

        Ok(Circuit {
            inputs,
            outputs,
            constant_zero,
            gates,
            operands,
            output_slots,
        })
    }

    pub fn inputs(&self) -> &[WireId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[WireId] {
        &self.outputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn constant_zero(&self) -> Option<WireId> {
        self.constant_zero
    }

    /// `|inputs| + |gates|`: one memory location per input and per gate output.
    pub fn wire_count(&self) -> usize {
        self.inputs.len() + self.gates.len()
    }

    pub fn and_count(&self) -> usize {
        self.gates.iter().filter(|g| g.kind == GateKind::And).count()
    }

    pub fn xor_count(&self) -> usize {
        self.gates.len() - self.and_count()
    }

    /// Number of dense wire slots, including the constant-zero wire.
    pub fn slot_count(&self) -> usize {
        self.first_gate_slot() + self.gates.len()
    }

    /// Slot of the first gate output.
    pub fn first_gate_slot(&self) -> usize {
        self.inputs.len() + usize::from(self.constant_zero.is_some())
    }

    pub fn constant_zero_slot(&self) -> Option<usize> {
        self.constant_zero.map(|_| self.inputs.len())
    }

    /// Slots read by gate `index`.
    pub fn operand_slots(&self, index: usize) -> [usize; 2] {
        let [a, b] = self.operands[index];
        [a as usize, b as usize]
    }

    pub fn output_slots(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.output_slots.iter().map(|&s| s as usize)
    }

    /// Index of the gate producing `slot`, or `None` for inputs and the constant wire.
    pub fn producer(&self, slot: usize) -> Option<usize> {
        slot.checked_sub(self.first_gate_slot())
    }

    pub fn slot_wire(&self, slot: usize) -> WireId {
        let first = self.first_gate_slot();
        if slot < self.inputs.len() {
            self.inputs[slot]
        } else if slot < first {
            self.constant_zero.expect("constant slot exists")
        } else {
            self.gates[slot - first].out
        }
    }

    /// Wire id to slot lookup table.
    pub fn slot_index(&self) -> HashMap<WireId, usize> {
        (0..self.slot_count()).map(|s| (self.slot_wire(s), s)).collect()
    }

    pub fn max_wire_id(&self) -> Option<WireId> {
        (0..self.slot_count()).map(|s| self.slot_wire(s)).max()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gate(id: u64, kind: GateKind, a: u32, b: u32, out: u32) -> Gate {
        Gate { id: GateId(id), kind, in0: WireId(a), in1: WireId(b), out: WireId(out) }
    }

    fn ids(v: &[u32]) -> Vec<WireId> {
        v.iter().copied().map(WireId).collect()
    }

    #[test]
    fn builds_dense_slots() {
        let c = Circuit::new(
            ids(&[10, 20]),
            vec![gate(0, GateKind::Xor, 10, 20, 5), gate(1, GateKind::And, 5, 99, 7)],
            ids(&[7]),
            Some(WireId(99)),
        )
        .unwrap();
        assert_eq!(c.slot_count(), 5);
        assert_eq!(c.wire_count(), 4);
        assert_eq!(c.operand_slots(0), [0, 1]);
        assert_eq!(c.operand_slots(1), [3, 2]);
        assert_eq!(c.output_slots().collect::<Vec<_>>(), vec![4]);
        assert_eq!(c.slot_wire(2), WireId(99));
        assert_eq!(c.producer(4), Some(1));
        assert_eq!(c.producer(2), None);
    }

    #[test]
    fn rejects_each_violation() {
        let dup_in = Circuit::new(ids(&[1, 1]), vec![], vec![], None);
        assert!(matches!(dup_in, Err(NetlistError::DuplicateInput { wire: 1, .. })));

        let self_loop = Circuit::new(ids(&[0, 1]), vec![gate(0, GateKind::And, 0, 1, 0)], vec![], None);
        assert!(matches!(self_loop, Err(NetlistError::SelfLoop { .. })));

        let undefined = Circuit::new(ids(&[0]), vec![gate(0, GateKind::And, 0, 1, 2)], vec![], None);
        assert!(matches!(undefined, Err(NetlistError::UseBeforeDefinition { wire: 1, .. })));

        let reassigned = Circuit::new(
            ids(&[0, 1]),
            vec![gate(0, GateKind::Xor, 0, 1, 2), gate(1, GateKind::Xor, 0, 1, 2)],
            vec![],
            None,
        );
        assert!(matches!(
            reassigned,
            Err(NetlistError::DuplicateAssignment { at: Location::Gate(1), wire: 2 })
        ));

        let into_input = Circuit::new(ids(&[0, 1]), vec![gate(0, GateKind::Xor, 0, 0, 1)], vec![], None);
        assert!(matches!(into_input, Err(NetlistError::DuplicateAssignment { .. })));

        let missing_out = Circuit::new(ids(&[0]), vec![], ids(&[4]), None);
        assert!(matches!(missing_out, Err(NetlistError::UndeclaredOutput { wire: 4, .. })));

        let order = Circuit::new(
            ids(&[0, 1]),
            vec![gate(3, GateKind::Xor, 0, 1, 2), gate(3, GateKind::Xor, 0, 1, 4)],
            vec![],
            None,
        );
        assert!(matches!(order, Err(NetlistError::GateIdOrder { .. })));
    }

    #[test]
    fn json_round_trip_validates() {
        let c = Circuit::new(ids(&[0, 1]), vec![gate(0, GateKind::Xor, 0, 1, 2)], ids(&[2]), None).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        let back: Circuit = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
        let bad = json.replace("\"in1\":1", "\"in1\":9");
        assert!(serde_json::from_str::<Circuit>(&bad).is_err());
    }

    #[test]
    fn wire_count_of_empty_circuit() {
        let c = Circuit::new(ids(&[0, 1, 2]), vec![], vec![], None).unwrap();
        assert_eq!(c.wire_count(), 3);
    }
}
