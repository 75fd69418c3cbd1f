use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::gate::{evaluate_and, garble_and, garble_xor, GarbledAndTable, TABLE_BITS};
use super::label::{GlobalDelta, WireLabel};
use super::GcError;
use crate::netlist::{Circuit, GateId, GateKind, WireId};

/// Plaintext bit per wire.
pub type Assignment = BTreeMap<WireId, bool>;
/// Active label per wire.
pub type ActiveLabels = BTreeMap<WireId, WireLabel>;

/// The two labels of one wire, `one == zero ^ delta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabelPair {
    pub zero: WireLabel,
    pub one: WireLabel,
}

impl LabelPair {
    pub fn new(zero: WireLabel, delta: GlobalDelta) -> Self {
        LabelPair { zero, one: zero ^ delta.label() }
    }

    pub fn select(&self, bit: bool) -> WireLabel {
        if bit {
            self.one
        } else {
            self.zero
        }
    }
}

/// Garbled AND tables in gate order; XOR gates have none.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AndTables(Vec<(GateId, GarbledAndTable)>);

impl AndTables {
    pub fn new(mut tables: Vec<(GateId, GarbledAndTable)>) -> Self {
        tables.sort_by_key(|(g, _)| *g);
        AndTables(tables)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, gate: GateId) -> Option<&GarbledAndTable> {
        self.0.binary_search_by_key(&gate, |(g, _)| *g).ok().map(|i| &self.0[i].1)
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &(GateId, GarbledAndTable)> {
        self.0.iter()
    }

    pub fn iter_mut(&mut self) -> impl ExactSizeIterator<Item = &mut (GateId, GarbledAndTable)> {
        self.0.iter_mut()
    }

    /// Ciphertext bits that must be sent to the evaluator.
    pub fn ciphertext_bits(&self) -> usize {
        self.0.len() * TABLE_BITS
    }
}

/// Everything the garbler produces for one circuit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GarbledCircuit {
    pub delta: GlobalDelta,
    pub input_labels: BTreeMap<WireId, LabelPair>,
    /// Publicly known 0-label of the constant-zero wire.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant_zero: Option<(WireId, WireLabel)>,
    pub and_tables: AndTables,
    pub output_decode: BTreeMap<WireId, LabelPair>,
}

/// Garbles `c` with randomness drawn from `seed`.
///
/// Draw order: delta, then one 0-label per primary input (and the constant
/// wire) in ascending wire-id order. The result depends only on the circuit
/// and the seed.
pub fn garble_circuit(c: &Circuit, seed: u64) -> GarbledCircuit {
    garble_circuit_traced(c, seed).0
}

/// Like [`garble_circuit`], also returning the 0-label of every wire slot.
pub fn garble_circuit_traced(c: &Circuit, seed: u64) -> (GarbledCircuit, Vec<WireLabel>) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let delta = GlobalDelta::random(&mut rng);

    let mut fresh: Vec<(WireId, usize)> = c.inputs().iter().copied().enumerate().map(|(s, w)| (w, s)).collect();
    if let (Some(z), Some(slot)) = (c.constant_zero(), c.constant_zero_slot()) {
        fresh.push((z, slot));
    }
    fresh.sort_unstable();

    let mut zero_labels = vec![WireLabel::ZERO; c.slot_count()];
    for &(_, slot) in &fresh {
        zero_labels[slot] = WireLabel::random(&mut rng);
    }

    let base = c.first_gate_slot();
    let mut tables = Vec::with_capacity(c.and_count());
    for (i, g) in c.gates().iter().enumerate() {
        let [a, b] = c.operand_slots(i);
        zero_labels[base + i] = match g.kind {
            GateKind::Xor => garble_xor(zero_labels[a], zero_labels[b]),
            GateKind::And => {
                let (k0, table) = garble_and(g.id, zero_labels[a], zero_labels[b], delta);
                tables.push((g.id, table));
                k0
            }
        };
    }

    let input_labels = c
        .inputs()
        .iter()
        .enumerate()
        .map(|(s, w)| (*w, LabelPair::new(zero_labels[s], delta)))
        .collect();
    let output_decode = c
        .outputs()
        .iter()
        .zip(c.output_slots())
        .map(|(w, s)| (*w, LabelPair::new(zero_labels[s], delta)))
        .collect();
    let constant_zero = c.constant_zero().zip(c.constant_zero_slot()).map(|(w, s)| (w, zero_labels[s]));

    let gc = GarbledCircuit {
        delta,
        input_labels,
        constant_zero,
        and_tables: AndTables::new(tables),
        output_decode,
    };
    (gc, zero_labels)
}

fn check_coverage<V>(expected: impl Iterator<Item = WireId>, given: &BTreeMap<WireId, V>) -> Result<(), GcError> {
    let expected: std::collections::BTreeSet<WireId> = expected.collect();
    let missing: Vec<u32> = expected.iter().filter(|w| !given.contains_key(w)).map(|w| w.0).collect();
    let extra: Vec<u32> = given.keys().filter(|w| !expected.contains(w)).map(|w| w.0).collect();
    if missing.is_empty() && extra.is_empty() {
        Ok(())
    } else {
        Err(GcError::InputMismatch { missing, extra })
    }
}

/// Selects the active label of every primary input, plus the constant wire's 0-label.
///
/// Stands in for oblivious transfer: labels are handed over directly.
pub fn encode_inputs(gc: &GarbledCircuit, assignment: &Assignment) -> Result<ActiveLabels, GcError> {
    check_coverage(gc.input_labels.keys().copied(), assignment)?;
    let mut active: ActiveLabels = assignment.iter().map(|(w, &bit)| (*w, gc.input_labels[w].select(bit))).collect();
    if let Some((w, label)) = gc.constant_zero {
        active.insert(w, label);
    }
    Ok(active)
}

/// Evaluates the garbled circuit gate by gate in file order.
///
/// Only the AND tables and the active input labels are consulted.
pub fn evaluate_circuit(c: &Circuit, tables: &AndTables, active_inputs: &ActiveLabels) -> Result<ActiveLabels, GcError> {
    check_coverage(c.inputs().iter().copied().chain(c.constant_zero()), active_inputs)?;
    let mut labels = vec![WireLabel::ZERO; c.slot_count()];
    for (s, w) in c.inputs().iter().enumerate() {
        labels[s] = active_inputs[w];
    }
    if let (Some(z), Some(slot)) = (c.constant_zero(), c.constant_zero_slot()) {
        labels[slot] = active_inputs[&z];
    }

    let base = c.first_gate_slot();
    let mut cursor = tables.iter().peekable();
    for (i, g) in c.gates().iter().enumerate() {
        let [a, b] = c.operand_slots(i);
        labels[base + i] = match g.kind {
            GateKind::Xor => labels[a] ^ labels[b],
            GateKind::And => {
                while cursor.peek().is_some_and(|(id, _)| *id < g.id) {
                    cursor.next();
                }
                match cursor.next() {
                    Some((id, table)) if *id == g.id => evaluate_and(g.id, labels[a], labels[b], table),
                    _ => return Err(GcError::MissingTable { gate: g.id.0 }),
                }
            }
        };
    }

    Ok(c.outputs().iter().zip(c.output_slots()).map(|(w, s)| (*w, labels[s])).collect())
}

/// Maps active output labels back to bits.
pub fn decode_outputs(gc: &GarbledCircuit, active_outputs: &ActiveLabels) -> Result<Assignment, GcError> {
    gc.output_decode
        .iter()
        .map(|(w, pair)| {
            let label = active_outputs.get(w).ok_or(GcError::Decode { wire: w.0 })?;
            if *label == pair.zero {
                Ok((*w, false))
            } else if *label == pair.one {
                Ok((*w, true))
            } else {
                Err(GcError::Decode { wire: w.0 })
            }
        })
        .collect()
}

/// Plain Boolean evaluation, the reference for the garbled round trip.
pub fn cleartext_evaluate(c: &Circuit, assignment: &Assignment) -> Result<Assignment, GcError> {
    check_coverage(c.inputs().iter().copied(), assignment)?;
    let mut values = vec![false; c.slot_count()];
    for (s, w) in c.inputs().iter().enumerate() {
        values[s] = assignment[w];
    }
    let base = c.first_gate_slot();
    for (i, g) in c.gates().iter().enumerate() {
        let [a, b] = c.operand_slots(i);
        values[base + i] = g.kind.apply(values[a], values[b]);
    }
    Ok(c.outputs().iter().zip(c.output_slots()).map(|(w, s)| (*w, values[s])).collect())
}

/// Garble, encode, evaluate and decode in one call.
pub fn garbled_round_trip(c: &Circuit, gc: &GarbledCircuit, assignment: &Assignment) -> Result<Assignment, GcError> {
    let active = encode_inputs(gc, assignment)?;
    let outputs = evaluate_circuit(c, &gc.and_tables, &active)?;
    decode_outputs(gc, &outputs)
}
