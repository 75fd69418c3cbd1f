use serde::Serialize;

use crate::netlist::{Circuit, GateKind};

/// As-soon-as-possible levelization.
///
/// Inputs and the constant-zero wire sit at layer 0; a gate sits one layer
/// above its latest operand. `depth` only counts gates that reach a declared
/// output, `full_depth` counts every gate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Layering {
    gate_layer: Vec<u32>,
    live: Vec<bool>,
    depth: u32,
    full_depth: u32,
    #[serde(skip)]
    by_layer: Vec<Vec<u32>>,
    #[serde(skip)]
    first_gate_slot: usize,
}

impl Layering {
    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn full_depth(&self) -> u32 {
        self.full_depth
    }

    /// Layer of gate `index` (1-based).
    pub fn gate_layer(&self, index: usize) -> u32 {
        self.gate_layer[index]
    }

    /// Layer of the value held in `slot`.
    pub fn slot_layer(&self, slot: usize) -> u32 {
        slot.checked_sub(self.first_gate_slot).map_or(0, |g| self.gate_layer[g])
    }

    /// Whether gate `index` lies on a path to a declared output.
    pub fn is_live(&self, index: usize) -> bool {
        self.live[index]
    }

    /// Gate indices of `layer` (1-based) in netlist order.
    pub fn gates_in(&self, layer: u32) -> &[u32] {
        layer
            .checked_sub(1)
            .and_then(|l| self.by_layer.get(l as usize))
            .map_or(&[], Vec::as_slice)
    }

    /// Gate indices grouped by layer, layer 1 first.
    pub fn layers(&self) -> impl ExactSizeIterator<Item = (u32, &[u32])> {
        self.by_layer.iter().enumerate().map(|(l, g)| (l as u32 + 1, g.as_slice()))
    }
}

pub fn extract_layers(c: &Circuit) -> Layering {
    let first = c.first_gate_slot();
    let n = c.gates().len();
    let mut slot_layer = vec![0u32; c.slot_count()];
    let mut gate_layer = Vec::with_capacity(n);
    for g in 0..n {
        let [a, b] = c.operand_slots(g);
        let l = slot_layer[a].max(slot_layer[b]) + 1;
        slot_layer[first + g] = l;
        gate_layer.push(l);
    }

    let mut live = vec![false; n];
    for s in c.output_slots() {
        if let Some(g) = c.producer(s) {
            live[g] = true;
        }
    }
    for g in (0..n).rev() {
        if live[g] {
            for s in c.operand_slots(g) {
                if let Some(p) = c.producer(s) {
                    live[p] = true;
                }
            }
        }
    }

    let full_depth = gate_layer.iter().copied().max().unwrap_or(0);
    let depth = (0..n).filter(|&g| live[g]).map(|g| gate_layer[g]).max().unwrap_or(0);
    let mut by_layer = vec![Vec::new(); full_depth as usize];
    for (g, &l) in gate_layer.iter().enumerate() {
        by_layer[l as usize - 1].push(g as u32);
    }
    Layering { gate_layer, live, depth, full_depth, by_layer, first_gate_slot: first }
}

/// Read counts and sole readers per slot.
#[derive(Clone, Debug)]
pub struct WireUsage {
    /// Operand reads of each slot (a gate reading a wire twice counts twice).
    pub fanout: Vec<u32>,
    /// Reading gate for slots with fanout exactly 1.
    pub sole_reader: Vec<Option<u32>>,
    pub is_output: Vec<bool>,
}

impl WireUsage {
    pub fn new(c: &Circuit) -> Self {
        let slots = c.slot_count();
        let mut fanout = vec![0u32; slots];
        let mut sole_reader = vec![None; slots];
        for g in 0..c.gates().len() {
            for s in c.operand_slots(g) {
                fanout[s] += 1;
                sole_reader[s] = Some(g as u32);
            }
        }
        for (s, r) in sole_reader.iter_mut().enumerate() {
            if fanout[s] != 1 {
                *r = None;
            }
        }
        let mut is_output = vec![false; slots];
        for s in c.output_slots() {
            is_output[s] = true;
        }
        WireUsage { fanout, sole_reader, is_output }
    }
}

/// Fanout-1 wire counts per circuit.
///
/// Only gate outputs are counted as candidate wires; primary inputs live in
/// host-written memory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WireStats {
    /// Inputs plus gate outputs.
    pub total_wires: usize,
    /// Gate outputs read exactly once.
    pub one_to_one: usize,
    /// Gates reading at least one such wire from the previous layer.
    pub adjacent_gates: usize,
    /// Gates reading at least one such wire from an earlier, non-adjacent layer.
    pub distant_gates: usize,
    /// Largest number of such wires produced in one layer.
    pub max_per_layer: usize,
    /// Such wires whose reader is in the next layer.
    pub adjacent_wires: usize,
    pub depth: u32,
}

impl WireStats {
    pub fn wires_per_layer(&self) -> Option<f64> {
        (self.depth > 0).then(|| self.total_wires as f64 / f64::from(self.depth))
    }
}

pub fn wire_stats(c: &Circuit, layering: &Layering) -> WireStats {
    let usage = WireUsage::new(c);
    let first = c.first_gate_slot();
    let mut per_layer = vec![0usize; layering.full_depth() as usize + 1];
    let mut adjacent_wires = 0;
    let mut adjacent = vec![false; c.gates().len()];
    let mut distant = vec![false; c.gates().len()];
    for s in first..c.slot_count() {
        let Some(reader) = usage.sole_reader[s] else { continue };
        let from = layering.slot_layer(s);
        per_layer[from as usize] += 1;
        if layering.gate_layer(reader as usize) == from + 1 {
            adjacent_wires += 1;
            adjacent[reader as usize] = true;
        } else {
            distant[reader as usize] = true;
        }
    }
    WireStats {
        total_wires: c.wire_count(),
        one_to_one: per_layer.iter().sum(),
        adjacent_gates: adjacent.iter().filter(|&&b| b).count(),
        distant_gates: distant.iter().filter(|&&b| b).count(),
        max_per_layer: per_layer.iter().copied().max().unwrap_or(0),
        adjacent_wires,
        depth: layering.depth(),
    }
}

/// One overlay cell assignment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CellSlot {
    /// Gate index in netlist order.
    pub gate: u32,
    pub cell: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LayerPlan {
    pub layer: u32,
    /// XOR gates in send order, cells assigned round-robin.
    pub xor_stream: Vec<CellSlot>,
    /// AND gates in groups of at most `n_and`, cell = position in the group.
    pub and_batches: Vec<Vec<CellSlot>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Schedule {
    pub n_and: usize,
    pub n_xor: usize,
    pub layers: Vec<LayerPlan>,
}

impl Schedule {
    pub fn and_batch_count(&self) -> usize {
        self.layers.iter().map(|l| l.and_batches.len()).sum()
    }

    pub fn gate_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.xor_stream.len() + l.and_batches.iter().map(Vec::len).sum::<usize>())
            .sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serializes to JSON")
    }
}

pub fn make_schedule(c: &Circuit, layering: &Layering, n_and: usize, n_xor: usize) -> Schedule {
    assert!(n_and >= 1 && n_xor >= 1, "cell counts must be positive");
    let layers = layering
        .layers()
        .map(|(layer, gates)| {
            let (ands, xors): (Vec<u32>, Vec<u32>) =
                gates.iter().partition(|&&g| c.gates()[g as usize].kind == GateKind::And);
            let xor_stream = xors
                .iter()
                .enumerate()
                .map(|(i, &gate)| CellSlot { gate, cell: (i % n_xor) as u32 })
                .collect();
            let and_batches = ands
                .chunks(n_and)
                .map(|chunk| {
                    chunk
                        .iter()
                        .enumerate()
                        .map(|(i, &gate)| CellSlot { gate, cell: i as u32 })
                        .collect()
                })
                .collect();
            LayerPlan { layer, xor_stream, and_batches }
        })
        .collect();
    Schedule { n_and, n_xor, layers }
}

/// `ceil(#AND / n_and)`.
pub fn reprogram_count(c: &Circuit, n_and: usize) -> usize {
    assert!(n_and >= 1, "n_and must be positive");
    c.and_count().div_ceil(n_and)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genlib::{gen_adder, gen_multiplier};
    use crate::netlist::parse;

    #[test]
    fn single_gate() {
        let c = parse("IN 0 1\n0 AND 1 = 2\nOUT 2").unwrap();
        let l = extract_layers(&c);
        assert_eq!((l.depth(), l.full_depth()), (1, 1));
        assert_eq!(wire_stats(&c, &l).one_to_one, 0);

        let c = parse("IN 0 1\n0 AND 1 = 2\n2 XOR 0 = 3\nOUT 3").unwrap();
        let s = wire_stats(&c, &extract_layers(&c));
        assert_eq!((s.one_to_one, s.adjacent_gates), (1, 1));
    }

    #[test]
    fn xor_chain_depth() {
        for k in 1..20u32 {
            let mut text = String::from("IN 0 1\n");
            let mut prev = 0;
            for i in 0..k {
                text.push_str(&format!("{prev} XOR 1 = {}\n", i + 2));
                prev = i + 2;
            }
            text.push_str(&format!("OUT {prev}\n"));
            let l = extract_layers(&parse(&text).unwrap());
            assert_eq!(l.depth(), k);
        }
    }

    #[test]
    fn adder6_layers_and_wires() {
        let c = gen_adder(6);
        let l = extract_layers(&c);
        assert_eq!((l.depth(), l.full_depth()), (17, 18));
        let s = wire_stats(&c, &l);
        assert_eq!(
            (s.total_wires, s.one_to_one, s.adjacent_gates, s.distant_gates, s.max_per_layer, s.adjacent_wires),
            (42, 12, 12, 0, 1, 12)
        );
    }

    #[test]
    fn levelization_is_sound() {
        let c = gen_multiplier(6);
        let l = extract_layers(&c);
        for g in 0..c.gates().len() {
            for s in c.operand_slots(g) {
                assert!(l.slot_layer(s) < l.gate_layer(g));
            }
        }
    }

    #[test]
    fn schedule_batches() {
        let mut text = String::from("IN 0 1\n");
        for i in 0..23 {
            text.push_str(&format!("0 AND 1 = {}\n", i + 2));
        }
        text.push_str("OUT 2\n");
        let c = parse(&text).unwrap();
        let s = make_schedule(&c, &extract_layers(&c), 10, 4);
        let sizes: Vec<usize> = s.layers[0].and_batches.iter().map(Vec::len).collect();
        assert_eq!(sizes, [10, 10, 3]);
        assert_eq!(s.layers[0].and_batches[2][2].cell, 2);
    }

    #[test]
    fn schedule_covers_each_gate_once() {
        let c = gen_multiplier(8);
        let l = extract_layers(&c);
        let s = make_schedule(&c, &l, 10, 10);
        let mut seen = vec![0; c.gates().len()];
        for plan in &s.layers {
            for slot in plan.xor_stream.iter().chain(plan.and_batches.iter().flatten()) {
                seen[slot.gate as usize] += 1;
                assert_eq!(l.gate_layer(slot.gate as usize), plan.layer);
            }
            assert!(plan.and_batches.iter().all(|b| b.len() <= 10));
        }
        assert!(seen.iter().all(|&n| n == 1));
        assert!(s.and_batch_count() >= 12);
    }

    #[test]
    fn reprogram() {
        assert_eq!(reprogram_count(&gen_multiplier(32), 10), 202);
        assert_eq!(reprogram_count(&gen_multiplier(64), 10), 813);
    }
}
