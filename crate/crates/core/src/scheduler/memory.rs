use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::layers::{Layering, WireUsage};
use super::SchedError;
use crate::netlist::Circuit;

/// Label slots in 6.75 Mbit of block RAM.
pub const DEFAULT_MFU_CAPACITY: usize = 6_750 * 1024 / 80;
/// Label slots in 13 Mbit of block RAM, split into two ping-pong halves.
pub const DEFAULT_DIRECT_CAPACITY: usize = 13 * 1024 * 1000 / 80;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    AllDdr,
    DirectlyUsed,
    MostFrequentlyUsed,
}

impl Policy {
    pub const ALL: [Policy; 3] = [Policy::AllDdr, Policy::DirectlyUsed, Policy::MostFrequentlyUsed];

    pub fn name(self) -> &'static str {
        match self {
            Policy::AllDdr => "all-ddr",
            Policy::DirectlyUsed => "directly-used",
            Policy::MostFrequentlyUsed => "most-frequently-used",
        }
    }

    pub fn default_capacity(self) -> usize {
        match self {
            Policy::AllDdr => 0,
            Policy::DirectlyUsed => DEFAULT_DIRECT_CAPACITY,
            Policy::MostFrequentlyUsed => DEFAULT_MFU_CAPACITY,
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = SchedError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "all-ddr" | "ddr" => Ok(Policy::AllDdr),
            "directly-used" | "direct" => Ok(Policy::DirectlyUsed),
            "most-frequently-used" | "mfu" => Ok(Policy::MostFrequentlyUsed),
            other => Err(SchedError::Config(format!("unknown memory policy '{other}'"))),
        }
    }
}

/// Where a wire's label lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "mem", content = "addr", rename_all = "lowercase")]
pub enum Placement {
    Bram(u32),
    Ddr(u32),
}

impl Placement {
    pub fn is_bram(self) -> bool {
        matches!(self, Placement::Bram(_))
    }

    pub fn address(self) -> u32 {
        match self {
            Placement::Bram(a) | Placement::Ddr(a) => a,
        }
    }
}

/// Per-slot placements. DDR addresses are wire ids; BRAM addresses are
/// label slots below `bram_capacity_labels`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MemoryMap {
    pub policy: Policy,
    pub bram_capacity_labels: usize,
    placement: Vec<Placement>,
}

impl MemoryMap {
    pub fn all_ddr(c: &Circuit) -> Self {
        MemoryMap {
            policy: Policy::AllDdr,
            bram_capacity_labels: 0,
            placement: (0..c.slot_count()).map(|s| Placement::Ddr(c.slot_wire(s).0)).collect(),
        }
    }

    pub fn placement(&self, slot: usize) -> Placement {
        self.placement[slot]
    }

    pub fn placements(&self) -> &[Placement] {
        &self.placement
    }

    pub fn len(&self) -> usize {
        self.placement.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placement.is_empty()
    }

    pub fn bram_wires(&self) -> usize {
        self.placement.iter().filter(|p| p.is_bram()).count()
    }

    pub fn to_json(&self, c: &Circuit) -> String {
        #[derive(Serialize)]
        struct Entry {
            wire: u32,
            #[serde(flatten)]
            at: Placement,
        }
        #[derive(Serialize)]
        struct Doc {
            policy: Policy,
            bram_capacity_labels: usize,
            bram_wires: usize,
            placement: Vec<Entry>,
        }
        let doc = Doc {
            policy: self.policy,
            bram_capacity_labels: self.bram_capacity_labels,
            bram_wires: self.bram_wires(),
            placement: self
                .placement
                .iter()
                .enumerate()
                .map(|(s, &at)| Entry { wire: c.slot_wire(s).0, at })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("memory map serializes to JSON")
    }
}

pub fn allocate(policy: Policy, c: &Circuit, layering: &Layering, bram_capacity_labels: usize) -> MemoryMap {
    match policy {
        Policy::AllDdr => MemoryMap::all_ddr(c),
        Policy::DirectlyUsed => allocate_directly_used(c, layering, bram_capacity_labels),
        Policy::MostFrequentlyUsed => allocate_mfu(c, bram_capacity_labels),
    }
}

/// Whether `slot` qualifies for ping-pong BRAM: a gate output, not a declared
/// output, read exactly once by a gate in the next layer.
pub fn directly_used_eligible(c: &Circuit, layering: &Layering, usage: &WireUsage, slot: usize) -> bool {
    c.producer(slot).is_some()
        && !usage.is_output[slot]
        && usage.sole_reader[slot].is_some_and(|r| layering.gate_layer(r as usize) == layering.slot_layer(slot) + 1)
}

/// Eligible wires of layer `L` go to the half `L % 2` of the BRAM, in
/// netlist order from the start of the half; the count restarts every
/// layer. Wires beyond the half's capacity fall back to DDR.
pub fn allocate_directly_used(c: &Circuit, layering: &Layering, bram_capacity_labels: usize) -> MemoryMap {
    let usage = WireUsage::new(c);
    let half = bram_capacity_labels / 2;
    let mut map = MemoryMap::all_ddr(c);
    map.policy = Policy::DirectlyUsed;
    map.bram_capacity_labels = bram_capacity_labels;
    if half == 0 {
        return map;
    }
    let first = c.first_gate_slot();
    for (layer, gates) in layering.layers() {
        let base = (layer as usize % 2) * half;
        let mut used = 0;
        for &g in gates {
            let slot = first + g as usize;
            if used < half && directly_used_eligible(c, layering, &usage, slot) {
                map.placement[slot] = Placement::Bram((base + used) as u32);
                used += 1;
            }
        }
    }
    map
}

/// Access count (reads + the one write) per slot.
pub fn access_counts(c: &Circuit) -> Vec<u32> {
    WireUsage::new(c).fanout.iter().map(|f| f + 1).collect()
}

/// Highest access counts first, ties by ascending wire id, until the BRAM is
/// full. Slots are never reused.
pub fn allocate_mfu(c: &Circuit, bram_capacity_labels: usize) -> MemoryMap {
    let counts = access_counts(c);
    let mut order: Vec<usize> = (0..c.slot_count()).collect();
    order.sort_by_key(|&s| (std::cmp::Reverse(counts[s]), c.slot_wire(s)));
    let mut map = MemoryMap::all_ddr(c);
    map.policy = Policy::MostFrequentlyUsed;
    map.bram_capacity_labels = bram_capacity_labels;
    for (k, &s) in order.iter().take(bram_capacity_labels).enumerate() {
        map.placement[s] = Placement::Bram(k as u32);
    }
    map
}
