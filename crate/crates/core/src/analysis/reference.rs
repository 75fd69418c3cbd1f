use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{gate_stats, round_to, wire_percent, GateStats, WirePercent};
use crate::genlib::ProblemSpec;
use crate::netlist::Circuit;
use crate::scheduler::{extract_layers, wire_stats, WireStats};

/// Published benchmark figures with per-field provenance.
pub const REFERENCE_JSON: &str = include_str!("../../data/reference.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Must be reproduced.
    Exact,
    /// Depends on synthesis choices that are not published; shown for comparison.
    Informational,
    /// The published value disagrees with its own formula.
    KnownTypo,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::Exact => "exact",
            Provenance::Informational => "info",
            Provenance::KnownTypo => "typo",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefGate {
    pub layers: u64,
    pub inputs: u64,
    pub outputs: u64,
    pub ands: u64,
    pub xors: u64,
    pub gates: u64,
    pub reprogram: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefWire {
    pub wires: u64,
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
    pub wires_per_layer: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefPercent {
    pub percent_a: f64,
    pub percent_b: f64,
    pub percent_c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub name: String,
    pub spec: ProblemSpec,
    pub gate: RefGate,
    pub wire: RefWire,
    pub percent: RefPercent,
    /// Measured end-to-end garbling time.
    pub time_us: u64,
    /// Fields not listed are informational.
    #[serde(default)]
    pub provenance: BTreeMap<String, Provenance>,
    #[serde(default)]
    pub typo: BTreeMap<String, String>,
    #[serde(default)]
    pub note: Option<String>,
}

impl ReferenceRow {
    pub fn provenance(&self, field: &str) -> Provenance {
        self.provenance.get(field).copied().unwrap_or(Provenance::Informational)
    }
}

#[derive(Deserialize)]
struct ReferenceFile {
    version: u32,
    rows: Vec<ReferenceRow>,
}

pub fn reference_rows() -> Vec<ReferenceRow> {
    let file: ReferenceFile = serde_json::from_str(REFERENCE_JSON).expect("bundled reference data parses");
    assert_eq!(file.version, 1, "unexpected reference data version");
    file.rows
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComputedRow {
    pub gate: GateStats,
    pub wire: WireStats,
    pub percent: WirePercent<f64>,
}

impl ComputedRow {
    pub fn of(c: &Circuit) -> Self {
        let l = extract_layers(c);
        let wire = wire_stats(c, &l);
        ComputedRow {
            gate: gate_stats(c, &l),
            wire,
            percent: wire_percent(&wire).unwrap_or(WirePercent {
                one_to_one: 0.0,
                adjacent_of_one_to_one: 0.0,
                adjacent_of_all: 0.0,
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub field: &'static str,
    pub reference: f64,
    pub computed: f64,
    /// Decimals the reference is printed with; the computed value is
    /// compared after rounding to the same precision.
    pub decimals: i32,
    pub provenance: Provenance,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparedRow {
    pub name: String,
    pub spec: ProblemSpec,
    pub comparisons: Vec<Comparison>,
    pub note: Option<String>,
}

impl ComparedRow {
    pub fn get(&self, field: &str) -> Option<&Comparison> {
        self.comparisons.iter().find(|c| c.field == field)
    }

    /// Exact fields that do not match.
    pub fn exact_mismatches(&self) -> impl Iterator<Item = &Comparison> {
        self.comparisons.iter().filter(|c| c.provenance == Provenance::Exact && !c.matches)
    }
}

pub fn compare_row(row: &ReferenceRow, computed: &ComputedRow) -> ComparedRow {
    let g = &computed.gate;
    let w = &computed.wire;
    let p = &computed.percent;
    let fields: [(&'static str, f64, f64, i32); 16] = [
        ("layers", row.gate.layers as f64, f64::from(g.layers), 0),
        ("inputs", row.gate.inputs as f64, g.inputs as f64, 0),
        ("outputs", row.gate.outputs as f64, g.outputs as f64, 0),
        ("ands", row.gate.ands as f64, g.ands as f64, 0),
        ("xors", row.gate.xors as f64, g.xors as f64, 0),
        ("gates", row.gate.gates as f64, g.gates as f64, 0),
        ("reprogram", row.gate.reprogram as f64, g.reprogram10 as f64, 0),
        ("wires", row.wire.wires as f64, w.total_wires as f64, 0),
        ("a", row.wire.a as f64, w.one_to_one as f64, 0),
        ("b", row.wire.b as f64, w.adjacent_gates as f64, 0),
        ("c", row.wire.c as f64, w.distant_gates as f64, 0),
        ("d", row.wire.d as f64, w.max_per_layer as f64, 0),
        ("wires_per_layer", row.wire.wires_per_layer, w.wires_per_layer().unwrap_or(0.0), 1),
        ("percent_a", row.percent.percent_a, p.one_to_one, 2),
        ("percent_b", row.percent.percent_b, p.adjacent_of_one_to_one, 1),
        ("percent_c", row.percent.percent_c, p.adjacent_of_all, 1),
    ];
    let comparisons = fields
        .into_iter()
        .map(|(field, reference, computed, decimals)| Comparison {
            field,
            reference,
            computed,
            decimals,
            provenance: row.provenance(field),
            matches: (round_to(computed, decimals) - reference).abs() <= 0.01,
        })
        .collect();
    ComparedRow { name: row.name.clone(), spec: row.spec, comparisons, note: row.note.clone() }
}

fn fmt_value(v: f64, decimals: i32) -> String {
    format!("{v:.*}", decimals.max(0) as usize)
}

/// One line per field: reference, computed, provenance and a match flag.
pub fn comparison_table(rows: &[ComparedRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<22} {:<16} {:>12} {:>12}  {:<5} {}", "problem", "field", "reference", "computed", "prov", "match");
    for r in rows {
        for c in &r.comparisons {
            let computed = if c.decimals == 0 { fmt_value(c.computed, 0) } else { format!("{:.3}", c.computed) };
            let flag = match (c.matches, c.provenance) {
                (true, _) => "yes",
                (false, Provenance::Exact) => "NO",
                (false, _) => "no",
            };
            let _ = writeln!(
                out,
                "{:<22} {:<16} {:>12} {:>12}  {:<5} {flag}",
                r.name,
                c.field,
                fmt_value(c.reference, c.decimals),
                computed,
                c.provenance.name()
            );
        }
    }
    out
}

pub fn comparison_csv(rows: &[ComparedRow]) -> String {
    let mut out = String::from("problem,field,reference,computed,provenance,match\n");
    for r in rows {
        for c in &r.comparisons {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.name,
                c.field,
                fmt_value(c.reference, c.decimals),
                c.computed,
                c.provenance.name(),
                c.matches
            );
        }
    }
    out
}
