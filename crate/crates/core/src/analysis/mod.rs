//! Circuit statistics tables, wire percentages, garbling bandwidth, and a
//! side-by-side comparison with published reference figures.

mod reference;

pub use reference::{
    compare_row, comparison_csv, comparison_table, reference_rows, ComparedRow, Comparison, ComputedRow, Provenance, ReferenceRow, REFERENCE_JSON,
};

use serde::Serialize;
use thiserror::Error;

use crate::gc::TABLE_BITS;
use crate::netlist::Circuit;
use crate::scheduler::{reprogram_count, Layering, WireStats};
use crate::Scalar;

/// Configurations of ten AND cells, the unit of the reprogram column.
pub const REPROGRAM_AND_CELLS: usize = 10;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("ratio undefined: {0}")]
    UndefinedRatio(&'static str),
    #[error("garbling time must be positive")]
    NonPositiveTime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GateStats {
    pub layers: u32,
    pub inputs: usize,
    pub outputs: usize,
    pub ands: usize,
    pub xors: usize,
    pub gates: usize,
    pub reprogram10: usize,
}

pub fn gate_stats(c: &Circuit, layering: &Layering) -> GateStats {
    GateStats {
        layers: layering.depth(),
        inputs: c.inputs().len(),
        outputs: c.outputs().len(),
        ands: c.and_count(),
        xors: c.xor_count(),
        gates: c.gates().len(),
        reprogram10: reprogram_count(c, REPROGRAM_AND_CELLS),
    }
}

/// Percentages of fanout-1 wires.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct WirePercent<T> {
    /// Fanout-1 wires among all wires.
    pub one_to_one: T,
    /// Next-layer fanout-1 wires among fanout-1 wires.
    pub adjacent_of_one_to_one: T,
    /// Next-layer fanout-1 wires among all wires.
    pub adjacent_of_all: T,
}

pub fn wire_percent<T: Scalar>(stats: &WireStats) -> Result<WirePercent<T>, AnalysisError> {
    if stats.total_wires == 0 {
        return Err(AnalysisError::UndefinedRatio("circuit has no wires"));
    }
    let pct = |num: usize, den: usize| T::from_count(100 * num as u64) / T::from_count(den as u64);
    let adjacent_of_one_to_one = if stats.one_to_one == 0 {
        T::zero()
    } else {
        pct(stats.adjacent_wires, stats.one_to_one)
    };
    Ok(WirePercent {
        one_to_one: pct(stats.one_to_one, stats.total_wires),
        adjacent_of_one_to_one,
        adjacent_of_all: pct(stats.adjacent_wires, stats.total_wires),
    })
}

/// Garbler output rate implied by a measured run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct BandwidthEstimate<T> {
    pub gates_per_second: T,
    pub bits_per_second: T,
    pub bits_per_and: u32,
}

impl<T: Scalar> BandwidthEstimate<T> {
    pub fn megabits_per_second(&self) -> T {
        self.bits_per_second / T::from_count(1_000_000)
    }
}

pub fn bandwidth<T: Scalar>(n_ands: u64, garble_time_s: T) -> Result<BandwidthEstimate<T>, AnalysisError> {
    if !(garble_time_s > T::zero()) {
        return Err(AnalysisError::NonPositiveTime);
    }
    let gates_per_second = T::from_count(n_ands) / garble_time_s;
    Ok(BandwidthEstimate {
        gates_per_second,
        bits_per_second: gates_per_second * T::from_count(TABLE_BITS as u64),
        bits_per_and: TABLE_BITS as u32,
    })
}

/// Rounds half away from zero to `digits` decimals, as printed tables do.
pub fn round_to(x: f64, digits: i32) -> f64 {
    let scale = 10f64.powi(digits);
    (x * scale).round() / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genlib::{gen_adder, gen_multiplier};
    use crate::netlist::parse;
    use crate::scheduler::{extract_layers, wire_stats};
    use crate::ExactTime;

    #[test]
    fn adder6_gate_stats() {
        let c = gen_adder(6);
        let s = gate_stats(&c, &extract_layers(&c));
        assert_eq!(s, GateStats { layers: 17, inputs: 12, outputs: 6, ands: 6, xors: 24, gates: 30, reprogram10: 1 });
        let m = gen_multiplier(16);
        let s = gate_stats(&m, &extract_layers(&m));
        assert_eq!((s.ands, s.reprogram10), (496, 50));
    }

    #[test]
    fn empty_circuit_stats() {
        let c = parse("IN 0 1 2").unwrap();
        let s = gate_stats(&c, &extract_layers(&c));
        assert_eq!(s, GateStats { layers: 0, inputs: 3, outputs: 0, ands: 0, xors: 0, gates: 0, reprogram10: 0 });
    }

    #[test]
    fn adder6_percentages() {
        let c = gen_adder(6);
        let w = wire_stats(&c, &extract_layers(&c));
        let p = wire_percent::<f64>(&w).unwrap();
        assert_eq!(round_to(p.one_to_one, 2), 28.57);
        assert_eq!(p.adjacent_of_one_to_one, 100.0);
        assert_eq!(round_to(p.adjacent_of_all, 1), 28.6);
        let exact = wire_percent::<ExactTime>(&w).unwrap();
        assert_eq!(exact.one_to_one, ExactTime::new(200, 7));
    }

    #[test]
    fn percent_needs_wires() {
        let c = parse("").unwrap();
        let w = wire_stats(&c, &extract_layers(&c));
        assert!(wire_percent::<f64>(&w).is_err());
    }

    #[test]
    fn bandwidth_cases() {
        let b = bandwidth(7526, 11286e-6f64).unwrap();
        assert!((b.gates_per_second - 666_843.9).abs() < 0.1);
        assert!((b.megabits_per_second() - 160.04).abs() < 0.01);
        let b = bandwidth(254_400, 340_698e-6f64).unwrap();
        assert!((b.gates_per_second - 746_702.4).abs() < 0.1);
        assert!((b.megabits_per_second() - 179.21).abs() < 0.01);
        assert_eq!(bandwidth(0, 1.0f64).unwrap().gates_per_second, 0.0);
        assert_eq!(bandwidth(10, 0.0f64), Err(AnalysisError::NonPositiveTime));
        assert_eq!(bandwidth(10, -1.0f64), Err(AnalysisError::NonPositiveTime));
        let exact = bandwidth(240, ExactTime::new(1, 1000)).unwrap();
        assert_eq!(exact.bits_per_second, ExactTime::from_integer(240_000 * 240));
    }
}
