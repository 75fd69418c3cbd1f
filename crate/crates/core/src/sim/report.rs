use std::fmt::Write as _;

use serde::Serialize;

use super::SimOptions;
use crate::scheduler::Policy;
use crate::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct LayerReport<T> {
    pub layer: u32,
    pub gates: u64,
    pub ands: u64,
    /// First gate start.
    pub start_ns: T,
    /// Last result written.
    pub end_ns: T,
}

impl<T: Scalar> LayerReport<T> {
    pub(super) fn new(layer: u32, at: T) -> Self {
        LayerReport { layer, gates: 0, ands: 0, start_ns: at, end_ns: at }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct SimReport<T> {
    pub options: SimOptions,
    /// Completion of the last write.
    pub total_ns: T,
    /// Host link time summed over all gates.
    pub pcie_ns: T,
    /// Cell busy time summed over all gates.
    pub compute_ns: T,
    pub gates: u64,
    pub and_gates: u64,
    pub xor_gates: u64,
    /// Dispatch units sent by the host.
    pub units: u64,
    pub mem_read_bram: u64,
    pub mem_read_ddr: u64,
    pub mem_write_bram: u64,
    pub mem_write_ddr: u64,
    pub peak_live_bram_slots: u64,
    pub layers: Vec<LayerReport<T>>,
}

impl<T: Scalar> SimReport<T> {
    pub(super) fn empty(options: SimOptions) -> Self {
        SimReport {
            options,
            total_ns: T::zero(),
            pcie_ns: T::zero(),
            compute_ns: T::zero(),
            gates: 0,
            and_gates: 0,
            xor_gates: 0,
            units: 0,
            mem_read_bram: 0,
            mem_read_ddr: 0,
            mem_write_bram: 0,
            mem_write_ddr: 0,
            peak_live_bram_slots: 0,
            layers: Vec::new(),
        }
    }

    pub fn ddr_accesses(&self) -> u64 {
        self.mem_read_ddr + self.mem_write_ddr
    }

    pub fn bram_accesses(&self) -> u64 {
        self.mem_read_bram + self.mem_write_bram
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes to JSON")
    }

    /// Aligned two-column summary.
    pub fn to_table(&self) -> String {
        let o = &self.options;
        let rows: Vec<(&str, String)> = vec![
            ("policy", o.policy.to_string()),
            ("overlap", o.overlap.to_string()),
            ("xor_nosync", o.xor_nosync.to_string()),
            ("packed", o.packed.to_string()),
            ("gates", format!("{} ({} AND, {} XOR)", self.gates, self.and_gates, self.xor_gates)),
            ("units", self.units.to_string()),
            ("total_ns", fmt_ns(self.total_ns)),
            ("pcie_ns", fmt_ns(self.pcie_ns)),
            ("compute_ns", fmt_ns(self.compute_ns)),
            ("bram reads/writes", format!("{}/{}", self.mem_read_bram, self.mem_write_bram)),
            ("ddr reads/writes", format!("{}/{}", self.mem_read_ddr, self.mem_write_ddr)),
            ("peak live bram slots", self.peak_live_bram_slots.to_string()),
            ("layers", self.layers.len().to_string()),
        ];
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in rows {
            let _ = writeln!(out, "{k:<width$}  {v}");
        }
        out
    }
}

pub(crate) fn fmt_ns<T: Scalar>(t: T) -> String {
    let v = t.as_f64();
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct PolicyRow<T> {
    pub policy: Policy,
    pub report: SimReport<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct PolicyComparison<T> {
    pub rows: Vec<PolicyRow<T>>,
}

impl<T: Scalar> PolicyComparison<T> {
    pub fn get(&self, policy: Policy) -> Option<&SimReport<T>> {
        self.rows.iter().find(|r| r.policy == policy).map(|r| &r.report)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("policy,total_ns,ddr_reads,ddr_writes,bram_reads,bram_writes,ratio_to_all_ddr\n");
        let base = self.get(Policy::AllDdr).map(|r| r.total_ns.as_f64());
        for r in &self.rows {
            let ratio = base.map_or(String::new(), |b| format!("{:.4}", b / r.report.total_ns.as_f64()));
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{ratio}",
                r.policy,
                fmt_ns(r.report.total_ns),
                r.report.mem_read_ddr,
                r.report.mem_write_ddr,
                r.report.mem_read_bram,
                r.report.mem_write_bram
            );
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct SweepRow<T> {
    pub n_and: u32,
    pub n_xor: u32,
    pub total_ns: T,
    /// Previous row's total divided by this one.
    pub speedup_vs_previous: Option<f64>,
}

pub fn sweep_csv<T: Scalar>(rows: &[SweepRow<T>]) -> String {
    let mut out = String::from("n_and,n_xor,total_ns,speedup_vs_previous\n");
    for r in rows {
        let s = r.speedup_vs_previous.map_or(String::new(), |s| format!("{s:.4}"));
        let _ = writeln!(out, "{},{},{},{s}", r.n_and, r.n_xor, fmt_ns(r.total_ns));
    }
    out
}
