use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use gcoverlay::analysis::{
    bandwidth, compare_row, comparison_csv, comparison_table, reference_rows, ComparedRow, ComputedRow,
};
use gcoverlay::gc::{cleartext_evaluate, container, garble_circuit, garbled_round_trip, Assignment, GarbledCircuit};
use gcoverlay::netlist::{write, Circuit};
use gcoverlay::scheduler::trace::{build_trace, Trace};
use gcoverlay::scheduler::{allocate, extract_layers, make_schedule, reprogram_count, SchedError};
use gcoverlay::sim::{
    compare_policies, simulate_circuit, simulate_program, sweep_cells, sweep_csv, Program, SimOptions, SimReport,
    TimingParams,
};
use gcoverlay::Scalar;

use crate::config::{read_bytes, Format, Source};
use crate::CliError;

/// Assignments are enumerated exhaustively up to this many input bits.
pub const EXHAUSTIVE_BITS: usize = 20;

fn json<T: Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes to JSON");
    s.push('\n');
    s
}

pub fn gen(c: &Circuit) -> String {
    write(c)
}

#[derive(Debug, Serialize)]
pub struct VerifyOutcome {
    pub problem: String,
    pub mode: &'static str,
    pub input_bits: usize,
    pub passed: u64,
    pub total: u64,
    /// Lowest failing trial and why.
    pub first_failure: Option<(u64, String)>,
}

impl VerifyOutcome {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => json(self),
            Format::Csv => format!(
                "problem,mode,input_bits,passed,total\n{},{},{},{},{}\n",
                self.problem, self.mode, self.input_bits, self.passed, self.total
            ),
            Format::Table => {
                let mut s = format!(
                    "{}: {}/{} passed ({}, {} input bits)\n",
                    self.problem, self.passed, self.total, self.mode, self.input_bits
                );
                if let Some((k, why)) = &self.first_failure {
                    let _ = writeln!(s, "first failure at trial {k}: {why}");
                }
                s
            }
        }
    }
}

fn trial_assignment(c: &Circuit, seed: u64, trial: u64) -> Assignment {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial + 1);
    c.inputs().iter().map(|w| (*w, rng.gen::<bool>())).collect()
}

fn counting_assignment(c: &Circuit, value: u64) -> Assignment {
    c.inputs().iter().enumerate().map(|(k, w)| (*w, (value >> k) & 1 == 1)).collect()
}

fn check(c: &Circuit, gc: &GarbledCircuit, a: &Assignment) -> Result<(), String> {
    let expected = cleartext_evaluate(c, a).map_err(|e| e.to_string())?;
    let got = garbled_round_trip(c, gc, a).map_err(|e| e.to_string())?;
    if got == expected {
        Ok(())
    } else {
        Err("decoded outputs differ from cleartext evaluation".into())
    }
}

/// Garbled round trips against cleartext evaluation, in parallel. The result
/// does not depend on the number of threads.
pub fn verify(name: String, c: &Circuit, gc: &GarbledCircuit, seed: u64, trials: u64) -> VerifyOutcome {
    let bits = c.inputs().len();
    let exhaustive = bits <= EXHAUSTIVE_BITS;
    let total = if exhaustive { 1u64 << bits } else { trials };
    let (failed, first_failure) = (0..total)
        .into_par_iter()
        .map(|k| {
            let a = if exhaustive { counting_assignment(c, k) } else { trial_assignment(c, seed, k) };
            match check(c, gc, &a) {
                Ok(()) => (0u64, None),
                Err(why) => (1, Some((k, why))),
            }
        })
        .reduce(|| (0, None), |a, b| (a.0 + b.0, earliest(a.1, b.1)));
    VerifyOutcome {
        problem: name,
        mode: if exhaustive { "exhaustive" } else { "random" },
        input_bits: bits,
        passed: total - failed,
        total,
        first_failure,
    }
}

fn earliest(a: Option<(u64, String)>, b: Option<(u64, String)>) -> Option<(u64, String)> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if x.0 <= y.0 { x } else { y }),
        (x, y) => x.or(y),
    }
}

pub fn load_garbled(path: &Path) -> Result<GarbledCircuit, CliError> {
    let bytes = read_bytes(path)?;
    let parsed = if bytes.starts_with(container::MAGIC) {
        container::from_bytes(&bytes)
    } else {
        let text = String::from_utf8(bytes).map_err(|_| CliError::Usage(format!("{}: not a garbled circuit", path.display())))?;
        container::from_json(&text)
    };
    parsed.map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

#[derive(Debug, Serialize)]
struct GarbleSummary<'a> {
    problem: &'a str,
    seed: u64,
    and_tables: usize,
    ciphertext_bits: usize,
    container_bytes: usize,
    sha1: String,
}

pub enum Artifact {
    Text(String),
    Bytes(Vec<u8>),
}

/// The container itself when writing to a file or asked for JSON, otherwise a summary.
pub fn garble(name: &str, c: &Circuit, seed: u64, format: Format, to_file: bool) -> Artifact {
    let gc = garble_circuit(c, seed);
    if format == Format::Json {
        let mut s = container::to_json(&gc);
        s.push('\n');
        return Artifact::Text(s);
    }
    let bytes = container::to_bytes(&gc);
    if to_file {
        return Artifact::Bytes(bytes);
    }
    let summary = GarbleSummary {
        problem: name,
        seed,
        and_tables: gc.and_tables.len(),
        ciphertext_bits: gc.and_tables.ciphertext_bits(),
        container_bytes: bytes.len(),
        sha1: hex(&gcoverlay::gc::sha1::digest(&bytes)),
    };
    Artifact::Text(match format {
        Format::Csv => format!(
            "problem,seed,and_tables,ciphertext_bits,container_bytes,sha1\n{},{},{},{},{},{}\n",
            summary.problem, summary.seed, summary.and_tables, summary.ciphertext_bits, summary.container_bytes, summary.sha1
        ),
        _ => format!(
            "{}: {} AND tables, {} ciphertext bits, {} byte container (seed {}, sha1 {})\n",
            summary.problem, summary.and_tables, summary.ciphertext_bits, summary.container_bytes, summary.seed, summary.sha1
        ),
    })
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Serialize)]
struct StatsDoc<'a> {
    problem: &'a str,
    #[serde(flatten)]
    computed: &'a ComputedRow,
    wires_per_layer: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reference: Option<&'a ComparedRow>,
}

pub fn stats(name: &str, c: &Circuit, source: &Source, format: Format) -> String {
    let computed = ComputedRow::of(c);
    let rows = reference_rows();
    let compared = source
        .spec()
        .and_then(|spec| rows.iter().find(|r| r.spec == spec))
        .map(|row| compare_row(row, &computed));
    let (g, w, p) = (&computed.gate, &computed.wire, &computed.percent);
    let wpl = w.wires_per_layer();
    match format {
        Format::Json => json(&StatsDoc { problem: name, computed: &computed, wires_per_layer: wpl, reference: compared.as_ref() }),
        Format::Csv => {
            let mut s = String::from(
                "problem,layers,inputs,outputs,ands,xors,gates,reprogram,wires,a,b,c,d,wires_per_layer,percent_a,percent_b,percent_c\n",
            );
            let _ = writeln!(
                s,
                "{name},{},{},{},{},{},{},{},{},{},{},{},{},{:.4},{:.4},{:.4},{:.4}",
                g.layers,
                g.inputs,
                g.outputs,
                g.ands,
                g.xors,
                g.gates,
                g.reprogram10,
                w.total_wires,
                w.one_to_one,
                w.adjacent_gates,
                w.distant_gates,
                w.max_per_layer,
                wpl.unwrap_or(0.0),
                p.one_to_one,
                p.adjacent_of_one_to_one,
                p.adjacent_of_all
            );
            if let Some(cmp) = &compared {
                s.push('\n');
                s.push_str(&comparison_csv(std::slice::from_ref(cmp)));
            }
            s
        }
        Format::Table => {
            let mut s = String::new();
            let _ = writeln!(s, "gate information");
            let _ = writeln!(s, "{:<22} {:>7} {:>7} {:>7} {:>9} {:>9} {:>9} {:>9}", "problem", "layers", "inputs", "outputs", "and", "xor", "gates", "reprogram");
            let _ = writeln!(
                s,
                "{name:<22} {:>7} {:>7} {:>7} {:>9} {:>9} {:>9} {:>9}\n",
                g.layers, g.inputs, g.outputs, g.ands, g.xors, g.gates, g.reprogram10
            );
            let _ = writeln!(s, "wire information");
            let _ = writeln!(s, "{:<22} {:>9} {:>9} {:>9} {:>9} {:>7} {:>11}", "problem", "wires", "A", "B", "C", "D", "wires/layer");
            let _ = writeln!(
                s,
                "{name:<22} {:>9} {:>9} {:>9} {:>9} {:>7} {:>11.1}\n",
                w.total_wires,
                w.one_to_one,
                w.adjacent_gates,
                w.distant_gates,
                w.max_per_layer,
                wpl.unwrap_or(0.0)
            );
            let _ = writeln!(s, "wire percent");
            let _ = writeln!(s, "{:<22} {:>9} {:>9} {:>9}", "problem", "A%", "B%", "C%");
            let _ = writeln!(s, "{name:<22} {:>9.2} {:>9.1} {:>9.1}", p.one_to_one, p.adjacent_of_one_to_one, p.adjacent_of_all);
            if let Some(cmp) = &compared {
                let _ = writeln!(s, "\nreference comparison");
                s.push_str(&comparison_table(std::slice::from_ref(cmp)));
            }
            s
        }
    }
}

#[derive(Debug, Serialize)]
struct ScheduleSummary {
    layers: usize,
    gates: usize,
    and_batches: usize,
    reprogram: usize,
    policy: String,
    bram_capacity_labels: usize,
    bram_wires: usize,
}

/// Schedule and memory map; optionally also the packed binary trace.
pub fn schedule(
    c: &Circuit,
    params: &TimingParams<f64>,
    options: &SimOptions,
    format: Format,
) -> Result<(String, Result<Trace, SchedError>), CliError> {
    let l = extract_layers(c);
    let s = make_schedule(c, &l, params.n_and_cells as usize, params.n_xor_cells as usize);
    let m = allocate(options.policy, c, &l, options.capacity());
    let trace = build_trace(c, &s, &m);
    let summary = ScheduleSummary {
        layers: s.layers.len(),
        gates: s.gate_count(),
        and_batches: s.and_batch_count(),
        reprogram: reprogram_count(c, params.n_and_cells as usize),
        policy: m.policy.to_string(),
        bram_capacity_labels: m.bram_capacity_labels,
        bram_wires: m.bram_wires(),
    };
    let text = match format {
        Format::Json => {
            let schedule: serde_json::Value = serde_json::from_str(&s.to_json()).expect("schedule JSON");
            let memory: serde_json::Value = serde_json::from_str(&m.to_json(c)).expect("memory JSON");
            json(&serde_json::json!({ "summary": summary, "schedule": schedule, "memory": memory }))
        }
        Format::Csv => format!(
            "layers,gates,and_batches,reprogram,policy,bram_capacity_labels,bram_wires\n{},{},{},{},{},{},{}\n",
            summary.layers,
            summary.gates,
            summary.and_batches,
            summary.reprogram,
            summary.policy,
            summary.bram_capacity_labels,
            summary.bram_wires
        ),
        Format::Table => format!(
            "layers        {}\ngates         {}\nand batches   {}\nreprogram     {} (at {} AND cells)\npolicy        {}\nbram wires    {} of {} slots\n",
            summary.layers,
            summary.gates,
            summary.and_batches,
            summary.reprogram,
            params.n_and_cells,
            summary.policy,
            summary.bram_wires,
            summary.bram_capacity_labels
        ),
    };
    Ok((text, trace))
}

/// Which simulation to run.
pub enum SimMode<'a> {
    Single(&'a Circuit),
    Trace(&'a Trace),
    Compare(&'a Circuit),
    Sweep(&'a Circuit, &'a [u32]),
}

fn sim_err(e: gcoverlay::sim::SimError) -> CliError {
    CliError::Usage(e.to_string())
}

fn report_csv<T: Scalar>(r: &SimReport<T>) -> String {
    format!(
        "policy,overlap,xor_nosync,packed,gates,and_gates,xor_gates,units,total_ns,pcie_ns,compute_ns,bram_reads,bram_writes,ddr_reads,ddr_writes,peak_live_bram_slots\n\
         {},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
        r.options.policy,
        r.options.overlap,
        r.options.xor_nosync,
        r.options.packed,
        r.gates,
        r.and_gates,
        r.xor_gates,
        r.units,
        r.total_ns.as_f64(),
        r.pcie_ns.as_f64(),
        r.compute_ns.as_f64(),
        r.mem_read_bram,
        r.mem_write_bram,
        r.mem_read_ddr,
        r.mem_write_ddr,
        r.peak_live_bram_slots
    )
}

pub fn simulate<T: Scalar>(mode: SimMode<'_>, params: &TimingParams<T>, options: &SimOptions, format: Format) -> Result<String, CliError> {
    match mode {
        SimMode::Single(c) => {
            let r = simulate_circuit(c, params, options).map_err(sim_err)?;
            Ok(render_report(&r, format))
        }
        SimMode::Trace(t) => {
            let program = Program::from_trace(t).map_err(sim_err)?;
            let params = TimingParams { n_and_cells: t.n_and_cells, n_xor_cells: t.n_xor_cells, ..*params };
            let r = simulate_program(&program, &params, options).map_err(sim_err)?;
            Ok(render_report(&r, format))
        }
        SimMode::Compare(c) => {
            let cmp = compare_policies(c, params, options).map_err(sim_err)?;
            Ok(match format {
                Format::Json => json(&cmp),
                _ => cmp.to_csv(),
            })
        }
        SimMode::Sweep(c, counts) => {
            let cells: Vec<(u32, u32)> = counts.iter().map(|&n| (n, n)).collect();
            let rows = sweep_cells(c, params, options, &cells).map_err(sim_err)?;
            Ok(match format {
                Format::Json => json(&rows),
                _ => sweep_csv(&rows),
            })
        }
    }
}

fn render_report<T: Scalar>(r: &SimReport<T>, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = r.to_json();
            s.push('\n');
            s
        }
        Format::Csv => report_csv(r),
        Format::Table => r.to_table(),
    }
}

#[derive(Debug, Serialize)]
pub struct ReportDoc {
    pub rows: Vec<ComparedRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<BandwidthLine>,
}

#[derive(Debug, Serialize)]
pub struct BandwidthLine {
    pub ands: u64,
    pub time_us: f64,
    pub gates_per_second: f64,
    pub megabits_per_second: f64,
}

impl ReportDoc {
    pub fn exact_mismatches(&self) -> usize {
        self.rows.iter().map(|r| r.exact_mismatches().count()).sum()
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => json(self),
            Format::Csv => {
                let mut s = comparison_csv(&self.rows);
                if let Some(b) = &self.bandwidth {
                    let _ = write!(
                        s,
                        "\nands,time_us,gates_per_second,mbit_per_second\n{},{},{:.1},{:.2}\n",
                        b.ands, b.time_us, b.gates_per_second, b.megabits_per_second
                    );
                }
                s
            }
            Format::Table => {
                let mut s = comparison_table(&self.rows);
                let _ = writeln!(s, "\nexact-field mismatches: {}", self.exact_mismatches());
                for r in &self.rows {
                    if let Some(note) = &r.note {
                        let _ = writeln!(s, "note ({}): {note}", r.name);
                    }
                }
                if let Some(b) = &self.bandwidth {
                    let _ = writeln!(
                        s,
                        "\nbandwidth: {} ANDs in {} us = {:.3}M gates/s, {:.1} Mbit/s",
                        b.ands,
                        b.time_us,
                        b.gates_per_second / 1e6,
                        b.megabits_per_second
                    );
                }
                s
            }
        }
    }
}

/// Reference comparison for the bundled benchmark rows, optionally filtered.
pub fn report(filter: Option<gcoverlay::genlib::ProblemKind>, bw: Option<(u64, f64)>) -> Result<ReportDoc, CliError> {
    let rows: Vec<_> = reference_rows().into_iter().filter(|r| filter.is_none_or(|k| r.spec.kind == k)).collect();
    let rows = rows
        .par_iter()
        .map(|row| {
            let c = row.spec.generate().map_err(|e| CliError::Internal(e.to_string()))?;
            Ok(compare_row(row, &ComputedRow::of(&c)))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let bandwidth = match bw {
        Some((ands, us)) => {
            let b = bandwidth(ands, us * 1e-6).map_err(|e| CliError::Usage(e.to_string()))?;
            Some(BandwidthLine { ands, time_us: us, gates_per_second: b.gates_per_second, megabits_per_second: b.megabits_per_second() })
        }
        None => None,
    };
    Ok(ReportDoc { rows, bandwidth })
}
