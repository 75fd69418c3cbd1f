//! Event loop.
//!
//! The host sends dispatch units over a single serial link. After a
//! synchronized unit it waits until every issued gate has finished before
//! sending more. Each cell runs its gates one at a time: both operand reads
//! are issued together, then the cell computes, then it writes the result.
//! BRAM accesses never contend; each DDR access occupies port
//! `address % ddr_ports` for the full latency, served in request order.
//! Reads wait for earlier writes to the same location and writes wait for
//! earlier accesses to it, so reused BRAM slots stay consistent.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashMap, VecDeque};

use super::program::{Op, Program};
use super::report::{LayerReport, SimReport};
use super::{SimOptions, TimingParams};
use crate::netlist::GateKind;
use crate::scheduler::Placement;
use crate::Scalar;

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy)]
enum Ev {
    HostSend(u32),
    Arrive(u32),
    ReadDone(u32, u8),
    ComputeDone(u32),
    WriteDone(u32),
}

struct Event<T> {
    time: T,
    seq: u64,
    ev: Ev,
}

impl<T: Scalar> PartialEq for Event<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for Event<T> {}

impl<T: Scalar> PartialOrd for Event<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Event<T> {
    // reversed: BinaryHeap pops the earliest event, ties in insertion order
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .partial_cmp(&self.time)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Location hazards and value lifetimes, fixed by program order.
struct Hazards {
    /// Last earlier writer of each operand location.
    raw: Vec<[u32; 2]>,
    /// Last earlier writer of the result location.
    waw: Vec<u32>,
    /// Earlier readers of the result location since its last write.
    war_offsets: Vec<u32>,
    war: Vec<u32>,
    /// Value read by each operand: an op index, or an initial-content id.
    read_value: Vec<[u32; 2]>,
    /// Reads per value id.
    readers: Vec<u32>,
    /// The result overwrites a BRAM value nobody reads.
    kills_unread: Vec<bool>,
    /// BRAM initial contents that are read, live from time zero.
    initial_live: u64,
}

impl Hazards {
    fn new(ops: &[Op]) -> Self {
        struct Loc {
            writer: u32,
            value: u32,
            present: bool,
            readers: Vec<u32>,
        }
        let n = ops.len();
        let mut locs: HashMap<Placement, Loc> = HashMap::new();
        let mut readers = vec![0u32; n];
        let mut initial_present = Vec::new();
        let mut h = Hazards {
            raw: Vec::with_capacity(n),
            waw: Vec::with_capacity(n),
            war_offsets: Vec::with_capacity(n + 1),
            war: Vec::new(),
            read_value: Vec::with_capacity(n),
            readers: Vec::new(),
            kills_unread: Vec::with_capacity(n),
            initial_live: 0,
        };
        h.war_offsets.push(0);
        for (i, op) in ops.iter().enumerate() {
            let mut raw = [NONE; 2];
            let mut vals = [NONE; 2];
            for r in 0..2 {
                let loc = locs.entry(op.reads[r]).or_insert_with(|| {
                    readers.push(0);
                    initial_present.push(op.reads[r].is_bram());
                    Loc { writer: NONE, value: (readers.len() - 1) as u32, present: true, readers: Vec::new() }
                });
                raw[r] = loc.writer;
                vals[r] = loc.value;
                readers[loc.value as usize] += 1;
                loc.readers.push(i as u32);
            }
            let loc = locs.entry(op.write).or_insert_with(|| {
                readers.push(0);
                initial_present.push(false);
                Loc { writer: NONE, value: (readers.len() - 1) as u32, present: false, readers: Vec::new() }
            });
            h.raw.push(raw);
            h.read_value.push(vals);
            h.waw.push(loc.writer);
            h.war.extend(loc.readers.iter().copied().filter(|&r| r != i as u32));
            h.war_offsets.push(h.war.len() as u32);
            h.kills_unread.push(op.write.is_bram() && loc.present && readers[loc.value as usize] == 0);
            loc.readers.clear();
            loc.writer = i as u32;
            loc.value = i as u32;
            loc.present = true;
        }
        h.readers = readers;
        h.initial_live = initial_present.iter().filter(|&&p| p).count() as u64;
        h
    }

    fn war(&self, i: usize) -> &[u32] {
        &self.war[self.war_offsets[i] as usize..self.war_offsets[i + 1] as usize]
    }
}

#[derive(Clone, Copy, Default)]
struct OpState {
    reads_left: u8,
    reads_done: bool,
    compute_done: bool,
    write_issued: bool,
    write_done: bool,
}

#[derive(Clone, Copy)]
enum Wait {
    Start(u32),
    Write(u32),
}

struct Unit {
    start: u32,
    end: u32,
    barrier: bool,
}

struct Engine<'a, T> {
    params: &'a TimingParams<T>,
    ops: &'a [Op],
    hz: Hazards,
    units: Vec<Unit>,
    link_ns: T,
    bram_ns: T,
    heap: BinaryHeap<Event<T>>,
    seq: u64,
    state: Vec<OpState>,
    waiting_on_write: HashMap<u32, Vec<Wait>>,
    waiting_on_reads: HashMap<u32, Vec<Wait>>,
    cell_queue: Vec<VecDeque<u32>>,
    cell_busy: Vec<bool>,
    n_and_cells: usize,
    ports: Vec<T>,
    outstanding: usize,
    host_waiting: Option<(u32, T)>,
    pending_reads: Vec<u32>,
    live: u64,
    peak_live: u64,
    report: SimReport<T>,
    layers: BTreeMap<u32, LayerReport<T>>,
}

impl<'a, T: Scalar> Engine<'a, T> {
    fn push(&mut self, time: T, ev: Ev) {
        self.seq += 1;
        self.heap.push(Event { time, seq: self.seq, ev });
    }

    fn cell_index(&self, op: &Op) -> usize {
        match op.kind {
            GateKind::And => op.cell as usize,
            GateKind::Xor => self.n_and_cells + op.cell as usize,
        }
    }

    fn access(&mut self, loc: Placement, now: T) -> T {
        match loc {
            Placement::Bram(_) => now + self.bram_ns,
            Placement::Ddr(addr) => {
                let port = addr as usize % self.ports.len();
                let begin = now.max_of(self.ports[port]);
                let done = begin + self.params.ddr_latency_ns;
                self.ports[port] = done;
                done
            }
        }
    }

    fn host_send(&mut self, u: u32, now: T) {
        let unit = &self.units[u as usize];
        let (start, end, barrier) = (unit.start, unit.end, unit.barrier);
        let n = end - start;
        let unit_done = now + self.link_ns * T::from_count(u64::from(n));
        for (k, i) in (start..end).enumerate() {
            let arrival = if self.overlap() { now + self.link_ns * T::from_count(k as u64 + 1) } else { unit_done };
            self.push(arrival, Ev::Arrive(i));
        }
        self.outstanding += n as usize;
        let next = u + 1;
        if (next as usize) < self.units.len() {
            if barrier {
                self.host_waiting = Some((next, unit_done));
            } else {
                self.push(unit_done, Ev::HostSend(next));
            }
        }
    }

    fn overlap(&self) -> bool {
        self.report.options.overlap
    }

    fn arrive(&mut self, i: u32, now: T) {
        let c = self.cell_index(&self.ops[i as usize]);
        self.cell_queue[c].push_back(i);
        if !self.cell_busy[c] && self.cell_queue[c].front() == Some(&i) {
            self.try_start(i, now);
        }
    }

    fn try_start(&mut self, i: u32, now: T) {
        let op = self.ops[i as usize];
        let c = self.cell_index(&op);
        if self.cell_busy[c] || self.cell_queue[c].front() != Some(&i) {
            return;
        }
        for d in self.hz.raw[i as usize] {
            if d != NONE && !self.state[d as usize].write_done {
                self.waiting_on_write.entry(d).or_default().push(Wait::Start(i));
                return;
            }
        }
        self.cell_busy[c] = true;
        self.cell_queue[c].pop_front();
        let lr = self.layers.entry(op.layer).or_insert_with(|| LayerReport::new(op.layer, now));
        lr.start_ns = lr.start_ns.min_of(now);
        lr.gates += 1;
        if op.kind == GateKind::And {
            lr.ands += 1;
        }
        self.state[i as usize].reads_left = 2;
        for (r, loc) in op.reads.into_iter().enumerate() {
            if loc.is_bram() {
                self.report.mem_read_bram += 1;
            } else {
                self.report.mem_read_ddr += 1;
            }
            let done = self.access(loc, now);
            self.push(done, Ev::ReadDone(i, r as u8));
        }
    }

    fn read_done(&mut self, i: u32, r: u8, now: T) {
        let op = self.ops[i as usize];
        if op.reads[r as usize].is_bram() {
            let v = self.hz.read_value[i as usize][r as usize] as usize;
            self.pending_reads[v] -= 1;
            if self.pending_reads[v] == 0 {
                self.live -= 1;
            }
        }
        let st = &mut self.state[i as usize];
        st.reads_left -= 1;
        if st.reads_left > 0 {
            return;
        }
        st.reads_done = true;
        let latency = match op.kind {
            GateKind::And => self.params.gand_latency_cycles,
            GateKind::Xor => self.params.gxor_latency_cycles,
        };
        self.push(now + self.params.cycles_ns(latency), Ev::ComputeDone(i));
        if let Some(waiters) = self.waiting_on_reads.remove(&i) {
            self.wake(waiters, now);
        }
    }

    fn try_write(&mut self, i: u32, now: T) {
        let st = self.state[i as usize];
        if !st.compute_done || st.write_issued {
            return;
        }
        let waw = self.hz.waw[i as usize];
        if waw != NONE && !self.state[waw as usize].write_done {
            self.waiting_on_write.entry(waw).or_default().push(Wait::Write(i));
            return;
        }
        if let Some(&d) = self.hz.war(i as usize).iter().find(|&&d| !self.state[d as usize].reads_done) {
            self.waiting_on_reads.entry(d).or_default().push(Wait::Write(i));
            return;
        }
        self.state[i as usize].write_issued = true;
        let loc = self.ops[i as usize].write;
        if loc.is_bram() {
            self.report.mem_write_bram += 1;
        } else {
            self.report.mem_write_ddr += 1;
        }
        let done = self.access(loc, now);
        self.push(done, Ev::WriteDone(i));
    }

    fn write_done(&mut self, i: u32, now: T) {
        let op = self.ops[i as usize];
        self.state[i as usize].write_done = true;
        if op.write.is_bram() {
            if self.hz.kills_unread[i as usize] {
                self.live -= 1;
            }
            self.live += 1;
            self.peak_live = self.peak_live.max(self.live);
        }
        self.report.total_ns = self.report.total_ns.max_of(now);
        let lr = self.layers.get_mut(&op.layer).expect("layer started");
        lr.end_ns = lr.end_ns.max_of(now);

        let c = self.cell_index(&op);
        self.cell_busy[c] = false;
        if let Some(&next) = self.cell_queue[c].front() {
            self.try_start(next, now);
        }
        if let Some(waiters) = self.waiting_on_write.remove(&i) {
            self.wake(waiters, now);
        }
        self.outstanding -= 1;
        if self.outstanding == 0 {
            if let Some((next, link_free)) = self.host_waiting.take() {
                self.push(now.max_of(link_free), Ev::HostSend(next));
            }
        }
    }

    fn wake(&mut self, waiters: Vec<Wait>, now: T) {
        for w in waiters {
            match w {
                Wait::Start(j) => self.try_start(j, now),
                Wait::Write(j) => self.try_write(j, now),
            }
        }
    }

    fn run(mut self) -> SimReport<T> {
        if !self.units.is_empty() {
            self.push(T::zero(), Ev::HostSend(0));
        }
        while let Some(Event { time, ev, .. }) = self.heap.pop() {
            match ev {
                Ev::HostSend(u) => self.host_send(u, time),
                Ev::Arrive(i) => self.arrive(i, time),
                Ev::ReadDone(i, r) => self.read_done(i, r, time),
                Ev::ComputeDone(i) => {
                    self.state[i as usize].compute_done = true;
                    self.try_write(i, time);
                }
                Ev::WriteDone(i) => self.write_done(i, time),
            }
        }
        assert!(self.state.iter().all(|s| s.write_done), "simulation stalled");
        let mut report = self.report;
        report.peak_live_bram_slots = self.peak_live;
        report.layers = self.layers.into_values().collect();
        report
    }
}

fn make_units<T: Scalar>(ops: &[Op], params: &TimingParams<T>, options: &SimOptions) -> Vec<Unit> {
    let nosync = options.xor_nosync && params.link_ns(options.packed) >= params.cycles_ns(params.gxor_latency_cycles);
    let mut units: Vec<Unit> = Vec::new();
    for (i, op) in ops.iter().enumerate() {
        let prev = i.checked_sub(1).map(|p| &ops[p]);
        let same_group = prev.is_some_and(|p| p.kind == op.kind && p.layer == op.layer);
        let boundary = !same_group || (op.unit_start && !(nosync && op.kind == GateKind::Xor));
        if boundary {
            units.push(Unit { start: i as u32, end: i as u32 + 1, barrier: !(nosync && op.kind == GateKind::Xor) });
        } else {
            units.last_mut().expect("unit open").end += 1;
        }
    }
    units
}

pub(super) fn simulate_program<T: Scalar>(program: &Program, params: &TimingParams<T>, options: &SimOptions) -> SimReport<T> {
    let ops = &program.ops;
    let hz = Hazards::new(ops);
    let pending_reads = hz.readers.clone();
    let live = hz.initial_live;
    let n_cells = (program.n_and_cells + program.n_xor_cells) as usize;

    let mut report = SimReport::empty(*options);
    report.gates = ops.len() as u64;
    report.and_gates = ops.iter().filter(|o| o.kind == GateKind::And).count() as u64;
    report.xor_gates = report.gates - report.and_gates;
    report.pcie_ns = params.link_ns(options.packed) * T::from_count(report.gates);
    report.compute_ns = params.cycles_ns(params.gand_latency_cycles) * T::from_count(report.and_gates)
        + params.cycles_ns(params.gxor_latency_cycles) * T::from_count(report.xor_gates);
    let units = make_units(ops, params, options);
    report.units = units.len() as u64;

    let engine = Engine {
        params,
        ops,
        hz,
        units,
        link_ns: params.link_ns(options.packed),
        bram_ns: params.cycles_ns(params.bram_access_cycles),
        heap: BinaryHeap::new(),
        seq: 0,
        state: vec![OpState::default(); ops.len()],
        waiting_on_write: HashMap::new(),
        waiting_on_reads: HashMap::new(),
        cell_queue: vec![VecDeque::new(); n_cells],
        cell_busy: vec![false; n_cells],
        n_and_cells: program.n_and_cells as usize,
        ports: vec![T::zero(); params.ddr_ports as usize],
        outstanding: 0,
        host_waiting: None,
        pending_reads,
        live,
        peak_live: live,
        report,
        layers: BTreeMap::new(),
    };
    engine.run()
}
