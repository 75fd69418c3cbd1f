use proptest::prelude::*;

use gcoverlay::gc::{cleartext_evaluate, container, garble_circuit, garbled_round_trip, Assignment};
use gcoverlay::genlib::Builder;
use gcoverlay::netlist::{parse, write, Circuit, GateKind, WireId};
use gcoverlay::scheduler::trace::{build_trace, Trace};
use gcoverlay::scheduler::{
    allocate, extract_layers, make_schedule, pack_addresses, wire_stats, Placement, Policy, ADDRESS_BITS,
};
use gcoverlay::sim::{simulate_circuit, SimOptions};
use gcoverlay::{ExactTime, TimingParamsExact};

#[derive(Clone, Debug)]
struct Recipe {
    inputs: usize,
    gates: Vec<(bool, usize, usize)>,
    outputs: Vec<usize>,
    use_zero: bool,
}

fn recipe() -> impl Strategy<Value = Recipe> {
    (
        1usize..7,
        prop::collection::vec((any::<bool>(), any::<usize>(), any::<usize>()), 1..48),
        prop::collection::vec(any::<usize>(), 1..6),
        any::<bool>(),
    )
        .prop_map(|(inputs, gates, outputs, use_zero)| Recipe { inputs, gates, outputs, use_zero })
}

fn build(r: &Recipe) -> Circuit {
    let mut b = Builder::new(r.inputs);
    let mut wires: Vec<WireId> = (0..r.inputs).map(|k| b.input(k)).collect();
    if r.use_zero {
        wires.push(b.zero());
    }
    let mut outs = Vec::new();
    for &(and, x, y) in &r.gates {
        let (x, y) = (wires[x % wires.len()], wires[y % wires.len()]);
        let w = if and { b.and(x, y) } else { b.xor(x, y) };
        wires.push(w);
        outs.push(w);
    }
    let mut picked: Vec<WireId> = r.outputs.iter().map(|&k| outs[k % outs.len()]).collect();
    picked.sort_unstable();
    picked.dedup();
    b.finish(picked)
}

fn assignment(c: &Circuit, bits: u64) -> Assignment {
    c.inputs().iter().enumerate().map(|(k, w)| (*w, (bits >> k) & 1 == 1)).collect()
}

fn placement(bram: bool, addr: u32) -> Placement {
    if bram {
        Placement::Bram(addr)
    } else {
        Placement::Ddr(addr)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn packed_addresses_round_trip(f in prop::array::uniform3((any::<bool>(), 0u32..1 << ADDRESS_BITS))) {
        let [a, b, o] = f.map(|(bram, addr)| placement(bram, addr));
        let packed = pack_addresses(a, b, o).unwrap();
        prop_assert_eq!(packed.unpack(), [a, b, o]);
        prop_assert_eq!(packed.word() >> 63, 0);
    }

    #[test]
    fn oversized_addresses_are_rejected(addr in (1u32 << ADDRESS_BITS)..u32::MAX, slot in 0usize..3) {
        let mut f = [Placement::Ddr(0); 3];
        f[slot] = Placement::Ddr(addr);
        prop_assert!(pack_addresses(f[0], f[1], f[2]).is_err());
    }

    #[test]
    fn netlist_text_round_trip(r in recipe()) {
        let c = build(&r);
        let text = write(&c);
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(write(&back), text);
    }

    #[test]
    fn garbled_evaluation_matches_cleartext(r in recipe(), seed in any::<u64>(), bits in any::<u64>()) {
        let c = build(&r);
        let gc = garble_circuit(&c, seed);
        prop_assert_eq!(gc.and_tables.len(), c.and_count());
        let a = assignment(&c, bits);
        prop_assert_eq!(garbled_round_trip(&c, &gc, &a).unwrap(), cleartext_evaluate(&c, &a).unwrap());
    }

    #[test]
    fn container_round_trip(r in recipe(), seed in any::<u64>()) {
        let c = build(&r);
        let gc = garble_circuit(&c, seed);
        let bytes = container::to_bytes(&gc);
        prop_assert_eq!(&container::from_bytes(&bytes).unwrap(), &gc);
        prop_assert_eq!(container::from_json(&container::to_json(&gc)).unwrap(), gc);
    }

    #[test]
    fn layers_respect_dependencies(r in recipe()) {
        let c = build(&r);
        let l = extract_layers(&c);
        let first = c.first_gate_slot();
        for i in 0..c.gates().len() {
            let layer = l.gate_layer(i);
            prop_assert!(layer >= 1);
            for s in c.operand_slots(i) {
                prop_assert!(l.slot_layer(s) < layer);
            }
            prop_assert_eq!(l.slot_layer(first + i), layer);
        }
        let w = wire_stats(&c, &l);
        prop_assert!(w.adjacent_gates + w.distant_gates <= w.one_to_one);
        prop_assert!(w.one_to_one <= c.gates().len());
    }

    #[test]
    fn schedule_covers_every_gate_once(r in recipe(), n_and in 1usize..6, n_xor in 1usize..6) {
        let c = build(&r);
        let l = extract_layers(&c);
        let s = make_schedule(&c, &l, n_and, n_xor);
        let mut seen = vec![0u32; c.gates().len()];
        for plan in &s.layers {
            for slot in &plan.xor_stream {
                prop_assert_eq!(c.gates()[slot.gate as usize].kind, GateKind::Xor);
                prop_assert!((slot.cell as usize) < n_xor);
                seen[slot.gate as usize] += 1;
            }
            for batch in &plan.and_batches {
                prop_assert!(!batch.is_empty() && batch.len() <= n_and);
                for slot in batch {
                    prop_assert_eq!(c.gates()[slot.gate as usize].kind, GateKind::And);
                    prop_assert_eq!(l.gate_layer(slot.gate as usize), plan.layer);
                    seen[slot.gate as usize] += 1;
                }
            }
        }
        prop_assert!(seen.iter().all(|&n| n == 1));
    }

    #[test]
    fn trace_bytes_round_trip(r in recipe(), cap in 0usize..16) {
        let c = build(&r);
        let l = extract_layers(&c);
        let s = make_schedule(&c, &l, 3, 2);
        let m = allocate(Policy::DirectlyUsed, &c, &l, cap);
        let t = build_trace(&c, &s, &m).unwrap();
        prop_assert_eq!(t.records.len(), c.gates().len());
        prop_assert_eq!(Trace::from_bytes(&t.to_bytes()).unwrap(), t);
    }

    #[test]
    fn bram_placements_fit_capacity(r in recipe(), cap in 0usize..12) {
        let c = build(&r);
        let l = extract_layers(&c);
        for policy in Policy::ALL {
            let m = allocate(policy, &c, &l, cap);
            prop_assert_eq!(m.len(), c.slot_count());
            for p in m.placements() {
                if let Placement::Bram(a) = p {
                    prop_assert!((*a as usize) < cap);
                }
            }
        }
    }

    #[test]
    fn simulation_conserves_work(r in recipe(), overlap in any::<bool>(), nosync in any::<bool>(), packed in any::<bool>()) {
        let c = build(&r);
        let p = TimingParamsExact { n_and_cells: 3, n_xor_cells: 2, ..Default::default() };
        for policy in Policy::ALL {
            let o = SimOptions { policy, overlap, xor_nosync: nosync, packed, bram_capacity: Some(8) };
            let rep = simulate_circuit(&c, &p, &o).unwrap();
            let gates = c.gates().len() as u64;
            prop_assert_eq!(rep.gates, gates);
            prop_assert_eq!(rep.mem_read_bram + rep.mem_read_ddr, 2 * gates);
            prop_assert_eq!(rep.mem_write_bram + rep.mem_write_ddr, gates);
            let work = (c.and_count() as i64) * 410 + (c.xor_count() as i64) * 5;
            prop_assert_eq!(rep.compute_ns, ExactTime::from_integer(work));
            let link = if packed { 100 } else { 150 };
            prop_assert_eq!(rep.pcie_ns, ExactTime::from_integer(link * gates as i64));
            prop_assert!(rep.total_ns >= ExactTime::from_integer(link));
            prop_assert!(rep.peak_live_bram_slots <= 8);
        }
    }

    #[test]
    fn simulation_is_deterministic(r in recipe()) {
        let c = build(&r);
        let o = SimOptions { policy: Policy::MostFrequentlyUsed, overlap: true, ..Default::default() };
        let p = TimingParamsExact::default();
        prop_assert_eq!(simulate_circuit(&c, &p, &o).unwrap(), simulate_circuit(&c, &p, &o).unwrap());
    }
}
