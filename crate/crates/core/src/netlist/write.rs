use std::fmt::Write as _;

use super::{Circuit, WireId};

/// Renders a circuit in the `.gcn` format.
///
/// Layout: one summary comment, one `IN` line, an optional `ZERO` line, one
/// `OUT` line, then one line per gate. Gate ids are implicit in file order, so
/// `parse(write(c)) == c` whenever the ids of `c` are `0, 1, 2, ...`.
pub fn write(c: &Circuit) -> String {
    let mut out = String::with_capacity(32 + c.gates().len() * 20);
    let _ = writeln!(
        out,
        "# gcn v1: {} inputs, {} gates ({} AND, {} XOR), {} outputs",
        c.inputs().len(),
        c.gates().len(),
        c.and_count(),
        c.xor_count(),
        c.outputs().len()
    );
    write_list(&mut out, "IN", c.inputs());
    if let Some(z) = c.constant_zero() {
        let _ = writeln!(out, "ZERO {z}");
    }
    write_list(&mut out, "OUT", c.outputs());
    for g in c.gates() {
        let _ = writeln!(out, "{} {} {} = {}", g.in0, g.kind.mnemonic(), g.in1, g.out);
    }
    out
}

fn write_list(out: &mut String, keyword: &str, wires: &[WireId]) {
    if wires.is_empty() {
        return;
    }
    out.push_str(keyword);
    for w in wires {
        let _ = write!(out, " {w}");
    }
    out.push('\n');
}
