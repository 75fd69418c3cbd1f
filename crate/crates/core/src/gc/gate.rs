use serde::{Deserialize, Serialize};

use super::label::{GlobalDelta, WireLabel, LABEL_BYTES};
use super::sha1;
use crate::netlist::GateId;

/// Stored ciphertext rows per garbled AND gate.
pub const ROWS_PER_TABLE: usize = 3;
/// Ciphertext bits per garbled AND gate.
pub const TABLE_BITS: usize = ROWS_PER_TABLE * 80;

/// Row-reduced garbled AND table.
///
/// `rows[2*s_i + s_j - 1]` holds the ciphertext addressed by select bits
/// `(s_i, s_j) != (0, 0)`; the `(0, 0)` row is implicitly all zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GarbledAndTable {
    pub rows: [WireLabel; ROWS_PER_TABLE],
}

/// `SHA-1(k_a || k_b || g)` truncated to the first 80 digest bits.
///
/// The message is 28 bytes: both labels as 10 big-endian bytes, then the gate
/// id as a 64-bit big-endian integer.
pub fn hash_gate(k_a: WireLabel, k_b: WireLabel, g: GateId) -> WireLabel {
    let mut msg = [0u8; 2 * LABEL_BYTES + 8];
    msg[..LABEL_BYTES].copy_from_slice(&k_a.to_bytes());
    msg[LABEL_BYTES..2 * LABEL_BYTES].copy_from_slice(&k_b.to_bytes());
    msg[2 * LABEL_BYTES..].copy_from_slice(&g.0.to_be_bytes());
    let digest = sha1::digest(&msg);
    let mut head = [0u8; LABEL_BYTES];
    head.copy_from_slice(&digest[..LABEL_BYTES]);
    WireLabel::from_bytes(head)
}

/// Free XOR: the output 0-label is the XOR of the input 0-labels.
pub fn garble_xor(label_a0: WireLabel, label_b0: WireLabel) -> WireLabel {
    label_a0 ^ label_b0
}

/// Garbles one AND gate with row reduction and point-and-permute.
///
/// Returns the output wire's 0-label and the three stored ciphertexts. The
/// output label is chosen so that the row addressed by select bits `(0, 0)`
/// decrypts to the correct output under an all-zero ciphertext.
pub fn garble_and(
    g: GateId,
    label_i0: WireLabel,
    label_j0: WireLabel,
    delta: GlobalDelta,
) -> (WireLabel, GarbledAndTable) {
    let r = delta.label();
    let p_i = label_i0.select_bit();
    let p_j = label_j0.select_bit();
    let active = |label0: WireLabel, bit: bool| if bit { label0 ^ r } else { label0 };

    let mut hashes = [WireLabel::ZERO; 4];
    let mut values = [false; 4];
    for s_i in [false, true] {
        for s_j in [false, true] {
            let b_i = s_i ^ p_i;
            let b_j = s_j ^ p_j;
            let pos = 2 * usize::from(s_i) + usize::from(s_j);
            hashes[pos] = hash_gate(active(label_i0, b_i), active(label_j0, b_j), g);
            values[pos] = b_i & b_j;
        }
    }

    let label_k0 = active(hashes[0], values[0]);
    let mut rows = [WireLabel::ZERO; ROWS_PER_TABLE];
    for pos in 1..4 {
        rows[pos - 1] = hashes[pos] ^ active(label_k0, values[pos]);
    }
    (label_k0, GarbledAndTable { rows })
}

/// Decrypts the single row addressed by the select bits of the active labels.
pub fn evaluate_and(g: GateId, k_i: WireLabel, k_j: WireLabel, table: &GarbledAndTable) -> WireLabel {
    let h = hash_gate(k_i, k_j, g);
    match 2 * usize::from(k_i.select_bit()) + usize::from(k_j.select_bit()) {
        0 => h,
        pos => h ^ table.rows[pos - 1],
    }
}
