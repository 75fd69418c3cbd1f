//! Deterministic benchmark circuit generators.
//!
//! All generators share one full-adder cell (1 AND, 4 XOR) and allocate wire
//! ids sequentially: primary inputs first (each operand least significant bit
//! first), then the constant-zero wire, then one wire per gate in emission
//! order. Output is a pure function of the parameters.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netlist::{Circuit, Gate, GateId, GateKind, WireId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    InvalidSpec(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Adder,
    Hamming,
    Multiplier,
    Sorter,
    Matmul,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 5] = [
        ProblemKind::Adder,
        ProblemKind::Hamming,
        ProblemKind::Multiplier,
        ProblemKind::Sorter,
        ProblemKind::Matmul,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Adder => "adder",
            ProblemKind::Hamming => "hamming",
            ProblemKind::Multiplier => "multiplier",
            ProblemKind::Sorter => "sorter",
            ProblemKind::Matmul => "matmul",
        }
    }

    /// Whether `dim` is meaningful for this kind.
    pub fn uses_dim(self) -> bool {
        matches!(self, ProblemKind::Sorter | ProblemKind::Matmul)
    }
}

impl std::str::FromStr for ProblemKind {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "adder" | "add" => Ok(ProblemKind::Adder),
            "hamming" | "hd" => Ok(ProblemKind::Hamming),
            "multiplier" | "mult" | "mul" => Ok(ProblemKind::Multiplier),
            "sorter" | "sort" => Ok(ProblemKind::Sorter),
            "matmul" | "mmult" | "m_mult" => Ok(ProblemKind::Matmul),
            other => Err(GenError::InvalidSpec(format!("unknown problem kind '{other}'"))),
        }
    }
}

/// A benchmark instance: `width` bits per operand, and for sorters the element
/// count or for matrix products the matrix dimension in `dim`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub width: u32,
    pub dim: u32,
}

impl ProblemSpec {
    pub fn adder(width: u32) -> Self {
        ProblemSpec { kind: ProblemKind::Adder, width, dim: 1 }
    }

    pub fn hamming(width: u32) -> Self {
        ProblemSpec { kind: ProblemKind::Hamming, width, dim: 1 }
    }

    pub fn multiplier(width: u32) -> Self {
        ProblemSpec { kind: ProblemKind::Multiplier, width, dim: 1 }
    }

    pub fn sorter(count: u32, width: u32) -> Self {
        ProblemSpec { kind: ProblemKind::Sorter, width, dim: count }
    }

    pub fn matmul(dim: u32, width: u32) -> Self {
        ProblemSpec { kind: ProblemKind::Matmul, width, dim }
    }

    pub fn generate(&self) -> Result<Circuit, GenError> {
        let (w, d) = (self.width as usize, self.dim as usize);
        if w == 0 {
            return Err(GenError::InvalidSpec("width must be at least 1".into()));
        }
        if d == 0 {
            return Err(GenError::InvalidSpec("dim must be at least 1".into()));
        }
        match self.kind {
            ProblemKind::Adder => Ok(gen_adder(w)),
            ProblemKind::Hamming => Ok(gen_hamming(w)),
            ProblemKind::Multiplier if w < 2 => Err(GenError::InvalidSpec("multiplier width must be at least 2".into())),
            ProblemKind::Multiplier => Ok(gen_multiplier(w)),
            ProblemKind::Sorter if d < 2 => Err(GenError::InvalidSpec("sorter needs at least 2 elements".into())),
            ProblemKind::Sorter => Ok(gen_sorter(d, w)),
            ProblemKind::Matmul if w < 2 => Err(GenError::InvalidSpec("matmul width must be at least 2".into())),
            ProblemKind::Matmul => Ok(gen_matmul(d, w)),
        }
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ProblemKind::Adder => write!(f, "{}-bit adder", self.width),
            ProblemKind::Hamming => write!(f, "{}-bit HD", self.width),
            ProblemKind::Multiplier => write!(f, "{}-bit mult", self.width),
            ProblemKind::Sorter => write!(f, "{} {}-bit sorting", self.dim, self.width),
            ProblemKind::Matmul => write!(f, "{}x{} {}-bit m_mult", self.dim, self.dim, self.width),
        }
    }
}

/// Sequential circuit builder used by the generators.
pub struct Builder {
    inputs: Vec<WireId>,
    zero: WireId,
    gates: Vec<Gate>,
    next: u32,
    zero_used: bool,
}

impl Builder {
    /// Reserves `n_inputs` input wires (ids `0..n_inputs`) and the zero wire.
    pub fn new(n_inputs: usize) -> Self {
        let n = n_inputs as u32;
        Builder {
            inputs: (0..n).map(WireId).collect(),
            zero: WireId(n),
            gates: Vec::new(),
            next: n + 1,
            zero_used: false,
        }
    }

    pub fn input(&self, k: usize) -> WireId {
        self.inputs[k]
    }

    /// Inputs `start..start + len` as a little-endian word.
    pub fn input_word(&self, start: usize, len: usize) -> Vec<WireId> {
        self.inputs[start..start + len].to_vec()
    }

    pub fn zero(&mut self) -> WireId {
        self.zero_used = true;
        self.zero
    }

    fn gate(&mut self, kind: GateKind, a: WireId, b: WireId) -> WireId {
        let out = WireId(self.next);
        self.next += 1;
        let id = GateId(self.gates.len() as u64);
        self.gates.push(Gate { id, kind, in0: a, in1: b, out });
        out
    }

    pub fn and(&mut self, a: WireId, b: WireId) -> WireId {
        self.gate(GateKind::And, a, b)
    }

    pub fn xor(&mut self, a: WireId, b: WireId) -> WireId {
        self.gate(GateKind::Xor, a, b)
    }

    /// `b ^ (s & (a ^ b))`: `a` when `s` is set, else `b`.
    pub fn mux(&mut self, s: WireId, a: WireId, b: WireId) -> WireId {
        let d = self.xor(a, b);
        let m = self.and(s, d);
        self.xor(b, m)
    }

    /// Full adder; `a` is read once, `b` and `c` twice. Returns `(sum, carry)`.
    pub fn full_adder(&mut self, a: WireId, b: WireId, c: WireId) -> (WireId, WireId) {
        let t1 = self.xor(a, c);
        let t2 = self.xor(b, c);
        let u = self.and(t1, t2);
        let carry = self.xor(c, u);
        let sum = self.xor(t1, b);
        (sum, carry)
    }

    /// Ripple-carry sum of two equal-width words with zero carry-in. Every
    /// cell is emitted; the final carry is appended only if `keep_carry`.
    pub fn ripple_add(&mut self, a: &[WireId], b: &[WireId], keep_carry: bool) -> Vec<WireId> {
        assert_eq!(a.len(), b.len(), "ripple_add operands must have equal width");
        let mut c = self.zero();
        let mut out = Vec::with_capacity(a.len() + 1);
        for (&x, &y) in a.iter().zip(b) {
            let (s, carry) = self.full_adder(x, y, c);
            out.push(s);
            c = carry;
        }
        if keep_carry {
            out.push(c);
        }
        out
    }

    /// Adds two words of possibly different widths, zero-extending the
    /// shorter one, and returns `min(max_width + 1, limit)` result bits.
    pub fn widening_add(&mut self, a: &[WireId], b: &[WireId], limit: usize) -> Vec<WireId> {
        let w = a.len().max(b.len());
        let a = self.zero_extend(a, w);
        let b = self.zero_extend(b, w);
        let target = (w + 1).min(limit);
        let mut sum = self.ripple_add(&a, &b, target > w);
        sum.truncate(target);
        sum
    }

    fn zero_extend(&mut self, word: &[WireId], width: usize) -> Vec<WireId> {
        let mut v = word.to_vec();
        while v.len() < width {
            v.push(self.zero());
        }
        v
    }

    /// Array multiplier over little-endian words; returns `a.len() + b.len()` bits.
    pub fn multiply(&mut self, a: &[WireId], b: &[WireId]) -> Vec<WireId> {
        let n = a.len();
        let rows: Vec<Vec<WireId>> = b
            .iter()
            .map(|&bj| a.iter().map(|&ak| self.and(ak, bj)).collect())
            .collect();
        let mut product = vec![rows[0][0]];
        let mut high: Vec<WireId> = rows[0][1..].to_vec();
        high.push(self.zero());
        for row in &rows[1..] {
            let sum = self.ripple_add(row, &high, true);
            product.push(sum[0]);
            high = sum[1..=n].to_vec();
        }
        product.extend(high);
        product
    }

    /// Strict `x > y` over little-endian words of equal width.
    pub fn greater_than(&mut self, x: &[WireId], y: &[WireId]) -> WireId {
        let mut c = self.zero();
        for (&xi, &yi) in x.iter().zip(y) {
            let p = self.xor(xi, c);
            let q = self.xor(yi, c);
            let m = self.and(p, q);
            c = self.xor(xi, m);
        }
        c
    }

    /// Returns `(min, max)` of two words.
    pub fn compare_exchange(&mut self, x: &[WireId], y: &[WireId]) -> (Vec<WireId>, Vec<WireId>) {
        let s = self.greater_than(x, y);
        let lo = x.iter().zip(y).map(|(&xi, &yi)| self.mux(s, yi, xi)).collect();
        let hi = x.iter().zip(y).map(|(&xi, &yi)| self.mux(s, xi, yi)).collect();
        (lo, hi)
    }

    /// Population count of `bits` by recursive halving.
    pub fn popcount(&mut self, bits: &[WireId]) -> Vec<WireId> {
        if bits.len() == 1 {
            return bits.to_vec();
        }
        let (lo, hi) = bits.split_at(bits.len() / 2);
        let a = self.popcount(lo);
        let b = self.popcount(hi);
        self.widening_add(&a, &b, count_width(bits.len()))
    }

    pub fn finish(self, outputs: Vec<WireId>) -> Circuit {
        if self.zero_used {
            return Circuit::new(self.inputs, self.gates, outputs, Some(self.zero)).expect("generated circuit is valid");
        }
        // Close the id gap left by the unused zero wire.
        let z = self.zero.0;
        let shift = |w: WireId| if w.0 > z { WireId(w.0 - 1) } else { w };
        let gates = self
            .gates
            .into_iter()
            .map(|g| Gate { in0: shift(g.in0), in1: shift(g.in1), out: shift(g.out), ..g })
            .collect();
        let outputs = outputs.into_iter().map(shift).collect();
        Circuit::new(self.inputs, gates, outputs, None).expect("generated circuit is valid")
    }
}

/// Bits needed to hold a count in `0..=n`.
pub fn count_width(n: usize) -> usize {
    (usize::BITS - n.leading_zeros()) as usize
}

fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        count_width(n - 1)
    }
}

/// Ripple-carry adder: inputs `a` then `b`, outputs the `n` sum bits.
pub fn gen_adder(n: usize) -> Circuit {
    let mut b = Builder::new(2 * n);
    let x = b.input_word(0, n);
    let y = b.input_word(n, n);
    let mut sum = b.ripple_add(&x, &y, false);
    sum.truncate(n);
    b.finish(sum)
}

/// Array multiplier producing the full `2n`-bit product.
pub fn gen_multiplier(n: usize) -> Circuit {
    let mut b = Builder::new(2 * n);
    let x = b.input_word(0, n);
    let y = b.input_word(n, n);
    let p = b.multiply(&x, &y);
    b.finish(p)
}

/// Hamming distance of two `n`-bit words, `count_width(n)` output bits.
pub fn gen_hamming(n: usize) -> Circuit {
    let mut b = Builder::new(2 * n);
    let diff: Vec<WireId> = (0..n).map(|i| b.xor(b.input(i), b.input(n + i))).collect();
    let mut count = b.popcount(&diff);
    if count.is_empty() {
        let d = diff[0];
        count.push(b.xor(d, d));
    }
    b.finish(count)
}

/// Compare-exchange index pairs of Batcher's odd-even merge sort for `n` keys.
pub fn batcher_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    let mut p = 1;
    while p < n {
        let mut k = p;
        while k >= 1 {
            let mut j = k % p;
            while j + k < n {
                for i in 0..k.min(n - j - k) {
                    if (i + j) / (2 * p) == (i + j + k) / (2 * p) {
                        pairs.push((i + j, i + j + k));
                    }
                }
                j += 2 * k;
            }
            k /= 2;
        }
        p *= 2;
    }
    pairs
}

/// Sorting network over `count` words of `width` bits; outputs ascending.
pub fn gen_sorter(count: usize, width: usize) -> Circuit {
    let mut b = Builder::new(count * width);
    let mut items: Vec<Vec<WireId>> = (0..count).map(|e| b.input_word(e * width, width)).collect();
    for (i, j) in batcher_pairs(count) {
        let (lo, hi) = b.compare_exchange(&items[i], &items[j]);
        items[i] = lo;
        items[j] = hi;
    }
    b.finish(items.concat())
}

/// Product of two `dim x dim` matrices (row-major, `width`-bit entries).
/// Each entry is `2*width + ceil(log2 dim)` bits wide.
pub fn gen_matmul(dim: usize, width: usize) -> Circuit {
    let entries = dim * dim;
    let mut b = Builder::new(2 * entries * width);
    let a = |b: &Builder, i: usize, k: usize| b.input_word((i * dim + k) * width, width);
    let m = |b: &Builder, k: usize, j: usize| b.input_word((entries + k * dim + j) * width, width);
    let out_width = 2 * width + ceil_log2(dim);
    let mut outputs = Vec::with_capacity(entries * out_width);
    for i in 0..dim {
        for j in 0..dim {
            let mut terms: Vec<Vec<WireId>> = (0..dim)
                .map(|k| {
                    let (x, y) = (a(&b, i, k), m(&b, k, j));
                    b.multiply(&x, &y)
                })
                .collect();
            while terms.len() > 1 {
                let mut next = Vec::with_capacity(terms.len().div_ceil(2));
                let mut it = terms.chunks(2);
                for pair in &mut it {
                    match pair {
                        [x, y] => next.push(b.widening_add(x, y, out_width)),
                        [x] => next.push(x.clone()),
                        _ => unreachable!(),
                    }
                }
                terms = next;
            }
            outputs.extend(b.zero_extend(&terms[0], out_width));
        }
    }
    b.finish(outputs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gc::{cleartext_evaluate, Assignment};

    fn word_bits(value: u64, width: usize) -> impl Iterator<Item = bool> {
        (0..width).map(move |i| value >> i & 1 == 1)
    }

    fn run(c: &Circuit, bits: &[bool]) -> Vec<bool> {
        let asg: Assignment = c.inputs().iter().copied().zip(bits.iter().copied()).collect();
        let out = cleartext_evaluate(c, &asg).unwrap();
        c.outputs().iter().map(|w| out[w]).collect()
    }

    fn to_u64(bits: &[bool]) -> u64 {
        bits.iter().rev().fold(0, |acc, &b| acc << 1 | u64::from(b))
    }

    #[test]
    fn adder_shape_and_exhaustive() {
        let c = gen_adder(6);
        assert_eq!((c.and_count(), c.xor_count(), c.inputs().len(), c.outputs().len()), (6, 24, 12, 6));
        assert_eq!((gen_adder(1).and_count(), gen_adder(1).xor_count()), (1, 4));
        for x in 0..64u64 {
            for y in 0..64u64 {
                let bits: Vec<bool> = word_bits(x, 6).chain(word_bits(y, 6)).collect();
                assert_eq!(to_u64(&run(&c, &bits)), (x + y) % 64);
            }
        }
    }

    #[test]
    fn multiplier_and_counts() {
        for n in [2usize, 3, 8, 16, 32, 64] {
            let c = gen_multiplier(n);
            assert_eq!(c.and_count(), n * (2 * n - 1), "n={n}");
            assert_eq!((c.inputs().len(), c.outputs().len()), (2 * n, 2 * n));
        }
    }

    #[test]
    fn multiplier_exhaustive_4() {
        let c = gen_multiplier(4);
        for x in 0..16u64 {
            for y in 0..16u64 {
                let bits: Vec<bool> = word_bits(x, 4).chain(word_bits(y, 4)).collect();
                assert_eq!(to_u64(&run(&c, &bits)), x * y, "{x}*{y}");
            }
        }
    }

    fn popcount_ands(n: usize) -> usize {
        if n == 1 {
            return 0;
        }
        let (lo, hi) = (n / 2, n - n / 2);
        popcount_ands(lo) + popcount_ands(hi) + count_width(lo).max(count_width(hi))
    }

    #[test]
    fn hamming_counts_and_values() {
        for n in 1..=64 {
            let c = gen_hamming(n);
            assert_eq!(c.and_count(), popcount_ands(n), "n={n}");
            assert_eq!(c.outputs().len(), count_width(n));
        }
        assert_eq!([10, 30, 50].map(|n| gen_hamming(n).and_count()), [15, 54, 93]);

        let c = gen_hamming(10);
        let bits: Vec<bool> = word_bits(0b1111100000, 10).chain(word_bits(0b0000011111, 10)).collect();
        assert_eq!(to_u64(&run(&c, &bits)), 10);

        let c = gen_hamming(5);
        for x in 0..32u64 {
            for y in 0..32u64 {
                let bits: Vec<bool> = word_bits(x, 5).chain(word_bits(y, 5)).collect();
                assert_eq!(to_u64(&run(&c, &bits)), u64::from((x ^ y).count_ones()));
            }
        }
    }

    #[test]
    fn batcher_pairs_sort_all_binary_sequences() {
        // 0-1 principle
        for n in 2..=12 {
            let pairs = batcher_pairs(n);
            for v in 0..1u32 << n {
                let mut bits: Vec<u32> = (0..n).map(|i| v >> i & 1).collect();
                for &(i, j) in &pairs {
                    if bits[i] > bits[j] {
                        bits.swap(i, j);
                    }
                }
                assert!(bits.windows(2).all(|w| w[0] <= w[1]), "n={n} v={v:b}");
            }
        }
    }

    #[test]
    fn sorter_exhaustive_4x3() {
        let c = gen_sorter(4, 3);
        for v in 0..1u64 << 12 {
            let bits: Vec<bool> = word_bits(v, 12).collect();
            let out = run(&c, &bits);
            let got: Vec<u64> = out.chunks(3).map(to_u64).collect();
            let mut want: Vec<u64> = (0..4).map(|e| v >> (3 * e) & 7).collect();
            want.sort();
            assert_eq!(got, want);
        }
        let pair = gen_sorter(2, 1);
        for v in 0..4u64 {
            let out = run(&pair, &[v & 1 == 1, v & 2 == 2]);
            assert_eq!(out, vec![v == 3, v != 0]);
        }
    }

    #[test]
    fn matmul_dim_one_is_multiplier() {
        for w in 2..6 {
            assert_eq!(gen_matmul(1, w), gen_multiplier(w));
        }
    }

    #[test]
    fn matmul_small_exhaustive() {
        let (dim, w) = (2usize, 2usize);
        let c = gen_matmul(dim, w);
        assert_eq!(c.outputs().len(), 4 * 5);
        for v in 0..1u64 << 16 {
            let bits: Vec<bool> = word_bits(v, 16).collect();
            let entry = |k: usize| v >> (2 * k) & 3;
            let out = run(&c, &bits);
            for i in 0..2 {
                for j in 0..2 {
                    let want: u64 = (0..2).map(|k| entry(i * 2 + k) * entry(4 + k * 2 + j)).sum();
                    let cell = &out[(i * 2 + j) * 5..(i * 2 + j + 1) * 5];
                    assert_eq!(to_u64(cell), want);
                }
            }
        }
    }

    #[test]
    fn wire_ids_are_dense_and_generation_is_pure() {
        for spec in [ProblemSpec::adder(4), ProblemSpec::multiplier(3), ProblemSpec::sorter(3, 2), ProblemSpec::hamming(1)] {
            let c = spec.generate().unwrap();
            let max = c.max_wire_id().unwrap().0 as usize;
            assert_eq!(max + 1, c.slot_count(), "{spec}");
            assert_eq!(spec.generate().unwrap(), c);
        }
    }

    #[test]
    fn spec_validation() {
        assert!(ProblemSpec::adder(0).generate().is_err());
        assert!(ProblemSpec::multiplier(1).generate().is_err());
        assert!(ProblemSpec::sorter(1, 4).generate().is_err());
        assert!(ProblemSpec::matmul(0, 4).generate().is_err());
        assert!("bogus".parse::<ProblemKind>().is_err());
        assert_eq!("mult".parse::<ProblemKind>().unwrap(), ProblemKind::Multiplier);
        assert_eq!(ProblemSpec::matmul(5, 4).to_string(), "5x5 4-bit m_mult");
    }
}
