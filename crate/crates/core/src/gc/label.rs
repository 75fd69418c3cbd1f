use std::fmt;
use std::ops::{BitXor, BitXorAssign};

use rand::RngCore;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Width of a wire label in bits.
pub const LABEL_BITS: u32 = 80;
/// Width of a serialized wire label in bytes.
pub const LABEL_BYTES: usize = 10;

const LABEL_MASK: u128 = (1u128 << LABEL_BITS) - 1;

/// An 80-bit garbled value carried on a wire.
///
/// The least significant bit is the point-and-permute select bit. Labels
/// serialize as 10 bytes, most significant byte first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct WireLabel(u128);

impl WireLabel {
    pub const ZERO: WireLabel = WireLabel(0);

    /// Builds a label from the low 80 bits of `value`; higher bits are dropped.
    pub const fn from_u128(value: u128) -> Self {
        WireLabel(value & LABEL_MASK)
    }

    pub const fn to_u128(self) -> u128 {
        self.0
    }

    pub fn from_bytes(bytes: [u8; LABEL_BYTES]) -> Self {
        let mut wide = [0u8; 16];
        wide[16 - LABEL_BYTES..].copy_from_slice(&bytes);
        WireLabel(u128::from_be_bytes(wide))
    }

    pub fn to_bytes(self) -> [u8; LABEL_BYTES] {
        let wide = self.0.to_be_bytes();
        let mut out = [0u8; LABEL_BYTES];
        out.copy_from_slice(&wide[16 - LABEL_BYTES..]);
        out
    }

    pub fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let mut bytes = [0u8; LABEL_BYTES];
        rng.fill_bytes(&mut bytes);
        WireLabel::from_bytes(bytes)
    }

    /// Point-and-permute select bit.
    pub const fn select_bit(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn to_hex(self) -> String {
        hex::encode(self.to_bytes())
    }

    pub fn from_hex(s: &str) -> Result<Self, hex::FromHexError> {
        let mut bytes = [0u8; LABEL_BYTES];
        hex::decode_to_slice(s, &mut bytes)?;
        Ok(WireLabel::from_bytes(bytes))
    }
}

impl BitXor for WireLabel {
    type Output = WireLabel;

    fn bitxor(self, rhs: WireLabel) -> WireLabel {
        WireLabel(self.0 ^ rhs.0)
    }
}

impl BitXorAssign for WireLabel {
    fn bitxor_assign(&mut self, rhs: WireLabel) {
        self.0 ^= rhs.0;
    }
}

impl fmt::Debug for WireLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WireLabel({})", self.to_hex())
    }
}

impl fmt::Display for WireLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for WireLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for WireLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        WireLabel::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

/// Session-wide free-XOR offset `R`: for every wire, `label1 = label0 ^ R`.
///
/// The select bit of `R` is always set, so the two labels of a wire carry
/// opposite select bits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "WireLabel", into = "WireLabel")]
pub struct GlobalDelta(WireLabel);

impl GlobalDelta {
    /// Draws 80 random bits and forces the select bit to 1.
    pub fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let raw = WireLabel::random(rng);
        GlobalDelta(WireLabel::from_u128(raw.to_u128() | 1))
    }

    /// Returns `None` when the select bit of `label` is clear.
    pub fn new(label: WireLabel) -> Option<Self> {
        label.select_bit().then_some(GlobalDelta(label))
    }

    pub fn label(self) -> WireLabel {
        self.0
    }
}

impl TryFrom<WireLabel> for GlobalDelta {
    type Error = &'static str;

    fn try_from(label: WireLabel) -> Result<Self, Self::Error> {
        GlobalDelta::new(label).ok_or("global delta must have its least significant bit set")
    }
}

impl From<GlobalDelta> for WireLabel {
    fn from(delta: GlobalDelta) -> WireLabel {
        delta.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::collections::HashSet;

    #[test]
    fn bytes_are_big_endian() {
        let label = WireLabel::from_u128(0x0102_0304_0506_0708_090a);
        assert_eq!(label.to_bytes(), [1, 2, 3, 4, 5, 6, 7, 8, 9, 10]);
        assert_eq!(WireLabel::from_bytes(label.to_bytes()), label);
        assert_eq!(label.to_hex(), "0102030405060708090a");
    }

    #[test]
    fn from_u128_truncates_to_80_bits() {
        let label = WireLabel::from_u128(u128::MAX);
        assert_eq!(label.to_u128(), (1u128 << 80) - 1);
    }

    #[test]
    fn xor_is_self_inverse() {
        let x = WireLabel::from_u128(0xdead_beef_cafe_f00d_1234);
        assert_eq!(x ^ x, WireLabel::ZERO);
        assert_eq!(x ^ WireLabel::ZERO, x);
    }

    #[test]
    fn delta_has_select_bit() {
        for seed in 0..64u64 {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            assert!(GlobalDelta::random(&mut rng).label().select_bit());
        }
        assert!(GlobalDelta::new(WireLabel::from_u128(2)).is_none());
    }

    #[test]
    fn delta_is_deterministic_per_seed() {
        let a = GlobalDelta::random(&mut ChaCha20Rng::seed_from_u64(42));
        let b = GlobalDelta::random(&mut ChaCha20Rng::seed_from_u64(42));
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_seeds_give_distinct_deltas() {
        let deltas: HashSet<_> = (0..1000u64)
            .map(|seed| GlobalDelta::random(&mut ChaCha20Rng::seed_from_u64(seed)))
            .collect();
        assert!(deltas.len() >= 999);
    }

    #[test]
    fn json_uses_hex() {
        let label = WireLabel::from_u128(0xabc);
        let json = serde_json::to_string(&label).unwrap();
        assert_eq!(json, "\"00000000000000000abc\"");
        let back: WireLabel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, label);
        assert!(serde_json::from_str::<GlobalDelta>("\"00000000000000000abc\"").is_err());
    }
}
