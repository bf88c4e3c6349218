//! Fixed-length bit strings used for BBF inputs, messages and ciphertext randomness.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct BitString(Vec<bool>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid bit character {0:?}")]
pub struct BitParseError(pub char);

impl BitString {
    pub fn new() -> Self {
        BitString(Vec::new())
    }

    pub fn zeros(len: usize) -> Self {
        BitString(vec![false; len])
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        BitString(bits.into_iter().collect())
    }

    pub fn single(bit: bool) -> Self {
        BitString(vec![bit])
    }

    /// Draws `len` uniform bits, 64 at a time, least significant bit first.
    pub fn random<R: RngCore + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut bits = Vec::with_capacity(len);
        while bits.len() < len {
            let word = rng.next_u64();
            let take = (len - bits.len()).min(64);
            bits.extend((0..take).map(|i| (word >> i) & 1 == 1));
        }
        BitString(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn first(&self) -> Option<bool> {
        self.0.first().copied()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }

    pub fn slice(&self, start: usize, end: usize) -> BitString {
        BitString(self.0[start..end].to_vec())
    }

    /// The string without its first bit.
    pub fn tail(&self) -> BitString {
        BitString(self.0.get(1..).unwrap_or(&[]).to_vec())
    }

    pub fn prepend(&self, bit: bool) -> BitString {
        let mut v = Vec::with_capacity(self.len() + 1);
        v.push(bit);
        v.extend_from_slice(&self.0);
        BitString(v)
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        BitString(v)
    }

    /// Packs bit `i` into byte `i / 8` at position `i % 8`.
    pub fn to_packed(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len().div_ceil(8)];
        for (i, b) in self.0.iter().enumerate() {
            if *b {
                out[i / 8] |= 1 << (i % 8);
            }
        }
        out
    }

    /// Inverse of [`BitString::to_packed`]. Padding bits in the last byte are ignored.
    pub fn from_packed(bytes: &[u8], len: usize) -> Option<BitString> {
        if bytes.len() != len.div_ceil(8) {
            return None;
        }
        Some(BitString((0..len).map(|i| bytes[i / 8] >> (i % 8) & 1 == 1).collect()))
    }

    /// Integer value with bit 0 as the least significant bit. Only meaningful for len <= 64.
    pub fn to_u64(&self) -> u64 {
        self.0.iter().enumerate().fold(0u64, |acc, (i, b)| acc | (u64::from(*b) << i))
    }

    pub fn from_u64(value: u64, len: usize) -> BitString {
        BitString((0..len).map(|i| i < 64 && (value >> i) & 1 == 1).collect())
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = BitParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(BitParseError(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitString)
    }
}

impl From<Vec<bool>> for BitString {
    fn from(v: Vec<bool>) -> Self {
        BitString(v)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parse_and_display_round_trip() {
        let b: BitString = "0110".parse().unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(b.to_string(), "0110");
        assert!("01x".parse::<BitString>().is_err());
    }

    #[test]
    fn packing_is_little_endian_per_byte() {
        let b: BitString = "100000001".parse().unwrap();
        assert_eq!(b.to_packed(), vec![0x01, 0x01]);
        assert_eq!(BitString::from_packed(&[0x01, 0x01], 9).unwrap(), b);
        assert!(BitString::from_packed(&[0x01], 9).is_none());
    }

    #[test]
    fn random_is_seed_deterministic() {
        let a = BitString::random(130, &mut ChaCha8Rng::seed_from_u64(3));
        let b = BitString::random(130, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
        assert_eq!(a.len(), 130);
    }

    #[test]
    fn prepend_and_tail_invert() {
        let b: BitString = "101".parse().unwrap();
        assert_eq!(b.prepend(false).to_string(), "0101");
        assert_eq!(b.prepend(true).tail(), b);
        assert_eq!(BitString::from_u64(5, 4).to_string(), "1010");
        assert_eq!(BitString::from_u64(5, 4).to_u64(), 5);
    }
}
