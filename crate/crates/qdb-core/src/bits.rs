//! Bit strings used for keys and nonces.

use crate::quantum::Bit;
use crate::rng::SplitRng;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// An ordered sequence of bits (index 0 is the most significant when packed).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString(Vec<Bit>);

impl BitString {
    pub fn new(bits: Vec<Bit>) -> Self {
        BitString(bits)
    }

    /// Uniformly random string. Consumes exactly `len` draws from `rng`.
    pub fn random(len: usize, rng: &mut SplitRng) -> Self {
        BitString((0..len).map(|_| Bit::from_bool(rng.next_bool())).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[Bit] {
        &self.0
    }

    pub fn get(&self, i: usize) -> Option<Bit> {
        self.0.get(i).copied()
    }

    /// Number of positions where the two strings differ.
    pub fn hamming_distance(&self, other: &BitString) -> usize {
        debug_assert_eq!(self.len(), other.len());
        self.0
            .iter()
            .zip(other.0.iter())
            .filter(|(a, b)| a != b)
            .count()
    }

    /// MSB-first packing into bytes; a trailing partial byte is zero-padded.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.0.len().div_ceil(8));
        for chunk in self.0.chunks(8) {
            let mut byte = 0u8;
            for (k, bit) in chunk.iter().enumerate() {
                byte |= bit.as_u8() << (7 - k);
            }
            out.push(byte);
        }
        out
    }

    /// Lowercase hex of the MSB-first packing.
    pub fn to_hex(&self) -> String {
        const HEX: &[u8; 16] = b"0123456789abcdef";
        let bytes = self.to_bytes();
        let mut s = String::with_capacity(bytes.len() * 2);
        for b in bytes {
            s.push(HEX[(b >> 4) as usize] as char);
            s.push(HEX[(b & 0xf) as usize] as char);
        }
        s
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bit in &self.0 {
            write!(f, "{bit}")?;
        }
        Ok(())
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}
