//! Fixed-length binary words.
//!
//! `BitVector` is the common currency for PUF responses, keys, and
//! challenges. Length is fixed at construction; bits are addressed
//! 0..len with bit 0 serialized as the most significant bit of the
//! first hex digit.

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    blocks: Vec<u64>,
    len: usize,
}

impl BitVector {
    /// All-zero vector of `len` bits.
    pub fn zeros(len: usize) -> Self {
        BitVector {
            blocks: vec![0u64; len.div_ceil(64)],
            len,
        }
    }

    /// Build from a predicate over bit indices.
    pub fn from_fn<F: FnMut(usize) -> bool>(len: usize, mut f: F) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            if f(i) {
                v.blocks[i / 64] |= 1u64 << (i % 64);
            }
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self::from_fn(bits.len(), |i| bits[i])
    }

    /// Concatenate several vectors into one pooled stream, in order.
    pub fn concat<'a, I: IntoIterator<Item = &'a BitVector>>(parts: I) -> Self {
        let parts: Vec<&BitVector> = parts.into_iter().collect();
        let total: usize = parts.iter().map(|p| p.len()).sum();
        let mut v = Self::zeros(total);
        let mut at = 0;
        for p in parts {
            for i in 0..p.len() {
                if p.get(i) {
                    v.set(at + i, true);
                }
            }
            at += p.len();
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range 0..{}", self.len);
        (self.blocks[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range 0..{}", self.len);
        if value {
            self.blocks[i / 64] |= 1u64 << (i % 64);
        } else {
            self.blocks[i / 64] &= !(1u64 << (i % 64));
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range 0..{}", self.len);
        self.blocks[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn count_ones(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn xor(&self, other: &BitVector) -> Result<BitVector> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(BitVector {
            blocks,
            len: self.len,
        })
    }

    pub fn and(&self, other: &BitVector) -> Result<BitVector> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a & b)
            .collect();
        Ok(BitVector {
            blocks,
            len: self.len,
        })
    }

    pub fn complement(&self) -> BitVector {
        let mut v = BitVector {
            blocks: self.blocks.iter().map(|b| !b).collect(),
            len: self.len,
        };
        v.mask_tail();
        v
    }

    /// Number of differing positions.
    pub fn hamming_distance(&self, other: &BitVector) -> Result<usize> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        Ok(self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    /// Hex encoding, most-significant-bit-first: bit 0 is the high bit of
    /// the first nibble. A length not divisible by 4 pads the last nibble
    /// with zero bits on the low side.
    pub fn to_hex(&self) -> String {
        let nibbles = self.len.div_ceil(4);
        let mut s = String::with_capacity(nibbles);
        for j in 0..nibbles {
            let mut val = 0u8;
            for t in 0..4 {
                let i = 4 * j + t;
                if i < self.len && self.get(i) {
                    val |= 1 << (3 - t);
                }
            }
            s.push(char::from_digit(val as u32, 16).unwrap());
        }
        s
    }

    /// Decode a most-significant-bit-first hex string into `len` bits.
    /// The string must have exactly `ceil(len/4)` digits and zero pad bits.
    pub fn from_hex(hex: &str, len: usize) -> Result<BitVector> {
        let expected = len.div_ceil(4);
        if hex.len() != expected {
            return Err(Error::BadHex(format!(
                "expected {expected} hex digits for {len} bits, got {}",
                hex.len()
            )));
        }
        let mut v = Self::zeros(len);
        for (j, c) in hex.chars().enumerate() {
            let val = c
                .to_digit(16)
                .ok_or_else(|| Error::BadHex(format!("non-hex digit '{c}'")))? as u8;
            for t in 0..4 {
                if (val >> (3 - t)) & 1 == 1 {
                    let i = 4 * j + t;
                    if i >= len {
                        return Err(Error::BadHex(
                            "nonzero pad bits past the declared length".into(),
                        ));
                    }
                    v.set(i, true);
                }
            }
        }
        Ok(v)
    }

    /// Bytes in serialization order (bit 0 = MSB of byte 0); length is
    /// padded to a whole number of bytes with zero bits.
    pub fn to_bytes(&self) -> Vec<u8> {
        let n = self.len.div_ceil(8);
        let mut out = vec![0u8; n];
        for i in 0..self.len {
            if self.get(i) {
                out[i / 8] |= 1 << (7 - (i % 8));
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<BitVector> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::BadHex(format!(
                "expected {} bytes for {len} bits, got {}",
                len.div_ceil(8),
                bytes.len()
            )));
        }
        Ok(Self::from_fn(len, |i| (bytes[i / 8] >> (7 - (i % 8))) & 1 == 1))
    }

    fn mask_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.blocks.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl std::fmt::Debug for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitVector[{}]({})", self.len, self.to_hex())
    }
}
