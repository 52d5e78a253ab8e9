//! Bit strings and the small integer helpers every stage shares.
//!
//! Positions are zero-based in storage. Documentation elsewhere in the crate
//! talks about one-based positions when it mirrors the construction; the
//! conversion is always `storage = position - 1`.

use std::fmt;
use std::ops::Range;

use crate::error::Error;

/// An immutable finite sequence of bits.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn zeros(len: usize) -> Self {
        Self { bits: vec![false; len] }
    }

    pub fn ones(len: usize) -> Self {
        Self { bits: vec![true; len] }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Parses a string of `'0'`/`'1'` characters. Whitespace and `_` are ignored.
    pub fn parse(s: &str) -> Result<Self, Error> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                '_' | ' ' | '\n' | '\t' => {}
                other => return Err(Error::Parse(format!("invalid bit character {other:?}"))),
            }
        }
        Ok(Self { bits })
    }

    /// Unpacks bytes MSB-first, keeping `bit_len` bits.
    pub fn from_bytes(bytes: &[u8], bit_len: usize) -> Result<Self, Error> {
        if bit_len > bytes.len() * 8 {
            return Err(Error::Parse(format!(
                "bit length {bit_len} exceeds {} available bits",
                bytes.len() * 8
            )));
        }
        let bits = (0..bit_len)
            .map(|i| bytes[i / 8] >> (7 - i % 8) & 1 == 1)
            .collect();
        Ok(Self { bits })
    }

    /// Packs MSB-first, zero-padding the final byte.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.bits.len().div_ceil(8)];
        for (i, &b) in self.bits.iter().enumerate() {
            if b {
                out[i / 8] |= 0x80 >> (i % 8);
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn into_vec(self) -> Vec<bool> {
        self.bits
    }

    pub fn slice(&self, range: Range<usize>) -> BitString {
        Self { bits: self.bits[range].to_vec() }
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut bits = Vec::with_capacity(self.len() + other.len());
        bits.extend_from_slice(&self.bits);
        bits.extend_from_slice(&other.bits);
        Self { bits }
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// True iff some `r` consecutive bits are all 1.
    pub fn has_run(&self, r: usize) -> bool {
        has_run(&self.bits, r)
    }

    /// Number of maximal runs of equal bits.
    pub fn run_count(&self) -> usize {
        if self.bits.is_empty() {
            return 0;
        }
        1 + self.bits.windows(2).filter(|w| w[0] != w[1]).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + Clone + '_ {
        self.bits.iter().copied()
    }
}

impl From<Vec<bool>> for BitString {
    fn from(bits: Vec<bool>) -> Self {
        Self { bits }
    }
}

impl From<&[bool]> for BitString {
    fn from(bits: &[bool]) -> Self {
        Self { bits: bits.to_vec() }
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self { bits: iter.into_iter().collect() }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

pub fn has_run(bits: &[bool], r: usize) -> bool {
    if r == 0 {
        return true;
    }
    let mut run = 0;
    for &b in bits {
        run = if b { run + 1 } else { 0 };
        if run >= r {
            return true;
        }
    }
    false
}

/// Varshamov–Tenengolts checksum `Σ i·a_i` with one-based `i`.
pub fn vt_checksum(a: &[u64]) -> u64 {
    a.iter()
        .enumerate()
        .map(|(i, &v)| (i as u64 + 1) * v)
        .sum()
}

/// `⌈log2 x⌉`, with `⌈log2 1⌉ = 0`. `x` must be positive.
pub fn ceil_log2(x: u64) -> u32 {
    assert!(x > 0, "ceil_log2 of zero");
    if x == 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// Number of bits needed to write values in `0..=max`.
pub fn bit_width(max: u64) -> u32 {
    64 - max.leading_zeros()
}

/// Appends `value` MSB-first in exactly `width` bits.
pub fn push_uint(out: &mut Vec<bool>, value: u64, width: u32) {
    debug_assert!(width == 64 || value >> width == 0, "{value} does not fit in {width} bits");
    for i in (0..width).rev() {
        out.push(value >> i & 1 == 1);
    }
}

/// Reads an MSB-first unsigned integer.
pub fn read_uint(bits: &[bool]) -> u64 {
    bits.iter().fold(0u64, |acc, &b| acc << 1 | b as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn vt_examples() {
        assert_eq!(vt_checksum(&[]), 0);
        assert_eq!(vt_checksum(&[3, 1, 2]), 11);
    }

    #[test]
    fn log_helpers() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(1 << 20), 20);
        assert_eq!(ceil_log2((1 << 20) + 1), 21);
        assert_eq!(bit_width(0), 0);
        assert_eq!(bit_width(4), 3);
    }

    #[test]
    fn runs() {
        let x = BitString::parse("0110111").unwrap();
        assert!(x.has_run(3));
        assert!(!x.has_run(4));
        assert_eq!(x.run_count(), 4);
    }

    #[test]
    fn uint_round_trip() {
        let mut v = Vec::new();
        push_uint(&mut v, 5, 4);
        assert_eq!(BitString::from(v.clone()).to_string(), "0101");
        assert_eq!(read_uint(&v), 5);
    }

    #[test]
    fn byte_packing() {
        let x = BitString::parse("101100111").unwrap();
        let bytes = x.to_bytes();
        assert_eq!(bytes, vec![0b1011_0011, 0b1000_0000]);
        assert_eq!(BitString::from_bytes(&bytes, 9).unwrap(), x);
        assert!(BitString::from_bytes(&bytes, 17).is_err());
    }

    proptest! {
        #[test]
        fn concat_prefix(x in proptest::collection::vec(any::<bool>(), 0..64),
                         y in proptest::collection::vec(any::<bool>(), 0..64)) {
            let x = BitString::from(x);
            let y = BitString::from(y);
            let xy = x.concat(&y);
            prop_assert_eq!(xy.len(), x.len() + y.len());
            prop_assert_eq!(xy.slice(0..x.len()), x.clone());
            prop_assert_eq!(xy.slice(x.len()..xy.len()), y);
        }

        #[test]
        fn vt_is_linear(pairs in proptest::collection::vec((0u64..1000, 0u64..1000), 0..40)) {
            let a: Vec<u64> = pairs.iter().map(|p| p.0).collect();
            let b: Vec<u64> = pairs.iter().map(|p| p.1).collect();
            let sum: Vec<u64> = pairs.iter().map(|p| p.0 + p.1).collect();
            prop_assert_eq!(vt_checksum(&sum), vt_checksum(&a) + vt_checksum(&b));
        }
    }
}
