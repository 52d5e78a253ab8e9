//! Per-block sketches for the corrector.

use crate::bits::{bit_width, push_uint, read_uint};
use crate::error::{Error, Result};

/// A hash of one corrector block, split into fixed-width integer fields.
///
/// Sketches are additive: field `j` of a block is the sum, modulo
/// `moduli()[j]`, of a weight for every set bit, and the weight depends only
/// on the bit's one-based position in the block. Blocks shorter than the
/// block length are treated as zero-padded.
pub trait InnerSketch: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &str;

    fn block_len(&self) -> usize;

    fn moduli(&self) -> &[u64];

    fn field_widths(&self) -> &[u32];

    /// Field `j` of the weight of a set bit at block position `pos`.
    fn weight(&self, pos: usize, j: usize) -> u64;

    /// Adds the weight of a set bit at block position `pos` into `acc`.
    fn add_weight(&self, pos: usize, acc: &mut [u64]) {
        for (j, (a, &q)) in acc.iter_mut().zip(self.moduli()).enumerate() {
            *a = add_mod(*a, self.weight(pos, j), q);
        }
    }

    fn field_count(&self) -> usize {
        self.moduli().len()
    }

    fn sketch_len(&self) -> usize {
        self.field_widths().iter().map(|&w| w as usize).sum()
    }

    /// Writes the fields of `block` into `out`, which has `field_count()` slots.
    fn fields_into(&self, block: &[bool], out: &mut [u64]) {
        debug_assert!(block.len() <= self.block_len());
        out.fill(0);
        for (i, _) in block.iter().enumerate().filter(|(_, &b)| b) {
            self.add_weight(i + 1, out);
        }
    }

    fn fields(&self, block: &[bool]) -> Vec<u64> {
        let mut out = vec![0; self.field_count()];
        self.fields_into(block, &mut out);
        out
    }

    fn to_bits(&self, fields: &[u64], out: &mut Vec<bool>) {
        for (&v, &w) in fields.iter().zip(self.field_widths()) {
            push_uint(out, v, w);
        }
    }

    fn from_bits(&self, bits: &[bool]) -> Result<Vec<u64>> {
        if bits.len() != self.sketch_len() {
            return Err(Error::InvalidInput("sketch has the wrong length".into()));
        }
        let mut pos = 0;
        let fields: Vec<u64> = self
            .field_widths()
            .iter()
            .map(|&w| {
                let v = read_uint(&bits[pos..pos + w as usize]);
                pos += w as usize;
                v
            })
            .collect();
        if fields.iter().zip(self.moduli()).any(|(&v, &q)| v >= q) {
            return Err(Error::Inconsistent("sketch field out of range".into()));
        }
        Ok(fields)
    }
}

/// `(a + b) mod q` for `a, b < q`.
#[inline]
pub fn add_mod(a: u64, b: u64, q: u64) -> u64 {
    let s = a + b;
    if s >= q {
        s - q
    } else {
        s
    }
}

/// `acc += other` field-wise modulo `moduli`.
pub fn add_into(acc: &mut [u64], other: &[u64], moduli: &[u64]) {
    for ((a, &b), &q) in acc.iter_mut().zip(other).zip(moduli) {
        *a += b;
        if *a >= q {
            *a -= q;
        }
    }
}

/// `acc -= other` field-wise modulo `moduli`.
pub fn sub_into(acc: &mut [u64], other: &[u64], moduli: &[u64]) {
    for ((a, &b), &q) in acc.iter_mut().zip(other).zip(moduli) {
        *a = if *a >= b { *a - b } else { *a + q - b };
    }
}

pub fn xor_into(acc: &mut [u64], other: &[u64]) {
    for (a, b) in acc.iter_mut().zip(other) {
        *a ^= b;
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

pub fn next_prime_above(x: u64) -> u64 {
    let mut c = x + 1;
    while !is_prime(c) {
        c += 1;
    }
    c
}

const POWER_TABLE_LIMIT: usize = 1 << 23;

/// Power-sum syndromes `σ_j = Σ i^j b_i mod q_j` over one-based positions,
/// `j = 0..J`, with `q_j` the smallest prime above `min(M^(j+1), 2^61)`.
#[derive(Debug, Clone)]
pub struct PowerSumSketch {
    block_len: usize,
    moduli: Vec<u64>,
    widths: Vec<u32>,
    /// `table[(i-1) * J + j] = i^j mod q_j` for the first positions.
    table: Vec<u64>,
}

impl PowerSumSketch {
    pub const NAME: &'static str = "power-sum";

    pub fn new(block_len: usize, syndromes: usize) -> Self {
        Self::with_reach(block_len, syndromes, block_len)
    }

    /// Like [`PowerSumSketch::new`], tabulating weights only for positions up
    /// to `reach`; later positions are computed on demand.
    pub fn with_reach(block_len: usize, syndromes: usize, reach: usize) -> Self {
        let cap = 1u128 << 61;
        let moduli: Vec<u64> = (0..syndromes)
            .map(|j| {
                let bound = (block_len as u128).checked_pow(j as u32 + 1).map_or(cap, |v| v.min(cap));
                next_prime_above(bound as u64)
            })
            .collect();
        let widths = moduli.iter().map(|&q| bit_width(q - 1)).collect();
        let rows = reach.min(block_len).min(POWER_TABLE_LIMIT / syndromes.max(1));
        let mut table = vec![0; rows * syndromes];
        for (i, row) in table.chunks_mut(syndromes.max(1)).enumerate() {
            direct_weight(&moduli, i as u64 + 1, row);
        }
        Self {
            block_len,
            moduli,
            widths,
            table,
        }
    }
}

fn direct_weight(moduli: &[u64], pos: u64, out: &mut [u64]) {
    for (j, (o, &q)) in out.iter_mut().zip(moduli).enumerate() {
        let p = pos % q;
        let mut w = 1 % q;
        for _ in 0..j {
            w = mul_mod(w, p, q);
        }
        *o = w;
    }
}

impl InnerSketch for PowerSumSketch {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn block_len(&self) -> usize {
        self.block_len
    }

    fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    fn field_widths(&self) -> &[u32] {
        &self.widths
    }

    fn weight(&self, pos: usize, j: usize) -> u64 {
        let row = (pos - 1) * self.moduli.len();
        match self.table.get(row + j) {
            Some(&w) => w,
            None => pow_mod(pos as u64, j as u64, self.moduli[j]),
        }
    }

    fn add_weight(&self, pos: usize, acc: &mut [u64]) {
        let j = self.moduli.len();
        let start = (pos - 1) * j;
        if start < self.table.len() {
            add_into(acc, &self.table[start..start + j], &self.moduli);
        } else {
            let mut w = [0u64; 64];
            direct_weight(&self.moduli, pos as u64, &mut w[..j]);
            add_into(acc, &w[..j], &self.moduli);
        }
    }
}

/// Looks up a sketch implementation by its registered name.
///
/// `reach` bounds the block positions that will be queried often.
pub fn by_name(name: &str, block_len: usize, syndromes: usize, reach: usize) -> Result<Box<dyn InnerSketch>> {
    match name {
        PowerSumSketch::NAME => Ok(Box::new(PowerSumSketch::with_reach(block_len, syndromes, reach))),
        other => Err(Error::InvalidInput(format!("unknown sketch {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_prime((1u64 << 61) - 1));
        assert!(!is_prime(3_215_031_751));
        assert_eq!(next_prime_above(4), 5);
        assert_eq!(next_prime_above(16), 17);
        assert_eq!(next_prime_above(64), 67);
    }

    #[test]
    fn moduli_rule() {
        let s = PowerSumSketch::new(4, 5);
        assert_eq!(s.moduli(), &[5, 17, 67, 257, 1031]);
        assert_eq!(s.field_widths(), &[3, 5, 7, 9, 11]);
        assert_eq!(s.sketch_len(), 35);
    }

    #[test]
    fn zero_and_single_bit() {
        let s = PowerSumSketch::new(64, 5);
        assert!(s.fields(&[false; 64]).iter().all(|&v| v == 0));
        let mut b = [false; 64];
        b[6] = true;
        let f = s.fields(&b);
        assert_eq!(f[1], 7 % s.moduli()[1]);
        assert_eq!(f[2], 49);
    }

    #[test]
    fn table_and_direct_paths_agree() {
        let a = PowerSumSketch::new(40, 5);
        let b = PowerSumSketch::with_reach(40, 5, 3);
        for v in [0u64, 1, 0xdead_beef, u64::MAX >> 24] {
            let blk: Vec<bool> = (0..40).map(|i| v >> i & 1 == 1).collect();
            assert_eq!(a.fields(&blk), b.fields(&blk));
        }
    }

    #[test]
    fn injective_when_block_is_short() {
        // M < 2J: distinct blocks have distinct sketches
        for (m, j) in [(4usize, 5usize), (6, 7), (8, 5), (12, 7)] {
            let s = PowerSumSketch::new(m, j);
            let mut seen = std::collections::HashMap::new();
            for v in 0u32..1 << m {
                let blk: Vec<bool> = (0..m).map(|i| v >> i & 1 == 1).collect();
                assert!(seen.insert(s.fields(&blk), v).is_none(), "M={m} J={j}");
            }
        }
    }

    #[test]
    fn bits_round_trip() {
        let s = PowerSumSketch::new(6, 3);
        let f = s.fields(&[true, false, true, true, false, true]);
        let mut bits = Vec::new();
        s.to_bits(&f, &mut bits);
        assert_eq!(bits.len(), s.sketch_len());
        assert_eq!(s.from_bits(&bits).unwrap(), f);
        let ones = vec![true; s.sketch_len()];
        assert!(s.from_bits(&ones).is_err());
    }

    #[test]
    fn large_blocks_cap_the_moduli() {
        let s = PowerSumSketch::new(800_000, 5);
        assert!(s.moduli()[3] > 1 << 61);
        assert_eq!(s.field_widths()[3], 62);
        let mut a = vec![0; 5];
        s.add_weight(799_999, &mut a);
        assert_eq!(a[1], 799_999);
        assert_eq!(a[2], 799_999u64 * 799_999 % s.moduli()[2]);
    }
}
