//! Joint packing of the excised blocks of a marker-sparse window.
//!
//! Each excised block has a marker starting in its first `k` positions. The
//! blocks are ranked among all such length-`m` strings, combined mixed-radix
//! into one integer `V`, and written as a marker-free `(m-1)`-string carrying
//! `V mod F` followed by `V div F` in plain binary, where `F` counts the
//! marker-free strings of length `m-1`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Counting tables for strings of one fixed length under the run constraint.
#[derive(Debug, Clone)]
pub struct RunRanker {
    len: usize,
    ell: usize,
    /// `free[r]`: strings of length `r` whose prefix run starts at zero and
    /// never reaches `ell`.
    free: Vec<u128>,
}

impl RunRanker {
    pub fn new(len: usize, ell: usize) -> Option<Self> {
        if len > 126 || ell == 0 {
            return None;
        }
        // free[r][s] for run state s; only state 0 is needed after a zero,
        // but the recurrence needs every state.
        let mut table = vec![vec![0u128; ell]; len + 1];
        for s in 0..ell {
            table[0][s] = 1;
        }
        for r in 1..=len {
            for s in 0..ell {
                let zero = table[r - 1][0];
                let one = if s + 1 < ell { table[r - 1][s + 1] } else { 0 };
                table[r][s] = zero + one;
            }
        }
        Some(Self {
            len,
            ell,
            free: table.iter().map(|row| row[0]).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of marker-free strings of the ranker's length.
    pub fn free_count(&self) -> u128 {
        self.free[self.len]
    }

    /// Number of strings of the ranker's length that contain a marker.
    pub fn marked_count(&self) -> u128 {
        (1u128 << self.len) - self.free_count()
    }

    /// Lexicographic rank among marker-free strings.
    pub fn rank_free(&self, s: &[bool]) -> u128 {
        debug_assert_eq!(s.len(), self.len);
        s.iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| self.free[self.len - 1 - i])
            .sum()
    }

    pub fn unrank_free(&self, mut r: u128, out: &mut Vec<bool>) {
        debug_assert!(r < self.free_count());
        for i in 0..self.len {
            let zeros = self.free[self.len - 1 - i];
            if r < zeros {
                out.push(false);
            } else {
                r -= zeros;
                out.push(true);
            }
        }
    }

    /// Lexicographic rank among strings that contain a marker.
    pub fn rank_marked(&self, s: &[bool]) -> u128 {
        debug_assert_eq!(s.len(), self.len);
        let mut rank = 0u128;
        let mut run = 0usize;
        let mut seen = false;
        for (i, &b) in s.iter().enumerate() {
            let rem = self.len - 1 - i;
            if b {
                rank += if seen { 1u128 << rem } else { (1u128 << rem) - self.free[rem] };
                run += 1;
                if run >= self.ell {
                    seen = true;
                }
            } else {
                run = 0;
            }
        }
        rank
    }

    pub fn unrank_marked(&self, mut r: u128, out: &mut Vec<bool>) {
        debug_assert!(r < self.marked_count());
        let mut run = 0usize;
        let mut seen = false;
        for i in 0..self.len {
            let rem = self.len - 1 - i;
            let zeros = if seen { 1u128 << rem } else { (1u128 << rem) - self.free[rem] };
            if r < zeros {
                out.push(false);
                run = 0;
            } else {
                r -= zeros;
                out.push(true);
                run += 1;
                if run >= self.ell {
                    seen = true;
                }
            }
        }
    }
}

/// Packs `q-2` blocks of `m` bits into `packed_len` bits.
#[derive(Debug, Clone)]
pub struct Packer {
    m: usize,
    blocks: usize,
    packed_len: usize,
    ranker: RunRanker,
    radix: BigUint,
    free: BigUint,
}

impl Packer {
    pub fn new(k: usize, ell: usize, blocks: usize, packed_len: usize) -> Option<Self> {
        let m = k + ell;
        let ranker = RunRanker::new(m - 1, ell)?;
        if packed_len < m - 1 {
            return None;
        }
        let radix = BigUint::from(2 * ranker.marked_count());
        let free = BigUint::from(ranker.free_count());
        Some(Self {
            m,
            blocks,
            packed_len,
            ranker,
            radix,
            free,
        })
    }

    /// The packed form of `blocks·m` input bits, whose first `m-1` bits hold no marker.
    pub fn pack(&self, bits: &[bool], out: &mut Vec<bool>) -> Result<()> {
        if bits.len() != self.blocks * self.m {
            return Err(Error::InvalidInput(format!(
                "packer expects {} bits, got {}",
                self.blocks * self.m,
                bits.len()
            )));
        }
        let mut v = BigUint::zero();
        for block in bits.chunks(self.m) {
            let prefix = &block[..self.m - 1];
            if !crate::bits::has_run(prefix, self.ranker.ell) {
                return Err(Error::InvalidInput("excised block has no marker in its first k positions".into()));
            }
            let r = 2 * self.ranker.rank_marked(prefix) + block[self.m - 1] as u128;
            v = v * &self.radix + BigUint::from(r);
        }
        let (hi, lo) = v.div_rem(&self.free);
        self.ranker.unrank_free(lo.to_u128().expect("remainder below u128 modulus"), out);
        let width = self.packed_len - (self.m - 1);
        if hi.bits() > width as u64 {
            return Err(Error::InvalidInput("packer capacity exceeded".into()));
        }
        for i in (0..width as u64).rev() {
            out.push(hi.bit(i));
        }
        Ok(())
    }

    pub fn unpack(&self, bits: &[bool], out: &mut Vec<bool>) -> Result<()> {
        if bits.len() != self.packed_len {
            return Err(Error::MalformedTrailer("packed payload has the wrong length".into()));
        }
        let head = &bits[..self.m - 1];
        if crate::bits::has_run(head, self.ranker.ell) {
            return Err(Error::MalformedTrailer("packed head contains a marker".into()));
        }
        let lo = BigUint::from(self.ranker.rank_free(head));
        let mut hi = BigUint::zero();
        for &b in &bits[self.m - 1..] {
            hi <<= 1u32;
            if b {
                hi += 1u32;
            }
        }
        let mut v = hi * &self.free + lo;
        let mut ranks = vec![0u128; self.blocks];
        for slot in ranks.iter_mut().rev() {
            let (q, r) = v.div_rem(&self.radix);
            *slot = r.to_u128().expect("digit below radix");
            v = q;
        }
        if !v.is_zero() {
            return Err(Error::MalformedTrailer("packed value out of range".into()));
        }
        for r in ranks {
            self.ranker.unrank_marked(r >> 1, out);
            out.push(r & 1 == 1);
        }
        Ok(())
    }
}

/// Whether `q-2` blocks fit into a record of `(q-2)·m` bits.
pub fn capacity_ok(k: usize, ell: usize, idx_bits: usize, q: usize) -> bool {
    let m = k + ell;
    if q < 3 {
        return false;
    }
    let record = (q - 2) * m;
    let Some(packed) = record.checked_sub(idx_bits + ell + 2) else {
        return false;
    };
    if packed < m - 1 {
        return false;
    }
    let Some(ranker) = RunRanker::new(m - 1, ell) else {
        return false;
    };
    let radix = BigUint::from(2 * ranker.marked_count());
    let need = radix.pow((q - 2) as u32);
    let have = BigUint::from(ranker.free_count()) << (packed - (m - 1));
    need <= have
}
