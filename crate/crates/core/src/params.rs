//! Code parameters: the paper-default derivation, the scaled builder used
//! for desk-scale testing, and named validation.

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::bits::ceil_log2;
use crate::dense::packer;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamMode {
    Paper,
    Scaled,
}

/// How the dense encoder packs the excised blocks of a marker-sparse window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockPacking {
    /// Each block goes through the marker-deleting map and loses one bit.
    Intermediate,
    /// The blocks are ranked jointly and written as one integer.
    Counting,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CodeParameters {
    pub mode: ParamMode,
    pub k: usize,
    pub n: usize,
    /// Marker length: the marker is `1^ell`.
    pub ell: usize,
    /// Pattern length `k + ell`.
    pub m: usize,
    /// Width of stored indices, `⌈log n⌉`.
    pub idx_bits: usize,
    /// Marker-rich window `B`.
    pub b: usize,
    /// Blocks per marker-sparse window, so `R = q·m`.
    pub q: usize,
    /// Marker-sparse window `R`.
    pub r: usize,
    pub delta: usize,
    /// Corrector block length `M`.
    pub block_len: usize,
    pub phi_len: usize,
    /// Number of power-sum syndromes in the inner sketch.
    pub syndromes: usize,
}

/// Optional fields of a scaled parameter file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaledOverrides {
    pub ell: Option<usize>,
    pub blocks: Option<usize>,
    pub b: Option<usize>,
    pub block_len: Option<usize>,
    pub syndromes: Option<usize>,
}

impl ScaledOverrides {
    pub fn from_toml(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

fn phi_len_for(b: usize, idx_bits: usize, ell: usize) -> Option<usize> {
    b.checked_sub(idx_bits + 2 * ell + 2)
}

fn phi_capacity_ok(b: usize, ell: usize, phi_len: usize) -> bool {
    if b % ell != 0 || ell >= 32 {
        return false;
    }
    let digits = BigUint::from((1u64 << ell) - 1).pow((b / ell) as u32);
    digits <= BigUint::one() << phi_len
}

/// `108Δ² + 3Δ`, capped at the dense length: one block longer than the
/// string behaves like a block of exactly its length.
fn default_block_len(delta: usize, dense_len: usize) -> usize {
    let d = delta as u128;
    (108 * d * d + 3 * d).min(dense_len as u128) as usize
}

impl CodeParameters {
    /// Paper-default derivation from `(k, n)`.
    pub fn paper(k: usize, n: usize) -> Result<Self> {
        if k < 2 || n < 2 {
            return Err(Error::Parameters(vec![format!(
                "paper defaults need k ≥ 2 and n ≥ 2 (got k={k}, n={n})"
            )]));
        }
        let p = Self::paper_unchecked(k, n)?;
        let v = p.violations();
        if v.is_empty() {
            Ok(p)
        } else {
            Err(Error::Parameters(v))
        }
    }

    /// Paper-default derivation without validation.
    pub fn paper_unchecked(k: usize, n: usize) -> Result<Self> {
        let ell = ceil_log2(k.max(1) as u64) as usize + 4;
        let m = k + ell;
        let idx_bits = ceil_log2(n.max(2) as u64) as usize;
        let b = ell
            .checked_mul(1usize << (ell + 4))
            .and_then(|x| x.checked_mul(idx_bits))
            .ok_or_else(|| Error::Parameters(vec!["B overflows".into()]))?;
        let q = idx_bits + ell + 4;
        let r = m * q;
        let delta = r + b - m;
        let block_len = delta
            .checked_mul(delta)
            .and_then(|d2| d2.checked_mul(108))
            .and_then(|x| x.checked_add(3 * delta))
            .ok_or_else(|| Error::Parameters(vec!["M overflows".into()]))?;
        Ok(Self {
            mode: ParamMode::Paper,
            k,
            n,
            ell,
            m,
            idx_bits,
            b,
            q,
            r,
            delta,
            block_len,
            phi_len: phi_len_for(b, idx_bits, ell).unwrap_or(0),
            syndromes: 2 * k + 1,
        })
    }

    /// Scaled parameters: marker length `ell` chosen freely, `q` and `B`
    /// the smallest values that satisfy every capacity constraint.
    pub fn scaled(k: usize, n: usize, ell: usize) -> Result<Self> {
        Self::scaled_with(
            k,
            n,
            &ScaledOverrides {
                ell: Some(ell),
                ..Default::default()
            },
        )
    }

    pub fn scaled_with(k: usize, n: usize, o: &ScaledOverrides) -> Result<Self> {
        if k == 0 || n < 2 {
            return Err(Error::Parameters(vec![format!(
                "scaled parameters need k ≥ 1 and n ≥ 2 (got k={k}, n={n})"
            )]));
        }
        if k > 32 {
            return Err(Error::Parameters(vec!["k ≤ 32 violated".into()]));
        }
        let ell = o.ell.unwrap_or(2);
        if ell < 2 {
            return Err(Error::Parameters(vec!["ℓ ≥ 2 violated".into()]));
        }
        let m = k + ell;
        let idx_bits = ceil_log2(n as u64) as usize;
        let q = match o.blocks {
            Some(q) => q,
            None => (4..=4096)
                .find(|&q| packer::capacity_ok(k, ell, idx_bits, q))
                .ok_or_else(|| Error::Parameters(vec!["no block count satisfies packing capacity".into()]))?,
        };
        let r = m * q;
        let b = match o.b {
            Some(b) => b,
            None => {
                let lower = r.max((r + ell).saturating_sub(2 * m));
                let mut b = lower.div_ceil(ell) * ell;
                loop {
                    if let Some(pl) = phi_len_for(b, idx_bits, ell) {
                        if phi_capacity_ok(b, ell, pl) {
                            break b;
                        }
                    }
                    b += ell;
                }
            }
        };
        let delta = (r + b).saturating_sub(m);
        let p = Self {
            mode: ParamMode::Scaled,
            k,
            n,
            ell,
            m,
            idx_bits,
            b,
            q,
            r,
            delta,
            block_len: o.block_len.unwrap_or_else(|| default_block_len(delta, n + 2 * ell + m)),
            phi_len: phi_len_for(b, idx_bits, ell).unwrap_or(0),
            syndromes: o.syndromes.unwrap_or(2 * k + 1),
        };
        let v = p.violations();
        if v.is_empty() {
            Ok(p)
        } else {
            Err(Error::Parameters(v))
        }
    }

    /// The same scaled family re-derived for another message length.
    pub fn rescaled(&self, n: usize) -> Result<Self> {
        match self.mode {
            ParamMode::Paper => Self::paper(self.k, n),
            ParamMode::Scaled => Self::scaled_with(
                self.k,
                n,
                &ScaledOverrides {
                    ell: Some(self.ell),
                    block_len: (self.block_len != default_block_len(self.delta, self.dense_len())).then_some(self.block_len),
                    syndromes: Some(self.syndromes),
                    ..Default::default()
                },
            ),
        }
    }

    pub fn strict(&self) -> bool {
        self.mode == ParamMode::Paper
    }

    pub fn packing(&self) -> BlockPacking {
        if self.ell == ceil_log2(self.k as u64) as usize + 4 && self.q == self.idx_bits + self.ell + 4 {
            BlockPacking::Intermediate
        } else {
            BlockPacking::Counting
        }
    }

    /// Length of a dense-encoder record, `(q-2)·m`.
    pub fn record_len(&self) -> usize {
        (self.q - 2) * self.m
    }

    /// Bits of the packed block payload inside a dense-encoder record.
    pub fn packed_len(&self) -> usize {
        self.record_len() - self.idx_bits - self.ell - 2
    }

    /// `|T_e(u)| = n + 2ℓ`.
    pub fn enriched_len(&self) -> usize {
        self.n + 2 * self.ell
    }

    /// `|E(u)| = n + 2ℓ + m`.
    pub fn dense_len(&self) -> usize {
        self.n + 2 * self.ell + self.m
    }

    pub fn c1_bits(&self) -> usize {
        3
    }

    pub fn c2_modulus(&self) -> u64 {
        6 * self.n as u64
    }

    pub fn c2_bits(&self) -> usize {
        ceil_log2(self.c2_modulus()) as usize
    }

    /// Length bound on a located interval, `108Δ² + 3Δ`.
    pub fn interval_bound(&self) -> u128 {
        let d = self.delta as u128;
        108 * d * d + 3 * d
    }

    /// Every hard violation, each reported by name.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.mode == ParamMode::Paper && self.k < 2 {
            v.push("k ≥ 2 violated".into());
        }
        if self.k == 0 {
            v.push("k ≥ 1 violated".into());
        }
        // the corrector enumerates 2^k' bit assignments per window
        if self.k > 32 {
            v.push("k ≤ 32 violated".into());
        }
        if self.ell < 2 {
            v.push("ℓ ≥ 2 violated".into());
            return v;
        }
        if self.n < 2 {
            v.push("n ≥ 2 violated".into());
            return v;
        }
        if self.m != self.k + self.ell {
            v.push("m = k + ℓ violated".into());
        }
        if self.idx_bits != ceil_log2(self.n as u64) as usize {
            v.push("index width = ⌈log n⌉ violated".into());
        }
        if self.r != self.m * self.q {
            v.push("R = q·m violated".into());
        }
        if self.q < 4 {
            v.push("q ≥ 4 violated".into());
        }
        if self.delta + self.m != self.r + self.b {
            v.push("Δ = R + B − m violated".into());
        }
        if self.b % self.ell != 0 {
            v.push("B multiple of ℓ violated".into());
        }
        if self.b < self.r {
            v.push("B ≥ R violated".into());
        }
        match phi_len_for(self.b, self.idx_bits, self.ell) {
            Some(pl) if pl == self.phi_len => {
                if !phi_capacity_ok(self.b, self.ell, pl) {
                    v.push("φ capacity violated".into());
                }
            }
            _ => v.push("φ_len = B − ⌈log n⌉ − 2ℓ − 2 violated".into()),
        }
        if self.q >= 4 {
            if self.r - 2 * self.m + self.ell > self.b {
                v.push("R − 2m ≤ B − ℓ violated".into());
            }
            if self.r <= 2 * self.ell + self.m {
                v.push("R > 2ℓ + m violated".into());
            }
            match self.packing() {
                BlockPacking::Intermediate => {}
                BlockPacking::Counting => {
                    if !packer::capacity_ok(self.k, self.ell, self.idx_bits, self.q) {
                        v.push("packing capacity violated".into());
                    }
                }
            }
        }
        if self.block_len < self.k.max(1) {
            v.push("M ≥ k violated".into());
        }
        if self.syndromes == 0 {
            v.push("syndromes ≥ 1 violated".into());
        }
        if self.syndromes > 64 {
            v.push("syndromes ≤ 64 violated".into());
        }
        if self.strict() && !self.n_exceeds_36_delta() {
            v.push("n > 36Δ violated".into());
        }
        v
    }

    /// Soft conditions that only weaken guarantees in scaled mode.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if !self.strict() && !self.n_exceeds_36_delta() {
            w.push("n > 36Δ does not hold; the locator enumerates every D candidate".into());
        }
        if (self.block_len as u128) < self.interval_bound().min(self.dense_len() as u128) {
            w.push("M is shorter than a located interval can be; decoding may report ambiguity".into());
        }
        w
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Parameters(v))
        }
    }

    fn n_exceeds_36_delta(&self) -> bool {
        self.n as u128 > 36 * self.delta as u128
    }
}
