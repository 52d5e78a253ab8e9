//! The locator hash `(c1, c2)` and interval localization of deletions.
//!
//! For a dense `x` and `y` in its k-ball, the gap vector of `y` differs from
//! that of `x` by one short substring replacement starting at some index `b`.
//! With `d = n_P(y) - n_P(x)` and `D = VT(a_y) - VT(a_x)`, the function
//! `G(s) = d·Σ_{i≥s+2} a_y[i] - s·k'` stays within `18Δ` of `D` at `s = b`,
//! so `F = {s : |G(s) - D| ≤ 18Δ}` brackets the replacement.

use crate::bits::{push_uint, read_uint};
use crate::error::{Error, Result};
use crate::params::CodeParameters;
use crate::patterns::{GapVector, PatternFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LocatorHash {
    pub c1: u8,
    pub c2: u64,
}

impl LocatorHash {
    pub fn compute(x: &[bool], p: &CodeParameters) -> Self {
        let fam = PatternFamily::from_params(p);
        let starts = fam.pattern_starts(x);
        let g = GapVector::from_starts(&starts, x.len());
        Self {
            c1: (g.n_p % 5) as u8,
            c2: g.vt() % p.c2_modulus(),
        }
    }

    pub fn wire_len(p: &CodeParameters) -> usize {
        p.c1_bits() + p.c2_bits()
    }

    pub fn to_bits(&self, p: &CodeParameters, out: &mut Vec<bool>) {
        push_uint(out, self.c1 as u64, p.c1_bits() as u32);
        push_uint(out, self.c2, p.c2_bits() as u32);
    }

    pub fn from_bits(bits: &[bool], p: &CodeParameters) -> Result<Self> {
        if bits.len() != Self::wire_len(p) {
            return Err(Error::InvalidInput("locator hash has the wrong length".into()));
        }
        let c1 = read_uint(&bits[..p.c1_bits()]);
        let c2 = read_uint(&bits[p.c1_bits()..]);
        if c1 >= 5 || c2 >= p.c2_modulus() {
            return Err(Error::Inconsistent("locator hash out of range".into()));
        }
        Ok(Self { c1: c1 as u8, c2 })
    }
}

/// One-based positions in `y`; every deleted position of the original lies
/// in `[lo, hi + k']` in the original's coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LocatedInterval {
    pub lo: usize,
    pub hi: usize,
}

impl LocatedInterval {
    pub fn len(&self) -> usize {
        self.hi + 1 - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocateTrace {
    pub interval: LocatedInterval,
    pub d: i64,
    pub f_min: usize,
    pub f_max: usize,
    pub max_gap: u64,
    pub n_p: usize,
    /// Number of admissible `D` values.
    pub d_candidates: u64,
    /// `G` was strictly monotone over the scanned range.
    pub monotone: bool,
}

impl LocateTrace {
    pub fn f_spread(&self) -> usize {
        self.f_max - self.f_min
    }
}

/// Reusable localization state.
#[derive(Debug, Clone)]
pub struct Locator {
    fam: PatternFamily,
    m: usize,
    k: usize,
    band: i128,
    modulus: i128,
    bound: u128,
    starts: Vec<usize>,
    suffix: Vec<i128>,
}

impl Locator {
    pub fn new(p: &CodeParameters) -> Self {
        Self {
            fam: PatternFamily::from_params(p),
            m: p.m,
            k: p.k,
            band: 18 * p.delta as i128,
            modulus: p.c2_modulus() as i128,
            bound: p.interval_bound(),
            starts: Vec::new(),
            suffix: Vec::new(),
        }
    }

    /// Admissible range of `D` for a received string of length `ylen`.
    fn d_range(&self, ylen: usize, n_p: usize, kp: usize) -> (i128, i128) {
        let span = 2 * (ylen as i128 + 1);
        let kp = kp as i128;
        (-span - (n_p as i128 + 1) * kp - self.band, span - kp + self.band)
    }

    pub fn locate(&mut self, y: &[bool], kp: usize, h: &LocatorHash) -> Result<LocateTrace> {
        if kp == 0 || kp > self.k {
            return Err(Error::InvalidInput(format!("deletion count {kp} outside [1, {}]", self.k)));
        }
        self.fam.pattern_starts_into(y, &mut self.starts);
        let n_p = self.starts.len();
        let ylen = y.len();

        // suffix[i] = Σ_{i' ≥ i} a_y[i'] for one-based i in 1..=n_p+2
        self.suffix.clear();
        self.suffix.resize(n_p + 3, 0);
        let mut vt: i128 = 0;
        let mut max_gap = 0u64;
        let mut prev = 0usize;
        for i in 1..=n_p + 1 {
            let next = if i <= n_p { self.starts[i - 1] + 1 } else { ylen + 1 };
            let g = (next - prev) as u64;
            prev = next;
            max_gap = max_gap.max(g);
            vt += i as i128 * g as i128;
            self.suffix[i] = g as i128;
        }
        for i in (1..=n_p + 1).rev() {
            self.suffix[i] += self.suffix[i + 1];
        }

        let d = match (n_p as i64 - h.c1 as i64).rem_euclid(5) {
            r @ 0..=2 => r,
            r => r - 5,
        };
        let residue = (vt - h.c2 as i128).rem_euclid(self.modulus);
        let (d_lo, d_hi) = self.d_range(ylen, n_p, kp);
        let d_candidates = count_congruent(d_lo, d_hi, residue, self.modulus);

        let kp_i = kp as i128;
        let (mut f_min, mut f_max) = (usize::MAX, 0usize);
        let mut monotone = true;
        let mut last_g: Option<i128> = None;
        for s in 1..=n_p + 1 {
            let g = d as i128 * self.suffix[(s + 2).min(n_p + 2)] - s as i128 * kp_i;
            if let Some(prev) = last_g {
                let step_ok = if d >= 0 { g < prev } else { g > prev };
                monotone &= step_ok;
            }
            last_g = Some(g);
            let lo = (g - self.band).max(d_lo);
            let hi = (g + self.band).min(d_hi);
            if lo <= hi && lo + (residue - lo).rem_euclid(self.modulus) <= hi {
                f_min = f_min.min(s);
                f_max = f_max.max(s);
            }
        }
        if f_min == usize::MAX {
            return Err(Error::Inconsistent("no replacement index is consistent with the locator hash".into()));
        }

        let t = |j: usize| -> i128 {
            // one-based start of pattern j, with t(0) = 0 and t(n_p+1) = |y|+1
            match j {
                0 => 0,
                j if j <= n_p => self.starts[j - 1] as i128 + 1,
                _ => ylen as i128 + 1,
            }
        };
        let slack = (self.m + self.k) as i128;
        let lo = (t(f_min - 1) - slack).max(1);
        let hi = (t((f_max + 2).min(n_p + 1)) + slack).min(ylen.max(1) as i128);
        let interval = LocatedInterval {
            lo: lo as usize,
            hi: hi.max(lo) as usize,
        };
        if interval.len() as u128 > self.bound {
            return Err(Error::Inconsistent(format!(
                "located interval of length {} exceeds {}",
                interval.len(),
                self.bound
            )));
        }
        Ok(LocateTrace {
            interval,
            d,
            f_min,
            f_max,
            max_gap,
            n_p,
            d_candidates,
            monotone,
        })
    }
}

fn count_congruent(lo: i128, hi: i128, residue: i128, modulus: i128) -> u64 {
    if lo > hi {
        return 0;
    }
    let first = lo + (residue - lo).rem_euclid(modulus);
    if first > hi {
        0
    } else {
        ((hi - first) / modulus + 1) as u64
    }
}

pub fn locate(y: &[bool], kp: usize, h: &LocatorHash, p: &CodeParameters) -> Result<LocatedInterval> {
    Locator::new(p).locate(y, kp, h).map(|t| t.interval)
}

/// The replacement-index set by explicit enumeration of every `D`.
pub fn f_set_reference(y: &[bool], kp: usize, h: &LocatorHash, p: &CodeParameters) -> Vec<usize> {
    let fam = PatternFamily::from_params(p);
    let a = fam.gap_vector(&crate::BitString::from(y));
    let n_p = a.n_p;
    let loc = Locator::new(p);
    let (d_lo, d_hi) = loc.d_range(y.len(), n_p, kp);
    let vt = a.vt() as i128;
    let d = match (n_p as i64 - h.c1 as i64).rem_euclid(5) {
        r @ 0..=2 => r,
        r => r - 5,
    } as i128;
    let ds: Vec<i128> = (d_lo..=d_hi)
        .filter(|&x| (vt - h.c2 as i128 - x).rem_euclid(loc.modulus) == 0)
        .collect();
    (1..=n_p + 1)
        .filter(|&s| {
            let tail: i128 = a.gaps.iter().skip(s + 1).map(|&g| g as i128).sum();
            let g = d * tail - s as i128 * kp as i128;
            ds.iter().any(|&x| (g - x).abs() <= loc.band)
        })
        .collect()
}
