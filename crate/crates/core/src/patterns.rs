//! The pattern family, indicator and gap vectors, and density checks.
//!
//! A pattern is a length-`m` string that ends in the marker `1^ell` and has
//! no marker starting in its first `k` positions. Two occurrences in any
//! string start at least `k + 1` apart.

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::params::CodeParameters;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PatternFamily {
    pub k: usize,
    pub ell: usize,
    pub m: usize,
}

/// Gaps between consecutive ones of `(1, indicator, 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GapVector {
    pub gaps: Vec<u64>,
    pub n_p: usize,
}

impl GapVector {
    pub fn from_starts(starts: &[usize], len: usize) -> Self {
        let mut gaps = Vec::with_capacity(starts.len() + 1);
        let mut prev = 0usize;
        for &s in starts {
            gaps.push((s + 1 - prev) as u64);
            prev = s + 1;
        }
        gaps.push((len + 1 - prev) as u64);
        Self { gaps, n_p: starts.len() }
    }

    pub fn vt(&self) -> u64 {
        crate::bits::vt_checksum(&self.gaps)
    }
}

impl PatternFamily {
    pub fn new(k: usize, ell: usize) -> Self {
        Self { k, ell, m: k + ell }
    }

    pub fn from_params(p: &CodeParameters) -> Self {
        Self::new(p.k, p.ell)
    }

    /// Membership test for a length-`m` string.
    pub fn contains(&self, p: &[bool]) -> bool {
        p.len() == self.m
            && p[self.k..].iter().all(|&b| b)
            && !crate::bits::has_run(&p[..self.m - 1], self.ell)
    }

    /// Zero-based start positions of every marker occurrence.
    pub fn marker_starts(&self, x: &[bool]) -> Vec<usize> {
        let mut out = Vec::new();
        let mut run = 0usize;
        for (i, &b) in x.iter().enumerate() {
            run = if b { run + 1 } else { 0 };
            if run >= self.ell {
                out.push(i + 1 - self.ell);
            }
        }
        out
    }

    /// Zero-based start positions of every pattern occurrence.
    pub fn pattern_starts(&self, x: &[bool]) -> Vec<usize> {
        let mut out = Vec::new();
        self.pattern_starts_into(x, &mut out);
        out
    }

    /// Same as [`pattern_starts`](Self::pattern_starts), reusing `out`.
    pub fn pattern_starts_into(&self, x: &[bool], out: &mut Vec<usize>) {
        out.clear();
        let (k, ell) = (self.k, self.ell);
        let mut run = 0usize;
        // last marker start seen, offset by one so that 0 means none
        let mut last: usize = 0;
        for (i, &b) in x.iter().enumerate() {
            run = if b { run + 1 } else { 0 };
            if run >= ell {
                let t = i + 1 - ell;
                if t >= k && (last == 0 || last - 1 + k < t) {
                    out.push(t - k);
                }
                last = t + 1;
            }
        }
    }

    pub fn indicator(&self, x: &BitString) -> BitString {
        let mut ind = vec![false; x.len()];
        for s in self.pattern_starts(x.as_slice()) {
            ind[s] = true;
        }
        BitString::from(ind)
    }

    pub fn gap_vector(&self, x: &BitString) -> GapVector {
        GapVector::from_starts(&self.pattern_starts(x.as_slice()), x.len())
    }

    pub fn count(&self, x: &[bool]) -> usize {
        let mut v = Vec::new();
        self.pattern_starts_into(x, &mut v);
        v.len()
    }

    /// True iff every length-`delta` window of `x` contains a whole pattern.
    pub fn is_dense(&self, x: &BitString, delta: usize) -> Result<bool> {
        if !(self.m < delta && delta <= x.len()) {
            return Err(Error::InvalidInput(format!(
                "density radius {delta} outside ({}, {}]",
                self.m,
                x.len()
            )));
        }
        let starts = self.pattern_starts(x.as_slice());
        let n = x.len();
        let (Some(&first), Some(&last)) = (starts.first(), starts.last()) else {
            return Ok(false);
        };
        let inner = delta - self.m + 1;
        Ok(first < inner
            && starts.windows(2).all(|w| w[1] - w[0] <= inner)
            && n - last <= delta)
    }

    /// Largest entry of the gap vector of `x`.
    pub fn max_gap(&self, x: &BitString) -> u64 {
        self.gap_vector(x).gaps.into_iter().max().unwrap_or(0)
    }
}

/// Every length-`B` window contains a marker.
pub fn check_property_rich(x: &BitString, p: &CodeParameters) -> bool {
    let x = x.as_slice();
    if x.len() < p.b {
        return true;
    }
    let fam = PatternFamily::from_params(p);
    let starts = fam.marker_starts(x);
    let span = p.b - p.ell;
    let mut next = 0usize;
    for i in 0..=x.len() - p.b {
        while next < starts.len() && starts[next] < i {
            next += 1;
        }
        if next == starts.len() || starts[next] > i + span {
            return false;
        }
    }
    true
}

/// Every length-`R` window has, starting no later than offset `R - m`, a
/// length-`(m-1)` substring without a marker.
pub fn check_property_sparse(x: &BitString, p: &CodeParameters) -> bool {
    let x = x.as_slice();
    if x.len() < p.r {
        return true;
    }
    let w = p.m - 1;
    // free[j]: x[j..j+w) holds no marker
    let mut run = 0usize;
    let mut last_marker_end: Option<usize> = None;
    let mut free = vec![false; x.len() + 1 - w];
    for (i, &b) in x.iter().enumerate() {
        run = if b { run + 1 } else { 0 };
        if run >= p.ell {
            last_marker_end = Some(i);
        }
        if i + 1 >= w {
            let j = i + 1 - w;
            free[j] = match last_marker_end {
                Some(e) => e + 1 < j + p.ell,
                None => true,
            };
        }
    }
    let reach = p.r - p.m;
    let mut next_free = usize::MAX;
    let mut ok = vec![false; free.len()];
    for j in (0..free.len()).rev() {
        if free[j] {
            next_free = j;
        }
        ok[j] = next_free <= j + reach;
    }
    (0..=x.len() - p.r).all(|i| ok[i])
}
