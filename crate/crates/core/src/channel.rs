//! The localized-deletion channel: patterns, the k-ball, sampling, and the
//! exhaustive verifier.
//!
//! Sampling uses SplitMix64 (`state += 0x9e3779b97f4a7c15`, then the usual
//! xor-shift-multiply finalizer) seeded directly with the 64-bit seed. One
//! draw `r` per choice, always reduced with `%`:
//!
//! 1. `k' = 1 + r % min(k, len)`
//! 2. `a = 1 + r % (len - k' + 1)`
//! 3. the remaining `k' - 1` positions come from a partial Fisher-Yates
//!    shuffle of `a+1 ..= min(a+k-1, len)`: step `i` swaps slot `i` with
//!    slot `i + r % (pool - i)`.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::bits::BitString;
use crate::codec::{Codec, DecodeBranch};
use crate::error::{Error, Result};
use crate::patterns::PatternFamily;

/// Upper bound on `len · 2^k` for the enumerators.
pub const ENUMERATION_GUARD: u128 = 1 << 26;

/// One-based, strictly increasing positions spanning at most `k` bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeletionPattern {
    positions: Vec<usize>,
}

impl DeletionPattern {
    pub fn new(positions: Vec<usize>, k: usize) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if positions.is_empty() {
            return bad("a deletion pattern needs at least one position".into());
        }
        if positions.len() > k {
            return bad(format!("{} deletions exceed k = {k}", positions.len()));
        }
        if positions[0] == 0 {
            return bad("positions are one-based".into());
        }
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return bad("positions must be strictly increasing".into());
        }
        let span = positions[positions.len() - 1] - positions[0];
        if span + 1 > k {
            return bad(format!("span {span} exceeds k - 1 = {}", k - 1));
        }
        Ok(Self { positions })
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn first(&self) -> usize {
        self.positions[0]
    }

    pub fn last(&self) -> usize {
        self.positions[self.positions.len() - 1]
    }

    /// Writes `x` without the pattern's positions into `out`.
    pub fn apply_into(&self, x: &[bool], out: &mut Vec<bool>) -> Result<()> {
        if self.last() > x.len() {
            return Err(Error::InvalidInput(format!(
                "position {} is beyond length {}",
                self.last(),
                x.len()
            )));
        }
        out.clear();
        let (a, b) = (self.first() - 1, self.last());
        out.extend_from_slice(&x[..a]);
        let mut it = self.positions.iter().peekable();
        for (i, &bit) in x[a..b].iter().enumerate() {
            if it.peek() == Some(&&(a + i + 1)) {
                it.next();
            } else {
                out.push(bit);
            }
        }
        out.extend_from_slice(&x[b..]);
        Ok(())
    }

    pub fn apply(&self, x: &BitString) -> Result<BitString> {
        let mut out = Vec::with_capacity(x.len());
        self.apply_into(x.as_slice(), &mut out)?;
        Ok(BitString::from(out))
    }
}

fn guard(len: usize, k: usize) -> Result<()> {
    let size = (len as u128).saturating_mul(1u128 << k.min(100));
    if size > ENUMERATION_GUARD {
        return Err(Error::ScaleGuard(format!("length {len} with k = {k} is too large to enumerate")));
    }
    Ok(())
}

/// Every deletion pattern for strings of length `len`, ordered by first
/// position, then lexicographically.
pub fn enumerate_patterns(len: usize, k: usize) -> Result<Vec<DeletionPattern>> {
    guard(len, k)?;
    let mut out = Vec::new();
    if k == 0 {
        return Ok(out);
    }
    for a in 1..=len {
        let hi = (a + k - 1).min(len);
        let pool: Vec<usize> = (a + 1..=hi).collect();
        let mut subsets: Vec<Vec<usize>> = (0u32..1 << pool.len())
            .map(|mask| {
                let mut p = vec![a];
                p.extend(pool.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v));
                p
            })
            .collect();
        subsets.sort();
        out.extend(subsets.into_iter().map(|positions| DeletionPattern { positions }));
    }
    Ok(out)
}

/// The k-ball of `x`, duplicates collapsed.
pub fn enumerate_ball(x: &BitString, k: usize) -> Result<HashSet<BitString>> {
    enumerate_patterns(x.len(), k)?
        .iter()
        .map(|p| p.apply(x))
        .collect()
}

/// Draws a pattern for a string of length `len` from `rng`.
pub fn sample_with(rng: &mut SplitMix64, len: usize, k: usize) -> Result<DeletionPattern> {
    if len == 0 || k == 0 {
        return Err(Error::InvalidInput("cannot sample deletions from an empty string or with k = 0".into()));
    }
    let kp = 1 + (rng.next_u64() % k.min(len) as u64) as usize;
    let a = 1 + (rng.next_u64() % (len - kp + 1) as u64) as usize;
    let mut pool: Vec<usize> = (a + 1..=(a + k - 1).min(len)).collect();
    for i in 0..kp - 1 {
        let j = i + (rng.next_u64() % (pool.len() - i) as u64) as usize;
        pool.swap(i, j);
    }
    let mut positions = vec![a];
    positions.extend_from_slice(&pool[..kp - 1]);
    positions.sort_unstable();
    DeletionPattern::new(positions, k)
}

pub fn sample(x: &BitString, k: usize, seed: u64) -> Result<(BitString, DeletionPattern)> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let p = sample_with(&mut rng, x.len(), k)?;
    Ok((p.apply(x)?, p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub shards: u64,
    pub shard_index: u64,
    /// Maximum number of decode trials this run may perform.
    pub budget: u64,
    /// Largest deletion count to enumerate; defaults to `k`.
    pub max_deletions: Option<usize>,
    /// Also check locator coverage and the gap-vector change on every
    /// payload-only pattern.
    pub audit: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            shards: 1,
            shard_index: 0,
            budget: 1 << 32,
            max_deletions: None,
            audit: false,
        }
    }
}

/// Everything needed to replay one failed trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub message: BitString,
    pub positions: Vec<usize>,
    pub outcome: String,
}

impl Failure {
    /// One tab-separated record: `FAIL`, message bits, positions, outcome.
    pub fn record(&self) -> String {
        let pos: Vec<String> = self.positions.iter().map(|p| p.to_string()).collect();
        format!("FAIL\t{}\t{}\t{}", self.message, pos.join(","), self.outcome)
    }
}

/// Checks made on payload-only patterns when auditing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AuditStats {
    pub located: u64,
    /// A deleted position fell outside `[lo, hi + k']`.
    pub coverage_misses: u64,
    pub bound_violations: u64,
    pub max_f_spread: usize,
    pub max_y_gap: u64,
    pub max_count_change: usize,
    /// Longest replaced substring on either side of the gap-vector change.
    pub max_replacement: usize,
    pub non_monotone: u64,
}

impl AuditStats {
    fn merge(&mut self, o: &Self) {
        self.located += o.located;
        self.coverage_misses += o.coverage_misses;
        self.bound_violations += o.bound_violations;
        self.max_f_spread = self.max_f_spread.max(o.max_f_spread);
        self.max_y_gap = self.max_y_gap.max(o.max_y_gap);
        self.max_count_change = self.max_count_change.max(o.max_count_change);
        self.max_replacement = self.max_replacement.max(o.max_replacement);
        self.non_monotone += o.non_monotone;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub messages: u64,
    pub trials: u64,
    pub failure_count: u64,
    pub ambiguities: u64,
    pub unrecoverable: u64,
    /// Failures kept in full; capped at [`VerifyReport::KEEP`].
    pub failures: Vec<Failure>,
    pub branches: [u64; 3],
    pub max_interval: usize,
    pub audit: AuditStats,
    pub runtime: Duration,
}

impl VerifyReport {
    pub const KEEP: usize = 64;

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    pub fn merge(&mut self, o: &Self) {
        self.messages += o.messages;
        self.trials += o.trials;
        self.failure_count += o.failure_count;
        self.ambiguities += o.ambiguities;
        self.unrecoverable += o.unrecoverable;
        for f in &o.failures {
            if self.failures.len() < Self::KEEP {
                self.failures.push(f.clone());
            }
        }
        for (a, b) in self.branches.iter_mut().zip(o.branches) {
            *a += b;
        }
        self.max_interval = self.max_interval.max(o.max_interval);
        self.audit.merge(&o.audit);
        self.runtime += o.runtime;
    }

    fn fail(&mut self, message: &BitString, p: &DeletionPattern, outcome: String) {
        self.failure_count += 1;
        if self.failures.len() < Self::KEEP {
            self.failures.push(Failure {
                message: message.clone(),
                positions: p.positions.clone(),
                outcome,
            });
        }
    }

    /// Line-oriented summary followed by one record per kept failure.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "messages\t{}\ntrials\t{}\nfailures\t{}\nambiguous\t{}\nunrecoverable\t{}\n\
             clean-tail\t{}\nclean-prefix\t{}\ncorrected\t{}\nmax_interval\t{}\nruntime_s\t{:.3}\n",
            self.messages,
            self.trials,
            self.failure_count,
            self.ambiguities,
            self.unrecoverable,
            self.branches[0],
            self.branches[1],
            self.branches[2],
            self.max_interval,
            self.runtime.as_secs_f64()
        );
        for f in &self.failures {
            s.push_str(&f.record());
            s.push('\n');
        }
        s
    }
}

fn branch_slot(b: DecodeBranch) -> usize {
    match b {
        DecodeBranch::CleanTail => 0,
        DecodeBranch::CleanPrefix => 1,
        DecodeBranch::Corrected => 2,
    }
}

/// Lengths of the differing middles after stripping the common prefix and
/// suffix of two gap vectors.
pub fn replacement_lengths(a: &[u64], b: &[u64]) -> (usize, usize) {
    let pre = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    let room = a.len().min(b.len()) - pre;
    let suf = a.iter().rev().zip(b.iter().rev()).take(room).take_while(|(x, y)| x == y).count();
    (a.len() - pre - suf, b.len() - pre - suf)
}

/// Decodes every pattern of every message in this shard.
///
/// Each message is encoded once and its dense payload inverted once; trials
/// then compare the recovered payload against the transmitted one.
pub fn verify_exhaustive(codec: &Codec, opts: &VerifyOptions) -> Result<VerifyReport> {
    let started = Instant::now();
    let p = codec.params();
    let n = p.n;
    if n >= 40 {
        return Err(Error::ScaleGuard(format!("2^{n} messages")));
    }
    if opts.shards == 0 || opts.shard_index >= opts.shards {
        return Err(Error::InvalidInput("shard index must be below the shard count".into()));
    }
    let layout = codec.layout();
    let kmax = opts.max_deletions.unwrap_or(p.k).min(p.k);
    let patterns = enumerate_patterns(layout.total(), kmax)?;
    let total: u64 = 1 << n;
    let messages = (total - opts.shard_index).div_ceil(opts.shards);
    let trials = messages as u128 * patterns.len() as u128;
    if trials > opts.budget as u128 {
        return Err(Error::ScaleGuard(format!("{trials} trials exceed the budget of {}", opts.budget)));
    }

    let fam = PatternFamily::from_params(p);
    let mut dec = codec.decoder();
    let mut report = VerifyReport::default();
    let mut y = Vec::with_capacity(layout.total());
    let mut yx = Vec::with_capacity(layout.dense_len);
    let mut starts = Vec::new();
    let mut u_val = opts.shard_index;
    while u_val < total {
        let u: BitString = (0..n).map(|i| u_val >> (n - 1 - i) & 1 == 1).collect();
        u_val += opts.shards;
        report.messages += 1;
        let word = codec.encode(&u)?;
        let x = &word.as_slice()[..layout.dense_len];
        let back = codec.dense().decode(&BitString::from(x))?;
        if back != u {
            report.fail(&u, &DeletionPattern { positions: vec![] }, "dense encoding did not invert".into());
            continue;
        }
        let gx = if opts.audit {
            fam.pattern_starts_into(x, &mut starts);
            Some(crate::patterns::GapVector::from_starts(&starts, x.len()))
        } else {
            None
        };
        for pat in &patterns {
            report.trials += 1;
            pat.apply_into(word.as_slice(), &mut y)?;
            match dec.recover_payload(&y) {
                Ok((got, trace)) => {
                    report.branches[branch_slot(trace.branch)] += 1;
                    if let Some(lt) = trace.locate {
                        report.max_interval = report.max_interval.max(lt.interval.len());
                    }
                    if got != x {
                        report.fail(&u, pat, format!("wrong payload via {}", trace.branch));
                    }
                    if let (Some(gx), true) = (&gx, pat.last() <= layout.dense_len) {
                        let a = &mut report.audit;
                        pat.apply_into(x, &mut yx)?;
                        fam.pattern_starts_into(&yx, &mut starts);
                        let gy = crate::patterns::GapVector::from_starts(&starts, yx.len());
                        a.max_count_change = a.max_count_change.max(gx.n_p.abs_diff(gy.n_p));
                        let (r1, r2) = replacement_lengths(&gx.gaps, &gy.gaps);
                        a.max_replacement = a.max_replacement.max(r1.max(r2));
                        if let Some(lt) = trace.locate {
                            a.located += 1;
                            let iv = lt.interval;
                            if !pat.positions.iter().all(|&i| iv.lo <= i && i <= iv.hi + pat.len()) {
                                a.coverage_misses += 1;
                            }
                            if iv.len() as u128 > p.interval_bound() {
                                a.bound_violations += 1;
                            }
                            a.max_f_spread = a.max_f_spread.max(lt.f_spread());
                            a.max_y_gap = a.max_y_gap.max(lt.max_gap);
                            a.non_monotone += u64::from(!lt.monotone);
                        }
                    }
                }
                Err(Error::Ambiguous(c)) => {
                    report.ambiguities += 1;
                    report.fail(&u, pat, format!("ambiguous ({c} candidates)"));
                }
                Err(Error::Unrecoverable) => {
                    report.unrecoverable += 1;
                    report.fail(&u, pat, "unrecoverable".into());
                }
                Err(e) => report.fail(&u, pat, e.to_string()),
            }
        }
    }
    report.runtime = started.elapsed();
    Ok(report)
}
