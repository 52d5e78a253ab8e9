//! Block sketches `(h_even, h_odd)` and reconstruction of the blocks hit by
//! a localized deletion.
//!
//! The original is cut into blocks of `M` bits (the last one implicitly
//! zero-padded). `h_odd` is the field-wise XOR of the sketches of blocks
//! `1, 3, 5, ...` and `h_even` of blocks `2, 4, ...`.
//!
//! Decoding tries every deletion hypothesis whose first position lies in the
//! located interval. A hypothesis with first position in block `l` leaves
//! blocks before `l` aligned with `y` and blocks after `l+1` shifted by `k'`,
//! so the sketches of blocks `l` and `l+1` follow from the parities. Since
//! sketches are additive, each hypothesis is scored from running in-block
//! sums instead of rebuilding its blocks.

use crate::error::{Error, Result};
use crate::locator::LocatedInterval;
use crate::sketch::{add_mod, sub_into, xor_into, InnerSketch};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CorrectorHash {
    pub h_even: Vec<u64>,
    pub h_odd: Vec<u64>,
}

impl CorrectorHash {
    pub fn compute(x: &[bool], sketch: &dyn InnerSketch) -> Self {
        let j = sketch.field_count();
        let mut h_even = vec![0; j];
        let mut h_odd = vec![0; j];
        let mut f = vec![0; j];
        for (i, block) in x.chunks(sketch.block_len()).enumerate() {
            sketch.fields_into(block, &mut f);
            xor_into(if i % 2 == 0 { &mut h_odd } else { &mut h_even }, &f);
        }
        Self { h_even, h_odd }
    }

    pub fn wire_len(sketch: &dyn InnerSketch) -> usize {
        2 * sketch.sketch_len()
    }

    pub fn to_bits(&self, sketch: &dyn InnerSketch, out: &mut Vec<bool>) {
        sketch.to_bits(&self.h_even, out);
        sketch.to_bits(&self.h_odd, out);
    }

    pub fn from_bits(bits: &[bool], sketch: &dyn InnerSketch) -> Result<Self> {
        let s = sketch.sketch_len();
        if bits.len() != 2 * s {
            return Err(Error::InvalidInput("corrector hash has the wrong length".into()));
        }
        Ok(Self {
            h_even: sketch.from_bits(&bits[..s])?,
            h_odd: sketch.from_bits(&bits[s..])?,
        })
    }
}

/// A deletion hypothesis: sorted one-based positions and the deleted bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Hypothesis {
    pub positions: Vec<usize>,
    pub values: Vec<bool>,
}

impl Hypothesis {
    /// Bit `t` (one-based) of the reconstruction from `y`.
    fn bit(&self, y: &[bool], t: usize) -> bool {
        let mut before = 0;
        for (i, &p) in self.positions.iter().enumerate() {
            if p == t {
                return self.values[i];
            }
            if p < t {
                before += 1;
            }
        }
        y[t - before - 1]
    }

    pub fn apply(&self, y: &[bool]) -> Vec<bool> {
        let mut out = Vec::with_capacity(y.len() + self.positions.len());
        let mut yi = 0;
        let mut hi = 0;
        let total = y.len() + self.positions.len();
        for t in 1..=total {
            if hi < self.positions.len() && self.positions[hi] == t {
                out.push(self.values[hi]);
                hi += 1;
            } else {
                out.push(y[yi]);
                yi += 1;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CorrectStats {
    pub hypotheses: u64,
    pub matches: u64,
    pub distinct: usize,
}

/// Sketch fields checked for every hypothesis before the rest are computed.
const PREFILTER: usize = 2;

/// Reusable buffers for [`correct`].
#[derive(Debug, Default, Clone)]
pub struct CorrectorScratch {
    unshifted: Vec<u64>,
    shifted: Vec<u64>,
    prefix: Vec<u64>,
    suffix: Vec<u64>,
    rec: Vec<u64>,
    /// Unshifted sum of block `l` before the first position.
    head: Vec<u64>,
    cur: Vec<u64>,
    /// Shifted in-block sums after each last position, a ring of `k` slots.
    tails: Vec<u64>,
    /// Side and leading weights of each inserted position.
    ins: Vec<(usize, [u64; PREFILTER])>,
    /// Set bits of the hypothesis span: block position and whether it lies in block `l`.
    span: Vec<(usize, bool)>,
    positions: Vec<usize>,
    values: Vec<bool>,
    pub(crate) found: Vec<Hypothesis>,
}

pub struct Correction {
    pub x: Vec<bool>,
    pub stats: CorrectStats,
}

/// Reconstructs the original of length `x_len` from `y` with `k'` deletions.
pub fn correct(
    y: &[bool],
    x_len: usize,
    k: usize,
    interval: LocatedInterval,
    hc: &CorrectorHash,
    sketch: &dyn InnerSketch,
    scratch: &mut CorrectorScratch,
) -> Result<Correction> {
    if y.len() > x_len || x_len - y.len() > k {
        return Err(Error::InvalidInput("received string length is inconsistent with k".into()));
    }
    let kp = x_len - y.len();
    if kp == 0 {
        return Ok(Correction {
            x: y.to_vec(),
            stats: CorrectStats::default(),
        });
    }
    let m = sketch.block_len();
    if m < k {
        return Err(Error::InvalidInput(format!("block length {m} is below k = {k}")));
    }
    let q = sketch.moduli();
    let jf = sketch.field_count();
    let blocks = x_len.div_ceil(m);
    let ylen = y.len();
    let s = scratch;
    let block_of = |t: usize| (t - 1) / m + 1;
    let local = |t: usize| (t - 1) % m + 1;
    let y_at = |i: usize| i >= 1 && i <= ylen && y[i - 1];

    // per-block sketches, indexed 1..=blocks with two zero slots on each side
    let slots = blocks + 5;
    for v in [&mut s.unshifted, &mut s.shifted, &mut s.prefix, &mut s.suffix] {
        v.clear();
        v.resize(slots * jf, 0);
    }
    let at = |j: usize| (j + 2) * jf..(j + 3) * jf;
    // running (block, offset) of position t and of t + k'
    let (mut bu, mut ou) = (1, 0);
    let (mut bs, mut os) = (block_of(1 + kp), local(1 + kp) - 1);
    for &b in y {
        (ou, os) = (ou + 1, os + 1);
        if ou > m {
            (bu, ou) = (bu + 1, 1);
        }
        if os > m {
            (bs, os) = (bs + 1, 1);
        }
        if b {
            sketch.add_weight(ou, &mut s.unshifted[at(bu)]);
            sketch.add_weight(os, &mut s.shifted[at(bs)]);
        }
    }
    for j in 1..=blocks {
        let (head, tail) = s.prefix.split_at_mut(at(j).start);
        tail[..jf].copy_from_slice(&s.unshifted[at(j)]);
        let prev = at(if j >= 2 { j - 2 } else { 0 });
        xor_into(&mut tail[..jf], &head[prev]);
    }
    for j in (1..=blocks).rev() {
        let (head, tail) = s.suffix.split_at_mut(at(j + 2).start);
        head[at(j)].copy_from_slice(&s.shifted[at(j)]);
        xor_into(&mut head[at(j)], &tail[..jf]);
    }

    let pre = jf.min(PREFILTER);
    let parity = |j: usize| if j % 2 == 1 { &hc.h_odd } else { &hc.h_even };
    let a_lo = interval.lo.max(1);
    let a_max = (interval.hi + 1).min(ylen + 1);
    let cap = (interval.hi + kp).min(x_len);
    let mut stats = CorrectStats::default();
    s.found.clear();
    s.rec.resize(2 * jf, 0);
    s.tails.resize(k * jf, 0);
    let mut cached_l = 0usize;
    let mut next_e = a_lo;

    // head = unshifted in-block sum over [block start, a - 1];
    // cur = shifted in-block sum over [block start, e - 1] for the next tail slot e
    for v in [&mut s.head, &mut s.cur] {
        v.clear();
        v.resize(jf, 0);
    }
    if a_lo <= a_max {
        for t in (block_of(a_lo) - 1) * m + 1..a_lo {
            if y_at(t) {
                sketch.add_weight(local(t), &mut s.head);
            }
        }
        if a_lo > 1 {
            for t in (block_of(a_lo - 1) - 1) * m + 1..a_lo {
                if t > kp && y_at(t - kp) {
                    sketch.add_weight(local(t), &mut s.cur);
                }
            }
        }
    }

    for a in a_lo..=a_max {
        let (l, la) = (block_of(a), local(a));
        // block and offset of t in [a, a + m)
        let split = |t: usize| {
            let off = la + (t - a);
            if off > m {
                (l + 1, off - m)
            } else {
                (l, off)
            }
        };
        if a > a_lo {
            if la == 1 {
                s.head.fill(0);
            } else if y_at(a - 1) {
                sketch.add_weight(la - 1, &mut s.head);
            }
        }
        if l != cached_l {
            cached_l = l;
            let (r0, r1) = s.rec.split_at_mut(jf);
            r0.copy_from_slice(parity(l));
            xor_into(r0, &s.prefix[at(l.saturating_sub(2))]);
            xor_into(r0, &s.suffix[at((l + 2).min(blocks + 2))]);
            r1.copy_from_slice(parity(l + 1));
            xor_into(r1, &s.prefix[at(l.saturating_sub(1))]);
            xor_into(r1, &s.suffix[at((l + 3).min(blocks + 2))]);
        }
        let reach = (a + k - 1).min(cap);
        // ring slot e % k = shifted in-block sum over [e + 1, block end]
        while next_e <= reach {
            let e = next_e;
            let (be, le) = split(e);
            if le == 1 {
                s.cur.fill(0);
            }
            if e > kp && y_at(e - kp) {
                sketch.add_weight(le, &mut s.cur);
            }
            let slot = &mut s.tails[(e % k) * jf..(e % k + 1) * jf];
            slot.copy_from_slice(&s.shifted[at(be)]);
            sub_into(slot, &s.cur, q);
            next_e += 1;
        }
        if reach + 1 < a + kp {
            continue;
        }
        let width = reach - a;
        for mask in 0u64..1 << width {
            if mask.count_ones() as usize != kp - 1 {
                continue;
            }
            s.positions.clear();
            s.positions.push(a);
            s.positions.extend((0..width).filter(|b| mask >> b & 1 == 1).map(|b| a + 1 + b));
            let last = *s.positions.last().unwrap();
            let tail = &s.tails[(last % k) * jf..(last % k + 1) * jf];
            let next = &s.shifted[at(l + 1)];
            let in_l = split(last).0 == l;
            // completes field j from the span sums on each side of the block boundary
            let fits = |j: usize, v0: u64, v1: u64| {
                let v0 = add_mod(s.head[j], v0, q[j]);
                let (v0, v1) = if in_l {
                    (add_mod(v0, tail[j], q[j]), next[j])
                } else {
                    (v0, add_mod(v1, tail[j], q[j]))
                };
                v0 == s.rec[j] && v1 == s.rec[jf + j]
            };
            // the leading fields of the span, split into its kept y bits and
            // the weight of each inserted position
            let mut base = [[0u64; 2]; PREFILTER];
            s.ins.clear();
            s.ins.resize(kp, (0, [0; PREFILTER]));
            let mut r = 0;
            for t in a..=last {
                let (bt, lt) = split(t);
                let side = usize::from(bt != l);
                let inserted = r < kp && s.positions[r] == t;
                if inserted || y_at(t - r) {
                    for j in 0..pre {
                        let w = sketch.weight(lt, j);
                        if inserted {
                            s.ins[r].1[j] = w;
                        } else {
                            base[j][side] = add_mod(base[j][side], w, q[j]);
                        }
                    }
                }
                if inserted {
                    s.ins[r].0 = side;
                    r += 1;
                }
            }
            for vals in 0u64..1 << kp {
                stats.hypotheses += 1;
                let screened = (0..pre).all(|j| {
                    let mut v = base[j];
                    for (i, (side, w)) in s.ins.iter().enumerate() {
                        if vals >> i & 1 == 1 {
                            v[*side] = add_mod(v[*side], w[j], q[j]);
                        }
                    }
                    fits(j, v[0], v[1])
                });
                if !screened {
                    continue;
                }
                s.values.clear();
                s.values.extend((0..kp).map(|i| vals >> i & 1 == 1));
                s.span.clear();
                let mut r = 0;
                for t in a..=last {
                    let bit = if r < kp && s.positions[r] == t {
                        r += 1;
                        s.values[r - 1]
                    } else {
                        y_at(t - r)
                    };
                    if bit {
                        let (bt, lt) = split(t);
                        s.span.push((lt, bt == l));
                    }
                }
                let hit = (pre..jf).all(|j| {
                    let (mut v0, mut v1) = (0, 0);
                    for &(pos, here) in &s.span {
                        let w = sketch.weight(pos, j);
                        if here {
                            v0 = add_mod(v0, w, q[j]);
                        } else {
                            v1 = add_mod(v1, w, q[j]);
                        }
                    }
                    fits(j, v0, v1)
                });
                if !hit {
                    continue;
                }
                stats.matches += 1;
                let hyp = Hypothesis {
                    positions: s.positions.clone(),
                    values: s.values.clone(),
                };
                if !s.found.iter().any(|f| same_reconstruction(f, &hyp, y)) {
                    s.found.push(hyp);
                }
            }
        }
    }
    stats.distinct = s.found.len();
    match s.found.len() {
        0 => Err(Error::Unrecoverable),
        1 => Ok(Correction {
            x: s.found[0].apply(y),
            stats,
        }),
        n => Err(Error::Ambiguous(n)),
    }
}

/// Two hypotheses agree outside `[min first, max last]`, so only that span is compared.
fn same_reconstruction(a: &Hypothesis, b: &Hypothesis, y: &[bool]) -> bool {
    let lo = a.positions[0].min(b.positions[0]);
    let hi = *a.positions.last().unwrap().max(b.positions.last().unwrap());
    (lo..=hi).all(|t| a.bit(y, t) == b.bit(y, t))
}
