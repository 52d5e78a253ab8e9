//! The dense encoder: afterwards every length-`R` window also holds a
//! marker-free stretch, which together with richness makes the output dense.
//!
//! A marker-saturated window is cut into `q` blocks of `m` bits; the inner
//! `q-2` blocks are replaced by the record `(0, Ψ, i-1, 1^ell, 0)`.

use crate::bits::{push_uint, read_uint};
use crate::dense::intermediate;
use crate::dense::packer::Packer;
use crate::dense::scan::{GapBuffer, Scanner};
use crate::error::{Error, Result};
use crate::params::{BlockPacking, CodeParameters};

#[derive(Debug, Clone)]
pub enum BlockCodec {
    Intermediate { k: usize, ell: usize, m: usize },
    Counting(Packer),
}

impl BlockCodec {
    pub fn new(p: &CodeParameters) -> Result<Self> {
        match p.packing() {
            BlockPacking::Intermediate => Ok(Self::Intermediate { k: p.k, ell: p.ell, m: p.m }),
            BlockPacking::Counting => Packer::new(p.k, p.ell, p.q - 2, p.packed_len())
                .map(Self::Counting)
                .ok_or_else(|| Error::Parameters(vec!["packing capacity violated".into()])),
        }
    }

    fn pack(&self, blocks: &[bool], out: &mut Vec<bool>) -> Result<()> {
        match self {
            Self::Intermediate { k, ell, m } => {
                for b in blocks.chunks(*m) {
                    out.extend(intermediate::encode(b, *k, *ell)?);
                }
                Ok(())
            }
            Self::Counting(p) => p.pack(blocks, out),
        }
    }

    fn unpack(&self, packed: &[bool], out: &mut Vec<bool>) -> Result<()> {
        match self {
            Self::Intermediate { k, ell, m } => {
                for b in packed.chunks(m - 1) {
                    out.extend(intermediate::decode(b, *k, *ell)?);
                }
                Ok(())
            }
            Self::Counting(p) => p.unpack(packed, out),
        }
    }
}

fn emit_record(p: &CodeParameters, codec: &BlockCodec, start: usize, inner: &[bool], out: &mut Vec<bool>) -> Result<()> {
    out.push(false);
    codec.pack(inner, out)?;
    push_uint(out, start as u64, p.idx_bits as u32);
    out.extend(std::iter::repeat(true).take(p.ell));
    out.push(false);
    Ok(())
}

pub fn encode(t: &[bool], p: &CodeParameters, codec: &BlockCodec) -> Result<Vec<bool>> {
    let (k, ell, m, r) = (p.k, p.ell, p.m, p.r);
    let mut tail = vec![false; k];
    tail.extend(std::iter::repeat(true).take(ell));
    // pending input, consumed from the back
    let mut pending: Vec<bool> = tail.into_iter().rev().chain(t.iter().rev().copied()).collect();
    let mut t1 = Scanner::new(ell, k, t.len() + m);
    let mut t2 = Vec::new();
    while let Some(bit) = pending.pop() {
        t1.push(bit);
        if t1.tail_saturated(r) {
            let start = t1.len() - r;
            let bits = t1.bits();
            emit_record(p, codec, start, &bits[start + m..start + r - m], &mut t2)?;
            pending.extend(bits[start + r - m..].iter().rev());
            t1.truncate(start + m);
        }
    }
    let mut out = t1.into_bits();
    out.extend_from_slice(&t2);
    debug_assert_eq!(out.len(), t.len() + m);
    Ok(out)
}

pub fn decode(x: &[bool], p: &CodeParameters, codec: &BlockCodec) -> Result<Vec<bool>> {
    let (ell, m, idx) = (p.ell, p.m, p.idx_bits);
    let rec_len = p.record_len();
    let packed_len = p.packed_len();
    let bad = |what: &str| Error::MalformedTrailer(format!("density record: {what}"));
    let mut end = x.len();
    let mut ops = Vec::new();
    while end > 0 && !x[end - 1] {
        if end < rec_len {
            return Err(bad("truncated"));
        }
        let rec = &x[end - rec_len..end];
        if rec[0] || rec[rec_len - 1 - ell..rec_len - 1].iter().any(|&b| !b) {
            return Err(bad("framing"));
        }
        let start = read_uint(&rec[1 + packed_len..1 + packed_len + idx]) as usize;
        let mut inner = Vec::with_capacity(rec_len);
        codec.unpack(&rec[1..1 + packed_len], &mut inner)?;
        ops.push((start + m, inner));
        end -= rec_len;
    }
    if end < m || x[end - m..end - ell].iter().any(|&b| b) || x[end - ell..end].iter().any(|&b| !b) {
        return Err(bad("body lacks its closing pattern"));
    }
    let mut g = GapBuffer::from_vec(x[..end - m].to_vec());
    for (pos, inner) in ops {
        if pos > g.len() {
            return Err(bad("index out of range"));
        }
        g.insert(pos, &inner);
    }
    Ok(g.into_vec())
}

/// Slow restart-scan encoder, kept as a reference.
pub fn encode_reference(t: &[bool], p: &CodeParameters, codec: &BlockCodec) -> Result<Vec<bool>> {
    let (k, ell, m, r) = (p.k, p.ell, p.m, p.r);
    let mut s = t.to_vec();
    s.extend(std::iter::repeat(false).take(k));
    s.extend(std::iter::repeat(true).take(ell));
    let marker_at = |s: &[bool], j: usize| j + ell <= s.len() && s[j..j + ell].iter().all(|&b| b);
    let mut live = t.len();
    loop {
        let found = (0..live).find(|&i| {
            i + r <= s.len() && (i..=i + r - m).all(|j| (j..j + k).any(|l| marker_at(&s, l)))
        });
        let Some(i) = found else { break };
        if i + r - m > live {
            return Err(Error::InvalidInput("excision would reach the appended region".into()));
        }
        let mut rec = Vec::new();
        emit_record(p, codec, i, &s[i + m..i + r - m], &mut rec)?;
        s.drain(i + m..i + r - m);
        live -= r - 2 * m;
        s.extend(rec);
    }
    Ok(s)
}
