//! The full code: `x̃ = (E(u), 0^k 1, c1, c2, h_even, h_odd)`.

use std::fmt;

use crate::bits::BitString;
use crate::corrector::{self, CorrectStats, CorrectorHash, CorrectorScratch};
use crate::dense::DenseEncoder;
use crate::error::{Error, Result};
use crate::locator::{LocateTrace, Locator, LocatorHash};
use crate::params::CodeParameters;
use crate::sketch::{InnerSketch, PowerSumSketch};

/// Which side of the separator the decoder found the deletions on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecodeBranch {
    /// Nothing was deleted.
    CleanTail,
    /// All deletions hit the separator or the hashes; the payload is intact.
    CleanPrefix,
    /// Deletions reached the payload and were located and repaired.
    Corrected,
}

impl fmt::Display for DecodeBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::CleanTail => "clean-tail",
            Self::CleanPrefix => "clean-prefix",
            Self::Corrected => "corrected",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeTrace {
    pub k_prime: usize,
    pub branch: DecodeBranch,
    pub locate: Option<LocateTrace>,
    pub correct: Option<CorrectStats>,
}

/// Bit lengths of each codeword section.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub n: usize,
    pub dense_len: usize,
    pub buffer_len: usize,
    pub loc_len: usize,
    pub cor_len: usize,
}

impl Layout {
    pub fn total(&self) -> usize {
        self.dense_len + self.buffer_len + self.loc_len + self.cor_len
    }

    pub fn redundancy(&self) -> usize {
        self.total() - self.n
    }

    /// Redundancy added by the dense encoding, `2ℓ + m`.
    pub fn dense_overhead(&self) -> usize {
        self.dense_len - self.n
    }
}

#[derive(Debug)]
pub struct Codec {
    params: CodeParameters,
    dense: DenseEncoder,
    sketch: Box<dyn InnerSketch>,
    layout: Layout,
}

impl Codec {
    pub fn new(params: &CodeParameters) -> Result<Self> {
        let sketch = PowerSumSketch::with_reach(params.block_len, params.syndromes, params.dense_len());
        Self::with_sketch(params, Box::new(sketch))
    }

    pub fn with_sketch(params: &CodeParameters, sketch: Box<dyn InnerSketch>) -> Result<Self> {
        let dense = DenseEncoder::new(params)?;
        let layout = Layout {
            n: params.n,
            dense_len: params.dense_len(),
            buffer_len: params.k + 1,
            loc_len: LocatorHash::wire_len(params),
            cor_len: CorrectorHash::wire_len(sketch.as_ref()),
        };
        Ok(Self {
            params: params.clone(),
            dense,
            sketch,
            layout,
        })
    }

    pub fn params(&self) -> &CodeParameters {
        &self.params
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn sketch(&self) -> &dyn InnerSketch {
        self.sketch.as_ref()
    }

    pub fn dense(&self) -> &DenseEncoder {
        &self.dense
    }

    pub fn encode(&self, u: &BitString) -> Result<BitString> {
        let x = self.dense.encode(u)?;
        let x = x.as_slice();
        let mut out = Vec::with_capacity(self.layout.total());
        out.extend_from_slice(x);
        out.extend(std::iter::repeat(false).take(self.params.k));
        out.push(true);
        LocatorHash::compute(x, &self.params).to_bits(&self.params, &mut out);
        CorrectorHash::compute(x, self.sketch()).to_bits(self.sketch(), &mut out);
        debug_assert_eq!(out.len(), self.layout.total());
        Ok(BitString::from(out))
    }

    pub fn decoder(&self) -> Decoder<'_> {
        Decoder {
            codec: self,
            locator: Locator::new(&self.params),
            scratch: CorrectorScratch::default(),
        }
    }

    pub fn decode(&self, y: &BitString) -> Result<BitString> {
        self.decoder().decode(y.as_slice()).map(|(u, _)| BitString::from(u))
    }

    pub fn decode_traced(&self, y: &BitString) -> Result<(BitString, DecodeTrace)> {
        self.decoder().decode(y.as_slice()).map(|(u, t)| (BitString::from(u), t))
    }
}

/// Decoding state that can be reused across many received strings.
pub struct Decoder<'a> {
    codec: &'a Codec,
    locator: Locator,
    scratch: CorrectorScratch,
}

impl Decoder<'_> {
    /// Recovers the dense payload `x` without inverting the dense encoding.
    pub fn recover_payload(&mut self, y: &[bool]) -> Result<(Vec<bool>, DecodeTrace)> {
        let c = self.codec;
        let p = &c.params;
        let total = c.layout.total();
        let x_len = c.layout.dense_len;
        if y.len() > total || total - y.len() > p.k {
            return Err(Error::InvalidInput(format!(
                "received length {} is not within {} of {total}",
                y.len(),
                p.k
            )));
        }
        let kp = total - y.len();
        let mut trace = DecodeTrace {
            k_prime: kp,
            branch: DecodeBranch::CleanTail,
            locate: None,
            correct: None,
        };
        if kp == 0 {
            return Ok((y[..x_len].to_vec(), trace));
        }
        let alpha = x_len + p.k - kp;
        if !y[alpha] {
            trace.branch = DecodeBranch::CleanPrefix;
            return Ok((y[..x_len].to_vec(), trace));
        }
        trace.branch = DecodeBranch::Corrected;
        let tail = &y[y.len() - c.layout.loc_len - c.layout.cor_len..];
        let loc = LocatorHash::from_bits(&tail[..c.layout.loc_len], p)?;
        let cor = CorrectorHash::from_bits(&tail[c.layout.loc_len..], c.sketch())?;
        let body = &y[..x_len - kp];
        let lt = self.locator.locate(body, kp, &loc)?;
        trace.locate = Some(lt);
        let fixed = corrector::correct(body, x_len, p.k, lt.interval, &cor, c.sketch(), &mut self.scratch)?;
        trace.correct = Some(fixed.stats);
        Ok((fixed.x, trace))
    }

    pub fn decode(&mut self, y: &[bool]) -> Result<(Vec<bool>, DecodeTrace)> {
        let (x, trace) = self.recover_payload(y)?;
        let u = self.codec.dense.decode(&BitString::from(x))?;
        Ok((u.into_vec(), trace))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn codec(n: usize) -> Codec {
        Codec::new(&CodeParameters::scaled(2, n, 2).unwrap()).unwrap()
    }

    #[test]
    fn layout_arithmetic() {
        let c = codec(20);
        let p = c.params();
        let l = c.layout();
        assert_eq!(l.dense_len, 20 + 2 * p.ell + p.m);
        assert_eq!(l.buffer_len, 3);
        assert_eq!(l.loc_len, 3 + 7);
        assert_eq!(p.block_len, 28);
        assert_eq!(c.sketch().field_widths(), &[5, 10, 15, 20, 25]);
        assert_eq!(l.cor_len, 150);
        assert_eq!(l.total(), 28 + 3 + 10 + 150);
        let u = BitString::zeros(20);
        assert_eq!(c.encode(&u).unwrap().len(), l.total());
    }

    #[test]
    fn clean_round_trip() {
        let c = codec(64);
        let u: BitString = (0..64).map(|i| i % 3 == 0).collect();
        let x = c.encode(&u).unwrap();
        let (got, t) = c.decode_traced(&x).unwrap();
        assert_eq!(got, u);
        assert_eq!(t.branch, DecodeBranch::CleanTail);
    }

    #[test]
    fn tail_deletion_uses_prefix() {
        let c = codec(64);
        let u: BitString = (0..64).map(|i| i % 5 == 1).collect();
        let x = c.encode(&u).unwrap();
        let mut y = x.clone().into_vec();
        y.remove(x.len() - 3);
        let (got, t) = c.decode_traced(&BitString::from(y)).unwrap();
        assert_eq!(got, u);
        assert_eq!(t.branch, DecodeBranch::CleanPrefix);
    }

    #[test]
    fn payload_deletion_is_corrected() {
        let c = codec(64);
        let u: BitString = (0..64).map(|i| i % 7 < 3).collect();
        let x = c.encode(&u).unwrap();
        for a in 0..c.layout().dense_len + 2 {
            let mut y = x.clone().into_vec();
            y.drain(a..a + 2);
            let (got, t) = c.decode_traced(&BitString::from(y)).unwrap();
            assert_eq!(got, u, "a={a}");
            if a + 2 <= c.layout().dense_len {
                assert_eq!(t.branch, DecodeBranch::Corrected);
            }
        }
    }

    #[test]
    fn wrong_length_rejected() {
        let c = codec(20);
        let x = c.encode(&BitString::zeros(20)).unwrap();
        assert!(c.decode(&x.slice(0..x.len() - 3)).is_err());
    }
}
