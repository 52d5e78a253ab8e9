//! Compression of marker-free windows.
//!
//! A length-`B` window is cut into `B/ell` blocks. No block equals `1^ell`, so
//! each is a digit in base `2^ell - 1`; the digit string is rewritten in binary.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::bits::{has_run, read_uint};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Phi {
    ell: usize,
    window: usize,
    out_len: usize,
    base: u64,
    /// Digits per u64 chunk and the chunk radix `base^chunk`.
    chunk: usize,
    chunk_radix: BigUint,
}

impl Phi {
    pub fn new(ell: usize, window: usize, out_len: usize) -> Self {
        assert!((2..32).contains(&ell) && window % ell == 0);
        let base = (1u64 << ell) - 1;
        let mut chunk = 1;
        while (base as u128).pow(chunk as u32 + 1) <= u64::MAX as u128 {
            chunk += 1;
        }
        Self {
            ell,
            window,
            out_len,
            base,
            chunk,
            chunk_radix: BigUint::from(base).pow(chunk as u32),
        }
    }

    pub fn out_len(&self) -> usize {
        self.out_len
    }

    pub fn compress(&self, s: &[bool], out: &mut Vec<bool>) -> Result<()> {
        if s.len() != self.window {
            return Err(Error::InvalidInput(format!(
                "window has length {}, expected {}",
                s.len(),
                self.window
            )));
        }
        if has_run(s, self.ell) {
            return Err(Error::InvalidInput("window contains a marker".into()));
        }
        let digits: Vec<u64> = s.chunks(self.ell).map(read_uint).collect();
        let mut v = BigUint::zero();
        for group in digits.chunks(self.chunk) {
            let mut c = 0u64;
            for &d in group {
                c = c * self.base + d;
            }
            let radix = if group.len() == self.chunk {
                self.chunk_radix.clone()
            } else {
                BigUint::from(self.base).pow(group.len() as u32)
            };
            v = v * radix + BigUint::from(c);
        }
        if v.bits() > self.out_len as u64 {
            return Err(Error::InvalidInput("compressed window exceeds its length".into()));
        }
        for i in (0..self.out_len as u64).rev() {
            out.push(v.bit(i));
        }
        Ok(())
    }

    pub fn expand(&self, c: &[bool], out: &mut Vec<bool>) -> Result<()> {
        if c.len() != self.out_len {
            return Err(Error::MalformedTrailer("compressed window has the wrong length".into()));
        }
        let mut v = BigUint::zero();
        for &b in c {
            v <<= 1u32;
            if b {
                v += 1u32;
            }
        }
        let n_digits = self.window / self.ell;
        let mut digits = vec![0u64; n_digits];
        let full = n_digits / self.chunk;
        let tail = n_digits % self.chunk;
        let mut pos = n_digits;
        let mut take = |v: &mut BigUint, count: usize, radix: &BigUint, pos: &mut usize| {
            let (q, r) = v.div_rem(radix);
            let mut r = r.to_u64().expect("chunk fits u64");
            for _ in 0..count {
                *pos -= 1;
                digits[*pos] = r % self.base;
                r /= self.base;
            }
            *v = q;
        };
        // the final group is the short one when the digit count is not a multiple
        if tail > 0 {
            let radix = BigUint::from(self.base).pow(tail as u32);
            take(&mut v, tail, &radix, &mut pos);
        }
        for _ in 0..full {
            take(&mut v, self.chunk, &self.chunk_radix, &mut pos);
        }
        if !v.is_zero() {
            return Err(Error::MalformedTrailer("compressed window out of range".into()));
        }
        for d in digits {
            for i in (0..self.ell).rev() {
                out.push(d >> i & 1 == 1);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::CodeParameters;
    use proptest::prelude::*;

    fn marker_free(len: usize, ell: usize) -> impl Strategy<Value = Vec<bool>> {
        proptest::collection::vec(any::<bool>(), len).prop_map(move |mut v| {
            let mut run = 0;
            for b in v.iter_mut() {
                run = if *b { run + 1 } else { 0 };
                if run >= ell {
                    *b = false;
                    run = 0;
                }
            }
            v
        })
    }

    #[test]
    fn zeros_round_trip() {
        let p = CodeParameters::scaled(2, 20, 2).unwrap();
        let phi = Phi::new(p.ell, p.b, p.phi_len);
        let mut c = Vec::new();
        phi.compress(&vec![false; p.b], &mut c).unwrap();
        assert_eq!(c, vec![false; p.phi_len]);
        let mut back = Vec::new();
        phi.expand(&c, &mut back).unwrap();
        assert_eq!(back, vec![false; p.b]);
    }

    #[test]
    fn rejects_marker() {
        let phi = Phi::new(2, 6, 6);
        let mut c = Vec::new();
        assert!(phi.compress(&[false, true, true, false, false, false], &mut c).is_err());
    }

    #[test]
    fn paper_length_arithmetic() {
        for (k, n) in [(2usize, 1usize << 20), (4, 1 << 24), (8, 1 << 30)] {
            let p = CodeParameters::paper_unchecked(k, n).unwrap();
            let lk = crate::bits::ceil_log2(k as u64) as usize;
            assert!(p.phi_len <= p.b - p.idx_bits - 2 * lk - 10);
            assert!(p.violations().iter().all(|v| !v.contains("φ")), "{:?}", p.violations());
        }
    }

    proptest! {
        #[test]
        fn round_trip_ell2(s in marker_free(54, 2)) {
            let phi = Phi::new(2, 54, 43);
            let mut c = Vec::new();
            phi.compress(&s, &mut c).unwrap();
            prop_assert_eq!(c.len(), 43);
            let mut back = Vec::new();
            phi.expand(&c, &mut back).unwrap();
            prop_assert_eq!(back, s);
        }

        #[test]
        fn round_trip_ell5(s in marker_free(5 * 40, 5)) {
            let phi = Phi::new(5, 200, 199);
            let mut c = Vec::new();
            phi.compress(&s, &mut c).unwrap();
            let mut back = Vec::new();
            phi.expand(&c, &mut back).unwrap();
            prop_assert_eq!(back, s);
        }
    }
}
