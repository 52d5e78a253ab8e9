//! The injective map `E(u) = T(T_e(u))` onto dense strings, and its inverse.

pub mod density;
pub mod enrich;
pub mod intermediate;
pub mod packer;
pub mod phi;
pub mod scan;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::params::CodeParameters;

pub use density::BlockCodec;
pub use phi::Phi;

#[derive(Debug, Clone)]
pub struct DenseEncoder {
    params: CodeParameters,
    phi: Phi,
    blocks: BlockCodec,
}

impl DenseEncoder {
    pub fn new(params: &CodeParameters) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params: params.clone(),
            phi: Phi::new(params.ell, params.b, params.phi_len),
            blocks: BlockCodec::new(params)?,
        })
    }

    pub fn params(&self) -> &CodeParameters {
        &self.params
    }

    pub fn phi(&self) -> &Phi {
        &self.phi
    }

    pub fn block_codec(&self) -> &BlockCodec {
        &self.blocks
    }

    pub fn marker_enrich(&self, u: &BitString) -> Result<BitString> {
        self.check_len(u.len(), self.params.n, "message")?;
        enrich::encode(u.as_slice(), &self.params, &self.phi).map(BitString::from)
    }

    pub fn marker_enrich_inv(&self, t: &BitString) -> Result<BitString> {
        let u = enrich::decode(t.as_slice(), &self.params, &self.phi)?;
        self.check_len(u.len(), self.params.n, "decoded message")?;
        Ok(BitString::from(u))
    }

    pub fn dense_encode(&self, t: &BitString) -> Result<BitString> {
        self.check_len(t.len(), self.params.enriched_len(), "enriched string")?;
        density::encode(t.as_slice(), &self.params, &self.blocks).map(BitString::from)
    }

    pub fn dense_decode(&self, x: &BitString) -> Result<BitString> {
        let t = density::decode(x.as_slice(), &self.params, &self.blocks)?;
        self.check_len(t.len(), self.params.enriched_len(), "decoded enriched string")?;
        Ok(BitString::from(t))
    }

    /// `E(u)`.
    pub fn encode(&self, u: &BitString) -> Result<BitString> {
        self.dense_encode(&self.marker_enrich(u)?)
    }

    /// `E⁻¹(x)`: inverts the dense stage, then enrichment.
    pub fn decode(&self, x: &BitString) -> Result<BitString> {
        self.marker_enrich_inv(&self.dense_decode(x)?)
    }

    fn check_len(&self, got: usize, want: usize, what: &str) -> Result<()> {
        if got == want {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("{what} has length {got}, expected {want}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::PatternFamily;

    #[test]
    fn injective_on_all_short_messages() {
        let p = CodeParameters::scaled(2, 10, 2).unwrap();
        let e = DenseEncoder::new(&p).unwrap();
        let mut seen = std::collections::HashSet::new();
        for v in 0u32..1 << 10 {
            let u: BitString = (0..10).map(|i| v >> i & 1 == 1).collect();
            let x = e.encode(&u).unwrap();
            assert_eq!(x.len(), 10 + 2 * p.ell + p.m);
            assert!(seen.insert(x.clone()));
            assert_eq!(e.decode(&x).unwrap(), u);
        }
    }

    #[test]
    fn output_is_dense() {
        let p = CodeParameters::scaled(3, 2000, 2).unwrap();
        let e = DenseEncoder::new(&p).unwrap();
        let fam = PatternFamily::from_params(&p);
        for u in [BitString::zeros(2000), BitString::ones(2000)] {
            let x = e.encode(&u).unwrap();
            assert!(fam.is_dense(&x, p.delta).unwrap());
            assert_eq!(e.decode(&x).unwrap(), u);
        }
    }
}
