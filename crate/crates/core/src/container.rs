//! The `LDEL` file container.
//!
//! ```text
//! magic "LDEL" | version u8 | role u8 | k u32 | n u32 | mode u8
//! [scaled: ell u32 | blocks u32 | b u32 | block_len u32 | syndromes u32]
//! sketch name: len u8, bytes | sketch_len u32
//! [corrupted: original length u64]
//! bit_length u64 | payload, MSB-first, zero-padded
//! ```
//! All integers are big-endian.

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::params::{CodeParameters, ParamMode, ScaledOverrides};

pub const MAGIC: &[u8; 4] = b"LDEL";
pub const VERSION: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Message,
    Codeword,
    Corrupted,
}

impl Role {
    fn byte(self) -> u8 {
        match self {
            Self::Message => 0,
            Self::Codeword => 1,
            Self::Corrupted => 2,
        }
    }

    fn from_byte(b: u8) -> Result<Self> {
        match b {
            0 => Ok(Self::Message),
            1 => Ok(Self::Codeword),
            2 => Ok(Self::Corrupted),
            _ => Err(Error::Container(format!("unknown role {b}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Container {
    pub role: Role,
    pub params: CodeParameters,
    pub sketch: String,
    pub sketch_len: u32,
    /// Codeword length before corruption; present only for corrupted files.
    pub original_len: Option<u64>,
    pub payload: BitString,
}

fn u32_of(v: usize, what: &str) -> Result<[u8; 4]> {
    u32::try_from(v)
        .map(u32::to_be_bytes)
        .map_err(|_| Error::Container(format!("{what} does not fit in 32 bits")))
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(Error::Container("truncated header".into()));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<usize> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()) as usize)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().unwrap()))
    }
}

impl Container {
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let p = &self.params;
        let mut out = Vec::with_capacity(64 + self.payload.len() / 8);
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.push(self.role.byte());
        out.extend(u32_of(p.k, "k")?);
        out.extend(u32_of(p.n, "n")?);
        match p.mode {
            ParamMode::Paper => out.push(0),
            ParamMode::Scaled => {
                out.push(1);
                for (v, what) in [
                    (p.ell, "ell"),
                    (p.q, "blocks"),
                    (p.b, "B"),
                    (p.block_len, "block length"),
                    (p.syndromes, "syndromes"),
                ] {
                    out.extend(u32_of(v, what)?);
                }
            }
        }
        let name = self.sketch.as_bytes();
        let len = u8::try_from(name.len()).map_err(|_| Error::Container("sketch name too long".into()))?;
        out.push(len);
        out.extend_from_slice(name);
        out.extend(self.sketch_len.to_be_bytes());
        match (self.role, self.original_len) {
            (Role::Corrupted, Some(n)) => out.extend(n.to_be_bytes()),
            (Role::Corrupted, None) => return Err(Error::Container("corrupted file needs its original length".into())),
            (_, Some(_)) => return Err(Error::Container("only corrupted files carry an original length".into())),
            _ => {}
        }
        out.extend((self.payload.len() as u64).to_be_bytes());
        out.extend(self.payload.to_bytes());
        Ok(out)
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self> {
        let mut r = Reader { buf, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(Error::Container("bad magic".into()));
        }
        let version = r.u8()?;
        if version != VERSION {
            return Err(Error::Container(format!("unsupported version {version}")));
        }
        let role = Role::from_byte(r.u8()?)?;
        let k = r.u32()?;
        let n = r.u32()?;
        let params = match r.u8()? {
            0 => CodeParameters::paper(k, n),
            1 => {
                let o = ScaledOverrides {
                    ell: Some(r.u32()?),
                    blocks: Some(r.u32()?),
                    b: Some(r.u32()?),
                    block_len: Some(r.u32()?),
                    syndromes: Some(r.u32()?),
                };
                CodeParameters::scaled_with(k, n, &o)
            }
            m => return Err(Error::Container(format!("unknown parameter mode {m}"))),
        }?;
        let name_len = r.u8()? as usize;
        let sketch = std::str::from_utf8(r.take(name_len)?)
            .map_err(|_| Error::Container("sketch name is not UTF-8".into()))?
            .to_owned();
        let sketch_len = r.u32()? as u32;
        let original_len = match role {
            Role::Corrupted => Some(r.u64()?),
            _ => None,
        };
        let bits = r.u64()?;
        let rest = &buf[r.pos..];
        if bits.div_ceil(8) != rest.len() as u64 {
            return Err(Error::Container(format!(
                "payload of {} bytes does not hold {bits} bits",
                rest.len()
            )));
        }
        let payload = BitString::from_bytes(rest, bits as usize).map_err(|e| Error::Container(e.to_string()))?;
        if bits % 8 != 0 && rest[rest.len() - 1] & (0xff >> (bits % 8)) != 0 {
            return Err(Error::Container("nonzero pad bits".into()));
        }
        Ok(Self {
            role,
            params,
            sketch,
            sketch_len,
            original_len,
            payload,
        })
    }
}
