//! Zero-error binary codes that correct up to `k` deletions confined to a
//! single window of length `k`.
//!
//! The codeword is `(E(u), 0^k 1, c1, c2, h_even, h_odd)`: a dense encoding of
//! the message, a separator, a locator hash that pins the deletions to an
//! interval, and block sketches that repair the affected blocks.

pub mod bits;
pub mod channel;
pub mod cli;
pub mod codec;
pub mod container;
pub mod corrector;
pub mod dense;
pub mod error;
pub mod locator;
pub mod params;
pub mod patterns;
pub mod sketch;

pub use bits::BitString;
pub use codec::{Codec, DecodeBranch, DecodeTrace};
pub use error::{Error, Result};
pub use params::{CodeParameters, ParamMode, ScaledOverrides};
pub use patterns::PatternFamily;
