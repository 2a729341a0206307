//! Bit-accurate model of a floating-point divider that forms reciprocals from
//! a Taylor-series polynomial. The polynomial's powers come from an iterative
//! logarithmic multiplier and a squaring unit derived from it, and a
//! piecewise-linear seed table supplies the starting estimate.

pub mod bitcore;
pub mod error;
pub mod fixed;
pub mod fpdiv;
pub mod ilm;
pub mod powerunit;
pub mod recip;
pub mod seedgen;
pub mod squarer;

pub use bitcore::UnsignedWord;
pub use error::{Error, Result};
pub use fixed::FixedSig;
pub use fpdiv::{divide, pack, unpack, FloatClass, Format, UnpackedFloat};
pub use ilm::{IlmConfig, IlmTrace};
pub use powerunit::{compute_powers, BlockCounters, PowerCache, PowerSet};
pub use recip::{reciprocal, RecipConfig};
pub use seedgen::{SeedSegment, SeedTable};
