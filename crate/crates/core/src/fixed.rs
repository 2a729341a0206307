//! Q4.60 significand arithmetic: 4 integer bits, 60 fraction bits, unsigned.

use std::fmt;

use crate::bitcore::UnsignedWord;
use crate::error::{domain, overflow, Result};
use crate::ilm::{run_multiply, IlmConfig};
use crate::powerunit::{BlockCounters, EncodedOperand};

#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FixedSig(u64);

impl FixedSig {
    pub const FRAC_BITS: u32 = 60;
    pub const ZERO: Self = Self(0);
    pub const ONE: Self = Self(1 << 60);
    pub const TWO: Self = Self(2 << 60);
    pub const MAX: Self = Self(u64::MAX);
    /// One unit in the last place.
    pub const ULP: Self = Self(1);

    pub const fn from_raw(raw: u64) -> Self {
        Self(raw)
    }

    pub const fn raw(self) -> u64 {
        self.0
    }

    pub const fn word(self) -> UnsignedWord {
        UnsignedWord::from_u64(self.0)
    }

    /// Truncates toward zero. Every `f64` in `[2^-8, 16)` converts exactly.
    pub fn from_f64(v: f64) -> Result<Self> {
        if !(v.is_finite() && (0.0..16.0).contains(&v)) {
            return Err(domain(format!("{v} is outside the Q4.60 range [0, 16)")));
        }
        Ok(Self((v * (1u64 << 60) as f64) as u64))
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / (1u64 << 60) as f64
    }

    pub fn checked_add(self, rhs: Self) -> Result<Self> {
        self.0
            .checked_add(rhs.0)
            .map(Self)
            .ok_or_else(|| overflow(format!("{self:?} + {rhs:?} leaves Q4.60")))
    }

    pub fn checked_sub(self, rhs: Self) -> Result<Self> {
        self.0
            .checked_sub(rhs.0)
            .map(Self)
            .ok_or_else(|| overflow(format!("{self:?} - {rhs:?} is negative")))
    }

    /// Product through the logarithmic multiplier, truncated back to Q4.60.
    pub fn mul(self, rhs: Self, cfg: IlmConfig) -> Result<Self> {
        let mut a = EncodedOperand::new(self.word());
        let mut b = EncodedOperand::new(rhs.word());
        fixed_product(run_multiply(&mut a, &mut b, cfg, &mut BlockCounters::default(), None))
    }
}

/// Truncating writeback of a 128-bit Q8.120 product.
pub(crate) fn fixed_product(wide: u128) -> Result<FixedSig> {
    let shifted = wide >> FixedSig::FRAC_BITS;
    u64::try_from(shifted)
        .map(FixedSig)
        .map_err(|_| overflow("product leaves Q4.60"))
}

impl fmt::Debug for FixedSig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FixedSig({:#018x} ~ {})", self.0, self.to_f64())
    }
}

impl fmt::Display for FixedSig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f64(), f)
    }
}
