//! Bit-level blocks shared by the multiplier, squarer and powering unit.
//!
//! `leading_one` plays the role of the priority encoder, `residue` the
//! leading-one detector (operand with its top bit cleared) and `shift_left`
//! the barrel shifter.

use crate::error::{domain, overflow, Result};

/// An unsigned operand of fixed bit width (1..=64).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnsignedWord {
    value: u64,
    width: u32,
}

impl UnsignedWord {
    pub fn new(value: u64, width: u32) -> Result<Self> {
        if !(1..=64).contains(&width) {
            return Err(domain(format!("width {width} outside 1..=64")));
        }
        if width < 64 && value >> width != 0 {
            return Err(domain(format!("value {value:#x} does not fit in {width} bits")));
        }
        Ok(Self { value, width })
    }

    /// Full 64-bit word.
    pub const fn from_u64(value: u64) -> Self {
        Self { value, width: 64 }
    }

    pub const fn value(self) -> u64 {
        self.value
    }

    pub const fn width(self) -> u32 {
        self.width
    }

    pub const fn is_zero(self) -> bool {
        self.value == 0
    }

    /// Same width, smaller value. Only used for residues, which never grow.
    pub(crate) const fn narrowed(self, value: u64) -> Self {
        Self { value, width: self.width }
    }
}

/// Index `k` of the most significant set bit, so that `2^k <= n < 2^(k+1)`.
pub fn leading_one(n: UnsignedWord) -> Result<u32> {
    if n.is_zero() {
        return Err(domain("leading_one of zero"));
    }
    Ok(63 - n.value.leading_zeros())
}

/// `n` with its leading one cleared, i.e. `n - 2^leading_one(n)`.
pub fn residue(n: UnsignedWord) -> Result<UnsignedWord> {
    let k = leading_one(n)?;
    Ok(n.narrowed(n.value ^ (1u64 << k)))
}

/// Both encoder outputs at once.
pub fn decompose(n: UnsignedWord) -> Result<(u32, UnsignedWord)> {
    let k = leading_one(n)?;
    Ok((k, n.narrowed(n.value ^ (1u64 << k))))
}

/// `n * 2^amount` in a 128-bit result.
pub fn shift_left(n: UnsignedWord, amount: u32) -> Result<u128> {
    shl_wide(n.value as u128, amount)
}

pub(crate) fn shl_wide(v: u128, amount: u32) -> Result<u128> {
    if amount >= 128 {
        return Err(overflow(format!("shift amount {amount} >= 128")));
    }
    if v != 0 && v.leading_zeros() < amount {
        return Err(overflow(format!("{v:#x} << {amount} exceeds 128 bits")));
    }
    Ok(v << amount)
}
