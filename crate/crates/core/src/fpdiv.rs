//! IEEE-754 division wrapper around the reciprocal engine.
//!
//! Operands are unpacked to sign / unbiased exponent / Q4.60 significand
//! (subnormal inputs normalized), the quotient significand is
//! `sig_a * reciprocal(sig_b)` renormalized into `[1, 2)`, and the result is
//! rounded to nearest-even at pack time. Subnormal results flush to zero and
//! every NaN result uses the canonical quiet NaN.

use crate::error::Result;
use crate::fixed::FixedSig;
use crate::recip::{reciprocal, RecipConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Format {
    Binary32,
    Binary64,
}

impl Format {
    pub const fn frac_bits(self) -> u32 {
        match self {
            Format::Binary32 => 23,
            Format::Binary64 => 52,
        }
    }

    pub const fn exp_bits(self) -> u32 {
        match self {
            Format::Binary32 => 8,
            Format::Binary64 => 11,
        }
    }

    pub const fn bias(self) -> i32 {
        (1 << (self.exp_bits() - 1)) - 1
    }

    pub const fn min_exponent(self) -> i32 {
        1 - self.bias()
    }

    pub const fn max_exponent(self) -> i32 {
        self.bias()
    }

    const fn sign_shift(self) -> u32 {
        self.frac_bits() + self.exp_bits()
    }

    const fn frac_mask(self) -> u64 {
        (1 << self.frac_bits()) - 1
    }

    const fn exp_mask(self) -> u64 {
        (1 << self.exp_bits()) - 1
    }

    pub const fn infinity(self, negative: bool) -> u64 {
        ((negative as u64) << self.sign_shift()) | (self.exp_mask() << self.frac_bits())
    }

    pub const fn zero(self, negative: bool) -> u64 {
        (negative as u64) << self.sign_shift()
    }

    /// Canonical quiet NaN.
    pub const fn nan(self) -> u64 {
        self.infinity(false) | (1 << (self.frac_bits() - 1))
    }

    /// Bits below the format's fraction in a Q4.60 significand.
    const fn guard_bits(self) -> u32 {
        FixedSig::FRAC_BITS - self.frac_bits()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FloatClass {
    Normal,
    Zero,
    Infinity,
    NaN,
    Subnormal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnpackedFloat {
    pub sign: bool,
    pub exponent: i32,
    /// In `[1, 2)` for normal and subnormal values; zero otherwise.
    pub significand: FixedSig,
    pub class: FloatClass,
}

impl UnpackedFloat {
    pub fn is_finite_nonzero(&self) -> bool {
        matches!(self.class, FloatClass::Normal | FloatClass::Subnormal)
    }
}

pub fn unpack(bits: u64, format: Format) -> UnpackedFloat {
    let sign = (bits >> format.sign_shift()) & 1 == 1;
    let biased = ((bits >> format.frac_bits()) & format.exp_mask()) as i32;
    let frac = bits & format.frac_mask();
    let guard = format.guard_bits();
    let special = |class| UnpackedFloat { sign, exponent: 0, significand: FixedSig::ZERO, class };
    if biased == format.exp_mask() as i32 {
        return special(if frac == 0 { FloatClass::Infinity } else { FloatClass::NaN });
    }
    if biased == 0 {
        if frac == 0 {
            return special(FloatClass::Zero);
        }
        // shift the leading one up to the hidden-bit position
        let shift = frac.leading_zeros() - (63 - format.frac_bits());
        return UnpackedFloat {
            sign,
            exponent: format.min_exponent() - shift as i32,
            significand: FixedSig::from_raw((frac << shift) << guard),
            class: FloatClass::Subnormal,
        };
    }
    UnpackedFloat {
        sign,
        exponent: biased - format.bias(),
        significand: FixedSig::from_raw(((1 << format.frac_bits()) | frac) << guard),
        class: FloatClass::Normal,
    }
}

/// Encodes `u`, rounding its significand to nearest-even. Exponents above the
/// format range give infinity; normal values below it flush to zero, while
/// values tagged `Subnormal` are re-encoded exactly.
pub fn pack(u: &UnpackedFloat, format: Format) -> u64 {
    match u.class {
        FloatClass::NaN => return format.nan(),
        FloatClass::Infinity => return format.infinity(u.sign),
        FloatClass::Zero => return format.zero(u.sign),
        FloatClass::Normal | FloatClass::Subnormal => {}
    }
    let guard = format.guard_bits();
    let raw = u.significand.raw();
    debug_assert!((FixedSig::ONE.raw()..FixedSig::TWO.raw()).contains(&raw));
    let mut exponent = u.exponent;
    let (mut mant, rem) = (raw >> guard, raw & ((1 << guard) - 1));
    let half = 1u64 << (guard - 1);
    if rem > half || (rem == half && mant & 1 == 1) {
        mant += 1;
        if mant >> (format.frac_bits() + 1) != 0 {
            mant >>= 1;
            exponent += 1;
        }
    }
    if exponent > format.max_exponent() {
        return format.infinity(u.sign);
    }
    let sign = (u.sign as u64) << format.sign_shift();
    if exponent < format.min_exponent() {
        if u.class != FloatClass::Subnormal {
            return format.zero(u.sign);
        }
        let shift = (format.min_exponent() - exponent) as u32;
        if shift > format.frac_bits() {
            return format.zero(u.sign);
        }
        return sign | (mant >> shift);
    }
    let biased = (exponent + format.bias()) as u64;
    sign | (biased << format.frac_bits()) | (mant & format.frac_mask())
}

/// `a / b` on raw bit patterns of `format`.
///
/// Only fails if the multiplier configuration is too coarse for the seed
/// table (see [`crate::recip::m_fixed`]); every IEEE special case is encoded
/// in the returned pattern.
pub fn divide(a: u64, b: u64, format: Format, cfg: &RecipConfig) -> Result<u64> {
    let (ua, ub) = (unpack(a, format), unpack(b, format));
    let sign = ua.sign ^ ub.sign;
    use FloatClass::*;
    match (ua.class, ub.class) {
        (NaN, _) | (_, NaN) | (Zero, Zero) | (Infinity, Infinity) => return Ok(format.nan()),
        (Infinity, _) | (_, Zero) => return Ok(format.infinity(sign)),
        (Zero, _) | (_, Infinity) => return Ok(format.zero(sign)),
        _ => {}
    }
    // a power-of-two divisor only moves the exponent
    let mut q = if ub.significand == FixedSig::ONE {
        ua.significand
    } else {
        let recip = reciprocal(ub.significand, cfg)?;
        ua.significand.mul(recip, cfg.multiplier)?
    };
    let mut exponent = ua.exponent - ub.exponent;
    if q < FixedSig::ONE {
        q = FixedSig::from_raw(q.raw() << 1);
        exponent -= 1;
    }
    let out = UnpackedFloat { sign, exponent, significand: q, class: Normal };
    Ok(pack(&out, format))
}

pub fn divide_f64(a: f64, b: f64, cfg: &RecipConfig) -> Result<f64> {
    divide(a.to_bits(), b.to_bits(), Format::Binary64, cfg).map(f64::from_bits)
}

pub fn divide_f32(a: f32, b: f32, cfg: &RecipConfig) -> Result<f32> {
    divide(a.to_bits() as u64, b.to_bits() as u64, Format::Binary32, cfg).map(|r| f32::from_bits(r as u32))
}

/// Correctly rounded host division with the same output conventions as
/// [`divide`]: subnormal results flushed to zero, NaN canonicalized.
pub fn reference_divide(a: u64, b: u64, format: Format) -> u64 {
    let bits = match format {
        Format::Binary64 => (f64::from_bits(a) / f64::from_bits(b)).to_bits(),
        Format::Binary32 => (f32::from_bits(a as u32) / f32::from_bits(b as u32)).to_bits() as u64,
    };
    match unpack(bits, format) {
        u if u.class == FloatClass::NaN => format.nan(),
        u if u.class == FloatClass::Subnormal => format.zero(u.sign),
        _ => bits,
    }
}

/// Distance between two patterns in representable steps; `u64::MAX` when
/// exactly one is NaN, `0` when both are.
pub fn ulp_distance(x: u64, y: u64, format: Format) -> u64 {
    let nan = |v| unpack(v, format).class == FloatClass::NaN;
    match (nan(x), nan(y)) {
        (true, true) => return 0,
        (true, false) | (false, true) => return u64::MAX,
        _ => {}
    }
    let sign_bit = 1u64 << format.sign_shift();
    let ordered = |v: u64| -> i128 {
        if v & sign_bit != 0 {
            -((v & !sign_bit) as i128)
        } else {
            v as i128
        }
    };
    (ordered(x) - ordered(y)).unsigned_abs() as u64
}
