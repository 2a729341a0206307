//! Powering unit: produces `x^2 ..= x^P` with the squarer for even powers and
//! the multiplier for odd ones.
//!
//! Schedule: `x^2 = sq(x)`, then per cycle `x^(k+1) = x * x^k` and
//! `x^(k+2) = sq(x^((k+2)/2))` for `k = 2, 4, ...`. Encoder/LOD outputs are
//! memoized per operand, so `x` is encoded once and an even power that
//! already went through the multiplier is squared from cache.

use crate::bitcore::{decompose, UnsignedWord};
use crate::error::{domain, Result};
use crate::fixed::{fixed_product, FixedSig};
use crate::ilm::{run_multiply, IlmConfig};
use crate::squarer::run_square;

/// Largest power the unit will schedule.
pub const MAX_POWER: usize = 16;

/// Cached priority-encoder and LOD outputs of one operand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PowerCache {
    pub k: u32,
    pub residue: UnsignedWord,
}

/// Abstract block invocation counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BlockCounters {
    pub encoder_calls: u64,
    pub lod_calls: u64,
    pub multiplier_uses: u64,
    pub squarer_uses: u64,
    pub cache_hits: u64,
    /// Encoder passes over the base operand `x` itself.
    pub base_encoder_calls: u64,
}

/// An operand together with the encoder results of its residue chain
/// (`n`, `n` minus its top bit, ...), filled lazily one level at a time.
#[derive(Clone, Debug)]
pub struct EncodedOperand {
    value: UnsignedWord,
    is_base: bool,
    levels: Vec<PowerCache>,
}

impl EncodedOperand {
    pub fn new(value: UnsignedWord) -> Self {
        Self { value, is_base: false, levels: Vec::new() }
    }

    pub(crate) fn base(value: UnsignedWord) -> Self {
        Self { is_base: true, ..Self::new(value) }
    }

    pub fn value(&self) -> UnsignedWord {
        self.value
    }

    /// Encoder outputs for chain level `i`, or `None` once the chain has hit
    /// zero. Levels must be requested in order.
    pub(crate) fn level(&mut self, i: usize, counters: &mut BlockCounters) -> Option<PowerCache> {
        if let Some(c) = self.levels.get(i) {
            counters.cache_hits += 1;
            return Some(*c);
        }
        debug_assert_eq!(i, self.levels.len());
        let operand = match i {
            0 => self.value,
            _ => self.levels[i - 1].residue,
        };
        let (k, residue) = decompose(operand).ok()?;
        counters.encoder_calls += 1;
        counters.lod_calls += 1;
        if i == 0 && self.is_base {
            counters.base_encoder_calls += 1;
        }
        let c = PowerCache { k, residue };
        self.levels.push(c);
        Some(c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSet {
    /// `x^2 ..= x^P` in ascending order.
    pub powers: Vec<FixedSig>,
    pub counters: BlockCounters,
}

impl PowerSet {
    /// `x^p` for `2 <= p <= P`.
    pub fn power(&self, p: usize) -> Option<FixedSig> {
        p.checked_sub(2).and_then(|i| self.powers.get(i)).copied()
    }
}

pub fn compute_powers(x: FixedSig, max_power: usize, cfg: IlmConfig) -> Result<PowerSet> {
    if max_power < 2 {
        return Err(domain(format!("max_power {max_power} < 2")));
    }
    if max_power > MAX_POWER {
        return Err(domain(format!("max_power {max_power} > {MAX_POWER}")));
    }
    let mut counters = BlockCounters::default();
    // index p holds x^p; index 0 unused
    let mut values = vec![FixedSig::ZERO; max_power + 1];
    let mut operands: Vec<Option<EncodedOperand>> = vec![None; max_power + 1];
    values[1] = x;
    operands[1] = Some(EncodedOperand::base(x.word()));

    let base = operands[1].as_mut().expect("base operand");
    values[2] = fixed_product(run_square(base, cfg, &mut counters, None))?;

    let mut k = 2;
    while k < max_power {
        let odd = k + 1;
        let (head, tail) = operands.split_at_mut(k);
        let base = head[1].as_mut().expect("base operand");
        let even_op = tail[0].get_or_insert_with(|| EncodedOperand::new(values[k].word()));
        values[odd] = fixed_product(run_multiply(base, even_op, cfg, &mut counters, None))?;

        let even = k + 2;
        if even <= max_power {
            let half = even / 2;
            let op = operands[half].get_or_insert_with(|| EncodedOperand::new(values[half].word()));
            values[even] = fixed_product(run_square(op, cfg, &mut counters, None))?;
        }
        k += 2;
    }

    values.drain(..2);
    Ok(PowerSet { powers: values, counters })
}

/// Combines the odd and even outputs of one cycle.
pub fn pair_sum(odd: FixedSig, even: FixedSig) -> Result<FixedSig> {
    odd.checked_add(even)
}
