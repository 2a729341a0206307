//! Squaring unit: the multiplier with both operands tied together, so every
//! level needs a single encoder pass and `4^k` is a plain shift.

use crate::bitcore::{decompose, UnsignedWord};
use crate::error::Result;
use crate::ilm::{IlmConfig, IlmTrace};
use crate::powerunit::{BlockCounters, EncodedOperand};

#[inline]
pub(crate) fn square_term(k: u32, r: u64) -> u128 {
    (1u128 << (2 * k)) + ((r as u128) << (k + 1))
}

/// `(4^k + 2^(k+1) * r, r)`: iteration-0 approximation of `n^2` and the
/// operand of the next level.
pub fn base_term(n: UnsignedWord) -> Result<(u128, UnsignedWord)> {
    let (k, r) = decompose(n)?;
    Ok((square_term(k, r.value()), r))
}

pub fn square(n: UnsignedWord, cfg: IlmConfig) -> IlmTrace {
    let mut op = EncodedOperand::new(n);
    let mut terms = Vec::new();
    run_square(&mut op, cfg, &mut BlockCounters::default(), Some(&mut terms));
    IlmTrace::from_terms(terms)
}

pub(crate) fn run_square(
    n: &mut EncodedOperand,
    cfg: IlmConfig,
    counters: &mut BlockCounters,
    mut terms: Option<&mut Vec<u128>>,
) -> u128 {
    counters.squarer_uses += 1;
    let mut total = 0u128;
    let mut level = 0usize;
    while let Some(c) = n.level(level, counters) {
        let term = square_term(c.k, c.residue.value());
        total += term;
        if let Some(t) = terms.as_deref_mut() {
            t.push(term);
        }
        if !cfg.allows(level as u32) {
            break;
        }
        level += 1;
    }
    total
}
