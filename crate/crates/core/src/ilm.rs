//! Iterative logarithmic multiplier.
//!
//! Each level approximates the product of the current operands with the
//! Mitchell term `2^(k1+k2) + 2^k2 * r1 + 2^k1 * r2` and hands the residue
//! pair `(r1, r2)` to the next level, whose product is exactly the error left
//! behind. Stopping early gives an underestimate; running until a residue
//! vanishes gives the exact product.

use std::fmt;
use std::str::FromStr;

use crate::bitcore::{decompose, UnsignedWord};
use crate::error::{domain, Error, Result};
use crate::powerunit::{BlockCounters, EncodedOperand};

/// How many correction terms the multiplier adds after the base term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum IlmConfig {
    /// Iterate until an error operand reaches zero.
    #[default]
    Exact,
    /// At most this many corrections; `Iterations(0)` is plain Mitchell.
    Iterations(u32),
}

impl IlmConfig {
    pub(crate) fn allows(self, corrections_done: u32) -> bool {
        match self {
            IlmConfig::Exact => true,
            IlmConfig::Iterations(limit) => corrections_done < limit,
        }
    }
}

impl fmt::Display for IlmConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IlmConfig::Exact => f.write_str("exact"),
            IlmConfig::Iterations(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for IlmConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("exact") {
            return Ok(IlmConfig::Exact);
        }
        s.parse::<u32>()
            .map(IlmConfig::Iterations)
            .map_err(|_| domain(format!("expected an iteration count or `exact`, got `{s}`")))
    }
}

/// Per-level terms of one multiplication.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IlmTrace {
    pub base_terms: Vec<u128>,
    pub final_product: u128,
    /// Correction terms added after the base term.
    pub iterations_used: u32,
}

impl IlmTrace {
    pub(crate) fn from_terms(base_terms: Vec<u128>) -> Self {
        let mut base_terms = base_terms;
        if base_terms.is_empty() {
            base_terms.push(0);
        }
        let final_product = base_terms.iter().sum();
        let iterations_used = base_terms.len() as u32 - 1;
        Self { base_terms, final_product, iterations_used }
    }

    /// Partial sums after each level.
    pub fn partial_sums(&self) -> Vec<u128> {
        self.base_terms
            .iter()
            .scan(0u128, |acc, t| {
                *acc += t;
                Some(*acc)
            })
            .collect()
    }
}

#[inline]
pub(crate) fn mitchell_term(k1: u32, r1: u64, k2: u32, r2: u64) -> u128 {
    (1u128 << (k1 + k2)) + ((r1 as u128) << k2) + ((r2 as u128) << k1)
}

/// Iteration-0 approximation of `n1 * n2`.
pub fn mitchell_base(n1: UnsignedWord, n2: UnsignedWord) -> Result<u128> {
    let (k1, r1) = decompose(n1)?;
    let (k2, r2) = decompose(n2)?;
    Ok(mitchell_term(k1, r1.value(), k2, r2.value()))
}

/// Operands whose product is the error of the base term.
pub fn error_operands(n1: UnsignedWord, n2: UnsignedWord) -> Result<(UnsignedWord, UnsignedWord)> {
    let (_, r1) = decompose(n1)?;
    let (_, r2) = decompose(n2)?;
    Ok((r1, r2))
}

pub fn multiply(n1: UnsignedWord, n2: UnsignedWord, cfg: IlmConfig) -> IlmTrace {
    let mut a = EncodedOperand::new(n1);
    let mut b = EncodedOperand::new(n2);
    let mut terms = Vec::new();
    run_multiply(&mut a, &mut b, cfg, &mut BlockCounters::default(), Some(&mut terms));
    IlmTrace::from_terms(terms)
}

/// Shared multiply loop. Encoder results come from (and are memoized in) the
/// operand chains, so cached operands skip the encoder entirely.
pub(crate) fn run_multiply(
    a: &mut EncodedOperand,
    b: &mut EncodedOperand,
    cfg: IlmConfig,
    counters: &mut BlockCounters,
    mut terms: Option<&mut Vec<u128>>,
) -> u128 {
    counters.multiplier_uses += 1;
    let mut total = 0u128;
    let mut level = 0usize;
    loop {
        let Some(ca) = a.level(level, counters) else { break };
        let Some(cb) = b.level(level, counters) else { break };
        let term = mitchell_term(ca.k, ca.residue.value(), cb.k, cb.residue.value());
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
