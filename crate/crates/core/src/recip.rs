//! Taylor-series reciprocal of a significand in `[1, 2)`.
//!
//! With the seed `y0` and `m = 1 - x*y0`, `1/x = y0 * (1 + m + m^2 + ...)`.
//! The powers of `m` come from the powering unit, consecutive odd/even
//! pairs are added together, and every product is truncated to Q4.60.

use crate::error::{domain, Error, Result};
use crate::fixed::{fixed_product, FixedSig};
use crate::ilm::{run_multiply, IlmConfig};
use crate::powerunit::{compute_powers, pair_sum, BlockCounters, EncodedOperand, MAX_POWER};
use crate::seedgen::{SeedSegment, SeedTable};

/// Overshoot of `x*y0` above one that is clamped instead of rejected (2^-20).
pub const SEED_OVERSHOOT_LIMIT: FixedSig = FixedSig::from_raw(1 << 40);

#[derive(Clone, Debug, PartialEq)]
pub struct RecipConfig {
    pub table: SeedTable,
    /// Highest power of `m` in the polynomial.
    pub terms: u32,
    pub multiplier: IlmConfig,
}

impl RecipConfig {
    pub fn new(table: SeedTable, terms: u32, multiplier: IlmConfig) -> Result<Self> {
        if terms as usize > MAX_POWER {
            return Err(domain(format!("terms {terms} exceeds {MAX_POWER}")));
        }
        if table.start() > 1.0 || table.end() < 2.0 {
            return Err(domain("seed table must cover [1, 2]"));
        }
        Ok(Self { table, terms, multiplier })
    }

    pub fn with_terms(terms: u32) -> Result<Self> {
        Self::new(SeedTable::default(), terms, IlmConfig::Exact)
    }
}

impl Default for RecipConfig {
    fn default() -> Self {
        Self { table: SeedTable::default(), terms: 5, multiplier: IlmConfig::Exact }
    }
}

/// Intermediate values of one reciprocal evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecipTrace {
    pub x: FixedSig,
    pub segment: usize,
    pub y0: FixedSig,
    pub m: FixedSig,
    /// `x*y0` came out slightly above one and `m` was clamped to zero.
    pub clamped: bool,
    /// `m^1 ..= m^terms`.
    pub powers: Vec<FixedSig>,
    /// Polynomial sum after each stage, starting from `1`.
    pub partial_sums: Vec<FixedSig>,
    pub counters: BlockCounters,
    pub result: FixedSig,
}

fn product(a: FixedSig, b: FixedSig, cfg: IlmConfig) -> u128 {
    let mut ea = EncodedOperand::new(a.word());
    let mut eb = EncodedOperand::new(b.word());
    run_multiply(&mut ea, &mut eb, cfg, &mut BlockCounters::default(), None)
}

/// `intercept - |slope| * x`.
pub fn seed(x: FixedSig, seg: &SeedSegment, cfg: IlmConfig) -> Result<FixedSig> {
    let sx = fixed_product(product(seg.slope(), x, cfg))?;
    seg.intercept().checked_sub(sx)
}

/// `max(0, 1 - x*y0)`.
pub fn m_fixed(x: FixedSig, y0: FixedSig, cfg: IlmConfig) -> Result<FixedSig> {
    m_fixed_flagged(x, y0, cfg).map(|(m, _)| m)
}

fn m_fixed_flagged(x: FixedSig, y0: FixedSig, cfg: IlmConfig) -> Result<(FixedSig, bool)> {
    let wide = product(x, y0, cfg);
    let xy = fixed_product(wide).map_err(|_| Error::SeedQuality { product: wide })?;
    match FixedSig::ONE.checked_sub(xy) {
        Ok(m) => Ok((m, false)),
        Err(_) if xy.raw() - FixedSig::ONE.raw() <= SEED_OVERSHOOT_LIMIT.raw() => {
            Ok((FixedSig::ZERO, true))
        }
        Err(_) => Err(Error::SeedQuality { product: wide }),
    }
}

fn check_significand(x: FixedSig) -> Result<()> {
    if (FixedSig::ONE..FixedSig::TWO).contains(&x) {
        Ok(())
    } else {
        Err(domain(format!("{} is outside [1, 2)", x.to_f64())))
    }
}

pub fn reciprocal(x: FixedSig, cfg: &RecipConfig) -> Result<FixedSig> {
    reciprocal_traced(x, cfg).map(|t| t.result)
}

pub fn reciprocal_traced(x: FixedSig, cfg: &RecipConfig) -> Result<RecipTrace> {
    check_significand(x)?;
    let mul = cfg.multiplier;
    let segment = cfg.table.locate_fixed(x)?;
    let y0 = seed(x, cfg.table.segment(segment), mul)?;
    let (m, clamped) = m_fixed_flagged(x, y0, mul)?;

    let terms = cfg.terms as usize;
    let mut powers = Vec::with_capacity(terms);
    let mut counters = BlockCounters::default();
    if terms >= 1 {
        powers.push(m);
    }
    if terms >= 2 {
        let set = compute_powers(m, terms, mul)?;
        counters = set.counters;
        powers.extend(set.powers);
    }

    // 1, then m, then m^2, then (m^3 + m^4), (m^5 + m^6), ...
    let mut sum = FixedSig::ONE;
    let mut partial_sums = vec![sum];
    let mut p = 1;
    while p <= terms {
        let stage = if p >= 3 && p < terms {
            let s = pair_sum(powers[p - 1], powers[p])?;
            p += 2;
            s
        } else {
            p += 1;
            powers[p - 2]
        };
        sum = sum.checked_add(stage)?;
        partial_sums.push(sum);
    }

    let result = fixed_product(product(y0, sum, mul))?;
    Ok(RecipTrace { x, segment, y0, m, clamped, powers, partial_sums, counters, result })
}
