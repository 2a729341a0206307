use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use ilmdiv::fpdiv::{reference_divide, ulp_distance};
use ilmdiv::recip::reciprocal_traced;
use ilmdiv::seedgen::{boundary_log2, error_bound, format_real, min_iterations, split_two_segments};
use ilmdiv::{divide, FixedSig, Format, IlmConfig, RecipConfig, SeedSegment, SeedTable};

use crate::Failure;

/// Iteration count the original two-segment analysis reports.
const PUBLISHED_TWO_SEGMENT_TERMS: u32 = 15;

pub fn engine(terms: u32, ilm: IlmConfig) -> Result<RecipConfig, Failure> {
    RecipConfig::new(SeedTable::default(), terms, ilm).map_err(|e| Failure::Usage(e.to_string()))
}

pub fn segments(iters: u32, precision: u32, csv: Option<&Path>) -> Result<(), Failure> {
    let table = SeedTable::derive(iters, precision).map_err(|e| Failure::Usage(e.to_string()))?;
    match csv {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            let mut out = BufWriter::new(file);
            table.write_csv(&mut out)?;
            out.flush()?;
        }
        None => table.write_csv(io::stdout().lock())?,
    }
    bound_report(&table, &mut io::stderr().lock())?;
    Ok(())
}

fn bound_report(table: &SeedTable, out: &mut impl Write) -> anyhow::Result<()> {
    let (n, bits) = (table.design_iterations(), table.design_precision());
    writeln!(out, "table: {} segments for {n} terms at {bits} bits", table.segments().len())?;
    for (i, s) in table.segments().iter().enumerate() {
        writeln!(
            out,
            "  segment {i}: [{:.6}, {:.6}] needs {} terms, boundary log2 {:.4}",
            s.lower(),
            s.upper(),
            min_iterations(s, bits)?,
            boundary_log2(s.lower(), s.upper(), n),
        )?;
    }
    let single = min_iterations(&SeedSegment::new(1.0, 2.0)?, bits)?;
    writeln!(out, "single linear seed on [1, 2]: {single} terms")?;
    let split = split_two_segments(1.0, 2.0)?;
    let two = min_iterations(&SeedSegment::new(1.0, split)?, bits)?
        .max(min_iterations(&SeedSegment::new(split, 2.0)?, bits)?);
    write!(out, "two segments split at sqrt(2): {two} terms")?;
    if bits == 53 {
        write!(out, " (published figure: {PUBLISHED_TWO_SEGMENT_TERMS})")?;
    }
    writeln!(out)?;
    Ok(())
}

pub fn recip(x: &str, terms: u32, ilm: IlmConfig, trace: bool) -> Result<(), Failure> {
    let value: f64 = x.trim().parse().map_err(|_| Failure::Usage(format!("cannot parse `{x}` as a number")))?;
    if !(1.0..2.0).contains(&value) {
        return Err(Failure::Usage(format!("{x} is outside [1, 2)")));
    }
    let cfg = engine(terms, ilm)?;
    let sig = FixedSig::from_f64(value).map_err(|e| Failure::Usage(e.to_string()))?;
    let t = reciprocal_traced(sig, &cfg).map_err(anyhow::Error::from)?;
    let mut out = io::stdout().lock();
    writeln!(out, "reciprocal = {}", format_real(t.result.to_f64()))?;
    writeln!(out, "raw = {:#018x}", t.result.raw())?;
    if trace {
        let seg = cfg.table.segment(t.segment);
        writeln!(out, "x = {} ({:#018x})", format_real(sig.to_f64()), sig.raw())?;
        writeln!(out, "segment = {} [{}, {}]", t.segment, format_real(seg.lower()), format_real(seg.upper()))?;
        writeln!(out, "y0 = {} ({:#018x})", format_real(t.y0.to_f64()), t.y0.raw())?;
        writeln!(out, "m = {} ({:#018x}){}", format_real(t.m.to_f64()), t.m.raw(), if t.clamped { " clamped" } else { "" })?;
        for (k, p) in t.powers.iter().enumerate() {
            writeln!(out, "m^{} = {} ({:#018x})", k + 1, format_real(p.to_f64()), p.raw())?;
        }
        for (i, s) in t.partial_sums.iter().enumerate() {
            writeln!(out, "sum[{i}] = {} ({:#018x})", format_real(s.to_f64()), s.raw())?;
        }
        let c = t.counters;
        writeln!(
            out,
            "blocks: encoder {} lod {} multiplier {} squarer {} cache_hits {}",
            c.encoder_calls, c.lod_calls, c.multiplier_uses, c.squarer_uses, c.cache_hits
        )?;
        writeln!(out, "error_bound = {}", format_real(error_bound(seg, sig.to_f64(), terms)))?;
    }
    Ok(())
}

pub fn parse_operand(s: &str, format: Format) -> Result<u64, Failure> {
    let s = s.trim();
    let bad = || Failure::Usage(format!("cannot parse operand `{s}`"));
    if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        let bits = u64::from_str_radix(hex, 16).map_err(|_| bad())?;
        if format == Format::Binary32 && bits > u32::MAX as u64 {
            return Err(Failure::Usage(format!("{s} is wider than 32 bits")));
        }
        return Ok(bits);
    }
    match format {
        Format::Binary64 => s.parse::<f64>().map(f64::to_bits).map_err(|_| bad()),
        Format::Binary32 => s.parse::<f32>().map(|v| v.to_bits() as u64).map_err(|_| bad()),
    }
}

fn decimal(bits: u64, format: Format) -> String {
    match format {
        Format::Binary64 => format_real(f64::from_bits(bits)),
        Format::Binary32 => format_real(f32::from_bits(bits as u32) as f64),
    }
}

pub fn div(a: &str, b: &str, format: Format, terms: u32, ilm: IlmConfig) -> Result<(), Failure> {
    let (a, b) = (parse_operand(a, format)?, parse_operand(b, format)?);
    let cfg = engine(terms, ilm)?;
    let q = divide(a, b, format, &cfg).map_err(anyhow::Error::from)?;
    let reference = reference_divide(a, b, format);
    let width = if format == Format::Binary64 { 16 } else { 8 };
    let mut out = io::stdout().lock();
    writeln!(out, "quotient = {}", decimal(q, format))?;
    writeln!(out, "bits = {q:#0w$x}", w = width + 2)?;
    writeln!(out, "reference = {}", decimal(reference, format))?;
    writeln!(out, "ulp_distance = {}", ulp_distance(q, reference, format))?;
    Ok(())
}
