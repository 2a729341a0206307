//! Reciprocal accuracy sweeps with an exact integer oracle.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use ilmdiv::seedgen::{error_bound, format_real};
use ilmdiv::{reciprocal, FixedSig, IlmConfig, RecipConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::commands::engine;
use crate::Failure;

/// Extra error allowed on top of the series bound for Q4.60 truncations.
pub const TRUNCATION_BUDGET_ULPS: f64 = 16.0;

const CHUNK: usize = 1 << 16;

pub enum Source {
    Random { samples: u64, seed: u64 },
    ExhaustiveSig32,
}

struct Row {
    x: f64,
    approx: f64,
    reference: f64,
    abs_err: f64,
    rel_err: f64,
    bound: f64,
}

fn evaluate(x: FixedSig, cfg: &RecipConfig) -> ilmdiv::Result<Row> {
    let r = reciprocal(x, cfg)?;
    let ulp = FixedSig::ULP.to_f64();
    let raw = x.raw() as u128;
    let (q, rem) = ((1u128 << 120) / raw, (1u128 << 120) % raw);
    let reference = (q as f64 + rem as f64 / raw as f64) * ulp;
    let err_ulps = (r.raw() as i128 * raw as i128 - (1i128 << 120)) as f64 / raw as f64;
    let abs_err = err_ulps.abs() * ulp;
    let seg = cfg.table.segment(cfg.table.locate_fixed(x)?);
    Ok(Row {
        x: x.to_f64(),
        approx: r.to_f64(),
        reference,
        abs_err,
        rel_err: abs_err * x.to_f64(),
        bound: error_bound(seg, x.to_f64(), cfg.terms) + TRUNCATION_BUDGET_ULPS * ulp,
    })
}

pub fn run(source: Source, terms: u32, ilm: IlmConfig, csv: &Path, jobs: Option<usize>) -> Result<(), Failure> {
    let cfg = engine(terms, ilm)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder.build().context("cannot start worker pool")?;

    let inputs: Box<dyn Iterator<Item = FixedSig>> = match source {
        Source::Random { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Box::new((0..samples).map(move |_| FixedSig::from_raw(rng.gen_range(FixedSig::ONE.raw()..FixedSig::TWO.raw()))))
        }
        Source::ExhaustiveSig32 => Box::new((0..1u64 << 23).map(|i| FixedSig::from_raw(FixedSig::ONE.raw() | i << 37))),
    };

    let file = File::create(csv).with_context(|| format!("cannot create {}", csv.display()))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "x,approx,reference,abs_err,rel_err,bound")?;

    let (mut count, mut max_rel, mut sum_rel, mut within) = (0u64, 0f64, 0f64, true);
    let mut inputs = inputs.peekable();
    let mut chunk = Vec::with_capacity(CHUNK);
    while inputs.peek().is_some() {
        chunk.clear();
        chunk.extend(inputs.by_ref().take(CHUNK));
        let rows: Vec<Row> = pool
            .install(|| chunk.par_iter().map(|&x| evaluate(x, &cfg)).collect::<ilmdiv::Result<_>>())
            .map_err(anyhow::Error::from)?;
        for r in &rows {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                format_real(r.x),
                format_real(r.approx),
                format_real(r.reference),
                format_real(r.abs_err),
                format_real(r.rel_err),
                format_real(r.bound)
            )?;
            count += 1;
            max_rel = max_rel.max(r.rel_err);
            sum_rel += r.rel_err;
            within &= r.abs_err <= r.bound;
        }
    }
    out.flush()?;
    let log2 = if max_rel > 0.0 { format!("2^{:.2}", max_rel.log2()) } else { "0".into() };
    println!(
        "samples={count} max_rel_err={} ({log2}) mean_rel_err={} within_bound={within}",
        format_real(max_rel),
        format_real(sum_rel / count as f64),
    );
    Ok(())
}
