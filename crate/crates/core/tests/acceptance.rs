//! Exit criteria. Runs every check, prints one line per criterion and exits
//! non-zero if any of them failed.

use std::time::{Duration, Instant};

use ilmdiv::fpdiv::{reference_divide, ulp_distance};
use ilmdiv::ilm::{multiply, IlmConfig};
use ilmdiv::seedgen::{boundary_log2, error_bound, min_iterations, split_two_segments};
use ilmdiv::squarer::square;
use ilmdiv::{compute_powers, divide, reciprocal, FixedSig, Format, RecipConfig, SeedSegment, SeedTable, UnsignedWord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Published segment boundaries for five terms at 53 bits.
const REFERENCE_BOUNDARIES: [f64; 8] = [1.09811, 1.20835, 1.3269, 1.45709, 1.59866, 1.75616, 1.92922, 2.12392];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    if took > limit {
        o.passed = false;
        o.detail.push_str(&format!("; took {took:?} > {limit:?}"));
    } else {
        o.detail.push_str(&format!("; {took:.2?}"));
    }
    o
}

fn boundary_table_reproduction() -> Outcome {
    timed(Duration::from_secs(1), || {
        let table = SeedTable::derive(5, 53).expect("derive");
        let derived = table.boundaries();
        let mut problems = Vec::new();
        if derived.len() != REFERENCE_BOUNDARIES.len() {
            problems.push(format!("{} segments instead of {}", derived.len(), REFERENCE_BOUNDARIES.len()));
        }
        for (k, (&d, &p)) in derived.iter().zip(&REFERENCE_BOUNDARIES).enumerate() {
            let rel = (d - p).abs() / p;
            if rel > 1e-3 {
                problems.push(format!("b{k}: derived {d:.6} vs {p} (rel {rel:.1e})"));
            }
        }
        let mut lower = 1.0;
        for (k, &b) in REFERENCE_BOUNDARIES.iter().enumerate() {
            let residual = boundary_log2(lower, b, 5);
            if (residual + 53.0).abs() > 0.1 {
                problems.push(format!("printed b{k}: log2 residual {residual:.3}"));
            }
            lower = b;
        }
        if problems.is_empty() {
            outcome(true, "8 boundaries within 1e-3, printed residuals -53 +- 0.1")
        } else {
            outcome(false, problems.join("; "))
        }
    })
}

fn seventeen_terms() -> Outcome {
    let n = min_iterations(&SeedSegment::new(1.0, 2.0).unwrap(), 53).unwrap();
    outcome(n == 17, format!("single segment [1, 2] needs {n} terms"))
}

/// Smallest n with `(n+2) log2 F + (n+1) log2 m <= -bits`, solved in closed form.
fn closed_form_terms(a: f64, b: f64, bits: f64) -> u32 {
    let log_f = ((a + b) * (a + b) / (4.0 * a * b)).log2();
    let log_m = (((b - a) / (a + b)) * ((b - a) / (a + b))).log2();
    let n = ((-bits - log_f) / (log_f + log_m) - 1.0).ceil();
    n.max(0.0) as u32
}

fn two_segment_split() -> Outcome {
    let split = split_two_segments(1.0, 2.0).unwrap();
    let segs = [SeedSegment::new(1.0, split).unwrap(), SeedSegment::new(split, 2.0).unwrap()];
    let computed = segs.iter().map(|s| min_iterations(s, 53).unwrap()).max().unwrap();
    let oracle = closed_form_terms(1.0, split, 53.0).max(closed_form_terms(split, 2.0, 53.0));
    // 50-digit evaluation of the same bound gives 10
    const HIGH_PRECISION: u32 = 10;
    outcome(
        computed == oracle && computed == HIGH_PRECISION,
        format!("split at sqrt(2): computed {computed}, closed form {oracle}, published claim 15"),
    )
}

fn ilm_exactness() -> Outcome {
    timed(Duration::from_secs(10), || {
        for a in 0..256u64 {
            for b in 0..256u64 {
                let t = multiply(UnsignedWord::new(a, 8).unwrap(), UnsignedWord::new(b, 8).unwrap(), IlmConfig::Exact);
                if t.final_product != (a * b) as u128 {
                    return outcome(false, format!("{a} * {b} gave {}", t.final_product));
                }
            }
        }
        let cfgs = [0, 1, 2, 3, 4].map(IlmConfig::Iterations);
        for v in 0..1u64 << 16 {
            let n = UnsignedWord::new(v, 16).unwrap();
            for cfg in cfgs.iter().copied().chain([IlmConfig::Exact]) {
                if square(n, cfg).final_product != multiply(n, n, cfg).final_product {
                    return outcome(false, format!("square({v}) differs from multiply at {cfg}"));
                }
            }
        }
        outcome(true, "65536 8-bit products exact; squarer == multiplier on 65536 16-bit operands x 6 configs")
    })
}

fn underestimation() -> Outcome {
    timed(Duration::from_secs(30), || {
        for a in 0..1u64 << 10 {
            for b in 0..1u64 << 10 {
                let (na, nb) = (UnsignedWord::new(a, 10).unwrap(), UnsignedWord::new(b, 10).unwrap());
                let exact = (a * b) as u128;
                let mut prev = 0;
                for j in 0..=3 {
                    let p = multiply(na, nb, IlmConfig::Iterations(j)).final_product;
                    if p > exact || p < prev {
                        return outcome(false, format!("{a} * {b} at {j} iterations: {p} (exact {exact}, previous {prev})"));
                    }
                    prev = p;
                }
            }
        }
        outcome(true, "all 10-bit pairs, iterations 0..=3: partial sums <= product and non-decreasing")
    })
}

/// `approx - 1/x` in Q4.60 ulps, from exact integer arithmetic.
fn recip_error_ulps(x: FixedSig, approx: FixedSig) -> f64 {
    (approx.raw() as i128 * x.raw() as i128 - (1i128 << 120)) as f64 / x.raw() as f64
}

fn reciprocal_accuracy() -> Outcome {
    timed(Duration::from_secs(30), || {
        let cfg = RecipConfig::default();
        let ulp = FixedSig::ULP.to_f64();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut max_rel = 0f64;
        let mut violations = 0;
        for _ in 0..100_000 {
            let x = FixedSig::from_raw(rng.gen_range(FixedSig::ONE.raw()..FixedSig::TWO.raw()));
            let r = reciprocal(x, &cfg).expect("reciprocal");
            let abs = recip_error_ulps(x, r).abs() * ulp;
            max_rel = max_rel.max(abs * x.to_f64());
            let seg = cfg.table.segment(cfg.table.locate_fixed(x).unwrap());
            if abs > error_bound(seg, x.to_f64(), cfg.terms) + 16.0 * ulp {
                violations += 1;
            }
        }
        outcome(
            max_rel <= 2f64.powi(-50) && violations == 0,
            format!("max rel err 2^{:.2} (limit 2^-50), {violations} samples above bound + 16 ulp", max_rel.log2()),
        )
    })
}

fn random_normal(rng: &mut ChaCha8Rng) -> f64 {
    // unbiased exponents in [-500, 500] keep every quotient normal
    let exp = rng.gen_range(523u64..=1523);
    let sign = rng.gen::<bool>() as u64;
    f64::from_bits(sign << 63 | exp << 52 | rng.gen_range(0..1u64 << 52))
}

fn special_rows(cfg: &RecipConfig) -> Vec<String> {
    let inf = f64::INFINITY;
    let nan = f64::NAN;
    let rows: [(f64, f64, f64); 16] = [
        (1.0, 0.0, inf),
        (-1.0, 0.0, -inf),
        (1.0, -0.0, -inf),
        (0.0, 0.0, nan),
        (-0.0, 0.0, nan),
        (inf, inf, nan),
        (-inf, inf, nan),
        (nan, 1.0, nan),
        (1.0, nan, nan),
        (nan, nan, nan),
        (2.5, inf, 0.0),
        (2.5, -inf, -0.0),
        (-0.0, 3.0, -0.0),
        (0.0, -3.0, -0.0),
        (inf, -2.0, -inf),
        (-inf, 0.0, -inf),
    ];
    rows.iter()
        .filter_map(|&(a, b, want)| {
            let got = f64::from_bits(divide(a.to_bits(), b.to_bits(), Format::Binary64, cfg).unwrap());
            let ok = if want.is_nan() { got.to_bits() == Format::Binary64.nan() } else { got.to_bits() == want.to_bits() };
            (!ok).then(|| format!("{a}/{b} gave {got}"))
        })
        .collect()
}

fn division_accuracy() -> Outcome {
    timed(Duration::from_secs(120), || {
        let cfg = RecipConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        const N: u64 = 1_000_000;
        let (mut within1, mut within2) = (0u64, 0u64);
        for _ in 0..N {
            let (a, b) = (random_normal(&mut rng).to_bits(), random_normal(&mut rng).to_bits());
            let q = divide(a, b, Format::Binary64, &cfg).expect("divide");
            let d = ulp_distance(q, reference_divide(a, b, Format::Binary64), Format::Binary64);
            within1 += (d <= 1) as u64;
            within2 += (d <= 2) as u64;
        }
        let bad_specials = special_rows(&cfg);
        let frac1 = within1 as f64 / N as f64;
        outcome(
            within2 == N && frac1 >= 0.999 && bad_specials.is_empty(),
            format!(
                "{:.4}% within 1 ulp, {} of {N} within 2 ulp, special rows: {}",
                100.0 * frac1,
                within2,
                if bad_specials.is_empty() { "all exact".to_string() } else { bad_specials.join(", ") }
            ),
        )
    })
}

fn powering_schedule() -> Outcome {
    let x = FixedSig::from_f64(0.0021972656).unwrap();
    let mut report = Vec::new();
    let mut passed = true;
    for p in [4usize, 8, 12] {
        let c = compute_powers(x, p, IlmConfig::Exact).unwrap().counters;
        passed &= c.squarer_uses as usize == p / 2
            && c.multiplier_uses as usize == p.div_ceil(2) - 1
            && c.base_encoder_calls == 1;
        report.push(format!("P={p}: sq {} mul {} base enc {}", c.squarer_uses, c.multiplier_uses, c.base_encoder_calls));
    }
    outcome(passed, report.join(", "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 segment table reproduction", boundary_table_reproduction),
        ("2 single-segment 17 terms", seventeen_terms),
        ("3 two-segment split iterations", two_segment_split),
        ("4 ILM exactness / squarer equivalence", ilm_exactness),
        ("5 ILM underestimation", underestimation),
        ("6 reciprocal accuracy", reciprocal_accuracy),
        ("7 division accuracy", division_accuracy),
        ("8 powering schedule shape", powering_schedule),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        failed += !o.passed as usize;
        println!("[{}] criterion {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("[N/A ] criterion 9 hardware area / pipelining: not reproducible in software, covered by criterion 8 block counts");
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
