//! Piecewise-linear seed for `1/x`.
//!
//! On a segment `[a, b]` the seed is the tangent to `1/x` at `p = (a+b)/2`:
//! `y0 = 4/(a+b) - 4x/(a+b)^2`. Its convergence parameter is
//! `m = 1 - x*y0 = (1 - 2x/(a+b))^2`, and after `n` polynomial terms the
//! reciprocal error is majorized by `((a+b)^2/(4ab))^(n+2) * m^(n+1)`.
//! Segment boundaries are chosen so that bound hits `2^-precision` exactly at
//! the segment endpoints.

use std::io::{self, Write};

use crate::error::{domain, Result};
use crate::fixed::FixedSig;

/// Upper limit on the number of segments `derive_segments` will emit.
pub const MAX_SEGMENTS: usize = 4096;

/// One segment of the seed table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeedSegment {
    lower: f64,
    upper: f64,
    /// Magnitude of the (negative) slope, `4/(a+b)^2`.
    slope: FixedSig,
    /// `4/(a+b)`.
    intercept: FixedSig,
}

impl SeedSegment {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && lower >= 1.0 && lower < upper) {
            return Err(domain(format!("invalid segment [{lower}, {upper}]")));
        }
        if upper >= 4.0 {
            return Err(domain(format!("segment end {upper} outside the Q4.60 datapath")));
        }
        let lower_raw = FixedSig::from_f64(lower)?.raw() as u128;
        let upper_raw = FixedSig::from_f64(upper)?.raw() as u128;
        let sum = lower_raw + upper_raw;
        // intercept = 4/s -> 2^122 / s_raw, slope = 4/s^2 -> 2^182 / s_raw^2
        let intercept = div_pow2_nearest(122, sum);
        let slope = div_pow2_nearest(182, sum * sum);
        Ok(Self {
            lower,
            upper,
            slope: FixedSig::from_raw(slope as u64),
            intercept: FixedSig::from_raw(intercept as u64),
        })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn slope(&self) -> FixedSig {
        self.slope
    }

    pub fn intercept(&self) -> FixedSig {
        self.intercept
    }

    /// Tangent point `(lower + upper) / 2`.
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.lower..=self.upper).contains(&x)
    }

    fn check(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(domain(format!("{x} outside segment [{}, {}]", self.lower, self.upper)))
        }
    }
}

/// `floor(2^shift / d + 1/2)` by restoring long division.
fn div_pow2_nearest(shift: u32, d: u128) -> u128 {
    debug_assert!(d != 0 && d.leading_zeros() >= 1);
    let mut q = 0u128;
    let mut rem = 1u128;
    for _ in 0..shift {
        rem <<= 1;
        q <<= 1;
        if rem >= d {
            rem -= d;
            q |= 1;
        }
    }
    if 2 * rem >= d {
        q += 1;
    }
    q
}

/// Ordered segments tiling `[first.lower, last.upper]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeedTable {
    segments: Vec<SeedSegment>,
    design_iterations: u32,
    design_precision: u32,
}

impl SeedTable {
    pub fn new(segments: Vec<SeedSegment>, design_iterations: u32, design_precision: u32) -> Result<Self> {
        if segments.is_empty() {
            return Err(domain("empty seed table"));
        }
        if segments.windows(2).any(|w| w[0].upper != w[1].lower) {
            return Err(domain("seed segments are not contiguous"));
        }
        Ok(Self { segments, design_iterations, design_precision })
    }

    /// Table derived for `n` polynomial terms and `precision` bits over `[1, 2]`.
    pub fn derive(n: u32, precision: u32) -> Result<Self> {
        derive_segments(n, precision, 1.0, 2.0)
    }

    pub fn segments(&self) -> &[SeedSegment] {
        &self.segments
    }

    pub fn design_iterations(&self) -> u32 {
        self.design_iterations
    }

    pub fn design_precision(&self) -> u32 {
        self.design_precision
    }

    pub fn start(&self) -> f64 {
        self.segments[0].lower
    }

    pub fn end(&self) -> f64 {
        self.segments[self.segments.len() - 1].upper
    }

    /// Interior boundaries plus the final upper bound (`b_0, b_1, ...`).
    pub fn boundaries(&self) -> Vec<f64> {
        self.segments.iter().map(|s| s.upper).collect()
    }

    /// Index of the segment holding `x`; the final upper bound belongs to the
    /// last segment.
    pub fn locate(&self, x: f64) -> Result<usize> {
        if !(self.start()..=self.end()).contains(&x) {
            return Err(domain(format!("{x} outside the table range [{}, {}]", self.start(), self.end())));
        }
        let idx = self.segments.partition_point(|s| s.upper <= x);
        Ok(idx.min(self.segments.len() - 1))
    }

    /// `locate` on a Q4.60 value; boundaries are exact in Q4.60.
    pub fn locate_fixed(&self, x: FixedSig) -> Result<usize> {
        self.locate(x.to_f64()).and_then(|i| {
            // to_f64 may round x across a boundary
            let raw = |v: f64| FixedSig::from_f64(v).map(|f| f.raw());
            let seg = &self.segments[i];
            if x.raw() < raw(seg.lower)? {
                Ok(i - 1)
            } else if x.raw() >= raw(seg.upper)? && i + 1 < self.segments.len() {
                Ok(i + 1)
            } else {
                Ok(i)
            }
        })
    }

    pub fn segment(&self, index: usize) -> &SeedSegment {
        &self.segments[index]
    }

    /// CSV with header `index,lower,upper,slope,intercept`; the slope is
    /// written with its sign.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "index,lower,upper,slope,intercept")?;
        for (i, s) in self.segments.iter().enumerate() {
            writeln!(
                out,
                "{i},{},{},{},{}",
                format_real(s.lower),
                format_real(s.upper),
                format_real(-s.slope.to_f64()),
                format_real(s.intercept.to_f64()),
            )?;
        }
        Ok(())
    }
}

impl Default for SeedTable {
    fn default() -> Self {
        Self::derive(5, 53).expect("default seed table")
    }
}

/// Decimal with 17 significant digits, scientific outside `[1e-5, 1e17)`.
pub fn format_real(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{:.16e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if !(-5..17).contains(&exp) {
        return sci;
    }
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if exp >= 0 {
        let split = exp as usize + 1;
        if split >= digits.len() {
            format!("{sign}{digits}")
        } else {
            format!("{sign}{}.{}", &digits[..split], &digits[split..])
        }
    } else {
        format!("{sign}0.{}{digits}", "0".repeat((-exp - 1) as usize))
    }
}

/// Linear-seed tangent point minimizing the integrated error over `[a, b]`.
pub fn optimal_p(a: f64, b: f64) -> Result<f64> {
    check_interval(a, b)?;
    Ok(0.5 * (a + b))
}

/// Split point giving two segments with equal error.
pub fn split_two_segments(a: f64, b: f64) -> Result<f64> {
    check_interval(a, b)?;
    Ok((a * b).sqrt())
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if a > 0.0 && a < b {
        Ok(())
    } else {
        Err(domain(format!("need 0 < a < b, got a={a}, b={b}")))
    }
}

/// Integrated error of the tangent-at-`p` seed over `[a, b]`.
pub fn total_error(a: f64, b: f64, p: f64) -> f64 {
    (b / a).ln() + (b * b - a * a) / (2.0 * p * p) - 2.0 * (b - a) / p
}

pub fn seed_value(x: f64, seg: &SeedSegment) -> Result<f64> {
    seg.check(x)?;
    let s = seg.lower + seg.upper;
    Ok(-4.0 * x / (s * s) + 4.0 / s)
}

pub fn m_value(x: f64, seg: &SeedSegment) -> Result<f64> {
    Ok(1.0 - x * seed_value(x, seg)?)
}

/// `(a+b)^2 / (4ab)`.
fn spread(a: f64, b: f64) -> f64 {
    (a + b) * (a + b) / (4.0 * a * b)
}

/// `(1 - 2x/(a+b))^2`.
fn m_closed(a: f64, b: f64, x: f64) -> f64 {
    let t = ((a - x) + (b - x)) / (a + b);
    t * t
}

fn log2_bound(a: f64, b: f64, x: f64, n: u32) -> f64 {
    let n = n as f64;
    (n + 2.0) * spread(a, b).log2() + (n + 1.0) * m_closed(a, b, x).log2()
}

fn worst_log2_bound(a: f64, b: f64, n: u32) -> f64 {
    log2_bound(a, b, a, n).max(log2_bound(a, b, b, n))
}

/// Majorized reciprocal error after `n` terms at `x`.
pub fn error_bound(seg: &SeedSegment, x: f64, n: u32) -> f64 {
    let (a, b) = (seg.lower, seg.upper);
    spread(a, b).powi(n as i32 + 2) * m_closed(a, b, x).powi(n as i32 + 1)
}

/// `log2` of [`error_bound`], usable where the bound underflows.
pub fn log2_error_bound(seg: &SeedSegment, x: f64, n: u32) -> f64 {
    log2_bound(seg.lower, seg.upper, x, n)
}

/// Fewest terms for which the bound at both segment ends is `<= 2^-bits`.
pub fn min_iterations(seg: &SeedSegment, precision_bits: u32) -> Result<u32> {
    if precision_bits == 0 {
        return Err(domain("precision must be at least one bit"));
    }
    // per-term factor spread * m(a) = (b-a)^2 / 4ab < 1 since b < 4a
    let worst = |n| worst_log2_bound(seg.lower, seg.upper, n);
    let target = -(precision_bits as f64);
    let mut n = 0;
    while worst(n) > target {
        n += 1;
    }
    Ok(n)
}

/// `log2` of the boundary condition `(a+b)^2 (b-a)^(2n+2) / (4ab)^(n+2)`.
pub fn boundary_log2(a: f64, b: f64, n: u32) -> f64 {
    let n = n as f64;
    2.0 * (a + b).log2() - (n + 2.0) * (4.0 * a * b).log2() + (2.0 * n + 2.0) * (b - a).log2()
}

/// Largest `b > a` whose segment bound after `n` terms is `<= 2^-precision`,
/// i.e. the root of the boundary condition [`boundary_log2`].
pub fn max_segment_end(a: f64, n: u32, precision_bits: u32) -> f64 {
    let target = -(precision_bits as f64);
    let g = |b: f64| worst_log2_bound(a, b, n) - target;
    let mut width = a;
    while g(a + width) <= 0.0 {
        width *= 2.0;
    }
    let (mut lo, mut hi) = (a, a + width);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-15 * lo {
            break;
        }
        if g(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Segments `[start, b_0], [b_0, b_1], ...` up to the first `b_k >= end`.
pub fn derive_segments(n: u32, precision_bits: u32, range_start: f64, range_end: f64) -> Result<SeedTable> {
    if n == 0 || precision_bits == 0 {
        return Err(domain("iterations and precision must both be at least 1"));
    }
    check_interval(range_start, range_end)?;
    let mut segments = Vec::new();
    let mut lower = range_start;
    while lower < range_end {
        if segments.len() == MAX_SEGMENTS {
            return Err(domain(format!("more than {MAX_SEGMENTS} segments needed")));
        }
        let upper = max_segment_end(lower, n, precision_bits);
        segments.push(SeedSegment::new(lower, upper)?);
        lower = upper;
    }
    SeedTable::new(segments, n, precision_bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seg(a: f64, b: f64) -> SeedSegment {
        SeedSegment::new(a, b).unwrap()
    }

    #[test]
    fn linear_seed_examples() {
        assert_eq!(optimal_p(1.0, 2.0).unwrap(), 1.5);
        assert_eq!(optimal_p(2.0, 8.0).unwrap(), 5.0);
        assert!(optimal_p(1.0, 1.0).is_err());
        let s = seg(1.0, 2.0);
        assert!((seed_value(1.0, &s).unwrap() - 8.0 / 9.0).abs() < 1e-15);
        assert!((seed_value(1.5, &s).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(seed_value(2.5, &s).is_err());
        assert!((m_value(1.0, &s).unwrap() - 1.0 / 9.0).abs() < 1e-15);
        assert!(m_value(1.5, &s).unwrap().abs() < 1e-15);
        assert!((m_value(2.0, &s).unwrap() - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn quantized_coefficients_within_one_ulp() {
        for (a, b) in [(1.0, 2.0), (1.0, 2f64.sqrt()), (1.0981126648464610, 1.2058514246961960)] {
            let s = seg(a, b);
            let ulp = FixedSig::ULP.to_f64();
            assert!((s.slope().to_f64() - 4.0 / ((a + b) * (a + b))).abs() <= ulp + 4.0 * f64::EPSILON);
            assert!((s.intercept().to_f64() - 4.0 / (a + b)).abs() <= ulp + 4.0 * f64::EPSILON);
        }
        // 4/3 in Q4.60, rounded to nearest
        let s = seg(1.0, 2.0);
        assert_eq!(s.intercept().raw(), ((4u128 << 60) / 3) as u64);
        assert_eq!(s.slope().raw(), ((4u128 << 60) / 9) as u64);
    }

    #[test]
    fn bound_examples() {
        let s = seg(1.0, 2.0);
        assert!((error_bound(&s, 1.0, 0) - 9.0 / 64.0).abs() < 1e-15);
        for n in 0..6 {
            assert_eq!(error_bound(&s, 1.5, n), 0.0);
        }
        assert!(error_bound(&s, 1.0, 17) <= 2f64.powi(-53));
        assert!(error_bound(&s, 1.0, 16) > 2f64.powi(-53));
        assert_eq!(min_iterations(&s, 53).unwrap(), 17);
        assert!(min_iterations(&s, 0).is_err());
        assert!(SeedSegment::new(1.0, 7.0).is_err());
    }

    #[test]
    fn narrower_segments_need_fewer_terms() {
        let mut prev = 0;
        for eps in [1e-4, 1e-3, 1e-2, 0.1, 0.5, 1.0] {
            let n = min_iterations(&seg(1.0, 1.0 + eps), 53).unwrap();
            assert!(n >= prev);
            prev = n;
        }
        assert!(min_iterations(&seg(1.0, 1.0001), 53).unwrap() <= 3);
    }

    #[test]
    fn two_segment_split() {
        assert!((split_two_segments(1.0, 2.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(split_two_segments(1.0, 4.0).unwrap(), 2.0);
        assert!(split_two_segments(4.0, 4.0).is_err());
        let r = 2f64.sqrt();
        let a = min_iterations(&seg(1.0, r), 53).unwrap();
        let b = min_iterations(&seg(r, 2.0), 53).unwrap();
        assert_eq!((a, b), (10, 10));
    }

    #[test]
    fn total_error_examples() {
        let v = total_error(1.0, 2.0, 1.5);
        assert!((v - 0.026480513893278643).abs() < 1e-15);
        for d in [1e-3, -1e-3] {
            assert!(total_error(1.0, 2.0, 1.5 + d) > v);
        }
        assert!(total_error(1.0, 1.0 + 1e-6, 1.3).abs() < 1e-6);
    }

    #[test]
    fn derived_tables() {
        let t = SeedTable::derive(5, 53).unwrap();
        assert_eq!(t.segments().len(), 8);
        assert!((t.boundaries()[0] - 1.09811).abs() < 1e-5);
        assert!(t.end() >= 2.0);
        for s in t.segments() {
            assert!(min_iterations(s, 53).unwrap() <= 5);
            assert!((boundary_log2(s.lower(), s.upper(), 5) + 53.0).abs() < 1e-9);
        }
        let one = SeedTable::derive(17, 53).unwrap();
        assert_eq!(one.segments().len(), 1);
        assert!(one.end() >= 2.0);
        assert!(SeedTable::derive(0, 53).is_err());
    }

    #[test]
    fn lookup() {
        let t = SeedTable::default();
        assert_eq!(t.locate(1.0).unwrap(), 0);
        assert_eq!(t.locate(2.0).unwrap(), 7);
        assert_eq!(t.locate(t.end()).unwrap(), 7);
        assert_eq!(t.locate(t.boundaries()[2]).unwrap(), 3);
        assert!(t.locate(0.99).is_err());
        let b = FixedSig::from_f64(t.boundaries()[0]).unwrap();
        assert_eq!(t.locate_fixed(b).unwrap(), 1);
        assert_eq!(t.locate_fixed(FixedSig::from_raw(b.raw() - 1)).unwrap(), 0);
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        SeedTable::derive(17, 53).unwrap().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "index,lower,upper,slope,intercept");
        assert_eq!(lines.len(), 2);
        assert!(lines[1].starts_with("0,1.0000000000000000,"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn real_formatting() {
        assert_eq!(format_real(1.0), "1.0000000000000000");
        assert_eq!(format_real(0.5), "0.50000000000000000");
        assert_eq!(format_real(-0.25), "-0.25000000000000000");
        assert_eq!(format_real(123.0), "123.00000000000000");
        assert_eq!(format_real(1e-9), "1.0000000000000001e-9");
        assert_eq!(format_real(0.0), "0");
    }

    proptest! {
        #[test]
        fn m_closed_form(a in 1.0f64..1.9, w in 1e-3f64..0.5, t in 0.0f64..=1.0) {
            let s = seg(a, a + w);
            let x = a + t * w;
            let m = m_value(x, &s).unwrap();
            let p = 1.0 - 2.0 * x / (2.0 * a + w);
            prop_assert!((m - p * p).abs() < 1e-12);
            prop_assert!((0.0..1.0).contains(&m));
        }

        #[test]
        fn midpoint_minimizes_total_error(a in 0.5f64..4.0, w in 1e-2f64..4.0, p in 0.05f64..20.0) {
            let b = a + w;
            prop_assert!(total_error(a, b, optimal_p(a, b).unwrap()) <= total_error(a, b, p) + 1e-15);
        }
    }
}
