//! Python bindings for the `ilmdiv` engine.

use engine::fpdiv::{divide_f32, divide_f64, reference_divide, ulp_distance};
use engine::recip::reciprocal_traced;
use engine::seedgen::{self, format_real};
use engine::{
    bitcore, ilm, squarer, BlockCounters, Error, FixedSig, Format, IlmConfig, IlmTrace, RecipConfig,
    SeedSegment, UnsignedWord,
};
use pyo3::create_exception;
use pyo3::exceptions::{PyArithmeticError, PyOverflowError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(ilmdiv, SeedQualityError, PyArithmeticError);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Domain(msg) => PyValueError::new_err(msg),
        Error::Overflow(msg) => PyOverflowError::new_err(msg),
        e @ Error::SeedQuality { .. } => SeedQualityError::new_err(e.to_string()),
    }
}

fn ilm_config(iterations: Option<u32>) -> IlmConfig {
    iterations.map_or(IlmConfig::Exact, IlmConfig::Iterations)
}

fn word(value: u64, width: u32) -> PyResult<UnsignedWord> {
    UnsignedWord::new(value, width).map_err(to_py)
}

fn format_of(bits: u32) -> PyResult<Format> {
    match bits {
        32 => Ok(Format::Binary32),
        64 => Ok(Format::Binary64),
        _ => Err(PyValueError::new_err(format!("format must be 32 or 64, got {bits}"))),
    }
}

fn fixed(x: f64) -> PyResult<FixedSig> {
    FixedSig::from_f64(x).map_err(to_py)
}

fn counters_dict<'py>(py: Python<'py>, c: &BlockCounters) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("encoder_calls", c.encoder_calls)?;
    d.set_item("lod_calls", c.lod_calls)?;
    d.set_item("multiplier_uses", c.multiplier_uses)?;
    d.set_item("squarer_uses", c.squarer_uses)?;
    d.set_item("cache_hits", c.cache_hits)?;
    d.set_item("base_encoder_calls", c.base_encoder_calls)?;
    Ok(d)
}

fn trace_pair(t: IlmTrace) -> (u128, Vec<u128>) {
    (t.final_product, t.base_terms)
}

/// Bit position of the leading one of a non-zero `width`-bit word.
#[pyfunction]
#[pyo3(signature = (n, width = 64))]
fn leading_one(n: u64, width: u32) -> PyResult<u32> {
    bitcore::leading_one(word(n, width)?).map_err(to_py)
}

/// `n` with its leading one cleared.
#[pyfunction]
#[pyo3(signature = (n, width = 64))]
fn residue(n: u64, width: u32) -> PyResult<u64> {
    bitcore::residue(word(n, width)?).map(|r| r.value()).map_err(to_py)
}

/// Iterative logarithmic product. Returns `(product, per_level_terms)`;
/// `iterations=None` runs to exactness.
#[pyfunction]
#[pyo3(signature = (a, b, width = 64, iterations = None))]
fn ilm_multiply(a: u64, b: u64, width: u32, iterations: Option<u32>) -> PyResult<(u128, Vec<u128>)> {
    Ok(trace_pair(ilm::multiply(word(a, width)?, word(b, width)?, ilm_config(iterations))))
}

/// Squaring-unit product, same return shape as `ilm_multiply`.
#[pyfunction]
#[pyo3(signature = (n, width = 64, iterations = None))]
fn square(n: u64, width: u32, iterations: Option<u32>) -> PyResult<(u128, Vec<u128>)> {
    Ok(trace_pair(squarer::square(word(n, width)?, ilm_config(iterations))))
}

/// `[x^2, ..., x^max_power]` in Q4.60 together with the block counters.
#[pyfunction]
#[pyo3(signature = (x, max_power, iterations = None))]
fn compute_powers<'py>(
    py: Python<'py>,
    x: f64,
    max_power: usize,
    iterations: Option<u32>,
) -> PyResult<(Vec<f64>, Bound<'py, PyDict>)> {
    let set = engine::compute_powers(fixed(x)?, max_power, ilm_config(iterations)).map_err(to_py)?;
    let powers = set.powers.iter().map(|p| p.to_f64()).collect();
    Ok((powers, counters_dict(py, &set.counters)?))
}

/// Fewest series terms that bring the seed on `[lower, upper]` below `2^-precision`.
#[pyfunction]
#[pyo3(signature = (lower, upper, precision = 53))]
fn min_iterations(lower: f64, upper: f64, precision: u32) -> PyResult<u32> {
    let seg = SeedSegment::new(lower, upper).map_err(to_py)?;
    seedgen::min_iterations(&seg, precision).map_err(to_py)
}

#[pyfunction]
fn error_bound(lower: f64, upper: f64, x: f64, n: u32) -> PyResult<f64> {
    let seg = SeedSegment::new(lower, upper).map_err(to_py)?;
    Ok(seedgen::error_bound(&seg, x, n))
}

#[pyfunction]
fn split_two_segments(lower: f64, upper: f64) -> PyResult<f64> {
    seedgen::split_two_segments(lower, upper).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (a, b, format = 64))]
fn reference_divide_bits(a: u64, b: u64, format: u32) -> PyResult<u64> {
    Ok(reference_divide(a, b, format_of(format)?))
}

#[pyfunction]
#[pyo3(name = "ulp_distance", signature = (x, y, format = 64))]
fn ulp_distance_py(x: u64, y: u64, format: u32) -> PyResult<u64> {
    Ok(ulp_distance(x, y, format_of(format)?))
}

/// Piecewise-linear seed table.
#[pyclass(frozen, skip_from_py_object, module = "ilmdiv")]
#[derive(Clone)]
struct SeedTable {
    inner: seedgen::SeedTable,
}

#[pymethods]
impl SeedTable {
    /// Greedy segmentation of `[start, end]` for `iterations` terms at `precision` bits.
    #[new]
    #[pyo3(signature = (iterations = 5, precision = 53, start = 1.0, end = 2.0))]
    fn new(iterations: u32, precision: u32, start: f64, end: f64) -> PyResult<Self> {
        let inner = seedgen::derive_segments(iterations, precision, start, end).map_err(to_py)?;
        Ok(Self { inner })
    }

    /// Table built from explicit boundaries `[b0, b1, ..., bn]`.
    #[staticmethod]
    #[pyo3(signature = (boundaries, iterations, precision = 53))]
    fn from_boundaries(boundaries: Vec<f64>, iterations: u32, precision: u32) -> PyResult<Self> {
        let segments = boundaries
            .windows(2)
            .map(|w| SeedSegment::new(w[0], w[1]))
            .collect::<engine::Result<Vec<_>>>()
            .map_err(to_py)?;
        let inner = seedgen::SeedTable::new(segments, iterations, precision).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn iterations(&self) -> u32 {
        self.inner.design_iterations()
    }

    #[getter]
    fn precision(&self) -> u32 {
        self.inner.design_precision()
    }

    /// Upper end of every segment.
    fn boundaries(&self) -> Vec<f64> {
        self.inner.boundaries()
    }

    /// `(lower, upper, slope, intercept)` per segment; slope is negative.
    fn segments(&self) -> Vec<(f64, f64, f64, f64)> {
        self.inner
            .segments()
            .iter()
            .map(|s| (s.lower(), s.upper(), -s.slope().to_f64(), s.intercept().to_f64()))
            .collect()
    }

    fn locate(&self, x: f64) -> PyResult<usize> {
        self.inner.locate(x).map_err(to_py)
    }

    fn to_csv(&self) -> PyResult<String> {
        let mut out = Vec::new();
        self.inner.write_csv(&mut out).map_err(|e| PyValueError::new_err(e.to_string()))?;
        String::from_utf8(out).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __len__(&self) -> usize {
        self.inner.segments().len()
    }

    fn __repr__(&self) -> String {
        let bounds: Vec<String> = self.inner.boundaries().into_iter().map(format_real).collect();
        format!(
            "SeedTable(iterations={}, precision={}, start={}, boundaries=[{}])",
            self.inner.design_iterations(),
            self.inner.design_precision(),
            format_real(self.inner.start()),
            bounds.join(", ")
        )
    }
}

/// Reciprocal and division engine with a fixed configuration.
#[pyclass(frozen, module = "ilmdiv")]
struct Divider {
    cfg: RecipConfig,
}

#[pymethods]
impl Divider {
    #[new]
    #[pyo3(signature = (terms = 5, iterations = None, table = None))]
    fn new(terms: u32, iterations: Option<u32>, table: Option<&SeedTable>) -> PyResult<Self> {
        let table = match table {
            Some(t) => t.inner.clone(),
            None => seedgen::SeedTable::default(),
        };
        let cfg = RecipConfig::new(table, terms, ilm_config(iterations)).map_err(to_py)?;
        Ok(Self { cfg })
    }

    #[getter]
    fn terms(&self) -> u32 {
        self.cfg.terms
    }

    #[getter]
    fn iterations(&self) -> Option<u32> {
        match self.cfg.multiplier {
            IlmConfig::Exact => None,
            IlmConfig::Iterations(n) => Some(n),
        }
    }

    #[getter]
    fn table(&self) -> SeedTable {
        SeedTable { inner: self.cfg.table.clone() }
    }

    /// `1/x` for `x` in `[1, 2)`, truncated to Q4.60.
    fn reciprocal(&self, x: f64) -> PyResult<f64> {
        engine::reciprocal(fixed(x)?, &self.cfg).map(FixedSig::to_f64).map_err(to_py)
    }

    /// Same as `reciprocal` on raw Q4.60 integers.
    fn reciprocal_raw(&self, raw: u64) -> PyResult<u64> {
        engine::reciprocal(FixedSig::from_raw(raw), &self.cfg).map(FixedSig::raw).map_err(to_py)
    }

    /// Intermediate values of one reciprocal evaluation.
    fn trace<'py>(&self, py: Python<'py>, x: f64) -> PyResult<Bound<'py, PyDict>> {
        let t = reciprocal_traced(fixed(x)?, &self.cfg).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("x", t.x.to_f64())?;
        d.set_item("segment", t.segment)?;
        d.set_item("y0", t.y0.to_f64())?;
        d.set_item("m", t.m.to_f64())?;
        d.set_item("clamped", t.clamped)?;
        d.set_item("powers", t.powers.iter().map(|p| p.to_f64()).collect::<Vec<_>>())?;
        d.set_item("partial_sums", t.partial_sums.iter().map(|p| p.to_f64()).collect::<Vec<_>>())?;
        d.set_item("counters", counters_dict(py, &t.counters)?)?;
        d.set_item("result", t.result.to_f64())?;
        d.set_item("result_raw", t.result.raw())?;
        Ok(d)
    }

    fn divide(&self, a: f64, b: f64) -> PyResult<f64> {
        divide_f64(a, b, &self.cfg).map_err(to_py)
    }

    fn divide_f32(&self, a: f32, b: f32) -> PyResult<f32> {
        divide_f32(a, b, &self.cfg).map_err(to_py)
    }

    /// Division on IEEE bit patterns of the given width.
    #[pyo3(signature = (a, b, format = 64))]
    fn divide_bits(&self, a: u64, b: u64, format: u32) -> PyResult<u64> {
        let fmt = format_of(format)?;
        if format == 32 && (a > u32::MAX as u64 || b > u32::MAX as u64) {
            return Err(PyValueError::new_err("binary32 operands must fit in 32 bits"));
        }
        engine::divide(a, b, fmt, &self.cfg).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "Divider(terms={}, iterations={}, segments={})",
            self.cfg.terms,
            self.cfg.multiplier,
            self.cfg.table.segments().len()
        )
    }
}

/// `1/x` with the default configuration.
#[pyfunction]
fn reciprocal(x: f64) -> PyResult<f64> {
    engine::reciprocal(fixed(x)?, &RecipConfig::default()).map(FixedSig::to_f64).map_err(to_py)
}

/// `a/b` in binary64 with the default configuration.
#[pyfunction]
fn divide(a: f64, b: f64) -> PyResult<f64> {
    divide_f64(a, b, &RecipConfig::default()).map_err(to_py)
}

#[pymodule]
pub fn ilmdiv(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SeedQualityError", m.py().get_type::<SeedQualityError>())?;
    m.add_class::<SeedTable>()?;
    m.add_class::<Divider>()?;
    m.add_function(wrap_pyfunction!(leading_one, m)?)?;
    m.add_function(wrap_pyfunction!(residue, m)?)?;
    m.add_function(wrap_pyfunction!(ilm_multiply, m)?)?;
    m.add_function(wrap_pyfunction!(square, m)?)?;
    m.add_function(wrap_pyfunction!(compute_powers, m)?)?;
    m.add_function(wrap_pyfunction!(min_iterations, m)?)?;
    m.add_function(wrap_pyfunction!(error_bound, m)?)?;
    m.add_function(wrap_pyfunction!(split_two_segments, m)?)?;
    m.add_function(wrap_pyfunction!(reference_divide_bits, m)?)?;
    m.add_function(wrap_pyfunction!(ulp_distance_py, m)?)?;
    m.add_function(wrap_pyfunction!(reciprocal, m)?)?;
    m.add_function(wrap_pyfunction!(divide, m)?)?;
    Ok(())
}
