//! Python bindings. Rationals cross the boundary as strings (`"-3/4"`);
//! ints are accepted too. Matrices are lists of rows.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use tdscale::cli::{run_on, Command, InputSource, RunConfig};
use tdscale::contraction::{self, Piece};
use tdscale::lattice;
use tdscale::linalg::QMatrix;
use tdscale::newton;
use tdscale::padic::{self, format_rational, parse_rational, PValuation, Rational};
use tdscale::tidy;

create_exception!(tdscale_py, TdscaleError, PyException);

fn err(e: impl ToString) -> PyErr {
    TdscaleError::new_err(e.to_string())
}

fn rational(x: &Bound<'_, PyAny>) -> PyResult<Rational> {
    parse_rational(&x.str()?.to_string()).map_err(err)
}

fn matrix(rows: Vec<Vec<Bound<'_, PyAny>>>) -> PyResult<QMatrix> {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(rational).collect::<PyResult<Vec<_>>>())
        .collect::<PyResult<Vec<_>>>()?;
    let n = rows.len();
    let m = QMatrix::from_rows(rows).map_err(err)?;
    if m.cols() != n && n > 0 {
        return Err(err("matrix must be square"));
    }
    Ok(m)
}

fn columns_out(m: &QMatrix) -> Vec<Vec<String>> {
    m.columns().iter().map(|c| c.iter().map(format_rational).collect()).collect()
}

fn rows_out(m: &QMatrix) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(format_rational).collect()).collect()
}

/// A `Z_(p)`-lattice in canonical form.
#[pyclass(module = "tdscale_py", eq, frozen, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct Lattice {
    inner: lattice::Lattice,
}

#[pymethods]
impl Lattice {
    /// Lattice spanned by the given columns in `Q^ambient`.
    #[new]
    fn new(p: u64, ambient: usize, columns: Vec<Vec<Bound<'_, PyAny>>>) -> PyResult<Self> {
        let cols = columns
            .iter()
            .map(|c| c.iter().map(rational).collect::<PyResult<Vec<_>>>())
            .collect::<PyResult<Vec<_>>>()?;
        Ok(Lattice { inner: lattice::Lattice::from_columns(p, ambient, &cols).map_err(err)? })
    }

    #[staticmethod]
    fn standard(p: u64, n: usize) -> PyResult<Self> {
        Ok(Lattice { inner: lattice::Lattice::standard(p, n).map_err(err)? })
    }

    #[getter]
    fn prime(&self) -> u64 {
        self.inner.prime()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    /// Canonical basis, column by column.
    fn basis(&self) -> Vec<Vec<String>> {
        columns_out(self.inner.basis())
    }

    fn contains(&self, other: &Lattice) -> bool {
        self.inner.contains(&other.inner)
    }

    /// `log_p [self : other]`.
    fn index(&self, other: &Lattice) -> PyResult<i64> {
        self.inner.index(&other.inner).map_err(err)
    }

    fn sum(&self, other: &Lattice) -> PyResult<Lattice> {
        Ok(Lattice { inner: self.inner.sum(&other.inner).map_err(err)? })
    }

    fn intersect(&self, other: &Lattice) -> PyResult<Lattice> {
        Ok(Lattice { inner: self.inner.intersect(&other.inner).map_err(err)? })
    }

    fn apply(&self, m: Vec<Vec<Bound<'_, PyAny>>>) -> PyResult<Lattice> {
        Ok(Lattice { inner: self.inner.apply(&matrix(m)?).map_err(err)? })
    }

    /// `p^k L`.
    fn scaled(&self, k: i64) -> Lattice {
        Lattice { inner: self.inner.scaled(k) }
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner.to_json()).expect("serializable")
    }

    fn __repr__(&self) -> String {
        format!("Lattice(p={}, rank={}, basis={:?})", self.inner.prime(), self.inner.rank(), self.basis())
    }
}

/// Contraction decomposition `E_p ⊕ E_0 ⊕ E_m`.
#[pyclass(module = "tdscale_py", frozen)]
struct ContractionSplit {
    inner: contraction::ContractionSplit,
}

#[pymethods]
impl ContractionSplit {
    #[getter]
    fn is_exact(&self) -> bool {
        self.inner.is_exact()
    }

    #[getter]
    fn precision(&self) -> Option<u32> {
        self.inner.precision()
    }

    /// `(expanding, bounded, contracting)` dimensions.
    fn dims(&self) -> (usize, usize, usize) {
        let d = |piece| self.inner.piece(piece).cols();
        (d(Piece::Expanding), d(Piece::Bounded), d(Piece::Contracting))
    }

    fn expanding(&self) -> Vec<Vec<String>> {
        columns_out(&self.inner.piece(Piece::Expanding))
    }

    fn bounded(&self) -> Vec<Vec<String>> {
        columns_out(&self.inner.piece(Piece::Bounded))
    }

    fn contracting(&self) -> Vec<Vec<String>> {
        columns_out(&self.inner.piece(Piece::Contracting))
    }

    /// The matrix tidying runs on; equal to `alpha` for exact splits.
    fn effective(&self) -> Vec<Vec<String>> {
        rows_out(self.inner.effective())
    }

    fn adapted_lattice(&self) -> PyResult<Lattice> {
        Ok(Lattice { inner: contraction::adapted_lattice(&self.inner).map_err(err)?.lattice })
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }
}

/// Result of the tidying procedure.
#[pyclass(module = "tdscale_py", frozen)]
struct TidyCertificate {
    inner: tidy::TidyCertificate,
}

#[pymethods]
impl TidyCertificate {
    #[getter]
    fn scale_exponent(&self) -> u64 {
        self.inner.scale_exponent
    }

    #[getter]
    fn steps(&self) -> usize {
        self.inner.steps
    }

    #[getter]
    fn lattice(&self) -> Lattice {
        Lattice { inner: self.inner.lattice.clone() }
    }

    #[getter]
    fn v_plus(&self) -> Lattice {
        Lattice { inner: self.inner.v_plus.clone() }
    }

    #[getter]
    fn v_minus(&self) -> Lattice {
        Lattice { inner: self.inner.v_minus.clone() }
    }

    #[getter]
    fn t1_verified(&self) -> bool {
        self.inner.t1_verified
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }
}

/// `v_p(x)` as a string, `"inf"` for zero.
#[pyfunction]
fn vp(x: &Bound<'_, PyAny>, p: u64) -> PyResult<String> {
    Ok(match padic::vp(&rational(x)?, p).map_err(err)? {
        PValuation::Finite(v) => format_rational(&v),
        PValuation::Infinity => "inf".into(),
    })
}

/// Eigenvalue valuations with multiplicities, ascending.
#[pyfunction]
fn eigenvalue_valuations(m: Vec<Vec<Bound<'_, PyAny>>>, p: u64) -> PyResult<Vec<(String, usize)>> {
    let f = matrix(m)?.charpoly().map_err(err)?;
    let vals = newton::eigenvalue_valuations(&f, p).map_err(err)?;
    Ok(vals.entries.iter().map(|(v, k)| (format_rational(v), *k)).collect())
}

/// `log_p` of the scale, read off the Newton polygon.
#[pyfunction]
fn scale_exponent(m: Vec<Vec<Bound<'_, PyAny>>>, p: u64) -> PyResult<u64> {
    let f = matrix(m)?.charpoly().map_err(err)?;
    Ok(newton::scale_exponent(&newton::eigenvalue_valuations(&f, p).map_err(err)?))
}

#[pyfunction]
#[pyo3(signature = (m, p, precision = contraction::DEFAULT_PRECISION))]
fn contraction_split(m: Vec<Vec<Bound<'_, PyAny>>>, p: u64, precision: u32) -> PyResult<ContractionSplit> {
    let a = matrix(m)?;
    Ok(ContractionSplit { inner: contraction::contraction_split_auto(&a, p, precision).map_err(err)? })
}

/// Tidies `start` (standard lattice by default) for `m`.
#[pyfunction]
#[pyo3(signature = (m, p, start = None, precision = contraction::DEFAULT_PRECISION))]
fn tidying(m: Vec<Vec<Bound<'_, PyAny>>>, p: u64, start: Option<&Lattice>, precision: u32) -> PyResult<TidyCertificate> {
    let a = matrix(m)?;
    let split = contraction::contraction_split_auto(&a, p, precision).map_err(err)?;
    let u0 = match start {
        Some(l) => l.inner.clone(),
        None => lattice::Lattice::standard(p, a.rows()).map_err(err)?,
    };
    Ok(TidyCertificate { inner: tidy::tidying(&u0, &a, &split).map_err(err)? })
}

/// Runs a command line subcommand on a JSON string; returns
/// `(exit_code, stdout, stderr)`.
#[pyfunction]
#[pyo3(signature = (command, input, precision = contraction::DEFAULT_PRECISION))]
fn run(command: &str, input: &str, precision: u32) -> PyResult<(i32, String, String)> {
    let cmd = match command {
        "newton" => Command::Newton,
        "contract" => Command::Contract,
        "tidy" => Command::Tidy,
        "scale" => Command::Scale,
        "sylow" => Command::Sylow,
        "invariant-lattice" => Command::InvariantLattice,
        "primes" => Command::Primes,
        "module" => Command::Module,
        other => return Err(err(format!("unknown command {other}"))),
    };
    let mut config = RunConfig::new(cmd, InputSource::Inline(input.into()));
    config.precision = precision;
    let out = run_on(&config, input);
    Ok((out.code, out.stdout, out.stderr))
}

#[pymodule]
fn tdscale_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("TdscaleError", m.py().get_type::<TdscaleError>())?;
    m.add_class::<Lattice>()?;
    m.add_class::<ContractionSplit>()?;
    m.add_class::<TidyCertificate>()?;
    m.add_function(wrap_pyfunction!(vp, m)?)?;
    m.add_function(wrap_pyfunction!(eigenvalue_valuations, m)?)?;
    m.add_function(wrap_pyfunction!(scale_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(contraction_split, m)?)?;
    m.add_function(wrap_pyfunction!(tidying, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
