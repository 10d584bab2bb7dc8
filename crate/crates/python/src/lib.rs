//! Python bindings: `import sqrtp`.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use ::sqrtp as core;
use core::cli;
use core::orders::Over;
use core::quaternion::{self, ClassNumberReport, EichlerContext, EichlerInput};
use core::realquad::{self, PrimeIdealF};
use core::Error;

create_exception!(sqrtp, NonIntegralError, PyException, "Mass plus elliptic part is not a positive integer.");
create_exception!(sqrtp, VerificationError, PyException, "An independent recomputation disagreed.");

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NonIntegral(_) => NonIntegralError::new_err(e.to_string()),
        Error::Inconsistent(_) | Error::SearchBound(_) => VerificationError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// `Q(sqrt p)` with its fundamental unit `eps = eps_a + eps_b sqrt p`.
#[pyclass(frozen, get_all, module = "sqrtp")]
struct Field {
    p: u64,
    d_f: u64,
    eps_a: String,
    eps_b: String,
    norm_eps: i8,
    varpi: Option<u8>,
    h_f: u64,
    zeta_m1: String,
}

#[pymethods]
impl Field {
    #[new]
    fn new(p: u64) -> PyResult<Self> {
        let f = realquad::build_field(p).map_err(to_py)?;
        let r = cli::FieldReport::new(&f);
        Ok(Field {
            p: r.p,
            d_f: r.d_f,
            eps_a: r.eps_a.to_string(),
            eps_b: r.eps_b.to_string(),
            norm_eps: r.norm_eps,
            varpi: r.varpi,
            h_f: r.h_f,
            zeta_m1: r.zeta_m1.to_string(),
        })
    }

    fn __repr__(&self) -> String {
        format!("Field(p={}, h_f={}, norm_eps={})", self.p, self.h_f, self.norm_eps)
    }
}

/// A CM field `K` over `Q(sqrt p)` with `w_K > 1`.
#[pyclass(frozen, get_all, module = "sqrtp")]
struct CmField {
    tag: String,
    name: String,
    mu_order: u32,
    q: u8,
    w: u32,
    h: u64,
}

#[pymethods]
impl CmField {
    fn __repr__(&self) -> String {
        format!("CmField({}, w={}, h={})", self.name, self.w, self.h)
    }
}

/// A quadratic order `B` with `w(B) > 1`.
#[pyclass(frozen, get_all, module = "sqrtp")]
struct Order {
    label: String,
    field: String,
    over: String,
    index: u64,
    w: u32,
    h: u64,
    conductor: Vec<String>,
}

#[pymethods]
impl Order {
    fn __repr__(&self) -> String {
        format!("Order({} in {}, w={}, h={})", self.label, self.field, self.w, self.h)
    }
}

/// `h(O) = mass + elliptic` for an Eichler order.
#[pyclass(frozen, module = "sqrtp")]
struct ClassNumber {
    report: ClassNumberReport,
}

#[pymethods]
impl ClassNumber {
    #[getter]
    fn p(&self) -> u64 {
        self.report.p
    }

    #[getter]
    fn disc(&self) -> Vec<String> {
        self.report.disc.iter().map(PrimeIdealF::to_string).collect()
    }

    #[getter]
    fn level(&self) -> Vec<String> {
        self.report.level.iter().map(PrimeIdealF::to_string).collect()
    }

    #[getter]
    fn mass(&self) -> String {
        self.report.mass.to_string()
    }

    #[getter]
    fn elliptic(&self) -> String {
        self.report.elliptic.to_string()
    }

    #[getter]
    fn h(&self) -> u64 {
        self.report.h_o
    }

    /// `(label, field, h(B), w(B), embedding product, term)` per order.
    #[getter]
    fn contributions(&self) -> Vec<(String, String, u64, u32, u64, String)> {
        self.report
            .contributions
            .iter()
            .map(|c| (c.label.to_string(), c.field.to_string(), c.h_b, c.w_b, c.embedding_product, c.term.to_string()))
            .collect()
    }

    fn to_json(&self) -> String {
        cli::to_json(&self.report)
    }

    fn __repr__(&self) -> String {
        format!("ClassNumber(p={}, h={})", self.report.p, self.report.h_o)
    }
}

#[pyfunction]
fn field(p: u64) -> PyResult<Field> {
    Field::new(p)
}

#[pyfunction]
fn cm_fields(p: u64) -> PyResult<Vec<CmField>> {
    let f = realquad::build_field(p).map_err(to_py)?;
    Ok(core::cmfield::enumerate_cm_fields(&f)
        .map_err(to_py)?
        .iter()
        .map(|k| CmField {
            tag: k.tag.to_string(),
            name: k.name(),
            mu_order: k.mu_order,
            q: k.q_kf,
            w: k.w_k,
            h: k.h_k,
        })
        .collect())
}

/// Orders over `O_F` (`over="OF"`) or proper orders over `Z[sqrt p]` (`over="A"`).
#[pyfunction]
#[pyo3(signature = (p, over = "OF"))]
fn orders(p: u64, over: &str) -> PyResult<Vec<Order>> {
    let over = match over {
        "OF" | "of" => Over::OF,
        "A" | "a" => Over::A,
        _ => return Err(PyValueError::new_err(format!("over must be 'OF' or 'A', got {over:?}"))),
    };
    Ok(cli::order_rows(p, over)
        .map_err(to_py)?
        .into_iter()
        .map(|r| Order {
            label: r.label.to_string(),
            field: r.field_name,
            over: r.over.to_string(),
            index: r.index,
            w: r.w,
            h: r.h,
            conductor: r.conductor_support.iter().map(PrimeIdealF::to_string).collect(),
        })
        .collect())
}

/// Items of `disc` and `level` are rational primes (every prime above them) or
/// strings `"l:r"` selecting the split prime above `l` with root `r`.
#[pyfunction]
#[pyo3(signature = (p, disc = Vec::new(), level = Vec::new()))]
fn class_number(p: u64, disc: Vec<Bound<'_, PyAny>>, level: Vec<Bound<'_, PyAny>>) -> PyResult<ClassNumber> {
    let items = |v: Vec<Bound<'_, PyAny>>| -> PyResult<Vec<String>> { v.iter().map(|x| Ok(x.str()?.to_string())).collect() };
    let report = cli::classnum_report(p, &items(disc)?, &items(level)?).map_err(to_py)?;
    Ok(ClassNumber { report })
}

/// Class numbers for every input in the small family used by the integrality checks.
#[pyfunction]
#[pyo3(signature = (p, ells = vec![2, 3, 5, 7, 11, 13], max_each = 2))]
fn class_number_family(p: u64, ells: Vec<u64>, max_each: usize) -> PyResult<Vec<u64>> {
    let ctx = EichlerContext::new(p).map_err(to_py)?;
    let inputs: Vec<EichlerInput> = quaternion::input_family(&ctx.field, &ells, max_each).map_err(to_py)?;
    inputs
        .iter()
        .map(|i| quaternion::class_number_eichler(&ctx, i).map(|r| r.h_o).map_err(to_py))
        .collect()
}

/// Run every independent cross-check for `p`; raises `VerificationError` on disagreement.
#[pyfunction]
fn verify(p: u64) -> PyResult<()> {
    core::oracle::verify_prime(p).map_err(to_py)
}

#[pyfunction]
fn kronecker(a: i64, n: i64) -> PyResult<i8> {
    core::arith::kronecker(a, n).map_err(to_py)
}

#[pymodule]
fn sqrtp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Field>()?;
    m.add_class::<CmField>()?;
    m.add_class::<Order>()?;
    m.add_class::<ClassNumber>()?;
    m.add_function(wrap_pyfunction!(field, m)?)?;
    m.add_function(wrap_pyfunction!(cm_fields, m)?)?;
    m.add_function(wrap_pyfunction!(orders, m)?)?;
    m.add_function(wrap_pyfunction!(class_number, m)?)?;
    m.add_function(wrap_pyfunction!(class_number_family, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(kronecker, m)?)?;
    m.add("NonIntegralError", m.py().get_type::<NonIntegralError>())?;
    m.add("VerificationError", m.py().get_type::<VerificationError>())?;
    Ok(())
}
