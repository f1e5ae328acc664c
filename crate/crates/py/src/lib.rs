//! Python bindings for `momentlab`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

use momentlab::{arith, gl3, identities, lfunctions, modforms, moments, special, Error};

fn py_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Serializable report as a Python dict.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Hecke eigenform of level one.
#[pyclass(name = "Newform", frozen)]
struct PyNewform(modforms::Newform);

#[pymethods]
impl PyNewform {
    #[getter]
    fn weight(&self) -> u32 {
        self.0.weight
    }

    #[getter]
    fn index(&self) -> usize {
        self.0.index
    }

    #[getter]
    fn n_max(&self) -> usize {
        self.0.n_max()
    }

    #[getter]
    fn petersson_weight(&self) -> f64 {
        self.0.petersson_weight
    }

    /// Normalized coefficients `λ(1..=n_max)`.
    #[getter]
    fn coefficients(&self) -> Vec<f64> {
        self.0.lambda[1..].to_vec()
    }

    fn hecke_lambda(&self, n: u64) -> PyResult<f64> {
        modforms::hecke_lambda(&self.0, n).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("Newform(weight={}, index={}, n_max={})", self.0.weight, self.0.index, self.0.n_max())
    }
}

/// Symmetric-square lift of a level-one form.
#[pyclass(name = "SymSquareForm", frozen)]
struct PySymSquare(gl3::SymSquareForm);

#[pymethods]
impl PySymSquare {
    #[new]
    fn new(g: &PyNewform, n_max: usize) -> PyResult<Self> {
        gl3::SymSquareForm::new(&g.0, n_max).map(PySymSquare).map_err(py_err)
    }

    #[getter]
    fn n_max(&self) -> usize {
        self.0.n_max()
    }

    fn coefficient(&self, n: usize) -> PyResult<f64> {
        self.0.a(n).map_err(py_err)
    }

    fn coefficient_2d(&self, m: u64, n: u64) -> PyResult<f64> {
        gl3::gl3_coeff(&self.0, m, n).map_err(py_err)
    }

    fn l_one(&self) -> PyResult<f64> {
        gl3::l_one(&self.0).map_err(py_err)
    }
}

/// Smooth compactly supported test function.
#[pyclass(name = "TestFunction", frozen)]
struct PyTestFunction(special::TestFunction);

#[pymethods]
impl PyTestFunction {
    #[staticmethod]
    fn canonical() -> Self {
        PyTestFunction(special::TestFunction::canonical())
    }

    #[staticmethod]
    fn bump(a: f64, b: f64) -> PyResult<Self> {
        special::TestFunction::bump(a, b).map(PyTestFunction).map_err(py_err)
    }

    #[getter]
    fn support(&self) -> (f64, f64) {
        self.0.support()
    }

    fn __call__(&self, x: f64) -> f64 {
        self.0.eval(x)
    }

    fn integral(&self) -> f64 {
        self.0.integral()
    }
}

#[pyfunction]
fn kloosterman(m: i64, n: i64, c: u64) -> PyResult<f64> {
    if c == 0 {
        return Err(PyValueError::new_err("modulus must be positive"));
    }
    Ok(arith::kloosterman(m, n, c).value())
}

#[pyfunction]
fn weil_bound(m: i64, n: i64, c: u64) -> PyResult<f64> {
    if c == 0 {
        return Err(PyValueError::new_err("modulus must be positive"));
    }
    Ok(arith::weil_bound(m, n, c))
}

#[pyfunction]
fn dim_cusp_forms(k: u32) -> usize {
    modforms::dim_cusp_forms(k)
}

#[pyfunction]
fn eigenforms(py: Python<'_>, k: u32, n_max: usize) -> PyResult<Vec<PyNewform>> {
    py.detach(|| modforms::eigenforms(k, n_max))
        .map(|v| v.into_iter().map(PyNewform).collect())
        .map_err(py_err)
}

#[pyfunction]
fn petersson<'py>(py: Python<'py>, k: u32, m: u64, n: u64) -> PyResult<Bound<'py, PyAny>> {
    let report = py.detach(|| identities::petersson_auto(k, m, n)).map_err(py_err)?;
    to_py(py, &report)
}

#[pyfunction]
fn central_value_rs(py: Python<'_>, f_gl3: &PySymSquare, f: &PyNewform) -> PyResult<f64> {
    py.detach(|| lfunctions::central_value_rs(&f_gl3.0, &f.0)).map_err(py_err)
}

#[pyfunction]
fn central_value_gl2(py: Python<'_>, f: &PyNewform) -> PyResult<f64> {
    py.detach(|| lfunctions::central_value_gl2(&f.0)).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (h, k_param, x, mode = "even"))]
fn averaged_bessel<'py>(py: Python<'py>, h: &PyTestFunction, k_param: f64, x: f64, mode: &str) -> PyResult<Bound<'py, PyAny>> {
    let mode = match mode {
        "even" => special::BesselAverage::Even,
        "mod4-0" => special::BesselAverage::Mod4(0),
        "mod4-2" => special::BesselAverage::Mod4(2),
        other => return Err(PyValueError::new_err(format!("unknown mode {other}"))),
    };
    let r = special::averaged_bessel(&h.0, k_param, x, mode).map_err(py_err)?;
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (f_gl3, k_param, w, ell = 1, include_gl2 = false))]
fn weight_moment<'py>(
    py: Python<'py>,
    f_gl3: &PySymSquare,
    k_param: f64,
    w: &PyTestFunction,
    ell: u64,
    include_gl2: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let report = py
        .detach(|| moments::weight_moment(&f_gl3.0, k_param, &w.0, ell, include_gl2))
        .map_err(py_err)?;
    to_py(py, &report)
}

#[pyfunction]
fn amplifier<'py>(py: Python<'py>, f0: &PyNewform, f: &PyNewform, l_param: u64) -> PyResult<Bound<'py, PyAny>> {
    let amp = moments::Amplifier::new(&f0.0, l_param).map_err(py_err)?;
    let value = amp.eval(&f.0).map_err(py_err)?;
    let expansion = amp.expansion(&f.0).map_err(py_err)?;
    let out = to_py(py, &expansion)?;
    out.set_item("value", value)?;
    out.set_item("self_lower_bound", amp.self_lower_bound())?;
    Ok(out)
}

#[pymodule]
fn momentlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNewform>()?;
    m.add_class::<PySymSquare>()?;
    m.add_class::<PyTestFunction>()?;
    m.add_function(wrap_pyfunction!(kloosterman, m)?)?;
    m.add_function(wrap_pyfunction!(weil_bound, m)?)?;
    m.add_function(wrap_pyfunction!(dim_cusp_forms, m)?)?;
    m.add_function(wrap_pyfunction!(eigenforms, m)?)?;
    m.add_function(wrap_pyfunction!(petersson, m)?)?;
    m.add_function(wrap_pyfunction!(central_value_rs, m)?)?;
    m.add_function(wrap_pyfunction!(central_value_gl2, m)?)?;
    m.add_function(wrap_pyfunction!(averaged_bessel, m)?)?;
    m.add_function(wrap_pyfunction!(weight_moment, m)?)?;
    m.add_function(wrap_pyfunction!(amplifier, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
