//! Python bindings: space-form charts, contact data on `T_εM`, and the
//! verification suites.

use nalgebra::DVector;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use sasaki_core::contact::{kappa_mu_for_space_form, space_form_h_eigenvalues, ContactData};
use sasaki_core::error::GeometryError;
use sasaki_core::manifold::{space_form_chart, ChartedMetric, SpaceFormSpec, TangentVec};
use sasaki_core::report::to_json;
use sasaki_core::sphere_bundle::{SBPoint, SBVec};
use sasaki_core::suites::{run_suite as run, SuiteConfig, SUITES};

fn err(e: GeometryError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn vector(v: Vec<f64>) -> DVector<f64> {
    DVector::from_vec(v)
}

type Pair = (Vec<f64>, Vec<f64>);

fn rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Conformal chart of the space form of dimension `n`, index `nu` and
/// curvature `c`.
#[pyclass(name = "SpaceForm", frozen)]
struct PySpaceForm {
    chart: ChartedMetric,
    spec: SpaceFormSpec,
}

#[pymethods]
impl PySpaceForm {
    #[new]
    fn new(n: usize, nu: usize, c: f64) -> PyResult<Self> {
        if n < 1 || nu > n {
            return Err(PyValueError::new_err(format!("need 1 <= n and nu <= n, got n={n} nu={nu}")));
        }
        let spec = SpaceFormSpec::new(n, nu, c);
        Ok(Self { chart: space_form_chart(spec), spec })
    }

    #[getter]
    fn n(&self) -> usize {
        self.spec.dim
    }

    #[getter]
    fn nu(&self) -> usize {
        self.spec.index
    }

    #[getter]
    fn c(&self) -> f64 {
        self.spec.curvature
    }

    fn metric(&self, x: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        Ok(rows(&self.chart.metric_at(&vector(x)).map_err(err)?))
    }

    fn signature(&self, x: Vec<f64>) -> PyResult<(usize, usize)> {
        self.chart.signature_at(&vector(x)).map_err(err)
    }

    /// `R^i_jkl` as a nested list indexed `[i][j][k][l]`.
    fn riemann(&self, x: Vec<f64>) -> PyResult<Vec<Vec<Vec<Vec<f64>>>>> {
        let r = self.chart.riemann_at(&vector(x)).map_err(err)?;
        let n = self.spec.dim;
        Ok((0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| (0..n).map(|l| r.get(i, j, k, l)).collect()).collect()).collect())
            .collect())
    }

    fn sectional_curvature(&self, x: Vec<f64>, a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
        let x = vector(x);
        let a = TangentVec::new(x.clone(), vector(a));
        let b = TangentVec::new(x, vector(b));
        self.chart.sectional_curvature(&a, &b).map_err(err)
    }

    /// Contact data at `(x, u)` on `T_εM`; `u` is rescaled onto the fiber.
    fn contact_at(&self, x: Vec<f64>, u: Vec<f64>, eps: f64) -> PyResult<PyContact> {
        let p = SBPoint::normalized(&self.chart, vector(x), vector(u), eps).map_err(err)?;
        Ok(PyContact { data: ContactData::new(&self.chart, p).map_err(err)? })
    }

    fn __repr__(&self) -> String {
        format!("SpaceForm(n={}, nu={}, c={})", self.spec.dim, self.spec.index, self.spec.curvature)
    }
}

/// The contact pseudo-metric structure at one point of `T_εM`.
/// Tangent vectors are pairs `(h, t)` meaning `h^h + t^t`.
#[pyclass(name = "ContactPoint", frozen)]
struct PyContact {
    data: ContactData,
}

impl PyContact {
    fn vec(&self, a: Pair) -> PyResult<SBVec> {
        let n = self.data.dim();
        if a.0.len() != n || a.1.len() != n {
            return Err(err(GeometryError::DimensionMismatch { expected: n, got: a.0.len().max(a.1.len()) }));
        }
        Ok(self.data.bundle.vec(&vector(a.0), &vector(a.1)))
    }
}

fn pair(v: SBVec) -> Pair {
    (v.h.iter().copied().collect(), v.t.iter().copied().collect())
}

#[pymethods]
impl PyContact {
    #[getter]
    fn eps(&self) -> f64 {
        self.data.eps()
    }

    #[getter]
    fn u(&self) -> Vec<f64> {
        self.data.u().iter().copied().collect()
    }

    fn xi(&self) -> Pair {
        pair(self.data.xi.clone())
    }

    fn eta(&self, a: Pair) -> PyResult<f64> {
        Ok(self.data.eta(&self.vec(a)?))
    }

    fn phi(&self, a: Pair) -> PyResult<Pair> {
        Ok(pair(self.data.phi(&self.vec(a)?)))
    }

    /// The associated metric `g_cm`.
    fn metric(&self, a: Pair, b: Pair) -> PyResult<f64> {
        Ok(self.data.metric(&self.vec(a)?, &self.vec(b)?))
    }

    fn h(&self, a: Pair) -> PyResult<Pair> {
        Ok(pair(self.data.h(&self.vec(a)?)))
    }

    fn h_eigenvalues(&self) -> PyResult<Vec<f64>> {
        let frame = self.data.bundle.frame(0).map_err(err)?;
        self.data.h_operator(&frame).eigenvalues().map_err(err)
    }

    fn sectional(&self, a: Pair, b: Pair) -> PyResult<f64> {
        self.data.sectional(&self.vec(a)?, &self.vec(b)?).map_err(err)
    }

    fn phi_sectional(&self, a: Pair) -> PyResult<f64> {
        self.data.phi_sectional(&self.vec(a)?).map_err(err)
    }

    /// Largest component of the Sasakian defect on the pair.
    fn sasakian_defect(&self, a: Pair, b: Pair) -> PyResult<f64> {
        Ok(self.data.sasakian_defect(&self.vec(a)?, &self.vec(b)?).max_abs())
    }
}

#[pyfunction]
fn kappa_mu(c: f64, eps: f64) -> (f64, f64) {
    let km = kappa_mu_for_space_form(c, eps);
    (km.kappa, km.mu)
}

/// `(tangential, horizontal)` eigenvalues of `h` over a space form.
#[pyfunction]
fn h_eigenvalues(c: f64, eps: f64) -> (f64, f64) {
    space_form_h_eigenvalues(c, eps)
}

#[pyfunction]
fn suites() -> Vec<&'static str> {
    SUITES.to_vec()
}

/// Runs a suite and returns its report as a JSON string.
#[pyfunction]
#[pyo3(signature = (suite, n=2, nu=0, c=1.0, eps=1.0, seed=42, tol=None, fd_step=1e-5, points=10, samples=20))]
#[allow(clippy::too_many_arguments)]
fn run_suite(
    py: Python<'_>,
    suite: &str,
    n: usize,
    nu: usize,
    c: f64,
    eps: f64,
    seed: u64,
    tol: Option<f64>,
    fd_step: f64,
    points: usize,
    samples: usize,
) -> PyResult<String> {
    let cfg = SuiteConfig { suite: suite.into(), n, nu, c, eps, seed, tol, fd_step, points, samples };
    let report = py.detach(|| run(&cfg)).map_err(err)?;
    Ok(to_json(&report))
}

#[pymodule]
fn sasaki(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpaceForm>()?;
    m.add_class::<PyContact>()?;
    m.add_function(wrap_pyfunction!(kappa_mu, m)?)?;
    m.add_function(wrap_pyfunction!(h_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(suites, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}
