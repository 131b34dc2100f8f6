//! Python bindings. Numbers cross the boundary as `int`, `float` or
//! `"a/b"` strings and are held as exact rationals; results carry both a
//! float and the exact ratio.

use probdom::apex::solve_apex;
use probdom::formats::{parse_instance, Instance};
use probdom::reductions::{reduce_kspm_to_tree, reduce_ksum_to_kspm, KsumInstance};
use probdom::scalar::{format_rational, parse_rational, rational_to_f64};
use probdom::tree_dp::{solve_tree_exact_bounded, solve_tree_ptas};
use probdom::tree_spm::{solve_kspm_colorcoding, solve_tree_exact_general};
use probdom::twdp::solve_unipbds_treewidth;
use probdom::{brute_force_kspm, brute_force_pbds, coverage, greedy_pbds, monte_carlo_coverage, Guarantee, KspmInstance, Rational, Scalar, SolutionReport, UncertainGraph};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn number(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    if let Ok(s) = obj.extract::<String>() {
        return parse_rational(&s).map_err(err);
    }
    if let Ok(i) = obj.extract::<i64>() {
        return Ok(Rational::from_int(i));
    }
    if let Ok(f) = obj.extract::<f64>() {
        return parse_rational(&f.to_string()).map_err(err);
    }
    Err(err("expected an int, float or 'a/b' string"))
}

#[pyclass(name = "Graph", module = "probdom_py", skip_from_py_object)]
#[derive(Clone)]
pub struct PyGraph {
    inner: UncertainGraph<Rational>,
}

#[pymethods]
impl PyGraph {
    /// `Graph(weights, edges)` with `edges` a list of `(u, v, p)`.
    #[new]
    fn new(weights: Vec<Bound<'_, PyAny>>, edges: Vec<(usize, usize, Bound<'_, PyAny>)>) -> PyResult<Self> {
        let w = weights.iter().map(number).collect::<PyResult<Vec<_>>>()?;
        let mut g = UncertainGraph::new(w).map_err(err)?;
        for (u, v, p) in &edges {
            g.add_edge(*u, *v, number(p)?).map_err(err)?;
        }
        Ok(PyGraph { inner: g })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        match parse_instance(text).map_err(err)? {
            Instance::Graph(g) => Ok(PyGraph { inner: g }),
            other => Err(err(format!("expected a ugraph instance, got {}", other.kind()))),
        }
    }

    fn to_text(&self) -> String {
        Instance::Graph(self.inner.clone()).to_text()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    fn is_tree(&self) -> bool {
        self.inner.is_tree()
    }

    fn coverage(&self, set: Vec<usize>) -> PyResult<f64> {
        Ok(rational_to_f64(&coverage(&self.inner, &set).map_err(err)?))
    }

    /// Exact coverage as an `"a/b"` string.
    fn coverage_exact(&self, set: Vec<usize>) -> PyResult<String> {
        Ok(format_rational(&coverage(&self.inner, &set).map_err(err)?))
    }

    /// `(mean, standard error)` of a sampled estimate.
    #[pyo3(signature = (set, samples = 10000, seed = 0))]
    fn monte_carlo(&self, set: Vec<usize>, samples: usize, seed: u64) -> PyResult<(f64, f64)> {
        let e = monte_carlo_coverage(&self.inner, &set, samples, seed).map_err(err)?;
        Ok((e.mean, e.std_error))
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, m={})", self.inner.n(), self.inner.m())
    }
}

fn report_dict<'py, T: Scalar>(py: Python<'py>, r: &SolutionReport<T>) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("algorithm", &r.algorithm)?;
    d.set_item("k", r.k)?;
    d.set_item("value", r.value.to_f64())?;
    d.set_item("value_exact", T::EXACT.then(|| format_rational(&r.value.to_rational())))?;
    d.set_item("set", r.set.clone())?;
    d.set_item("guarantee", r.guarantee.as_ref().map(|g| g.to_string()))?;
    let params = PyDict::new(py);
    for (k, v) in &r.params {
        params.set_item(k, v)?;
    }
    d.set_item("params", params)?;
    d.set_item("wall_time_ms", r.wall_time.as_secs_f64() * 1e3)?;
    Ok(d)
}

fn solve_generic<T: Scalar>(g: &UncertainGraph<Rational>, algo: &str, k: usize, eps: Option<&Rational>, p: Option<&Rational>, width_threshold: Option<usize>) -> PyResult<SolutionReport<T>> {
    let gt = g.map_scalar(T::from_rational);
    let p = p.map(T::from_rational);
    let tree = || gt.as_rooted_tree(0).map_err(err);
    match algo {
        "brute" => Ok(brute_force_pbds(&gt, k)),
        "greedy" => Ok(greedy_pbds(&gt, k)),
        "tree-ptas" => {
            let eps = T::from_rational(eps.ok_or_else(|| err("tree-ptas needs eps"))?);
            solve_tree_ptas(&tree()?, k, &eps).map_err(err)
        }
        "tree-exact-uniform" => solve_tree_exact_bounded(&tree()?, k).map_err(err),
        "tree-exact-spm" => solve_tree_exact_general(&tree()?, k).map_err(err),
        "twdp" => solve_unipbds_treewidth(&gt, p.as_ref(), k, None).map_err(err),
        "apex" => solve_apex(&gt, p.as_ref(), k, width_threshold).map_err(err),
        other => Err(err(format!("unknown algorithm {other:?}"))),
    }
}

/// Runs one solver and returns a dict with the value, set and guarantee.
#[pyfunction]
#[pyo3(signature = (graph, algo, k, eps = None, p = None, exact = true, width_threshold = None))]
fn solve<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    algo: &str,
    k: usize,
    eps: Option<Bound<'py, PyAny>>,
    p: Option<Bound<'py, PyAny>>,
    exact: bool,
    width_threshold: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let eps = eps.as_ref().map(number).transpose()?;
    let p = p.as_ref().map(number).transpose()?;
    if exact {
        report_dict(py, &solve_generic::<Rational>(&graph.inner, algo, k, eps.as_ref(), p.as_ref(), width_threshold)?)
    } else {
        report_dict(py, &solve_generic::<f64>(&graph.inner, algo, k, eps.as_ref(), p.as_ref(), width_threshold)?)
    }
}

/// Best exactly-`k` subset for `sum x - prod y`; `method` is `"brute"` or `"cc"`.
#[pyfunction]
#[pyo3(signature = (pairs, k, method = "brute", seed = 0))]
fn solve_kspm<'py>(py: Python<'py>, pairs: Vec<(Bound<'py, PyAny>, Bound<'py, PyAny>)>, k: usize, method: &str, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let pairs = pairs.iter().map(|(x, y)| Ok((number(x)?, number(y)?))).collect::<PyResult<Vec<_>>>()?;
    let inst = KspmInstance::optimization(pairs, k, None).map_err(err)?;
    let r = match method {
        "brute" => {
            let (v, set) = brute_force_kspm(&inst).map_err(err)?;
            SolutionReport::new("kspm-brute", k, set, v).with_guarantee(Guarantee::Exact)
        }
        "cc" => solve_kspm_colorcoding(&inst, seed).map_err(err)?,
        other => return Err(err(format!("unknown method {other:?}"))),
    };
    report_dict(py, &r)
}

/// k-SUM instance to a weighted tree: `(graph, budget, threshold)` with the
/// threshold as an `"a/b"` string.
#[pyfunction]
fn ksum_to_tree(xs: Vec<i64>, k: usize) -> PyResult<(PyGraph, usize, String)> {
    let red = reduce_ksum_to_kspm(&KsumInstance::new(xs, k).map_err(err)?).map_err(err)?;
    let tree = reduce_kspm_to_tree(&red.instance).map_err(err)?;
    Ok((PyGraph { inner: tree.graph }, tree.k, format_rational(&tree.threshold)))
}

#[pymodule]
fn probdom_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(solve_kspm, m)?)?;
    m.add_function(wrap_pyfunction!(ksum_to_tree, m)?)?;
    Ok(())
}
