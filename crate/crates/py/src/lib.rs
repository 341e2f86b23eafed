//! Python bindings. Graphs, elements and morphisms cross the boundary as the
//! same JSON-shaped dicts the command-line tool reads.

use graphmonoid::ck::{induced_monoid_morphism, is_ck_morphism, GraphMorphism};
use graphmonoid::desing::{desingularize, required_truncation};
use graphmonoid::engine::{complete, RewriteSystem, DEFAULT_BUDGET};
use graphmonoid::oracle::gamma_acyclic;
use graphmonoid::{Error, Graph, MonoidElement, Presentation};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

create_exception!(graphmonoid, BudgetExhaustedError, PyException);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::BudgetExhausted { .. } => BudgetExhaustedError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn dumps(obj: &Bound<'_, PyAny>) -> PyResult<String> {
    let json = obj.py().import("json")?;
    json.call_method1("dumps", (obj,))?.extract()
}

fn loads<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn parse<T: DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    serde_json::from_str(&dumps(obj)?).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn graph(obj: &Bound<'_, PyAny>) -> PyResult<Graph> {
    Graph::from_json_str(&dumps(obj)?).map_err(py_err)
}

fn system(g: &Graph, budget: Option<usize>) -> PyResult<RewriteSystem> {
    let p = Presentation::from_graph(g).map_err(py_err)?;
    complete(&p, budget.unwrap_or(DEFAULT_BUDGET)).map_err(py_err)
}

fn morphism(
    source: &Bound<'_, PyAny>,
    target: &Bound<'_, PyAny>,
    m: &Bound<'_, PyAny>,
) -> PyResult<GraphMorphism> {
    GraphMorphism::from_json_str(&graph(source)?, &graph(target)?, &dumps(m)?).map_err(py_err)
}

/// Generators and defining relations of the graph monoid.
#[pyfunction]
fn present<'py>(g: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let p = Presentation::from_graph(&graph(g)?).map_err(py_err)?;
    loads(
        g.py(),
        &serde_json::json!({"generators": p.alphabet(), "relations": p.relations()}),
    )
}

#[pyfunction]
#[pyo3(signature = (g, element, budget=None))]
fn normal_form<'py>(
    g: &Bound<'py, PyAny>,
    element: &Bound<'py, PyAny>,
    budget: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let rs = system(&graph(g)?, budget)?;
    let x: MonoidElement = parse(element)?;
    loads(g.py(), &rs.normal_form(&x).map_err(py_err)?)
}

/// `{"equal": bool, "certificate": ...}`.
#[pyfunction]
#[pyo3(signature = (g, lhs, rhs, budget=None))]
fn equal<'py>(
    g: &Bound<'py, PyAny>,
    lhs: &Bound<'py, PyAny>,
    rhs: &Bound<'py, PyAny>,
    budget: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let rs = system(&graph(g)?, budget)?;
    let decision = rs.equal(&parse(lhs)?, &parse(rhs)?).map_err(py_err)?;
    loads(g.py(), &decision)
}

#[pyfunction(name = "desingularize")]
fn desingularize_graph<'py>(g: &Bound<'py, PyAny>, level: usize) -> PyResult<Bound<'py, PyAny>> {
    let d = desingularize(&graph(g)?, level).map_err(py_err)?;
    loads(g.py(), &d.graph().to_json_value())
}

/// Image in the desingularization; the level defaults to the smallest one
/// that covers `element`.
#[pyfunction]
#[pyo3(signature = (g, element, level=None))]
fn phi<'py>(
    g: &Bound<'py, PyAny>,
    element: &Bound<'py, PyAny>,
    level: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let source = graph(g)?;
    let x = parse::<MonoidElement>(element)?
        .canonical_in(&source)
        .map_err(py_err)?;
    let level = match level {
        Some(n) => n,
        None => required_truncation(&source, &x).map_err(py_err)?,
    };
    let image = desingularize(&source, level)
        .and_then(|d| d.phi(&x))
        .map_err(py_err)?;
    loads(g.py(), &image)
}

#[pyfunction]
fn psi<'py>(
    g: &Bound<'py, PyAny>,
    element: &Bound<'py, PyAny>,
    level: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let d = desingularize(&graph(g)?, level).map_err(py_err)?;
    loads(g.py(), &d.psi(&parse(element)?).map_err(py_err)?)
}

/// `{"is_ck": bool, "violations": [...]}`.
#[pyfunction]
fn ck_check<'py>(
    source: &Bound<'py, PyAny>,
    target: &Bound<'py, PyAny>,
    m: &Bound<'py, PyAny>,
) -> PyResult<Bound<'py, PyAny>> {
    let report = is_ck_morphism(&morphism(source, target, m)?).map_err(py_err)?;
    loads(source.py(), &report)
}

/// List of `{"gen": ..., "image": ...}` pairs.
#[pyfunction]
fn induced_map<'py>(
    source: &Bound<'py, PyAny>,
    target: &Bound<'py, PyAny>,
    m: &Bound<'py, PyAny>,
) -> PyResult<Bound<'py, PyAny>> {
    let map = induced_monoid_morphism(&morphism(source, target, m)?).map_err(py_err)?;
    let entries: Vec<_> = map
        .iter()
        .map(|(g, image)| serde_json::json!({"gen": g, "image": image}))
        .collect();
    loads(source.py(), &entries)
}

/// Path counts to sinks of a finite acyclic graph, as `{sink: count}`.
#[pyfunction]
fn gamma<'py>(g: &Bound<'py, PyAny>, element: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let v = gamma_acyclic(&graph(g)?, &parse(element)?).map_err(py_err)?;
    loads(g.py(), &v)
}

/// Runs the command-line tool in-process; returns `(code, stdout, stderr)`.
#[pyfunction]
fn run_cli(args: Vec<String>) -> (u8, String, String) {
    let out = graphmonoid::cli::run(std::iter::once("graphmonoid".to_string()).chain(args));
    (out.code, out.stdout, out.stderr)
}

#[pymodule]
#[pyo3(name = "graphmonoid")]
fn graphmonoid_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add(
        "BudgetExhaustedError",
        m.py().get_type::<BudgetExhaustedError>(),
    )?;
    m.add_function(wrap_pyfunction!(present, m)?)?;
    m.add_function(wrap_pyfunction!(normal_form, m)?)?;
    m.add_function(wrap_pyfunction!(equal, m)?)?;
    m.add_function(wrap_pyfunction!(desingularize_graph, m)?)?;
    m.add_function(wrap_pyfunction!(phi, m)?)?;
    m.add_function(wrap_pyfunction!(psi, m)?)?;
    m.add_function(wrap_pyfunction!(ck_check, m)?)?;
    m.add_function(wrap_pyfunction!(induced_map, m)?)?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
