//! Python bindings: `import wbgame`.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

use ::wbgame::analysis::{self, Setup};
use ::wbgame::game::count_nodes;
use ::wbgame::model::{build_game, prune_zero, OutcomeClass, Param};
use ::wbgame::oracle;
use ::wbgame::render::{self, Format, Meta};
use ::wbgame::scenario::{corpus, parse_scenario, render_scenario, ScenarioFile};
use ::wbgame::{Node, Payoff, TieRule};

create_exception!(wbgame, ScenarioError, PyValueError, "Invalid scenario text or parameter value.");
create_exception!(wbgame, AnalysisError, PyRuntimeError, "A solve or analysis step failed.");

fn scenario_err(e: impl ToString) -> PyErr {
    ScenarioError::new_err(e.to_string())
}

fn analysis_err(e: impl ToString) -> PyErr {
    AnalysisError::new_err(e.to_string())
}

/// JSON value to Python; the string "-inf" becomes `float("-inf")`.
fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) if s == "-inf" => f64::NEG_INFINITY.into_pyobject(py)?.into_any(),
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn serialize<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &serde_json::to_value(value).map_err(analysis_err)?)
}

fn param(name: &str) -> PyResult<Param> {
    name.parse().map_err(scenario_err)
}

fn payoff(value: f64) -> PyResult<Payoff> {
    if value == f64::NEG_INFINITY {
        Ok(Payoff::NegInf)
    } else {
        Payoff::finite(value).map_err(scenario_err)
    }
}

/// A parsed and validated scenario.
#[pyclass(module = "wbgame", from_py_object)]
#[derive(Clone)]
struct Scenario {
    inner: ScenarioFile,
}

#[pymethods]
impl Scenario {
    /// Parses scenario text (`key = value` lines).
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse_scenario(text).map(|inner| Scenario { inner }).map_err(scenario_err)
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        let text = std::fs::read_to_string(&path).map_err(|e| scenario_err(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// One of the scenarios bundled with the library, e.g. `"snowden.scn"`.
    #[staticmethod]
    fn shipped(file: &str) -> PyResult<Self> {
        let (_, text) = corpus::ALL
            .iter()
            .find(|(f, _)| *f == file || f.trim_end_matches(".scn") == file)
            .ok_or_else(|| scenario_err(format!("no shipped scenario {file:?}")))?;
        Self::parse(text)
    }

    #[staticmethod]
    fn shipped_names() -> Vec<&'static str> {
        corpus::ALL.iter().map(|(f, _)| *f).collect()
    }

    #[getter]
    fn name(&self) -> &str {
        &self.inner.name
    }

    #[getter]
    fn variant(&self) -> &'static str {
        self.inner.parameters.variant.as_str()
    }

    #[getter]
    fn expected_outcome(&self) -> Option<&'static str> {
        self.inner.expected_outcome.map(OutcomeClass::slug)
    }

    #[getter]
    fn risk(&self) -> (f64, f64) {
        (self.inner.risk.alice, self.inner.risk.tom)
    }

    /// Sets the CARA coefficients `(alice, tom)`.
    #[setter]
    fn set_risk(&mut self, risk: (f64, f64)) -> PyResult<()> {
        if !(risk.0.is_finite() && risk.1.is_finite()) {
            return Err(scenario_err("risk coefficients must be finite"));
        }
        self.inner.risk.alice = risk.0;
        self.inner.risk.tom = risk.1;
        Ok(())
    }

    #[getter]
    fn ties(&self) -> (&'static str, &'static str) {
        (self.inner.ties.alice.as_str(), self.inner.ties.tom.as_str())
    }

    #[setter]
    fn set_ties(&mut self, ties: (String, String)) -> PyResult<()> {
        self.inner.ties.alice = ties.0.parse::<TieRule>().map_err(scenario_err)?;
        self.inner.ties.tom = ties.1.parse::<TieRule>().map_err(scenario_err)?;
        Ok(())
    }

    /// Value of a parameter by its one-letter name.
    fn get(&self, name: &str) -> PyResult<f64> {
        Ok(self.inner.parameters.get(param(name)?).to_f64())
    }

    /// Copy with one parameter changed; the result is validated.
    fn with_param(&self, name: &str, value: f64) -> PyResult<Scenario> {
        let mut next = self.clone();
        next.inner.parameters.set(param(name)?, payoff(value)?);
        next.inner.parameters.validate().map_err(scenario_err)?;
        Ok(next)
    }

    /// All 19 parameters as `(name, value)` pairs.
    fn parameters(&self) -> Vec<(&'static str, f64)> {
        Param::ALL.iter().map(|p| (p.name(), self.inner.parameters.get(*p).to_f64())).collect()
    }

    fn warnings(&self) -> Vec<String> {
        self.inner.parameters.warnings()
    }

    /// Canonical scenario text.
    fn render(&self) -> String {
        render_scenario(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Scenario(name={:?}, variant={})", self.inner.name, self.inner.parameters.variant)
    }

    fn __eq__(&self, other: &Scenario) -> bool {
        self.inner == other.inner
    }
}

impl Scenario {
    fn tree(&self, pruned: bool) -> PyResult<Node> {
        let tree = build_game(&self.inner.parameters).map_err(scenario_err)?;
        Ok(if pruned { prune_zero(&tree) } else { tree })
    }

    fn setup(&self) -> Setup {
        self.inner.setup()
    }
}

/// Backward-induction solution of a scenario.
#[pyclass(module = "wbgame", skip_from_py_object)]
struct SolveResult {
    tree: Node,
    inner: ::wbgame::SolveResult,
}

#[pymethods]
impl SolveResult {
    /// Chosen action per decision node identifier.
    #[getter]
    fn profile(&self) -> Vec<(String, String)> {
        self.inner.profile.choices.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    /// `(alice, tom)` expected utilities at the root.
    #[getter]
    fn root_value(&self) -> (f64, f64) {
        (self.inner.root_value.alice.to_f64(), self.inner.root_value.tom.to_f64())
    }

    #[getter]
    fn node_values(&self) -> Vec<(String, (f64, f64))> {
        self.inner
            .node_values
            .iter()
            .map(|(k, v)| (k.to_string(), (v.alice.to_f64(), v.tom.to_f64())))
            .collect()
    }

    /// Reach probability per terminal identifier.
    #[getter]
    fn outcome_distribution(&self) -> Vec<(String, f64)> {
        self.inner.outcome_distribution.iter().map(|(k, p)| (k.to_string(), *p)).collect()
    }

    /// Probability per outcome class slug.
    #[getter]
    fn classes(&self) -> Vec<(&'static str, f64)> {
        analysis::class_distribution(&self.inner).into_iter().map(|(c, p)| (c.slug(), p)).collect()
    }

    #[getter]
    fn alice_leaks(&self) -> bool {
        analysis::alice_leaks(&self.inner)
    }

    #[getter]
    fn modal_class(&self) -> Option<&'static str> {
        analysis::modal_class(&self.inner).map(OutcomeClass::slug)
    }

    /// Chosen action at a node identifier such as `"/leak/trust"`.
    fn choice(&self, node: &str) -> Option<String> {
        self.inner.choice(&node.into()).map(str::to_string)
    }

    /// Text, JSON or CSV rendering (no metadata block).
    #[pyo3(signature = (format = "text"))]
    fn render(&self, format: &str) -> PyResult<String> {
        let format: Format = format.parse().map_err(scenario_err)?;
        Ok(render::render_result(&self.tree, &self.inner, format, None))
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        serialize(py, &self.inner)
    }

    fn __repr__(&self) -> String {
        let (a, t) = self.root_value();
        format!("SolveResult(alice={a}, tom={t}, leaks={})", self.alice_leaks())
    }
}

/// Solves a scenario by backward induction.
#[pyfunction]
#[pyo3(signature = (scenario, pruned = false))]
fn solve(scenario: &Scenario, pruned: bool) -> PyResult<SolveResult> {
    let tree = scenario.tree(pruned)?;
    let inner = ::wbgame::solve(&tree, &scenario.inner.risk, &scenario.inner.ties).map_err(analysis_err)?;
    Ok(SolveResult { tree, inner })
}

/// `(decision, chance, terminal)` node counts.
#[pyfunction]
#[pyo3(signature = (scenario, pruned = false))]
fn count(scenario: &Scenario, pruned: bool) -> PyResult<(usize, usize, usize)> {
    let c = count_nodes(&scenario.tree(pruned)?);
    Ok((c.decision, c.chance, c.terminal))
}

/// Subgame-perfect pure profiles found by exhaustive enumeration.
#[pyfunction]
fn brute_force_spe<'py>(py: Python<'py>, scenario: &Scenario) -> PyResult<Bound<'py, PyAny>> {
    let tree = scenario.tree(false)?;
    let r = oracle::brute_force_spe(&tree, &scenario.inner.risk, &scenario.inner.ties).map_err(analysis_err)?;
    let out = PyDict::new(py);
    out.set_item("spe_profiles", serialize(py, &r.spe_profiles)?)?;
    out.set_item("root_values", serialize(py, &r.root_values)?)?;
    out.set_item("profiles_checked", r.profiles_checked)?;
    Ok(out.into_any())
}

/// Compares the solver with the brute-force oracle.
#[pyfunction]
fn cross_check<'py>(py: Python<'py>, scenario: &Scenario) -> PyResult<Bound<'py, PyAny>> {
    let tree = scenario.tree(false)?;
    let c = oracle::cross_check(&tree, &scenario.inner.risk, &scenario.inner.ties).map_err(analysis_err)?;
    let out = PyDict::new(py);
    out.set_item("agrees", c.agrees())?;
    out.set_item("profile_agrees", c.profile_agrees)?;
    out.set_item("values_agree", c.values_agree)?;
    out.set_item("max_value_gap", c.max_value_gap)?;
    out.set_item("profiles_checked", c.profiles_checked)?;
    out.set_item("oracle_profiles", c.oracle_profiles)?;
    Ok(out.into_any())
}

/// Solves at every grid value of one parameter; returns a list of rows.
#[pyfunction]
fn sweep<'py>(py: Python<'py>, scenario: &Scenario, param_name: &str, grid: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
    let table = py
        .detach(|| analysis::sweep(&scenario.setup(), param(param_name)?, &grid).map_err(analysis_err))?;
    serialize(py, &table.rows)
}

/// `steps` evenly spaced points, both ends included.
#[pyfunction]
fn linspace(start: f64, stop: f64, steps: usize) -> Vec<f64> {
    analysis::linspace(start, stop, steps)
}

/// Parameter value at which the equilibrium outcome changes.
#[pyfunction]
#[pyo3(signature = (scenario, param_name, lo, hi, tol = 1e-6))]
fn find_threshold<'py>(
    py: Python<'py>,
    scenario: &Scenario,
    param_name: &str,
    lo: f64,
    hi: f64,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let p = param(param_name)?;
    let r = py.detach(|| analysis::find_threshold(&scenario.setup(), p, lo, hi, tol)).map_err(analysis_err)?;
    serialize(py, &r)
}

/// For each lever, the smallest change that makes Alice leak.
#[pyfunction]
#[pyo3(signature = (scenario, tol = 1e-6))]
fn lever_report<'py>(py: Python<'py>, scenario: &Scenario, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let r = py.detach(|| analysis::lever_report(&scenario.setup(), tol)).map_err(analysis_err)?;
    serialize(py, &r.rows)
}

/// Monte Carlo playouts of the equilibrium profile.
#[pyfunction]
fn simulate<'py>(py: Python<'py>, scenario: &Scenario, n: u64, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let tree = scenario.tree(false)?;
    let report = py.detach(|| {
        let r = ::wbgame::solve(&tree, &scenario.inner.risk, &scenario.inner.ties).map_err(analysis_err)?;
        analysis::simulate(&tree, &r.profile, n, seed).map_err(analysis_err)
    })?;
    serialize(py, &report)
}

/// Graphviz DOT text of the game tree.
#[pyfunction]
#[pyo3(signature = (scenario, pruned = false, with_solution = false))]
fn export_dot(scenario: &Scenario, pruned: bool, with_solution: bool) -> PyResult<String> {
    let tree = scenario.tree(pruned)?;
    let solution = match with_solution {
        true => Some(::wbgame::solve(&tree, &scenario.inner.risk, &scenario.inner.ties).map_err(analysis_err)?),
        false => None,
    };
    Ok(render::export_dot(&tree, solution.as_ref()))
}

/// `key: value` metadata describing a scenario and the library version.
#[pyfunction]
fn metadata(scenario: &Scenario) -> Vec<(String, String)> {
    Meta::for_scenario(&scenario.inner).0
}

#[pymodule]
fn wbgame(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("ScenarioError", m.py().get_type::<ScenarioError>())?;
    m.add("AnalysisError", m.py().get_type::<AnalysisError>())?;
    m.add_class::<Scenario>()?;
    m.add_class::<SolveResult>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(count, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_spe, m)?)?;
    m.add_function(wrap_pyfunction!(cross_check, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(linspace, m)?)?;
    m.add_function(wrap_pyfunction!(find_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(lever_report, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(export_dot, m)?)?;
    m.add_function(wrap_pyfunction!(metadata, m)?)?;
    Ok(())
}
