//! Python bindings. Coalgebras, presentations and weighted automata move in
//! and out as the same JSON documents the command-line tool reads.

use std::path::Path;

use copath::behaviour::{self, Presentation as CorePresentation};
use copath::cli::files;
use copath::cli::syntax::{parse_formula, parse_functor};
use copath::coequations;
use copath::constraints::builtin;
use copath::linear::{self, parse_rational, LinearWeightedAutomaton};
use copath::modal::{self, Frame, Mode};
use copath::moore::{parse_word, Moore};
use copath::{Budget, Carrier, Error};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(
    pycopath,
    CopathError,
    PyValueError,
    "Invalid input or a failed construction."
);
create_exception!(
    pycopath,
    BudgetError,
    CopathError,
    "An enumeration would exceed the element budget."
);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::BudgetExceeded { .. } => BudgetError::new_err(e.to_string()),
        _ => CopathError::new_err(e.to_string()),
    }
}

fn budget() -> Budget {
    Budget::from_env()
}

#[pyclass(name = "Functor", module = "pycopath", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyFunctor(copath::FunctorExpr);

#[pymethods]
impl PyFunctor {
    #[new]
    fn new(src: &str) -> PyResult<Self> {
        parse_functor(src).map(PyFunctor).map_err(py_err)
    }

    /// `|F X|` for `|X| = n`, or `None` when it does not fit in 128 bits.
    fn cardinality(&self, n: usize) -> Option<u128> {
        self.0.cardinality(n)
    }

    /// Sizes of `F^k 1` for `k = 0..=depth`.
    fn terminal_sequence(&self, depth: usize) -> PyResult<Vec<usize>> {
        let seq = behaviour::terminal_sequence(&self.0, depth, &budget()).map_err(py_err)?;
        Ok((0..=depth).map(|k| seq.level(k).len()).collect())
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Functor({:?})", self.0.to_string())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

#[pyclass(name = "Coalgebra", module = "pycopath", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCoalgebra(copath::Coalgebra);

#[pymethods]
impl PyCoalgebra {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        files::coalgebra_from_json(&files::parse_json(text).map_err(py_err)?)
            .map(PyCoalgebra)
            .map_err(py_err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        files::read_coalgebra(Path::new(path)).map(PyCoalgebra).map_err(py_err)
    }

    fn to_json(&self) -> String {
        files::coalgebra_to_json(&self.0).to_string()
    }

    fn to_dot(&self) -> String {
        copath::cli::to_dot(&self.0)
    }

    #[getter]
    fn functor(&self) -> PyFunctor {
        PyFunctor(self.0.functor().clone())
    }

    #[getter]
    fn states(&self) -> Vec<String> {
        self.0.carrier().names().to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    /// The quotient by behavioural equivalence and its blocks of state names.
    fn minimize(&self) -> PyResult<(PyCoalgebra, Vec<Vec<String>>)> {
        let m = behaviour::minimize(&self.0).map_err(py_err)?;
        let blocks = m
            .partition
            .blocks()
            .iter()
            .map(|b| b.iter().map(|&x| self.0.state_name(x).to_string()).collect())
            .collect();
        Ok((PyCoalgebra(m.quotient), blocks))
    }

    fn is_simple(&self) -> PyResult<bool> {
        behaviour::is_simple(&self.0).map_err(py_err)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("<Coalgebra {} with {} states>", self.0.functor(), self.0.len())
    }
}

#[pyclass(name = "Constraint", module = "pycopath", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyConstraint(copath::Constraint);

#[pymethods]
impl PyConstraint {
    #[staticmethod]
    #[pyo3(signature = (name, params = Vec::new()))]
    fn builtin(name: &str, params: Vec<String>) -> PyResult<Self> {
        builtin(name, &params).map(PyConstraint).map_err(py_err)
    }

    /// `route` is `"direct"` or `"subfunctor"`.
    #[pyo3(signature = (c, route = "direct"))]
    fn satisfies(&self, c: &PyCoalgebra, route: &str) -> PyResult<bool> {
        let b = budget();
        match route {
            "direct" => self.0.satisfies(&c.0, &b).map(|v| v.holds()),
            "subfunctor" => self.0.satisfies_via_subfunctor(&c.0, &b),
            other => return Err(CopathError::new_err(format!("unknown route {other:?}"))),
        }
        .map_err(py_err)
    }

    /// A state where the constraint fails, if any.
    fn witness(&self, c: &PyCoalgebra) -> PyResult<Option<String>> {
        let v = self.0.satisfies(&c.0, &budget()).map_err(py_err)?;
        Ok(v.witness().map(|w| c.0.state_name(w.state()).to_string()))
    }
}

#[pyclass(name = "ConstraintSystem", module = "pycopath", frozen)]
struct PyConstraintSystem(copath::ConstraintSystem);

#[pymethods]
impl PyConstraintSystem {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        files::constraints_from_json(&files::parse_json(text).map_err(py_err)?)
            .map(PyConstraintSystem)
            .map_err(py_err)
    }

    fn to_json(&self) -> String {
        files::constraints_to_json(&self.0).to_string()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    /// `None` when every constraint holds, else the failing constraint's
    /// index and a witness state.
    fn check(&self, c: &PyCoalgebra) -> PyResult<Option<(usize, String)>> {
        let found = self.0.check(&c.0, &budget()).map_err(py_err)?;
        Ok(found.map(|(i, w)| (i, c.0.state_name(w.state()).to_string())))
    }
}

#[pyclass(name = "Presentation", module = "pycopath", frozen)]
struct PyPresentation(CorePresentation);

#[pymethods]
impl PyPresentation {
    #[new]
    #[pyo3(signature = (alphabet, relations, bound = 8))]
    fn new(alphabet: Vec<String>, relations: Vec<(String, String)>, bound: usize) -> PyResult<Self> {
        let alphabet = Carrier::new(alphabet).map_err(py_err)?;
        let rels: Vec<(&str, &str)> = relations.iter().map(|(w, u)| (w.as_str(), u.as_str())).collect();
        CorePresentation::parse(alphabet, &rels, bound)
            .map(PyPresentation)
            .map_err(py_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        files::presentation_from_json(&files::parse_json(text).map_err(py_err)?)
            .map(PyPresentation)
            .map_err(py_err)
    }

    fn to_json(&self) -> String {
        files::presentation_to_json(&self.0).to_string()
    }

    /// Representative words of the monoid elements, shortest first.
    fn elements(&self) -> PyResult<Vec<String>> {
        let m = behaviour::monoid_from_presentation(&self.0).map_err(py_err)?;
        Ok((0..m.len()).map(|x| m.name(x)).collect())
    }

    /// The Moore automaton `B^M` over `outputs`.
    #[pyo3(signature = (outputs = vec!["0".to_string(), "1".to_string()]))]
    fn final_automaton(&self, outputs: Vec<String>) -> PyResult<PyCoalgebra> {
        let m = behaviour::monoid_from_presentation(&self.0).map_err(py_err)?;
        let outputs = Carrier::new(outputs).map_err(py_err)?;
        behaviour::relative_final_moore(&outputs, &m, &budget())
            .map(PyCoalgebra)
            .map_err(py_err)
    }

    /// Whether the two-colour coequation of these relations, cut at
    /// `depth`, holds in the Moore automaton `c`.
    fn coequation_holds(&self, c: &PyCoalgebra, depth: usize) -> PyResult<bool> {
        let m = Moore::view(&c.0).map_err(py_err)?;
        let rels = self
            .0
            .relations
            .iter()
            .map(|(w, u)| {
                let render = |w: &[usize]| copath::moore::render_word(&self.0.alphabet, w);
                Ok((
                    parse_word(&m.alphabet, &render(w))?,
                    parse_word(&m.alphabet, &render(u))?,
                ))
            })
            .collect::<copath::Result<Vec<_>>>()
            .map_err(py_err)?;
        coequations::satisfies_coequation(&c.0, &rels, depth, &budget()).map_err(py_err)
    }
}

#[pyclass(name = "WeightedAutomaton", module = "pycopath", frozen)]
struct PyWeighted(LinearWeightedAutomaton);

#[pymethods]
impl PyWeighted {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        files::weighted_from_json(&files::parse_json(text).map_err(py_err)?)
            .map(PyWeighted)
            .map_err(py_err)
    }

    /// The polynomial model of `u_t = c (u_xx + u_yy)` up to degree `d`;
    /// `c` is a rational such as `"1/2"`.
    #[staticmethod]
    fn heat(d: usize, c: &str) -> PyResult<Self> {
        let c = parse_rational(c).map_err(py_err)?;
        Ok(PyWeighted(linear::heat_model(d, &c)))
    }

    fn to_json(&self) -> String {
        files::weighted_to_json(&self.0).to_string()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn check_word_equation(&self, w: &str, u: &str) -> PyResult<bool> {
        self.0.check_word_equation_str(w, u).map_err(py_err)
    }

    fn check_heat(&self, c: &str) -> PyResult<bool> {
        let c = parse_rational(c).map_err(py_err)?;
        self.0.check_heat(&c).map_err(py_err)
    }
}

/// Whether `phi <-> psi` (or `phi -> psi` with `mode="implies"`) is valid
/// on the frame underlying a `Pow` coalgebra.
#[pyfunction]
#[pyo3(signature = (c, phi, psi, mode = "iff"))]
fn frame_valid(c: &PyCoalgebra, phi: &str, psi: &str, mode: &str) -> PyResult<bool> {
    let mode = match mode {
        "iff" => Mode::Iff,
        "implies" => Mode::Implies,
        other => return Err(CopathError::new_err(format!("unknown mode {other:?}"))),
    };
    let phi = parse_formula(phi).map_err(py_err)?;
    let psi = parse_formula(psi).map_err(py_err)?;
    let frame = Frame::from_coalgebra(&c.0).map_err(py_err)?;
    modal::frame_valid(&frame, &phi, &psi, mode, &budget()).map_err(py_err)
}

#[pymodule]
fn pycopath(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFunctor>()?;
    m.add_class::<PyCoalgebra>()?;
    m.add_class::<PyConstraint>()?;
    m.add_class::<PyConstraintSystem>()?;
    m.add_class::<PyPresentation>()?;
    m.add_class::<PyWeighted>()?;
    m.add_function(wrap_pyfunction!(frame_valid, m)?)?;
    m.add("CopathError", m.py().get_type::<CopathError>())?;
    m.add("BudgetError", m.py().get_type::<BudgetError>())?;
    m.add("BUILTINS", copath::constraints::BUILTIN_NAMES.to_vec())?;
    Ok(())
}
