//! Python bindings. Universes, alphabets, rules and ring elements are plain
//! dicts with the same shape as the job-file tables; verdicts come back as
//! dicts in the certificate format.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyAny;
use serde::de::DeserializeOwned;
use serde::Serialize;

use gca_core::alphabets::Alphabet;
use gca_core::ca::{CellularAutomaton, Pattern};
use gca_core::cli::{self, CertificateRecord, Command, Flags, Job};
use gca_core::deciders::{self, default_max_n, Limits};
use gca_core::group_ring::{self, GroupRingMatrix};
use gca_core::groups::{FiniteSubset, GroupElement, GroupUniverse};
use gca_core::records::{AlphabetSpec, PatternRecord, RingRecord, RuleRecord, UniverseSpec};
use gca_core::{GcaError, Verdict};

pyo3::create_exception!(gca, GcaException, PyValueError);

fn err(e: GcaError) -> PyErr {
    GcaException::new_err(format!("{}: {e}", e.kind()))
}

fn from_py<T: DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let json = obj.py().import("json")?;
    let text: String = json.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn verdict<'py>(py: Python<'py>, v: gca_core::Result<Verdict>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &v.map_err(err)?)
}

fn limits(cap: Option<u128>) -> Limits {
    Limits { cap: cap.unwrap_or(Limits::default().cap), ..Limits::default() }
}

/// A group indexing the cells.
#[pyclass(module = "gca", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Universe {
    inner: GroupUniverse,
}

#[pymethods]
impl Universe {
    /// `spec` is e.g. `{"kind": "cyclic", "n": 6}` or `{"kind": "free-abelian", "rank": 2}`.
    #[new]
    fn new(spec: &Bound<'_, PyAny>) -> PyResult<Self> {
        let spec: UniverseSpec = from_py(spec)?;
        Ok(Universe { inner: spec.build().map_err(err)? })
    }

    fn order(&self) -> Option<usize> {
        self.inner.order()
    }

    fn identity<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.identity())
    }

    fn ball<'py>(&self, py: Python<'py>, radius: usize) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.ball(radius).elements())
    }

    fn mul<'py>(&self, py: Python<'py>, a: &Bound<'py, PyAny>, b: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
        let (a, b): (GroupElement, GroupElement) = (from_py(a)?, from_py(b)?);
        self.inner.validate(&a).map_err(err)?;
        self.inner.validate(&b).map_err(err)?;
        to_py(py, &self.inner.mul(&a, &b))
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &UniverseSpec::from_universe(&self.inner))
    }

    fn __repr__(&self) -> String {
        format!("Universe({})", self.inner.describe())
    }
}

/// A cellular automaton with memory set and local rule.
#[pyclass(module = "gca", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Automaton {
    inner: CellularAutomaton,
}

impl Automaton {
    fn job(&self) -> Job {
        cli::job_for_automaton(&self.inner)
    }
}

#[pymethods]
impl Automaton {
    /// `rule` is `{"memory": [...], "kind": "table" | "hom" | "linear", "data": [...]}`;
    /// the memory may be listed in any order.
    #[new]
    fn new(universe: &Universe, alphabet: &Bound<'_, PyAny>, rule: &Bound<'_, PyAny>) -> PyResult<Self> {
        let alphabet: AlphabetSpec = from_py(alphabet)?;
        let a = alphabet.build().map_err(err)?;
        let rec: RuleRecord = from_py(rule)?;
        let rec = cli::canonical_rule_record(&rec, &a).map_err(err)?;
        let rule = rec.build(&universe.inner, &a).map_err(err)?;
        Ok(Automaton { inner: CellularAutomaton::new(universe.inner.clone(), rule).map_err(err)? })
    }

    #[staticmethod]
    fn shift(universe: &Universe, alphabet: &Bound<'_, PyAny>, by: &Bound<'_, PyAny>) -> PyResult<Self> {
        let alphabet: AlphabetSpec = from_py(alphabet)?;
        let g: GroupElement = from_py(by)?;
        let a: Alphabet = alphabet.build().map_err(err)?;
        Ok(Automaton { inner: CellularAutomaton::shift(&universe.inner, a, g).map_err(err)? })
    }

    #[getter]
    fn universe(&self) -> Universe {
        Universe { inner: self.inner.universe().clone() }
    }

    fn classify(&self) -> PyResult<&'static str> {
        Ok(self.inner.classify().map_err(err)?.name())
    }

    fn memory<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.memory().elements())
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.job())
    }

    /// Image of a full configuration of a finite universe, in element order.
    fn apply(&self, config: Vec<usize>) -> PyResult<Vec<usize>> {
        self.inner.apply_finite(&config).map_err(err)
    }

    /// Image of a finitely supported pattern, given as `{"window": [...], "values": [...]}`.
    fn apply_pattern<'py>(&self, py: Python<'py>, pattern: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
        let rec: PatternRecord = from_py(pattern)?;
        let p: Pattern = rec.build().map_err(err)?;
        let image = self.inner.apply_pattern(&p).map_err(err)?;
        to_py(py, &PatternRecord::from_pattern(&image))
    }

    /// `self ∘ other`.
    fn compose(&self, other: &Automaton) -> PyResult<Automaton> {
        Ok(Automaton { inner: self.inner.compose(&other.inner).map_err(err)? })
    }

    fn equivalent(&self, other: &Automaton) -> PyResult<bool> {
        self.inner.equivalent(&other.inner).map_err(err)
    }

    #[pyo3(signature = (n, cap=None))]
    fn kernel_window<'py>(&self, py: Python<'py>, n: usize, cap: Option<u128>) -> PyResult<Bound<'py, PyAny>> {
        let r = deciders::kernel_window(&self.inner, n, &limits(cap)).map_err(err)?;
        let sample = r.sample.as_ref().map(PatternRecord::from_pattern);
        to_py(py, &serde_json::json!({ "n": r.n, "empty": r.empty, "sample": sample }))
    }

    #[pyo3(signature = (max_n=None, cap=None))]
    fn check_injective<'py>(&self, py: Python<'py>, max_n: Option<usize>, cap: Option<u128>) -> PyResult<Bound<'py, PyAny>> {
        let max_n = max_n.unwrap_or_else(|| default_max_n(self.inner.universe()));
        verdict(py, deciders::check_injective(&self.inner, max_n, &limits(cap)))
    }

    #[pyo3(signature = (period_bound=6, cap=None))]
    fn refute_injective<'py>(&self, py: Python<'py>, period_bound: u64, cap: Option<u128>) -> PyResult<Bound<'py, PyAny>> {
        verdict(py, deciders::refute_injective(&self.inner, period_bound, &limits(cap)))
    }

    #[pyo3(signature = (max_radius=4, cap=None))]
    fn check_surjective<'py>(&self, py: Python<'py>, max_radius: usize, cap: Option<u128>) -> PyResult<Bound<'py, PyAny>> {
        verdict(py, deciders::check_surjective(&self.inner, max_radius, &limits(cap)))
    }

    /// Garden-of-Eden search on `ball(radius)`.
    #[pyo3(signature = (radius=1, cap=None))]
    fn goe<'py>(&self, py: Python<'py>, radius: usize, cap: Option<u128>) -> PyResult<Bound<'py, PyAny>> {
        let window: FiniteSubset = self.inner.universe().ball(radius);
        verdict(py, deciders::goe_search(&self.inner, &window, &limits(cap)))
    }

    #[pyo3(signature = (max_radius=4, cap=None))]
    fn invert<'py>(&self, py: Python<'py>, max_radius: usize, cap: Option<u128>) -> PyResult<Bound<'py, PyAny>> {
        verdict(py, deciders::synthesize_inverse(&self.inner, max_radius, &limits(cap)))
    }

    #[pyo3(signature = (support_radius=4, max_n=None, cap=None))]
    fn pre_injective<'py>(
        &self,
        py: Python<'py>,
        support_radius: usize,
        max_n: Option<usize>,
        cap: Option<u128>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let max_n = max_n.unwrap_or_else(|| default_max_n(self.inner.universe()));
        verdict(py, deciders::pre_injectivity(&self.inner, support_radius, max_n, &limits(cap)))
    }

    #[pyo3(signature = (search_radius=4, deviation_radius=0, cap=None))]
    fn post_surjective<'py>(
        &self,
        py: Python<'py>,
        search_radius: usize,
        deviation_radius: usize,
        cap: Option<u128>,
    ) -> PyResult<Bound<'py, PyAny>> {
        verdict(py, deciders::post_surjectivity(&self.inner, deviation_radius, search_radius, &limits(cap)))
    }

    #[pyo3(signature = (cap=None))]
    fn exact_1d<'py>(&self, py: Python<'py>, cap: Option<u128>) -> PyResult<Bound<'py, PyAny>> {
        verdict(py, deciders::exact_1d_verdict(&self.inner, &limits(cap)))
    }

    /// Requires `self ∘ tau = Id`; reports whether `tau ∘ self = Id`.
    fn direct_finiteness<'py>(&self, py: Python<'py>, tau: &Automaton) -> PyResult<Bound<'py, PyAny>> {
        verdict(py, deciders::direct_finiteness_check(&self.inner, &tau.inner))
    }

    fn __repr__(&self) -> String {
        format!("Automaton({}, memory {:?})", self.inner.universe().describe(), self.inner.memory().elements())
    }
}

/// An `n × n` matrix over `F_p[G]`.
#[pyclass(module = "gca", frozen, skip_from_py_object)]
#[derive(Clone)]
struct RingMatrix {
    inner: GroupRingMatrix,
}

#[pymethods]
impl RingMatrix {
    /// `ring` is `{"p": 2, "n": 1, "support": [{"element": 0, "entries": [1]}, ...]}`.
    #[new]
    fn new(universe: &Universe, ring: &Bound<'_, PyAny>) -> PyResult<Self> {
        let rec: RingRecord = from_py(ring)?;
        Ok(RingMatrix { inner: GroupRingMatrix::from_record(&universe.inner, &rec).map_err(err)? })
    }

    #[staticmethod]
    fn unit(universe: &Universe, p: u32, n: usize) -> PyResult<Self> {
        Ok(RingMatrix { inner: GroupRingMatrix::unit(&universe.inner, p, n).map_err(err)? })
    }

    #[staticmethod]
    fn from_automaton(ca: &Automaton) -> PyResult<Self> {
        Ok(RingMatrix { inner: GroupRingMatrix::phi_inv(&ca.inner).map_err(err)? })
    }

    fn __add__(&self, other: &RingMatrix) -> PyResult<Self> {
        Ok(RingMatrix { inner: self.inner.add(&other.inner).map_err(err)? })
    }

    fn __sub__(&self, other: &RingMatrix) -> PyResult<Self> {
        Ok(RingMatrix { inner: self.inner.sub(&other.inner).map_err(err)? })
    }

    fn __mul__(&self, other: &RingMatrix) -> PyResult<Self> {
        Ok(RingMatrix { inner: self.inner.mul(&other.inner).map_err(err)? })
    }

    fn __neg__(&self) -> Self {
        RingMatrix { inner: self.inner.neg() }
    }

    fn __eq__(&self, other: &RingMatrix) -> bool {
        self.inner == other.inner
    }

    fn is_unit(&self) -> bool {
        self.inner.is_unit()
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    /// The linear automaton of this matrix.
    fn phi(&self) -> PyResult<Automaton> {
        Ok(Automaton { inner: self.inner.phi().map_err(err)? })
    }

    /// Lex-least left inverse supported on `ball(radius)`, if any.
    fn find_left_inverse(&self, radius: usize) -> PyResult<Option<RingMatrix>> {
        Ok(self.inner.find_left_inverse(radius).map_err(err)?.map(|inner| RingMatrix { inner }))
    }

    fn regular_representation(&self) -> PyResult<Vec<Vec<u32>>> {
        let m = self.inner.regular_representation().map_err(err)?;
        Ok((0..m.rows()).map(|r| m.row(r).to_vec()).collect())
    }

    #[pyo3(signature = (max_radius=4))]
    fn left_inverse<'py>(&self, py: Python<'py>, max_radius: usize) -> PyResult<Bound<'py, PyAny>> {
        verdict(py, group_ring::left_inverse_verdict(&self.inner, max_radius))
    }

    #[pyo3(signature = (max_radius=4))]
    fn stable_finite<'py>(&self, py: Python<'py>, max_radius: usize) -> PyResult<Bound<'py, PyAny>> {
        verdict(py, group_ring::stable_finite_verdict(&self.inner, max_radius))
    }

    /// Requires `beta * self = 1`; reports whether `self * beta = 1`.
    fn verify_stable_finiteness<'py>(&self, py: Python<'py>, beta: &RingMatrix) -> PyResult<Bound<'py, PyAny>> {
        verdict(py, group_ring::verify_stable_finiteness_instance(&self.inner, &beta.inner))
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.to_record())
    }

    fn __repr__(&self) -> String {
        format!("RingMatrix({})", serde_json::to_string(&self.inner.to_record()).unwrap_or_default())
    }
}

/// Surjunctivity sweep over all group rules with the given memory.
#[pyfunction]
#[pyo3(signature = (universe, alphabet, memory, budget=1_000_000, cap=None))]
fn sweep<'py>(
    py: Python<'py>,
    universe: &Universe,
    alphabet: &Bound<'py, PyAny>,
    memory: &Bound<'py, PyAny>,
    budget: u128,
    cap: Option<u128>,
) -> PyResult<Bound<'py, PyAny>> {
    let alphabet: AlphabetSpec = from_py(alphabet)?;
    let memory: Vec<GroupElement> = from_py(memory)?;
    for g in &memory {
        universe.inner.validate(g).map_err(err)?;
    }
    let a = alphabet.build().map_err(err)?;
    verdict(py, deciders::sweep_verdict(&universe.inner, &a, &FiniteSubset::new(memory), budget, &limits(cap)))
}

/// Runs a job table the way the `gca` command does and returns the
/// certificate record.
#[pyfunction]
fn run<'py>(py: Python<'py>, command: &str, job: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let command = Command::from_name(command).ok_or_else(|| PyValueError::new_err(format!("unknown command {command}")))?;
    let job: Job = from_py(job)?;
    let record = cli::run_config(command, &cli::JobConfig { job: vec![job] }, &Flags::default()).remove(0);
    to_py(py, &record)
}

/// Replays a certificate record; `True` iff it confirms its status.
#[pyfunction]
#[pyo3(signature = (record, cap=None))]
fn verify(record: &Bound<'_, PyAny>, cap: Option<u128>) -> PyResult<bool> {
    let record: CertificateRecord = from_py(record)?;
    cli::verify_record(&record, &limits(cap)).map_err(err)
}

#[pymodule]
fn gca(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("GcaError", m.py().get_type::<GcaException>())?;
    m.add("__version__", cli::TOOL_VERSION)?;
    m.add_class::<Universe>()?;
    m.add_class::<Automaton>()?;
    m.add_class::<RingMatrix>()?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
