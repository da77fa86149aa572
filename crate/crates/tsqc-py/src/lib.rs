//! Python bindings: the analytic rules, the Monte Carlo oracle, and the
//! canned scenarios, exposed as the `tsqc` extension module.
//!
//! Complex amplitudes cross the boundary as Python `complex` values;
//! distributions come back as lists of `(label, value)` tuples; full
//! counterfactual reports are returned as JSON strings in the same schema
//! the CLI writes.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use tsqc_core::ensemble::{self, EnsembleConfig, EnsembleMode};
use tsqc_core::hilbert;
use tsqc_core::report::ReportDocument;
use tsqc_core::rules;
use tsqc_core::scenario_file;
use tsqc_core::scenarios;

fn err(e: tsqc_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Normalized state vector.
#[pyclass(from_py_object)]
#[derive(Clone)]
struct Ket {
    inner: hilbert::Ket,
}

#[pymethods]
impl Ket {
    #[new]
    fn new(amplitudes: Vec<Complex64>) -> PyResult<Self> {
        Ok(Ket { inner: hilbert::Ket::new(amplitudes).map_err(err)? })
    }

    /// Computational basis state |index⟩ in the given dimension.
    #[staticmethod]
    fn basis_state(dim: usize, index: usize) -> PyResult<Self> {
        if dim < 2 || index >= dim {
            return Err(PyValueError::new_err(format!(
                "basis_state requires dim >= 2 and index < dim, got ({dim}, {index})"
            )));
        }
        Ok(Ket { inner: hilbert::Ket::basis_state(dim, index) })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.amplitudes().to_vec()
    }

    /// ⟨self|other⟩.
    fn inner(&self, other: &Ket) -> PyResult<Complex64> {
        hilbert::inner(&self.inner, &other.inner).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Ket(dim={}, amplitudes={:?})", self.inner.dim(), self.inner.amplitudes())
    }
}

/// Complete projective measurement with labeled outcomes.
#[pyclass(from_py_object)]
#[derive(Clone)]
struct Measurement {
    inner: hilbert::ProjectiveMeasurement,
}

#[pymethods]
impl Measurement {
    /// Partition of the computational basis of dimension `dim` into labeled
    /// groups of basis indices.
    #[staticmethod]
    fn from_partition(name: &str, dim: usize, groups: Vec<(String, Vec<usize>)>) -> PyResult<Self> {
        Ok(Measurement {
            inner: hilbert::ProjectiveMeasurement::computational_partition(name, dim, &groups)
                .map_err(err)?,
        })
    }

    /// Rank-1 measurement from a labeled orthonormal basis.
    #[staticmethod]
    fn from_basis(name: &str, kets: Vec<(String, Ket)>) -> PyResult<Self> {
        let labeled: Vec<(String, hilbert::Ket)> =
            kets.into_iter().map(|(label, k)| (label, k.inner)).collect();
        Ok(Measurement {
            inner: hilbert::ProjectiveMeasurement::from_orthonormal_basis(name, &labeled)
                .map_err(err)?,
        })
    }

    /// Explicit projector matrices (rows of complex entries).
    #[staticmethod]
    fn from_projectors(name: &str, projectors: Vec<(String, Vec<Vec<Complex64>>)>) -> PyResult<Self> {
        let ps = projectors
            .into_iter()
            .map(|(label, rows)| {
                let m = hilbert::CMatrix::from_rows(rows).map_err(err)?;
                hilbert::Projector::new(label, m).map_err(err)
            })
            .collect::<PyResult<Vec<_>>>()?;
        Ok(Measurement {
            inner: hilbert::ProjectiveMeasurement::new(name, ps).map_err(err)?,
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn labels(&self) -> Vec<String> {
        self.inner.labels()
    }

    fn __repr__(&self) -> String {
        format!("Measurement(name='{}', labels={:?})", self.inner.name(), self.inner.labels())
    }
}

/// Pre-selection ket at `t_a` plus post-selection ket at `t_b`.
#[pyclass(from_py_object)]
#[derive(Clone)]
struct TwoState {
    inner: hilbert::TwoState,
}

#[pymethods]
impl TwoState {
    #[new]
    #[pyo3(signature = (pre, post, t_a=0.0, t_b=1.0))]
    fn new(pre: Ket, post: Ket, t_a: f64, t_b: f64) -> PyResult<Self> {
        Ok(TwoState { inner: hilbert::TwoState::new(pre.inner, post.inner, t_a, t_b).map_err(err)? })
    }

    #[getter]
    fn pre(&self) -> Ket {
        Ket { inner: self.inner.pre().clone() }
    }

    #[getter]
    fn post(&self) -> Ket {
        Ket { inner: self.inner.post().clone() }
    }

    #[getter]
    fn t_a(&self) -> f64 {
        self.inner.t_a()
    }

    #[getter]
    fn t_b(&self) -> f64 {
        self.inner.t_b()
    }

    /// Same interval with pre and post exchanged.
    fn swapped(&self) -> TwoState {
        TwoState { inner: self.inner.swapped() }
    }
}

/// Result of a Monte Carlo ensemble run.
#[pyclass(from_py_object)]
#[derive(Clone)]
struct EnsembleReport {
    inner: ensemble::EnsembleReport,
}

#[pymethods]
impl EnsembleReport {
    #[getter]
    fn mode(&self) -> String {
        self.inner.mode.to_string()
    }

    #[getter]
    fn trials_total(&self) -> u64 {
        self.inner.trials_total
    }

    #[getter]
    fn trials_kept(&self) -> u64 {
        self.inner.trials_kept
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[getter]
    fn generator(&self) -> String {
        self.inner.generator.clone()
    }

    #[getter]
    fn no_kept_trials(&self) -> bool {
        self.inner.no_kept_trials()
    }

    /// List of (label, count, frequency, std_error).
    fn outcomes(&self) -> Vec<(String, u64, f64, f64)> {
        self.inner
            .outcomes
            .iter()
            .map(|o| (o.label.clone(), o.count, o.frequency, o.std_error))
            .collect()
    }

    fn frequency(&self, label: &str) -> Option<f64> {
        self.inner.frequency(label)
    }

    fn __repr__(&self) -> String {
        format!(
            "EnsembleReport(mode='{}', kept={}/{})",
            self.inner.mode, self.inner.trials_kept, self.inner.trials_total
        )
    }
}

/// Frequency-vs-analytic comparison verdict.
#[pyclass(from_py_object)]
#[derive(Clone)]
struct Verdict {
    inner: ensemble::ComparisonVerdict,
}

#[pymethods]
impl Verdict {
    #[getter]
    fn passed(&self) -> bool {
        self.inner.pass
    }

    #[getter]
    fn no_kept_trials(&self) -> bool {
        self.inner.no_kept_trials
    }

    /// List of (label, frequency, analytic, abs_diff, bound, exact, pass).
    fn outcomes(&self) -> Vec<(String, f64, f64, f64, f64, bool, bool)> {
        self.inner
            .outcomes
            .iter()
            .map(|o| (o.label.clone(), o.frequency, o.analytic, o.abs_diff, o.bound, o.exact, o.pass))
            .collect()
    }

    fn __repr__(&self) -> String {
        format!("Verdict(passed={})", self.inner.pass)
    }
}

/// Named experiment: two-state, candidate measurements, final measurement.
#[pyclass(from_py_object)]
#[derive(Clone)]
struct Scenario {
    inner: scenarios::Scenario,
}

#[pymethods]
impl Scenario {
    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn two_state(&self) -> TwoState {
        TwoState { inner: self.inner.two_state.clone() }
    }

    #[getter]
    fn b_label(&self) -> String {
        self.inner.b_label.clone()
    }

    #[getter]
    fn notes(&self) -> String {
        self.inner.notes.clone()
    }

    fn candidates(&self) -> Vec<Measurement> {
        self.inner.candidates.iter().map(|m| Measurement { inner: m.clone() }).collect()
    }

    #[getter]
    fn final_measurement(&self) -> Measurement {
        Measurement { inner: self.inner.final_measurement.clone() }
    }

    fn postselection_probability(&self, m: &Measurement) -> PyResult<f64> {
        self.inner.postselection_probability(&m.inner).map_err(err)
    }

    /// Scenario file JSON (the CLI's input schema).
    fn to_json(&self) -> String {
        scenario_file::ScenarioFile::from_scenario(&self.inner).to_json_pretty()
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario(name='{}', dim={}, candidates={})",
            self.inner.name,
            self.inner.dim(),
            self.inner.candidates.len()
        )
    }
}

/// Predictive Born probabilities: p_k = ⟨a|P_k|a⟩.
#[pyfunction]
fn born_predictive(a: &Ket, m: &Measurement) -> PyResult<Vec<(String, f64)>> {
    Ok(rules::born_predictive(&a.inner, &m.inner).map_err(err)?.entries().to_vec())
}

/// Retrodictive Born probabilities: p_k = ⟨b|P_k|b⟩.
#[pyfunction]
fn born_retrodictive(b: &Ket, m: &Measurement) -> PyResult<Vec<(String, f64)>> {
    Ok(rules::born_retrodictive(&b.inner, &m.inner).map_err(err)?.entries().to_vec())
}

/// Time-symmetric conditional probabilities
/// p_k = |⟨b|P_k|a⟩|² / Σ_j |⟨b|P_j|a⟩|².
#[pyfunction]
fn abl(ts: &TwoState, m: &Measurement) -> PyResult<Vec<(String, f64)>> {
    Ok(rules::abl(&ts.inner, &m.inner).map_err(err)?.entries().to_vec())
}

/// Rival rule w_k = |⟨b|P_k|a⟩|² / |⟨b|a⟩|²; returns (weights, normalized).
#[pyfunction]
fn kastner_rule(ts: &TwoState, m: &Measurement) -> PyResult<(Vec<(String, f64)>, bool)> {
    let w = rules::kastner_rule(&ts.inner, &m.inner).map_err(err)?;
    Ok((w.entries().to_vec(), w.is_normalized()))
}

/// Ignorance mixture at the intermediate time: ρ = Σ_k P_k |a⟩⟨a| P_k,
/// returned as a dense row-major matrix.
#[pyfunction]
fn mixture_at_t(a: &Ket, m: &Measurement) -> PyResult<Vec<Vec<Complex64>>> {
    let rho = rules::mixture_at_t(&a.inner, &m.inner).map_err(err)?;
    Ok(rho.matrix().rows())
}

#[pyfunction]
#[pyo3(signature = (a, m, trials=100_000, seed=42))]
fn run_preselected(a: &Ket, m: &Measurement, trials: u64, seed: u64) -> PyResult<EnsembleReport> {
    let cfg = EnsembleConfig::new(trials, seed, EnsembleMode::Preselected);
    Ok(EnsembleReport { inner: ensemble::run_preselected(&a.inner, &m.inner, &cfg).map_err(err)? })
}

#[pyfunction]
#[pyo3(signature = (a, m, f, b_label, trials=100_000, seed=42))]
fn run_pre_post_selected(
    a: &Ket,
    m: &Measurement,
    f: &Measurement,
    b_label: &str,
    trials: u64,
    seed: u64,
) -> PyResult<EnsembleReport> {
    let cfg = EnsembleConfig::new(trials, seed, EnsembleMode::PreAndPostselected);
    Ok(EnsembleReport {
        inner: ensemble::run_pre_post_selected(&a.inner, &m.inner, &f.inner, b_label, &cfg)
            .map_err(err)?,
    })
}

#[pyfunction]
#[pyo3(signature = (m, f, b_label, trials=100_000, seed=42))]
fn run_postselected(
    m: &Measurement,
    f: &Measurement,
    b_label: &str,
    trials: u64,
    seed: u64,
) -> PyResult<EnsembleReport> {
    let cfg = EnsembleConfig::new(trials, seed, EnsembleMode::Postselected);
    Ok(EnsembleReport {
        inner: ensemble::run_postselected(&m.inner, &f.inner, b_label, &cfg).map_err(err)?,
    })
}

/// Compare kept frequencies against an analytic distribution at `k_sigma`.
#[pyfunction]
#[pyo3(signature = (report, analytic, k_sigma=5.0))]
fn compare(report: &EnsembleReport, analytic: Vec<(String, f64)>, k_sigma: f64) -> PyResult<Verdict> {
    let d = rules::Distribution::new(analytic).map_err(err)?;
    Ok(Verdict { inner: ensemble::compare(&report.inner, &d, k_sigma).map_err(err)? })
}

/// The canned three-holes experiment.
#[pyfunction]
fn three_holes() -> Scenario {
    Scenario { inner: scenarios::three_holes() }
}

/// Deterministic random scenario (dim in 2..=6).
#[pyfunction]
fn random_scenario(dim: usize, seed: u64) -> PyResult<Scenario> {
    Ok(Scenario { inner: scenarios::random_scenario(dim, seed).map_err(err)? })
}

/// Load a scenario from a JSON file in the CLI schema.
#[pyfunction]
fn load_scenario(path: &str) -> PyResult<Scenario> {
    Ok(Scenario { inner: scenario_file::load_scenario(std::path::Path::new(path)).map_err(err)? })
}

/// Full counterfactual report (all rules + oracle + verdicts) as the JSON
/// document the CLI writes with `--json`.
#[pyfunction]
#[pyo3(signature = (scenario, trials=100_000, seed=42, k_sigma=5.0))]
fn counterfactual_report_json(
    scenario: &Scenario,
    trials: u64,
    seed: u64,
    k_sigma: f64,
) -> PyResult<String> {
    let cfg = EnsembleConfig::new(trials, seed, EnsembleMode::PreAndPostselected);
    let report = scenarios::counterfactual_report(&scenario.inner, &cfg, k_sigma).map_err(err)?;
    Ok(ReportDocument::from_report(&report).to_json_pretty())
}

/// Simulate the quantum raffle; returns its report as a JSON string.
#[pyfunction]
#[pyo3(signature = (coins, held, alpha=None, beta=None, seed=42))]
fn quantum_raffle(
    coins: u64,
    held: bool,
    alpha: Option<Complex64>,
    beta: Option<Complex64>,
    seed: u64,
) -> PyResult<String> {
    let default_amp = Complex64::new(0.5f64.sqrt(), 0.0);
    let cfg = scenarios::RaffleScenario::new(
        coins,
        alpha.unwrap_or(default_amp),
        beta.unwrap_or(default_amp),
        held,
    )
    .map_err(err)?;
    let report = scenarios::quantum_raffle(&cfg, seed);
    scenarios::raffle_report_json(&report).map_err(err)
}

/// Identifier of the random-source algorithm recorded in reports.
#[pyfunction]
fn generator_id() -> &'static str {
    tsqc_core::rng::GENERATOR_ID
}

#[pymodule]
fn tsqc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Ket>()?;
    m.add_class::<Measurement>()?;
    m.add_class::<TwoState>()?;
    m.add_class::<EnsembleReport>()?;
    m.add_class::<Verdict>()?;
    m.add_class::<Scenario>()?;
    m.add_function(wrap_pyfunction!(born_predictive, m)?)?;
    m.add_function(wrap_pyfunction!(born_retrodictive, m)?)?;
    m.add_function(wrap_pyfunction!(abl, m)?)?;
    m.add_function(wrap_pyfunction!(kastner_rule, m)?)?;
    m.add_function(wrap_pyfunction!(mixture_at_t, m)?)?;
    m.add_function(wrap_pyfunction!(run_preselected, m)?)?;
    m.add_function(wrap_pyfunction!(run_pre_post_selected, m)?)?;
    m.add_function(wrap_pyfunction!(run_postselected, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(three_holes, m)?)?;
    m.add_function(wrap_pyfunction!(random_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(load_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(counterfactual_report_json, m)?)?;
    m.add_function(wrap_pyfunction!(quantum_raffle, m)?)?;
    m.add_function(wrap_pyfunction!(generator_id, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
