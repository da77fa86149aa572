//! Canned experiments, a randomized scenario generator, and counterfactual
//! reports.
//!
//! A scenario fixes the actual record — pre-selection at `t_a`,
//! post-selection at `t_b` — and a list of candidate intermediate
//! measurements. Each counterfactual in a report conditions on that same
//! record plus exactly one added measurement.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensemble::{
    compare, run_pre_post_selected, ComparisonVerdict, EnsembleConfig, EnsembleMode, EnsembleReport,
};
use crate::error::{Error, Result};
use crate::hilbert::{inner, CMatrix, Ket, ProjectiveMeasurement, TwoState};
use crate::rng::{block_seed, SplitMix64, GENERATOR_ID};
use crate::rules::{
    born_predictive, born_retrodictive, kastner_rule, postselection_probability, Distribution,
    OutcomeWeights,
};
use crate::{rules, tolerance};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

/// A named pre/post-selected experiment with candidate intermediate
/// measurements and the final measurement the oracle postselects on.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub two_state: TwoState,
    pub candidates: Vec<ProjectiveMeasurement>,
    pub final_measurement: ProjectiveMeasurement,
    pub b_label: String,
    pub notes: String,
}

impl Scenario {
    pub fn new(
        name: impl Into<String>,
        two_state: TwoState,
        candidates: Vec<ProjectiveMeasurement>,
        final_measurement: ProjectiveMeasurement,
        b_label: impl Into<String>,
        notes: impl Into<String>,
    ) -> Result<Self> {
        let b_label = b_label.into();
        let dim = two_state.pre().dim();
        for m in &candidates {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: m.dim() });
            }
        }
        if final_measurement.dim() != dim {
            return Err(Error::DimensionMismatch { left: dim, right: final_measurement.dim() });
        }
        let idx = final_measurement
            .index_of(&b_label)
            .ok_or_else(|| Error::UnknownLabel(b_label.clone()))?;
        let proj = &final_measurement.projectors()[idx];
        let b = proj.principal_ket()?;
        // The selected final eigenket must be the post state (up to phase).
        let overlap = inner(&b, two_state.post())?.norm_sqr();
        if (overlap - 1.0).abs() > tolerance::aggregate() {
            return Err(Error::Validation {
                invariant: "final b_label eigenket equals post state".into(),
                deviation: (overlap - 1.0).abs(),
            });
        }
        Ok(Scenario {
            name: name.into(),
            two_state,
            candidates,
            final_measurement,
            b_label,
            notes: notes.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.two_state.pre().dim()
    }

    /// Expected kept fraction of the oracle for one candidate measurement.
    pub fn postselection_probability(&self, m: &ProjectiveMeasurement) -> Result<f64> {
        postselection_probability(&self.two_state, m)
    }
}

/// The three-holes experiment: a particle reaching a plate with three holes,
/// pre-selected in the uniform superposition over the holes and
/// post-selected in (1, 1, −1)/√3. Two coarse two-outcome measurements are
/// each retrospectively certain, while the fine-grained one is uniform.
pub fn three_holes() -> Scenario {
    let pre = Ket::from_reals(&[1.0, 1.0, 1.0]).expect("valid ket");
    let post = Ket::from_reals(&[1.0, 1.0, -1.0]).expect("valid ket");
    let two_state = TwoState::new(pre, post.clone(), 0.0, 1.0).expect("ordered times");

    let m1 = ProjectiveMeasurement::computational_partition(
        "M1",
        3,
        &[("hole1".into(), vec![0]), ("holes_2_3".into(), vec![1, 2])],
    )
    .expect("valid measurement");
    let m2 = ProjectiveMeasurement::computational_partition(
        "M2",
        3,
        &[("hole2".into(), vec![1]), ("holes_1_3".into(), vec![0, 2])],
    )
    .expect("valid measurement");
    let m_full = ProjectiveMeasurement::computational_partition(
        "M_full",
        3,
        &[
            ("hole1".into(), vec![0]),
            ("hole2".into(), vec![1]),
            ("hole3".into(), vec![2]),
        ],
    )
    .expect("valid measurement");

    // Orthonormal completion of the post ket.
    let perp1 = Ket::from_reals(&[1.0, -1.0, 0.0]).expect("valid ket");
    let perp2 = Ket::from_reals(&[1.0, 1.0, 2.0]).expect("valid ket");
    let final_measurement = ProjectiveMeasurement::from_orthonormal_basis(
        "F",
        &[("B".into(), post), ("B_perp_1".into(), perp1), ("B_perp_2".into(), perp2)],
    )
    .expect("valid measurement");

    Scenario::new(
        "three_holes",
        two_state,
        vec![m1, m2, m_full],
        final_measurement,
        "B",
        "particle launched in front of a three-hole plate and detected at B behind it",
    )
    .expect("canned scenario is valid")
}

// ---------------------------------------------------------------------------
// Quantum raffle
// ---------------------------------------------------------------------------

/// Raffle configuration: per-coin three-level systems with basis
/// {ready, heads, tails}. If the raffle is held, each coin's ready state is
/// rotated into α·heads + β·tails before the final coin reading.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RaffleScenario {
    pub n_coins: u64,
    pub alpha: (f64, f64),
    pub beta: (f64, f64),
    pub raffle_held: bool,
}

impl RaffleScenario {
    pub fn new(n_coins: u64, alpha: Complex64, beta: Complex64, raffle_held: bool) -> Result<Self> {
        if n_coins == 0 {
            return Err(Error::InvalidConfig("raffle needs at least one coin".into()));
        }
        let ns = alpha.norm_sqr() + beta.norm_sqr();
        if !ns.is_finite() || (ns.sqrt() - 1.0).abs() > tolerance::STRICT_NORM_WINDOW {
            return Err(Error::InvalidKet(format!(
                "flip amplitudes must satisfy |alpha|^2+|beta|^2=1, got {ns}"
            )));
        }
        let norm = ns.sqrt();
        let alpha = alpha / norm;
        let beta = beta / norm;
        Ok(RaffleScenario {
            n_coins,
            alpha: (alpha.re, alpha.im),
            beta: (beta.re, beta.im),
            raffle_held,
        })
    }

    pub fn alpha_c(&self) -> Complex64 {
        c(self.alpha.0, self.alpha.1)
    }

    pub fn beta_c(&self) -> Complex64 {
        c(self.beta.0, self.beta.1)
    }

    /// The flip rotation, completed to a full unitary on {ready, heads,
    /// tails}: ready → α·heads + β·tails, heads → β̄·heads − ᾱ·tails,
    /// tails → ready.
    pub fn flip_unitary(&self) -> CMatrix {
        let (alpha, beta) = (self.alpha_c(), self.beta_c());
        let zero = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let u = CMatrix::from_rows(vec![
            vec![zero, zero, one],
            vec![alpha, beta.conj(), zero],
            vec![beta, -alpha.conj(), zero],
        ])
        .expect("square");
        let dev = u.adjoint().mul(&u).expect("same dim").sub(&CMatrix::identity(3)).expect("same dim").max_abs();
        assert!(dev < 1e-12, "flip completion must be unitary (deviation {dev})");
        u
    }
}

/// Tally of the final per-coin readings plus the contradiction analysis for
/// the stipulation "no raffle held AND tails on every coin".
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RaffleReport {
    pub n_coins: u64,
    pub raffle_held: bool,
    pub alpha: (f64, f64),
    pub beta: (f64, f64),
    pub heads: u64,
    pub tails: u64,
    pub nulls: u64,
    pub seed: u64,
    pub generator: String,
    pub contradiction: ContradictionCheck,
}

/// With no raffle every coin stays ready, which is orthogonal to both heads
/// and tails, so every reading is null: tails = n_coins has probability 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContradictionCheck {
    pub stipulation: String,
    pub analytic_probability: f64,
    pub contradiction: bool,
}

/// Simulate the raffle: each coin starts in |ready⟩, is flipped iff the
/// raffle is held, and is finally read in the {heads, tails, null=ready}
/// measurement.
pub fn quantum_raffle(cfg: &RaffleScenario, seed: u64) -> RaffleReport {
    let ready: Vec<Complex64> = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
    let state = if cfg.raffle_held { cfg.flip_unitary().apply(&ready) } else { ready };
    // Reading probabilities in basis order (ready=null, heads, tails).
    let probs = [state[0].norm_sqr(), state[1].norm_sqr(), state[2].norm_sqr()];

    let mut rng = SplitMix64::new(seed);
    let (mut heads, mut tails, mut nulls) = (0u64, 0u64, 0u64);
    for _ in 0..cfg.n_coins {
        match crate::rng::sample_index(&probs, rng.next_f64()) {
            1 => heads += 1,
            2 => tails += 1,
            _ => nulls += 1,
        }
    }

    // Probability of "tails on every coin" given the raffle was not held:
    // per-coin |⟨tails|ready⟩|² = 0, so the joint stipulation has measure 0.
    let p_tails_no_raffle: f64 = 0.0;
    let analytic_probability = p_tails_no_raffle.powf(cfg.n_coins as f64);
    RaffleReport {
        n_coins: cfg.n_coins,
        raffle_held: cfg.raffle_held,
        alpha: cfg.alpha,
        beta: cfg.beta,
        heads,
        tails,
        nulls,
        seed,
        generator: GENERATOR_ID.to_string(),
        contradiction: ContradictionCheck {
            stipulation: "raffle not held AND tails count equals n_coins".into(),
            analytic_probability,
            contradiction: analytic_probability == 0.0,
        },
    }
}

/// Pretty-printed JSON form of a raffle report.
pub fn raffle_report_json(report: &RaffleReport) -> Result<String> {
    serde_json::to_string_pretty(report).map_err(|e| Error::Parse(e.to_string()))
}

// ---------------------------------------------------------------------------
// Counterfactual report
// ---------------------------------------------------------------------------

/// The actual record every counterfactual conditions on.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActualRecord {
    pub pre_selection: String,
    pub post_selection: String,
    pub t_a: f64,
    pub t_b: f64,
}

/// Analysis of one candidate measurement: all four analytic rules plus the
/// oracle run and its verdict against the time-symmetric rule.
#[derive(Debug, Clone)]
pub struct CandidateAnalysis {
    pub abl: Distribution,
    /// None when the pre and post states are orthogonal (the rival rule's
    /// denominator vanishes even though the time-symmetric rule is fine).
    pub kastner: Option<OutcomeWeights>,
    pub born_predictive: Distribution,
    pub born_retrodictive: Distribution,
    pub oracle: EnsembleReport,
    pub verdict: ComparisonVerdict,
}

/// Per-candidate outcome: either a full analysis or the impossible-selection
/// marker (recorded inline, not fatal).
#[derive(Debug, Clone)]
pub enum CandidateResult {
    Evaluated(Box<CandidateAnalysis>),
    ImpossiblePostselection,
}

#[derive(Debug, Clone)]
pub struct CandidateOutcome {
    /// Name of the measurement this counterfactual adds to the record.
    pub added_measurements: Vec<String>,
    pub result: CandidateResult,
}

/// Counterfactual report over every candidate measurement of a scenario.
#[derive(Debug, Clone)]
pub struct CounterfactualReport {
    pub scenario: String,
    pub actual_record: ActualRecord,
    pub k_sigma: f64,
    pub trials: u64,
    pub seed: u64,
    pub candidates: Vec<CandidateOutcome>,
}

impl CounterfactualReport {
    pub fn all_impossible(&self) -> bool {
        self.candidates
            .iter()
            .all(|c| matches!(c.result, CandidateResult::ImpossiblePostselection))
    }
}

/// Evaluate every candidate of `s`: the four analytic rules, one oracle run
/// per candidate (sub-seeded from `cfg.seed` by candidate index), and the
/// oracle-vs-analytic verdict at `k_sigma`.
pub fn counterfactual_report(
    s: &Scenario,
    cfg: &EnsembleConfig,
    k_sigma: f64,
) -> Result<CounterfactualReport> {
    if cfg.mode != EnsembleMode::PreAndPostselected {
        return Err(Error::InvalidConfig(
            "counterfactual reports require pre_and_postselected mode".into(),
        ));
    }
    let ts = &s.two_state;
    let mut candidates = Vec::with_capacity(s.candidates.len());
    for (idx, m) in s.candidates.iter().enumerate() {
        let added = vec![m.name().to_string()];
        let abl = match rules::abl(ts, m) {
            Ok(d) => d,
            Err(Error::ImpossiblePostselection) => {
                candidates.push(CandidateOutcome {
                    added_measurements: added,
                    result: CandidateResult::ImpossiblePostselection,
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        let kastner = match kastner_rule(ts, m) {
            Ok(w) => Some(w),
            Err(Error::ZeroOverlap) => None,
            Err(e) => return Err(e),
        };
        let sub_cfg = EnsembleConfig::new(cfg.trials, block_seed(cfg.seed, idx as u64), cfg.mode);
        let oracle =
            run_pre_post_selected(ts.pre(), m, &s.final_measurement, &s.b_label, &sub_cfg)?;
        let verdict = compare(&oracle, &abl, k_sigma)?;
        candidates.push(CandidateOutcome {
            added_measurements: added,
            result: CandidateResult::Evaluated(Box::new(CandidateAnalysis {
                abl,
                kastner,
                born_predictive: born_predictive(ts.pre(), m)?,
                born_retrodictive: born_retrodictive(ts.post(), m)?,
                oracle,
                verdict,
            })),
        });
    }
    Ok(CounterfactualReport {
        scenario: s.name.clone(),
        actual_record: ActualRecord {
            pre_selection: "outcome 'a' (pre-selection ket)".into(),
            post_selection: format!("outcome '{}' (post-selection ket)", s.b_label),
            t_a: ts.t_a(),
            t_b: ts.t_b(),
        },
        k_sigma,
        trials: cfg.trials,
        seed: cfg.seed,
        candidates,
    })
}

// ---------------------------------------------------------------------------
// Random scenario generation
// ---------------------------------------------------------------------------

/// Haar-uniform random ket via normalized complex Gaussian draws.
pub fn haar_ket(dim: usize, rng: &mut SplitMix64) -> Ket {
    loop {
        let amps: Vec<Complex64> = (0..dim)
            .map(|_| {
                let (re, im) = rng.next_gaussian_pair();
                c(re, im)
            })
            .collect();
        if let Ok(k) = Ket::new(amps) {
            return k;
        }
    }
}

/// Random orthonormal basis: Gram–Schmidt on Gaussian vectors, redrawing any
/// vector that loses too much norm to the projection.
pub fn haar_basis(dim: usize, rng: &mut SplitMix64) -> Vec<Ket> {
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while basis.len() < dim {
        let mut v: Vec<Complex64> = haar_ket(dim, rng).amplitudes().to_vec();
        for b in &basis {
            let overlap = crate::hilbert::inner_raw(b, &v);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= overlap * bi;
            }
        }
        let ns: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if ns < 1e-6 {
            continue; // nearly in the span already; redraw
        }
        let norm = ns.sqrt();
        for z in &mut v {
            *z /= norm;
        }
        basis.push(v);
    }
    basis
        .into_iter()
        .map(|v| Ket::new(v).expect("orthonormalized vector"))
        .collect()
}

/// Random measurement: a random orthonormal basis partitioned into 2..=dim
/// labeled groups.
pub fn random_partition_measurement(
    name: impl Into<String>,
    dim: usize,
    rng: &mut SplitMix64,
) -> Result<ProjectiveMeasurement> {
    let basis = haar_basis(dim, rng);
    let n_groups = 2 + rng.next_index(dim - 1);
    let parts = random_partition(dim, n_groups, rng);
    let groups: Vec<(String, Vec<usize>)> = parts
        .into_iter()
        .enumerate()
        .map(|(gi, members)| (format!("g{gi}"), members))
        .collect();
    ProjectiveMeasurement::from_basis_partition(name, &basis, &groups)
}

/// Random partition of `0..dim` into `groups` nonempty groups.
fn random_partition(dim: usize, groups: usize, rng: &mut SplitMix64) -> Vec<Vec<usize>> {
    debug_assert!(2 <= groups && groups <= dim);
    let mut indices: Vec<usize> = (0..dim).collect();
    // Fisher–Yates shuffle.
    for i in (1..dim).rev() {
        let j = rng.next_index(i + 1);
        indices.swap(i, j);
    }
    let mut parts: Vec<Vec<usize>> = vec![Vec::new(); groups];
    for (pos, idx) in indices.into_iter().enumerate() {
        if pos < groups {
            parts[pos].push(idx); // guarantee nonempty
        } else {
            parts[rng.next_index(groups)].push(idx);
        }
    }
    for part in &mut parts {
        part.sort_unstable();
    }
    parts
}

/// Deterministic random scenario: Haar pre/post kets, 1–3 candidate
/// measurements built as random partitions of random orthonormal bases, and
/// a final basis completing the post ket. Regenerates until every candidate
/// leaves a postselection probability of at least 1e-3, so oracle costs stay
/// bounded.
pub fn random_scenario(dim: usize, seed: u64) -> Result<Scenario> {
    if !(2..=6).contains(&dim) {
        return Err(Error::InvalidConfig(format!("dim must be in 2..=6, got {dim}")));
    }
    let mut rng = SplitMix64::new(block_seed(seed, dim as u64));
    for _attempt in 0..10_000 {
        let pre = haar_ket(dim, &mut rng);
        let post = haar_ket(dim, &mut rng);
        let two_state = TwoState::new(pre, post.clone(), 0.0, 1.0)?;

        let n_candidates = 1 + rng.next_index(3);
        let mut candidates = Vec::with_capacity(n_candidates);
        for ci in 0..n_candidates {
            let basis = haar_basis(dim, &mut rng);
            let n_groups = 2 + rng.next_index(dim - 1);
            let parts = random_partition(dim, n_groups, &mut rng);
            let groups: Vec<(String, Vec<usize>)> = parts
                .into_iter()
                .enumerate()
                .map(|(gi, members)| (format!("g{gi}"), members))
                .collect();
            candidates.push(ProjectiveMeasurement::from_basis_partition(
                format!("Q{ci}"),
                &basis,
                &groups,
            )?);
        }

        // Final basis containing the post ket: Gram–Schmidt completion.
        let mut final_vecs: Vec<Vec<Complex64>> = vec![post.amplitudes().to_vec()];
        while final_vecs.len() < dim {
            let mut v: Vec<Complex64> = haar_ket(dim, &mut rng).amplitudes().to_vec();
            for b in &final_vecs {
                let overlap = crate::hilbert::inner_raw(b, &v);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= overlap * bi;
                }
            }
            let ns: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            if ns < 1e-6 {
                continue;
            }
            let norm = ns.sqrt();
            for z in &mut v {
                *z /= norm;
            }
            final_vecs.push(v);
        }
        let labeled: Vec<(String, Ket)> = final_vecs
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                let label = if i == 0 { "B".to_string() } else { format!("B_perp_{i}") };
                (label, Ket::new(v).expect("orthonormalized vector"))
            })
            .collect();
        let final_measurement = ProjectiveMeasurement::from_orthonormal_basis("F", &labeled)?;

        let scenario = Scenario::new(
            format!("random_d{dim}_s{seed}"),
            two_state,
            candidates,
            final_measurement,
            "B",
            "randomized scenario",
        )?;

        let feasible = scenario.candidates.iter().all(|m| {
            scenario.postselection_probability(m).map(|q| q >= 1e-3).unwrap_or(false)
        });
        if feasible {
            return Ok(scenario);
        }
    }
    Err(Error::InvalidConfig(format!(
        "could not generate a feasible random scenario for dim={dim}, seed={seed}"
    )))
}
