//! Monte Carlo oracle: simulate measurement runs one by one, literally
//! discard those failing the selection criteria, and estimate outcome
//! frequencies among the kept runs.
//!
//! This module is the independent check on the analytic rules: kept
//! frequencies of preselected runs tend to the predictive Born
//! probabilities, postselected runs to the retrodictive ones, and pre- and
//! postselected runs to the time-symmetric conditional probabilities.
//!
//! Execution contract: trials are partitioned into fixed blocks of
//! [`crate::rng::BLOCK_SIZE`]; block `i` uses the seed split at index `i` and
//! accumulates integer counts, merged by addition. Output is therefore
//! bit-identical for 1 or N workers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{apply_projector, Ket, ProjectiveMeasurement};
use crate::rng::{block_seed, sample_index, SplitMix64, BLOCK_SIZE, GENERATOR_ID};
use crate::rules::{born_predictive, collapse_branch, Distribution};

/// Analytic probabilities within this distance of 0 or 1 trigger the
/// exact-count comparison rule.
const EXACT_P_EPS: f64 = 1e-12;

/// Which selection criteria the ensemble applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleMode {
    Preselected,
    Postselected,
    PreAndPostselected,
}

impl std::fmt::Display for EnsembleMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EnsembleMode::Preselected => write!(f, "preselected"),
            EnsembleMode::Postselected => write!(f, "postselected"),
            EnsembleMode::PreAndPostselected => write!(f, "pre_and_postselected"),
        }
    }
}

/// Trial count, seed, and mode for one ensemble run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub trials: u64,
    pub seed: u64,
    pub mode: EnsembleMode,
}

impl EnsembleConfig {
    pub fn new(trials: u64, seed: u64, mode: EnsembleMode) -> Self {
        EnsembleConfig { trials, seed, mode }
    }
}

/// Per-outcome tally among kept trials.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutcomeStat {
    pub label: String,
    pub count: u64,
    /// count / trials_kept (0 when nothing was kept).
    pub frequency: f64,
    /// sqrt(f·(1−f)/trials_kept), the empirical binomial standard error.
    pub std_error: f64,
}

/// Result of one ensemble run. `trials_kept == 0` is a report state, not an
/// error: impossible postselections are physically meaningful.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub mode: EnsembleMode,
    pub trials_total: u64,
    pub trials_kept: u64,
    pub outcomes: Vec<OutcomeStat>,
    pub seed: u64,
    /// Algorithm identifier of the random source, for reproducibility.
    pub generator: String,
}

impl EnsembleReport {
    pub fn no_kept_trials(&self) -> bool {
        self.trials_kept == 0
    }

    pub fn frequency(&self, label: &str) -> Option<f64> {
        self.outcomes.iter().find(|o| o.label == label).map(|o| o.frequency)
    }

    pub fn count(&self, label: &str) -> Option<u64> {
        self.outcomes.iter().find(|o| o.label == label).map(|o| o.count)
    }

    fn from_counts(
        mode: EnsembleMode,
        labels: &[String],
        counts: Vec<u64>,
        trials_total: u64,
        trials_kept: u64,
        seed: u64,
    ) -> Self {
        let outcomes = labels
            .iter()
            .zip(counts)
            .map(|(label, count)| {
                let (frequency, std_error) = if trials_kept == 0 {
                    (0.0, 0.0)
                } else {
                    let f = count as f64 / trials_kept as f64;
                    (f, (f * (1.0 - f) / trials_kept as f64).sqrt())
                };
                OutcomeStat { label: clone_label(label), count, frequency, std_error }
            })
            .collect();
        EnsembleReport {
            mode,
            trials_total,
            trials_kept,
            outcomes,
            seed,
            generator: GENERATOR_ID.to_string(),
        }
    }
}

fn clone_label(l: &str) -> String {
    l.to_string()
}

/// Run `trials` independent trials in deterministic blocks. The trial
/// closure returns `Some(outcome index)` for a kept trial, `None` for a
/// discarded one.
fn run_blocks<F>(trials: u64, seed: u64, n_outcomes: usize, trial: F) -> (Vec<u64>, u64)
where
    F: Fn(&mut SplitMix64) -> Option<usize> + Sync,
{
    let n_blocks = trials.div_ceil(BLOCK_SIZE);
    let (counts, kept) = (0..n_blocks)
        .into_par_iter()
        .map(|block| {
            let lo = block * BLOCK_SIZE;
            let hi = (lo + BLOCK_SIZE).min(trials);
            let mut rng = SplitMix64::new(block_seed(seed, block));
            let mut counts = vec![0u64; n_outcomes];
            let mut kept = 0u64;
            for _ in lo..hi {
                if let Some(k) = trial(&mut rng) {
                    counts[k] += 1;
                    kept += 1;
                }
            }
            (counts, kept)
        })
        .reduce(
            || (vec![0u64; n_outcomes], 0u64),
            |(mut ca, ka), (cb, kb)| {
                for (a, b) in ca.iter_mut().zip(cb) {
                    *a += b;
                }
                (ca, ka + kb)
            },
        );
    (counts, kept)
}

fn check_config(cfg: &EnsembleConfig, expected: EnsembleMode) -> Result<()> {
    if cfg.trials == 0 {
        return Err(Error::InvalidConfig("trials must be >= 1".into()));
    }
    if cfg.mode != expected {
        return Err(Error::InvalidConfig(format!(
            "config mode '{}' does not match operation '{expected}'",
            cfg.mode
        )));
    }
    Ok(())
}

/// Locate `b_label` in the final measurement and insist its projector is
/// rank 1, returning (index, eigenket).
fn final_target(f: &ProjectiveMeasurement, b_label: &str) -> Result<(usize, Ket)> {
    let idx = f.index_of(b_label).ok_or_else(|| Error::UnknownLabel(b_label.to_string()))?;
    let p = &f.projectors()[idx];
    let trace = p.rank_estimate();
    if (trace - 1.0).abs() > 1e-6 {
        return Err(Error::RankError { label: b_label.to_string(), trace });
    }
    Ok((idx, p.principal_ket()?))
}

/// Per-outcome probabilities of the final measurement on each collapsed
/// branch of the intermediate one. Branch with zero weight gets an all-zero
/// row (it is never sampled).
fn final_probs_per_branch(
    a: &Ket,
    m: &ProjectiveMeasurement,
    f: &ProjectiveMeasurement,
) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::with_capacity(m.len());
    for k in 0..m.len() {
        match collapse_branch(a, m, k)? {
            Some(collapsed) => {
                let mut row = Vec::with_capacity(f.len());
                for p in f.projectors() {
                    row.push(apply_projector(p, &collapsed)?.1);
                }
                rows.push(row);
            }
            None => rows.push(vec![0.0; f.len()]),
        }
    }
    Ok(rows)
}

/// Preselected ensemble: every trial measures `m` on a fresh copy of `a`;
/// nothing is discarded, so kept frequencies estimate the predictive Born
/// distribution.
pub fn run_preselected(
    a: &Ket,
    m: &ProjectiveMeasurement,
    cfg: &EnsembleConfig,
) -> Result<EnsembleReport> {
    check_config(cfg, EnsembleMode::Preselected)?;
    let born = born_predictive(a, m)?;
    let probs = born.probabilities();
    let (counts, kept) = run_blocks(cfg.trials, cfg.seed, m.len(), |rng| {
        Some(sample_index(&probs, rng.next_f64()))
    });
    Ok(EnsembleReport::from_counts(cfg.mode, &m.labels(), counts, cfg.trials, kept, cfg.seed))
}

/// Pre- and postselected ensemble. Each trial measures `m` on `a`, collapses
/// the state through the sampled projector, measures `f` on the collapsed
/// state, and keeps the trial iff the final outcome is `b_label`. Kept
/// frequencies estimate the time-symmetric conditional distribution for the
/// two-state (a, b), where b is the rank-1 eigenket behind `b_label`.
pub fn run_pre_post_selected(
    a: &Ket,
    m: &ProjectiveMeasurement,
    f: &ProjectiveMeasurement,
    b_label: &str,
    cfg: &EnsembleConfig,
) -> Result<EnsembleReport> {
    check_config(cfg, EnsembleMode::PreAndPostselected)?;
    if m.dim() != f.dim() {
        return Err(Error::DimensionMismatch { left: m.dim(), right: f.dim() });
    }
    let (b_index, _) = final_target(f, b_label)?;
    let born = born_predictive(a, m)?;
    let probs = born.probabilities();
    let final_probs = final_probs_per_branch(a, m, f)?;
    let (counts, kept) = run_blocks(cfg.trials, cfg.seed, m.len(), |rng| {
        let k = sample_index(&probs, rng.next_f64());
        let fin = sample_index(&final_probs[k], rng.next_f64());
        (fin == b_index).then_some(k)
    });
    Ok(EnsembleReport::from_counts(cfg.mode, &m.labels(), counts, cfg.trials, kept, cfg.seed))
}

/// Postselected ensemble. Each trial prepares the maximally mixed state (a
/// uniform draw over the computational reference basis), measures `m`,
/// collapses, measures `f`, and keeps the trial iff the final outcome is
/// `b_label`. For rank-1 `m`, kept frequencies estimate the retrodictive
/// Born distribution of the eigenket behind `b_label`.
pub fn run_postselected(
    m: &ProjectiveMeasurement,
    f: &ProjectiveMeasurement,
    b_label: &str,
    cfg: &EnsembleConfig,
) -> Result<EnsembleReport> {
    check_config(cfg, EnsembleMode::Postselected)?;
    if m.dim() != f.dim() {
        return Err(Error::DimensionMismatch { left: m.dim(), right: f.dim() });
    }
    let (b_index, _) = final_target(f, b_label)?;
    let dim = m.dim();

    // Stage tables per preparation basis state.
    let mut born_rows = Vec::with_capacity(dim);
    let mut final_rows = Vec::with_capacity(dim);
    for i in 0..dim {
        let e = Ket::basis_state(dim, i);
        born_rows.push(born_predictive(&e, m)?.probabilities());
        final_rows.push(final_probs_per_branch(&e, m, f)?);
    }

    let (counts, kept) = run_blocks(cfg.trials, cfg.seed, m.len(), |rng| {
        let i = rng.next_index(dim);
        let k = sample_index(&born_rows[i], rng.next_f64());
        let fin = sample_index(&final_rows[i][k], rng.next_f64());
        (fin == b_index).then_some(k)
    });
    Ok(EnsembleReport::from_counts(cfg.mode, &m.labels(), counts, cfg.trials, kept, cfg.seed))
}

// ---------------------------------------------------------------------------
// Comparison against analytic distributions
// ---------------------------------------------------------------------------

/// One outcome's frequency-vs-analytic comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutcomeComparison {
    pub label: String,
    pub frequency: f64,
    pub analytic: f64,
    pub abs_diff: f64,
    /// k_sigma · sqrt(p(1−p)/kept); 0 under the exact-count rule.
    pub bound: f64,
    /// True when the analytic probability is 0 or 1 and counts must agree
    /// exactly (zero or all).
    pub exact: bool,
    pub pass: bool,
}

/// Verdict of comparing an ensemble report against an analytic distribution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonVerdict {
    pub k_sigma: f64,
    pub no_kept_trials: bool,
    pub outcomes: Vec<OutcomeComparison>,
    pub pass: bool,
}

/// Compare kept-trial frequencies against an analytic distribution at the
/// given sigma level. The null-hypothesis standard error sqrt(p(1−p)/kept)
/// is used for the bound; outcomes with p ∈ {0, 1} degenerate to exact count
/// agreement (zero or all).
pub fn compare(
    report: &EnsembleReport,
    analytic: &Distribution,
    k_sigma: f64,
) -> Result<ComparisonVerdict> {
    if report.outcomes.len() != analytic.len() {
        return Err(Error::LabelMismatch(format!(
            "{} report outcomes vs {} analytic entries",
            report.outcomes.len(),
            analytic.len()
        )));
    }
    for (stat, (label, _)) in report.outcomes.iter().zip(analytic.entries()) {
        if &stat.label != label {
            return Err(Error::LabelMismatch(format!("'{}' vs '{label}'", stat.label)));
        }
    }

    if report.no_kept_trials() {
        return Ok(ComparisonVerdict {
            k_sigma,
            no_kept_trials: true,
            outcomes: Vec::new(),
            pass: false,
        });
    }

    let kept = report.trials_kept as f64;
    let outcomes: Vec<OutcomeComparison> = report
        .outcomes
        .iter()
        .zip(analytic.entries())
        .map(|(stat, &(ref label, p))| {
            let abs_diff = (stat.frequency - p).abs();
            if p <= EXACT_P_EPS {
                let pass = stat.count == 0;
                OutcomeComparison {
                    label: label.clone(),
                    frequency: stat.frequency,
                    analytic: p,
                    abs_diff,
                    bound: 0.0,
                    exact: true,
                    pass,
                }
            } else if p >= 1.0 - EXACT_P_EPS {
                let pass = stat.count == report.trials_kept;
                OutcomeComparison {
                    label: label.clone(),
                    frequency: stat.frequency,
                    analytic: p,
                    abs_diff,
                    bound: 0.0,
                    exact: true,
                    pass,
                }
            } else {
                let bound = k_sigma * (p * (1.0 - p) / kept).sqrt();
                OutcomeComparison {
                    label: label.clone(),
                    frequency: stat.frequency,
                    analytic: p,
                    abs_diff,
                    bound,
                    exact: false,
                    pass: abs_diff <= bound,
                }
            }
        })
        .collect();

    let pass = outcomes.iter().all(|o| o.pass);
    Ok(ComparisonVerdict { k_sigma, no_kept_trials: false, outcomes, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::Ket;

    fn std_measurement(dim: usize) -> ProjectiveMeasurement {
        let groups: Vec<(String, Vec<usize>)> =
            (0..dim).map(|i| (format!("{i}"), vec![i])).collect();
        ProjectiveMeasurement::computational_partition("std", dim, &groups).unwrap()
    }

    fn plus_basis() -> ProjectiveMeasurement {
        let plus = Ket::from_reals(&[1.0, 1.0]).unwrap();
        let minus = Ket::from_reals(&[1.0, -1.0]).unwrap();
        ProjectiveMeasurement::from_orthonormal_basis(
            "pm",
            &[("+".into(), plus), ("-".into(), minus)],
        )
        .unwrap()
    }

    #[test]
    fn preselected_eigenstate_is_deterministic() {
        let cfg = EnsembleConfig::new(10_000, 1, EnsembleMode::Preselected);
        let r = run_preselected(&Ket::basis_state(2, 0), &std_measurement(2), &cfg).unwrap();
        assert_eq!(r.trials_kept, 10_000);
        assert_eq!(r.frequency("0"), Some(1.0));
        assert_eq!(r.count("1"), Some(0));
    }

    #[test]
    fn preselected_single_trial_boundary() {
        let cfg = EnsembleConfig::new(1, 9, EnsembleMode::Preselected);
        let a = Ket::from_reals(&[1.0, 1.0]).unwrap();
        let r = run_preselected(&a, &std_measurement(2), &cfg).unwrap();
        assert_eq!(r.trials_kept, 1);
        let total: u64 = r.outcomes.iter().map(|o| o.count).sum();
        assert_eq!(total, 1);
    }

    #[test]
    fn preselected_plus_state_near_half() {
        let cfg = EnsembleConfig::new(100_000, 7, EnsembleMode::Preselected);
        let a = Ket::from_reals(&[1.0, 1.0]).unwrap();
        let r = run_preselected(&a, &std_measurement(2), &cfg).unwrap();
        let f = r.frequency("0").unwrap();
        let s = (0.25f64 / 100_000.0).sqrt();
        assert!((f - 0.5).abs() < 5.0 * s, "f={f}");
    }

    #[test]
    fn determinism_same_seed_same_report() {
        let cfg = EnsembleConfig::new(20_000, 42, EnsembleMode::Preselected);
        let a = Ket::from_reals(&[0.6, 0.8]).unwrap();
        let r1 = run_preselected(&a, &std_measurement(2), &cfg).unwrap();
        let r2 = run_preselected(&a, &std_measurement(2), &cfg).unwrap();
        assert_eq!(serde_json::to_string(&r1).unwrap(), serde_json::to_string(&r2).unwrap());
    }

    #[test]
    fn determinism_across_worker_counts() {
        let cfg = EnsembleConfig::new(50_000, 13, EnsembleMode::PreAndPostselected);
        let a = Ket::from_reals(&[1.0, 1.0]).unwrap();
        let m = std_measurement(2);
        let f = plus_basis();

        let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let r1 = pool1.install(|| run_pre_post_selected(&a, &m, &f, "+", &cfg).unwrap());
        let r4 = pool4.install(|| run_pre_post_selected(&a, &m, &f, "+", &cfg).unwrap());
        assert_eq!(serde_json::to_string(&r1).unwrap(), serde_json::to_string(&r4).unwrap());
    }

    #[test]
    fn pre_post_trivial_all_kept_outcome_zero() {
        let cfg = EnsembleConfig::new(5_000, 5, EnsembleMode::PreAndPostselected);
        let m = std_measurement(2);
        let f = std_measurement(2);
        let r =
            run_pre_post_selected(&Ket::basis_state(2, 0), &m, &f, "0", &cfg).unwrap();
        assert_eq!(r.trials_kept, 5_000);
        assert_eq!(r.frequency("0"), Some(1.0));
    }

    #[test]
    fn pre_post_no_kept_trials_state() {
        // a ⟂ b and the intermediate projectors annihilate every transition.
        let cfg = EnsembleConfig::new(2_000, 3, EnsembleMode::PreAndPostselected);
        let m = std_measurement(2);
        let f = std_measurement(2);
        let r =
            run_pre_post_selected(&Ket::basis_state(2, 0), &m, &f, "1", &cfg).unwrap();
        assert!(r.no_kept_trials());
        assert_eq!(r.trials_total, 2_000);
        let verdict = compare(
            &r,
            &Distribution::new(vec![("0".into(), 1.0), ("1".into(), 0.0)]).unwrap(),
            5.0,
        )
        .unwrap();
        assert!(!verdict.pass);
        assert!(verdict.no_kept_trials);
    }

    #[test]
    fn pre_post_requires_rank_one_target() {
        let cfg = EnsembleConfig::new(100, 3, EnsembleMode::PreAndPostselected);
        let m = std_measurement(3);
        let f = ProjectiveMeasurement::computational_partition(
            "coarse",
            3,
            &[("lo".into(), vec![0, 1]), ("hi".into(), vec![2])],
        )
        .unwrap();
        let a = Ket::from_reals(&[1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            run_pre_post_selected(&a, &m, &f, "lo", &cfg),
            Err(Error::RankError { .. })
        ));
    }

    #[test]
    fn postselected_eigenstate() {
        let cfg = EnsembleConfig::new(100_000, 11, EnsembleMode::Postselected);
        let m = std_measurement(2);
        let f = std_measurement(2);
        let r = run_postselected(&m, &f, "1", &cfg).unwrap();
        // Retrodictively certain: every kept trial shows the same outcome.
        assert_eq!(r.frequency("1"), Some(1.0));
        assert!(r.trials_kept > 0);
    }

    #[test]
    fn postselected_matches_retrodictive_born() {
        let cfg = EnsembleConfig::new(100_000, 17, EnsembleMode::Postselected);
        let m = std_measurement(2);
        let f = plus_basis();
        let r = run_postselected(&m, &f, "+", &cfg).unwrap();
        let f0 = r.frequency("0").unwrap();
        let s = (0.25f64 / r.trials_kept as f64).sqrt();
        assert!((f0 - 0.5).abs() < 5.0 * s, "f0={f0}");
    }

    #[test]
    fn postselected_deterministic() {
        let cfg = EnsembleConfig::new(10_000, 23, EnsembleMode::Postselected);
        let m = std_measurement(2);
        let f = plus_basis();
        let r1 = run_postselected(&m, &f, "+", &cfg).unwrap();
        let r2 = run_postselected(&m, &f, "+", &cfg).unwrap();
        assert_eq!(serde_json::to_string(&r1).unwrap(), serde_json::to_string(&r2).unwrap());
    }

    #[test]
    fn mode_and_trials_validation() {
        let a = Ket::basis_state(2, 0);
        let m = std_measurement(2);
        let bad_mode = EnsembleConfig::new(10, 1, EnsembleMode::Postselected);
        assert!(matches!(run_preselected(&a, &m, &bad_mode), Err(Error::InvalidConfig(_))));
        let zero = EnsembleConfig::new(0, 1, EnsembleMode::Preselected);
        assert!(matches!(run_preselected(&a, &m, &zero), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn unknown_final_label() {
        let cfg = EnsembleConfig::new(10, 1, EnsembleMode::PreAndPostselected);
        let m = std_measurement(2);
        let f = std_measurement(2);
        let a = Ket::basis_state(2, 0);
        assert!(matches!(
            run_pre_post_selected(&a, &m, &f, "nope", &cfg),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn compare_five_sigma_pass() {
        // (0.501, 0.499) vs (0.5, 0.5) on 1e5 kept at k=5: bound ≈ 0.0079.
        let report = EnsembleReport {
            mode: EnsembleMode::Preselected,
            trials_total: 100_000,
            trials_kept: 100_000,
            outcomes: vec![
                OutcomeStat { label: "0".into(), count: 50_100, frequency: 0.501, std_error: 0.00158 },
                OutcomeStat { label: "1".into(), count: 49_900, frequency: 0.499, std_error: 0.00158 },
            ],
            seed: 0,
            generator: GENERATOR_ID.into(),
        };
        let d = Distribution::new(vec![("0".into(), 0.5), ("1".into(), 0.5)]).unwrap();
        let v = compare(&report, &d, 5.0).unwrap();
        assert!(v.pass);
        assert!((v.outcomes[0].bound - 5.0 * 0.5 / (100_000.0f64).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn compare_exact_rule_for_certain_outcomes() {
        let report = EnsembleReport {
            mode: EnsembleMode::Preselected,
            trials_total: 1000,
            trials_kept: 1000,
            outcomes: vec![
                OutcomeStat { label: "0".into(), count: 1000, frequency: 1.0, std_error: 0.0 },
                OutcomeStat { label: "1".into(), count: 0, frequency: 0.0, std_error: 0.0 },
            ],
            seed: 0,
            generator: GENERATOR_ID.into(),
        };
        let d = Distribution::new(vec![("0".into(), 1.0), ("1".into(), 0.0)]).unwrap();
        let v = compare(&report, &d, 5.0).unwrap();
        assert!(v.pass);
        assert!(v.outcomes.iter().all(|o| o.exact));

        // One stray count breaks the exact rule.
        let report_bad = EnsembleReport {
            outcomes: vec![
                OutcomeStat { label: "0".into(), count: 999, frequency: 0.999, std_error: 0.001 },
                OutcomeStat { label: "1".into(), count: 1, frequency: 0.001, std_error: 0.001 },
            ],
            ..report
        };
        assert!(!compare(&report_bad, &d, 5.0).unwrap().pass);
    }

    #[test]
    fn compare_five_sigma_fail() {
        // 0.1 off at 1e5 kept is far beyond 5σ ≈ 0.0079.
        let report = EnsembleReport {
            mode: EnsembleMode::Preselected,
            trials_total: 100_000,
            trials_kept: 100_000,
            outcomes: vec![
                OutcomeStat { label: "0".into(), count: 60_000, frequency: 0.6, std_error: 0.00155 },
                OutcomeStat { label: "1".into(), count: 40_000, frequency: 0.4, std_error: 0.00155 },
            ],
            seed: 0,
            generator: GENERATOR_ID.into(),
        };
        let d = Distribution::new(vec![("0".into(), 0.5), ("1".into(), 0.5)]).unwrap();
        assert!(!compare(&report, &d, 5.0).unwrap().pass);
    }

    #[test]
    fn compare_label_mismatch() {
        let report = EnsembleReport {
            mode: EnsembleMode::Preselected,
            trials_total: 10,
            trials_kept: 10,
            outcomes: vec![OutcomeStat { label: "x".into(), count: 10, frequency: 1.0, std_error: 0.0 }],
            seed: 0,
            generator: GENERATOR_ID.into(),
        };
        let d = Distribution::new(vec![("y".into(), 1.0)]).unwrap();
        assert!(matches!(compare(&report, &d, 5.0), Err(Error::LabelMismatch(_))));
    }

    #[test]
    fn counts_sum_to_kept() {
        let cfg = EnsembleConfig::new(33_333, 4, EnsembleMode::PreAndPostselected);
        let a = Ket::from_reals(&[1.0, 1.0, 1.0]).unwrap();
        let m = std_measurement(3);
        let b = Ket::from_reals(&[1.0, 1.0, -1.0]).unwrap();
        let perp1 = Ket::from_reals(&[1.0, -1.0, 0.0]).unwrap();
        let perp2 = Ket::from_reals(&[1.0, 1.0, 2.0]).unwrap();
        let f = ProjectiveMeasurement::from_orthonormal_basis(
            "F",
            &[("B".into(), b), ("B1".into(), perp1), ("B2".into(), perp2)],
        )
        .unwrap();
        let r = run_pre_post_selected(&a, &m, &f, "B", &cfg).unwrap();
        let total: u64 = r.outcomes.iter().map(|o| o.count).sum();
        assert_eq!(total, r.trials_kept);
        assert!(r.trials_kept <= r.trials_total);
    }
}
