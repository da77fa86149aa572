//! Statistical spot checks of the Monte Carlo oracle against the analytic
//! rules. Smaller than the full verification sweep; seeds are fixed.

use tsqc_core::ensemble::{compare, EnsembleConfig, EnsembleMode};
use tsqc_core::rng::block_seed;
use tsqc_core::rules::abl;
use tsqc_core::scenarios::{counterfactual_report, random_scenario, CandidateResult};

#[test]
fn oracle_matches_analytic_rule_on_random_scenarios() {
    for i in 0..10u64 {
        let dim = 2 + (i as usize % 5);
        let seed = block_seed(0xACE, i);
        let s = random_scenario(dim, seed).unwrap();
        let cfg = EnsembleConfig::new(20_000, seed, EnsembleMode::PreAndPostselected);
        let report = counterfactual_report(&s, &cfg, 5.5).unwrap();
        for candidate in &report.candidates {
            match &candidate.result {
                CandidateResult::Evaluated(a) => {
                    assert!(
                        a.verdict.pass,
                        "scenario {i} candidate {:?} drifted from the analytic rule: {:#?}",
                        candidate.added_measurements,
                        a.verdict
                    );
                }
                CandidateResult::ImpossiblePostselection => {
                    panic!("generator promised feasible scenarios")
                }
            }
        }
    }
}

#[test]
fn kept_fraction_matches_postselection_probability() {
    for i in 0..10u64 {
        let dim = 2 + (i as usize % 5);
        let seed = block_seed(0xFACE, i);
        let s = random_scenario(dim, seed).unwrap();
        let trials = 50_000u64;
        let cfg = EnsembleConfig::new(trials, seed, EnsembleMode::PreAndPostselected);
        let report = counterfactual_report(&s, &cfg, 5.0).unwrap();
        for (m, candidate) in s.candidates.iter().zip(&report.candidates) {
            let q = s.postselection_probability(m).unwrap();
            if let CandidateResult::Evaluated(a) = &candidate.result {
                let kept = a.oracle.trials_kept as f64 / a.oracle.trials_total as f64;
                let sigma = (q * (1.0 - q) / trials as f64).sqrt();
                assert!(
                    (kept - q).abs() <= 5.0 * sigma,
                    "kept fraction {kept} vs analytic {q} (sigma {sigma}) in scenario {i}"
                );
            }
        }
    }
}

#[test]
fn kept_frequencies_stay_in_verdict_bounds_detail() {
    // One scenario inspected in detail: frequencies, bounds, and exactness
    // flags are all populated coherently.
    let s = random_scenario(4, 0x1234).unwrap();
    let cfg = EnsembleConfig::new(30_000, 0x1234, EnsembleMode::PreAndPostselected);
    let report = counterfactual_report(&s, &cfg, 5.0).unwrap();
    let CandidateResult::Evaluated(a) = &report.candidates[0].result else {
        panic!("feasible by construction")
    };
    let analytic = abl(&s.two_state, &s.candidates[0]).unwrap();
    let verdict = compare(&a.oracle, &analytic, 5.0).unwrap();
    assert!(verdict.pass);
    for line in &verdict.outcomes {
        if !line.exact {
            assert!(line.bound > 0.0);
            assert!(line.abs_diff <= line.bound);
        }
    }
}
