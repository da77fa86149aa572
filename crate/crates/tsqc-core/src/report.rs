//! Machine-readable report document mirroring [`CounterfactualReport`].
//!
//! The document embeds everything needed to reproduce the run: seed,
//! generator identifier, trial count, sigma level, tolerances, and tool
//! version. Floats are serialized with Rust's shortest-round-trip encoding,
//! so parsing a document back recovers every value bit-exactly.

use serde::{Deserialize, Serialize};

use crate::ensemble::{ComparisonVerdict, EnsembleReport};
use crate::scenarios::{CandidateResult, CounterfactualReport};
use crate::tolerance;

pub const REPORT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LabeledValue {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct KastnerDoc {
    pub weights: Vec<LabeledValue>,
    pub sum: f64,
    pub normalized: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CandidateDoc {
    pub measurement: String,
    pub added_measurements: Vec<String>,
    /// "evaluated" or "impossible_postselection".
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abl: Option<Vec<LabeledValue>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kastner: Option<KastnerDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub born_predictive: Option<Vec<LabeledValue>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub born_retrodictive: Option<Vec<LabeledValue>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<EnsembleReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<ComparisonVerdict>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TolerancesDoc {
    pub structural: f64,
    pub aggregate: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActualRecordDoc {
    pub pre_selection: String,
    pub post_selection: String,
    pub t_a: f64,
    pub t_b: f64,
    /// Every counterfactual conditions on the record above plus exactly this
    /// many added measurements.
    pub added_measurements_per_counterfactual: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportDocument {
    pub format_version: u32,
    pub tool_version: String,
    pub generated_unix_s: u64,
    pub scenario: String,
    pub seed: u64,
    pub trials: u64,
    pub k_sigma: f64,
    pub generator: String,
    pub tolerances: TolerancesDoc,
    pub actual_record: ActualRecordDoc,
    pub candidates: Vec<CandidateDoc>,
}

fn labeled(entries: &[(String, f64)]) -> Vec<LabeledValue> {
    entries
        .iter()
        .map(|(label, value)| LabeledValue { label: label.clone(), value: *value })
        .collect()
}

impl ReportDocument {
    pub fn from_report(report: &CounterfactualReport) -> Self {
        let candidates = report
            .candidates
            .iter()
            .map(|c| {
                let measurement =
                    c.added_measurements.first().cloned().unwrap_or_default();
                match &c.result {
                    CandidateResult::Evaluated(a) => CandidateDoc {
                        measurement,
                        added_measurements: c.added_measurements.clone(),
                        status: "evaluated".into(),
                        abl: Some(labeled(a.abl.entries())),
                        kastner: a.kastner.as_ref().map(|w| KastnerDoc {
                            weights: labeled(w.entries()),
                            sum: w.sum(),
                            normalized: w.is_normalized(),
                        }),
                        born_predictive: Some(labeled(a.born_predictive.entries())),
                        born_retrodictive: Some(labeled(a.born_retrodictive.entries())),
                        oracle: Some(a.oracle.clone()),
                        verdict: Some(a.verdict.clone()),
                    },
                    CandidateResult::ImpossiblePostselection => CandidateDoc {
                        measurement,
                        added_measurements: c.added_measurements.clone(),
                        status: "impossible_postselection".into(),
                        abl: None,
                        kastner: None,
                        born_predictive: None,
                        born_retrodictive: None,
                        oracle: None,
                        verdict: None,
                    },
                }
            })
            .collect();

        ReportDocument {
            format_version: REPORT_FORMAT_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            generated_unix_s: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            scenario: report.scenario.clone(),
            seed: report.seed,
            trials: report.trials,
            k_sigma: report.k_sigma,
            generator: crate::rng::GENERATOR_ID.to_string(),
            tolerances: TolerancesDoc {
                structural: tolerance::structural(),
                aggregate: tolerance::aggregate(),
            },
            actual_record: ActualRecordDoc {
                pre_selection: report.actual_record.pre_selection.clone(),
                post_selection: report.actual_record.post_selection.clone(),
                t_a: report.actual_record.t_a,
                t_b: report.actual_record.t_b,
                added_measurements_per_counterfactual: 1,
            },
            candidates,
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn parse(text: &str) -> crate::Result<Self> {
        serde_json::from_str(text).map_err(|e| crate::Error::Parse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{EnsembleConfig, EnsembleMode};
    use crate::scenarios::{counterfactual_report, three_holes};

    #[test]
    fn document_roundtrips_losslessly() {
        let cfg = EnsembleConfig::new(2_000, 42, EnsembleMode::PreAndPostselected);
        let report = counterfactual_report(&three_holes(), &cfg, 5.0).unwrap();
        let doc = ReportDocument::from_report(&report);
        let text = doc.to_json_pretty();
        let parsed = ReportDocument::parse(&text).unwrap();
        let v1: serde_json::Value = serde_json::from_str(&text).unwrap();
        let v2: serde_json::Value =
            serde_json::from_str(&parsed.to_json_pretty()).unwrap();
        assert_eq!(v1, v2);
    }

    #[test]
    fn impossible_candidates_serialize_without_analysis() {
        use crate::hilbert::{Ket, ProjectiveMeasurement, TwoState};
        use crate::scenarios::Scenario;

        let pre = Ket::basis_state(2, 0);
        let post = Ket::basis_state(2, 1);
        let ts = TwoState::new(pre, post.clone(), 0.0, 1.0).unwrap();
        let m = ProjectiveMeasurement::computational_partition(
            "Z",
            2,
            &[("0".into(), vec![0]), ("1".into(), vec![1])],
        )
        .unwrap();
        let f = ProjectiveMeasurement::from_orthonormal_basis(
            "F",
            &[("B_perp".into(), Ket::basis_state(2, 0)), ("B".into(), post)],
        )
        .unwrap();
        let s = Scenario::new("impossible", ts, vec![m], f, "B", "").unwrap();
        let cfg = EnsembleConfig::new(100, 1, EnsembleMode::PreAndPostselected);
        let report = counterfactual_report(&s, &cfg, 5.0).unwrap();
        let doc = ReportDocument::from_report(&report);
        assert_eq!(doc.candidates[0].status, "impossible_postselection");
        assert!(doc.candidates[0].abl.is_none());

        let text = doc.to_json_pretty();
        let parsed = ReportDocument::parse(&text).unwrap();
        assert_eq!(parsed.candidates[0].status, "impossible_postselection");
        assert!(parsed.candidates[0].oracle.is_none());
    }

    #[test]
    fn document_carries_reproduction_metadata() {
        let cfg = EnsembleConfig::new(500, 9, EnsembleMode::PreAndPostselected);
        let report = counterfactual_report(&three_holes(), &cfg, 5.0).unwrap();
        let doc = ReportDocument::from_report(&report);
        assert_eq!(doc.seed, 9);
        assert_eq!(doc.trials, 500);
        assert_eq!(doc.generator, crate::rng::GENERATOR_ID);
        assert_eq!(doc.tolerances.structural, tolerance::structural());
        assert_eq!(doc.actual_record.added_measurements_per_counterfactual, 1);
        assert!(!doc.tool_version.is_empty());
    }
}
