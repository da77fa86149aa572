//! JSON scenario file format.
//!
//! Complex numbers are two-element `[re, im]` arrays throughout. Intermediate
//! measurements are given either as partitions of the labeled computational
//! basis (`"partition"`) or as explicit projector matrices (`"projectors"`);
//! the final measurement is an explicit labeled orthonormal basis plus the
//! postselected label.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{CMatrix, Ket, ProjectiveMeasurement, Projector, TwoState};
use crate::scenarios::Scenario;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub format_version: u32,
    #[serde(default)]
    pub name: Option<String>,
    pub dim: usize,
    pub basis_labels: Vec<String>,
    pub pre: Vec<[f64; 2]>,
    pub post: Vec<[f64; 2]>,
    pub t_a: f64,
    pub t_b: f64,
    pub measurements: Vec<MeasurementSpec>,
    #[serde(rename = "final")]
    pub final_measurement: FinalSpec,
    #[serde(default)]
    pub notes: Option<String>,
}

/// A candidate measurement: either a partition of the computational basis
/// into labeled groups, or explicit projector matrices.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasurementSpec {
    Partition { name: String, partition: Vec<PartitionGroup> },
    Explicit { name: String, projectors: Vec<ProjectorSpec> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionGroup {
    pub label: String,
    /// Basis labels (from `basis_labels`) this outcome lumps together.
    pub members: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProjectorSpec {
    pub label: String,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FinalSpec {
    #[serde(default)]
    pub name: Option<String>,
    pub basis: Vec<FinalBasisKet>,
    pub b_label: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FinalBasisKet {
    pub label: String,
    pub ket: Vec<[f64; 2]>,
}

fn to_amplitudes(pairs: &[[f64; 2]]) -> Vec<Complex64> {
    pairs.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
}

fn from_amplitudes(amps: &[Complex64]) -> Vec<[f64; 2]> {
    amps.iter().map(|z| [z.re, z.im]).collect()
}

impl ScenarioFile {
    /// Parse from a JSON string. Syntax errors carry serde_json's
    /// line/column anchor.
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Validate and compile into a [`Scenario`].
    pub fn to_scenario(&self) -> Result<Scenario> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Validation {
                invariant: format!("format_version == {FORMAT_VERSION}"),
                deviation: self.format_version as f64 - FORMAT_VERSION as f64,
            });
        }
        if self.basis_labels.len() != self.dim {
            return Err(Error::Validation {
                invariant: "basis_labels length equals dim".into(),
                deviation: (self.basis_labels.len() as f64 - self.dim as f64).abs(),
            });
        }
        if self.pre.len() != self.dim || self.post.len() != self.dim {
            return Err(Error::Validation {
                invariant: "pre/post amplitude counts equal dim".into(),
                deviation: (self.pre.len().max(self.post.len()) as f64 - self.dim as f64).abs(),
            });
        }

        let pre = Ket::new(to_amplitudes(&self.pre))?;
        let post = Ket::new(to_amplitudes(&self.post))?;
        let two_state = TwoState::new(pre, post, self.t_a, self.t_b)?;

        let mut candidates = Vec::with_capacity(self.measurements.len());
        for spec in &self.measurements {
            candidates.push(self.compile_measurement(spec)?);
        }

        let labeled: Vec<(String, Ket)> = self
            .final_measurement
            .basis
            .iter()
            .map(|bk| {
                if bk.ket.len() != self.dim {
                    return Err(Error::Validation {
                        invariant: format!("final basis ket '{}' has dim entries", bk.label),
                        deviation: (bk.ket.len() as f64 - self.dim as f64).abs(),
                    });
                }
                Ok((bk.label.clone(), Ket::new(to_amplitudes(&bk.ket))?))
            })
            .collect::<Result<Vec<_>>>()?;
        let final_name = self.final_measurement.name.clone().unwrap_or_else(|| "F".into());
        let final_measurement =
            ProjectiveMeasurement::from_orthonormal_basis(final_name, &labeled)?;

        Scenario::new(
            self.name.clone().unwrap_or_else(|| "scenario".into()),
            two_state,
            candidates,
            final_measurement,
            self.final_measurement.b_label.clone(),
            self.notes.clone().unwrap_or_default(),
        )
    }

    fn compile_measurement(&self, spec: &MeasurementSpec) -> Result<ProjectiveMeasurement> {
        match spec {
            MeasurementSpec::Partition { name, partition } => {
                let groups: Vec<(String, Vec<usize>)> = partition
                    .iter()
                    .map(|g| {
                        let members = g
                            .members
                            .iter()
                            .map(|label| {
                                self.basis_labels.iter().position(|b| b == label).ok_or_else(
                                    || {
                                        Error::Parse(format!(
                                            "measurement '{name}': unknown basis label '{label}'"
                                        ))
                                    },
                                )
                            })
                            .collect::<Result<Vec<usize>>>()?;
                        Ok((g.label.clone(), members))
                    })
                    .collect::<Result<Vec<_>>>()?;
                ProjectiveMeasurement::computational_partition(name.clone(), self.dim, &groups)
            }
            MeasurementSpec::Explicit { name, projectors } => {
                let ps = projectors
                    .iter()
                    .map(|spec| {
                        let rows: Vec<Vec<Complex64>> =
                            spec.matrix.iter().map(|row| to_amplitudes(row)).collect();
                        if rows.len() != self.dim || rows.iter().any(|r| r.len() != self.dim) {
                            return Err(Error::Validation {
                                invariant: format!(
                                    "projector '{}' matrix is {dim}x{dim}",
                                    spec.label,
                                    dim = self.dim
                                ),
                                deviation: rows.len() as f64 - self.dim as f64,
                            });
                        }
                        Projector::new(spec.label.clone(), CMatrix::from_rows(rows)?)
                    })
                    .collect::<Result<Vec<_>>>()?;
                ProjectiveMeasurement::new(name.clone(), ps)
            }
        }
    }

    /// Serialize a scenario back into the file schema. Candidate
    /// measurements are emitted as explicit projector matrices (partitions
    /// are a parse-time convenience, not recoverable in general).
    pub fn from_scenario(s: &Scenario) -> Self {
        let dim = s.dim();
        let measurements = s
            .candidates
            .iter()
            .map(|m| MeasurementSpec::Explicit {
                name: m.name().to_string(),
                projectors: m
                    .projectors()
                    .iter()
                    .map(|p| ProjectorSpec {
                        label: p.label().to_string(),
                        matrix: p.matrix().rows().iter().map(|r| from_amplitudes(r)).collect(),
                    })
                    .collect(),
            })
            .collect();
        let basis = s
            .final_measurement
            .projectors()
            .iter()
            .map(|p| FinalBasisKet {
                label: p.label().to_string(),
                ket: from_amplitudes(
                    p.principal_ket().expect("final basis is rank-1").amplitudes(),
                ),
            })
            .collect();
        ScenarioFile {
            format_version: FORMAT_VERSION,
            name: Some(s.name.clone()),
            dim,
            basis_labels: (0..dim).map(|i| format!("e{i}")).collect(),
            pre: from_amplitudes(s.two_state.pre().amplitudes()),
            post: from_amplitudes(s.two_state.post().amplitudes()),
            t_a: s.two_state.t_a(),
            t_b: s.two_state.t_b(),
            measurements,
            final_measurement: FinalSpec {
                name: Some(s.final_measurement.name().to_string()),
                basis,
                b_label: s.b_label.clone(),
            },
            notes: if s.notes.is_empty() { None } else { Some(s.notes.clone()) },
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serializes")
    }
}

/// Parse a scenario file from disk into a ready [`Scenario`].
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    ScenarioFile::load(path)?.to_scenario()
}
