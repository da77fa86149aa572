//! Analytic probability rules for pre- and/or post-selected systems.
//!
//! Four conditional rules over the outcomes of a hypothetical intermediate
//! projective measurement M = {P_k}:
//!
//! - [`born_predictive`]: conditioned on the earlier outcome only,
//!   p_k = ⟨a|P_k|a⟩.
//! - [`born_retrodictive`]: conditioned on the later outcome only,
//!   p_k = ⟨b|P_k|b⟩.
//! - [`abl`]: conditioned on both, the time-symmetric
//!   Aharonov–Bergmann–Lebowitz rule p_k = |⟨b|P_k|a⟩|² / Σ_j |⟨b|P_j|a⟩|².
//!   For rank-1 projectors P_k = |q_k⟩⟨q_k| this reduces to the familiar
//!   nondegenerate form |⟨a|q_k⟩⟨q_k|b⟩|² / Σ_j |⟨a|q_j⟩⟨q_j|b⟩|².
//! - [`kastner_rule`]: a rival rule reconstructed from its verbal definition
//!   (numerator assumes the intermediate measurement made, denominator
//!   assumes it not made): w_k = |⟨b|P_k|a⟩|² / |⟨b|a⟩|². Its denominator
//!   |Σ_j ⟨b|P_j|a⟩|² retains interference cross-terms, so the weights need
//!   not sum to 1; outputs are returned unnormalized with the flag set by
//!   inspection.
//!
//! [`mixture_at_t`] gives the ignorance-type density matrix at the
//! intermediate time in the world where M is performed but its outcome is
//! ignored.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{apply_projector, inner, normalize, CMatrix, Ket, ProjectiveMeasurement, TwoState};
use crate::tolerance;

// ---------------------------------------------------------------------------
// Output types
// ---------------------------------------------------------------------------

/// Labeled probabilities summing to 1, in measurement label order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Distribution {
    entries: Vec<(String, f64)>,
}

impl Distribution {
    pub fn new(entries: Vec<(String, f64)>) -> Result<Self> {
        let mut sum = 0.0;
        for (label, p) in &entries {
            if !p.is_finite() || *p < -tolerance::aggregate() || *p > 1.0 + tolerance::aggregate() {
                return Err(Error::Validation {
                    invariant: format!("probability '{label}' in [0,1]"),
                    deviation: *p,
                });
            }
            sum += p;
        }
        if (sum - 1.0).abs() > tolerance::aggregate() {
            return Err(Error::Validation {
                invariant: "probabilities sum to 1".into(),
                deviation: (sum - 1.0).abs(),
            });
        }
        Ok(Distribution { entries })
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(l, _)| l.as_str())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.entries.iter().map(|&(_, p)| p).collect()
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.entries.iter().find(|(l, _)| l == label).map(|&(_, p)| p)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Labeled nonnegative weights that are *not* required to sum to 1.
/// `normalized` records whether they happen to.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutcomeWeights {
    entries: Vec<(String, f64)>,
    normalized: bool,
}

impl OutcomeWeights {
    pub fn new(entries: Vec<(String, f64)>) -> Result<Self> {
        for (label, w) in &entries {
            if !w.is_finite() || *w < 0.0 {
                return Err(Error::Validation {
                    invariant: format!("weight '{label}' nonnegative and finite"),
                    deviation: *w,
                });
            }
        }
        let sum: f64 = entries.iter().map(|&(_, w)| w).sum();
        let normalized = (sum - 1.0).abs() <= tolerance::aggregate();
        Ok(OutcomeWeights { entries, normalized })
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w).sum()
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.entries.iter().find(|(l, _)| l == label).map(|&(_, w)| w)
    }
}

/// Unit-trace Hermitian matrix built as Σ_k P_k ρ P_k, so positivity holds by
/// construction (no eigendecomposition performed).
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    fn new(matrix: CMatrix) -> Result<Self> {
        let herm = matrix.hermiticity_deviation();
        if herm > tolerance::structural() {
            return Err(Error::Validation { invariant: "density matrix hermitian".into(), deviation: herm });
        }
        let tr = matrix.trace();
        let dev = (tr - Complex64::new(1.0, 0.0)).norm();
        if dev > tolerance::structural() {
            return Err(Error::Validation { invariant: "density matrix unit trace".into(), deviation: dev });
        }
        Ok(DensityMatrix { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

// ---------------------------------------------------------------------------
// Rules
// ---------------------------------------------------------------------------

fn check_dims(state_dim: usize, m: &ProjectiveMeasurement) -> Result<()> {
    if state_dim != m.dim() {
        return Err(Error::DimensionMismatch { left: state_dim, right: m.dim() });
    }
    Ok(())
}

/// Outcome probabilities conditioned on the earlier selection only:
/// p_k = ⟨a|P_k|a⟩ (= |⟨q_k|a⟩|² for rank-1 projectors).
pub fn born_predictive(a: &Ket, m: &ProjectiveMeasurement) -> Result<Distribution> {
    check_dims(a.dim(), m)?;
    let entries = m
        .projectors()
        .iter()
        .map(|p| {
            let (_, w) = apply_projector(p, a)?;
            Ok((p.label().to_string(), w))
        })
        .collect::<Result<Vec<_>>>()?;
    Distribution::new(entries)
}

/// Outcome probabilities conditioned on the later selection only:
/// p_k = ⟨b|P_k|b⟩ (= |⟨b|q_k⟩|² for rank-1 projectors).
pub fn born_retrodictive(b: &Ket, m: &ProjectiveMeasurement) -> Result<Distribution> {
    born_predictive(b, m)
}

/// Transition amplitudes ⟨b|P_k|a⟩ for every projector of `m`.
pub(crate) fn transition_amplitudes(ts: &TwoState, m: &ProjectiveMeasurement) -> Result<Vec<Complex64>> {
    check_dims(ts.pre().dim(), m)?;
    m.projectors()
        .iter()
        .map(|p| {
            let (v, _) = apply_projector(p, ts.pre())?;
            Ok(crate::hilbert::inner_raw(ts.post().amplitudes(), &v))
        })
        .collect()
}

/// Time-symmetric conditional probabilities for an intermediate measurement
/// given both selections: p_k = |⟨b|P_k|a⟩|² / Σ_j |⟨b|P_j|a⟩|².
///
/// Errors with [`Error::ImpossiblePostselection`] when the denominator falls
/// below the impossibility threshold: the selection pair cannot co-occur
/// around this measurement.
pub fn abl(ts: &TwoState, m: &ProjectiveMeasurement) -> Result<Distribution> {
    let amps = transition_amplitudes(ts, m)?;
    let weights: Vec<f64> = amps.iter().map(|z| z.norm_sqr()).collect();
    let denom: f64 = weights.iter().sum();
    if denom <= tolerance::IMPOSSIBLE_SQ {
        return Err(Error::ImpossiblePostselection);
    }
    let entries = m
        .projectors()
        .iter()
        .zip(&weights)
        .map(|(p, &w)| (p.label().to_string(), w / denom))
        .collect();
    Distribution::new(entries)
}

/// The rival conditional rule: w_k = |⟨b|P_k|a⟩|² / |⟨b|a⟩|².
///
/// Weights are returned unnormalized; the normalized flag is set by
/// inspecting their sum. Errors with [`Error::ZeroOverlap`] when the pre and
/// post states are orthogonal.
pub fn kastner_rule(ts: &TwoState, m: &ProjectiveMeasurement) -> Result<OutcomeWeights> {
    let overlap = inner(ts.post(), ts.pre())?.norm_sqr();
    if overlap <= tolerance::IMPOSSIBLE_SQ {
        return Err(Error::ZeroOverlap);
    }
    let amps = transition_amplitudes(ts, m)?;
    let entries = m
        .projectors()
        .iter()
        .zip(&amps)
        .map(|(p, z)| (p.label().to_string(), z.norm_sqr() / overlap))
        .collect();
    OutcomeWeights::new(entries)
}

/// Density matrix at the intermediate time in the world where `m` is
/// performed but its outcome ignored: ρ = Σ_k P_k |a⟩⟨a| P_k.
pub fn mixture_at_t(a: &Ket, m: &ProjectiveMeasurement) -> Result<DensityMatrix> {
    check_dims(a.dim(), m)?;
    let pure = CMatrix::outer(a.amplitudes(), a.amplitudes());
    let mut rho = CMatrix::zeros(a.dim());
    for p in m.projectors() {
        let term = p.matrix().mul(&pure)?.mul(p.matrix())?;
        rho = rho.add(&term)?;
    }
    DensityMatrix::new(rho)
}

/// Postselection probability of the two-state around measurement `m`:
/// Σ_k ⟨a|P_k|a⟩·|⟨b|P_k a / ‖P_k a‖⟩|², which equals the abl denominator
/// Σ_k |⟨b|P_k|a⟩|². This is the expected kept fraction of the Monte Carlo
/// oracle.
pub fn postselection_probability(ts: &TwoState, m: &ProjectiveMeasurement) -> Result<f64> {
    let amps = transition_amplitudes(ts, m)?;
    Ok(amps.iter().map(|z| z.norm_sqr()).sum())
}

/// Collapse `a` through projector index `k` of `m`; `None` when the branch
/// has (near-)zero weight.
pub fn collapse_branch(a: &Ket, m: &ProjectiveMeasurement, k: usize) -> Result<Option<Ket>> {
    let (v, w) = apply_projector(&m.projectors()[k], a)?;
    if w <= tolerance::IMPOSSIBLE_SQ {
        return Ok(None);
    }
    Ok(Some(normalize(&v)?))
}
