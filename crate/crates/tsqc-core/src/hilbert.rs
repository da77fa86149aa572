//! Finite-dimensional complex linear algebra: kets, projectors, projective
//! measurements, and their validation.
//!
//! All types are immutable after construction and safe to share across
//! threads; every operation is a pure function. Dimensions are generic
//! (anything ≥ 2); concrete experiments fix them explicitly.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance;

/// Complex probability amplitude.
pub type Amplitude = Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn all_finite(amps: &[Complex64]) -> bool {
    amps.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn norm_sq(amps: &[Complex64]) -> f64 {
    amps.iter().map(|z| z.norm_sqr()).sum()
}

// ---------------------------------------------------------------------------
// Dense square complex matrix
// ---------------------------------------------------------------------------

/// Dense square complex matrix, row-major. Dimensions here are tiny (2–6),
/// so nothing fancier than the naive algorithms is warranted.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix { dim, data: vec![c(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            m.set(i, i, c(1.0, 0.0));
        }
        m
    }

    /// Build from rows; every row must have length `rows.len()`.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in &rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: row.len() });
            }
            data.extend_from_slice(row);
        }
        if !all_finite(&data) {
            return Err(Error::Validation { invariant: "matrix entries finite".into(), deviation: f64::INFINITY });
        }
        Ok(CMatrix { dim, data })
    }

    /// Outer product |x⟩⟨y|.
    pub fn outer(x: &[Complex64], y: &[Complex64]) -> Self {
        let dim = x.len();
        let mut m = CMatrix::zeros(dim);
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                m.set(i, j, xi * yj.conj());
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn adjoint(&self) -> Self {
        let mut m = CMatrix::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m.set(j, i, self.get(i, j).conj());
            }
        }
        m
    }

    pub fn mul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        let mut m = CMatrix::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut acc = c(0.0, 0.0);
                for k in 0..self.dim {
                    acc += self.get(i, k) * other.get(k, j);
                }
                m.set(i, j, acc);
            }
        }
        Ok(m)
    }

    pub fn add(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(CMatrix { dim: self.dim, data })
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(CMatrix { dim: self.dim, data })
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest entry magnitude; the deviation measure used by validation.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Matrix–vector product.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// max |M - M†|.
    pub fn hermiticity_deviation(&self) -> f64 {
        self.sub(&self.adjoint()).expect("same dim").max_abs()
    }

    /// max |M·M - M|.
    pub fn idempotence_deviation(&self) -> f64 {
        let sq = self.mul(self).expect("same dim");
        sq.sub(self).expect("same dim").max_abs()
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j)).collect())
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Ket
// ---------------------------------------------------------------------------

/// Normalized state vector over an implicit orthonormal basis.
///
/// Constructors normalize automatically and record the norm of the input so
/// callers can inspect how much rescaling occurred; [`Ket::strict`] instead
/// rejects inputs whose norm falls outside a tight window around 1.
#[derive(Debug, Clone)]
pub struct Ket {
    amp: Vec<Complex64>,
    input_norm: f64,
}

impl Ket {
    /// Normalizing constructor. Errors on dim < 2, non-finite entries, or
    /// (near-)zero norm.
    pub fn new(amp: Vec<Complex64>) -> Result<Self> {
        if amp.len() < 2 {
            return Err(Error::InvalidKet(format!("dim must be >= 2, got {}", amp.len())));
        }
        if !all_finite(&amp) {
            return Err(Error::InvalidKet("non-finite amplitude".into()));
        }
        let ns = norm_sq(&amp);
        if ns <= tolerance::IMPOSSIBLE_SQ {
            return Err(Error::ZeroVector);
        }
        let norm = ns.sqrt();
        let amp = amp.into_iter().map(|z| z / norm).collect();
        Ok(Ket { amp, input_norm: norm })
    }

    /// Strict constructor: rejects inputs whose norm deviates from 1 by more
    /// than [`tolerance::STRICT_NORM_WINDOW`], then normalizes the residue.
    pub fn strict(amp: Vec<Complex64>) -> Result<Self> {
        let ns = norm_sq(&amp);
        let norm = ns.sqrt();
        if (norm - 1.0).abs() > tolerance::STRICT_NORM_WINDOW {
            return Err(Error::InvalidKet(format!(
                "strict mode: norm {norm} outside [1-{w}, 1+{w}]",
                w = tolerance::STRICT_NORM_WINDOW
            )));
        }
        Self::new(amp)
    }

    /// Computational basis state |i⟩ in the given dimension.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        assert!(dim >= 2 && index < dim, "basis_state({dim}, {index})");
        let mut amp = vec![c(0.0, 0.0); dim];
        amp[index] = c(1.0, 0.0);
        Ket { amp, input_norm: 1.0 }
    }

    /// Real amplitudes, normalized. Convenience for tests and canned states.
    pub fn from_reals(re: &[f64]) -> Result<Self> {
        Self::new(re.iter().map(|&r| c(r, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.amp.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    /// Norm of the vector the constructor was given, before normalization.
    pub fn input_norm(&self) -> f64 {
        self.input_norm
    }

    /// Number of amplitudes with non-negligible magnitude.
    pub fn support_size(&self) -> usize {
        self.amp.iter().filter(|z| z.norm_sqr() > tolerance::structural()).count()
    }
}

/// Inner product ⟨x|y⟩ = Σ_i conj(x_i)·y_i.
pub fn inner(x: &Ket, y: &Ket) -> Result<Complex64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { left: x.dim(), right: y.dim() });
    }
    Ok(inner_raw(&x.amp, &y.amp))
}

/// Inner product over raw (possibly unnormalized) amplitude slices.
pub(crate) fn inner_raw(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// Apply a projector to a ket: returns the unnormalized image P·x and its
/// squared norm (the outcome weight).
pub fn apply_projector(p: &Projector, x: &Ket) -> Result<(Vec<Complex64>, f64)> {
    if p.dim() != x.dim() {
        return Err(Error::DimensionMismatch { left: p.dim(), right: x.dim() });
    }
    let v = p.matrix.apply(&x.amp);
    let weight = norm_sq(&v);
    Ok((v, weight))
}

/// Normalize an amplitude vector into a [`Ket`]. Errors with
/// [`Error::ZeroVector`] when the squared norm is at or below the impossible
/// threshold, which signals a null collapse branch.
pub fn normalize(vector: &[Complex64]) -> Result<Ket> {
    Ket::new(vector.to_vec())
}

// ---------------------------------------------------------------------------
// Projector
// ---------------------------------------------------------------------------

/// Labeled orthogonal projector: a Hermitian, idempotent matrix.
#[derive(Debug, Clone)]
pub struct Projector {
    label: String,
    matrix: CMatrix,
}

impl Projector {
    /// Validating constructor: hermiticity and idempotence must hold within
    /// the structural tolerance.
    pub fn new(label: impl Into<String>, matrix: CMatrix) -> Result<Self> {
        let p = Self::new_unchecked(label, matrix);
        let herm = p.matrix.hermiticity_deviation();
        if herm > tolerance::structural() {
            return Err(Error::Validation { invariant: format!("projector '{}' hermitian", p.label), deviation: herm });
        }
        let idem = p.matrix.idempotence_deviation();
        if idem > tolerance::structural() {
            return Err(Error::Validation { invariant: format!("projector '{}' idempotent", p.label), deviation: idem });
        }
        Ok(p)
    }

    /// Constructor that skips validation; for building deliberately broken
    /// inputs to feed [`validate_measurement`].
    pub fn new_unchecked(label: impl Into<String>, matrix: CMatrix) -> Self {
        Projector { label: label.into(), matrix }
    }

    /// Rank-1 projector |k⟩⟨k|.
    pub fn from_ket(label: impl Into<String>, k: &Ket) -> Self {
        Projector { label: label.into(), matrix: CMatrix::outer(&k.amp, &k.amp) }
    }

    /// Sum of rank-1 projectors over a group of (assumed orthonormal) kets;
    /// the result is validated.
    pub fn from_kets(label: impl Into<String>, kets: &[Ket]) -> Result<Self> {
        let label = label.into();
        let dim = kets.first().map(|k| k.dim()).ok_or_else(|| {
            Error::Validation { invariant: format!("projector '{label}' nonempty group"), deviation: 1.0 }
        })?;
        let mut m = CMatrix::zeros(dim);
        for k in kets {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: k.dim() });
            }
            m = m.add(&CMatrix::outer(&k.amp, &k.amp))?;
        }
        Projector::new(label, m)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Trace of the projector; equals the rank for an exact projector.
    pub fn rank_estimate(&self) -> f64 {
        self.matrix.trace().re
    }

    /// For a rank-1 projector |b⟩⟨b|, recover |b⟩ (up to global phase).
    pub fn principal_ket(&self) -> Result<Ket> {
        let trace = self.rank_estimate();
        if (trace - 1.0).abs() > 1e-6 {
            return Err(Error::RankError { label: self.label.clone(), trace });
        }
        // Column j of |b⟩⟨b| is b·conj(b_j); pick the best-conditioned one.
        let j = (0..self.dim())
            .max_by(|&a, &b| {
                self.matrix.get(a, a).re.partial_cmp(&self.matrix.get(b, b).re).expect("finite")
            })
            .expect("dim >= 2");
        let column: Vec<Complex64> = (0..self.dim()).map(|i| self.matrix.get(i, j)).collect();
        normalize(&column)
    }
}

// ---------------------------------------------------------------------------
// Measurement validation report
// ---------------------------------------------------------------------------

/// One violated invariant, with the worst entrywise deviation observed.
#[derive(Debug, Clone)]
pub struct Violation {
    pub invariant: String,
    pub detail: String,
    pub deviation: f64,
}

/// Outcome of checking a projector family against the projective-measurement
/// invariants. Empty means valid.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// Worst deviation across all violations (0 when valid).
    pub fn max_deviation(&self) -> f64 {
        self.violations.iter().map(|v| v.deviation).fold(0.0, f64::max)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| format!("{} ({}, deviation {:.3e})", v.invariant, v.detail, v.deviation))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Check every projective-measurement invariant and report all violations:
/// per-projector hermiticity and idempotence, pairwise orthogonality,
/// completeness (Σ P_k = 1), and label uniqueness.
pub fn validate_measurement(m: &ProjectiveMeasurement) -> ValidationReport {
    let tol = tolerance::structural();
    let mut report = ValidationReport::default();
    let dim = m.dim();

    for p in &m.projectors {
        if p.dim() != dim {
            report.violations.push(Violation {
                invariant: "uniform dimension".into(),
                detail: format!("projector '{}' has dim {}", p.label(), p.dim()),
                deviation: (p.dim() as f64 - dim as f64).abs(),
            });
        }
    }
    if report.violations.iter().any(|v| v.invariant == "uniform dimension") {
        return report; // remaining checks are not meaningful across dims
    }

    if m.projectors.len() < 2 {
        report.violations.push(Violation {
            invariant: "at least two outcomes".into(),
            detail: format!("{} projector(s)", m.projectors.len()),
            deviation: (2 - m.projectors.len()) as f64,
        });
    }

    for p in &m.projectors {
        let herm = p.matrix().hermiticity_deviation();
        if herm > tol {
            report.violations.push(Violation {
                invariant: "hermiticity".into(),
                detail: format!("projector '{}'", p.label()),
                deviation: herm,
            });
        }
        let idem = p.matrix().idempotence_deviation();
        if idem > tol {
            report.violations.push(Violation {
                invariant: "idempotence".into(),
                detail: format!("projector '{}'", p.label()),
                deviation: idem,
            });
        }
    }

    for i in 0..m.projectors.len() {
        for j in (i + 1)..m.projectors.len() {
            let prod = m.projectors[i].matrix().mul(m.projectors[j].matrix()).expect("same dim");
            let dev = prod.max_abs();
            if dev > tol {
                report.violations.push(Violation {
                    invariant: "mutual orthogonality".into(),
                    detail: format!("'{}'·'{}'", m.projectors[i].label(), m.projectors[j].label()),
                    deviation: dev,
                });
            }
        }
    }

    let mut sum = CMatrix::zeros(dim);
    for p in &m.projectors {
        sum = sum.add(p.matrix()).expect("same dim");
    }
    let dev = sum.sub(&CMatrix::identity(dim)).expect("same dim").max_abs();
    if dev > tol {
        report.violations.push(Violation {
            invariant: "completeness".into(),
            detail: "sum of projectors vs identity".into(),
            deviation: dev,
        });
    }

    for i in 0..m.projectors.len() {
        for j in (i + 1)..m.projectors.len() {
            if m.projectors[i].label() == m.projectors[j].label() {
                report.violations.push(Violation {
                    invariant: "unique labels".into(),
                    detail: format!("duplicate '{}'", m.projectors[i].label()),
                    deviation: 1.0,
                });
            }
        }
    }

    report
}

// ---------------------------------------------------------------------------
// ProjectiveMeasurement
// ---------------------------------------------------------------------------

/// Complete set of mutually orthogonal projectors with unique labels.
#[derive(Debug, Clone)]
pub struct ProjectiveMeasurement {
    name: String,
    projectors: Vec<Projector>,
}

impl ProjectiveMeasurement {
    /// Validating constructor; rejects anything [`validate_measurement`]
    /// flags.
    pub fn new(name: impl Into<String>, projectors: Vec<Projector>) -> Result<Self> {
        let m = Self::new_unchecked(name, projectors);
        let report = validate_measurement(&m);
        if !report.is_valid() {
            return Err(Error::InvalidMeasurement { name: m.name, report });
        }
        Ok(m)
    }

    /// Constructor that skips validation; for building deliberately broken
    /// inputs to feed [`validate_measurement`].
    pub fn new_unchecked(name: impl Into<String>, projectors: Vec<Projector>) -> Self {
        ProjectiveMeasurement { name: name.into(), projectors }
    }

    /// Build a measurement by partitioning an orthonormal basis into labeled
    /// groups; each group of basis kets is compiled to one projector.
    pub fn from_basis_partition(
        name: impl Into<String>,
        basis: &[Ket],
        groups: &[(String, Vec<usize>)],
    ) -> Result<Self> {
        let name = name.into();
        let mut seen = vec![false; basis.len()];
        let mut projectors = Vec::with_capacity(groups.len());
        for (label, members) in groups {
            let mut kets = Vec::with_capacity(members.len());
            for &idx in members {
                if idx >= basis.len() {
                    return Err(Error::Parse(format!(
                        "measurement '{name}': basis index {idx} out of range (basis size {})",
                        basis.len()
                    )));
                }
                if seen[idx] {
                    return Err(Error::Parse(format!(
                        "measurement '{name}': basis index {idx} appears in two groups"
                    )));
                }
                seen[idx] = true;
                kets.push(basis[idx].clone());
            }
            projectors.push(Projector::from_kets(label.clone(), &kets)?);
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::Parse(format!(
                "measurement '{name}': partition does not cover the whole basis"
            )));
        }
        Self::new(name, projectors)
    }

    /// Partition of the computational basis of the given dimension.
    pub fn computational_partition(
        name: impl Into<String>,
        dim: usize,
        groups: &[(String, Vec<usize>)],
    ) -> Result<Self> {
        let basis: Vec<Ket> = (0..dim).map(|i| Ket::basis_state(dim, i)).collect();
        Self::from_basis_partition(name, &basis, groups)
    }

    /// Rank-1 measurement from a full labeled orthonormal basis.
    pub fn from_orthonormal_basis(
        name: impl Into<String>,
        labeled_kets: &[(String, Ket)],
    ) -> Result<Self> {
        let projectors = labeled_kets
            .iter()
            .map(|(label, k)| Projector::from_ket(label.clone(), k))
            .collect();
        Self::new(name, projectors)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.projectors.first().map(|p| p.dim()).unwrap_or(0)
    }

    pub fn projectors(&self) -> &[Projector] {
        &self.projectors
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.projectors.iter().map(|p| p.label().to_string()).collect()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.projectors.iter().position(|p| p.label() == label)
    }
}

// ---------------------------------------------------------------------------
// TwoState
// ---------------------------------------------------------------------------

/// Pre-selection ket at `t_a` paired with a post-selection ket at `t_b`.
/// Times are opaque reals used only for ordering; no dynamics attaches to
/// them (zero Hamiltonian between the selections).
#[derive(Debug, Clone)]
pub struct TwoState {
    pre: Ket,
    post: Ket,
    t_a: f64,
    t_b: f64,
}

impl TwoState {
    pub fn new(pre: Ket, post: Ket, t_a: f64, t_b: f64) -> Result<Self> {
        if pre.dim() != post.dim() {
            return Err(Error::DimensionMismatch { left: pre.dim(), right: post.dim() });
        }
        // NaN times must be rejected too, hence the negated form.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(t_a < t_b) {
            return Err(Error::InvalidTwoState(format!("t_a={t_a} must precede t_b={t_b}")));
        }
        Ok(TwoState { pre, post, t_a, t_b })
    }

    pub fn pre(&self) -> &Ket {
        &self.pre
    }

    pub fn post(&self) -> &Ket {
        &self.post
    }

    pub fn t_a(&self) -> f64 {
        self.t_a
    }

    pub fn t_b(&self) -> f64 {
        self.t_b
    }

    /// Same time interval with the roles of pre and post exchanged.
    pub fn swapped(&self) -> TwoState {
        TwoState { pre: self.post.clone(), post: self.pre.clone(), t_a: self.t_a, t_b: self.t_b }
    }
}
