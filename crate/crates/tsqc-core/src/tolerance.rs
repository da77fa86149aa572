//! Centralized numeric tolerances.
//!
//! Every structural check (hermiticity, idempotence, orthogonality,
//! completeness, normalization of single kets) uses [`structural`]; every
//! aggregate check (probability sums, frequency totals) uses [`aggregate`].
//! Tests and the CLI can tighten or relax both knobs uniformly via the
//! setters; the CLI honors the `TSQC_TOLERANCE_STRUCTURAL` environment
//! variable.

use std::sync::atomic::{AtomicU64, Ordering};

/// Default entrywise tolerance for structural invariants.
pub const DEFAULT_STRUCTURAL: f64 = 1e-10;

/// Default tolerance for aggregate quantities (probability sums).
pub const DEFAULT_AGGREGATE: f64 = 1e-9;

/// Squared-amplitude floor below which a pre/post-selection pair is treated
/// as impossible. Far below any accumulation of structural tolerances.
pub const IMPOSSIBLE_SQ: f64 = 1e-20;

/// Relative window accepted by strict ket constructors: norms outside
/// `[1 - STRICT_NORM_WINDOW, 1 + STRICT_NORM_WINDOW]` are rejected.
pub const STRICT_NORM_WINDOW: f64 = 1e-6;

static STRUCTURAL_BITS: AtomicU64 = AtomicU64::new(DEFAULT_STRUCTURAL.to_bits());
static AGGREGATE_BITS: AtomicU64 = AtomicU64::new(DEFAULT_AGGREGATE.to_bits());

/// Current structural tolerance.
pub fn structural() -> f64 {
    f64::from_bits(STRUCTURAL_BITS.load(Ordering::Relaxed))
}

/// Current aggregate tolerance.
pub fn aggregate() -> f64 {
    f64::from_bits(AGGREGATE_BITS.load(Ordering::Relaxed))
}

/// Override the structural tolerance process-wide.
pub fn set_structural(value: f64) {
    STRUCTURAL_BITS.store(value.to_bits(), Ordering::Relaxed);
}

/// Override the aggregate tolerance process-wide.
pub fn set_aggregate(value: f64) {
    AGGREGATE_BITS.store(value.to_bits(), Ordering::Relaxed);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        assert_eq!(structural(), 1e-10);
        assert_eq!(aggregate(), 1e-9);
    }
}
