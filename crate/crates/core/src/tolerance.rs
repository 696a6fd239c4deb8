//! Numerical thresholds used across the crate.
//!
//! Homogeneous coordinates carry an arbitrary scale, so every determinant or
//! denominator test is made after normalizing the vectors involved to unit
//! length.

/// A homogeneous vector with norm at or below this is treated as zero.
pub const NONZERO: f64 = 1e-12;

/// Unit-norm and equality-modulo-sign checks.
pub const UNIT: f64 = 1e-9;

/// Determinants and denominators after column normalization.
pub const DEGENERATE: f64 = 1e-10;

/// Minimum spectral gap of a moment matrix, relative to its trace.
pub const SPECTRAL_GAP: f64 = 1e-8;

/// Minimum eigenvalue of an extrinsic covariance, relative to its largest.
pub const COVARIANCE_RANK: f64 = 1e-12;

/// Moore-Penrose rank cutoff, relative to the largest eigenvalue.
pub const PINV_RANK: f64 = 1e-10;

/// Rotation angles closer than this to 0 (or to pi) are treated as 0 (or pi).
pub const ROTATION_ANGLE: f64 = 1e-7;

/// Jacobi sweeps stop once the off-diagonal Frobenius norm drops below this
/// fraction of the full norm.
pub const JACOBI_OFF_DIAGONAL: f64 = 1e-13;

/// Below this |dot| a representative cannot be sign-aligned to its reference.
pub const ALIGNMENT_FLOOR: f64 = 0.1;

/// Resultant lengths under this trigger a concentration warning.
pub const CONCENTRATION_WARNING: f64 = 0.9;

/// One-line summary echoed in reports.
pub fn summary() -> String {
    format!(
        "nonzero={NONZERO:e} unit={UNIT:e} degenerate={DEGENERATE:e} spectral_gap={SPECTRAL_GAP:e} \
         covariance_rank={COVARIANCE_RANK:e} pinv_rank={PINV_RANK:e} rotation_angle={ROTATION_ANGLE:e}"
    )
}
