//! Numerical tolerances and precision defaults.

/// Largest rounding residual accepted when turning CM products into integers.
pub const CM_ROUNDING_ACCEPT: f64 = 1e-6;
/// Residual the CM oracle is expected to reach at the default precision.
pub const CM_ROUNDING_TARGET: f64 = 1e-10;
/// Agreement required between numeric and exact traces.
pub const TRACE_TOLERANCE: f64 = 1e-10;
/// Agreement required for a single Hauptmodul value at 128 bits.
pub const CM_VALUE_TOLERANCE: f64 = 1e-20;

pub const CM_MIN_BITS: u32 = 64;
pub const CM_DEFAULT_BITS: u32 = 192;
pub const CM_MAX_BITS: u32 = 1024;

/// Terms used by the product verification when none are requested.
pub const THEOREM_DEFAULT_TERMS: u64 = 30;
