use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series has no nonzero coefficient below precision {prec}")]
    ZeroSeries { prec: i64 },

    #[error("{0}")]
    Domain(String),

    #[error("unsupported Eisenstein weight {0} (must be even and at least 4)")]
    UnsupportedWeight(i64),

    #[error("eta quotient has leading exponent {numerator}/24, which is not an integer")]
    FractionalExponent { numerator: i64 },

    #[error("{}", unsupported_level_message(*.0))]
    UnsupportedLevel(u32),

    #[error("bad discriminant {0}: need d > 0 with d = 0 or 3 mod 4")]
    BadDiscriminant(i64),

    #[error("no plus-space form of index {index} at level {level}: -{index} is not a square mod {}", 4 * .level)]
    NoSuchIndex { level: u32, index: i64 },

    #[error("linear algebra failure: {0}")]
    LinearAlgebraFailure(String),

    #[error("recursion produced a non-integral value at m = {m}; the input coefficients are inconsistent")]
    NonIntegralResult { m: usize },

    #[error("tau must lie in the upper half plane")]
    LowerHalfPlane,

    #[error("rounding residual {residual:e} exceeds tolerance {tolerance:e}")]
    RoundingTooLarge { residual: f64, tolerance: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

fn unsupported_level_message(level: u32) -> String {
    if level == 4 {
        "level 4 is refused: the 2-replicate of the Gamma0(4)* Hauptmodul is the Gamma0(2) \
         Hauptmodul, which is not invariant under any Fricke group, and the product formula \
         is known to fail numerically at this level"
            .to_string()
    } else {
        format!("unsupported level {level}: expected one of 1, 2, 3, 5, 6")
    }
}
