//! Exact `q`-series machinery for Hauptmoduls of Fricke groups, plus-space
//! forms of half-integral weight, traces of singular moduli and the Borcherds
//! product identities that tie them together.

pub mod borcherds;
pub mod classical;
pub mod cm;
pub mod error;
pub mod fixtures;
pub mod hauptmodul;
pub mod plus_space;
pub mod quad_forms;
pub mod series;
pub mod tolerances;
pub mod verify;

pub use error::{Error, Result};
pub use hauptmodul::Level;
pub use series::QSeries;
