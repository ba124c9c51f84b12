//! Seeded Monte Carlo experiment engine and file formats for the
//! distance-bounding laboratory. The CLI front-end lives in the `qdb-lab`
//! binary.

pub mod experiment;
pub mod output;

pub use experiment::{monte_carlo, ExperimentSpec, ExperimentStats, LabError, RateEstimate};
