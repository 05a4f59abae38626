//! Experiment orchestration for the fractal decomposition optimizer: run matrices over the
//! benchmark suite, raw run logs, fixed-target reports, a content-hashed manifest, reference
//! data import and SVG plots.
//!
//! Everything reported is recomputable from the raw logs; [`experiment::verify`] does exactly
//! that and diffs the result against what is on disk.

pub mod error;
pub mod experiment;
pub mod logs;
pub mod manifest;
pub mod plan;
pub mod plot;
pub mod reference;
pub mod report;

pub use error::RunnerError;
pub use experiment::{run_experiment, verify, ExperimentOutcome, VerifyReport};
pub use plan::ExperimentPlan;

/// Version written into every file format produced by this crate.
pub const FORMAT_VERSION: u32 = 1;
