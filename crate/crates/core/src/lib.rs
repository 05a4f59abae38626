//! Fractal decomposition optimization for bound-constrained continuous minimization.
//!
//! The crate is split along the lines of the algorithm:
//!
//! - [`geometry`]: hyperspheres, their decomposition into `2·D` children, inflation and
//!   quality scoring.
//! - [`local_search`]: the intensive coordinate search with step halving used to exploit the
//!   deepest regions.
//! - [`driver`]: the level-by-level exploration loop tying the two together and recording a
//!   [`RunTrace`](driver::RunTrace).
//! - [`suite`]: a noiseless benchmark suite with seeded instances.
//! - [`metrics`]: fixed-target runtimes, average runtime, simulated restarts and ECDFs.
//!
//! ```
//! use fda_core::bounds::Bounds;
//! use fda_core::driver::{optimize, FdaConfig};
//! use fda_core::suite::make_instance;
//!
//! let mut problem = make_instance(1, 2, 1).unwrap();
//! let config = FdaConfig::new(Bounds::hypercube(2, -5.0, 5.0).unwrap(), 2000);
//! let trace = optimize(&mut problem, &config).unwrap();
//! assert!(trace.evaluations_used <= 2000);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod driver;
pub mod geometry;
pub mod local_search;
pub mod metrics;
pub mod objective;
pub mod suite;

pub use bounds::Bounds;
pub use driver::{optimize, FdaConfig, RunTrace};
pub use geometry::{BestSoFar, Hypersphere};
pub use objective::{BudgetExhausted, Budgeted, EvalHandle, Objective};
