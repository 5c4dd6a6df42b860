//! Marginal empirical-likelihood sure independence screening.
//!
//! The crate ranks features of ultra-high-dimensional regression data by the
//! empirical-likelihood ratio of their marginal moment condition, and provides
//! baseline screeners, an iterative conditional variant, estimating-function
//! screening for longitudinal data, seeded simulation designs and a replication
//! harness.

pub mod bench;
pub mod cli;
pub mod dataset;
pub mod el;
pub mod error;
pub mod estimating;
pub mod ext;
pub mod rng;
pub mod io;
pub mod iterative;
pub mod scad;
pub mod simgen;
pub mod screening;

pub use dataset::{Dataset, LongitudinalDataset, Subject};
pub use el::{ElConfig, ElSolution, SolveStatus};
pub use error::{Error, Result};
pub use ext::ExtReal;
