//! Feature selection by meta-heuristic search in hypercomplex spaces.
//!
//! Candidate solutions are vectors of D-dimensional coefficient vectors
//! (D in {1, 4, 8}: real, quaternion, octonion) with every coefficient in
//! [0, 1]. A candidate maps to a binary feature mask through a Minkowski
//! norm, an affine span onto a bounded interval, a sigmoid squash and a
//! stochastic threshold; the mask is scored by wrapping an optimum-path
//! forest classifier, and seven population meta-heuristics search the
//! coefficient space. Statistical comparison across runs uses the Wilcoxon
//! signed-rank test.
//!
//! Everything is deterministic under a seed: run-level randomness comes
//! from named counter-based streams, so results reproduce bit-for-bit
//! regardless of evaluation batching.

pub mod algorithms;
pub mod data;
pub mod error;
pub mod hypercomplex;
pub mod mapping;
pub mod opf;
pub mod optim;
pub mod rng;
pub mod selection;
pub mod stats;

pub use error::{Error, Result};
pub use hypercomplex::Hypercomplex;
pub use mapping::{Bounds, FeatureMask};
pub use selection::{run_batch, run_experiment, RunConfig, RunRecord, Technique};
