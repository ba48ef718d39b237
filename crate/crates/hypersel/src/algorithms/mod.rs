//! The seven population meta-heuristics, each written against the
//! hypercomplex combinators so a single implementation serves every space
//! dimension; the quaternion and octonion variants are the same code
//! instantiated with D=4 or D=8.
//!
//! Update equations follow the canonical sources: Kennedy & Eberhart's PSO,
//! Nickabadi's adaptive-inertia PSO, Yang's bat, firefly and flower
//! pollination algorithms, Yang & Deb's cuckoo search, and Karaboga's
//! artificial bee colony. Where a source leaves ordering open, the order is
//! pinned here (and stated in each type's docs) so seeded runs reproduce.

mod abc;
mod ba;
mod cs;
mod fa;
mod fpa;
mod levy;
mod pso;

pub use abc::Abc;
pub use ba::Ba;
pub use cs::Cs;
pub use fa::Fa;
pub use fpa::Fpa;
pub use levy::LevySampler;
pub use pso::{adaptive_inertia, Pso};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypercomplex::Hypercomplex;
use crate::optim::Algorithm;
use crate::rng::{uniform, Stream};

/// Per-algorithm parameters with the published defaults; any field can be
/// overridden through configuration.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct AlgorithmParams {
    pub abc: AbcParams,
    pub aiwpso: AiwpsoParams,
    pub ba: BaParams,
    pub cs: CsParams,
    pub fa: FaParams,
    pub fpa: FpaParams,
    pub pso: PsoParams,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct AbcParams {
    pub trials_limit: u64,
}

impl Default for AbcParams {
    fn default() -> Self {
        Self { trials_limit: 1000 }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct AiwpsoParams {
    pub c1: f64,
    pub c2: f64,
    pub w_min: f64,
    pub w_max: f64,
}

impl Default for AiwpsoParams {
    fn default() -> Self {
        Self { c1: 1.7, c2: 1.7, w_min: 0.5, w_max: 1.5 }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct BaParams {
    pub f_min: f64,
    pub f_max: f64,
    pub loudness: f64,
    pub pulse_rate: f64,
}

impl Default for BaParams {
    fn default() -> Self {
        Self { f_min: 0.0, f_max: 100.0, loudness: 1.5, pulse_rate: 0.5 }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct CsParams {
    pub beta: f64,
    pub p_discard: f64,
    pub alpha_step: f64,
}

impl Default for CsParams {
    fn default() -> Self {
        Self { beta: 1.5, p_discard: 0.25, alpha_step: 0.8 }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct FaParams {
    pub alpha: f64,
    pub beta0: f64,
    pub gamma: f64,
}

impl Default for FaParams {
    fn default() -> Self {
        Self { alpha: 0.2, beta0: 1.0, gamma: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct FpaParams {
    pub beta: f64,
    pub p_local: f64,
}

impl Default for FpaParams {
    fn default() -> Self {
        Self { beta: 1.5, p_local: 0.8 }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct PsoParams {
    pub c1: f64,
    pub c2: f64,
    pub w: f64,
}

impl Default for PsoParams {
    fn default() -> Self {
        Self { c1: 1.7, c2: 1.7, w: 0.7 }
    }
}

/// Name tokens accepted by the factory.
pub const ALGORITHM_NAMES: [&str; 7] = ["abc", "aiwpso", "ba", "cs", "fa", "fpa", "pso"];

/// Space tokens and their hypercomplex dimension.
pub const SPACE_NAMES: [(&str, usize); 3] = [("std", 1), ("quat", 4), ("oct", 8)];

/// Builds an algorithm by its name token.
pub fn algorithm_by_name(name: &str, params: &AlgorithmParams) -> Result<Box<dyn Algorithm>> {
    Ok(match name {
        "abc" => Box::new(Abc::new(params.abc)),
        "aiwpso" => Box::new(Pso::adaptive(params.aiwpso)),
        "ba" => Box::new(Ba::new(params.ba)),
        "cs" => Box::new(Cs::new(params.cs)?),
        "fa" => Box::new(Fa::new(params.fa)),
        "fpa" => Box::new(Fpa::new(params.fpa)?),
        "pso" => Box::new(Pso::fixed(params.pso)),
        other => return Err(Error::UnknownAlgorithm(other.into())),
    })
}

/// Maps a space token to its dimension.
pub fn space_dim_by_name(token: &str) -> Result<usize> {
    SPACE_NAMES
        .iter()
        .find(|(name, _)| *name == token)
        .map(|&(_, d)| d)
        .ok_or_else(|| Error::UnknownSpace(token.into()))
}

/// Token for a dimension, for reports.
pub fn space_name_of_dim(dim: usize) -> &'static str {
    match dim {
        1 => "std",
        4 => "quat",
        8 => "oct",
        _ => "custom",
    }
}

/// D uniforms in [0,1), coefficient order.
pub(crate) fn uniform_vec(rng: &mut Stream, d: usize) -> Result<Hypercomplex> {
    Hypercomplex::from_fn(d, || uniform(rng))
}

/// D uniforms in (-1,1), coefficient order.
pub(crate) fn symmetric_vec(rng: &mut Stream, d: usize) -> Result<Hypercomplex> {
    Hypercomplex::from_fn(d, || 2.0 * uniform(rng) - 1.0)
}

/// Fresh random position, variable-index order.
pub(crate) fn rand_position(rng: &mut Stream, n_variables: usize, dim: usize) -> Result<Vec<Hypercomplex>> {
    (0..n_variables).map(|_| Hypercomplex::rand_init(rng, dim)).collect()
}
