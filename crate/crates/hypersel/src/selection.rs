//! The wrapper objective (mask -> classifier validation error) and the
//! experiment protocol around it: stratified split, min-max normalization,
//! optimization, retraining, test scoring, and batched runs.
//!
//! The test partition never reaches the objective: the objective is
//! constructed from the train and validation partitions only, so leakage is
//! impossible by construction.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::algorithms::{algorithm_by_name, space_name_of_dim, AlgorithmParams};
use crate::data::{split, Dataset, Normalizer, SplitSpec};
use crate::error::{Error, Result};
use crate::mapping::{mask_popcount, Bounds, FeatureMask};
use crate::opf::{balanced_accuracy, plain_accuracy, train};
use crate::optim::{run, Objective, SearchSpace};
use crate::rng::{stream_rng, STREAM_SPLIT};

/// Fitness of a mask: 1 - balanced accuracy of an optimum-path forest
/// trained on the train partition and scored on the validation partition,
/// restricted to the mask's features. The empty mask short-circuits to the
/// worst fitness without touching the classifier, enforcing the "at least
/// one feature" constraint by penalty.
pub struct WrapperObjective {
    train_x: Vec<Vec<f64>>,
    train_y: Vec<usize>,
    val_x: Vec<Vec<f64>>,
    val_y: Vec<usize>,
    cache: Option<Mutex<HashMap<FeatureMask, f64>>>,
    classifier_calls: AtomicU64,
}

impl WrapperObjective {
    pub fn new(
        train_x: Vec<Vec<f64>>,
        train_y: Vec<usize>,
        val_x: Vec<Vec<f64>>,
        val_y: Vec<usize>,
    ) -> Self {
        Self {
            train_x,
            train_y,
            val_x,
            val_y,
            cache: Some(Mutex::new(HashMap::new())),
            classifier_calls: AtomicU64::new(0),
        }
    }

    /// Same objective with the mask cache disabled; every distinct
    /// evaluation trains the classifier again. The objective is pure, so
    /// results are identical either way.
    pub fn uncached(
        train_x: Vec<Vec<f64>>,
        train_y: Vec<usize>,
        val_x: Vec<Vec<f64>>,
        val_y: Vec<usize>,
    ) -> Self {
        Self { cache: None, ..Self::new(train_x, train_y, val_x, val_y) }
    }

    /// Number of actual classifier trainings so far (cache hits and empty
    /// masks do not count).
    pub fn classifier_calls(&self) -> u64 {
        self.classifier_calls.load(Ordering::Relaxed)
    }

    /// The canonical mask -> fitness path.
    pub fn fitness_of_mask(&self, mask: &FeatureMask) -> Result<f64> {
        if mask_popcount(mask) == 0 {
            return Ok(1.0);
        }
        if let Some(cache) = &self.cache {
            if let Some(&fitness) = cache.lock().expect("cache lock").get(mask) {
                return Ok(fitness);
            }
        }
        self.classifier_calls.fetch_add(1, Ordering::Relaxed);
        let model = train(&self.train_x, &self.train_y, mask)?;
        let predictions = model.classify_batch(&self.val_x)?;
        let fitness = 1.0 - balanced_accuracy(&self.val_y, &predictions)?;
        if let Some(cache) = &self.cache {
            cache.lock().expect("cache lock").insert(mask.clone(), fitness);
        }
        Ok(fitness)
    }
}

impl Objective for WrapperObjective {
    fn evaluate(&self, _reals: &[f64], mask: &FeatureMask) -> Result<f64> {
        self.fitness_of_mask(mask)
    }
}

/// Everything a single experiment needs besides the dataset, the algorithm
/// and the seed. Defaults are the published protocol: 15 agents, 25
/// iterations, Euclidean norm, span onto [-20, 20], 25/25/50 stratified
/// split.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub n_agents: usize,
    pub n_iterations: usize,
    pub p: f64,
    pub bounds: Bounds,
    pub split: SplitSpec,
    pub params: AlgorithmParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_agents: 15,
            n_iterations: 25,
            p: 2.0,
            bounds: Bounds::default(),
            split: SplitSpec::default(),
            params: AlgorithmParams::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_agents < 1 || self.n_iterations < 1 {
            return Err(Error::Config("agents and iterations must be at least 1".into()));
        }
        if !(self.p >= 1.0) {
            return Err(Error::BadNormOrder(self.p));
        }
        Bounds::new(self.bounds.lower(), self.bounds.upper())?;
        self.split.validate()
    }
}

/// One algorithm-space combination.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Technique {
    pub algorithm: String,
    pub space_dim: usize,
}

impl Technique {
    pub fn new(algorithm: &str, space_dim: usize) -> Self {
        Self { algorithm: algorithm.into(), space_dim }
    }

    /// Stable label for report columns, e.g. "pso-quat".
    pub fn label(&self) -> String {
        format!("{}-{}", self.algorithm, space_name_of_dim(self.space_dim))
    }
}

/// Outcome of one seeded experiment.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: String,
    pub space_dim: usize,
    pub seed: u64,
    /// Balanced accuracy on the held-out test partition.
    pub test_accuracy: f64,
    /// Plain (sample-weighted) accuracy on the same partition.
    pub test_accuracy_plain: f64,
    pub n_selected: usize,
    /// Seconds spent in the optimization phase only.
    pub wall_time: f64,
    pub best_fitness: f64,
    pub best_mask: FeatureMask,
    /// Best fitness after each update iteration; length T, non-increasing.
    pub trace: Vec<f64>,
    pub evaluations: u64,
}

/// The acting partitions of one run: fold roles alternate with seed parity
/// (even seeds train on the train fold, odd seeds on the validation fold),
/// which realizes 2-fold cross-validation across a run batch.
struct ActingData {
    train_x: Vec<Vec<f64>>,
    train_y: Vec<usize>,
    val_x: Vec<Vec<f64>>,
    val_y: Vec<usize>,
    test_x: Vec<Vec<f64>>,
    test_y: Vec<usize>,
}

fn prepare(dataset: &Dataset, config: &RunConfig, seed: u64) -> Result<ActingData> {
    let mut rng = stream_rng(seed, STREAM_SPLIT);
    let parts = split(dataset, &config.split, &mut rng)?;
    let (fold_a, fold_b) = if seed % 2 == 0 {
        (&parts.train, &parts.validation)
    } else {
        (&parts.validation, &parts.train)
    };
    if parts.test.is_empty() {
        return Err(Error::EmptyTestSet);
    }
    let normalizer = Normalizer::fit(dataset, fold_a)?;
    let take = |rows: &[usize]| -> (Vec<Vec<f64>>, Vec<usize>) {
        let x = normalizer.transform_rows(dataset, rows);
        let y = rows.iter().map(|&r| dataset.y[r]).collect();
        (x, y)
    };
    let (train_x, train_y) = take(fold_a);
    let (val_x, val_y) = take(fold_b);
    let (test_x, test_y) = take(&parts.test);
    Ok(ActingData { train_x, train_y, val_x, val_y, test_x, test_y })
}

#[cfg(not(target_arch = "wasm32"))]
fn now() -> Option<std::time::Instant> {
    Some(std::time::Instant::now())
}

#[cfg(target_arch = "wasm32")]
fn now() -> Option<std::time::Instant> {
    None
}

fn seconds_since(start: Option<std::time::Instant>) -> f64 {
    start.map(|t| t.elapsed().as_secs_f64()).unwrap_or(0.0)
}

/// Runs one seeded experiment: split, normalize, optimize on the acting
/// train/validation folds, retrain on the acting train fold with the best
/// mask, and score the untouched test partition.
pub fn run_experiment(
    dataset: &Dataset,
    technique: &Technique,
    seed: u64,
    config: &RunConfig,
) -> Result<RunRecord> {
    config.validate()?;
    let data = prepare(dataset, config, seed)?;
    let objective = WrapperObjective::new(
        data.train_x.clone(),
        data.train_y.clone(),
        data.val_x,
        data.val_y,
    );
    let space = SearchSpace {
        n_agents: config.n_agents,
        n_variables: dataset.n_features,
        n_iterations: config.n_iterations,
        space_dim: technique.space_dim,
        bounds: config.bounds,
        p: config.p,
    };
    let mut algorithm = algorithm_by_name(&technique.algorithm, &config.params)?;

    let started = now();
    let outcome = run(space, algorithm.as_mut(), &objective, seed)?;
    let wall_time = seconds_since(started);

    let (test_accuracy, test_accuracy_plain) = if mask_popcount(&outcome.best.mask) == 0 {
        // A search that never saw a nonempty mask has nothing to classify
        // with; score it at the penalty value.
        (0.0, 0.0)
    } else {
        let model = train(&data.train_x, &data.train_y, &outcome.best.mask)?;
        let predictions = model.classify_batch(&data.test_x)?;
        (
            balanced_accuracy(&data.test_y, &predictions)?,
            plain_accuracy(&data.test_y, &predictions)?,
        )
    };

    Ok(RunRecord {
        algorithm: technique.algorithm.clone(),
        space_dim: technique.space_dim,
        seed,
        test_accuracy,
        test_accuracy_plain,
        n_selected: mask_popcount(&outcome.best.mask),
        wall_time,
        best_fitness: outcome.best.fitness,
        best_mask: outcome.best.mask,
        trace: outcome.trace,
        evaluations: outcome.evaluations,
    })
}

/// The no-selection reference: the full mask, no optimization, same split
/// and normalization protocol.
pub fn run_baseline(dataset: &Dataset, seed: u64, config: &RunConfig) -> Result<RunRecord> {
    config.validate()?;
    let data = prepare(dataset, config, seed)?;
    let mask: FeatureMask = vec![true; dataset.n_features];

    let started = now();
    let model = train(&data.train_x, &data.train_y, &mask)?;
    let val_predictions = model.classify_batch(&data.val_x)?;
    let best_fitness = 1.0 - balanced_accuracy(&data.val_y, &val_predictions)?;
    let predictions = model.classify_batch(&data.test_x)?;
    let wall_time = seconds_since(started);

    Ok(RunRecord {
        algorithm: "baseline".into(),
        space_dim: 1,
        seed,
        test_accuracy: balanced_accuracy(&data.test_y, &predictions)?,
        test_accuracy_plain: plain_accuracy(&data.test_y, &predictions)?,
        n_selected: dataset.n_features,
        wall_time,
        best_fitness,
        best_mask: mask,
        trace: Vec::new(),
        evaluations: 0,
    })
}

/// All runs of one technique.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TechniqueRuns {
    pub technique: Technique,
    pub records: Vec<RunRecord>,
}

fn batch_tasks(n_techniques: usize, n_runs: usize) -> Vec<(usize, usize)> {
    (0..n_techniques)
        .flat_map(|t| (0..n_runs).map(move |r| (t, r)))
        .collect()
}

#[cfg(feature = "parallel")]
fn map_tasks<F>(tasks: &[(usize, usize)], jobs: Option<usize>, f: F) -> Result<Vec<RunRecord>>
where
    F: Fn(usize, usize) -> Result<RunRecord> + Sync,
{
    use rayon::prelude::*;
    let run_all = || tasks.par_iter().map(|&(t, r)| f(t, r)).collect();
    match jobs {
        Some(1) => tasks.iter().map(|&(t, r)| f(t, r)).collect(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(run_all),
        None => run_all(),
    }
}

#[cfg(not(feature = "parallel"))]
fn map_tasks<F>(tasks: &[(usize, usize)], _jobs: Option<usize>, f: F) -> Result<Vec<RunRecord>>
where
    F: Fn(usize, usize) -> Result<RunRecord> + Sync,
{
    tasks.iter().map(|&(t, r)| f(t, r)).collect()
}

/// Runs every technique for `n_runs` seeded experiments (seeds base_seed,
/// base_seed+1, ...). Runs are independent and may execute in parallel;
/// record order and content do not depend on the schedule. `jobs` limits
/// the worker count (None uses the default pool, 1 forces serial).
pub fn run_batch(
    dataset: &Dataset,
    techniques: &[Technique],
    n_runs: usize,
    base_seed: u64,
    config: &RunConfig,
    jobs: Option<usize>,
) -> Result<Vec<TechniqueRuns>> {
    if n_runs == 0 {
        return Err(Error::Config("n_runs must be at least 1".into()));
    }
    let tasks = batch_tasks(techniques.len(), n_runs);
    let records = map_tasks(&tasks, jobs, |t, r| {
        run_experiment(dataset, &techniques[t], base_seed + r as u64, config)
    })?;
    Ok(records
        .chunks(n_runs)
        .zip(techniques)
        .map(|(chunk, technique)| TechniqueRuns {
            technique: technique.clone(),
            records: chunk.to_vec(),
        })
        .collect())
}

/// One row of the batch report, shaped like the result tables: mean test
/// accuracy, mean selected features, mean optimization seconds.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SummaryRow {
    pub dataset: String,
    pub algorithm: String,
    pub space: String,
    pub mean_acc: f64,
    pub mean_feats: f64,
    pub mean_time: f64,
    pub mean_acc_plain: f64,
}

pub fn summarize(dataset: &str, runs: &TechniqueRuns) -> SummaryRow {
    let n = runs.records.len().max(1) as f64;
    let mean = |f: &dyn Fn(&RunRecord) -> f64| runs.records.iter().map(f).sum::<f64>() / n;
    SummaryRow {
        dataset: dataset.into(),
        algorithm: runs.technique.algorithm.clone(),
        space: space_name_of_dim(runs.technique.space_dim).into(),
        mean_acc: mean(&|r| r.test_accuracy),
        mean_feats: mean(&|r| r.n_selected as f64),
        mean_time: mean(&|r| r.wall_time),
        mean_acc_plain: mean(&|r| r.test_accuracy_plain),
    }
}
