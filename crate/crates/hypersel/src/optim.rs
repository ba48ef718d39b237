//! Search-space container, fitness-evaluation contract and the generic
//! optimization loop every algorithm runs inside.
//!
//! Randomness is split in two: update steps draw from the run's master
//! stream in a fixed sequential order, while every fitness evaluation owns
//! a private stream derived from (iteration, dispatch slot). Slots are
//! handed out before dispatch, so evaluating a batch serially or in
//! parallel consumes identical randomness and produces identical results.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypercomplex::{Hypercomplex, VALID_DIMS};
use crate::mapping::{mask_from_position, spans_of_position, Bounds, FeatureMask};
use crate::rng::{eval_stream, master_rng, stream_rng, Stream};

/// Dimensions exposed to users of the optimizer; D=2 exists in the number
/// type but no experiment uses it.
pub const SEARCH_DIMS: [usize; 3] = [1, 4, 8];

/// Static description of one optimization problem instance.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SearchSpace {
    /// Population size m.
    pub n_agents: usize,
    /// Decision variables N (the feature count).
    pub n_variables: usize,
    /// Update iterations T after the initial evaluation.
    pub n_iterations: usize,
    /// Hypercomplex dimension D.
    pub space_dim: usize,
    /// Real interval the span function maps onto.
    pub bounds: Bounds,
    /// Minkowski norm order.
    pub p: f64,
}

impl SearchSpace {
    pub fn validate(&self) -> Result<()> {
        if self.n_agents < 1 || self.n_variables < 1 || self.n_iterations < 1 {
            return Err(Error::Config(
                "agents, variables and iterations must all be at least 1".into(),
            ));
        }
        if !VALID_DIMS.contains(&self.space_dim) {
            return Err(Error::BadDimension(self.space_dim));
        }
        if !(self.p >= 1.0) {
            return Err(Error::BadNormOrder(self.p));
        }
        Ok(())
    }
}

/// One candidate solution plus its most recent fitness.
#[derive(Clone, Debug)]
pub struct Agent {
    pub position: Vec<Hypercomplex>,
    pub fitness: f64,
}

/// Elitist record of the best evaluation seen so far. The mask is captured
/// at evaluation time: binarization is stochastic, so regenerating it later
/// would report features inconsistent with the recorded fitness.
#[derive(Clone, Debug)]
pub struct BestSolution {
    pub position: Vec<Hypercomplex>,
    pub fitness: f64,
    pub mask: FeatureMask,
}

/// Minimized fitness function. Receives both views of a candidate: the
/// span-mapped real vector and the stochastically binarized mask.
pub trait Objective: Sync {
    fn evaluate(&self, reals: &[f64], mask: &FeatureMask) -> Result<f64>;
}

/// Plain closure objective for tests and toy problems.
pub struct FnObjective<F>(pub F);

impl<F> Objective for FnObjective<F>
where
    F: Fn(&[f64], &FeatureMask) -> f64 + Sync,
{
    fn evaluate(&self, reals: &[f64], mask: &FeatureMask) -> Result<f64> {
        Ok((self.0)(reals, mask))
    }
}

/// Smooth sanity objective: sum of squared span values, minimized at the
/// zero element of every variable.
pub struct SphereObjective;

impl Objective for SphereObjective {
    fn evaluate(&self, reals: &[f64], _mask: &FeatureMask) -> Result<f64> {
        Ok(reals.iter().map(|x| x * x).sum())
    }
}

/// Result of evaluating one position.
#[derive(Clone, Debug)]
pub struct EvalOutcome {
    pub fitness: f64,
    pub mask: FeatureMask,
}

/// Owns fitness dispatch: slot accounting, per-evaluation streams and the
/// elitist best. Algorithms never call the objective directly.
pub struct Evaluator<'a> {
    space: SearchSpace,
    objective: &'a dyn Objective,
    seed: u64,
    iteration: u64,
    next_slot: u64,
    evaluations: u64,
    best: Option<BestSolution>,
}

impl<'a> Evaluator<'a> {
    pub fn new(space: SearchSpace, objective: &'a dyn Objective, seed: u64) -> Self {
        Self {
            space,
            objective,
            seed,
            iteration: 0,
            next_slot: 0,
            evaluations: 0,
            best: None,
        }
    }

    fn begin_iteration(&mut self, iteration: u64) {
        self.iteration = iteration;
        self.next_slot = 0;
    }

    /// Evaluates positions in dispatch order. Every position gets the slot
    /// `first + k`, so the stream it consumes does not depend on how the
    /// batch is scheduled; the elitist best is folded in afterwards in slot
    /// order with strictly-better replacement.
    pub fn evaluate_positions(&mut self, positions: &[&Vec<Hypercomplex>]) -> Result<Vec<EvalOutcome>> {
        let first = self.next_slot;
        self.next_slot += positions.len() as u64;
        self.evaluations += positions.len() as u64;
        let outcomes = positions
            .iter()
            .enumerate()
            .map(|(k, pos)| {
                let mut rng = stream_rng(self.seed, eval_stream(self.iteration, first + k as u64));
                let mask = mask_from_position(pos, self.space.p, self.space.bounds, &mut rng)?;
                let reals = spans_of_position(pos, self.space.p, self.space.bounds)?;
                let fitness = self.objective.evaluate(&reals, &mask)?;
                Ok(EvalOutcome { fitness, mask })
            })
            .collect::<Result<Vec<_>>>()?;
        for (pos, outcome) in positions.iter().zip(&outcomes) {
            let better = match &self.best {
                Some(b) => outcome.fitness < b.fitness,
                None => true,
            };
            if better {
                self.best = Some(BestSolution {
                    position: (*pos).clone(),
                    fitness: outcome.fitness,
                    mask: outcome.mask.clone(),
                });
            }
        }
        Ok(outcomes)
    }

    /// Convenience for a single candidate.
    pub fn evaluate_position(&mut self, position: &Vec<Hypercomplex>) -> Result<EvalOutcome> {
        Ok(self.evaluate_positions(&[position])?.remove(0))
    }

    /// Best solution so far; present once initialization has run.
    pub fn best(&self) -> &BestSolution {
        self.best.as_ref().expect("population not initialized")
    }

    /// Total objective evaluation requests so far.
    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }
}

/// Mutable context handed to an algorithm step.
pub struct StepCtx<'e, 'a> {
    pub space: SearchSpace,
    pub evaluator: &'e mut Evaluator<'a>,
    pub rng: &'e mut Stream,
    /// Update iteration, 1-based.
    pub iteration: usize,
}

/// One population-update rule. Steps mutate agents in a deterministic
/// sequential order and route every fitness lookup through the evaluator.
pub trait Algorithm {
    fn name(&self) -> &'static str;

    /// Hook called once with the freshly initialized, already evaluated
    /// population.
    fn init(&mut self, _population: &[Agent], _space: &SearchSpace) -> Result<()> {
        Ok(())
    }

    fn step(&mut self, population: &mut [Agent], ctx: &mut StepCtx) -> Result<()>;
}

/// Outcome of one full optimization run.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub best: BestSolution,
    /// Best fitness after each update iteration; length T, non-increasing.
    pub trace: Vec<f64>,
    /// Objective evaluation requests over the whole run.
    pub evaluations: u64,
}

/// Draws the initial population in a fixed order: agents outer, variables
/// inner, all from the master stream.
pub fn initialize(space: &SearchSpace, rng: &mut Stream) -> Result<Vec<Vec<Hypercomplex>>> {
    (0..space.n_agents)
        .map(|_| {
            (0..space.n_variables)
                .map(|_| Hypercomplex::rand_init(rng, space.space_dim))
                .collect()
        })
        .collect()
}

/// Runs `algorithm` against `objective` for T iterations and returns the
/// elitist best plus the per-iteration trace.
pub fn run(
    space: SearchSpace,
    algorithm: &mut dyn Algorithm,
    objective: &dyn Objective,
    seed: u64,
) -> Result<RunOutcome> {
    run_with_observer(space, algorithm, objective, seed, |_, _, _| {})
}

/// `run` with a per-iteration observer receiving (iteration, population,
/// best); iteration 0 is the initialized population.
pub fn run_with_observer(
    space: SearchSpace,
    algorithm: &mut dyn Algorithm,
    objective: &dyn Objective,
    seed: u64,
    mut observer: impl FnMut(usize, &[Agent], &BestSolution),
) -> Result<RunOutcome> {
    space.validate()?;
    let mut master = master_rng(seed);
    let mut evaluator = Evaluator::new(space, objective, seed);

    let positions = initialize(&space, &mut master)?;
    evaluator.begin_iteration(0);
    let position_refs: Vec<&Vec<Hypercomplex>> = positions.iter().collect();
    let outcomes = evaluator.evaluate_positions(&position_refs)?;
    let mut population: Vec<Agent> = positions
        .into_iter()
        .zip(&outcomes)
        .map(|(position, o)| Agent { position, fitness: o.fitness })
        .collect();
    algorithm.init(&population, &space)?;
    observer(0, &population, evaluator.best());

    let mut trace = Vec::with_capacity(space.n_iterations);
    for iteration in 1..=space.n_iterations {
        evaluator.begin_iteration(iteration as u64);
        let mut ctx = StepCtx { space, evaluator: &mut evaluator, rng: &mut master, iteration };
        algorithm.step(&mut population, &mut ctx)?;
        debug_assert!(
            population.iter().all(|a| a
                .position
                .iter()
                .all(|q| q.coefficients().iter().all(|c| (0.0..=1.0).contains(c)))),
            "coefficient escaped [0,1] at iteration {iteration}"
        );
        trace.push(evaluator.best().fitness);
        observer(iteration, &population, evaluator.best());
    }
    let evaluations = evaluator.evaluations();
    Ok(RunOutcome { best: evaluator.best().clone(), trace, evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::mask_popcount;

    fn space(n_vars: usize, dim: usize) -> SearchSpace {
        SearchSpace {
            n_agents: 15,
            n_variables: n_vars,
            n_iterations: 25,
            space_dim: dim,
            bounds: Bounds::default(),
            p: 2.0,
        }
    }

    /// Algorithm that never moves anything.
    struct Frozen;
    impl Algorithm for Frozen {
        fn name(&self) -> &'static str {
            "frozen"
        }
        fn step(&mut self, _population: &mut [Agent], _ctx: &mut StepCtx) -> Result<()> {
            Ok(())
        }
    }

    /// Algorithm that re-randomizes every agent each iteration; exists to
    /// exercise elitism under churn.
    struct Scrambler;
    impl Algorithm for Scrambler {
        fn name(&self) -> &'static str {
            "scrambler"
        }
        fn step(&mut self, population: &mut [Agent], ctx: &mut StepCtx) -> Result<()> {
            for agent in population.iter_mut() {
                agent.position = (0..ctx.space.n_variables)
                    .map(|_| Hypercomplex::rand_init(ctx.rng, ctx.space.space_dim))
                    .collect::<Result<_>>()?;
            }
            let refs: Vec<_> = population.iter().map(|a| &a.position).collect();
            let outcomes = ctx.evaluator.evaluate_positions(&refs)?;
            for (agent, o) in population.iter_mut().zip(outcomes) {
                agent.fitness = o.fitness;
            }
            Ok(())
        }
    }

    #[test]
    fn initialization_is_seeded_and_in_domain() {
        let s = space(6, 4);
        let a = initialize(&s, &mut master_rng(31)).unwrap();
        let b = initialize(&s, &mut master_rng(31)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 15);
        assert!(a
            .iter()
            .flatten()
            .flat_map(|q| q.coefficients())
            .all(|c| (0.0..=1.0).contains(c)));
    }

    #[test]
    fn constant_objective_gives_constant_trace() {
        let s = space(5, 1);
        let objective = FnObjective(|_: &[f64], _: &FeatureMask| 0.75);
        let out = run(s, &mut Frozen, &objective, 7).unwrap();
        assert_eq!(out.trace.len(), 25);
        assert!(out.trace.iter().all(|&f| f == 0.75));
        assert_eq!(out.best.fitness, 0.75);
    }

    #[test]
    fn seeded_runs_are_identical() {
        let s = space(4, 4);
        let a = run(s, &mut Scrambler, &SphereObjective, 11).unwrap();
        let b = run(s, &mut Scrambler, &SphereObjective, 11).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.best.fitness, b.best.fitness);
        assert_eq!(a.best.mask, b.best.mask);
        let c = run(s, &mut Scrambler, &SphereObjective, 12).unwrap();
        assert_ne!(a.trace, c.trace);
    }

    #[test]
    fn elitism_under_churn() {
        let s = space(5, 1);
        // Density objective: fraction of selected features.
        let objective = FnObjective(|_: &[f64], mask: &FeatureMask| {
            mask_popcount(mask) as f64 / mask.len() as f64
        });
        let out = run(s, &mut Scrambler, &objective, 3).unwrap();
        assert_eq!(out.trace.len(), 25);
        for w in out.trace.windows(2) {
            assert!(w[1] <= w[0], "trace must be non-increasing: {:?}", out.trace);
        }
        let min = out.trace.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(min, *out.trace.last().unwrap());
        assert!(out.best.fitness <= out.trace[0]);
    }

    #[test]
    fn best_mask_is_captured_at_evaluation_time() {
        let s = space(8, 4);
        let out = run(s, &mut Scrambler, &SphereObjective, 19).unwrap();
        assert_eq!(out.best.mask.len(), 8);
        assert!(out.best.fitness.is_finite());
    }

    #[test]
    fn evaluation_count_and_slots() {
        let s = space(4, 1);
        let out = run(s, &mut Frozen, &SphereObjective, 2).unwrap();
        assert_eq!(out.evaluations, 15, "frozen algorithm evaluates only at init");
        let churn = run(s, &mut Scrambler, &SphereObjective, 2).unwrap();
        assert_eq!(churn.evaluations, 15 + 15 * 25);
    }

    #[test]
    fn slot_streams_do_not_depend_on_batch_shape() {
        let s = space(5, 4);
        let objective = SphereObjective;
        let positions = initialize(&s, &mut master_rng(5)).unwrap();
        let refs: Vec<_> = positions.iter().collect();

        let mut one = Evaluator::new(s, &objective, 5);
        one.begin_iteration(3);
        let batched = one.evaluate_positions(&refs).unwrap();

        let mut two = Evaluator::new(s, &objective, 5);
        two.begin_iteration(3);
        let singly: Vec<_> = positions
            .iter()
            .map(|p| two.evaluate_position(p).unwrap())
            .collect();

        for (a, b) in batched.iter().zip(&singly) {
            assert_eq!(a.fitness, b.fitness);
            assert_eq!(a.mask, b.mask);
        }
    }

    #[test]
    fn objective_failure_aborts_with_diagnostic() {
        let s = space(3, 1);
        let objective = FnObjective(|_: &[f64], _: &FeatureMask| f64::NAN);
        // NaN fitness is not an error by itself; a failing objective is.
        struct Failing;
        impl Objective for Failing {
            fn evaluate(&self, _: &[f64], _: &FeatureMask) -> Result<f64> {
                Err(Error::Objective("classifier exploded".into()))
            }
        }
        assert!(run(s, &mut Frozen, &objective, 1).is_ok());
        let err = run(s, &mut Frozen, &Failing, 1).unwrap_err();
        assert!(err.to_string().contains("classifier exploded"));
    }

    #[test]
    fn invalid_space_rejected() {
        let mut s = space(3, 1);
        s.n_agents = 0;
        assert!(run(s, &mut Frozen, &SphereObjective, 1).is_err());
        let mut s2 = space(3, 1);
        s2.space_dim = 5;
        assert!(s2.validate().is_err());
    }
}
