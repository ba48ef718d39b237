//! Artificial bee colony after Karaboga: employed bees perturb their own
//! source, onlookers reinforce sources by roulette selection, scouts
//! re-initialize sources whose trial counter reached the limit.
//!
//! Determinism: phases run in order (employed, onlooker, scout), each over
//! indices ascending. A perturbation draws the variable index, the partner
//! index (distinct via the shift trick), then the scalar U(-1,1) factor.
//! Onlooker roulette weights are frozen when the phase starts; partner
//! positions and greedy comparisons always use live state. Scout
//! replacements are drawn in index order and evaluated as one batch.

use rand::Rng;

use crate::error::Result;
use crate::hypercomplex::Hypercomplex;
use crate::optim::{Agent, Algorithm, SearchSpace, StepCtx};
use crate::rng::uniform;

use super::{rand_position, AbcParams};

pub struct Abc {
    params: AbcParams,
    trials: Vec<u64>,
}

impl Abc {
    pub fn new(params: AbcParams) -> Self {
        Self { params, trials: Vec::new() }
    }
}

/// Karaboga's fitness transform for roulette weights; larger is better.
fn source_weight(fitness: f64) -> f64 {
    if fitness >= 0.0 {
        1.0 / (1.0 + fitness)
    } else {
        1.0 + fitness.abs()
    }
}

fn roulette(weights: &[f64], total: f64, ctx: &mut StepCtx) -> usize {
    if !(total > 0.0 && total.is_finite()) {
        return ctx.rng.random_range(0..weights.len());
    }
    let u = uniform(ctx.rng) * total;
    let mut cumulative = 0.0;
    for (i, w) in weights.iter().enumerate() {
        cumulative += w;
        if u < cumulative {
            return i;
        }
    }
    weights.len() - 1
}

/// Neighbour candidate: one random variable nudged toward or away from a
/// random partner. A lone source has no partner and perturbs by zero.
fn perturb(population: &[Agent], i: usize, ctx: &mut StepCtx) -> Result<Vec<Hypercomplex>> {
    let m = population.len();
    let n = ctx.rng.random_range(0..ctx.space.n_variables);
    let partner = if m >= 2 {
        let p = ctx.rng.random_range(0..m - 1);
        if p >= i {
            p + 1
        } else {
            p
        }
    } else {
        i
    };
    let phi = 2.0 * uniform(ctx.rng) - 1.0;
    let mut candidate = population[i].position.clone();
    let delta = candidate[n].sub(&population[partner].position[n])?.scale(phi);
    candidate[n] = candidate[n].add(&delta)?.clamp();
    Ok(candidate)
}

impl Algorithm for Abc {
    fn name(&self) -> &'static str {
        "abc"
    }

    fn init(&mut self, population: &[Agent], _space: &SearchSpace) -> Result<()> {
        self.trials = vec![0; population.len()];
        Ok(())
    }

    fn step(&mut self, population: &mut [Agent], ctx: &mut StepCtx) -> Result<()> {
        let m = population.len();
        debug_assert_eq!(self.trials.len(), m, "init must run before step");

        for i in 0..m {
            let candidate = perturb(population, i, ctx)?;
            let outcome = ctx.evaluator.evaluate_position(&candidate)?;
            if outcome.fitness < population[i].fitness {
                population[i].position = candidate;
                population[i].fitness = outcome.fitness;
                self.trials[i] = 0;
            } else {
                self.trials[i] += 1;
            }
        }

        let weights: Vec<f64> = population.iter().map(|a| source_weight(a.fitness)).collect();
        let total: f64 = weights.iter().sum();
        for _ in 0..m {
            let s = roulette(&weights, total, ctx);
            let candidate = perturb(population, s, ctx)?;
            let outcome = ctx.evaluator.evaluate_position(&candidate)?;
            if outcome.fitness < population[s].fitness {
                population[s].position = candidate;
                population[s].fitness = outcome.fitness;
                self.trials[s] = 0;
            } else {
                self.trials[s] += 1;
            }
        }

        let scouts: Vec<usize> = (0..m)
            .filter(|&i| self.trials[i] >= self.params.trials_limit)
            .collect();
        if !scouts.is_empty() {
            let fresh: Vec<Vec<Hypercomplex>> = scouts
                .iter()
                .map(|_| rand_position(ctx.rng, ctx.space.n_variables, ctx.space.space_dim))
                .collect::<Result<_>>()?;
            let refs: Vec<&Vec<Hypercomplex>> = fresh.iter().collect();
            let outcomes = ctx.evaluator.evaluate_positions(&refs)?;
            for ((&idx, position), outcome) in scouts.iter().zip(fresh).zip(outcomes) {
                population[idx].position = position;
                population[idx].fitness = outcome.fitness;
                self.trials[idx] = 0;
            }
        }
        Ok(())
    }
}
