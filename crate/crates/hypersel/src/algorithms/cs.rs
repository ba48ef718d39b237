//! Cuckoo search after Yang & Deb: Lévy flights from every nest, greedy
//! replacement against a randomly chosen nest, then abandonment of the
//! worst fraction p_discard.
//!
//! Determinism: flights start from a frozen snapshot of the population.
//! Per nest the sweep draws D Lévy steps per variable (two Gaussians each),
//! then the target-nest index. Candidates are evaluated as one batch and
//! folded in nest order against live fitnesses. The discard phase ranks by
//! (fitness, index), re-initializes the abandoned nests in ascending index
//! order and evaluates the replacements as a second batch.

use rand::Rng;

use crate::error::Result;
use crate::hypercomplex::Hypercomplex;
use crate::optim::{Agent, Algorithm, StepCtx};

use super::{rand_position, CsParams, LevySampler};

pub struct Cs {
    params: CsParams,
    levy: LevySampler,
}

impl Cs {
    pub fn new(params: CsParams) -> Result<Self> {
        Ok(Self { params, levy: LevySampler::new(params.beta)? })
    }

    /// Number of nests abandoned per iteration: floor(p_discard * m),
    /// capped at m-1 so the best nest always survives.
    pub fn discard_count(&self, m: usize) -> usize {
        ((self.params.p_discard * m as f64).floor() as usize).min(m.saturating_sub(1))
    }
}

impl Algorithm for Cs {
    fn name(&self) -> &'static str {
        "cs"
    }

    fn step(&mut self, population: &mut [Agent], ctx: &mut StepCtx) -> Result<()> {
        let m = population.len();
        let d = ctx.space.space_dim;
        let gbest = ctx.evaluator.best().position.clone();
        let frozen: Vec<Vec<Hypercomplex>> = population.iter().map(|a| a.position.clone()).collect();

        let mut candidates = Vec::with_capacity(m);
        let mut targets = Vec::with_capacity(m);
        for source in &frozen {
            let mut candidate = Vec::with_capacity(ctx.space.n_variables);
            for (x, g) in source.iter().zip(&gbest) {
                let steps = Hypercomplex::from_fn(d, || self.levy.sample(ctx.rng))?;
                let flight = steps.mul_elem(&x.sub(g)?)?.scale(self.params.alpha_step);
                candidate.push(x.add(&flight)?.clamp());
            }
            candidates.push(candidate);
            targets.push(ctx.rng.random_range(0..m));
        }

        let refs: Vec<&Vec<Hypercomplex>> = candidates.iter().collect();
        let outcomes = ctx.evaluator.evaluate_positions(&refs)?;
        for ((candidate, outcome), &k) in candidates.into_iter().zip(outcomes).zip(&targets) {
            if outcome.fitness < population[k].fitness {
                population[k].position = candidate;
                population[k].fitness = outcome.fitness;
            }
        }

        let nd = self.discard_count(m);
        if nd > 0 {
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| {
                population[a]
                    .fitness
                    .total_cmp(&population[b].fitness)
                    .then(a.cmp(&b))
            });
            let mut abandoned: Vec<usize> = order[m - nd..].to_vec();
            abandoned.sort_unstable();
            let fresh: Vec<Vec<Hypercomplex>> = abandoned
                .iter()
                .map(|_| rand_position(ctx.rng, ctx.space.n_variables, d))
                .collect::<Result<_>>()?;
            let refs: Vec<&Vec<Hypercomplex>> = fresh.iter().collect();
            let outcomes = ctx.evaluator.evaluate_positions(&refs)?;
            for ((&idx, position), outcome) in abandoned.iter().zip(fresh).zip(outcomes) {
                population[idx].position = position;
                population[idx].fitness = outcome.fitness;
            }
        }
        Ok(())
    }
}
