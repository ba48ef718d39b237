//! Bat algorithm after Yang. Loudness A and pulse rate r are held constant
//! over the run; Table-style defaults give f in [0, 100], A = 1.5, r = 0.5.
//!
//! Determinism: per agent the generation sweep draws the frequency uniform,
//! then the walk-gate uniform, then (only when the walk fires) one U(-1,1)
//! per coefficient. Candidates are evaluated as one batch; the acceptance
//! sweep then draws one loudness-gate uniform per agent in index order.
//! Velocities persist whether or not the candidate is accepted.

use crate::error::Result;
use crate::hypercomplex::Hypercomplex;
use crate::optim::{Agent, Algorithm, SearchSpace, StepCtx};
use crate::rng::uniform;

use super::{symmetric_vec, BaParams};

pub struct Ba {
    params: BaParams,
    velocities: Vec<Vec<Hypercomplex>>,
}

impl Ba {
    pub fn new(params: BaParams) -> Self {
        Self { params, velocities: Vec::new() }
    }
}

impl Algorithm for Ba {
    fn name(&self) -> &'static str {
        "ba"
    }

    fn init(&mut self, population: &[Agent], space: &SearchSpace) -> Result<()> {
        self.velocities = population
            .iter()
            .map(|_| {
                (0..space.n_variables)
                    .map(|_| Hypercomplex::zero(space.space_dim))
                    .collect()
            })
            .collect::<Result<_>>()?;
        Ok(())
    }

    fn step(&mut self, population: &mut [Agent], ctx: &mut StepCtx) -> Result<()> {
        let gbest = ctx.evaluator.best().position.clone();
        let d = ctx.space.space_dim;
        let p = &self.params;

        let mut candidates = Vec::with_capacity(population.len());
        for (i, agent) in population.iter().enumerate() {
            let freq = p.f_min + (p.f_max - p.f_min) * uniform(ctx.rng);
            let mut candidate = Vec::with_capacity(ctx.space.n_variables);
            for v in 0..ctx.space.n_variables {
                let pull = agent.position[v].sub(&gbest[v])?.scale(freq);
                let vel = self.velocities[i][v].add(&pull)?;
                candidate.push(agent.position[v].add(&vel)?.clamp());
                self.velocities[i][v] = vel;
            }
            if uniform(ctx.rng) > p.pulse_rate {
                // Local walk around the global best overwrites the
                // velocity-driven candidate; the velocity update stands.
                candidate = gbest
                    .iter()
                    .map(|g| {
                        let eps = symmetric_vec(ctx.rng, d)?;
                        Ok(g.add(&eps.scale(p.loudness))?.clamp())
                    })
                    .collect::<Result<_>>()?;
            }
            candidates.push(candidate);
        }

        let refs: Vec<&Vec<Hypercomplex>> = candidates.iter().collect();
        let outcomes = ctx.evaluator.evaluate_positions(&refs)?;
        for ((agent, candidate), outcome) in population.iter_mut().zip(candidates).zip(outcomes) {
            if uniform(ctx.rng) < p.loudness && outcome.fitness <= agent.fitness {
                agent.position = candidate;
                agent.fitness = outcome.fitness;
            }
        }
        Ok(())
    }
}
