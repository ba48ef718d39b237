//! Flower pollination algorithm after Yang. Each flower either pollinates
//! locally from two distinct partners or globally along a Lévy flight
//! toward the best solution; candidates are accepted greedily.
//!
//! Determinism: agents are processed in index order, live. Each draws the
//! branch uniform first; the local branch then draws the scalar step
//! epsilon, partner a, partner b (distinct via the shift trick), while the
//! global branch draws D Lévy steps per variable. Candidates are evaluated
//! one at a time so later flowers see earlier accepted moves. A population
//! of one cannot pollinate locally (no distinct partners exist) and keeps
//! its position without spending an evaluation.

use rand::Rng;

use crate::error::Result;
use crate::hypercomplex::Hypercomplex;
use crate::optim::{Agent, Algorithm, StepCtx};
use crate::rng::uniform;

use super::{FpaParams, LevySampler};

pub struct Fpa {
    params: FpaParams,
    levy: LevySampler,
}

impl Fpa {
    pub fn new(params: FpaParams) -> Result<Self> {
        Ok(Self { params, levy: LevySampler::new(params.beta)? })
    }
}

impl Algorithm for Fpa {
    fn name(&self) -> &'static str {
        "fpa"
    }

    fn step(&mut self, population: &mut [Agent], ctx: &mut StepCtx) -> Result<()> {
        let m = population.len();
        let d = ctx.space.space_dim;
        let gbest = ctx.evaluator.best().position.clone();

        for i in 0..m {
            let candidate: Option<Vec<Hypercomplex>> = if uniform(ctx.rng) < self.params.p_local {
                if m < 2 {
                    None
                } else {
                    let eps = uniform(ctx.rng);
                    let a = ctx.rng.random_range(0..m);
                    let mut b = ctx.rng.random_range(0..m - 1);
                    if b >= a {
                        b += 1;
                    }
                    let (xa, xb) = (population[a].position.clone(), population[b].position.clone());
                    Some(
                        population[i]
                            .position
                            .iter()
                            .zip(xa.iter().zip(&xb))
                            .map(|(x, (pa, pb))| {
                                Ok(x.add(&pa.sub(pb)?.scale(eps))?.clamp())
                            })
                            .collect::<Result<_>>()?,
                    )
                }
            } else {
                Some(
                    population[i]
                        .position
                        .iter()
                        .zip(&gbest)
                        .map(|(x, g)| {
                            let steps = Hypercomplex::from_fn(d, || self.levy.sample(ctx.rng))?;
                            Ok(x.add(&steps.mul_elem(&g.sub(x)?)?)?.clamp())
                        })
                        .collect::<Result<_>>()?,
                )
            };
            if let Some(candidate) = candidate {
                let outcome = ctx.evaluator.evaluate_position(&candidate)?;
                if outcome.fitness < population[i].fitness {
                    population[i].position = candidate;
                    population[i].fitness = outcome.fitness;
                }
            }
        }
        Ok(())
    }
}
