//! Firefly algorithm after Yang. Brightness comparisons use the fitnesses
//! frozen at the start of the iteration; positions are live, so a firefly
//! attracted by several brighter ones accumulates the moves within the
//! sweep.
//!
//! Determinism: the sweep order is i ascending, j ascending; each move
//! draws one noise uniform per coefficient in (variable, coefficient)
//! order. A firefly with no brighter neighbour (in particular a single
//! agent, or the current minima) takes a pure alpha-noise walk instead, so
//! the exploration term never vanishes. One evaluation batch closes the
//! iteration.

use crate::error::Result;
use crate::hypercomplex::Hypercomplex;
use crate::optim::{Agent, Algorithm, StepCtx};
use crate::rng::uniform;

use super::FaParams;

pub struct Fa {
    params: FaParams,
}

impl Fa {
    pub fn new(params: FaParams) -> Self {
        Self { params }
    }
}

/// Squared Euclidean distance over all coefficients of all variables.
fn sq_distance(a: &[Hypercomplex], b: &[Hypercomplex]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| {
            p.coefficients()
                .iter()
                .zip(q.coefficients())
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
        })
        .sum()
}

impl Algorithm for Fa {
    fn name(&self) -> &'static str {
        "fa"
    }

    fn step(&mut self, population: &mut [Agent], ctx: &mut StepCtx) -> Result<()> {
        let m = population.len();
        let d = ctx.space.space_dim;
        let p = self.params;
        let frozen: Vec<f64> = population.iter().map(|a| a.fitness).collect();

        for i in 0..m {
            let mut attracted = false;
            for j in 0..m {
                if !(frozen[j] < frozen[i]) {
                    continue;
                }
                attracted = true;
                let brighter = population[j].position.clone();
                let r2 = sq_distance(&population[i].position, &brighter);
                let attraction = p.beta0 * (-p.gamma * r2).exp();
                for (x, xj) in population[i].position.iter_mut().zip(&brighter) {
                    let noise = Hypercomplex::from_fn(d, || p.alpha * (uniform(ctx.rng) - 0.5))?;
                    *x = x.add(&xj.sub(x)?.scale(attraction))?.add(&noise)?.clamp();
                }
            }
            if !attracted {
                for x in population[i].position.iter_mut() {
                    let noise = Hypercomplex::from_fn(d, || p.alpha * (uniform(ctx.rng) - 0.5))?;
                    *x = x.add(&noise)?.clamp();
                }
            }
        }

        let refs: Vec<&Vec<Hypercomplex>> = population.iter().map(|a| &a.position).collect();
        let outcomes = ctx.evaluator.evaluate_positions(&refs)?;
        for (agent, outcome) in population.iter_mut().zip(outcomes) {
            agent.fitness = outcome.fitness;
        }
        Ok(())
    }
}
