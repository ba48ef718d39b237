//! Particle swarm optimization, after Kennedy & Eberhart, plus the
//! adaptive-inertia variant (AIWPSO) after Nickabadi's success-ratio rule.
//!
//! Determinism: the update sweep walks agents in index order and, per
//! decision variable, draws the cognitive random vector r1 before the
//! social vector r2 (D uniforms each). All candidates are evaluated as one
//! synchronous batch after the sweep.

use crate::error::Result;
use crate::hypercomplex::Hypercomplex;
use crate::optim::{Agent, Algorithm, SearchSpace, StepCtx};

use super::{uniform_vec, AiwpsoParams, PsoParams};

/// Nickabadi's rule: w = (w_max - w_min) * (successes / m) + w_min, where a
/// success is an agent improving its personal best this iteration.
pub fn adaptive_inertia(successes: usize, population: usize, w_min: f64, w_max: f64) -> f64 {
    (w_max - w_min) * (successes as f64 / population as f64) + w_min
}

enum Inertia {
    Fixed(f64),
    /// Starts at w_max; updated after every sweep from the success ratio.
    Adaptive { w: f64, w_min: f64, w_max: f64 },
}

struct PersonalBest {
    position: Vec<Hypercomplex>,
    fitness: f64,
}

pub struct Pso {
    inertia: Inertia,
    c1: f64,
    c2: f64,
    velocities: Vec<Vec<Hypercomplex>>,
    personal: Vec<PersonalBest>,
}

impl Pso {
    pub fn fixed(params: PsoParams) -> Self {
        Self {
            inertia: Inertia::Fixed(params.w),
            c1: params.c1,
            c2: params.c2,
            velocities: Vec::new(),
            personal: Vec::new(),
        }
    }

    pub fn adaptive(params: AiwpsoParams) -> Self {
        Self {
            inertia: Inertia::Adaptive {
                w: params.w_max,
                w_min: params.w_min,
                w_max: params.w_max,
            },
            c1: params.c1,
            c2: params.c2,
            velocities: Vec::new(),
            personal: Vec::new(),
        }
    }

    /// Inertia weight the next sweep will use.
    pub fn inertia_weight(&self) -> f64 {
        match self.inertia {
            Inertia::Fixed(w) => w,
            Inertia::Adaptive { w, .. } => w,
        }
    }
}

impl Algorithm for Pso {
    fn name(&self) -> &'static str {
        match self.inertia {
            Inertia::Fixed(_) => "pso",
            Inertia::Adaptive { .. } => "aiwpso",
        }
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
        self.personal = population
            .iter()
            .map(|a| PersonalBest { position: a.position.clone(), fitness: a.fitness })
            .collect();
        Ok(())
    }

    fn step(&mut self, population: &mut [Agent], ctx: &mut StepCtx) -> Result<()> {
        let w = self.inertia_weight();
        let gbest = ctx.evaluator.best().position.clone();
        let d = ctx.space.space_dim;

        for (i, agent) in population.iter_mut().enumerate() {
            for v in 0..ctx.space.n_variables {
                let x = &agent.position[v];
                let r1 = uniform_vec(ctx.rng, d)?;
                let r2 = uniform_vec(ctx.rng, d)?;
                let cognitive = r1.mul_elem(&self.personal[i].position[v].sub(x)?)?.scale(self.c1);
                let social = r2.mul_elem(&gbest[v].sub(x)?)?.scale(self.c2);
                let vel = self.velocities[i][v].scale(w).add(&cognitive)?.add(&social)?;
                agent.position[v] = x.add(&vel)?.clamp();
                self.velocities[i][v] = vel;
            }
        }

        let refs: Vec<&Vec<Hypercomplex>> = population.iter().map(|a| &a.position).collect();
        let outcomes = ctx.evaluator.evaluate_positions(&refs)?;
        let mut successes = 0usize;
        for (i, (agent, outcome)) in population.iter_mut().zip(outcomes).enumerate() {
            agent.fitness = outcome.fitness;
            if outcome.fitness < self.personal[i].fitness {
                self.personal[i] = PersonalBest {
                    position: agent.position.clone(),
                    fitness: outcome.fitness,
                };
                successes += 1;
            }
        }
        if let Inertia::Adaptive { ref mut w, w_min, w_max } = self.inertia {
            *w = adaptive_inertia(successes, population.len(), w_min, w_max);
        }
        Ok(())
    }
}
