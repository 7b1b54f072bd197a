//! Harris Hawks Optimizer over a box-bounded real search space.
//!
//! The optimizer maximizes. One iteration updates every hawk from a snapshot
//! of the population taken at the start of the iteration (rabbit, mean
//! position, random peers), and each hawk draws from its own RNG substream
//! keyed by `(iteration, hawk index)`. Hawk updates are therefore independent
//! and the parallel schedule reproduces the sequential one bit for bit.

mod levy;
mod moves;

pub use levy::{levy_flight, mantegna_sigma, LevyFlight, DEFAULT_BETA, DEFAULT_SCALE};
pub use moves::{
    dive_step, escaping_energy, exploration_step, hard_besiege, jump_strength, soft_besiege,
    Branch, DiveChoice, DiveOutcome, ExplorationDraws,
};

use crate::error::{Error, Result};
use crate::exec::{map_ordered, Execution};
use crate::rng::substream;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::time::{Duration, Instant};

const INIT_STREAM: u64 = 0x1A17;
const STEP_STREAM: u64 = 0x57E9;

/// A pure fitness function to be maximized.
pub trait Objective: Sync {
    fn evaluate(&self, position: &[f64]) -> f64;
}

impl<F> Objective for F
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn evaluate(&self, position: &[f64]) -> f64 {
        self(position)
    }
}

/// Per-coordinate search box `[lower_i, upper_i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                what: "bounds",
                expected: lower.len(),
                actual: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::Config("search space must have at least one dimension".into()));
        }
        if let Some(i) = lower.iter().zip(&upper).position(|(l, u)| !(l < u)) {
            return Err(Error::Config(format!(
                "bound {i} is empty: [{}, {}]",
                lower[i], upper[i]
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; dim], vec![upper; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for ((xi, &l), &u) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *xi = xi.clamp(l, u);
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(&self.lower)
                .zip(&self.upper)
                .all(|((&xi, &l), &u)| l <= xi && xi <= u)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&l, &u)| (l + rng.random::<f64>() * (u - l)).min(u))
            .collect()
    }
}

/// A hawk: a position and, once evaluated, its fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub position: Vec<f64>,
    fitness: Option<f64>,
}

impl Agent {
    pub fn new(position: Vec<f64>) -> Self {
        Self {
            position,
            fitness: None,
        }
    }

    pub fn evaluated<O: Objective + ?Sized>(position: Vec<f64>, objective: &O) -> Self {
        let fitness = objective.evaluate(&position);
        Self {
            position,
            fitness: Some(fitness),
        }
    }

    pub fn with_fitness(position: Vec<f64>, fitness: f64) -> Self {
        Self {
            position,
            fitness: Some(fitness),
        }
    }

    pub fn fitness(&self) -> Option<f64> {
        self.fitness
    }

    pub fn is_evaluated(&self) -> bool {
        self.fitness.is_some()
    }

    fn score(&self) -> f64 {
        self.fitness.expect("hawk fitness read before evaluation")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HhoConfig {
    pub population_size: usize,
    pub max_iterations: usize,
    pub bounds: Bounds,
    pub levy_beta: f64,
    pub levy_scale: f64,
    pub rng_seed: u64,
    #[serde(default)]
    pub execution: Execution,
}

impl HhoConfig {
    pub fn new(population_size: usize, max_iterations: usize, bounds: Bounds) -> Self {
        Self {
            population_size,
            max_iterations,
            bounds,
            levy_beta: DEFAULT_BETA,
            levy_scale: DEFAULT_SCALE,
            rng_seed: 0,
            execution: Execution::default(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::Config(format!(
                "population size must be at least 2, got {}",
                self.population_size
            )));
        }
        if self.max_iterations < 1 {
            return Err(Error::Config("iteration budget must be at least 1".into()));
        }
        if !(self.levy_beta > 0.0 && self.levy_beta <= 2.0) {
            return Err(Error::Config(format!(
                "levy beta must lie in (0, 2], got {}",
                self.levy_beta
            )));
        }
        if !(self.levy_scale >= 0.0 && self.levy_scale.is_finite()) {
            return Err(Error::Config(format!("invalid levy scale {}", self.levy_scale)));
        }
        // re-validate in case the bounds were deserialized
        Bounds::new(self.bounds.lower.clone(), self.bounds.upper.clone()).map(|_| ())
    }
}

/// How often each update rule fired.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct BranchCounts {
    pub exploration: u64,
    pub soft_besiege: u64,
    pub hard_besiege: u64,
    pub soft_dive: u64,
    pub hard_dive: u64,
}

impl BranchCounts {
    fn record(&mut self, branch: Branch) {
        match branch {
            Branch::Exploration => self.exploration += 1,
            Branch::SoftBesiege => self.soft_besiege += 1,
            Branch::HardBesiege => self.hard_besiege += 1,
            Branch::SoftDive => self.soft_dive += 1,
            Branch::HardDive => self.hard_dive += 1,
        }
    }

    pub fn get(&self, branch: Branch) -> u64 {
        match branch {
            Branch::Exploration => self.exploration,
            Branch::SoftBesiege => self.soft_besiege,
            Branch::HardBesiege => self.hard_besiege,
            Branch::SoftDive => self.soft_dive,
            Branch::HardDive => self.hard_dive,
        }
    }

    pub fn total(&self) -> u64 {
        Branch::ALL.iter().map(|&b| self.get(b)).sum()
    }
}

#[derive(Debug, Clone)]
pub struct OptimizerState {
    pub iteration: usize,
    pub population: Vec<Agent>,
    /// Best hawk seen so far, across all iterations.
    pub rabbit: Agent,
    /// Best-so-far fitness after each completed iteration.
    pub trace: Vec<f64>,
    pub evaluations: usize,
    pub branch_counts: BranchCounts,
}

impl OptimizerState {
    pub fn best_fitness(&self) -> f64 {
        self.rabbit.score()
    }
}

#[derive(Debug, Clone)]
pub struct OptimizeResult {
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    pub trace: Vec<f64>,
    pub evaluations: usize,
    pub wall_time: Duration,
    pub branch_counts: BranchCounts,
}

struct Snapshot<'a> {
    population: &'a [Agent],
    rabbit: &'a [f64],
    mean: Vec<f64>,
}

struct AgentUpdate {
    agent: Agent,
    branch: Branch,
    evaluations: usize,
}

/// Harris Hawks Optimizer bound to one configuration.
#[derive(Debug, Clone)]
pub struct HarrisHawks {
    config: HhoConfig,
    levy: LevyFlight,
}

impl HarrisHawks {
    pub fn new(config: HhoConfig) -> Result<Self> {
        config.validate()?;
        let levy = LevyFlight::new(config.levy_beta, config.levy_scale);
        Ok(Self { config, levy })
    }

    pub fn config(&self) -> &HhoConfig {
        &self.config
    }

    /// Builds the initial population: `seeds` verbatim, then uniform draws in the box.
    pub fn initialize<O: Objective + ?Sized>(
        &self,
        objective: &O,
        seeds: &[Vec<f64>],
    ) -> Result<OptimizerState> {
        let cfg = &self.config;
        let q = cfg.population_size;
        if seeds.len() > q {
            return Err(Error::TooManySeeds {
                seeds: seeds.len(),
                population: q,
            });
        }
        for (index, s) in seeds.iter().enumerate() {
            if s.len() != cfg.dim() {
                return Err(Error::DimensionMismatch {
                    what: "seed position",
                    expected: cfg.dim(),
                    actual: s.len(),
                });
            }
            if !cfg.bounds.contains(s) {
                return Err(Error::SeedOutOfBounds { index });
            }
        }

        let positions: Vec<Vec<f64>> = (0..q)
            .map(|i| match seeds.get(i) {
                Some(s) => s.clone(),
                None => cfg
                    .bounds
                    .sample(&mut substream(cfg.rng_seed, &[INIT_STREAM, i as u64])),
            })
            .collect();
        let population = map_ordered(cfg.execution, &positions, |_, p| {
            Agent::evaluated(p.clone(), objective)
        });
        let rabbit = best_of(&population).clone();

        Ok(OptimizerState {
            iteration: 0,
            population,
            rabbit,
            trace: Vec::with_capacity(cfg.max_iterations),
            evaluations: q,
            branch_counts: BranchCounts::default(),
        })
    }

    /// Runs one iteration over every hawk.
    pub fn step<O: Objective + ?Sized>(&self, state: &mut OptimizerState, objective: &O) {
        let t = state.iteration;
        let updates = {
            let snapshot = Snapshot {
                population: &state.population,
                rabbit: &state.rabbit.position,
                mean: mean_position(&state.population),
            };
            map_ordered(self.config.execution, &state.population, |i, agent| {
                self.update_agent(t, i, agent, &snapshot, objective)
            })
        };

        for (slot, update) in state.population.iter_mut().zip(updates) {
            state.evaluations += update.evaluations;
            state.branch_counts.record(update.branch);
            *slot = update.agent;
        }
        let best = best_of(&state.population);
        if best.score() > state.rabbit.score() {
            state.rabbit = best.clone();
        }
        state.trace.push(state.rabbit.score());
        state.iteration += 1;
    }

    /// Initializes, then runs the full iteration budget.
    pub fn optimize<O: Objective + ?Sized>(
        &self,
        objective: &O,
        seeds: &[Vec<f64>],
    ) -> Result<OptimizeResult> {
        let start = Instant::now();
        let mut state = self.initialize(objective, seeds)?;
        for _ in 0..self.config.max_iterations {
            self.step(&mut state, objective);
        }
        Ok(OptimizeResult {
            best_fitness: state.rabbit.score(),
            best_position: state.rabbit.position,
            trace: state.trace,
            evaluations: state.evaluations,
            wall_time: start.elapsed(),
            branch_counts: state.branch_counts,
        })
    }

    fn update_agent<O: Objective + ?Sized>(
        &self,
        t: usize,
        i: usize,
        agent: &Agent,
        snap: &Snapshot<'_>,
        objective: &O,
    ) -> AgentUpdate {
        let cfg = &self.config;
        let bounds = &cfg.bounds;
        let mut rng = substream(cfg.rng_seed, &[STEP_STREAM, t as u64, i as u64]);

        let e0 = 2.0 * rng.random::<f64>() - 1.0;
        let j = jump_strength(rng.random());
        let e = escaping_energy(e0, t, cfg.max_iterations);
        let r = if e.abs() < 1.0 { rng.random() } else { 1.0 };
        let branch = Branch::select(e, r);

        let x = &agent.position;
        let moved = match branch {
            Branch::Exploration => {
                let peer = &snap.population[rng.random_range(0..snap.population.len())];
                let draws = ExplorationDraws::sample(&mut rng);
                exploration_step(x, &peer.position, &snap.mean, snap.rabbit, bounds, draws)
            }
            Branch::SoftBesiege => soft_besiege(x, snap.rabbit, e, j, bounds),
            Branch::HardBesiege => hard_besiege(x, snap.rabbit, e, bounds),
            Branch::SoftDive | Branch::HardDive => {
                let reference = if branch == Branch::SoftDive { x } else { &snap.mean };
                let out = dive_step(
                    x,
                    agent.score(),
                    snap.rabbit,
                    reference,
                    e,
                    j,
                    objective,
                    bounds,
                    &self.levy,
                    &mut rng,
                );
                return AgentUpdate {
                    agent: Agent::with_fitness(out.position, out.fitness),
                    branch,
                    evaluations: out.evaluations,
                };
            }
        };
        AgentUpdate {
            agent: Agent::evaluated(moved, objective),
            branch,
            evaluations: 1,
        }
    }
}

/// Convenience wrapper: validate, initialize, run.
pub fn optimize<O: Objective + ?Sized>(
    config: HhoConfig,
    objective: &O,
    seeds: &[Vec<f64>],
) -> Result<OptimizeResult> {
    HarrisHawks::new(config)?.optimize(objective, seeds)
}

pub fn mean_position(population: &[Agent]) -> Vec<f64> {
    let dim = population.first().map_or(0, |a| a.position.len());
    let mut mean = vec![0.0; dim];
    for a in population {
        for (m, &x) in mean.iter_mut().zip(&a.position) {
            *m += x;
        }
    }
    let n = population.len() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    mean
}

/// First hawk of maximal fitness.
fn best_of(population: &[Agent]) -> &Agent {
    population
        .iter()
        .reduce(|best, a| if a.score() > best.score() { a } else { best })
        .expect("population is never empty")
}
