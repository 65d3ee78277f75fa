//! Population-based optimization loop: perturb + mutate every agent, evaluate
//! everyone on shared episode seeds, keep the top half and duplicate it.
//!
//! Every random draw comes from a stream keyed by
//! `(master_seed, generation, slot, purpose)`, so results do not depend on how
//! many worker threads run the variation and evaluation stages.

mod checkpoint;

use std::time::Instant;

use rayon::prelude::*;

use crate::envs::{run_episode_set, EnvSpec, RunningStandardizer, Task};
use crate::error::{Error, Result};
use crate::netgraph::DynamicNet;
use crate::rng::{mix_words, RngStream};

pub use checkpoint::{
    load_checkpoint, save_checkpoint, CHECKPOINT_FORMAT_VERSION, CHECKPOINT_MAGIC,
};

/// First held-out environment seed, 2^31 - 10.
pub const TEST_SEED_BASE: u64 = (1 << 31) - 10;
/// Number of held-out runs used to score an elite.
pub const TEST_RUNS: u64 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NetMode {
    /// Minimal networks that change shape through mutations.
    Dynamic,
    /// Frozen `[d_input, 50, 50, d_output]` networks; only parameters evolve.
    Static,
}

impl NetMode {
    pub fn name(self) -> &'static str {
        match self {
            NetMode::Dynamic => "dynamic",
            NetMode::Static => "static",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "dynamic" => Ok(NetMode::Dynamic),
            "static" => Ok(NetMode::Static),
            other => Err(Error::Config(format!(
                "unknown mode `{other}` (expected dynamic or static)"
            ))),
        }
    }
}

/// Purpose tags mixed into per-agent random streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamPurpose {
    Variation = 1,
    Mutation = 2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionConfig {
    pub task: Task,
    /// Must be even and at least 2.
    pub population_size: usize,
    pub generations: u64,
    pub perturb_sigma: f64,
    /// Standard deviation of parameters created by mutations.
    pub init_sigma: f64,
    pub mode: NetMode,
    pub master_seed: u64,
    pub workers: usize,
    /// Emit a checkpoint every this many generations; 0 disables.
    pub checkpoint_every: u64,
}

impl EvolutionConfig {
    pub fn new(task: Task, mode: NetMode) -> Self {
        Self {
            task,
            population_size: Self::default_population(task),
            generations: 300,
            perturb_sigma: 0.1,
            init_sigma: 1.0,
            mode,
            master_seed: 0,
            workers: 1,
            checkpoint_every: 0,
        }
    }

    pub fn default_population(task: Task) -> usize {
        match task {
            Task::Pendulum => 256,
            _ => 64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 || !self.population_size.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "population size must be even and >= 2, got {}",
                self.population_size
            )));
        }
        for (name, v) in [
            ("perturb_sigma", self.perturb_sigma),
            ("init_sigma", self.init_sigma),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub genome: DynamicNet,
    pub standardizer: RunningStandardizer,
    /// Latest evaluation; `None` before the first one.
    pub fitness: Option<f64>,
    pub slot: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub agents: Vec<Agent>,
    pub generation: u64,
    pub master_seed: u64,
}

impl Population {
    /// Highest-fitness agent, lowest slot on ties. `None` if any agent is unevaluated.
    pub fn elite(&self) -> Option<&Agent> {
        let mut best: Option<(&Agent, f64)> = None;
        for a in &self.agents {
            let f = a.fitness?;
            if best.is_none_or(|(_, bf)| f > bf) {
                best = Some((a, f));
            }
        }
        best.map(|(a, _)| a)
    }

    pub fn fitnesses(&self) -> Vec<Option<f64>> {
        self.agents.iter().map(|a| a.fitness).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub generation: u64,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub median_fitness: f64,
    pub elite_param_count: usize,
    pub elite_node_count: usize,
    pub elite_connection_count: usize,
    pub elapsed_seconds: f64,
}

impl RunRecord {
    /// Everything except wall-clock time.
    pub fn same_outcome(&self, other: &RunRecord) -> bool {
        RunRecord {
            elapsed_seconds: 0.0,
            ..self.clone()
        } == RunRecord {
            elapsed_seconds: 0.0,
            ..other.clone()
        }
    }
}

/// Stream seeded with `mix_words([master_seed, generation, slot, purpose])`.
pub fn agent_rng(
    master_seed: u64,
    generation: u64,
    slot: usize,
    purpose: StreamPurpose,
) -> RngStream {
    RngStream::from_seed(mix_words(&[
        master_seed,
        generation,
        slot as u64,
        purpose as u64,
    ]))
}

/// Environment seeds used in generation `g`: `g * E + e` for `e in 0..E`.
pub fn episode_seeds(generation: u64, episodes_per_eval: usize) -> Vec<u64> {
    let e = episodes_per_eval as u64;
    (0..e).map(|i| generation * e + i).collect()
}

pub fn init_population(cfg: &EvolutionConfig, spec: &EnvSpec) -> Result<Population> {
    let (d_in, d_out) = (spec.obs_dim, spec.action_space.arity());
    let agents = (0..cfg.population_size)
        .map(|slot| {
            let genome = match cfg.mode {
                NetMode::Dynamic => DynamicNet::new_minimal(d_in, d_out)?,
                NetMode::Static => DynamicNet::build_static(d_in, d_out)?,
            };
            Ok(Agent {
                genome,
                standardizer: RunningStandardizer::new(d_in),
                fitness: None,
                slot,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Population {
        agents,
        generation: 0,
        master_seed: cfg.master_seed,
    })
}

/// Perturbs every agent's parameters and, in dynamic mode, applies exactly one
/// architectural mutation.
pub fn variation(pop: &mut Population, cfg: &EvolutionConfig) -> Result<()> {
    let (seed, generation) = (pop.master_seed, pop.generation);
    pop.agents.par_iter_mut().try_for_each(|agent| {
        let mut rng = agent_rng(seed, generation, agent.slot, StreamPurpose::Variation);
        agent.genome.perturb_parameters(&mut rng, cfg.perturb_sigma);
        if cfg.mode == NetMode::Dynamic {
            let mut rng = agent_rng(seed, generation, agent.slot, StreamPurpose::Mutation);
            agent.genome.mutate(&mut rng, cfg.init_sigma)?;
        }
        Ok(())
    })
}

/// Scores every agent on this generation's shared episode seeds.
pub fn evaluate(pop: &mut Population, spec: &EnvSpec) -> Result<()> {
    let seeds = episode_seeds(pop.generation, spec.episodes_per_eval);
    let results: Vec<Result<f64>> = pop
        .agents
        .par_iter_mut()
        .map(|agent| run_episode_set(&agent.genome, spec, &mut agent.standardizer, &seeds))
        .collect();
    for (agent, result) in pop.agents.iter_mut().zip(results) {
        let fitness = result?;
        if !fitness.is_finite() {
            return Err(Error::NonFiniteFitness {
                slot: agent.slot,
                fitness,
            });
        }
        agent.fitness = Some(fitness);
    }
    Ok(())
}

/// Keeps the top half by fitness (lowest slot wins ties) and appends a copy
/// of each survivor. New slot order: survivors by rank, then their copies.
pub fn select(pop: &mut Population) {
    let mut order: Vec<usize> = (0..pop.agents.len()).collect();
    let fit = |i: usize| pop.agents[i].fitness.unwrap_or(f64::NEG_INFINITY);
    order.sort_by(|&a, &b| fit(b).total_cmp(&fit(a)).then(a.cmp(&b)));
    let half = pop.agents.len() / 2;
    let mut old: Vec<Option<Agent>> = std::mem::take(&mut pop.agents)
        .into_iter()
        .map(Some)
        .collect();
    let survivors: Vec<Agent> = order[..half]
        .iter()
        .map(|&i| old[i].take().unwrap())
        .collect();
    let copies = survivors.clone();
    pop.agents = survivors.into_iter().chain(copies).collect();
    for (slot, agent) in pop.agents.iter_mut().enumerate() {
        agent.slot = slot;
    }
    pop.generation += 1;
}

fn summarize(pop: &Population, elapsed_seconds: f64) -> RunRecord {
    let mut fits: Vec<f64> = pop
        .agents
        .iter()
        .map(|a| a.fitness.unwrap_or(f64::NAN))
        .collect();
    fits.sort_by(f64::total_cmp);
    let n = fits.len();
    let median = if n.is_multiple_of(2) {
        (fits[n / 2 - 1] + fits[n / 2]) / 2.0
    } else {
        fits[n / 2]
    };
    let elite = pop.elite().expect("population evaluated");
    RunRecord {
        generation: pop.generation,
        best_fitness: fits[n - 1],
        mean_fitness: fits.iter().sum::<f64>() / n as f64,
        median_fitness: median,
        elite_param_count: elite.genome.param_count(),
        elite_node_count: elite.genome.node_count(),
        elite_connection_count: elite.genome.connection_count(),
        elapsed_seconds,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EliteScore {
    pub mean: f64,
    /// One score per held-out run, in seed order.
    pub scores: Vec<f64>,
}

/// Evaluates the elite on [`TEST_RUNS`] held-out runs. Run `r` uses base seed
/// `TEST_SEED_BASE + r`; its episode `e` uses `base + TEST_RUNS * e`. Each run
/// starts from its own copy of the elite's standardizer.
pub fn test_elite(pop: &Population, spec: &EnvSpec) -> Result<EliteScore> {
    let elite = pop
        .elite()
        .ok_or_else(|| Error::Config("population has not been evaluated".into()))?;
    let scores = (0..TEST_RUNS)
        .map(|r| {
            let seeds: Vec<u64> = (0..spec.episodes_per_eval as u64)
                .map(|e| TEST_SEED_BASE + r + TEST_RUNS * e)
                .collect();
            let mut std = elite.standardizer.clone();
            run_episode_set(&elite.genome, spec, &mut std, &seeds)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(EliteScore {
        mean: scores.iter().sum::<f64>() / scores.len() as f64,
        scores,
    })
}

/// A run in progress: population, per-generation records and a worker pool.
pub struct Evolution {
    cfg: EvolutionConfig,
    spec: EnvSpec,
    pop: Population,
    records: Vec<RunRecord>,
    pool: rayon::ThreadPool,
    timing: bool,
    elapsed_before: f64,
    started: Instant,
}

fn build_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))
}

impl Evolution {
    pub fn new(cfg: EvolutionConfig) -> Result<Self> {
        cfg.validate()?;
        let spec = cfg.task.spec();
        let pop = init_population(&cfg, &spec)?;
        Self::assemble(cfg, pop, Vec::new())
    }

    /// Continues from checkpoint bytes. `generations` and `workers` may be
    /// overridden; everything else comes from the checkpoint.
    pub fn resume(bytes: &[u8], generations: Option<u64>, workers: Option<usize>) -> Result<Self> {
        let (pop, mut cfg, records) = load_checkpoint(bytes)?;
        if let Some(g) = generations {
            cfg.generations = g;
        }
        if let Some(w) = workers {
            cfg.workers = w;
        }
        cfg.validate()?;
        Self::assemble(cfg, pop, records)
    }

    fn assemble(cfg: EvolutionConfig, pop: Population, records: Vec<RunRecord>) -> Result<Self> {
        let elapsed_before = records.last().map_or(0.0, |r| r.elapsed_seconds);
        Ok(Self {
            spec: cfg.task.spec(),
            pool: build_pool(cfg.workers)?,
            cfg,
            pop,
            records,
            timing: false,
            elapsed_before,
            started: Instant::now(),
        })
    }

    /// Records real elapsed seconds. Off by default, in which case
    /// `elapsed_seconds` is 0 and records are a pure function of the config.
    pub fn with_timing(mut self, timing: bool) -> Self {
        self.timing = timing;
        self
    }

    pub fn config(&self) -> &EvolutionConfig {
        &self.cfg
    }

    pub fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    pub fn population(&self) -> &Population {
        &self.pop
    }

    pub fn records(&self) -> &[RunRecord] {
        &self.records
    }

    /// True right after a generation that completes a checkpoint interval.
    pub fn checkpoint_due(&self) -> bool {
        let every = self.cfg.checkpoint_every;
        every > 0 && self.pop.generation > 0 && self.pop.generation.is_multiple_of(every)
    }

    pub fn set_checkpoint_every(&mut self, every: u64) {
        self.cfg.checkpoint_every = every;
    }

    pub fn is_finished(&self) -> bool {
        self.pop.generation >= self.cfg.generations
    }

    /// One variation, evaluation and selection round.
    pub fn step(&mut self) -> Result<&RunRecord> {
        let (cfg, spec, pop) = (&self.cfg, &self.spec, &mut self.pop);
        self.pool.install(|| -> Result<()> {
            variation(pop, cfg)?;
            evaluate(pop, spec)
        })?;
        let elapsed = if self.timing {
            self.elapsed_before + self.started.elapsed().as_secs_f64()
        } else {
            0.0
        };
        let record = summarize(&self.pop, elapsed);
        select(&mut self.pop);
        self.records.push(record);
        Ok(self.records.last().unwrap())
    }

    /// Runs until the configured generation count, handing checkpoint bytes
    /// to `on_checkpoint` every `checkpoint_every` generations.
    pub fn run(&mut self, mut on_checkpoint: impl FnMut(u64, Vec<u8>) -> Result<()>) -> Result<()> {
        while !self.is_finished() {
            let record = self.step()?;
            log::info!(
                "gen {:>5}  best {:>10.3}  mean {:>10.3}  elite params {}",
                record.generation,
                record.best_fitness,
                record.mean_fitness,
                record.elite_param_count
            );
            if self.checkpoint_due() {
                on_checkpoint(self.pop.generation, self.checkpoint())?;
            }
        }
        Ok(())
    }

    pub fn checkpoint(&self) -> Vec<u8> {
        save_checkpoint(&self.pop, &self.cfg, &self.records)
    }

    pub fn into_parts(self) -> (Population, Vec<RunRecord>) {
        (self.pop, self.records)
    }
}

/// Runs the full loop without checkpointing.
pub fn run_evolution(cfg: EvolutionConfig) -> Result<(Population, Vec<RunRecord>)> {
    let mut evo = Evolution::new(cfg)?;
    evo.run(|_, _| Ok(()))?;
    Ok(evo.into_parts())
}
