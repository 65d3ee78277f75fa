//! Experiment orchestration behind the `dynevo` binary. This is the only
//! module that touches the filesystem.
//!
//! A run directory holds `manifest.toml`, `metrics.csv`, `ckpt_<generation>.bin`
//! checkpoints, and the final `elite.genome` with its `elite.dot` rendering.

pub mod cli;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::envs::Task;
use crate::error::{Error, Result};
use crate::evolution::{
    load_checkpoint, test_elite, EliteScore, Evolution, EvolutionConfig, NetMode, RunRecord,
    CHECKPOINT_MAGIC, TEST_RUNS, TEST_SEED_BASE,
};
use crate::netgraph::{DynamicNet, GENOME_MAGIC};

pub const METRICS_FILE: &str = "metrics.csv";
pub const MANIFEST_FILE: &str = "manifest.toml";
pub const ELITE_GENOME_FILE: &str = "elite.genome";
pub const ELITE_DOT_FILE: &str = "elite.dot";
pub const WORKERS_ENV: &str = "DYNEVO_WORKERS";
pub const DEFAULT_GENERATIONS: u64 = 300;

pub const METRICS_HEADER: [&str; 8] = [
    "generation",
    "best_fitness",
    "mean_fitness",
    "median_fitness",
    "elite_params",
    "elite_nodes",
    "elite_connections",
    "elapsed_seconds",
];

pub fn checkpoint_path(out_dir: &Path, generation: u64) -> PathBuf {
    out_dir.join(format!("ckpt_{generation}.bin"))
}

/// Settings for `evolve`. Unset fields fall back to the config file, then to
/// defaults. When resuming, only `gens`, `workers`, `checkpoint_every` and
/// `out` may change; the rest must match the checkpoint if given.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveOptions {
    pub task: Option<String>,
    pub mode: Option<String>,
    pub pop: Option<usize>,
    pub gens: Option<u64>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub checkpoint_every: Option<u64>,
    pub resume: Option<PathBuf>,
    pub perturb_sigma: Option<f64>,
    pub init_sigma: Option<f64>,
    /// Record real elapsed time in metrics.csv. Off by default so that
    /// repeated runs produce byte-identical metrics.
    #[serde(default)]
    pub wall_clock: bool,
}

impl EvolveOptions {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = read_text(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `self` win over those in `base`.
    pub fn over(self, base: EvolveOptions) -> EvolveOptions {
        EvolveOptions {
            task: self.task.or(base.task),
            mode: self.mode.or(base.mode),
            pop: self.pop.or(base.pop),
            gens: self.gens.or(base.gens),
            seed: self.seed.or(base.seed),
            workers: self.workers.or(base.workers),
            out: self.out.or(base.out),
            checkpoint_every: self.checkpoint_every.or(base.checkpoint_every),
            resume: self.resume.or(base.resume),
            perturb_sigma: self.perturb_sigma.or(base.perturb_sigma),
            init_sigma: self.init_sigma.or(base.init_sigma),
            wall_clock: self.wall_clock || base.wall_clock,
        }
    }
}

fn workers_from_env() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Config(format!("{WORKERS_ENV}={v:?} is not a worker count"))),
        Err(_) => Ok(None),
    }
}

fn fresh_config(opts: &EvolveOptions) -> Result<EvolutionConfig> {
    let task_name = opts
        .task
        .as_deref()
        .ok_or_else(|| Error::Config("--task is required unless resuming".into()))?;
    let task = Task::from_name(task_name)?;
    let mode = NetMode::from_name(opts.mode.as_deref().unwrap_or("dynamic"))?;
    let defaults = EvolutionConfig::new(task, mode);
    let cfg = EvolutionConfig {
        population_size: opts.pop.unwrap_or(defaults.population_size),
        generations: opts.gens.unwrap_or(DEFAULT_GENERATIONS),
        perturb_sigma: opts.perturb_sigma.unwrap_or(defaults.perturb_sigma),
        init_sigma: opts.init_sigma.unwrap_or(defaults.init_sigma),
        master_seed: opts.seed.unwrap_or(0),
        workers: opts
            .workers
            .map_or_else(workers_from_env, |w| Ok(Some(w)))?
            .unwrap_or(1),
        checkpoint_every: opts.checkpoint_every.unwrap_or(0),
        ..defaults
    };
    cfg.validate()?;
    Ok(cfg)
}

fn check_unchanged<T: PartialEq + std::fmt::Debug>(
    flag: &str,
    given: Option<T>,
    stored: T,
) -> Result<()> {
    match given {
        Some(v) if v != stored => Err(Error::Config(format!(
            "--{flag} {v:?} conflicts with the checkpoint value {stored:?}"
        ))),
        _ => Ok(()),
    }
}

fn resumed(opts: &EvolveOptions, path: &Path) -> Result<Evolution> {
    let bytes = read_bytes(path)?;
    let (_, stored, _) = load_checkpoint(&bytes)?;
    check_unchanged("task", opts.task.as_deref(), stored.task.name())?;
    check_unchanged("mode", opts.mode.as_deref(), stored.mode.name())?;
    check_unchanged("pop", opts.pop, stored.population_size)?;
    check_unchanged("seed", opts.seed, stored.master_seed)?;
    check_unchanged("perturb-sigma", opts.perturb_sigma, stored.perturb_sigma)?;
    check_unchanged("init-sigma", opts.init_sigma, stored.init_sigma)?;
    let workers = match opts.workers {
        Some(w) => Some(w),
        None => workers_from_env()?,
    };
    let mut evo = Evolution::resume(&bytes, opts.gens, workers)?;
    if let Some(every) = opts.checkpoint_every {
        evo.set_checkpoint_every(every);
    }
    Ok(evo)
}

#[derive(Debug, Serialize)]
struct ManifestConfig {
    task: &'static str,
    mode: &'static str,
    population_size: usize,
    generations: u64,
    perturb_sigma: f64,
    init_sigma: f64,
    master_seed: u64,
    workers: usize,
    checkpoint_every: u64,
}

/// Self-description of a run directory, written before the first generation.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    code_version: &'static str,
    started_at_unix: u64,
    out_dir: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    resumed_from: Option<String>,
    start_generation: u64,
    wall_clock: bool,
    config: ManifestConfig,
}

impl RunManifest {
    pub fn new(
        cfg: &EvolutionConfig,
        out_dir: &Path,
        resumed_from: Option<&Path>,
        start_generation: u64,
        wall_clock: bool,
    ) -> Self {
        Self {
            code_version: env!("CARGO_PKG_VERSION"),
            started_at_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            out_dir: out_dir.display().to_string(),
            resumed_from: resumed_from.map(|p| p.display().to_string()),
            start_generation,
            wall_clock,
            config: ManifestConfig {
                task: cfg.task.name(),
                mode: cfg.mode.name(),
                population_size: cfg.population_size,
                generations: cfg.generations,
                perturb_sigma: cfg.perturb_sigma,
                init_sigma: cfg.init_sigma,
                master_seed: cfg.master_seed,
                workers: cfg.workers,
                checkpoint_every: cfg.checkpoint_every,
            },
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serializes")
    }
}

#[derive(Serialize)]
struct MetricsRow {
    generation: u64,
    best_fitness: f64,
    mean_fitness: f64,
    median_fitness: f64,
    elite_params: usize,
    elite_nodes: usize,
    elite_connections: usize,
    elapsed_seconds: f64,
}

pub fn metrics_csv(records: &[RunRecord]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(METRICS_HEADER).expect("in-memory write");
    for r in records {
        w.serialize(MetricsRow {
            generation: r.generation,
            best_fitness: r.best_fitness,
            mean_fitness: r.mean_fitness,
            median_fitness: r.median_fitness,
            elite_params: r.elite_param_count,
            elite_nodes: r.elite_node_count,
            elite_connections: r.elite_connection_count,
            elapsed_seconds: r.elapsed_seconds,
        })
        .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, bytes).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveReport {
    pub out_dir: PathBuf,
    pub final_checkpoint: PathBuf,
    pub generation: u64,
    pub best_fitness: Option<f64>,
    pub elite_params: Option<usize>,
}

pub fn evolve(opts: EvolveOptions) -> Result<EvolveReport> {
    let (evo, out_dir) = match &opts.resume {
        Some(path) => {
            let out = match &opts.out {
                Some(o) => o.clone(),
                None => path.parent().map(Path::to_path_buf).unwrap_or_default(),
            };
            (resumed(&opts, path)?, out)
        }
        None => {
            let cfg = fresh_config(&opts)?;
            let out = opts
                .out
                .clone()
                .ok_or_else(|| Error::Config("--out is required".into()))?;
            (Evolution::new(cfg)?, out)
        }
    };
    let mut evo = evo.with_timing(opts.wall_clock);
    fs::create_dir_all(&out_dir).map_err(|source| Error::File {
        path: out_dir.clone(),
        source,
    })?;

    let manifest = RunManifest::new(
        evo.config(),
        &out_dir,
        opts.resume.as_deref(),
        evo.population().generation,
        opts.wall_clock,
    );
    write_file(&out_dir.join(MANIFEST_FILE), manifest.to_toml())?;
    log::info!(
        "{} {} run, population {}, generations {}..{}, {} worker(s), writing to {}",
        evo.config().task,
        evo.config().mode.name(),
        evo.config().population_size,
        evo.population().generation,
        evo.config().generations,
        evo.config().workers,
        out_dir.display()
    );

    while !evo.is_finished() {
        let r = evo.step()?;
        log::info!(
            "gen {:>5}  best {:>10.3}  mean {:>10.3}  median {:>10.3}  elite params {}",
            r.generation,
            r.best_fitness,
            r.mean_fitness,
            r.median_fitness,
            r.elite_param_count
        );
        if evo.checkpoint_due() {
            let path = checkpoint_path(&out_dir, evo.population().generation);
            write_file(&path, evo.checkpoint())?;
            write_file(&out_dir.join(METRICS_FILE), metrics_csv(evo.records()))?;
            log::info!("checkpoint {}", path.display());
        }
    }

    let generation = evo.population().generation;
    let final_checkpoint = checkpoint_path(&out_dir, generation);
    write_file(&final_checkpoint, evo.checkpoint())?;
    write_file(&out_dir.join(METRICS_FILE), metrics_csv(evo.records()))?;
    let elite = evo.population().elite();
    if let Some(elite) = elite {
        write_file(&out_dir.join(ELITE_GENOME_FILE), elite.genome.serialize())?;
        write_file(&out_dir.join(ELITE_DOT_FILE), elite.genome.to_dot())?;
    } else {
        log::warn!("population was never evaluated; no elite files written");
    }
    log::info!("final checkpoint {}", final_checkpoint.display());

    Ok(EvolveReport {
        out_dir,
        final_checkpoint,
        generation,
        best_fitness: evo.records().last().map(|r| r.best_fitness),
        elite_params: elite.map(|e| e.genome.param_count()),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestReport {
    pub task: Task,
    pub generation: u64,
    pub elite_slot: usize,
    pub elite_params: usize,
    pub score: EliteScore,
}

impl TestReport {
    /// Human-readable lines followed by `TEST_MEAN=<value>`.
    pub fn render(&self) -> String {
        let mut s = format!(
            "{} elite (slot {}, {} params) after {} generations\n",
            self.task, self.elite_slot, self.elite_params, self.generation
        );
        for (r, score) in self.score.scores.iter().enumerate() {
            s += &format!(
                "run {:>2}  seed {}  score {:.3}\n",
                r + 1,
                TEST_SEED_BASE + r as u64,
                score
            );
        }
        s += &format!("mean over {TEST_RUNS} runs: {:.3}\n", self.score.mean);
        s += &format!("TEST_MEAN={:?}\n", self.score.mean);
        s
    }
}

pub fn test_checkpoint(path: &Path) -> Result<TestReport> {
    let (pop, cfg, _) = load_checkpoint(&read_bytes(path)?)?;
    let spec = cfg.task.spec();
    let score = test_elite(&pop, &spec)?;
    let elite = pop.elite().expect("test_elite succeeded");
    Ok(TestReport {
        task: cfg.task,
        generation: pop.generation,
        elite_slot: elite.slot,
        elite_params: elite.genome.param_count(),
        score,
    })
}

/// Reads a genome either from a genome file or from a checkpoint (the elite,
/// or `slot` if given).
pub fn load_genome(path: &Path, slot: Option<usize>) -> Result<DynamicNet> {
    let bytes = read_bytes(path)?;
    if bytes.starts_with(CHECKPOINT_MAGIC) {
        let (pop, _, _) = load_checkpoint(&bytes)?;
        let agent = match slot {
            Some(s) => pop.agents.get(s).ok_or_else(|| {
                Error::Config(format!(
                    "slot {s} out of range for population of {}",
                    pop.agents.len()
                ))
            })?,
            None => pop.elite().unwrap_or(&pop.agents[0]),
        };
        Ok(agent.genome.clone())
    } else if bytes.starts_with(GENOME_MAGIC) {
        if slot.is_some() {
            return Err(Error::Config(
                "--slot only applies to checkpoint files".into(),
            ));
        }
        DynamicNet::deserialize(&bytes)
    } else {
        Err(Error::Decode(format!(
            "{} is neither a genome nor a checkpoint",
            path.display()
        )))
    }
}

pub fn export_dot(input: &Path, slot: Option<usize>, out: &Path) -> Result<()> {
    let net = load_genome(input, slot)?;
    write_file(out, net.to_dot())
}
