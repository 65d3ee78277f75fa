//! Versioned binary checkpoint. All integers little-endian, floats as raw bits.
//!
//! ```text
//! magic            11 bytes  "DYNEVO-CKPT"
//! version          u32       CHECKPOINT_FORMAT_VERSION
//! task             string    (u32 length + utf-8)
//! population_size  u32
//! generations      u64
//! perturb_sigma    f64
//! init_sigma       f64
//! mode             u8        0 dynamic, 1 static
//! master_seed      u64
//! workers          u32
//! checkpoint_every u64
//! generation       u64       next generation to run
//! agent_count      u32
//!   slot u32 | has_fitness u8 | fitness f64
//!   count u64 | mean f64s | m2 f64s
//!   genome (embedded genome encoding)
//! record_count     u32
//!   generation u64 | best f64 | mean f64 | median f64
//!   params u64 | nodes u64 | connections u64 | elapsed_seconds f64
//! ```

use super::{Agent, EvolutionConfig, NetMode, Population, RunRecord};
use crate::codec::{ByteReader, ByteWriter};
use crate::envs::{RunningStandardizer, Task};
use crate::error::{Error, Result};
use crate::netgraph::DynamicNet;

pub const CHECKPOINT_MAGIC: &[u8; 11] = b"DYNEVO-CKPT";
pub const CHECKPOINT_FORMAT_VERSION: u32 = 1;

const RECORD_BYTES: usize = 8 * 8;

pub fn save_checkpoint(pop: &Population, cfg: &EvolutionConfig, records: &[RunRecord]) -> Vec<u8> {
    let mut w = ByteWriter::new();
    w.raw(CHECKPOINT_MAGIC);
    w.u32(CHECKPOINT_FORMAT_VERSION);

    w.string(cfg.task.name());
    w.len_prefixed(cfg.population_size);
    w.u64(cfg.generations);
    w.f64(cfg.perturb_sigma);
    w.f64(cfg.init_sigma);
    w.u8(match cfg.mode {
        NetMode::Dynamic => 0,
        NetMode::Static => 1,
    });
    w.u64(cfg.master_seed);
    w.len_prefixed(cfg.workers);
    w.u64(cfg.checkpoint_every);

    w.u64(pop.generation);
    w.len_prefixed(pop.agents.len());
    for a in &pop.agents {
        w.len_prefixed(a.slot);
        w.u8(a.fitness.is_some() as u8);
        w.f64(a.fitness.unwrap_or(0.0));
        w.u64(a.standardizer.count());
        w.f64s(a.standardizer.mean());
        w.f64s(a.standardizer.m2());
        a.genome.encode(&mut w);
    }

    w.len_prefixed(records.len());
    for r in records {
        w.u64(r.generation);
        w.f64(r.best_fitness);
        w.f64(r.mean_fitness);
        w.f64(r.median_fitness);
        w.u64(r.elite_param_count as u64);
        w.u64(r.elite_node_count as u64);
        w.u64(r.elite_connection_count as u64);
        w.f64(r.elapsed_seconds);
    }
    w.into_bytes()
}

pub fn load_checkpoint(bytes: &[u8]) -> Result<(Population, EvolutionConfig, Vec<RunRecord>)> {
    let mut r = ByteReader::new(bytes);
    r.expect_magic(CHECKPOINT_MAGIC)?;
    let version = r.u32()?;
    if version != CHECKPOINT_FORMAT_VERSION {
        return Err(Error::Decode(format!(
            "unsupported checkpoint version {version} (expected {CHECKPOINT_FORMAT_VERSION})"
        )));
    }

    let task = Task::from_name(&r.string()?)?;
    let cfg = EvolutionConfig {
        task,
        population_size: r.u32()? as usize,
        generations: r.u64()?,
        perturb_sigma: r.f64()?,
        init_sigma: r.f64()?,
        mode: match r.u8()? {
            0 => NetMode::Dynamic,
            1 => NetMode::Static,
            m => return Err(Error::Decode(format!("unknown mode code {m}"))),
        },
        master_seed: r.u64()?,
        workers: r.u32()? as usize,
        checkpoint_every: r.u64()?,
    };
    cfg.validate()
        .map_err(|e| Error::Decode(format!("invalid stored config: {e}")))?;

    let generation = r.u64()?;
    let agent_count = r.len_prefixed(1)?;
    let d_input = task.spec().obs_dim;
    let mut agents = Vec::with_capacity(agent_count);
    for expected_slot in 0..agent_count {
        let slot = r.u32()? as usize;
        if slot != expected_slot {
            return Err(Error::Decode(format!(
                "agent {expected_slot} stored with slot {slot}"
            )));
        }
        let has_fitness = match r.u8()? {
            0 => false,
            1 => true,
            b => return Err(Error::Decode(format!("bad fitness flag {b}"))),
        };
        let fitness = r.f64()?;
        let standardizer = RunningStandardizer::from_parts(r.u64()?, r.f64s()?, r.f64s()?)
            .map_err(|e| Error::Decode(format!("agent {slot} standardizer: {e}")))?;
        let genome = DynamicNet::decode(&mut r)?;
        if standardizer.dim() != d_input || genome.d_input() != d_input {
            return Err(Error::Decode(format!(
                "agent {slot} does not match {task} input dimension {d_input}"
            )));
        }
        agents.push(Agent {
            genome,
            standardizer,
            fitness: has_fitness.then_some(fitness),
            slot,
        });
    }
    if agents.len() != cfg.population_size {
        return Err(Error::Decode(format!(
            "{} agents stored for population size {}",
            agents.len(),
            cfg.population_size
        )));
    }

    let record_count = r.len_prefixed(RECORD_BYTES)?;
    let mut records = Vec::with_capacity(record_count);
    for _ in 0..record_count {
        records.push(RunRecord {
            generation: r.u64()?,
            best_fitness: r.f64()?,
            mean_fitness: r.f64()?,
            median_fitness: r.f64()?,
            elite_param_count: r.u64()? as usize,
            elite_node_count: r.u64()? as usize,
            elite_connection_count: r.u64()? as usize,
            elapsed_seconds: r.f64()?,
        });
    }
    r.finish()?;

    let pop = Population {
        agents,
        generation,
        master_seed: cfg.master_seed,
    };
    Ok((pop, cfg, records))
}
